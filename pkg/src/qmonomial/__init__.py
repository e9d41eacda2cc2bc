"""Deterministic q-monomial detection in arithmetic formulas.

A q-monomial is a monomial in which every variable exponent lies in
[1, q-1]; a 2-monomial is a multilinear monomial.  The detection engine
combines group-algebra evaluation over Z_2^k, Walsh-Hadamard fast
multiplication, perfect-hash derandomization and identity testing for
leaf-weighted read-once formulas.  On top of it sit decision solvers for
m-set k-packing, m-dimensional k-matching and t-domination.
"""

from qmonomial.fields import FieldParams, FieldElem, choose_field
from qmonomial.formula import Formula, parse_formula, expand, evaluate, has_q_monomial
from qmonomial.groupalg import GroupAlgebraElem, ga_add, ga_mul, ga_mul_naive, ga_mul_wht, wht_int
from qmonomial.detect import (
    DetectConfig,
    DetectReport,
    detect_q_monomial,
    detect_marked_q_monomial,
    detect_q_monomial_randomized,
)

__all__ = [
    "FieldParams",
    "FieldElem",
    "choose_field",
    "Formula",
    "parse_formula",
    "expand",
    "evaluate",
    "has_q_monomial",
    "GroupAlgebraElem",
    "ga_add",
    "ga_mul",
    "ga_mul_naive",
    "ga_mul_wht",
    "wht_int",
    "DetectConfig",
    "DetectReport",
    "detect_q_monomial",
    "detect_marked_q_monomial",
    "detect_q_monomial_randomized",
]

__version__ = "0.1.0"
