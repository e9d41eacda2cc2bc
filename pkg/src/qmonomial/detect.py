"""q-monomial detection engines.

The deterministic engine rewrites the formula (annotation + y-replacement),
then for every member of a perfect hash family substitutes group-algebra
values (basis vector + origin) for the y-variables and identity-tests the
resulting read-once annotation-variable formula.  Non-multilinear images
annihilate squares of (v + v_0), images with repeated colors become linearly
dependent products, and an injectively colored image survives as a full span
sum, so the family exhausts the search space.

Scalars are graded by marker degree and by substituted-leaf count, and the
verdict reads exactly the (t, k) slot: without this a surviving term of the
right marker degree but the wrong replacement degree (a bare w^t, say, or a
constant term in the unmarked case) would be mistaken for a hit.  A Monte
Carlo engine with random vector and scalar substitutions over the same
grading cross-checks the deterministic one.
"""

from __future__ import annotations

import math
import random
from dataclasses import dataclass

from qmonomial.fields import FieldParams, choose_field
from qmonomial.formula import (
    ADD,
    CONST,
    MARKER_VAR,
    MUL,
    VAR,
    Formula,
    evaluate,
)
from qmonomial.groupalg import MAX_DIMENSION
from qmonomial.hashing import build_family
from qmonomial.pit import PitCapExceeded, expand_tree, leaf, pit_tree, tadd, tmul
from qmonomial.rings import GradedPolyRing, GradedTermRing, OpCounter
from qmonomial.transform import TransformTrace, transform_formula

DEFAULT_LIST_CAP = 4096
DEFAULT_ORACLE_CAP = 100_000
MIN_RANDOM_TRIALS = 96


class DetectError(ValueError):
    pass


@dataclass
class DetectConfig:
    q: int = 2
    k: int = 1
    engine: str = "deterministic"        # or "randomized"
    pit_mode: str = "ring"               # or "oracle"
    hash_provider: str = "greedy"
    seed: int = 0
    marker_cap: int | None = None
    trials: int | None = None            # randomized engine override
    list_cap: int = DEFAULT_LIST_CAP
    oracle_cap: int = DEFAULT_ORACLE_CAP
    field: FieldParams | None = None     # override of the width formula

    def validated(self) -> "DetectConfig":
        if self.q < 2:
            raise DetectError(f"q must be >= 2, got {self.q}")
        if self.k < 1:
            raise DetectError(f"k must be >= 1, got {self.k}")
        if self.k > MAX_DIMENSION:
            raise DetectError(f"k={self.k} beyond supported maximum {MAX_DIMENSION}")
        if self.engine not in ("deterministic", "randomized"):
            raise DetectError(f"unknown engine {self.engine!r}")
        if self.pit_mode not in ("ring", "oracle"):
            raise DetectError(f"unknown pit mode {self.pit_mode!r}")
        if self.marker_cap is not None and self.marker_cap < 0:
            raise DetectError("marker cap must be >= 0")
        return self


@dataclass
class DetectReport:
    answer: str                          # yes / no / indeterminate
    q: int
    k: int
    marker_cap: int | None
    field: FieldParams
    family_size: int
    family_certified: bool
    hash_functions_tried: int
    witness_hash_index: int | None
    op_counts: dict[str, int]

    @property
    def yes(self) -> bool:
        return self.answer == "yes"


def select_basis(k: int) -> list[int]:
    """Group indices of the standard basis e_1..e_k of Z_2^k."""
    if k < 1:
        raise DetectError("k must be >= 1")
    return [1 << c for c in range(k)]


def _x_variables(f: Formula) -> list[int]:
    return sorted(v for v in f.variables() if v != MARKER_VAR)


def _substituted_tree(trace: TransformTrace, sub: dict[int, object], ring) -> tuple:
    """Read-once annotation-variable tree of the rewritten formula.

    y-variables become their substitution values, original constants and the
    marker become scalars, and annotation variables paired with gate outputs
    are carried with coefficient one.
    """
    g = trace.c_dprime
    y_set = set(trace.y_ids.values())

    def classify(i: int) -> str:
        nd = g.node(i)
        if nd.kind != VAR:
            return nd.kind
        if nd.var == MARKER_VAR:
            return "marker"
        if nd.var in y_set:
            return "y"
        return "z"

    def build(i: int) -> tuple:
        nd = g.node(i)
        if nd.kind == ADD:
            return tadd(*(build(c) for c in nd.children))
        if nd.kind == MUL:
            a, b = nd.children
            ka, kb = classify(a), classify(b)
            if ka != "z" and kb == "z":
                a, b = b, a
                ka, kb = kb, ka
            if ka == "z":
                zv = g.node(a).var
                if kb == "y":
                    return leaf(zv, sub[g.node(b).var])
                if kb == "marker":
                    return leaf(zv, ring.marker())
                if kb == CONST:
                    return leaf(zv, ring.from_const(g.node(b).value))
                return tmul(leaf(zv, ring.one), build(b))
            return tmul(build(a), build(b))
        raise DetectError(f"unexpected bare terminal at node {i} of the rewrite")

    import sys
    old = sys.getrecursionlimit()
    sys.setrecursionlimit(max(old, 4 * len(g.nodes) + 100))
    try:
        return build(g.root)
    finally:
        sys.setrecursionlimit(old)


def _tree_verdict_oracle(tree: tuple, ring, t: int, k: int,
                         cap: int) -> bool | None:
    """Expansion-based verdict; None when the term cap is exceeded."""
    try:
        terms = expand_tree(tree, ring, cap=cap)
    except PitCapExceeded:
        return None
    return any(v.w_degree == t and v.y_count == k for v in terms.values())


def _prepare(f: Formula, cfg: DetectConfig, marked: bool):
    cfg = cfg.validated()
    if marked:
        if cfg.marker_cap is None:
            raise DetectError("marked detection needs marker_cap")
    elif MARKER_VAR in f.variables():
        raise DetectError("formula contains the marker variable; use the marked test")
    xs = _x_variables(f)
    s = max(f.gate_count, 1)
    field = cfg.field if cfg.field is not None else choose_field(cfg.k, s)
    return cfg, xs, field


def _report_no_domain(cfg: DetectConfig, field: FieldParams, marked: bool) -> DetectReport:
    # fewer than k replacement variables exist, so no degree-k q-monomial can
    return DetectReport(
        answer="no", q=cfg.q, k=cfg.k,
        marker_cap=cfg.marker_cap if marked else None,
        field=field, family_size=0, family_certified=False,
        hash_functions_tried=0, witness_hash_index=None,
        op_counts=OpCounter().as_dict())


def _run_deterministic(f: Formula, cfg: DetectConfig, marked: bool) -> DetectReport:
    cfg, xs, field = _prepare(f, cfg, marked)
    t = cfg.marker_cap if marked else 0
    domain = (cfg.q - 1) * len(xs)
    if cfg.k > domain:
        return _report_no_domain(cfg, field, marked)
    trace = transform_formula(f, cfg.q)
    fam = build_family(domain, cfg.k, cfg.hash_provider, seed=cfg.seed)
    basis = select_basis(cfg.k)
    counter = OpCounter()
    ring = GradedTermRing(t, cfg.k, field, counter)
    extras: dict[str, int] = {"pit_collapses": 0}
    answer = "no"
    witness = None
    tried = 0
    saw_indeterminate = False
    for idx, h in enumerate(fam.functions):
        sub = {}
        for key, yid in trace.y_ids.items():
            color = h[trace.tau[key] - 1]
            sub[yid] = ring.y_value(ring.ga.vector_plus_origin(basis[color - 1]))
        tree = _substituted_tree(trace, sub, ring)
        tried += 1
        if cfg.pit_mode == "oracle":
            verdict = _tree_verdict_oracle(tree, ring, t, cfg.k, cfg.oracle_cap)
        else:
            rep = pit_tree(tree, ring, list_cap=cfg.list_cap, counter=counter)
            extras["pit_collapses"] += rep.collapses
            if rep.indeterminate:
                verdict = _tree_verdict_oracle(tree, ring, t, cfg.k, cfg.oracle_cap)
            else:
                verdict = any(v.w_degree == t and v.y_count == cfg.k
                              for v in rep.root_values)
        if idx == 0:
            first = counter.as_dict()
            extras["ga_mul_first_hash"] = first["ga_mul"]
            extras["ga_int_ops_first_hash"] = first["ga_int_ops"]
        if verdict is None:
            saw_indeterminate = True
        elif verdict:
            answer = "yes"
            witness = idx
            break
    if answer != "yes" and saw_indeterminate:
        answer = "indeterminate"
    counts = counter.as_dict()
    counts.update(extras)
    return DetectReport(
        answer=answer, q=cfg.q, k=cfg.k,
        marker_cap=cfg.marker_cap if marked else None,
        field=field, family_size=len(fam), family_certified=fam.certified,
        hash_functions_tried=tried, witness_hash_index=witness,
        op_counts=counts)


def _run_randomized(f: Formula, cfg: DetectConfig, marked: bool) -> DetectReport:
    cfg, xs, field = _prepare(f, cfg, marked)
    t = cfg.marker_cap if marked else 0
    domain = (cfg.q - 1) * len(xs)
    if cfg.k > domain:
        return _report_no_domain(cfg, field, marked)
    trace = transform_formula(f, cfg.q)
    counter = OpCounter()
    ring = GradedPolyRing(t, cfg.k, cfg.k, field, counter)
    trials = cfg.trials if cfg.trials is not None else max(
        math.ceil(4 * math.e ** cfg.k), MIN_RANDOM_TRIALS)
    rng = random.Random(cfg.seed)
    y_ids = set(trace.y_ids.values())
    answer = "no"
    witness = None
    tried = 0
    for trial in range(trials):
        assignment: dict[int, object] = {}
        for yid in sorted(y_ids):
            value = ring.ga.vector_plus_origin(rng.randrange(1 << cfg.k))
            assignment[yid] = ring.y_value(value)
        for zid in sorted(trace.z_ids):
            assignment[zid] = ring.from_const(rng.randrange(1, field.order))
        if marked:
            assignment[MARKER_VAR] = ring.marker()
        value = evaluate(trace.c_dprime, assignment, ring)
        tried += 1
        if not ring.coefficient(value, t, cfg.k).is_zero():
            answer = "yes"
            witness = trial
            break
    return DetectReport(
        answer=answer, q=cfg.q, k=cfg.k,
        marker_cap=cfg.marker_cap if marked else None,
        field=field, family_size=0, family_certified=False,
        hash_functions_tried=tried, witness_hash_index=witness,
        op_counts=counter.as_dict())


def detect_q_monomial(f: Formula, cfg: DetectConfig) -> DetectReport:
    """Does the expansion contain a q-monomial of degree exactly k?

    Occurrence semantics: the annotation tags keep every monomial occurrence
    visible, so a q-monomial whose occurrences cancel under characteristic-2
    coefficient collection is still reported (the set-packing reduction
    depends on this).  The replacement-degree grading pins the degree to
    exactly k.
    """
    if cfg.engine == "randomized":
        return _run_randomized(f, cfg, marked=False)
    return _run_deterministic(f, cfg, marked=False)


def detect_marked_q_monomial(f: Formula, cfg: DetectConfig) -> DetectReport:
    """Does the expansion contain w^t * pi with pi a degree-k q-monomial?

    t is cfg.marker_cap; w is the reserved marker variable, which the
    rewrite stages never replace.  Occurrence semantics as in
    detect_q_monomial.
    """
    if cfg.engine == "randomized":
        return _run_randomized(f, cfg, marked=True)
    return _run_deterministic(f, cfg, marked=True)


def detect_q_monomial_randomized(f: Formula, cfg: DetectConfig) -> DetectReport:
    """Monte Carlo engine regardless of cfg.engine; one-sided error on "no"."""
    marked = cfg.marker_cap is not None
    return _run_randomized(f, cfg, marked=marked)
