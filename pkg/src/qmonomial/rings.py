"""Coefficient rings pluggable into formula evaluation and identity testing.

Every ring exposes zero/one, add, mul, is_zero, key (a hashable fingerprint
for deduplication) and from_const (embedding of a field bit pattern).
Multiplication counters are threaded through the group-algebra rings so
engine reports can account for the exponential stage.
"""

from __future__ import annotations

from dataclasses import dataclass

from qmonomial.fields import FieldParams
from qmonomial.groupalg import (
    GroupAlgebraElem,
    MarkerPoly,
    _mul_wht_counted,
    ga_add,
)


@dataclass
class OpCounter:
    ga_mul: int = 0
    ga_add: int = 0
    ga_int_ops: int = 0
    pit_products: int = 0

    def as_dict(self) -> dict[str, int]:
        return {
            "ga_mul": self.ga_mul,
            "ga_add": self.ga_add,
            "ga_int_ops": self.ga_int_ops,
            "pit_products": self.pit_products,
        }


class FieldRing:
    """GF(2^d) itself; elements are bit patterns."""

    def __init__(self, params: FieldParams):
        self.params = params
        self.zero = 0
        self.one = 1

    def add(self, a: int, b: int) -> int:
        return self.params.add(a, b)

    def mul(self, a: int, b: int) -> int:
        return self.params.mul(a, b)

    def is_zero(self, a: int) -> bool:
        return a == 0

    def key(self, a: int) -> int:
        return a

    def from_const(self, bits: int) -> int:
        return self.params.check(bits)


class GroupAlgebraRing:
    """F[Z_2^k] with counted multiplications."""

    def __init__(self, k: int, params: FieldParams, counter: OpCounter | None = None):
        self.k = k
        self.params = params
        self.counter = counter
        self.zero = GroupAlgebraElem.zero(k, params)
        self.one = GroupAlgebraElem.one(k, params)

    def add(self, a: GroupAlgebraElem, b: GroupAlgebraElem) -> GroupAlgebraElem:
        if self.counter is not None:
            self.counter.ga_add += 1
        return ga_add(a, b)

    def mul(self, a: GroupAlgebraElem, b: GroupAlgebraElem) -> GroupAlgebraElem:
        out, ops = _mul_wht_counted(a, b)
        if self.counter is not None:
            self.counter.ga_mul += 1
            self.counter.ga_int_ops += ops
        return out

    def is_zero(self, a: GroupAlgebraElem) -> bool:
        return a.is_zero()

    def key(self, a: GroupAlgebraElem) -> bytes:
        return a.key()

    def from_const(self, bits: int) -> GroupAlgebraElem:
        return GroupAlgebraElem.scalar(self.k, self.params, bits)

    def vector_plus_origin(self, index: int) -> GroupAlgebraElem:
        return GroupAlgebraElem.vector_plus_origin(self.k, self.params, index)


class MarkerPolyRing:
    """Dense marker polynomials over F[Z_2^k], degree-capped."""

    def __init__(self, cap: int, k: int, params: FieldParams,
                 counter: OpCounter | None = None):
        self.cap = cap
        self.ga = GroupAlgebraRing(k, params, counter)
        self.zero = MarkerPoly.zero(cap, k, params)
        self.one = MarkerPoly.one(cap, k, params)

    def add(self, a: MarkerPoly, b: MarkerPoly) -> MarkerPoly:
        return MarkerPoly(self.cap, tuple(self.ga.add(x, y)
                                          for x, y in zip(a.parts, b.parts)))

    def mul(self, a: MarkerPoly, b: MarkerPoly) -> MarkerPoly:
        parts = list(self.zero.parts)
        for i, x in enumerate(a.parts):
            if x.is_zero():
                continue
            for j, y in enumerate(b.parts):
                if i + j > self.cap:
                    break
                if y.is_zero():
                    continue
                parts[i + j] = self.ga.add(parts[i + j], self.ga.mul(x, y))
        return MarkerPoly(self.cap, tuple(parts))

    def is_zero(self, a: MarkerPoly) -> bool:
        return a.is_zero()

    def key(self, a: MarkerPoly) -> bytes:
        return a.key()

    def from_const(self, bits: int) -> MarkerPoly:
        return MarkerPoly.term(self.cap, 0, self.ga.from_const(bits))

    def marker(self) -> MarkerPoly:
        return MarkerPoly.marker(self.cap, self.ga.k, self.ga.params)

    def lift(self, e: GroupAlgebraElem) -> MarkerPoly:
        return MarkerPoly.term(self.cap, 0, e)


@dataclass(frozen=True)
class GradedTerm:
    """A detection scalar: w^w_degree with y_count substituted-leaf factors.

    Leaf values are marker-free or the bare marker, so products stay single
    monomials in w.  The y-leaf count rides along because the verdict needs
    the surviving term's replacement degree to be exactly k; any nonzero
    group-algebra product holds pairwise-distinct lifted vectors, so the
    count can never exceed the dimension without the coefficient vanishing.
    """

    w_degree: int
    y_count: int
    coeff: GroupAlgebraElem


class GradedTermRing:
    """Multiplicative scalars for ring-mode identity testing."""

    def __init__(self, w_cap: int, k: int, params: FieldParams,
                 counter: OpCounter | None = None):
        self.w_cap = w_cap
        self.ga = GroupAlgebraRing(k, params, counter)
        self.zero = GradedTerm(0, 0, self.ga.zero)
        self.one = GradedTerm(0, 0, self.ga.one)

    def mul(self, a: GradedTerm, b: GradedTerm) -> GradedTerm:
        deg = a.w_degree + b.w_degree
        if deg > self.w_cap:
            return self.zero
        return GradedTerm(deg, a.y_count + b.y_count, self.ga.mul(a.coeff, b.coeff))

    def is_zero(self, a: GradedTerm) -> bool:
        return a.coeff.is_zero()

    def key(self, a: GradedTerm):
        return (a.w_degree, a.y_count, a.coeff.key())

    def from_const(self, bits: int) -> GradedTerm:
        return GradedTerm(0, 0, self.ga.from_const(bits))

    def marker(self) -> GradedTerm:
        if self.w_cap < 1:
            return self.zero
        return GradedTerm(1, 0, self.ga.one)

    def y_value(self, e: GroupAlgebraElem) -> GradedTerm:
        return GradedTerm(0, 1, e)


class GradedPolyRing:
    """Bivariate truncated grading over F[Z_2^k] for direct evaluation.

    Elements map (w degree, y-leaf count) to group-algebra coefficients;
    both grades are truncated at their caps.  The Monte Carlo engine
    evaluates the rewritten formula in this ring and reads out one slot.
    """

    def __init__(self, w_cap: int, y_cap: int, k: int, params: FieldParams,
                 counter: OpCounter | None = None):
        self.w_cap = w_cap
        self.y_cap = y_cap
        self.ga = GroupAlgebraRing(k, params, counter)
        self.zero: dict = {}
        self.one = {(0, 0): self.ga.one}

    def _put(self, acc: dict, key, value: GroupAlgebraElem) -> None:
        cur = acc.get(key)
        out = value if cur is None else self.ga.add(cur, value)
        if out.is_zero():
            acc.pop(key, None)
        else:
            acc[key] = out

    def add(self, a: dict, b: dict) -> dict:
        out = dict(a)
        for key, value in b.items():
            self._put(out, key, value)
        return out

    def mul(self, a: dict, b: dict) -> dict:
        out: dict = {}
        for (wa, ya), ca in a.items():
            for (wb, yb), cb in b.items():
                w, y = wa + wb, ya + yb
                if w > self.w_cap or y > self.y_cap:
                    continue
                self._put(out, (w, y), self.ga.mul(ca, cb))
        return out

    def is_zero(self, a: dict) -> bool:
        return not a

    def from_const(self, bits: int) -> dict:
        c = self.ga.from_const(bits)
        return {} if c.is_zero() else {(0, 0): c}

    def marker(self) -> dict:
        if self.w_cap < 1:
            return {}
        return {(1, 0): self.ga.one}

    def y_value(self, e: GroupAlgebraElem) -> dict:
        return {} if e.is_zero() or self.y_cap < 1 else {(0, 1): e}

    def coefficient(self, a: dict, w: int, y: int) -> GroupAlgebraElem:
        return a.get((w, y), self.ga.zero)
