"""Arithmetic in GF(2^d) with bit-pattern elements.

An element is an int whose bit i is the coefficient of X^i; all products
are reduced modulo a fixed irreducible polynomial of degree d.  Widths are
capped at 16 bits so an element always fits a machine half-word.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np

MAX_WIDTH = 16


class FieldError(ValueError):
    pass


def clmul(a: int, b: int) -> int:
    """Carry-less product of two GF(2) polynomials given as bit patterns."""
    r = 0
    while a:
        if a & 1:
            r ^= b
        a >>= 1
        b <<= 1
    return r


def clmod(a: int, b: int) -> int:
    """Remainder of carry-less division of a by b (b != 0)."""
    db = b.bit_length()
    while a.bit_length() >= db:
        a ^= b << (a.bit_length() - db)
    return a


def is_irreducible(poly: int) -> bool:
    """Trial division by every polynomial of degree 1..deg/2."""
    deg = poly.bit_length() - 1
    if deg < 1:
        return False
    for q in range(2, 1 << (deg // 2 + 1)):
        if clmod(poly, q) == 0:
            return False
    return True


@lru_cache(maxsize=None)
def smallest_irreducible(d: int) -> int:
    """Numerically smallest degree-d irreducible, so fields are reproducible."""
    if not 1 <= d <= MAX_WIDTH:
        raise FieldError(f"field width {d} outside 1..{MAX_WIDTH}")
    for c in range(1 << d, 1 << (d + 1)):
        if is_irreducible(c):
            return c
    raise AssertionError("unreachable: irreducibles exist for every degree")


@dataclass(frozen=True)
class FieldParams:
    """GF(2^d) described by its width and irreducible modulus."""

    d: int
    irr: int

    def __post_init__(self):
        if not 1 <= self.d <= MAX_WIDTH:
            raise FieldError(f"field width {self.d} outside 1..{MAX_WIDTH}")
        if self.irr.bit_length() - 1 != self.d:
            raise FieldError(f"modulus {self.irr:#x} does not have degree {self.d}")
        if not is_irreducible(self.irr):
            raise FieldError(f"modulus {self.irr:#x} is reducible")

    @property
    def order(self) -> int:
        return 1 << self.d

    def check(self, a: int) -> int:
        if not 0 <= a < (1 << self.d):
            raise FieldError(f"{a:#x} is not a {self.d}-bit field element")
        return a

    def add(self, a: int, b: int) -> int:
        return self.check(a) ^ self.check(b)

    def mul(self, a: int, b: int) -> int:
        return clmod(clmul(self.check(a), self.check(b)), self.irr)

    def pow(self, a: int, e: int) -> int:
        self.check(a)
        r = 1
        while e:
            if e & 1:
                r = self.mul(r, a)
            a = self.mul(a, a)
            e >>= 1
        return r

    def inv(self, a: int) -> int:
        if self.check(a) == 0:
            raise FieldError("inverse of zero requested")
        return self.pow(a, self.order - 2)

    def elem(self, bits: int) -> "FieldElem":
        return FieldElem(self.check(bits), self)


def gf(d: int) -> FieldParams:
    """GF(2^d) with the canonical (smallest) modulus."""
    return FieldParams(d, smallest_irreducible(d))


def choose_field(k: int, s: int) -> FieldParams:
    """Field width for a degree-k test on a formula with s gates.

    d = ceil(log2(k*(s+1)+1)) + 1, with the canonical modulus for that width.
    """
    if k < 1 or s < 1:
        raise FieldError("k and s must be >= 1")
    x = k * (s + 1) + 1
    d = (x - 1).bit_length() + 1
    if d > MAX_WIDTH:
        raise FieldError(f"instance needs {d}-bit field, maximum is {MAX_WIDTH}")
    return gf(d)


@dataclass(frozen=True)
class FieldElem:
    """Operator sugar over (bits, field); arithmetic checks field identity."""

    bits: int
    field: FieldParams

    def _join(self, other: "FieldElem") -> FieldParams:
        if not isinstance(other, FieldElem):
            raise TypeError("expected a FieldElem")
        if other.field != self.field:
            raise FieldError("elements from different fields")
        return self.field

    def __add__(self, other: "FieldElem") -> "FieldElem":
        f = self._join(other)
        return FieldElem(f.add(self.bits, other.bits), f)

    def __mul__(self, other: "FieldElem") -> "FieldElem":
        f = self._join(other)
        return FieldElem(f.mul(self.bits, other.bits), f)

    def inverse(self) -> "FieldElem":
        return FieldElem(self.field.inv(self.bits), self.field)

    def __bool__(self) -> bool:
        return self.bits != 0


def gf_add(a: FieldElem, b: FieldElem) -> FieldElem:
    return a + b


def gf_mul(a: FieldElem, b: FieldElem) -> FieldElem:
    return a * b


def gf_inv(a: FieldElem) -> FieldElem:
    return a.inverse()


@lru_cache(maxsize=None)
def log_exp_tables(params: FieldParams) -> tuple[np.ndarray, np.ndarray]:
    """Discrete log/antilog tables over a fixed generator.

    log[0] is a sentinel (never consulted: zero operands are skipped).
    exp covers exponents 0..2*(2^d-2) so two logs can be added unreduced.
    """
    order = params.order
    m = order - 1
    if m == 1:
        log = np.zeros(2, dtype=np.int64)
        exp = np.ones(2, dtype=np.uint16)
        return log, exp
    for g in range(2, order):
        seen = 1
        x = g
        while x != 1 and seen <= m:
            x = params.mul(x, g)
            seen += 1
        if seen == m:
            break
    else:  # pragma: no cover - a generator always exists
        raise AssertionError("no generator found")
    log = np.zeros(order, dtype=np.int64)
    exp = np.zeros(2 * m, dtype=np.uint16)
    x = 1
    for i in range(m):
        exp[i] = x
        exp[i + m] = x
        log[x] = i
        x = params.mul(x, g)
    return log, exp


@lru_cache(maxsize=None)
def x_power_table(params: FieldParams) -> np.ndarray:
    """X^e mod irr for e in 0..2d-2, the basis products used by lifting."""
    out = np.zeros(2 * params.d - 1, dtype=np.uint16)
    x = 1
    for e in range(2 * params.d - 1):
        out[e] = x
        x = clmod(x << 1, params.irr)
    return out
