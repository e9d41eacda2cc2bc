"""The group algebra F[Z_2^k] and its degree-capped marker-polynomial extension.

An element is a length-2^k coefficient vector over GF(2^d); index i holds
the coefficient of the group element whose k-bit binary pattern is i, and
the group law is XOR of indices.  Multiplication is XOR convolution,
available as the quadratic direct form and as the Walsh-Hadamard transform
form with integer lifting (characteristic 2 forbids the transform's final
division by 2^k inside the field, so each GF(2) coordinate pair is convolved
over the integers, reduced mod 2, and recombined through the basis-product
table).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from qmonomial import _kernels
from qmonomial.fields import FieldParams, log_exp_tables, x_power_table

MAX_DIMENSION = 20

# transform overhead dominates below this dimension; the direct form is used
WHT_MIN_K = 4


class GroupAlgebraError(ValueError):
    pass


def _freeze(arr: np.ndarray) -> np.ndarray:
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True, eq=False)
class GroupAlgebraElem:
    k: int
    field: FieldParams
    coeffs: np.ndarray  # uint16, length 2^k, read-only

    @staticmethod
    def from_ints(k: int, field: FieldParams, values) -> "GroupAlgebraElem":
        arr = np.asarray(values, dtype=np.uint16)
        if arr.shape != (1 << k,):
            raise GroupAlgebraError(f"need 2^{k} coefficients, got shape {arr.shape}")
        if arr.size and int(arr.max()) >= field.order:
            raise GroupAlgebraError("coefficient outside the field")
        return GroupAlgebraElem(k, field, _freeze(arr.copy()))

    @staticmethod
    def zero(k: int, field: FieldParams) -> "GroupAlgebraElem":
        return GroupAlgebraElem(k, field, _freeze(np.zeros(1 << k, dtype=np.uint16)))

    @staticmethod
    def one(k: int, field: FieldParams) -> "GroupAlgebraElem":
        arr = np.zeros(1 << k, dtype=np.uint16)
        arr[0] = 1
        return GroupAlgebraElem(k, field, _freeze(arr))

    @staticmethod
    def scalar(k: int, field: FieldParams, c: int) -> "GroupAlgebraElem":
        arr = np.zeros(1 << k, dtype=np.uint16)
        arr[0] = field.check(c)
        return GroupAlgebraElem(k, field, _freeze(arr))

    @staticmethod
    def basis(k: int, field: FieldParams, index: int) -> "GroupAlgebraElem":
        """The group element v_index with coefficient 1."""
        arr = np.zeros(1 << k, dtype=np.uint16)
        arr[index] = 1
        return GroupAlgebraElem(k, field, _freeze(arr))

    @staticmethod
    def vector_plus_origin(k: int, field: FieldParams, index: int) -> "GroupAlgebraElem":
        """v_index + v_0, the substitution value used by the detection engine."""
        arr = np.zeros(1 << k, dtype=np.uint16)
        arr[0] ^= 1
        arr[index] ^= 1
        return GroupAlgebraElem(k, field, _freeze(arr))

    def is_zero(self) -> bool:
        return not self.coeffs.any()

    def key(self) -> bytes:
        return self.coeffs.tobytes()

    def support(self) -> set[int]:
        return {int(i) for i in np.nonzero(self.coeffs)[0]}

    def __eq__(self, other) -> bool:
        if not isinstance(other, GroupAlgebraElem):
            return NotImplemented
        return (self.k == other.k and self.field == other.field
                and bool(np.array_equal(self.coeffs, other.coeffs)))

    def __hash__(self) -> int:
        return hash((self.k, self.field, self.key()))

    def __add__(self, other: "GroupAlgebraElem") -> "GroupAlgebraElem":
        return ga_add(self, other)

    def __mul__(self, other: "GroupAlgebraElem") -> "GroupAlgebraElem":
        return ga_mul(self, other)


def _join(x: GroupAlgebraElem, y: GroupAlgebraElem) -> None:
    if x.k != y.k:
        raise GroupAlgebraError(f"dimension mismatch: {x.k} vs {y.k}")
    if x.field != y.field:
        raise GroupAlgebraError("field mismatch")


def ga_add(x: GroupAlgebraElem, y: GroupAlgebraElem) -> GroupAlgebraElem:
    _join(x, y)
    return GroupAlgebraElem(x.k, x.field, _freeze(np.bitwise_xor(x.coeffs, y.coeffs)))


def ga_mul_naive(x: GroupAlgebraElem, y: GroupAlgebraElem) -> GroupAlgebraElem:
    """Direct XOR convolution: O(4^k) coefficient products."""
    out, _ = _mul_naive_counted(x, y)
    return out


def _mul_naive_counted(x, y):
    _join(x, y)
    log_t, exp_t = log_exp_tables(x.field)
    arr, products = _kernels.conv_naive(x.coeffs, y.coeffs, log_t, exp_t, x.field.order - 1)
    return GroupAlgebraElem(x.k, x.field, _freeze(arr)), products


def _coordinate_rows(e: GroupAlgebraElem) -> tuple[np.ndarray, np.ndarray]:
    """Nonzero GF(2) coordinate rows of the coefficient vector, as 0/1 lifts."""
    d = e.field.d
    shifts = np.arange(d, dtype=np.uint16)
    mat = ((e.coeffs[None, :] >> shifts[:, None]) & 1).astype(np.int64)
    nz = np.nonzero(mat.any(axis=1))[0]
    return np.ascontiguousarray(mat[nz]), nz.astype(np.int64)


def ga_mul_wht(x: GroupAlgebraElem, y: GroupAlgebraElem, *,
               force: bool = False) -> GroupAlgebraElem:
    """Transform-based multiplication; bit-identical to ga_mul_naive.

    Falls back to the direct form for k < WHT_MIN_K unless force is set
    (equivalence tests exercise the transform at every dimension).
    """
    out, _ = _mul_wht_counted(x, y, force=force)
    return out


def _mul_wht_counted(x, y, *, force=False):
    _join(x, y)
    if x.k > MAX_DIMENSION:
        raise GroupAlgebraError(f"dimension {x.k} beyond the integer-lift bound {MAX_DIMENSION}")
    if x.k < WHT_MIN_K and not force:
        return _mul_naive_counted(x, y)
    xc, rx = _coordinate_rows(x)
    yc, ry = _coordinate_rows(y)
    if len(rx) == 0 or len(ry) == 0:
        return GroupAlgebraElem.zero(x.k, x.field), 0
    ppow = x_power_table(x.field)
    arr, ops = _kernels.wht_lift_mul(xc, rx, yc, ry, ppow, x.k)
    return GroupAlgebraElem(x.k, x.field, _freeze(arr)), int(ops)


def ga_mul(x: GroupAlgebraElem, y: GroupAlgebraElem) -> GroupAlgebraElem:
    """Dispatching product: transform form for k >= WHT_MIN_K, direct below."""
    return ga_mul_wht(x, y)


def wht_int(vec) -> np.ndarray:
    """Walsh-Hadamard transform of a length-2^k integer vector.

    Unnormalized (entries of H are +-1), so applying it twice multiplies
    every entry by 2^k.  Rejects inputs whose magnitude could overflow the
    signed 64-bit pipeline.
    """
    arr = np.array(vec, dtype=np.int64).reshape(1, -1)
    n = arr.shape[1]
    if n == 0 or n & (n - 1):
        raise GroupAlgebraError(f"length {n} is not a power of two")
    k = n.bit_length() - 1
    peak = int(np.abs(arr).max(initial=0)) << k
    if peak >= 1 << 62:
        raise GroupAlgebraError("entries too large for the 64-bit transform")
    _kernels.wht_rows(arr, k)
    return arr[0]


@dataclass(frozen=True, eq=False)
class MarkerPoly:
    """Univariate polynomial in the marker variable w, coefficients in F[Z_2^k].

    Degrees above the cap are discarded by multiplication; only the exact
    target degree is ever read out, so the truncation is lossless for that
    purpose.
    """

    cap: int
    parts: tuple[GroupAlgebraElem, ...]

    def __post_init__(self):
        if len(self.parts) != self.cap + 1:
            raise GroupAlgebraError(f"need {self.cap + 1} coefficients, got {len(self.parts)}")

    @staticmethod
    def zero(cap: int, k: int, field: FieldParams) -> "MarkerPoly":
        z = GroupAlgebraElem.zero(k, field)
        return MarkerPoly(cap, (z,) * (cap + 1))

    @staticmethod
    def one(cap: int, k: int, field: FieldParams) -> "MarkerPoly":
        return MarkerPoly.term(cap, 0, GroupAlgebraElem.one(k, field))

    @staticmethod
    def marker(cap: int, k: int, field: FieldParams) -> "MarkerPoly":
        """The polynomial w itself (zero when the cap cannot hold degree 1)."""
        if cap < 1:
            return MarkerPoly.zero(cap, k, field)
        return MarkerPoly.term(cap, 1, GroupAlgebraElem.one(k, field))

    @staticmethod
    def term(cap: int, degree: int, coeff: GroupAlgebraElem) -> "MarkerPoly":
        z = GroupAlgebraElem.zero(coeff.k, coeff.field)
        parts = [z] * (cap + 1)
        if degree <= cap:
            parts[degree] = coeff
        return MarkerPoly(cap, tuple(parts))

    def coefficient(self, degree: int) -> GroupAlgebraElem:
        return self.parts[degree]

    def is_zero(self) -> bool:
        return all(p.is_zero() for p in self.parts)

    def key(self) -> bytes:
        return b"".join(p.key() for p in self.parts)

    def __eq__(self, other) -> bool:
        if not isinstance(other, MarkerPoly):
            return NotImplemented
        return self.cap == other.cap and self.parts == other.parts

    def __hash__(self) -> int:
        return hash((self.cap, self.parts))

    def _join(self, other: "MarkerPoly") -> None:
        if self.cap != other.cap:
            raise GroupAlgebraError(f"cap mismatch: {self.cap} vs {other.cap}")

    def __add__(self, other: "MarkerPoly") -> "MarkerPoly":
        self._join(other)
        return MarkerPoly(self.cap, tuple(a + b for a, b in zip(self.parts, other.parts)))

    def __mul__(self, other: "MarkerPoly") -> "MarkerPoly":
        self._join(other)
        out = list(MarkerPoly.zero(self.cap, self.parts[0].k, self.parts[0].field).parts)
        for i, a in enumerate(self.parts):
            if a.is_zero():
                continue
            for j, b in enumerate(other.parts):
                if i + j > self.cap:
                    break
                if b.is_zero():
                    continue
                out[i + j] = out[i + j] + ga_mul(a, b)
        return MarkerPoly(self.cap, tuple(out))


def mp_add(p: MarkerPoly, q: MarkerPoly) -> MarkerPoly:
    return p + q


def mp_mul(p: MarkerPoly, q: MarkerPoly) -> MarkerPoly:
    return p * q
