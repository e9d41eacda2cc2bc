"""(n,k)-families of perfect hashing functions.

A family of colorings {1..n} -> {1..k} is perfect when every k-subset of
the domain is injectively colored by at least one member.  Three providers
are offered: a certified greedy cover (desk scale), a prime-splitter
composition (scalable, larger families) and a Monte Carlo sampler.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from itertools import combinations

import numpy as np

DEFAULT_GREEDY_CAP = 200_000
DEFAULT_VERIFY_CAP = 10_000_000

# emit a constructed candidate after this many consecutive useless ones
_STALL = 64

_PROVIDERS = ("greedy", "splitter", "randomized")


class HashingError(ValueError):
    pass


class HashingCapError(HashingError):
    pass


@dataclass
class HashFamily:
    n: int
    k: int
    functions: tuple[tuple[int, ...], ...]
    provider: str
    certified: bool = False

    def __post_init__(self):
        for h in self.functions:
            if len(h) != self.n or any(not 1 <= c <= self.k for c in h):
                raise HashingError("function is not a total map {1..n} -> {1..k}")

    def __len__(self) -> int:
        return len(self.functions)

    def apply(self, idx: int, x: int) -> int:
        """Color of domain point x (1-based) under function idx."""
        return self.functions[idx][x - 1]

    def as_array(self) -> np.ndarray:
        return np.array(self.functions, dtype=np.int32)

    def restrict(self, n2: int) -> "HashFamily":
        """Restriction to the sub-domain {1..n2}; stays perfect for n2 >= k."""
        if not self.k <= n2 <= self.n:
            raise HashingError(f"sub-domain size {n2} outside {self.k}..{self.n}")
        return HashFamily(n2, self.k, tuple(h[:n2] for h in self.functions),
                          self.provider, certified=False)

    def to_text(self) -> str:
        lines = [f"phf {self.n} {self.k} {len(self.functions)}"]
        lines += [" ".join(map(str, h)) for h in self.functions]
        return "\n".join(lines) + "\n"

    @staticmethod
    def from_text(text: str) -> "HashFamily":
        lines = [ln for ln in text.splitlines() if ln.strip()]
        if not lines or not lines[0].startswith("phf "):
            raise HashingError("missing 'phf <n> <k> <count>' header")
        _, n, k, count = lines[0].split()
        n, k, count = int(n), int(k), int(count)
        if len(lines) - 1 != count:
            raise HashingError(f"header says {count} functions, found {len(lines) - 1}")
        funcs = tuple(tuple(int(c) for c in ln.split()) for ln in lines[1:])
        return HashFamily(n, k, funcs, provider="loaded")


def _check_nk(n: int, k: int) -> None:
    if k < 1:
        raise HashingError(f"k must be >= 1, got {k}")
    if k > n:
        raise HashingError(f"k={k} exceeds domain size n={n}")


def _injective_rows(colors: np.ndarray) -> np.ndarray:
    """Row mask: all k entries distinct."""
    if colors.shape[-1] == 1:
        return np.ones(colors.shape[:-1], dtype=bool)
    s = np.sort(colors, axis=-1)
    return (np.diff(s, axis=-1) != 0).all(axis=-1)


def _candidate(t: int, n: int, k: int) -> np.ndarray:
    """t-th pseudorandom k-ary code from a counter-based generator."""
    rng = np.random.Generator(np.random.Philox(key=0xC0DE5EED ^ t))
    return rng.integers(1, k + 1, size=n, dtype=np.int32)


def _constructed_for(subset: np.ndarray, n: int, k: int) -> np.ndarray:
    """A coloring that is injective on the given k-subset by construction."""
    h = ((np.arange(1, n + 1) - 1) % k + 1).astype(np.int32)
    h[subset - 1] = np.arange(1, k + 1, dtype=np.int32)
    return h


def _build_greedy(n: int, k: int, cap: int) -> list[np.ndarray]:
    total = math.comb(n, k)
    if total > cap:
        raise HashingCapError(
            f"greedy provider refused: C({n},{k}) = {total} exceeds cap {cap}")
    subs = np.array(list(combinations(range(1, n + 1), k)), dtype=np.int32)
    uncovered = np.ones(total, dtype=bool)
    kept: list[np.ndarray] = []
    t = 0
    stall = 0
    while uncovered.any():
        if stall >= _STALL:
            first = int(np.nonzero(uncovered)[0][0])
            h = _constructed_for(subs[first], n, k)
            stall = 0
        else:
            h = _candidate(t, n, k)
            t += 1
        idx = np.nonzero(uncovered)[0]
        newly = _injective_rows(h[subs[idx] - 1])
        if newly.any():
            uncovered[idx[newly]] = False
            kept.append(h)
            stall = 0
        else:
            stall += 1
    return kept


def _smallest_prime_above(n: int) -> int:
    c = n + 1
    while True:
        if c >= 2 and all(c % p for p in range(2, int(c ** 0.5) + 1)):
            return c
        c += 1


def _build_splitter(n: int, k: int, cap: int) -> list[np.ndarray]:
    """Compose x -> (a*x mod p) mod k^2 with an exhaustive inner family."""
    if n <= k * k:
        return _build_greedy(n, k, cap)
    inner = _build_greedy(k * k, k, cap)
    p = _smallest_prime_above(n)
    xs = np.arange(1, n + 1, dtype=np.int64)
    out: list[np.ndarray] = []
    seen: set[bytes] = set()
    for a in range(1, p):
        slot = ((a * xs) % p) % (k * k)  # 0..k^2-1
        for g in inner:
            h = g[slot].astype(np.int32)
            b = h.tobytes()
            if b not in seen:
                seen.add(b)
                out.append(h)
    return out


def _build_randomized(n: int, k: int, seed: int, count: int | None) -> list[np.ndarray]:
    if count is None:
        count = math.ceil(math.e ** k * k * 40 * math.log(max(n, 2)))
    rng = np.random.Generator(np.random.Philox(key=seed))
    return [rng.integers(1, k + 1, size=n, dtype=np.int32) for _ in range(count)]


def build_family(n: int, k: int, provider: str = "greedy", *, seed: int = 0,
                 count: int | None = None,
                 greedy_cap: int = DEFAULT_GREEDY_CAP,
                 verify_cap: int = DEFAULT_VERIFY_CAP) -> HashFamily:
    """Construct a family covering all k-subsets of {1..n}.

    greedy and splitter are deterministic and certified when the exhaustive
    check is feasible; randomized covers with failure probability below
    2^-40 at the default count and stays uncertified until verified.
    """
    _check_nk(n, k)
    if provider not in _PROVIDERS:
        raise HashingError(f"unknown provider {provider!r}, expected one of {_PROVIDERS}")
    if k == 1:
        fam = HashFamily(n, 1, (tuple([1] * n),), provider)
        fam.certified = True
        return fam
    if n == k:
        fam = HashFamily(n, k, (tuple(range(1, n + 1)),), provider)
        fam.certified = True
        return fam
    if provider == "greedy":
        funcs = _build_greedy(n, k, greedy_cap)
    elif provider == "splitter":
        funcs = _build_splitter(n, k, greedy_cap)
    else:
        funcs = _build_randomized(n, k, seed, count)
    fam = HashFamily(n, k, tuple(tuple(int(c) for c in h) for h in funcs), provider)
    if provider in ("greedy", "splitter") and math.comb(n, k) <= verify_cap:
        if not verify_family(fam, cap=verify_cap):
            raise AssertionError("constructed family failed verification")
    return fam


def verify_family(fam: HashFamily, cap: int = DEFAULT_VERIFY_CAP) -> bool:
    """Exhaustive check of the defining property; marks the family certified."""
    total = math.comb(fam.n, fam.k)
    if total > cap:
        raise HashingCapError(f"C({fam.n},{fam.k}) = {total} exceeds verify cap {cap}")
    arr = fam.as_array()
    if arr.size == 0:
        return total == 0
    chunk = max(1, 2_000_000 // max(len(fam) * fam.k, 1))
    it = combinations(range(1, fam.n + 1), fam.k)
    while True:
        block = []
        for _ in range(chunk):
            s = next(it, None)
            if s is None:
                break
            block.append(s)
        if not block:
            break
        subs = np.array(block, dtype=np.int32)          # (c, k)
        colors = arr[:, subs - 1]                        # (m, c, k)
        ok = _injective_rows(colors).any(axis=0)         # (c,)
        if not ok.all():
            return False
    fam.certified = True
    return True


def family_size_report(fam: HashFamily) -> tuple[int, int]:
    """Actual size next to this artifact's concrete budget formula.

    budget = ceil(e^k * k^(2*log2(max(k,2))) * log2(max(n,2))^2)
    """
    k, n = fam.k, fam.n
    bound = math.ceil(math.e ** k
                      * max(k, 2) ** (2 * math.log2(max(k, 2)))
                      * math.log2(max(n, 2)) ** 2)
    return len(fam), bound
