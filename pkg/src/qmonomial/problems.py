"""Reductions from three combinatorial problems to monomial detection.

Set packing maps to a k-th power of the sum of set monomials: a packing is
exactly a multilinear degree-mk term.  Dimensional matching and partial
domination use a marker variable whose exponent counts selections, with the
first coordinate (respectively the dominated nodes) recorded by multilinear
variable products.  Exhaustive solvers double as oracles.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from itertools import combinations

from qmonomial.detect import DetectConfig, DetectReport, detect_marked_q_monomial, detect_q_monomial
from qmonomial.formula import MARKER_VAR, Formula, FormulaBuilder


class InstanceError(ValueError):
    pass


class InstanceFormatError(InstanceError):
    def __init__(self, msg: str, line: int):
        super().__init__(f"{msg} (line {line})")
        self.line = line


class BruteCapError(InstanceError):
    pass


class SolverIndeterminate(RuntimeError):
    pass


DEFAULT_BRUTE_CAP = 10_000_000


@dataclass(frozen=True)
class PackingInstance:
    n: int
    m: int
    k: int
    sets: tuple[tuple[int, ...], ...]

    def __post_init__(self):
        if self.m < 3:
            raise InstanceError(f"member size m must be >= 3, got {self.m}")
        if self.k < 0:
            raise InstanceError("k must be >= 0")
        for s in self.sets:
            if len(s) != self.m or len(set(s)) != self.m:
                raise InstanceError(f"set {s} does not have {self.m} distinct elements")
            if any(not 1 <= e <= self.n for e in s):
                raise InstanceError(f"set {s} outside universe 1..{self.n}")


@dataclass(frozen=True)
class MatchingInstance:
    m: int
    k: int
    sizes: tuple[int, ...]
    tuples: tuple[tuple[int, ...], ...]

    def __post_init__(self):
        if self.m < 2:
            raise InstanceError(f"dimension m must be >= 2, got {self.m}")
        if self.k < 0:
            raise InstanceError("k must be >= 0")
        if len(self.sizes) != self.m or any(s < 1 for s in self.sizes):
            raise InstanceError("need m positive dimension sizes")
        for t in self.tuples:
            if len(t) != self.m:
                raise InstanceError(f"tuple {t} does not have {self.m} coordinates")
            if any(not 1 <= t[i] <= self.sizes[i] for i in range(self.m)):
                raise InstanceError(f"tuple {t} has a coordinate out of range")


@dataclass(frozen=True)
class DominatingInstance:
    n: int
    t: int
    edges: tuple[tuple[int, int], ...]

    def __post_init__(self):
        if self.n < 1 or self.t < 1:
            raise InstanceError("need n >= 1 and t >= 1")
        seen = set()
        for e in self.edges:
            u, v = e
            if u == v:
                raise InstanceError(f"self-loop at node {u}")
            if not (1 <= u <= self.n and 1 <= v <= self.n):
                raise InstanceError(f"edge {e} out of range")
            key = (min(u, v), max(u, v))
            if key in seen:
                raise InstanceError(f"duplicate edge {e}")
            seen.add(key)

    def neighbors(self, v: int) -> set[int]:
        out = set()
        for a, b in self.edges:
            if a == v:
                out.add(b)
            elif b == v:
                out.add(a)
        return out


# -- formula constructions ----------------------------------------------------

def build_packing_formula(inst: PackingInstance) -> tuple[Formula, int]:
    """((sum over sets of their variable products))^k and the target degree mk.

    The k-th power is a balanced product tree over k fresh copies of the
    base sum: terminals may be shared, gates may not.
    """
    if inst.k < 1:
        raise InstanceError("formula construction needs k >= 1")
    if not inst.sets:
        raise InstanceError("no sets to pack")
    b = FormulaBuilder()

    def base_sum() -> int:
        chains = [b.mul_chain([b.var(e) for e in sorted(s)]) for s in inst.sets]
        return b.add(*chains)

    root = b.mul_chain([base_sum() for _ in range(inst.k)])
    return b.build(root), inst.m * inst.k


def matching_var(inst: MatchingInstance, dim: int, value: int) -> int:
    """Variable id of coordinate (dim, value); dimension 1 has no variables."""
    if dim < 2:
        raise InstanceError("dimension 1 is not represented by variables")
    return 1 + sum(inst.sizes[1:dim - 1]) + (value - 1)


def build_matching_formula(inst: MatchingInstance) -> tuple[Formula, int, int]:
    """Product over first-coordinate groups of (1 + sum of w * tuple products).

    Returns (formula, marker degree k, residual degree (m-1)k): a matching of
    size k is exactly a term w^k * pi with pi multilinear of degree (m-1)k.
    """
    if inst.k < 1:
        raise InstanceError("formula construction needs k >= 1")
    b = FormulaBuilder()
    w = b.var(MARKER_VAR)
    groups: dict[int, list[tuple[int, ...]]] = {j: [] for j in range(1, inst.sizes[0] + 1)}
    for t in inst.tuples:
        groups[t[0]].append(t)
    factors = []
    for j in range(1, inst.sizes[0] + 1):
        terms = [b.const(1)]
        for t in groups[j]:
            pi = b.mul_chain([b.var(matching_var(inst, d, t[d - 1]))
                              for d in range(2, inst.m + 1)])
            terms.append(b.mul(w, pi))
        factors.append(b.add(*terms))
    root = b.mul_chain(factors)
    return b.build(root), inst.k, (inst.m - 1) * inst.k


def build_dominating_formula(inst: DominatingInstance, k: int) -> tuple[Formula, int]:
    """((sum over nodes of their closed-neighborhood products))^k, target w^t.

    Each node contributes (1 + w x_self) * prod over neighbors (1 + w x_j);
    a size-k selection dominating >= t nodes is exactly a term w^t * pi with
    pi multilinear of degree t.
    """
    if k < 1:
        raise InstanceError("formula construction needs k >= 1")
    b = FormulaBuilder()
    w = b.var(MARKER_VAR)

    def node_factor(i: int) -> int:
        covered = [i] + sorted(inst.neighbors(i))
        factors = [b.add(b.const(1), b.mul(w, b.var(j))) for j in covered]
        return b.mul_chain(factors)

    def base_sum() -> int:
        return b.add(*[node_factor(i) for i in range(1, inst.n + 1)])

    root = b.mul_chain([base_sum() for _ in range(k)])
    return b.build(root), inst.t


# -- engine-backed solvers ----------------------------------------------------

def _require_decided(rep: DetectReport) -> bool:
    if rep.answer == "indeterminate":
        raise SolverIndeterminate("detection engine returned indeterminate")
    return rep.yes


def solve_packing(inst: PackingInstance, cfg: DetectConfig | None = None) -> bool:
    """k pairwise disjoint members exist?  k = 0 is vacuously packable."""
    if inst.k == 0:
        return True
    if not inst.sets or inst.m * inst.k > inst.n:
        return False
    f, kprime = build_packing_formula(inst)
    cfg = replace(cfg or DetectConfig(), q=2, k=kprime, marker_cap=None)
    return _require_decided(detect_q_monomial(f, cfg))


def solve_matching(inst: MatchingInstance, cfg: DetectConfig | None = None) -> bool:
    """k mutually coordinate-disjoint tuples exist?  k = 0 trivially."""
    if inst.k == 0:
        return True
    if not inst.tuples or inst.k > min(inst.sizes):
        return False
    f, t, kprime = build_matching_formula(inst)
    cfg = replace(cfg or DetectConfig(), q=2, k=kprime, marker_cap=t)
    return _require_decided(detect_marked_q_monomial(f, cfg))


def solve_dominating_decision(inst: DominatingInstance, k: int,
                              cfg: DetectConfig | None = None) -> bool:
    """Some set of at most k nodes dominates at least t nodes?"""
    if inst.t > inst.n:
        return False
    if k < 1:
        return False
    f, t = build_dominating_formula(inst, k)
    cfg = replace(cfg or DetectConfig(), q=2, k=t, marker_cap=t)
    return _require_decided(detect_marked_q_monomial(f, cfg))


def solve_dominating_min_k(inst: DominatingInstance,
                           cfg: DetectConfig | None = None) -> int | None:
    """Minimal k whose decision is yes; None when t > n (infeasible).

    Any t nodes dominate themselves, so for t <= n the loop always stops at
    some k <= t.
    """
    if inst.t > inst.n:
        return None
    for k in range(1, inst.t + 1):
        if solve_dominating_decision(inst, k, cfg):
            return k
    raise AssertionError("unreachable: k = t always dominates t nodes")


# -- exhaustive oracles -------------------------------------------------------

def brute_packing(inst: PackingInstance, cap: int = DEFAULT_BRUTE_CAP) -> bool:
    if inst.k == 0:
        return True
    if math.comb(len(inst.sets), inst.k) > cap:
        raise BruteCapError("search space above the exhaustive cap")
    sets = [frozenset(s) for s in inst.sets]

    def extend(start: int, chosen: int, used: frozenset) -> bool:
        if chosen == inst.k:
            return True
        for i in range(start, len(sets)):
            if not (sets[i] & used):
                if extend(i + 1, chosen + 1, used | sets[i]):
                    return True
        return False

    return extend(0, 0, frozenset())


def brute_matching(inst: MatchingInstance, cap: int = DEFAULT_BRUTE_CAP) -> bool:
    if inst.k == 0:
        return True
    if math.comb(len(inst.tuples), inst.k) > cap:
        raise BruteCapError("search space above the exhaustive cap")
    tuples = list(inst.tuples)

    def disjoint(a: tuple[int, ...], b: tuple[int, ...]) -> bool:
        return all(a[i] != b[i] for i in range(inst.m))

    def extend(start: int, chosen: list[tuple[int, ...]]) -> bool:
        if len(chosen) == inst.k:
            return True
        for i in range(start, len(tuples)):
            if all(disjoint(tuples[i], c) for c in chosen):
                chosen.append(tuples[i])
                if extend(i + 1, chosen):
                    return True
                chosen.pop()
        return False

    return extend(0, [])


def brute_dominating_decision(inst: DominatingInstance, k: int,
                              cap: int = DEFAULT_BRUTE_CAP) -> bool:
    if inst.t > inst.n:
        return False
    if math.comb(inst.n, min(k, inst.n)) > cap:
        raise BruteCapError("search space above the exhaustive cap")
    closed = {v: {v} | inst.neighbors(v) for v in range(1, inst.n + 1)}
    # domination is monotone under adding nodes, so size exactly min(k, n)
    for sel in combinations(range(1, inst.n + 1), min(k, inst.n)):
        dominated = set()
        for v in sel:
            dominated |= closed[v]
        if len(dominated) >= inst.t:
            return True
    return False


def brute_dominating_min_k(inst: DominatingInstance,
                           cap: int = DEFAULT_BRUTE_CAP) -> int | None:
    if inst.t > inst.n:
        return None
    for k in range(1, inst.t + 1):
        if brute_dominating_decision(inst, k, cap):
            return k
    raise AssertionError("unreachable: k = t always dominates t nodes")


# -- instance files -----------------------------------------------------------

def _content_lines(text: str):
    for i, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if line and not line.startswith("#"):
            yield i, line


def _ints(parts: list[str], line: int) -> list[int]:
    try:
        return [int(p) for p in parts]
    except ValueError:
        raise InstanceFormatError(f"expected integers, got {parts!r}", line) from None


def load_instance(text: str):
    """Parse an instance file; the header keyword selects the problem."""
    lines = list(_content_lines(text))
    if not lines:
        raise InstanceFormatError("empty instance file", 1)
    line_no, header = lines[0]
    parts = header.split()
    kind = parts[0]
    if kind == "packing":
        if len(parts) != 4:
            raise InstanceFormatError("expected 'packing <n> <m> <k>'", line_no)
        n, m, k = _ints(parts[1:], line_no)
        sets = []
        for ln, body in lines[1:]:
            ids = _ints(body.split(), ln)
            if len(ids) != m:
                raise InstanceFormatError(f"expected {m} ids per set", ln)
            sets.append(tuple(ids))
        try:
            return PackingInstance(n, m, k, tuple(sets))
        except InstanceError as e:
            raise InstanceFormatError(str(e), line_no) from None
    if kind == "matching":
        if len(parts) != 3:
            raise InstanceFormatError("expected 'matching <m> <k>'", line_no)
        m, k = _ints(parts[1:], line_no)
        if len(lines) < 2:
            raise InstanceFormatError("missing 'sizes' line", line_no)
        sln, sizes_line = lines[1]
        sparts = sizes_line.split()
        if sparts[0] != "sizes" or len(sparts) != m + 1:
            raise InstanceFormatError(f"expected 'sizes <n1> .. <n{m}>'", sln)
        sizes = tuple(_ints(sparts[1:], sln))
        tuples = []
        for ln, body in lines[2:]:
            ids = _ints(body.split(), ln)
            if len(ids) != m:
                raise InstanceFormatError(f"expected {m} coordinates per tuple", ln)
            tuples.append(tuple(ids))
        try:
            return MatchingInstance(m, k, sizes, tuple(tuples))
        except InstanceError as e:
            raise InstanceFormatError(str(e), line_no) from None
    if kind == "dominating":
        if len(parts) != 3:
            raise InstanceFormatError("expected 'dominating <n> <t>'", line_no)
        n, t = _ints(parts[1:], line_no)
        edges = []
        for ln, body in lines[1:]:
            ids = _ints(body.split(), ln)
            if len(ids) != 2:
                raise InstanceFormatError("expected '<u> <v>' per edge", ln)
            edges.append((ids[0], ids[1]))
        try:
            return DominatingInstance(n, t, tuple(edges))
        except InstanceError as e:
            raise InstanceFormatError(str(e), line_no) from None
    raise InstanceFormatError(f"unknown instance kind {kind!r}", line_no)
