"""Three-stage rewrite taking a formula to its annotated, replacement form.

Stage 1 duplicates shared terminals so the graph becomes a tree.  Stage 2
multiplies a fresh annotation variable onto every edge (including a virtual
edge above the root), which tags each monomial occurrence with a unique
multilinear coefficient.  Stage 3 replaces every x-variable terminal with a
weighted sum of q-1 fresh y-variables, so q-monomials of the original
correspond exactly to multilinear y-monomials of the result.

Annotation and y ids are allocated in deterministic preorder; the marker
variable (id 0) passes through all stages unreplaced.
"""

from __future__ import annotations

from dataclasses import dataclass

from qmonomial.formula import (
    ADD,
    CONST,
    MARKER_VAR,
    VAR,
    Formula,
    FormulaBuilder,
    FormulaError,
)


@dataclass
class TransformTrace:
    original: Formula
    c_star: Formula
    c_prime: Formula
    c_dprime: Formula
    q: int
    z_count: int                       # annotation variables added by stage 2
    x_vars: tuple[int, ...]            # replaced variable ids, sorted
    tau: dict[tuple[int, int], int]    # (x id, copy j) -> 1..(q-1)*n
    y_ids: dict[tuple[int, int], int]  # (x id, copy j) -> y variable id
    z_ids: frozenset[int]              # all annotation ids (stages 2 and 3)

    @property
    def y_of_index(self) -> dict[int, int]:
        """tau index -> y variable id."""
        return {idx: self.y_ids[key] for key, idx in self.tau.items()}

    def sidecar_text(self) -> str:
        lines = [f"y {i} {j} -> {idx}" for (i, j), idx in sorted(self.tau.items())]
        return "\n".join(lines) + ("\n" if lines else "")


def duplicate_terminals(f: Formula) -> Formula:
    """Split every shared terminal into single-fan-out copies; same polynomial."""
    b = FormulaBuilder()

    def rebuild(i: int) -> int:
        nd = f.node(i)
        if nd.kind == VAR:
            return b.fresh_var(nd.var)
        if nd.kind == CONST:
            return b.fresh_const(nd.value)
        children = tuple(rebuild(c) for c in nd.children)
        if nd.kind == ADD:
            return b.add(*children)
        return b.mul(children[0], children[1])

    return b.build(_rebuild_iterative(f, rebuild))


def _rebuild_iterative(f: Formula, rebuild) -> int:
    # gates have fan-out <= 1, so the recursion visits each gate once; depth
    # can still exceed the interpreter limit for chain-shaped formulas
    import sys

    old = sys.getrecursionlimit()
    sys.setrecursionlimit(max(old, 4 * len(f.nodes) + 100))
    try:
        return rebuild(f.root)
    finally:
        sys.setrecursionlimit(old)


def annotate_edges(c_star: Formula, first_id: int | None = None) -> tuple[Formula, int]:
    """Multiply a fresh variable onto every edge, plus one above the root.

    Returns the annotated formula and the number of variables introduced.
    """
    if first_id is None:
        first_id = c_star.max_var() + 1
    b = FormulaBuilder()
    next_id = [first_id]

    def fresh_z() -> int:
        z = next_id[0]
        next_id[0] += 1
        return b.fresh_var(z)

    def rebuild(i: int) -> int:
        nd = c_star.node(i)
        if nd.kind == VAR:
            return b.fresh_var(nd.var)
        if nd.kind == CONST:
            return b.fresh_const(nd.value)
        wrapped = []
        for c in nd.children:
            z = fresh_z()  # preorder: the edge's tag precedes the subtree's
            wrapped.append(b.mul(z, rebuild(c)))
        if nd.kind == ADD:
            return b.add(*wrapped)
        return b.mul(wrapped[0], wrapped[1])

    def top(i: int) -> int:
        z = fresh_z()
        return b.mul(z, rebuild(i))

    root = _rebuild_iterative(c_star, lambda i: top(i))
    return b.build(root), next_id[0] - first_id


def replace_q(c_prime: Formula, q: int, x_vars: set[int] | None = None,
              first_id: int | None = None
              ) -> tuple[Formula, dict[tuple[int, int], int], dict[tuple[int, int], int]]:
    """Turn each x terminal into a sum of q-1 annotated y-variable leaves.

    Returns (formula, tau, y_ids) where tau numbers the (x, copy) pairs
    1..(q-1)*n and y_ids gives each pair's variable id.  Variables outside
    x_vars (annotation ids, the marker) pass through untouched.
    """
    if q < 2:
        raise FormulaError(f"q must be >= 2, got {q}")
    if x_vars is None:
        x_vars = {v for v in c_prime.variables() if v != MARKER_VAR}
    if first_id is None:
        first_id = c_prime.max_var() + 1
    xs = sorted(x_vars)
    tau: dict[tuple[int, int], int] = {}
    y_ids: dict[tuple[int, int], int] = {}
    next_id = first_id
    for pos, x in enumerate(xs):
        for j in range(1, q):
            tau[(x, j)] = pos * (q - 1) + j
            y_ids[(x, j)] = next_id
            next_id += 1
    b = FormulaBuilder()
    counter = [next_id]

    def rebuild(i: int) -> int:
        nd = c_prime.node(i)
        if nd.kind == VAR:
            if nd.var not in x_vars:
                return b.fresh_var(nd.var)
            leaves = []
            for j in range(1, q):
                z = counter[0]
                counter[0] += 1
                leaves.append(b.mul(b.fresh_var(z), b.fresh_var(y_ids[(nd.var, j)])))
            return b.add(*leaves)
        if nd.kind == CONST:
            return b.fresh_const(nd.value)
        children = tuple(rebuild(c) for c in nd.children)
        if nd.kind == ADD:
            return b.add(*children)
        return b.mul(children[0], children[1])

    root = _rebuild_iterative(c_prime, rebuild)
    return b.build(root), tau, y_ids


def transform_formula(f: Formula, q: int) -> TransformTrace:
    """Full pipeline; records every intermediate and the id bookkeeping."""
    x_vars = {v for v in f.variables() if v != MARKER_VAR}
    c_star = duplicate_terminals(f)
    zbase = f.max_var() + 1
    c_prime, z_count = annotate_edges(c_star, first_id=zbase)
    c_dprime, tau, y_ids = replace_q(c_prime, q, x_vars=x_vars,
                                     first_id=zbase + z_count)
    y_set = set(y_ids.values())
    z_ids = frozenset(v for v in c_dprime.variables()
                      if v >= zbase and v not in y_set)
    return TransformTrace(
        original=f,
        c_star=c_star,
        c_prime=c_prime,
        c_dprime=c_dprime,
        q=q,
        z_count=z_count,
        x_vars=tuple(sorted(x_vars)),
        tau=tau,
        y_ids=y_ids,
        z_ids=z_ids,
    )


def longest_path(f: Formula) -> int:
    """Edges on the longest root-to-terminal path."""
    depth: dict[int, int] = {}
    for i in f.postorder():
        nd = f.node(i)
        if not nd.children:
            depth[i] = 0
        else:
            depth[i] = 1 + max(depth[c] for c in nd.children)
    return depth[f.root]
