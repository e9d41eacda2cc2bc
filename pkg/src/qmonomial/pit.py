"""Identity testing for leaf-weighted read-once formulas.

The input shape ("S-read-once"): a tree, each variable in exactly one
terminal, each terminal paired with a scalar under a x gate.  Testing works
by repeated collapse of the lowest gate whose children are already linear
forms: + gates merge forms, x gates are replaced by a fresh variable whose
coefficient preserves joint vanishing of all cross products.  Over a field
that coefficient degenerates to zero-or-unit; over rings with zero divisors
the engine instead carries the deduplicated list of nonzero cross products
(capped), which keeps the verdict exact because read-once structure makes
every original monomial's coefficient a plain product of leaf scalars.
"""

from __future__ import annotations

import heapq
import sys
from dataclasses import dataclass

from qmonomial.fields import FieldParams
from qmonomial.formula import (
    ADD,
    CONST,
    MUL,
    VAR,
    Formula,
    FormulaBuilder,
)
from qmonomial.rings import FieldRing, OpCounter

PIT_FRESH_BASE = 1 << 30

DEFAULT_LIST_CAP = 4096
DEFAULT_ORACLE_CAP = 100_000


class PitError(ValueError):
    pass


class PitCapExceeded(PitError):
    pass


@dataclass
class PitReport:
    zero: bool | None             # None when indeterminate
    root_values: tuple            # deduplicated nonzero root coefficients
    collapses: int
    products: int
    max_pair_products: int

    @property
    def indeterminate(self) -> bool:
        return self.zero is None


def is_sreadonce(f: Formula) -> bool:
    return not sreadonce_violations(f)


def sreadonce_violations(f: Formula) -> list[str]:
    """Empty list iff the formula has the S-read-once shape."""
    out: list[str] = []
    indeg: dict[int, int] = {}
    reachable = f.postorder()
    parent: dict[int, int] = {}
    for i in reachable:
        for c in f.node(i).children:
            indeg[c] = indeg.get(c, 0) + 1
            parent[c] = i
    if any(v > 1 for v in indeg.values()):
        out.append("graph including terminals is not a tree")
    seen_vars: dict[int, int] = {}
    for i in reachable:
        nd = f.node(i)
        if nd.kind == VAR:
            seen_vars[nd.var] = seen_vars.get(nd.var, 0) + 1
    dup = [v for v, c in seen_vars.items() if c > 1]
    if dup:
        out.append(f"variables appearing in more than one terminal: {sorted(dup)}")
    for i in reachable:
        nd = f.node(i)
        if nd.kind not in (VAR, CONST):
            continue
        p = parent.get(i)
        if p is None:
            out.append(f"terminal {i} is the root (no scalar pairing)")
            continue
        pn = f.node(p)
        if pn.kind != MUL:
            out.append(f"terminal {i} feeds a '{pn.kind}' gate, not a pairing 'x' gate")
            continue
        kinds = sorted(f.node(c).kind for c in pn.children)
        if kinds != [CONST, VAR]:
            out.append(f"'x' gate {p} does not pair one scalar with one variable")
    return out


def collapse_scalar(products, ring=None):
    """Field semantics of the cross-product collapse: zero or a unit.

    Joint vanishing of alpha_i * F2 for all i is equivalent to d * F2 = 0
    for this d, which is all the collapse has to preserve.
    """
    if ring is None:
        for p in products:
            if p != 0:
                return 1
        return 0
    for p in products:
        if not ring.is_zero(p):
            return ring.one
    return ring.zero


# -- generic S-read-once trees ------------------------------------------------
#
# ('leaf', var_id, scalar) | ('add', (children...)) | ('mul', left, right)

def leaf(var: int, scalar) -> tuple:
    return ("leaf", var, scalar)


def tadd(*children: tuple) -> tuple:
    if not children:
        raise PitError("empty sum")
    return ("add", tuple(children))


def tmul(left: tuple, right: tuple) -> tuple:
    return ("mul", left, right)


def formula_to_tree(f: Formula, ring) -> tuple:
    """Field-mode entry: pair every (scalar, variable) x gate into a leaf."""
    bad = sreadonce_violations(f)
    if bad:
        raise PitError("not S-read-once: " + "; ".join(bad))

    def build(i: int) -> tuple:
        nd = f.node(i)
        if nd.kind == ADD:
            return ("add", tuple(build(c) for c in nd.children))
        if nd.kind == MUL:
            a, b = nd.children
            ka, kb = f.node(a).kind, f.node(b).kind
            if {ka, kb} == {CONST, VAR}:
                cnode = f.node(a) if ka == CONST else f.node(b)
                vnode = f.node(b) if ka == CONST else f.node(a)
                return ("leaf", vnode.var, ring.from_const(cnode.value))
            return ("mul", build(a), build(b))
        raise PitError(f"unpaired terminal reached at node {i}")

    old = sys.getrecursionlimit()
    sys.setrecursionlimit(max(old, 4 * len(f.nodes) + 100))
    try:
        return build(f.root)
    finally:
        sys.setrecursionlimit(old)


class _Engine:
    """Iterative collapse loop; order is lowest depth, then lowest id."""

    def __init__(self, tree: tuple, ring, field_mode: bool, list_cap: int,
                 counter: OpCounter | None, on_collapse=None):
        self.ring = ring
        self.field_mode = field_mode
        self.list_cap = list_cap
        self.counter = counter
        self.on_collapse = on_collapse
        self.kind: dict[int, str] = {}
        self.children: dict[int, list[int]] = {}
        self.form: dict[int, dict] = {}      # id -> {var: {key: scalar}}
        self.depth: dict[int, int] = {}
        self.parent: dict[int, int] = {}
        self.pending: dict[int, int] = {}    # gate id -> children not yet forms
        self.next_id = 0
        self.fresh_var = PIT_FRESH_BASE
        self.collapses = 0
        self.products = 0
        self.max_pair_products = 0
        self.seen_vars: set[int] = set()
        self.root = self._ingest(tree, 0)
        self.ready = [(self.depth[i], i) for i, p in self.pending.items() if p == 0]
        heapq.heapify(self.ready)

    def _new(self) -> int:
        i = self.next_id
        self.next_id += 1
        return i

    def _ingest(self, t: tuple, depth: int) -> int:
        i = self._new()
        self.depth[i] = depth
        tag = t[0]
        if tag == "leaf":
            _, var, scalar = t
            if var in self.seen_vars:
                raise PitError(f"variable {var} appears in two leaves")
            self.seen_vars.add(var)
            self.kind[i] = "form"
            if self.ring.is_zero(scalar):
                self.form[i] = {}
            else:
                self.form[i] = {var: {self.ring.key(scalar): scalar}}
        elif tag == "add":
            self.kind[i] = "add"
            self.children[i] = [self._ingest(c, depth + 1) for c in t[1]]
        elif tag == "mul":
            self.kind[i] = "mul"
            self.children[i] = [self._ingest(t[1], depth + 1),
                                self._ingest(t[2], depth + 1)]
        else:
            raise PitError(f"bad tree tag {tag!r}")
        if tag in ("add", "mul"):
            for c in self.children[i]:
                self.parent[c] = i
            self.pending[i] = sum(1 for c in self.children[i]
                                  if self.kind[c] != "form")
        return i

    def _became_form(self, i: int) -> None:
        p = self.parent.get(i)
        if p is not None:
            self.pending[p] -= 1
            if self.pending[p] == 0:
                heapq.heappush(self.ready, (self.depth[p], p))

    def _merge_add(self, i: int) -> None:
        merged: dict = {}
        for c in self.children[i]:
            for var, vals in self.form[c].items():
                if var in merged:
                    raise PitError(f"variable {var} reached from two branches")
                merged[var] = vals
            del self.form[c], self.kind[c]
        self.form[i] = merged
        self.kind[i] = "form"
        del self.children[i]

    def _collapse_mul(self, i: int) -> None:
        a, b = self.children[i]
        fa, fb = self.form[a], self.form[b]
        acc: dict = {}
        pair_products = 0
        for va in fa.values():
            for sa in va.values():
                for vb in fb.values():
                    for sb in vb.values():
                        p = self.ring.mul(sa, sb)
                        pair_products += 1
                        if not self.ring.is_zero(p):
                            acc[self.ring.key(p)] = p
                            if len(acc) > self.list_cap:
                                raise PitCapExceeded(
                                    f"cross-product list exceeded cap {self.list_cap}")
        self.products += pair_products
        self.max_pair_products = max(self.max_pair_products, pair_products)
        if self.field_mode:
            d = collapse_scalar(acc.values(), self.ring)
            acc = {} if self.ring.is_zero(d) else {self.ring.key(d): d}
        if acc:
            v = self.fresh_var
            self.fresh_var += 1
            self.form[i] = {v: acc}
        else:
            self.form[i] = {}
        self.kind[i] = "form"
        for c in (a, b):
            del self.form[c], self.kind[c]
        del self.children[i]

    def run(self) -> dict:
        while self.kind[self.root] != "form":
            if not self.ready:
                raise PitError("reduction stuck: malformed tree")
            _, i = heapq.heappop(self.ready)
            if self.kind[i] == "add":
                self._merge_add(i)
            else:
                self._collapse_mul(i)
            self.collapses += 1
            self._became_form(i)
            if self.on_collapse is not None:
                self.on_collapse(self)
        if self.counter is not None:
            self.counter.pit_products += self.products
        return self.form[self.root]

    def live_nodes(self) -> int:
        return len(self.kind)

    def snapshot(self) -> Formula | None:
        """Current state as a formula (field mode only; used by tests)."""
        if not self.field_mode:
            return None
        b = FormulaBuilder()

        def emit_form(i: int) -> int:
            entries = []
            for var, vals in self.form[i].items():
                (scalar,) = vals.values() or (0,)
                entries.append(b.mul(b.fresh_const(scalar), b.fresh_var(var)))
            if not entries:
                entries.append(b.mul(b.fresh_const(0), b.fresh_var(self.fresh_var)))
            return entries[0] if len(entries) == 1 else b.add(*entries)

        def emit(i: int) -> int:
            if self.kind[i] == "form":
                return emit_form(i)
            children = [emit(c) for c in self.children[i]]
            if self.kind[i] == "add":
                return b.add(*children)
            return b.mul(children[0], children[1])

        return b.build(emit(self.root))


def pit_tree(tree: tuple, ring, *, field_mode: bool = False,
             list_cap: int = DEFAULT_LIST_CAP,
             counter: OpCounter | None = None,
             on_collapse=None) -> PitReport:
    """Run the collapse reduction over a generic S-read-once tree.

    on_collapse, when given, is called with the engine after every collapse;
    engine.live_nodes() and engine.snapshot() expose the current state.
    """
    eng = _Engine(tree, ring, field_mode, list_cap, counter, on_collapse)
    try:
        root_form = eng.run()
    except PitCapExceeded:
        return PitReport(None, (), eng.collapses, eng.products, eng.max_pair_products)
    values = tuple(s for vals in root_form.values() for s in vals.values())
    return PitReport(not values, values, eng.collapses, eng.products,
                     eng.max_pair_products)


def pit_sreadonce(f: Formula, field: FieldParams, on_collapse=None) -> bool:
    """True iff the formula computes the identically-zero polynomial."""
    ring = FieldRing(field)
    rep = pit_tree(formula_to_tree(f, ring), ring, field_mode=True,
                   on_collapse=on_collapse)
    assert rep.zero is not None  # field mode never hits the list cap
    return rep.zero


def pit_sreadonce_report(f: Formula, field: FieldParams,
                         on_collapse=None) -> PitReport:
    ring = FieldRing(field)
    return pit_tree(formula_to_tree(f, ring), ring, field_mode=True,
                    on_collapse=on_collapse)


def expand_tree(tree: tuple, ring, cap: int = DEFAULT_ORACLE_CAP) -> dict:
    """Oracle expansion of an S-read-once tree: leaf-variable set -> coefficient.

    Read-once structure means no two selections share a variable set, so no
    coefficient sums occur and a multiplicative ring suffices.
    """

    def walk(t: tuple) -> dict:
        tag = t[0]
        if tag == "leaf":
            _, var, scalar = t
            if ring.is_zero(scalar):
                return {}
            return {frozenset((var,)): scalar}
        if tag == "add":
            out: dict = {}
            for c in t[1]:
                sub = walk(c)
                for key, val in sub.items():
                    if key in out:
                        raise PitError("duplicate monomial in read-once expansion")
                    out[key] = val
                if len(out) > cap:
                    raise PitCapExceeded(f"expansion exceeded {cap} terms")
            return out
        a, b = walk(t[1]), walk(t[2])
        out = {}
        for ka, va in a.items():
            for kb, vb in b.items():
                p = ring.mul(va, vb)
                if not ring.is_zero(p):
                    out[ka | kb] = p
                    if len(out) > cap:
                        raise PitCapExceeded(f"expansion exceeded {cap} terms")
        return out

    return walk(tree)
