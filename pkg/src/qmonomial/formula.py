"""Arithmetic formulas: DAG model, text grammar, evaluation, symbolic expansion.

A formula is a rooted DAG of + gates (fan-in >= 1), x gates (fan-in exactly
2), variable terminals and field-constant terminals.  Gates have fan-out at
most one; only terminals may be shared.  Variables are dense integer ids; id
0 is reserved for the marker variable (printed "w"), ids from text files are
the positive integers of their "x<id>" tokens.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterator, Mapping

from qmonomial.fields import FieldParams, gf

ADD = "add"
MUL = "mul"
VAR = "var"
CONST = "const"

MARKER_VAR = 0

DEFAULT_EXPANSION_CAP = 10**6


class FormulaError(ValueError):
    pass


class FormulaSyntaxError(FormulaError):
    def __init__(self, msg: str, line: int, col: int):
        super().__init__(f"{msg} (line {line}, column {col})")
        self.line = line
        self.col = col


class ExpansionCapError(FormulaError):
    pass


@dataclass(frozen=True)
class Node:
    kind: str
    children: tuple[int, ...] = ()
    var: int = -1
    value: int = -1


@dataclass(frozen=True)
class Formula:
    nodes: tuple[Node, ...]
    root: int

    def __post_init__(self):
        validate(self)

    def node(self, i: int) -> Node:
        return self.nodes[i]

    @property
    def gate_count(self) -> int:
        """Size in the circuit sense: gates only, terminals excluded."""
        return sum(1 for n in self.nodes if n.kind in (ADD, MUL))

    def variables(self) -> set[int]:
        return {n.var for n in self.nodes if n.kind == VAR}

    def constants(self) -> set[int]:
        return {n.value for n in self.nodes if n.kind == CONST}

    def max_var(self) -> int:
        return max(self.variables(), default=-1)

    def postorder(self) -> list[int]:
        """Children-before-parents order of all nodes reachable from the root."""
        order: list[int] = []
        seen = [False] * len(self.nodes)
        stack: list[tuple[int, bool]] = [(self.root, False)]
        while stack:
            i, done = stack.pop()
            if done:
                order.append(i)
                continue
            if seen[i]:
                continue
            seen[i] = True
            stack.append((i, True))
            for c in self.nodes[i].children:
                if not seen[c]:
                    stack.append((c, False))
        return order

    def to_text(self) -> str:
        return to_text(self)

    def structural_key(self):
        return structural_key(self)


def validate(f: Formula) -> None:
    """Check fan-in rules, gate fan-out, reference validity and acyclicity."""
    n = len(f.nodes)
    if not 0 <= f.root < n:
        raise FormulaError(f"root {f.root} out of range")
    indeg = [0] * n
    for i, nd in enumerate(f.nodes):
        if nd.kind == ADD:
            if len(nd.children) < 1:
                raise FormulaError(f"node {i}: '+' gate needs at least one operand")
        elif nd.kind == MUL:
            if len(nd.children) != 2:
                raise FormulaError(f"node {i}: 'x' gate needs exactly two operands")
        elif nd.kind == VAR:
            if nd.children:
                raise FormulaError(f"node {i}: terminal with children")
            if nd.var < 0:
                raise FormulaError(f"node {i}: bad variable id {nd.var}")
        elif nd.kind == CONST:
            if nd.children:
                raise FormulaError(f"node {i}: terminal with children")
            if nd.value < 0:
                raise FormulaError(f"node {i}: bad constant {nd.value}")
        else:
            raise FormulaError(f"node {i}: unknown kind {nd.kind!r}")
        for c in nd.children:
            if not 0 <= c < n:
                raise FormulaError(f"node {i}: child {c} out of range")
            indeg[c] += 1
    for i, nd in enumerate(f.nodes):
        if nd.kind in (ADD, MUL) and indeg[i] > 1:
            raise FormulaError(f"node {i}: gate has fan-out {indeg[i]}, maximum is 1")
    # acyclicity: every reachable node must leave the DFS stack cleanly
    state = [0] * n  # 0 unvisited, 1 on stack, 2 done
    stack: list[tuple[int, int]] = [(f.root, 0)]
    state[f.root] = 1
    while stack:
        i, ci = stack[-1]
        ch = f.nodes[i].children
        if ci == len(ch):
            state[i] = 2
            stack.pop()
            continue
        stack[-1] = (i, ci + 1)
        c = ch[ci]
        if state[c] == 1:
            raise FormulaError(f"cycle through node {c}")
        if state[c] == 0:
            state[c] = 1
            stack.append((c, 0))


class FormulaBuilder:
    """Incremental construction; var/const terminals are deduplicated."""

    def __init__(self):
        self.nodes: list[Node] = []
        self._vars: dict[int, int] = {}
        self._consts: dict[int, int] = {}

    def _push(self, node: Node) -> int:
        self.nodes.append(node)
        return len(self.nodes) - 1

    def var(self, vid: int) -> int:
        if vid not in self._vars:
            self._vars[vid] = self._push(Node(VAR, var=vid))
        return self._vars[vid]

    def fresh_var(self, vid: int) -> int:
        """A non-shared terminal for vid (used by tree-producing rewrites)."""
        return self._push(Node(VAR, var=vid))

    def const(self, bits: int) -> int:
        if bits not in self._consts:
            self._consts[bits] = self._push(Node(CONST, value=bits))
        return self._consts[bits]

    def fresh_const(self, bits: int) -> int:
        return self._push(Node(CONST, value=bits))

    def add(self, *children: int) -> int:
        return self._push(Node(ADD, children=tuple(children)))

    def mul(self, a: int, b: int) -> int:
        return self._push(Node(MUL, children=(a, b)))

    def mul_chain(self, operands: list[int]) -> int:
        """Balanced product tree over >= 1 operands."""
        ops = list(operands)
        if not ops:
            raise FormulaError("empty product")
        while len(ops) > 1:
            nxt = [self.mul(ops[i], ops[i + 1]) if i + 1 < len(ops) else ops[i]
                   for i in range(0, len(ops), 2)]
            ops = nxt
        return ops[0]

    def build(self, root: int) -> Formula:
        return Formula(tuple(self.nodes), root)


def var_name(vid: int) -> str:
    return "w" if vid == MARKER_VAR else f"x{vid}"


_TOKEN_CHARS = "()+*"


def _tokenize(text: str) -> Iterator[tuple[str, int, int]]:
    line, col = 1, 1
    cur = ""
    cur_pos = (1, 1)
    for ch in text:
        if ch in "()" or ch.isspace():
            if cur:
                yield (cur, *cur_pos)
                cur = ""
            if ch in "()":
                yield (ch, line, col)
        else:
            if not cur:
                cur_pos = (line, col)
            cur += ch
        if ch == "\n":
            line += 1
            col = 1
        else:
            col += 1
    if cur:
        yield (cur, *cur_pos)


def parse_formula(text: str) -> Formula:
    """Parse the s-expression grammar; same "x<id>" token means one shared terminal."""
    tokens = list(_tokenize(text))
    if not tokens:
        raise FormulaSyntaxError("empty input", 1, 1)
    b = FormulaBuilder()
    pos = 0

    def peek():
        return tokens[pos] if pos < len(tokens) else (None, tokens[-1][1], tokens[-1][2])

    def take():
        nonlocal pos
        t = peek()
        pos += 1
        return t

    def parse_expr() -> int:
        tok, line, col = take()
        if tok is None:
            raise FormulaSyntaxError("unexpected end of input", line, col)
        if tok == "(":
            op, oline, ocol = take()
            if op not in ("+", "*"):
                raise FormulaSyntaxError(f"expected '+' or '*', got {op!r}", oline, ocol)
            children = []
            while True:
                nxt, nline, ncol = peek()
                if nxt is None:
                    raise FormulaSyntaxError("unclosed '('", line, col)
                if nxt == ")":
                    take()
                    break
                children.append(parse_expr())
            if op == "+":
                if not children:
                    raise FormulaSyntaxError("'+' gate needs at least one operand", line, col)
                return b.add(*children)
            if len(children) != 2:
                raise FormulaSyntaxError(
                    f"'*' gate takes exactly two operands, got {len(children)}", line, col)
            return b.mul(children[0], children[1])
        if tok == ")":
            raise FormulaSyntaxError("unexpected ')'", line, col)
        if tok.startswith("x"):
            body = tok[1:]
            if not body.isdigit() or int(body) <= 0:
                raise FormulaSyntaxError(f"bad variable token {tok!r}", line, col)
            return b.var(int(body))
        if tok.startswith("#"):
            body = tok[1:]
            try:
                bits = int(body, 16)
            except ValueError:
                raise FormulaSyntaxError(f"bad constant token {tok!r}", line, col) from None
            # only VAR tokens denote shared terminals; each constant literal
            # is its own node so scalar-paired shapes stay trees
            return b.fresh_const(bits)
        raise FormulaSyntaxError(f"unrecognized token {tok!r}", line, col)

    root = parse_expr()
    if pos != len(tokens):
        t, line, col = tokens[pos]
        raise FormulaSyntaxError(f"trailing input {t!r}", line, col)
    return b.build(root)


def to_text(f: Formula) -> str:
    parts: dict[int, str] = {}
    for i in f.postorder():
        nd = f.nodes[i]
        if nd.kind == VAR:
            if nd.var <= 0:
                raise FormulaError(f"variable id {nd.var} has no text form")
            parts[i] = f"x{nd.var}"
        elif nd.kind == CONST:
            parts[i] = f"#{nd.value:x}"
        elif nd.kind == ADD:
            parts[i] = "(+ " + " ".join(parts[c] for c in nd.children) + ")"
        else:
            parts[i] = "(* " + " ".join(parts[c] for c in nd.children) + ")"
    return parts[f.root]


def structural_key(f: Formula):
    """Canonical form of the unfolded tree; terminal sharing is erased."""
    parts: dict[int, tuple] = {}
    for i in f.postorder():
        nd = f.nodes[i]
        if nd.kind == VAR:
            parts[i] = (VAR, nd.var)
        elif nd.kind == CONST:
            parts[i] = (CONST, nd.value)
        else:
            parts[i] = (nd.kind,) + tuple(parts[c] for c in nd.children)
    return parts[f.root]


def evaluate(f: Formula, assignment: Mapping[int, object], ring) -> object:
    """Bottom-up evaluation; each node is computed once.

    The ring supplies add/mul/from_const; assignment maps every variable id
    of f to a ring element.
    """
    values: dict[int, object] = {}
    for i in f.postorder():
        nd = f.nodes[i]
        if nd.kind == VAR:
            if nd.var not in assignment:
                raise FormulaError(f"no value assigned to variable {var_name(nd.var)}")
            values[i] = assignment[nd.var]
        elif nd.kind == CONST:
            values[i] = ring.from_const(nd.value)
        elif nd.kind == ADD:
            acc = values[nd.children[0]]
            for c in nd.children[1:]:
                acc = ring.add(acc, values[c])
            values[i] = acc
        else:
            values[i] = ring.mul(values[nd.children[0]], values[nd.children[1]])
    return values[f.root]


@dataclass(frozen=True)
class Monomial:
    """Exponent vector, kept as a sorted tuple of (variable id, exponent > 0)."""

    exponents: tuple[tuple[int, int], ...]

    @staticmethod
    def from_dict(e: Mapping[int, int]) -> "Monomial":
        return Monomial(tuple(sorted((v, x) for v, x in e.items() if x)))

    @property
    def degree(self) -> int:
        return sum(x for _, x in self.exponents)

    def exponent_of(self, vid: int) -> int:
        for v, x in self.exponents:
            if v == vid:
                return x
        return 0

    def is_multilinear(self) -> bool:
        return all(x == 1 for _, x in self.exponents)

    def is_q_monomial(self, q: int) -> bool:
        return all(1 <= x <= q - 1 for _, x in self.exponents)

    def without(self, vid: int) -> "Monomial":
        return Monomial(tuple((v, x) for v, x in self.exponents if v != vid))

    def restricted(self, vids) -> "Monomial":
        return Monomial(tuple((v, x) for v, x in self.exponents if v in vids))

    def __mul__(self, other: "Monomial") -> "Monomial":
        e = dict(self.exponents)
        for v, x in other.exponents:
            e[v] = e.get(v, 0) + x
        return Monomial.from_dict(e)


@dataclass
class ExpandedPoly:
    """Sum-product expansion: monomial -> nonzero field coefficient."""

    field: FieldParams
    terms: dict[Monomial, int]

    def is_zero(self) -> bool:
        return not self.terms

    def coefficient(self, m: Monomial) -> int:
        return self.terms.get(m, 0)

    def __add__(self, other: "ExpandedPoly") -> "ExpandedPoly":
        if other.field != self.field:
            raise FormulaError("expansions over different fields")
        out = dict(self.terms)
        for m, c in other.terms.items():
            s = out.get(m, 0) ^ c
            if s:
                out[m] = s
            else:
                out.pop(m, None)
        return ExpandedPoly(self.field, out)

    def evaluate_at(self, assignment: Mapping[int, int]) -> int:
        """Value at a field point, computed straight off the expansion."""
        total = 0
        for m, c in self.terms.items():
            v = c
            for vid, x in m.exponents:
                v = self.field.mul(v, self.field.pow(assignment[vid], x))
            total ^= v
        return total


def estimate_terms(f: Formula) -> int:
    """Upper bound on expansion size (cancellation only shrinks it)."""
    est: dict[int, int] = {}
    for i in f.postorder():
        nd = f.nodes[i]
        if nd.kind in (VAR, CONST):
            est[i] = 1
        elif nd.kind == ADD:
            est[i] = sum(est[c] for c in nd.children)
        else:
            est[i] = est[nd.children[0]] * est[nd.children[1]]
    return est[f.root]


def _default_field(f: Formula) -> FieldParams:
    width = max((v.bit_length() for v in f.constants()), default=1)
    return gf(max(width, 1))


def expand(f: Formula, field: FieldParams | None = None,
           cap: int = DEFAULT_EXPANSION_CAP) -> ExpandedPoly:
    """Exact sum-product expansion.  Exponential: guarded, oracle use only."""
    if field is None:
        field = _default_field(f)
    bound = estimate_terms(f)
    if bound > cap:
        raise ExpansionCapError(f"estimated {bound} terms exceeds cap {cap}")
    one = Monomial(())
    polys: dict[int, dict[Monomial, int]] = {}
    for i in f.postorder():
        nd = f.nodes[i]
        if nd.kind == VAR:
            polys[i] = {Monomial(((nd.var, 1),)): 1}
        elif nd.kind == CONST:
            polys[i] = {one: field.check(nd.value)} if nd.value else {}
        elif nd.kind == ADD:
            acc: dict[Monomial, int] = {}
            for c in nd.children:
                for m, co in polys[c].items():
                    s = acc.get(m, 0) ^ co
                    if s:
                        acc[m] = s
                    else:
                        acc.pop(m, None)
            polys[i] = acc
        else:
            a, bb = polys[nd.children[0]], polys[nd.children[1]]
            acc = {}
            for ma, ca in a.items():
                for mb, cb in bb.items():
                    c = field.mul(ca, cb)
                    if not c:
                        continue
                    m = ma * mb
                    s = acc.get(m, 0) ^ c
                    if s:
                        acc[m] = s
                    else:
                        acc.pop(m, None)
            polys[i] = acc
    return ExpandedPoly(field, polys[f.root])


def has_q_monomial(p: ExpandedPoly, q: int, k: int) -> bool:
    """Whether some term is a q-monomial of degree exactly k."""
    if q < 2 or k < 1:
        raise FormulaError("need q >= 2 and k >= 1")
    return any(m.degree == k and m.is_q_monomial(q) for m in p.terms)


def has_marked_q_monomial(p: ExpandedPoly, q: int, k: int, t: int,
                          marker: int = MARKER_VAR) -> bool:
    """Whether some term is w^t * pi with pi a degree-k q-monomial (w = marker)."""
    for m in p.terms:
        if m.exponent_of(marker) != t:
            continue
        rest = m.without(marker)
        if rest.degree == k and rest.is_q_monomial(q):
            return True
    return False
