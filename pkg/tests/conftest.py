"""Shared generators and independent oracles for the test suite."""

from __future__ import annotations

import random

from qmonomial.fields import FieldParams, gf
from qmonomial.formula import (
    MARKER_VAR,
    ExpandedPoly,
    Formula,
    FormulaBuilder,
    Monomial,
    expand,
)
from qmonomial.transform import annotate_edges, duplicate_terminals


def gf2_rank(vectors) -> int:
    """Row rank over GF(2); vectors are int bitmasks."""
    basis: list[int] = []
    for v in vectors:
        for b in basis:
            v = min(v, v ^ b)
        if v:
            basis.append(v)
            basis.sort(reverse=True)
    return len(basis)


def random_formula(rng: random.Random, n_vars: int, gates: int,
                   const_rate: float = 0.0, field: FieldParams | None = None) -> Formula:
    """Random formula with roughly the requested gate count; terminals shared."""
    b = FormulaBuilder()

    def terminal() -> int:
        if const_rate and rng.random() < const_rate:
            order = field.order if field is not None else 2
            return b.const(rng.randrange(1, order))
        return b.var(rng.randint(1, n_vars))

    pool = [terminal() for _ in range(gates + 1)]
    made = 0
    while len(pool) > 1 and made < gates:
        if rng.random() < 0.5 and len(pool) >= 2:
            take = min(len(pool), rng.choice((2, 2, 3)))
            args = [pool.pop(rng.randrange(len(pool))) for _ in range(take)]
            pool.append(b.add(*args))
        else:
            x = pool.pop(rng.randrange(len(pool)))
            y = pool.pop(rng.randrange(len(pool)))
            pool.append(b.mul(x, y))
        made += 1
    while len(pool) > 1:
        x = pool.pop(rng.randrange(len(pool)))
        y = pool.pop(rng.randrange(len(pool)))
        pool.append(b.mul(x, y) if rng.random() < 0.5 else b.add(x, y))
    return b.build(pool[0])


def random_marked_formula(rng: random.Random, n_vars: int, gates: int) -> Formula:
    """Random formula over x-variables and the marker w."""
    b = FormulaBuilder()

    def terminal() -> int:
        if rng.random() < 0.3:
            return b.var(MARKER_VAR)
        return b.var(rng.randint(1, n_vars))

    pool = [terminal() for _ in range(gates + 1)]
    while len(pool) > 1:
        if rng.random() < 0.5:
            take = min(len(pool), 2)
            args = [pool.pop(rng.randrange(len(pool))) for _ in range(take)]
            pool.append(b.add(*args))
        else:
            x = pool.pop(rng.randrange(len(pool)))
            y = pool.pop(rng.randrange(len(pool)))
            pool.append(b.mul(x, y))
    return b.build(pool[0])


def random_sreadonce(rng: random.Random, n_leaves: int, field: FieldParams,
                     zero_rate: float = 0.25) -> Formula:
    """Random S-read-once formula with some planted zero scalars."""
    b = FormulaBuilder()
    leaves = []
    for i in range(n_leaves):
        c = 0 if rng.random() < zero_rate else rng.randrange(1, field.order)
        leaves.append(b.mul(b.fresh_const(c), b.fresh_var(i + 1)))
    pool = leaves[:]
    while len(pool) > 1:
        if rng.random() < 0.5:
            take = min(len(pool), rng.choice((2, 3)))
            args = [pool.pop(rng.randrange(len(pool))) for _ in range(take)]
            pool.append(b.add(*args))
        else:
            x = pool.pop(rng.randrange(len(pool)))
            y = pool.pop(rng.randrange(len(pool)))
            pool.append(b.mul(x, y))
    return b.build(pool[0])


def all_formula_shapes(gates: int, leaves: tuple) -> list:
    """All fan-in-2 shapes with at most the given gate count, as nested tuples."""
    by_count: dict[int, list] = {0: list(leaves)}
    for g in range(1, gates + 1):
        acc = []
        for gl in range(g):
            gr = g - 1 - gl
            for left in by_count[gl]:
                for right in by_count[gr]:
                    acc.append(("+", left, right))
                    acc.append(("*", left, right))
        by_count[g] = acc
    return [t for g in range(gates + 1) for t in by_count[g]]


def shape_to_formula(shape) -> Formula:
    b = FormulaBuilder()

    def go(t):
        if t[0] == "v":
            return b.var(t[1])
        if t[0] == "c":
            return b.const(t[1])
        if t[0] == "+":
            return b.add(go(t[1]), go(t[2]))
        return b.mul(go(t[1]), go(t[2]))

    return b.build(go(shape))


def formal_expansion(f: Formula, field: FieldParams | None = None,
                     cap: int = 10**6) -> ExpandedPoly:
    """Expansion of the annotated rewrite: every occurrence of every monomial
    survives with a unique tag, so this is the formal (uncancelled) monomial
    list of f, with x-parts read off by stripping the annotation variables."""
    c_star = duplicate_terminals(f)
    c_prime, _ = annotate_edges(c_star)
    return expand(c_prime, field=field, cap=cap)


def formal_q_degrees(f: Formula, q: int, marker_t: int | None = None,
                     cap: int = 10**6) -> set[int]:
    """Degrees of q-monomials in the formal expansion of f.

    With marker_t set, only terms of exact marker exponent are considered
    and the marker is excluded from the degree.
    """
    first_z = f.max_var() + 1
    poly = formal_expansion(f, cap=cap)
    out = set()
    for m in poly.terms:
        if marker_t is not None and m.exponent_of(MARKER_VAR) != marker_t:
            continue
        xpart = Monomial(tuple((v, e) for v, e in m.exponents
                               if 0 < v < first_z))
        if xpart.exponents and xpart.is_q_monomial(q):
            out.add(xpart.degree)
    return out


def detection_cases(rng: random.Random, count: int, n_vars: int = 5,
                    gates: int = 9, qs=(2, 3), kmax: int = 4):
    """(formula, q, k, expected) cases within the occurrence-exact scope.

    Yes cases have a degree-k q-monomial surviving field collection; no
    cases have no q-monomial occurrence of degree exactly k.  Only formulas
    where a degree-k occurrence exists but its collected coefficient
    cancels are excluded: there the engine (occurrence semantics, by
    design) and the collected oracle legitimately differ.
    """
    from qmonomial.formula import has_q_monomial

    made = 0
    while made < count:
        f = random_formula(rng, n_vars, rng.randint(0, gates))
        q = qs[rng.randrange(len(qs))]
        formal = formal_q_degrees(f, q)
        collected = {d for d in formal if has_q_monomial(expand(f), q, d)}
        yes_ks = [k for k in range(1, kmax + 1) if k in collected]
        no_ks = [k for k in range(1, kmax + 1) if k not in formal]
        choices = []
        if yes_ks:
            choices.append((rng.choice(yes_ks), True))
        if no_ks:
            choices.append((rng.choice(no_ks), False))
        if not choices:
            continue
        k, expected = rng.choice(choices)
        yield f, q, k, expected
        made += 1


def marked_detection_cases(rng: random.Random, count: int, n_vars: int = 4,
                           gates: int = 8, qs=(2, 3), kmax: int = 3, tmax: int = 3):
    """(formula, q, k, t, expected) marked cases within the exact-degree scope."""
    from qmonomial.formula import has_marked_q_monomial

    made = 0
    while made < count:
        f = random_marked_formula(rng, n_vars, rng.randint(1, gates))
        if MARKER_VAR not in f.variables() or not (f.variables() - {MARKER_VAR}):
            continue
        q = qs[rng.randrange(len(qs))]
        p = expand(f)
        choices = []
        for t in range(0, tmax + 1):
            formal = formal_q_degrees(f, q, marker_t=t)
            for k in range(1, kmax + 1):
                if has_marked_q_monomial(p, q, k, t):
                    choices.append((k, t, True))
                elif k not in formal:
                    choices.append((k, t, False))
        if not choices:
            continue
        want_yes = [c for c in choices if c[2]]
        want_no = [c for c in choices if not c[2]]
        pool = want_yes if (want_yes and rng.random() < 0.5) else (want_no or want_yes)
        k, t, expected = pool[rng.randrange(len(pool))]
        yield f, q, k, t, expected
        made += 1


def x_part(m: Monomial, first_z: int) -> Monomial:
    return Monomial(tuple((v, e) for v, e in m.exponents if v < first_z))


def z_part(m: Monomial, first_z: int) -> Monomial:
    return Monomial(tuple((v, e) for v, e in m.exponents if v >= first_z))


GF2 = gf(1)
GF4 = gf(2)
GF8 = gf(3)
