"""Command-line front end.

Verdict-first output contract: the first line is the verdict
(yes / no / k=<int> / infeasible for the solvers, zero / nonzero for
identity testing, certified / not-certified for family checks); any
"#"-prefixed stat lines follow it.

Exit codes: 0 = completed (including a "no" verdict), 1 = operational
failure such as unreadable input or a format violation, 2 = usage error,
3 = indeterminate verdict, 4 = oracle mismatch under --oracle.
"""

from __future__ import annotations

import argparse
import random
import sys
import time

from qmonomial.detect import DetectConfig, DetectError, detect_q_monomial
from qmonomial.fields import FieldError, gf
from qmonomial.formula import (
    ExpansionCapError,
    FormulaError,
    expand,
    has_q_monomial,
    parse_formula,
)
from qmonomial.hashing import HashingError, build_family, family_size_report, verify_family
from qmonomial.pit import PitError, is_sreadonce, pit_sreadonce
from qmonomial.problems import (
    DominatingInstance,
    InstanceError,
    MatchingInstance,
    PackingInstance,
    SolverIndeterminate,
    brute_dominating_min_k,
    brute_matching,
    brute_packing,
    build_packing_formula,
    load_instance,
    solve_dominating_min_k,
    solve_matching,
    solve_packing,
)

EXIT_OK = 0
EXIT_FAILURE = 1
EXIT_USAGE = 2
EXIT_INDETERMINATE = 3
EXIT_MISMATCH = 4

_BENCH_SHAPES = {4: (4, 1), 5: (5, 1), 6: (3, 2), 7: (7, 1),
                 8: (4, 2), 9: (3, 3), 10: (5, 2)}


def _parser() -> argparse.ArgumentParser:
    top = argparse.ArgumentParser(
        prog="qmonomial",
        description="q-monomial detection and the solvers reduced to it")
    sub = top.add_subparsers(dest="command", required=True)

    engine = argparse.ArgumentParser(add_help=False)
    engine.add_argument("--engine", choices=("deterministic", "randomized"),
                        default="deterministic")
    engine.add_argument("--pit-mode", choices=("ring", "oracle"), default="ring")
    engine.add_argument("--hash-provider", choices=("greedy", "splitter", "randomized"),
                        default="greedy")
    engine.add_argument("--seed", type=int, default=0)
    engine.add_argument("--stats", action="store_true",
                        help="print '#'-prefixed counters after the verdict")

    solver = argparse.ArgumentParser(add_help=False, parents=[engine])
    solver.add_argument("--input", required=True, help="instance file")
    solver.add_argument("--oracle", action="store_true",
                        help="cross-check against brute force; mismatch exits 4")

    for name in ("solve-packing", "solve-matching", "solve-dominating"):
        sub.add_parser(name, parents=[solver])

    tm = sub.add_parser("test-monomial", parents=[engine])
    tm.add_argument("--input", required=True, help="formula file")
    tm.add_argument("--q", type=int, required=True)
    tm.add_argument("--k", type=int, required=True)
    tm.add_argument("--oracle", action="store_true")

    pit = sub.add_parser("pit")
    pit.add_argument("--input", required=True, help="formula file")
    pit.add_argument("--width", type=int, default=None,
                     help="field width d (default: smallest fitting the constants)")

    vp = sub.add_parser("verify-phf")
    vp.add_argument("--n", type=int, required=True)
    vp.add_argument("--k", type=int, required=True)
    vp.add_argument("--provider", choices=("greedy", "splitter", "randomized"),
                    default="greedy")
    vp.add_argument("--seed", type=int, default=0)
    vp.add_argument("--count", type=int, default=None,
                    help="randomized provider: number of functions")

    bench = sub.add_parser("bench")
    bench.add_argument("--kmin", type=int, default=4)
    bench.add_argument("--kmax", type=int, default=10)
    bench.add_argument("--seed", type=int, default=0)
    return top


def _read(path: str) -> str:
    with open(path, "r", encoding="utf-8") as fh:
        return fh.read()


def _cfg(args) -> DetectConfig:
    return DetectConfig(engine=args.engine, pit_mode=args.pit_mode,
                        hash_provider=args.hash_provider, seed=args.seed)


def _emit_stats(out, pairs) -> None:
    for key, value in pairs:
        print(f"# {key} {value}", file=out)


def _run_solver(args, out) -> int:
    inst = load_instance(_read(args.input))
    cfg = _cfg(args)
    expected_kind = {
        "solve-packing": PackingInstance,
        "solve-matching": MatchingInstance,
        "solve-dominating": DominatingInstance,
    }[args.command]
    if not isinstance(inst, expected_kind):
        print(f"error: {args.input} holds a different instance kind", file=sys.stderr)
        return EXIT_USAGE
    t0 = time.perf_counter()
    if args.command == "solve-packing":
        got = solve_packing(inst, cfg)
        verdict = "yes" if got else "no"
        oracle = brute_packing(inst) if args.oracle else None
        oracle_verdict = None if oracle is None else ("yes" if oracle else "no")
    elif args.command == "solve-matching":
        got = solve_matching(inst, cfg)
        verdict = "yes" if got else "no"
        oracle = brute_matching(inst) if args.oracle else None
        oracle_verdict = None if oracle is None else ("yes" if oracle else "no")
    else:
        got = solve_dominating_min_k(inst, cfg)
        verdict = "infeasible" if got is None else f"k={got}"
        oracle = brute_dominating_min_k(inst) if args.oracle else None
        oracle_verdict = None
        if args.oracle:
            oracle_verdict = "infeasible" if oracle is None else f"k={oracle}"
    ms = (time.perf_counter() - t0) * 1000
    print(verdict, file=out)
    if args.stats:
        _emit_stats(out, [("wall_ms", f"{ms:.1f}")])
    if args.oracle:
        _emit_stats(out, [("oracle", oracle_verdict)])
        if oracle_verdict != verdict:
            _emit_stats(out, [("mismatch", f"engine={verdict} oracle={oracle_verdict}")])
            return EXIT_MISMATCH
    return EXIT_OK


def _run_test_monomial(args, out) -> int:
    if args.q < 2 or args.k < 1:
        print("error: need --q >= 2 and --k >= 1", file=sys.stderr)
        return EXIT_USAGE
    f = parse_formula(_read(args.input))
    cfg = _cfg(args)
    cfg = DetectConfig(**{**cfg.__dict__, "q": args.q, "k": args.k})
    report = detect_q_monomial(f, cfg)
    print(report.answer, file=out)
    if args.stats:
        pairs = [("field_width", report.field.d),
                 ("family_size", report.family_size),
                 ("hash_functions_tried", report.hash_functions_tried)]
        pairs += sorted(report.op_counts.items())
        _emit_stats(out, pairs)
    if report.answer == "indeterminate":
        return EXIT_INDETERMINATE
    if args.oracle:
        got = has_q_monomial(expand(f), args.q, args.k)
        oracle_verdict = "yes" if got else "no"
        _emit_stats(out, [("oracle", oracle_verdict)])
        if oracle_verdict != report.answer:
            _emit_stats(out, [("mismatch", f"engine={report.answer} oracle={oracle_verdict}")])
            return EXIT_MISMATCH
    return EXIT_OK


def _run_pit(args, out) -> int:
    f = parse_formula(_read(args.input))
    if not is_sreadonce(f):
        print("error: formula is not S-read-once", file=sys.stderr)
        return EXIT_FAILURE
    width = args.width
    if width is None:
        width = max(max((c.bit_length() for c in f.constants()), default=1), 1)
    zero = pit_sreadonce(f, gf(width))
    print("zero" if zero else "nonzero", file=out)
    return EXIT_OK


def _run_verify_phf(args, out) -> int:
    fam = build_family(args.n, args.k, args.provider, seed=args.seed, count=args.count)
    ok = fam.certified or verify_family(fam)
    count, bound = family_size_report(fam)
    print("certified" if ok else "not-certified", file=out)
    _emit_stats(out, [("size", count), ("budget", bound), ("provider", fam.provider)])
    return EXIT_OK if ok else EXIT_FAILURE


def _bench_instance(kprime: int, seed: int) -> PackingInstance:
    m, k = _BENCH_SHAPES[kprime]
    rng = random.Random(seed * 1009 + kprime)
    n = 12
    sets = []
    for _ in range(6):
        sets.append(tuple(sorted(rng.sample(range(1, n + 1), m))))
    return PackingInstance(n, m, k, tuple(sets))


def _run_bench(args, out) -> int:
    if not 4 <= args.kmin <= args.kmax <= 10:
        print("error: bench supports 4 <= kmin <= kmax <= 10", file=sys.stderr)
        return EXIT_USAGE
    print("kprime\tfamily_size\tga_mul_per_hash\tint_ops_per_mul\twall_ms", file=out)
    for kprime in range(args.kmin, args.kmax + 1):
        inst = _bench_instance(kprime, args.seed)
        f, kp = build_packing_formula(inst)
        assert kp == kprime
        cfg = DetectConfig(q=2, k=kprime, seed=args.seed)
        t0 = time.perf_counter()
        report = detect_q_monomial(f, cfg)
        ms = (time.perf_counter() - t0) * 1000
        mults = report.op_counts.get("ga_mul_first_hash", 0)
        iops = report.op_counts.get("ga_int_ops_first_hash", 0)
        per_mul = iops // mults if mults else 0
        print(f"{kprime}\t{report.family_size}\t{mults}\t{per_mul}\t{ms:.1f}", file=out)
    return EXIT_OK


def run(argv, out=None) -> int:
    out = out if out is not None else sys.stdout
    try:
        args = _parser().parse_args(argv)
    except SystemExit as e:
        code = e.code if isinstance(e.code, int) else EXIT_USAGE
        return EXIT_USAGE if code != 0 else 0
    try:
        if args.command in ("solve-packing", "solve-matching", "solve-dominating"):
            return _run_solver(args, out)
        if args.command == "test-monomial":
            return _run_test_monomial(args, out)
        if args.command == "pit":
            return _run_pit(args, out)
        if args.command == "verify-phf":
            return _run_verify_phf(args, out)
        return _run_bench(args, out)
    except OSError as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_FAILURE
    except (InstanceError, FormulaError, HashingError, FieldError,
            PitError, ExpansionCapError, DetectError) as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_FAILURE
    except SolverIndeterminate as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_INDETERMINATE


def main() -> None:
    sys.exit(run(sys.argv[1:]))


if __name__ == "__main__":
    main()
