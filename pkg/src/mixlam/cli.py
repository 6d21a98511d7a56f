"""Command-line entry point.

Exit codes: 0 success, 1 semantic failure (invalid derivation, refuted
characterisation, non-simulated entry, budget exhaustion), 2 parse errors.
"""

from __future__ import annotations

import argparse
import json
import os
import sys

from .formulas import INCONCLUSIVE, EquationSet, INTEGER_EQUATIONS
from .reduction import (
    Budget,
    BudgetExhausted,
    PreconditionViolated,
    beta_normalize,
    head_c_reduce,
    head_reduce,
    mu_reduce,
    stack_reduce,
)
from .syntax import ParseError, parse_formula, parse_term, print_formula, print_term
from .terms import Term


def _read_input(arg: str) -> str:
    if arg == "-":
        return sys.stdin.read()
    if os.path.exists(arg):
        with open(arg, "r", encoding="utf-8") as fh:
            return fh.read()
    return arg


def _budget(args) -> Budget:
    return Budget(args.budget)


def _emit_trace(trace, args) -> None:
    if args.trace_format == "structured":
        print(json.dumps(trace.to_structured(), indent=2))
    else:
        print(trace.to_text())


def cmd_reduce(args) -> int:
    text = _read_input(args.term)
    t = parse_term(text)
    engines = {
        "beta": None,
        "head": head_reduce,
        "head-c": head_c_reduce,
        "stack": stack_reduce,
        "mu": mu_reduce,
    }
    mode = args.mode
    try:
        if mode == "beta":
            out = beta_normalize(t, _budget(args))
            print(print_term(out))
            return 0
        trace = engines[mode](t, _budget(args))
    except BudgetExhausted as e:
        print(f"budget exhausted after {e.trace.step_count} steps", file=sys.stderr)
        if args.trace:
            _emit_trace(e.trace, args)
        return 1
    except PreconditionViolated as e:
        print(f"precondition violated: {e}", file=sys.stderr)
        return 1
    if args.trace:
        _emit_trace(trace, args)
    print(print_term(trace.final))
    return 0


def cmd_typecheck(args) -> int:
    from .derivations import Invalid, check, derivation_from_text

    text = _read_input(args.file)
    d = derivation_from_text(text)
    eqs = None
    if args.equations:
        from .syntax import parse_equations

        eqs = EquationSet(parse_equations(_read_input(args.equations)))
    r = check(d, eqs)
    if isinstance(r, Invalid):
        print(str(r), file=sys.stderr)
        return 1
    seq = d.conclusion
    print(f"valid [{d.system}] {print_term(seq.subject)} : {print_formula(seq.subject_type)}")
    return 0


def cmd_translate(args) -> int:
    from .translations import classical, godel, prop_erase, simple_godel

    f = parse_formula(_read_input(args.formula))
    fn = {
        "godel": godel,
        "simple-godel": simple_godel,
        "classical": classical,
        "erase": prop_erase,
    }[args.mode]
    print(print_formula(fn(f)))
    return 0


def cmd_classify(args) -> int:
    if args.kind == "polarity":
        from .formulas import polarity

        print(polarity(parse_formula(_read_input(args.input))).value)
        return 0
    if args.kind == "classical-type":
        from .formulas import is_classical_type

        print("classical" if is_classical_type(parse_formula(_read_input(args.input))) else "not-classical")
        return 0
    from .intmachine import IsClassicalInteger, classify_mu_integer

    r = classify_mu_integer(parse_term(_read_input(args.input)))
    if isinstance(r, IsClassicalInteger):
        print(f"classical-integer n={r.n}")
        return 0
    print(f"no: {r.reason}: {r.detail}")
    return 1


def cmd_value(args) -> int:
    from .intmachine import ValueTrace, extract_value

    t = parse_term(_read_input(args.term))
    vt = extract_value(t, _budget(args))
    if not isinstance(vt, ValueTrace):
        print(f"failure: {vt.reason}: {vt.detail}", file=sys.stderr)
        return 1
    i_list = [vt.index_map[i] for i in range(vt.m + 1)]
    r_list = [vt.r[i] for i in range(vt.m + 1)]
    print(f"n={vt.n} m={vt.m} I={i_list} r={r_list}")
    if args.trace:
        for k, seg in enumerate(vt.segments):
            print(f"segment {k}:")
            _emit_trace(seg, args)
    return 0


def cmd_rep(args) -> int:
    from .intmachine import in_nxf, rep

    t = parse_term(_read_input(args.term))
    x = args.payload_var
    f = args.iterator_var
    body = t
    if not in_nxf(body, x, f):
        print(f"not in the iterator grammar over ({x}, {f})", file=sys.stderr)
        return 1
    print(str(rep(body)))
    return 0


def _parse_range(spec: str) -> range:
    if ".." in spec:
        lo, hi = spec.split("..", 1)
        return range(int(lo), int(hi) + 1)
    return range(0, int(spec) + 1)


def cmd_storage_verify(args) -> int:
    from .storage import default_corpus, verify_storage, verify_storage_classical, verify_storage_mu

    t = parse_term(_read_input(args.candidate))
    ns = _parse_range(args.n)
    budget = _budget(args)
    if args.mode == "church":
        reports = verify_storage(t, default_corpus(ns), budget)
    elif args.mode == "classical":
        reports = verify_storage_classical(t, ns, budget)
    else:
        from .terms import church

        reports = verify_storage_mu(t, [(n, church(n)) for n in ns], budget)
    ok = True
    for r in reports:
        print(r.line())
        ok &= r.simulated
    return 0 if ok else 1


def cmd_characterize(args) -> int:
    from .storage import Confirmed, Refuted, Shape, characterize_bottom_arrow, characterize_cc

    t = parse_term(_read_input(args.candidate))
    ns = _parse_range(args.arities)
    if args.type == "bottom":
        r = characterize_bottom_arrow(t, ns, _budget(args))
        if isinstance(r, Confirmed):
            print(f"confirmed: abort behaviour for arities {list(r.arities)}")
            return 0
        print(f"refuted at arity {r.arity}:")
        print(r.trace.to_text())
        return 1
    r = characterize_cc(t, ns, _budget(args))
    if isinstance(r, Shape):
        print(f"shape m={r.m} (arguments delivered to probe {r.final_probe})")
        return 0
    print("refuted:")
    print(r.trace.to_text())
    return 1


def cmd_fixtures(args) -> int:
    from .derivations import Invalid, Valid, check
    from .fixtures import FIXTURE_NAMES, fixture, fixture_file_text, write_fixture_files

    if args.action == "list":
        for name in FIXTURE_NAMES:
            print(name)
        return 0
    if args.action == "show":
        print(fixture_file_text(args.name), end="")
        return 0
    if args.action == "write":
        for p in write_fixture_files(args.name or "fixtures"):
            print(p)
        return 0
    # run-all: the full healthy-checkout verification
    failures = 0
    for name in FIXTURE_NAMES:
        d = fixture(name)
        r = check(d)
        ok = isinstance(r, Valid)
        print(f"fixture {name:16s} [{d.system:4s}] {'valid' if ok else r}")
        failures += 0 if ok else 1
    failures += _run_all_sweeps(Budget(args.budget))
    print("fixtures run-all:", "ok" if failures == 0 else f"{failures} failure(s)")
    return 0 if failures == 0 else 1


def _run_all_sweeps(budget: Budget) -> int:
    from .derivations import Valid, check, embed_c2_in_m2
    from .fixtures import C2_FIXTURES, fixture
    from .intmachine import ValueTrace, extract_value
    from .storage import (
        Confirmed,
        Shape,
        characterize_bottom_arrow,
        characterize_cc,
        default_corpus,
        verify_storage,
        verify_storage_classical,
        verify_storage_mu,
    )
    from .terms import App, C, Lam, Var, builtin, church

    failures = 0

    def report(label: str, ok: bool):
        nonlocal failures
        print(f"check   {label:40s} {'ok' if ok else 'FAIL'}")
        failures += 0 if ok else 1

    for name in C2_FIXTURES:
        report(f"embedding {name}", isinstance(check(embed_c2_in_m2(fixture(name))), Valid))
    for T in ("T1", "T2"):
        rs = verify_storage(builtin(T), default_corpus(range(9)), budget)
        report(f"storage sweep {T}", all(r.simulated for r in rs))
        rs = verify_storage_classical(builtin(T), range(6), budget)
        report(f"classical storage {T}", all(r.simulated for r in rs))
    ok = True
    for n in range(9):
        vt = extract_value(church(n), budget)
        ok &= isinstance(vt, ValueTrace) and vt.n == n
        vt = extract_value(App(C, Lam("k", App(Var("k"), church(n)))), budget)
        ok &= isinstance(vt, ValueTrace) and vt.n == n
    report("value extraction 0..8", ok)
    report("abort characterisation", isinstance(characterize_bottom_arrow(builtin("abort"), range(4), budget), Confirmed))
    r = characterize_cc(Lam("x", App(C, Var("x"))), range(4), budget)
    report("control-wrapper shape 1", isinstance(r, Shape) and r.m == 1)
    r = characterize_cc(builtin("Cprime"), range(4), budget)
    report("second-shape operator 2", isinstance(r, Shape) and r.m == 2)
    rs = verify_storage_mu(builtin("T1"), [(n, church(n)) for n in range(5)], budget)
    report("mu storage sweep", all(r.simulated for r in rs))
    return failures


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(
        prog="mixlam",
        description="workbench for classical lambda calculi, typing derivations, "
        "control operators and storage operators",
    )
    ap.add_argument("--budget", type=int, default=100_000, help="reduction step budget (default 100000)")
    ap.add_argument(
        "--seed",
        type=int,
        default=0,
        help="reserved; fresh names derive deterministically from the input, so output is reproducible",
    )
    ap.add_argument("--trace", action="store_true", help="print reduction traces")
    ap.add_argument("--trace-format", choices=("text", "structured"), default="text")
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("reduce", help="reduce a term")
    g = p.add_mutually_exclusive_group()
    g.add_argument("--beta", dest="mode", action="store_const", const="beta")
    g.add_argument("--head", dest="mode", action="store_const", const="head")
    g.add_argument("--head-c", dest="mode", action="store_const", const="head-c")
    g.add_argument("--stack", dest="mode", action="store_const", const="stack")
    g.add_argument("--mu", dest="mode", action="store_const", const="mu")
    p.set_defaults(mode="beta")
    p.add_argument("term", help="term text, a file name, or - for stdin")
    p.set_defaults(func=cmd_reduce)

    p = sub.add_parser("typecheck", help="check a derivation file")
    p.add_argument("file")
    p.add_argument("--equations", help="equation file constraining the equational rule")
    p.set_defaults(func=cmd_typecheck)

    p = sub.add_parser("translate", help="translate a formula")
    p.add_argument("--mode", choices=("godel", "simple-godel", "classical", "erase"), required=True)
    p.add_argument("formula")
    p.set_defaults(func=cmd_translate)

    p = sub.add_parser("classify", help="classify a formula or mu-term")
    p.add_argument("kind", choices=("polarity", "classical-type", "mu-integer"))
    p.add_argument("input")
    p.set_defaults(func=cmd_classify)

    p = sub.add_parser("value", help="extract the value of a classical integer")
    p.add_argument("term")
    p.set_defaults(func=cmd_value)

    p = sub.add_parser("rep", help="representable values of an iterator-grammar body")
    p.add_argument("term")
    p.add_argument("--payload-var", default="x")
    p.add_argument("--iterator-var", default="f")
    p.set_defaults(func=cmd_rep)

    p = sub.add_parser("storage-verify", help="sweep a storage-operator candidate")
    p.add_argument("--candidate", required=True)
    p.add_argument("--mode", choices=("church", "classical", "mu"), default="church")
    p.add_argument("--n", default="0..15", help="value range, e.g. 0..15")
    p.set_defaults(func=cmd_storage_verify)

    p = sub.add_parser("characterize", help="probe a control-operator candidate")
    p.add_argument("--candidate", required=True)
    p.add_argument("--type", choices=("bottom", "cc"), required=True)
    p.add_argument("--arities", default="0..5")
    p.set_defaults(func=cmd_characterize)

    p = sub.add_parser("fixtures", help="manage and run the shipped derivations")
    p.add_argument("action", choices=("run-all", "list", "show", "write"))
    p.add_argument("name", nargs="?")
    p.set_defaults(func=cmd_fixtures)

    return ap


def main(argv=None) -> int:
    ap = build_parser()
    args = ap.parse_args(argv)
    try:
        return args.func(args)
    except ParseError as e:
        print(f"parse error: {e}", file=sys.stderr)
        return 2
    except (ValueError, OSError) as e:
        print(f"error: {e}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
