"""Command-line front end: ``schurlab <subcommand> ...``.

Exit status: 0 on success or pass, 1 on a verification failure, 2 on a usage
error.  Only the report goes to stdout; diagnostics go to stderr.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import os
import sys
from pathlib import Path

from . import acceptance
from . import asymptotics as asy
from . import identities as ids
from . import partitions as pt
from . import probability as prob
from .partitions import SchurParams
from .qseries import SeriesError, eta_series, theta_half_shift_series, theta_sum_series

SCHEMA_VERSION = 1
OUTPUT_DIR_ENV = "SCHURLAB_OUTPUT_DIR"

EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2


class UsageError(Exception):
    pass


def _params(args) -> SchurParams:
    try:
        return SchurParams(args.d, args.r)
    except (TypeError, ValueError) as exc:
        raise UsageError(str(exc)) from exc


def _pair(text: str) -> SchurParams:
    try:
        d, r = (int(x) for x in text.split(","))
        return SchurParams(d, r)
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"expected D,R with valid Schur parameters, got {text!r}: {exc}")


def _json(kind: str, body: dict) -> str:
    return json.dumps({"schema_version": SCHEMA_VERSION, "kind": kind, **body}, indent=2)


def _csv(header, rows) -> str:
    buf = io.StringIO()
    wr = csv.writer(buf, lineterminator="\n")
    wr.writerow(header)
    wr.writerows(rows)
    return buf.getvalue()


def _emit(args, text: str) -> None:
    out = getattr(args, "output", None)
    if out:
        path = Path(out)
        base = os.environ.get(OUTPUT_DIR_ENV)
        if base and not path.is_absolute():
            path = Path(base) / path
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_text(text if text.endswith("\n") else text + "\n")
    else:
        sys.stdout.write(text if text.endswith("\n") else text + "\n")


def _report_out(args, rep: ids.VerificationReport) -> int:
    if args.format == "json":
        _emit(args, _json("verification", rep.to_json()))
    elif args.format == "csv":
        m = rep.first_mismatch
        row = [rep.identity_name, rep.trunc, rep.status]
        row += [m.exponent, m.lhs, m.rhs] if m else ["", "", ""]
        _emit(args, _csv(["identity", "trunc", "status", "mismatch_exponent", "lhs", "rhs"], [row]))
    else:
        _emit(args, rep.describe())
    return EXIT_OK if rep.passed else EXIT_FAIL


# -- subcommands ------------------------------------------------------------------


def cmd_count(args) -> int:
    kind = args.kind
    if kind in ("B", "C", "E", "D"):
        p = _params(args)
        fn = {
            "B": lambda n: pt.count_schur(p, 0, n),
            "C": lambda n: pt.count_schur(p, p.d, n),
            "E": lambda n: pt.count_distinct_congruent(p, n),
            "D": lambda n: pt.count_congruence_classes(p.d, {p.r, p.d - p.r}, n),
        }[kind]
    else:
        if args.d < 1 or args.j < 1:
            raise UsageError("q and Q need --d >= 1 and --j >= 1")
        fn = {
            "q": lambda n: pt.count_gap_partitions(args.d, args.j, n),
            "Q": lambda n: pt.count_congruence_classes(args.d + 3, {args.j, args.d + 3 - args.j}, n),
        }[kind]
    values = pt.table(fn, args.max_n)
    if args.format == "json":
        _emit(args, _json("count", {"count_kind": kind, "d": args.d, "r": args.r, "j": args.j,
                                    "counts": [str(v) for v in values]}))
    elif args.format == "csv":
        _emit(args, _csv(["n", "count"], list(enumerate(values))))
    else:
        _emit(args, "\n".join(f"{n} {v}" for n, v in enumerate(values)))
    return EXIT_OK


def _build_series(args):
    name, N = args.name, args.trunc
    if name == "eta":
        return eta_series(args.d, N)
    if name == "C-andrews":
        return ids.series_C_andrews_rhs(N)
    p = _params(args)
    return {
        "E": lambda: ids.series_E_product(p, N),
        "B": lambda: ids.series_E_product(p, N),
        "C": lambda: ids.series_C_bilateral(p, N),
        "C-unilateral": lambda: ids.series_C_unilateral(p, N),
        "g3": lambda: ids.series_g3(p.r, p.d, N),
        "theta-quotient": lambda: ids.series_theta_quotient(p, N),
        "theta-product": lambda: theta_half_shift_series(p.d, p.r, N),
        "theta-sum": lambda: theta_sum_series(p.d, p.r, N),
    }[name]()


def cmd_series(args) -> int:
    s = _build_series(args)
    if args.format == "json":
        _emit(args, _json("series", {"name": args.name, **s.to_json()}))
    elif args.format == "csv":
        rows = [(k, f"{s.offset24 + 24 * k}/24", c) for k, c in enumerate(s.coeffs)]
        _emit(args, _csv(["index", "exponent", "coeff"], rows))
    else:
        _emit(args, " ".join(str(c) for c in s.coeffs))
    return EXIT_OK


def cmd_verify(args) -> int:
    p = _params(args)
    rep = ids.verify_identity(args.identity, p, args.trunc, args.inject_mutation)
    return _report_out(args, rep)


def cmd_asymptotics(args) -> int:
    p = _params(args)
    mode = args.mode
    if mode == "constants":
        c = asy.constants(p).as_dict()
        if args.format == "json":
            _emit(args, _json("constants", {"d": p.d, "r": p.r, **{k: repr(v) for k, v in c.items()}}))
        elif args.format == "csv":
            _emit(args, _csv(["name", "value"], [(k, repr(v)) for k, v in c.items()]))
        else:
            _emit(args, "\n".join(f"{k} = {v!r}" for k, v in c.items()))
        return EXIT_OK
    if mode == "convergence":
        n_list = [int(x) for x in args.n_list.split(",")]
        table = asy.convergence_report(args.which, p, n_list, args.terms, budget=args.budget)
        if args.format == "json":
            _emit(args, _json("convergence", table.to_json()))
        else:
            _emit(args, table.to_csv())
        return EXIT_OK
    if mode == "g-expansion":
        return _report_out(args, asy.check_G_expansion(p))
    if mode == "f-near-one":
        z = complex(args.z)
        v = asy.eval_F_near_one(args.which_f, p, z, args.tol)
        body = {"z": str(z), "value": repr(complex(v.value)), "tail_bound": repr(v.tail_bound)}
        if args.format == "json":
            _emit(args, _json("f-near-one", body))
        elif args.format == "csv":
            _emit(args, _csv(list(body), [list(body.values())]))
        else:
            _emit(args, f"F_{args.which_f}(exp(-{z})) = {complex(v.value)!r} (tail <= {v.tail_bound:.3g})")
        return EXIT_OK
    raise UsageError(f"unknown asymptotics mode {mode}")


def cmd_crossover(args) -> int:
    a, b = args.a, args.b
    n0 = asy.crossover(a, b, args.which, args.n_max, budget=args.budget)
    if args.format == "json":
        _emit(args, _json("crossover", {"which": args.which, "a": [a.d, a.r], "b": [b.d, b.r],
                                        "n_max": args.n_max, "N0": n0}))
    elif args.format == "csv":
        rows = asy.crossover_table(a, b, args.which, args.n_max)
        _emit(args, _csv(["n", f"{args.which}{a}", f"{args.which}{b}"], rows))
    else:
        msg = f"{args.which}{b} > {args.which}{a} on [{n0}, {args.n_max}]" if n0 is not None else "no crossover in window"
        _emit(args, msg)
    return EXIT_OK


def cmd_prob(args) -> int:
    p = _params(args)
    if args.mode == "exact":
        v = prob.exact_prob_Uk(p, args.q, args.k, args.tol)
        body = {"q": repr(args.q), "k": args.k, "value": repr(v.value), "tail_bound": repr(v.tail_bound)}
        if args.format == "json":
            _emit(args, _json("prob-exact", body))
        elif args.format == "csv":
            _emit(args, _csv(list(body), [list(body.values())]))
        else:
            _emit(args, f"P(U_{args.k}) = {v.value!r} (tail <= {v.tail_bound:.3g})")
        return EXIT_OK
    if args.mode == "check":
        return _report_out(args, prob.theorem_prob_check(p, args.q, args.tol))
    if args.mode == "recurrence":
        return _report_out(args, prob.verify_Uk_recurrence(p, args.q, args.k_max, args.tol))
    raise UsageError(f"unknown prob mode {args.mode}")


def cmd_simulate(args) -> int:
    p = _params(args)
    if args.trials < 1:
        raise UsageError("--trials must be at least 1")
    rep = prob.simulate(p, args.q, args.trials, args.seed, workers=args.workers)
    if args.format == "json":
        _emit(args, json.dumps({"kind": "simulation", **rep.to_json()}, indent=2))
    elif args.format == "csv":
        _emit(args, rep.to_csv())
    else:
        lines = [f"{e.name}: {e.estimate:.6f} +- {e.stderr:.6f} (target {e.target:.6f}, z = {e.z:+.2f})"
                 for e in rep.estimates]
        _emit(args, "\n".join(lines))
    return EXIT_OK


def cmd_verify_all(args) -> int:
    mutate = {}
    if args.inject_mutation:
        name, _, k = args.inject_mutation.partition(":")
        if name not in ids.IDENTITIES:
            raise UsageError(f"unknown identity {name!r} for --inject-mutation")
        mutate[name] = int(k) if k else 7
    settings = acceptance.Settings(quick=args.quick, seed=args.seed, trunc=args.trunc, mutate=mutate)
    results = acceptance.run_all(settings)
    if args.format == "json":
        _emit(args, _json("verify-all", {
            "quick": args.quick,
            "results": [{"number": r.number, "title": r.title, "passed": r.passed, "detail": r.detail,
                         "seconds": round(r.seconds, 3)} for r in results],
        }))
    elif args.format == "csv":
        _emit(args, _csv(["number", "title", "passed", "detail"],
                         [(r.number, r.title, r.passed, r.detail) for r in results]))
    else:
        _emit(args, "\n".join(r.line() for r in results))
    return EXIT_OK if all(r.passed for r in results) else EXIT_FAIL


# -- parser ---------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="schurlab", description=__doc__.splitlines()[0])
    sub = ap.add_subparsers(dest="command", required=True)

    def common(p, d=3, r=1, fmt="plain"):
        p.add_argument("--d", type=int, default=d)
        p.add_argument("--r", type=int, default=r)
        p.add_argument("--format", choices=("csv", "json", "plain"), default=fmt)
        p.add_argument("--output", help=f"write the report here; relative paths resolve under ${OUTPUT_DIR_ENV} when set")
        return p

    p = common(sub.add_parser("count", help="brute-force counts; CSV columns: n, count"))
    p.add_argument("--kind", choices=("B", "C", "E", "D", "q", "Q"), default="B")
    p.add_argument("--j", type=int, default=1, help="smallest-part bound for q, residue for Q")
    p.add_argument("--max-n", type=int, default=50)
    p.set_defaults(func=cmd_count)

    p = common(sub.add_parser("series", help="generating-function coefficients; CSV columns: index, exponent, coeff"))
    p.add_argument("--name", default="E", choices=(
        "E", "B", "C", "C-unilateral", "C-andrews", "g3", "theta-quotient", "theta-product", "theta-sum", "eta"))
    p.add_argument("--trunc", type=int, default=50)
    p.set_defaults(func=cmd_series)

    p = common(sub.add_parser("verify", help="check one identity; CSV columns: identity, trunc, status, mismatch_exponent, lhs, rhs"))
    p.add_argument("--identity", required=True, choices=tuple(ids.IDENTITIES))
    p.add_argument("--trunc", type=int, default=200)
    p.add_argument("--inject-mutation", type=int, metavar="K", help="bump the lhs coefficient of q^K (test hook)")
    p.set_defaults(func=cmd_verify)

    p = common(sub.add_parser("asymptotics", help="constants, convergence tables (CSV: n, exact_log, estimate_log, ratio), G and F checks"))
    p.add_argument("mode", choices=("constants", "convergence", "g-expansion", "f-near-one"))
    p.add_argument("--which", choices=("B", "C"), default="B")
    p.add_argument("--which-f", type=int, choices=(1, 2), default=1)
    p.add_argument("--terms", type=int, choices=(1, 2), default=2)
    p.add_argument("--n-list", default="1000,4000,16000")
    p.add_argument("--z", default="0.1")
    p.add_argument("--tol", type=float, default=1e-10)
    p.add_argument("--budget", type=int, default=asy.DEFAULT_BUDGET)
    p.set_defaults(func=cmd_asymptotics)

    p = sub.add_parser("crossover", help="least N0 with coefficient_b > coefficient_a on [N0, n_max]; CSV: n, a, b")
    p.add_argument("--a", type=_pair, required=True, metavar="D,R")
    p.add_argument("--b", type=_pair, required=True, metavar="D,R")
    p.add_argument("--which", choices=("B", "C"), default="B")
    p.add_argument("--n-max", type=int, default=2000)
    p.add_argument("--budget", type=int, default=asy.DEFAULT_BUDGET)
    p.add_argument("--format", choices=("csv", "json", "plain"), default="plain")
    p.add_argument("--output")
    p.set_defaults(func=cmd_crossover)

    p = common(sub.add_parser("prob", help="exact probabilities and theorem checks"))
    p.add_argument("mode", choices=("exact", "check", "recurrence"))
    p.add_argument("--q", type=float, default=0.5)
    p.add_argument("--k", type=int, default=0)
    p.add_argument("--k-max", type=int, default=6)
    p.add_argument("--tol", type=float, default=1e-10)
    p.set_defaults(func=cmd_prob)

    p = common(sub.add_parser("simulate", help="Monte Carlo; CSV columns: quantity, estimate, stderr, target, z"))
    p.add_argument("--q", type=float, default=0.5)
    p.add_argument("--trials", type=int, default=100_000)
    p.add_argument("--seed", type=int, default=42)
    p.add_argument("--workers", type=int, default=1)
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("verify-all", help="run every acceptance criterion and print the pass/fail matrix")
    p.add_argument("--quick", action="store_true", help="reduced truncations and trial counts")
    p.add_argument("--seed", type=int, default=42)
    p.add_argument("--trunc", type=int, default=None, help="cap identity truncations")
    p.add_argument("--inject-mutation", metavar="IDENTITY[:K]", help="perturb one identity's lhs (test hook)")
    p.add_argument("--format", choices=("csv", "json", "plain"), default="plain")
    p.add_argument("--output")
    p.set_defaults(func=cmd_verify_all)
    return ap


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code) if exc.code is not None else EXIT_USAGE
    try:
        return args.func(args)
    except UsageError as exc:
        print(f"schurlab: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (ValueError, SeriesError, KeyError) as exc:
        print(f"schurlab: error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
