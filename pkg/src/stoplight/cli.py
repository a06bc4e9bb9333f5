"""Command-line entry point.

Every command writes JSON or CSV to stdout or ``--out``.  When ``--out`` is
given, a manifest (command line, seed, version, wall time, SHA-256 of the
output) is written next to it as ``<out>.manifest.json``; timestamps never
appear in the output itself, so identical command lines give identical bytes.

Exit codes: 0 success, 1 invalid input, 2 numeric failure, 64 usage error.
"""

from __future__ import annotations

import argparse
import csv
import hashlib
import io
import json
import sys
import time
from fractions import Fraction
from importlib.metadata import PackageNotFoundError, version

from . import asymptotics, ell2, montecarlo, series, stationary, walk
from .errors import NumericFailure, SeriesMismatch, StoplightError, ValidationError

EXIT_OK, EXIT_INVALID, EXIT_NUMERIC, EXIT_USAGE = 0, 1, 2, 64


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(f"{self.prog}: {message}")


def _tool_version() -> str:
    try:
        return version("artifact")
    except PackageNotFoundError:
        return "unknown"


def parse_probability(text: str) -> Fraction:
    """``"a/b"`` or a decimal, converted exactly."""
    try:
        return Fraction(text.strip())
    except (ValueError, ZeroDivisionError) as exc:
        raise ValidationError(f"cannot parse probability {text!r}") from exc


def _int_list(text: str) -> list[int]:
    return [int(t) for t in text.replace(" ", "").split(",") if t]


def _num(value, exact: bool):
    if exact and isinstance(value, Fraction):
        return f"{value.numerator}/{value.denominator}"
    return _float(value)


def _float(value) -> float:
    """Round to 15 significant digits so one-ulp noise does not reach the output."""
    return float(f"{float(value):.15g}")


def _csv(header, rows) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\r\n")
    w.writerow(header)
    w.writerows(rows)
    return buf.getvalue()


def _json(obj) -> str:
    return json.dumps(obj, separators=(",", ":")) + "\n"


def _records_csv(records: list[dict]) -> str:
    header = list(records[0]) if records else []
    return _csv(header, [[r[k] for k in header] for r in records])


# --- commands --------------------------------------------------------------

def cmd_maxdist(args) -> str:
    params = _params(args)
    dist = walk.max_dist(walk.joint_dist(params, args.n))
    exact = params.exact
    if args.format == "csv":
        return _csv(["a", "probability"], [[a, _num(v, exact)] for a, v in enumerate(dist.values)])
    return _json({str(a): _num(v, exact) for a, v in enumerate(dist.values)})


def cmd_jointdist(args) -> str:
    params = _params(args)
    table = walk.joint_dist(params, args.n)
    items = sorted(table.entries().items(), key=lambda kv: (kv[0][1], kv[0][0]))
    exact = params.exact
    if args.format == "csv":
        return _csv(["x", "a", "probability"], [[x, a, _num(v, exact)] for (x, a), v in items])
    return _json({"n": args.n, "ell": params.ell, "p": str(params.p),
                  "lost_mass": _num(table.lost_mass, exact),
                  "entries": [{"x": x, "a": a, "probability": _num(v, exact)} for (x, a), v in items]})


def cmd_gf_check(args) -> str:
    p = parse_probability(args.p)
    if args.ell != 1:
        raise ValidationError("gf-check covers the one-step light only (ell=1)")
    if args.a < 1 or args.terms < 1:
        raise ValidationError("--a and --terms must be >= 1")
    terms = args.terms
    tables = list(walk.iter_joint(walk.validate_params(p.numerator, p.denominator, 1, walk.EXACT), 2 * terms))
    coeffs = series.max_gf_coeffs(p, args.a, terms)
    rows = []
    for n in range(1, terms + 1):
        dp = walk.max_dist(tables[2 * n])[args.a]
        rows.append((n, coeffs[n], dp, coeffs[n] == dp))
    matched = sum(r[3] for r in rows)
    status = "PASS" if matched == terms else "FAIL"
    if args.format is None:
        return f"{status}: {matched}/{terms} coefficients match DP\n"
    if args.format == "csv":
        return _csv(["n", "gf", "dp", "match"], [[n, _num(g, True), _num(d, True), int(m)] for n, g, d, m in rows])
    return _json({"p": str(p), "a": args.a, "terms": terms, "matched": matched, "status": status,
                  "coefficients": [_num(g, True) for _, g, _, _ in rows]})


def cmd_ell2_verify(args) -> str:
    p = float(parse_probability(args.p))
    lam = args.lam
    z = ell2.quartic_zeros(p, lam)
    cascade = ell2.appendix_cascade(p, lam, args.amax)
    records = []
    for (x, a), value in sorted(cascade.values.items(), key=lambda kv: (kv[0][1], kv[0][0])):
        dp, tail = ell2.dp_partial_sum(p, lam, x, a, args.terms)
        closed = ell2.closed_form_g(p, lam, (x, a)) if (x, a) in ((0, 1), (1, 1), (0, 2)) else None
        records.append({
            "x": x, "a": a, "cascade": value, "closed_form": closed, "dp": dp, "tail_bound": tail,
            "dp_ok": bool(abs(value - dp) <= tail + 1e-8),
            "closed_ok": None if closed is None else bool(abs(closed - value) <= 1e-8 * abs(value)),
        })
    if args.format == "csv":
        return _records_csv(records)
    return _json({
        "p": p, "lambda": lam, "theta": z.theta, "omega": z.omega, "zeros": list(z.zeros),
        "conditions": {str(k): v for k, v in cascade.conditions.items()},
        "open_entries": {str(k): [list(e) for e in v] for k, v in cascade.open_entries.items()},
        "printed_g02": ell2.printed_g02(p, lam),
        "entries": records,
        "status": "PASS" if all(r["dp_ok"] and r["closed_ok"] is not False for r in records) else "FAIL",
    })


def cmd_stationary(args) -> str:
    p = parse_probability(args.p)
    model = stationary.stationary_model(p, args.ell)
    pmf = stationary.stationary_pmf(model, args.xmax).values
    if args.format == "csv":
        return _csv(["x", "probability"], [[x, _float(v)] for x, v in enumerate(pmf)])
    return _json([_float(v) for v in pmf])


def cmd_asymptotics(args) -> str:
    first, second = asymptotics.limit_constants()
    out = {"constants": {"sqrt_pi_over_8": first, "catalan_over_2": second,
                         "catalan": asymptotics.catalan_constant()}}
    if args.n_list:
        report = asymptotics.convergence_report(parse_probability(args.p), args.ell, args.n_list,
                                                args.method, args.reps, args.seed)
        out.update(p=report.p, ell=report.ell, rows=report.to_rows(), note=report.note)
        if args.format == "csv":
            return _records_csv(report.to_rows())
    elif args.format == "csv":
        return _csv(["name", "value"], [[k, v] for k, v in out["constants"].items()])
    return _json(out)


def cmd_simulate(args) -> str:
    params = walk.make_params(parse_probability(args.p), args.ell, walk.FLOAT)
    result = montecarlo.estimate_moments(
        montecarlo.SimConfig(params, args.n, args.reps, args.seed), args.workers)
    d = result.to_dict()
    if args.format == "csv":
        return _records_csv([d])
    d["max_counts"] = list(result.counts)
    return _json(d)


def cmd_universality(args) -> str:
    report = montecarlo.universality_experiment(parse_probability(args.p), args.ells, args.n,
                                                args.reps, args.seed, args.workers)
    if args.format == "csv":
        return _records_csv(report.rows())
    return _json({"label": report.label, "p": report.p, "n": report.n, "reps": report.reps,
                  "seed": report.seed, "rows": report.rows()})


# --- parser ------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="stoplight", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", parser_class=_Parser)

    def common(name, func, help, fmt="json"):
        sp = sub.add_parser(name, help=help)
        sp.add_argument("--p", default="1/3", help="arrival probability, a/b or decimal")
        sp.add_argument("--ell", type=int, default=1)
        sp.add_argument("--format", choices=["json", "csv"], default=fmt)
        sp.add_argument("--out")
        sp.set_defaults(func=func)
        return sp

    sp = common("maxdist", cmd_maxdist, "distribution of the running maximum M_n")
    sp.add_argument("--n", type=int, required=True)
    sp.add_argument("--mode", choices=[walk.EXACT, walk.FLOAT], default=walk.EXACT)

    sp = common("jointdist", cmd_jointdist, "joint law of (S_n, M_n)")
    sp.add_argument("--n", type=int, required=True)
    sp.add_argument("--mode", choices=[walk.EXACT, walk.FLOAT], default=walk.EXACT)

    sp = common("gf-check", cmd_gf_check, "closed-form coefficients of P{M_2n=a} vs. the recursion",
                fmt=None)
    sp.add_argument("--a", type=int, default=1)
    sp.add_argument("--terms", type=int, default=25)

    sp = common("ell2-verify", cmd_ell2_verify, "two-step light: closed forms, cascade, recursion")
    sp.add_argument("--lambda", dest="lam", type=float, default=0.25)
    sp.add_argument("--amax", type=int, default=4)
    sp.add_argument("--terms", type=int, default=60)

    sp = common("stationary", cmd_stationary, "limiting distribution of S_n (needs p < 1/2)")
    sp.add_argument("--xmax", type=int, default=20)

    sp = common("asymptotics", cmd_asymptotics, "limit constants and convergence of scaled moments")
    sp.set_defaults(p="1/2")
    sp.add_argument("--n", dest="n_list", type=_int_list, default=[])
    sp.add_argument("--method", choices=[asymptotics.DP, asymptotics.MC], default=asymptotics.DP)
    sp.add_argument("--reps", type=int, default=10_000)
    sp.add_argument("--seed", type=int, default=0)

    sp = common("simulate", cmd_simulate, "Monte Carlo moments of M_n")
    sp.add_argument("--n", type=int, required=True)
    sp.add_argument("--reps", type=int, default=10_000)
    sp.add_argument("--seed", type=int, default=0)
    sp.add_argument("--workers", type=int, default=1)

    sp = common("universality", cmd_universality, "compare M_n/sqrt(n) moments across cycle lengths")
    sp.set_defaults(p="1/2")
    sp.add_argument("--ells", type=_int_list, default=[1, 2])
    sp.add_argument("--n", type=int, required=True)
    sp.add_argument("--reps", type=int, default=10_000)
    sp.add_argument("--seed", type=int, default=0)
    sp.add_argument("--workers", type=int, default=1)
    return parser


def _params(args) -> walk.Params:
    p = parse_probability(args.p)
    return walk.validate_params(p.numerator, p.denominator, args.ell, args.mode)


def _write(args, argv, text: str, elapsed: float) -> None:
    if not args.out:
        sys.stdout.write(text)
        return
    data = text.encode()
    with open(args.out, "wb") as fh:
        fh.write(data)
    manifest = {
        "command": args.command,
        "argv": list(argv),
        "seed": getattr(args, "seed", None),
        "version": _tool_version(),
        "wall_time_s": elapsed,
        "started_at": time.strftime("%Y-%m-%dT%H:%M:%SZ", time.gmtime(time.time() - elapsed)),
        "output": args.out,
        "sha256": hashlib.sha256(data).hexdigest(),
    }
    with open(args.out + ".manifest.json", "w") as fh:
        fh.write(_json(manifest))


def run(argv=None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    try:
        args = build_parser().parse_args(argv)
        if args.command is None:
            raise UsageError("stoplight: a command is required")
        if hasattr(args, "seed") and not 0 <= args.seed < 2 ** 64:
            raise ValidationError("--seed must be an unsigned 64-bit integer")
        t0 = time.perf_counter()
        text = args.func(args)
        _write(args, argv, text, time.perf_counter() - t0)
    except UsageError as exc:
        print(exc, file=sys.stderr)
        return EXIT_USAGE
    except ValidationError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INVALID
    except (NumericFailure, SeriesMismatch) as exc:
        print(f"numeric failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except StoplightError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INVALID
    return EXIT_OK


def main() -> None:
    sys.exit(run())
