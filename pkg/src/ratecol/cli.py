"""Command-line interface: ``ratecol <subcommand> ...``.

All JSON output carries ``"schema": "1"`` and prints floats with 17
significant digits so identical runs give byte-identical files.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys

from . import bounds, stopping, verify, zeroerror
from .exceptions import RatecolError
from .numerics import SourceModel, binary_entropy
from .symfunc import build_function, builtin, decompose_intervals, function_from_spec

SCHEMA = "1"
METRICS = ("lower_i", "lower_ii", "upper_iii", "rho", "exact_rate", "baseline",
           "cutset_parity", "cutset_min")


def fmt_float(x: float) -> str:
    if math.isnan(x) or math.isinf(x):
        raise ValueError(f"non-finite value {x} cannot be serialised")
    return format(x, ".17g")


def dumps(obj, indent: int = 2, _level: int = 0) -> str:
    """JSON encoder with fixed 17-digit floats and stable key order."""
    pad = " " * (indent * (_level + 1))
    end = " " * (indent * _level)
    if isinstance(obj, bool) or obj is None or isinstance(obj, str):
        return json.dumps(obj)
    if isinstance(obj, int):
        return str(obj)
    if isinstance(obj, float):
        return fmt_float(obj)
    if isinstance(obj, dict):
        if not obj:
            return "{}"
        items = [f"{pad}{json.dumps(str(k))}: {dumps(v, indent, _level + 1)}" for k, v in obj.items()]
        return "{\n" + ",\n".join(items) + "\n" + end + "}"
    if isinstance(obj, (list, tuple)):
        if not obj:
            return "[]"
        items = [pad + dumps(v, indent, _level + 1) for v in obj]
        return "[\n" + ",\n".join(items) + "\n" + end + "]"
    if hasattr(obj, "item"):  # numpy scalar
        return dumps(obj.item(), indent, _level)
    raise TypeError(f"cannot serialise {type(obj).__name__}")


def emit(payload: dict, out=None):
    out = out or sys.stdout
    out.write(dumps({"schema": SCHEMA, **payload}) + "\n")


def _function(args):
    if getattr(args, "function", None):
        with open(args.function) as fh:
            return function_from_spec(json.load(fh))
    if args.m is None:
        raise RatecolError("--m is required")
    if args.builtin and args.labels:
        raise RatecolError("give either --builtin or --labels, not both")
    if args.builtin:
        return builtin(args.builtin, args.m, args.theta)
    if args.labels is not None:
        try:
            labels = [int(tok) for tok in args.labels.split(",")]
        except ValueError:
            raise RatecolError(f"--labels must be comma-separated integers, got {args.labels!r}") from None
        return build_function(args.m, labels)
    raise RatecolError("a function is required: --builtin, --labels or --function")


def _add_function_args(p: argparse.ArgumentParser):
    p.add_argument("--builtin", choices=["parity", "sum", "max", "min", "majority", "threshold"])
    p.add_argument("--labels", help="comma-separated reduced table f'(0),...,f'(m)")
    p.add_argument("--function", help="path to a JSON function spec")
    p.add_argument("--m", type=int)
    p.add_argument("--theta", type=int, help="threshold for --builtin threshold")


def cmd_intervals(args) -> int:
    f = _function(args)
    emit(decompose_intervals(f).to_dict())
    return 0


def cmd_bounds(args) -> int:
    f = _function(args)
    src = SourceModel(f.m, args.p)
    emit({"m": f.m, "p": src.p, **bounds.report(f, src).to_dict()})
    return 0


def cmd_simulate(args) -> int:
    f = _function(args)
    src = SourceModel(f.m, args.p)
    sim = stopping.simulate(f, src, args.trials, args.seed)
    ek = stopping.exact_expected_k(f, src)
    emit({
        "m": f.m,
        "p": src.p,
        "exact": {"E_K": ek, "rate": ek * binary_entropy(src.p)},
        "monte_carlo": sim.to_dict(),
    })
    return 0


def _parse_m_values(args) -> list[int]:
    if args.m_values:
        values = [int(tok) for tok in args.m_values.split(",")]
    elif args.m_range:
        parts = [int(tok) for tok in args.m_range.split(":")]
        if len(parts) == 2:
            parts.append(1)
        start, stop, step = parts
        if step < 1:
            raise RatecolError("--m-range step must be positive")
        values = list(range(start, stop + 1, step))
    elif args.m_geom:
        start, stop, factor = (float(tok) for tok in args.m_geom.split(":"))
        if factor <= 1 or start < 1:
            raise RatecolError("--m-geom needs start >= 1 and factor > 1")
        values, x = [], start
        while round(x) <= stop:
            if not values or round(x) != values[-1]:
                values.append(int(round(x)))
            x *= factor
    else:
        raise RatecolError("sweep needs --m-range, --m-geom or --m-values")
    values = sorted(set(values))
    if not values or values[0] < 1:
        raise RatecolError("m range must be nonempty and positive")
    return values


def _p_values(rule: str, m: int) -> list[float]:
    if rule.strip() == "1/m":
        if m == 1:
            raise RatecolError("p rule '1/m' gives p=1 at m=1, which is not allowed")
        return [1.0 / m]
    return [float(tok) for tok in rule.split(",")]


def sweep_rows(name: str, theta, m_values, p_rule: str, metrics):
    for m in m_values:
        f = builtin(name, m, theta)
        for p in _p_values(p_rule, m):
            src = SourceModel(m, p)
            row = {"m": m, "p": p}
            for metric in metrics:
                if metric == "lower_i":
                    row[metric] = bounds.lower_bound_i(f, src)
                elif metric == "lower_ii":
                    row[metric] = bounds.lower_bound_ii(f, src)[0]
                elif metric == "upper_iii":
                    row[metric] = bounds.upper_bound_iii(f, src)
                elif metric == "rho":
                    row[metric] = bounds.rho(f) if abs(p - 0.5) < bounds.HALF_TOL else None
                elif metric == "exact_rate":
                    row[metric] = stopping.exact_rate(f, src)
                elif metric == "baseline":
                    row[metric] = bounds.download_baseline(src)
                elif metric == "cutset_parity":
                    row[metric] = bounds.cutset_parity_lower(m)
                elif metric == "cutset_min":
                    row[metric] = bounds.cutset_min_upper(m)
            yield row


def cmd_sweep(args) -> int:
    metrics = [tok.strip() for tok in args.metrics.split(",") if tok.strip()]
    unknown = [x for x in metrics if x not in METRICS]
    if unknown or not metrics:
        raise RatecolError(f"unknown metrics {unknown}; choose from {', '.join(METRICS)}")
    rows = list(sweep_rows(args.builtin, args.theta, _parse_m_values(args), args.p, metrics))
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["m", "p", *metrics])
    for row in rows:
        cells = [str(row["m"]), fmt_float(row["p"])]
        cells += ["" if row[x] is None else fmt_float(row[x]) for x in metrics]
        writer.writerow(cells)
    if args.out in (None, "-"):
        sys.stdout.write(buf.getvalue())
    else:
        with open(args.out, "w", newline="") as fh:
            fh.write(buf.getvalue())
    return 0


def _protocol(path):
    with open(path) as fh:
        return zeroerror.ProtocolSpec.from_dict(json.load(fh))


def cmd_verify(args) -> int:
    names = list(verify.SUITES) if args.suite == "all" else [args.suite]
    kwargs = {"m": args.m}
    if args.protocol:
        if names != ["lemma3"]:
            raise RatecolError("--protocol is only used with --suite lemma3")
        ps = _protocol(args.protocol)
        if args.m is None:
            args.m = ps.m
        kwargs = {"m": None, "protocol": ps, "f": _function(args)}
    results = verify.run_suites(names, quick=args.quick, **kwargs)
    ok = all(r.passed for r in results.values())
    emit({"passed": ok, "quick": bool(args.quick),
          "suites": {name: r.to_dict() for name, r in results.items()}})
    return 0 if ok else 1


def cmd_analyze_protocol(args) -> int:
    ps = _protocol(args.protocol)
    if args.m is None:
        args.m = ps.m
    f = _function(args)
    transcripts = zeroerror.run_protocol(ps)
    zero_error = zeroerror.verify_zero_error(ps, f)
    payload = {
        "m": ps.m,
        "rounds": ps.rounds,
        "worst_case_rate": zeroerror.worst_case_rate(ps),
        "zero_error": zero_error,
        "transcript_count": len(transcripts),
    }
    if zero_error:
        payload["transcripts"] = [a.to_dict() for a in zeroerror.analyze_lemma3(ps, f)]
    else:
        payload["transcripts"] = [
            {"transcript": zeroerror.transcript_key(t), "preimage": ["".join(map(str, x)) for x in xs]}
            for t, xs in transcripts.items()
        ]
    emit(payload)
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="ratecol",
        description="Sum-rate bounds for computing symmetric functions over collocated broadcast networks.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("intervals", help="maximal monochromatic interval decomposition")
    _add_function_args(p)
    p.set_defaults(func=cmd_intervals)

    p = sub.add_parser("bounds", help="sum-rate bound report")
    _add_function_args(p)
    p.add_argument("--p", type=float, required=True)
    p.set_defaults(func=cmd_bounds)

    p = sub.add_parser("simulate", help="exact and Monte-Carlo stopping-time scheme")
    _add_function_args(p)
    p.add_argument("--p", type=float, required=True)
    p.add_argument("--trials", type=int, default=100_000)
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("sweep", help="CSV of metrics over a range of m")
    p.add_argument("--builtin", required=True,
                   choices=["parity", "sum", "max", "min", "majority", "threshold"])
    p.add_argument("--theta", type=int)
    p.add_argument("--m-range", help="start:stop[:step], inclusive")
    p.add_argument("--m-geom", help="start:stop:factor, inclusive")
    p.add_argument("--m-values", help="comma-separated list of m")
    p.add_argument("--p", default="0.5", help="fixed value, comma list, or '1/m'")
    p.add_argument("--metrics", default="lower_i,lower_ii,upper_iii,exact_rate,baseline",
                   help=f"comma list from: {', '.join(METRICS)}")
    p.add_argument("--out", help="CSV path ('-' or omitted for stdout)")
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("verify", help="run oracle and property suites")
    p.add_argument("--suite", default="all", choices=["all", *verify.SUITES])
    p.add_argument("--quick", action="store_true")
    p.add_argument("--protocol", help="protocol JSON for --suite lemma3")
    _add_function_args(p)
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("analyze-protocol", help="per-transcript analysis of a protocol")
    p.add_argument("--protocol", required=True)
    _add_function_args(p)
    p.set_defaults(func=cmd_analyze_protocol)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (RatecolError, OSError, ValueError, json.JSONDecodeError) as exc:
        print(f"ratecol {args.command}: error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
