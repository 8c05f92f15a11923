"""Command-line front end.

Exit codes: 0 success, 2 input/file errors, 3 unprofiled configurations,
4 validation errors.
"""
from __future__ import annotations

import argparse
import csv
import io
import sys
from fractions import Fraction
from pathlib import Path

from .errors import (NotProfiledError, ParseError, SearchSpaceError, TopologyMismatchError,
                     UnprofiledConfigError, ValidationError)
from .heuristic import free_bits
from .latdict import (BUILTIN_PROFILES, builtin_profile, dump_latency_dict, generate_dict,
                      load_profile, read_latency_dict)
from .metrics import compare, layer_latencies, render_table, reports_to_json, total_latency
from .netmodel import load_network, precision_set, serialize_network
from .search import (ParetoPoint, SensitivityModel, default_lambdas, lagrangian_sweep,
                     parse_sensitivity, pareto_front)

EXIT_OK, EXIT_INPUT, EXIT_UNPROFILED, EXIT_INVALID = 0, 2, 3, 4


class InputError(Exception):
    pass


def _write(path, text, force):
    path = Path(path)
    if path.exists() and not force:
        raise InputError(f"{path} exists; use --force to overwrite")
    path.write_text(text, encoding="utf-8")


def _resolve_profile(arg):
    path = Path(arg)
    if path.is_file():
        return load_profile(path)
    if path.suffix in ("", ".json") and path.stem in BUILTIN_PROFILES and not path.parent.name:
        return builtin_profile(path.stem)
    raise InputError(f"profile not found: {arg}")


def _read_network(path):
    if not Path(path).is_file():
        raise InputError(f"network not found: {path}")
    return load_network(path)


def _read_dict(path):
    if not Path(path).is_file():
        raise InputError(f"latency dictionary not found: {path}")
    return read_latency_dict(path, Path(path).stem)


def _fmt_num(x) -> str:
    x = Fraction(x)
    return str(x.numerator) if x.denominator == 1 else repr(float(x))


def parse_lambdas(spec: str) -> list:
    """``default``, ``log:LO:HI:N`` (zero plus N-1 log-spaced values) or a comma list."""
    if spec == "default":
        return [Fraction(v) for v in default_lambdas()]
    if spec.startswith("log:"):
        try:
            _, lo, hi, n = spec.split(":")
            values = default_lambdas(int(n), float(lo), float(hi))
        except ValueError:
            raise InputError(f"bad lambda spec {spec!r}; expected log:LO:HI:N") from None
        return [Fraction(v) for v in values]
    try:
        return [Fraction(v.strip()) for v in spec.split(",") if v.strip()]
    except ValueError:
        raise InputError(f"bad lambda list {spec!r}") from None


def cmd_gen_dict(args):
    hp = _resolve_profile(args.profile)
    net = _read_network(args.net)
    ld = generate_dict(hp, net, precision_set(args.pall))
    _write(args.output, dump_latency_dict(ld), args.force)
    print(f"wrote {len(ld)} entries for {len(ld.keys())} layer types to {args.output}",
          file=sys.stderr)


def _change_log(ld, old, new) -> str:
    out = io.StringIO()
    w = csv.writer(out, lineterminator="\n")
    w.writerow(["id", "old_b_in", "old_b_wt", "new_b_in", "new_b_wt", "old_cycles", "new_cycles"])
    old_lat = layer_latencies(ld, old)
    new_lat = layer_latencies(ld, new)
    for a, b, (_, c0), (_, c1) in zip(old.layers, new.layers, old_lat, new_lat):
        w.writerow([a.id, a.precision.b_in, a.precision.b_wt,
                    b.precision.b_in, b.precision.b_wt, c0, c1])
    return out.getvalue()


def cmd_optimize(args):
    net = _read_network(args.net)
    ld = _read_dict(args.dict)
    opt = free_bits(ld, net, precision_set(args.pall))
    log_path = args.log or str(args.output) + ".changes.csv"
    for path in (args.output, log_path):
        if Path(path).exists() and not args.force:
            raise InputError(f"{path} exists; use --force to overwrite")
    _write(args.output, serialize_network(opt), args.force)
    _write(log_path, _change_log(ld, net, opt), args.force)
    changed = sum(a.precision != b.precision for a, b in zip(net.layers, opt.layers))
    print(f"{changed} of {len(net)} layers upgraded; latency "
          f"{total_latency(ld, net)} -> {total_latency(ld, opt)} cycles", file=sys.stderr)


def cmd_evaluate(args):
    ld = _read_dict(args.dict)
    baseline = _read_network(args.baseline)
    reports = [compare(ld, _read_network(p), baseline) for p in args.nets]
    sys.stdout.write(render_table(reports))
    if args.json:
        _write(args.json, reports_to_json(reports), args.force)


def cmd_sweep(args):
    net = _read_network(args.net)
    ld = _read_dict(args.dict)
    p_all = precision_set(args.pall)
    scales = {}
    if args.sensitivity:
        if not Path(args.sensitivity).is_file():
            raise InputError(f"sensitivity file not found: {args.sensitivity}")
        scales = parse_sensitivity(Path(args.sensitivity).read_text(encoding="utf-8"))
    try:
        sens = SensitivityModel.from_scales(net, p_all, scales)
    except ValueError as e:
        raise ValidationError(str(e)) from None
    lambdas = parse_lambdas(args.lambdas)
    try:
        raw = lagrangian_sweep(net, ld, sens, lambdas, p_all)
    except ValueError as e:
        if isinstance(e, (ParseError, ValidationError)):
            raise
        raise InputError(str(e)) from None

    outdir = Path(args.output)
    if outdir.exists() and any(outdir.iterdir()) and not args.force:
        raise InputError(f"{outdir} is not empty; use --force to overwrite")
    outdir.mkdir(parents=True, exist_ok=True)

    rows = []
    for k, (lam, cfg) in enumerate(zip(lambdas, raw)):
        opt = free_bits(ld, cfg, p_all)
        stem = f"cfg_{k:03d}"
        _write(outdir / f"{stem}_raw.json", serialize_network(cfg), True)
        _write(outdir / f"{stem}_fb.json", serialize_network(opt), True)
        rows.append((stem, lam, total_latency(ld, cfg), total_latency(ld, opt),
                     sens.total(cfg), sens.total(opt)))

    # lower penalty is better
    points = [ParetoPoint(r[0], r[3], r[5]) for r in rows]
    front = {p.config_name for p in pareto_front(points, "minimize")}
    out = io.StringIO()
    w = csv.writer(out, lineterminator="\n")
    w.writerow(["name", "lambda", "latency_before", "latency_after", "penalty", "penalty_after",
                "on_front"])
    for stem, lam, lb, la, pb, pa in rows:
        w.writerow([stem, _fmt_num(lam), lb, la, _fmt_num(pb), _fmt_num(pa), int(stem in front)])
    _write(outdir / "index.csv", out.getvalue(), True)
    print(f"wrote {2 * len(rows)} configurations and index.csv to {outdir}", file=sys.stderr)


def build_parser():
    p = argparse.ArgumentParser(
        prog="freebits",
        description="Latency-optimized mixed-precision configurations via the free-bits heuristic.")
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp, pall=True):
        if pall:
            sp.add_argument("--pall", choices=["full", "locked"], default="full",
                            help="allowed precision pairs (default: full)")
        sp.add_argument("--force", action="store_true", help="overwrite existing outputs")

    g = sub.add_parser("gen-dict", help="synthesize a latency table from a hardware profile")
    g.add_argument("--profile", required=True,
                   help=f"profile JSON path or built-in name ({', '.join(BUILTIN_PROFILES)})")
    g.add_argument("--net", required=True, help="network description JSON")
    g.add_argument("-o", "--output", required=True, help="latency table CSV to write")
    common(g)
    g.set_defaults(func=cmd_gen_dict)

    o = sub.add_parser("optimize", help="apply the free-bits heuristic to a network")
    o.add_argument("--net", required=True)
    o.add_argument("--dict", required=True, help="latency table CSV")
    o.add_argument("-o", "--output", required=True, help="optimized network JSON to write")
    o.add_argument("--log", help="per-layer change log CSV (default: OUTPUT.changes.csv)")
    common(o)
    o.set_defaults(func=cmd_optimize)

    e = sub.add_parser("evaluate", help="compare configurations against a baseline")
    e.add_argument("nets", nargs="+", help="network description JSON files")
    e.add_argument("--dict", required=True)
    e.add_argument("--baseline", required=True)
    e.add_argument("--json", help="also write the reports as JSON")
    common(e, pall=False)
    e.set_defaults(func=cmd_evaluate)

    s = sub.add_parser("sweep", help="Lagrangian sweep followed by free bits, with a Pareto index")
    s.add_argument("--net", required=True)
    s.add_argument("--dict", required=True)
    s.add_argument("--sensitivity", help="JSON map layer id -> sensitivity scale")
    s.add_argument("--lambdas", default="default",
                   help="'default', 'log:LO:HI:N' or comma-separated values (ascending)")
    s.add_argument("-o", "--output", required=True, help="output directory")
    common(s)
    s.set_defaults(func=cmd_sweep)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        args.func(args)
    except (UnprofiledConfigError, NotProfiledError) as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_UNPROFILED
    except (ValidationError, TopologyMismatchError, SearchSpaceError) as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_INVALID
    except (InputError, ParseError, OSError) as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_INPUT
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
