"""Command line front end: sweep, verify, selftest, render."""
import argparse
from importlib import resources
import sys

from . import model
from .errors import ConfigError, FormatError, InvalidArgumentError, NumericalError
from .harness import checks
from .harness.render import ChartSpec, render_chart
from .harness.sweep import SweepSpec, run_sweep


def default_config_path():
    return str(resources.files("risambc").joinpath("data/table1.cfg"))


def _csv_list(text):
    return tuple(t.strip() for t in text.split(",") if t.strip())


def _sweep_arg(text):
    if "=" not in text:
        raise argparse.ArgumentTypeError("expected <var>=v1,v2,...")
    var, vals = text.split("=", 1)
    try:
        return var.strip(), tuple(float(v) for v in _csv_list(vals))
    except ValueError:
        raise argparse.ArgumentTypeError(f"bad sweep values in {text!r}") from None


def _positive_int(text):
    v = int(text)
    if v < 1:
        raise argparse.ArgumentTypeError("must be >= 1")
    return v


def _load(args):
    s = model.load_config(args.config or default_config_path())
    over = {}
    if getattr(args, "trials", None) is not None:
        over["trials"] = args.trials
    if getattr(args, "seed", None) is not None:
        over["seed"] = args.seed
    if getattr(args, "quad_d", None) is not None:
        over["quad_d"] = args.quad_d
    if over:
        from dataclasses import replace
        try:
            s = replace(s, **over)
        except InvalidArgumentError as e:
            raise ConfigError(str(e)) from e
    return s


def _add_common(p):
    p.add_argument("--config", help="key = value scenario file (default: shipped table values)")
    p.add_argument("--trials", type=_positive_int, help="Monte Carlo trials per point")
    p.add_argument("--seed", type=int, help="Monte Carlo seed")
    p.add_argument("--quad-d", type=_positive_int, dest="quad_d", help="Gauss-Laguerre order")


def build_parser():
    ap = argparse.ArgumentParser(prog="risambc", description=__doc__)
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("sweep", help="evaluate a parameter sweep and write a CSV")
    _add_common(p)
    p.add_argument("--out", required=True, help="CSV output path")
    p.add_argument("--sweep", type=_sweep_arg, required=True, metavar="VAR=v1,v2,...",
                   help="ps_dbm, m_elements, x_ris, kappa or varpi, ascending values")
    p.add_argument("--metrics", type=_csv_list, default=("sop_data", "sop_backscatter"),
                   help="sop_data,sop_backscatter,sop_system,throughput,energy_eff")
    p.add_argument("--methods", type=_csv_list, default=("analytic", "mc"), help="analytic,asymptotic,mc")
    p.add_argument("--sic", type=_csv_list, default=("ipsic",), help="ipsic,psic")
    p.add_argument("--baseline", choices=("no-ris",), action="append", default=[],
                   help="add single-element Monte Carlo rows")
    p.add_argument("--workers", type=_positive_int, default=1, help="Monte Carlo threads (output does not depend on it)")

    p = sub.add_parser("verify", help="run the acceptance checks")
    _add_common(p)
    p.add_argument("--criteria", type=_csv_list, help="subset of criterion numbers, e.g. 1,5,7")

    p = sub.add_parser("selftest", help="special-function and quadrature checks only")

    p = sub.add_parser("render", help="draw an SVG line chart from a sweep CSV")
    p.add_argument("csv", help="input CSV from `sweep`")
    p.add_argument("--out", required=True, help="SVG output path")
    p.add_argument("--metrics", type=_csv_list)
    p.add_argument("--methods", type=_csv_list)
    p.add_argument("--sic", type=_csv_list)
    p.add_argument("--title")
    return ap


def _report(results):
    for r in results:
        print(r.line(), flush=True)
    n_pass = sum(r.passed for r in results)
    ok = n_pass == len(results)
    print(f"SUMMARY {n_pass}/{len(results)} {'PASS' if ok else 'FAIL'}")
    return 0 if ok else 1


def cmd_sweep(args):
    var, values = args.sweep
    spec = SweepSpec(var, values, args.metrics, args.methods, args.sic,
                     tuple(b.replace("-", "_") for b in args.baseline))
    rows = run_sweep(_load(args), spec, args.out, workers=args.workers)
    print(f"wrote {len(rows)} rows to {args.out}")
    return 0


def cmd_verify(args):
    s = _load(args)
    crit = [int(c) for c in args.criteria] if args.criteria else None
    if crit and any(c not in checks.CRITERIA for c in crit):
        raise InvalidArgumentError(f"criteria must be among {sorted(checks.CRITERIA)}")
    results = checks.run_checks(s, crit, echo=lambda line: print(line, flush=True))
    n_pass = sum(r.passed for r in results)
    ok = n_pass == len(results)
    print(f"SUMMARY {n_pass}/{len(results)} {'PASS' if ok else 'FAIL'}")
    return 0 if ok else 1


def cmd_selftest(args):
    return _report(checks.specfun_checks())


def cmd_render(args):
    spec = ChartSpec(args.metrics, args.methods, args.sic, args.title)
    render_chart(args.csv, spec, args.out)
    print(f"wrote {args.out}")
    return 0


COMMANDS = {"sweep": cmd_sweep, "verify": cmd_verify, "selftest": cmd_selftest, "render": cmd_render}


def main(argv=None):
    args = build_parser().parse_args(argv)
    try:
        return COMMANDS[args.command](args)
    except (ConfigError, FormatError, InvalidArgumentError, NumericalError) as e:
        print(f"risambc: error: {e}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
