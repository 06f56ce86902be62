"""Command-line front end.

Subcommands:
  run       simulate a configured atom sequence; write series.csv, snapshot
            CSVs, audit.txt and (unless --no-plot) PNG figures
  optimize  grid-search the interaction time; write tau_scan.csv and best.txt
  presets   print bundled scenario configurations

Exit codes: 0 success, 1 configuration error, 2 cutoff/leakage error,
3 convergence audit failure (outputs are still written).
"""

import argparse
import sys
from pathlib import Path

from .config import PRESETS, parse_config_file, preset_text, to_run_config
from .errors import ConfigError, CutoffTooSmall, LeakageExceeded
from .experiments import convergence_audit, optimize_interaction_time, run_sequence

FLOAT_FMT = "%.12e"


def _fmt(x):
    return FLOAT_FMT % x


def _write_csv(path, header, rows):
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(header + "\n")
        for row in rows:
            fh.write(",".join(row) + "\n")


def _write_series(series, out_dir):
    rows = (
        [str(k), _fmt(series.zeta[k]), _fmt(series.mean_n[k]), _fmt(series.g2[k])]
        for k in range(len(series.zeta))
    )
    _write_csv(out_dir / "series.csv", "atom_index,zeta,mean_n,g2", rows)


def _write_snapshots(series, out_dir):
    for snap in series.snapshots:
        _write_csv(
            out_dir / f"pn_{snap.index}.csv", "n,p_n",
            ([str(n), _fmt(p)] for n, p in enumerate(snap.pn.p)),
        )
        x, y = snap.qgrid.spec.axes()
        _write_csv(
            out_dir / f"qgrid_{snap.index}.csv", "x,y,q",
            ([_fmt(x[i]), _fmt(y[j]), _fmt(snap.qgrid.values[i, j])]
             for i in range(len(x)) for j in range(len(y))),
        )


def _write_audit(report, out_dir):
    lines = [
        "convergence audit",
        f"base_cutoff={report.base_cutoff}",
        f"double_cutoff={report.double_cutoff}",
        f"zeta_drift={_fmt(report.zeta_drift)}",
        f"mean_n_drift={_fmt(report.mean_drift)}",
        f"final_rho_drift={_fmt(report.final_rho_drift)}",
        f"max_leakage={_fmt(report.max_leakage)}",
        f"verdict={'PASS' if report.ok else 'FAIL'}",
    ]
    if report.reason:
        lines.append(f"reason={report.reason}")
    (out_dir / "audit.txt").write_text("\n".join(lines) + "\n", encoding="utf-8")


def cmd_run(args):
    try:
        cfg = to_run_config(parse_config_file(args.config))
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    out_dir = Path(args.out)
    out_dir.mkdir(parents=True, exist_ok=True)
    try:
        series = run_sequence(cfg)
    except (CutoffTooSmall, LeakageExceeded) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    _write_series(series, out_dir)
    _write_snapshots(series, out_dir)
    report = convergence_audit(cfg)
    _write_audit(report, out_dir)
    if not args.no_plot:
        from . import plots

        plots.save_series_plot(series, out_dir / "series.png")
        for snap in series.snapshots:
            plots.save_pn_plot(snap, out_dir / f"pn_{snap.index}.png")
            plots.save_qgrid_plot(snap, out_dir / f"qgrid_{snap.index}.png")
    if not report.ok:
        print(f"convergence audit FAILED: {report.reason}", file=sys.stderr)
        return 3
    return 0


def cmd_optimize(args):
    try:
        parsed = parse_config_file(args.config)
        for key in ("tau_scan_lo", "tau_scan_hi", "tau_scan_step"):
            if not parsed.has_explicit(key):
                raise ConfigError(f"optimize requires explicit key '{key}'")
        cfg = to_run_config(parsed)
        lo = parsed["tau_scan_lo"]
        hi = parsed["tau_scan_hi"]
        step = parsed["tau_scan_step"]
        if lo < 0 or hi < lo:
            raise ConfigError("need 0 <= tau_scan_lo <= tau_scan_hi")
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    out_dir = Path(args.out)
    out_dir.mkdir(parents=True, exist_ok=True)
    try:
        result = optimize_interaction_time(cfg, lo, hi, step,
                                           refine_iters=args.refine_iters)
    except (CutoffTooSmall, LeakageExceeded) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    _write_csv(
        out_dir / "tau_scan.csv", "tau,zeta_min,argmin_atom_index",
        ([_fmt(r.tau), _fmt(r.zeta_min), str(r.argmin_atom)] for r in result.scan),
    )
    best = [
        f"tau_star={_fmt(result.tau_star)}",
        f"zeta_min={_fmt(result.zeta_min)}",
        f"argmin_atom_index={result.argmin_atom}",
        f"feasible={int(result.feasible)}",
    ]
    (out_dir / "best.txt").write_text("\n".join(best) + "\n", encoding="utf-8")
    if not args.no_plot:
        from . import plots

        plots.save_tau_scan_plot(result.scan, result.tau_star,
                                 out_dir / "tau_scan.png")
    return 0


def cmd_presets(args):
    names = [args.name] if args.name else list(PRESETS)
    try:
        blocks = [preset_text(name) for name in names]
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    sys.stdout.write("\n".join(blocks))
    return 0


def build_parser():
    parser = argparse.ArgumentParser(
        prog="tpmaser",
        description="Driven two-photon micromaser simulator on a truncated Fock basis.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_run = sub.add_parser("run", help="simulate an atom sequence from a config file")
    p_run.add_argument("--config", required=True, help="path to key=value config")
    p_run.add_argument("--out", required=True, help="output directory")
    p_run.add_argument("--no-plot", action="store_true", help="skip PNG rendering")
    p_run.set_defaults(func=cmd_run)

    p_opt = sub.add_parser("optimize", help="grid-search the interaction time")
    p_opt.add_argument("--config", required=True, help="path to key=value config")
    p_opt.add_argument("--out", required=True, help="output directory")
    p_opt.add_argument("--refine-iters", type=int, default=2,
                       help="rounds of 10x local grid refinement (default 2)")
    p_opt.add_argument("--no-plot", action="store_true", help="skip PNG rendering")
    p_opt.set_defaults(func=cmd_optimize)

    p_pre = sub.add_parser("presets", help="print bundled scenario configs")
    p_pre.add_argument("name", nargs="?", default=None,
                       help="emit just this preset (default: all)")
    p_pre.set_defaults(func=cmd_presets)
    return parser


def main(argv=None):
    args = build_parser().parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
