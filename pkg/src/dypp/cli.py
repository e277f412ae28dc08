"""Command line entry point.

Subcommands::

    dypp run          one simulation -> trace.csv, summary.json, manifest.json, config.ini, state.npz
    dypp compare      the same seed and population under several schemes
    dypp verify-ne    exploitability of the learned policies of a finished run
    dypp print-config the resolved configuration

Exit codes: 0 success, 1 configuration error, 2 runtime error.
"""
from __future__ import annotations

import argparse
import datetime as dt
import json
import sys
from pathlib import Path

from . import __version__
from .config import ConfigError, build_config, config_hash, format_config, load_config, with_overrides
from .engine import init_population, run_simulation
from .experiment import compare_over_seeds, compare_schemes
from .learners import SCHEMES
from .ne_verifier import exploitability
from .traceio import load_state, read_json, save_state, write_json, write_trace

EXIT_OK, EXIT_CONFIG, EXIT_RUNTIME = 0, 1, 2


def _now() -> str:
    return dt.datetime.now(dt.timezone.utc).isoformat(timespec="seconds")


def _resolve(args):
    config = load_config(args.config) if args.config else build_config({})
    scheme = getattr(args, "scheme", None)
    if isinstance(scheme, list):
        scheme = None
    return with_overrides(config, seed=args.seed, iterations=args.iterations, scheme=scheme)


def _exploitability_reports(state) -> dict:
    return {rows: exploitability(state, rows).to_dict() for rows in ("most-visited", "visit-weighted")}


def _write_run(result, out: Path, started: str) -> dict:
    out.mkdir(parents=True, exist_ok=True)
    cfg = result.config
    paths = {
        "trace": write_trace(result.trace, out / "trace.csv", cfg.grids),
        "config": out / "config.ini",
        "state": save_state(result.state, out / "state.npz"),
    }
    paths["config"].write_text(format_config(cfg), encoding="utf-8")
    summary = dict(result.summary, exploitability=_exploitability_reports(result.state))
    paths["summary"] = write_json(summary, out / "summary.json")
    manifest = {
        "config_hash": config_hash(cfg), "master_seed": cfg.master_seed, "version": __version__,
        "started": started, "finished": _now(), "outputs": {k: str(v) for k, v in paths.items()},
    }
    write_json(manifest, out / "manifest.json")
    return summary


def cmd_run(args) -> int:
    config = _resolve(args)
    started = _now()
    result = run_simulation(config)
    summary = _write_run(result, Path(args.out), started)
    print(json.dumps({k: v for k, v in summary.items() if k != "exploitability"}, indent=2, sort_keys=True))
    return EXIT_OK


def cmd_compare(args) -> int:
    config = _resolve(args)
    schemes = args.scheme or list(SCHEMES)
    out = Path(args.out)
    if args.seeds > 1:
        seeds = range(config.master_seed, config.master_seed + args.seeds)
        report = compare_over_seeds(config, seeds, schemes)
        out.mkdir(parents=True, exist_ok=True)
        write_json(report, out / "compare.json")
        for s, r in report.items():
            print(f"{s:>10}: median iterations to convergence {r['median_iterations_to_convergence']}, "
                  f"converged {r['converged_runs']}/{len(r['runs'])}, "
                  f"median curator payoff {r['median_converged_curator_payoff']:.6g}")
        return EXIT_OK
    started = _now()
    cmp = compare_schemes(config, schemes)
    report = {"population_digest": cmp["population_digest"], "schemes": {}}
    for s, result in cmp["results"].items():
        report["schemes"][s] = _write_run(result, out / s, started)
    write_json(report, out / "compare.json")
    for s, summary in report["schemes"].items():
        print(f"{s:>10}: iterations to convergence {summary['iterations_to_convergence']}, "
              f"mean saving {summary['converged_mean_delta_sigma']:.6g}, "
              f"mean payment {summary['converged_mean_price']:.6g}, "
              f"curator payoff {summary['converged_curator_payoff']:.6g}")
    return EXIT_OK


def cmd_verify_ne(args) -> int:
    out = Path(args.out)
    config = load_config(out / "config.ini")
    state = load_state(init_population(config), out / "state.npz")
    reports = _exploitability_reports(state)
    summary_path = out / "summary.json"
    if summary_path.exists():
        summary = read_json(summary_path)
        summary["exploitability"] = reports
        write_json(summary, summary_path)
    for rows, rep in reports.items():
        verdict = "eps-NE" if rep["epsilon"] <= args.eps else "not eps-NE"
        print(f"{rows:>14}: epsilon {rep['epsilon']:.6g} ({verdict} at {args.eps})")
    return EXIT_OK


def cmd_print_config(args) -> int:
    config = _resolve(args)
    sys.stdout.write(format_config(config))
    print(f"# config hash {config_hash(config)}")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="dypp", description=__doc__.split("\n")[0])
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, scheme_multi=False):
        p.add_argument("--config", metavar="PATH", help="INI config; missing keys take the defaults")
        p.add_argument("--seed", type=int, metavar="U64", help="master seed override")
        p.add_argument("--iterations", type=int, metavar="T", help="maximum number of rounds")
        if scheme_multi:
            p.add_argument("--scheme", action="append", choices=SCHEMES,
                           help="scheme to include (repeatable; default: all)")
        else:
            p.add_argument("--scheme", choices=SCHEMES, help="learning scheme for both sides")

    p = sub.add_parser("run", help="run one simulation")
    common(p)
    p.add_argument("--out", default="runs/run", metavar="DIR")
    p.set_defaults(func=cmd_run)

    p = sub.add_parser("compare", help="compare schemes on a shared population")
    common(p, scheme_multi=True)
    p.add_argument("--out", default="runs/compare", metavar="DIR")
    p.add_argument("--seeds", type=int, default=1, metavar="K",
                   help="repeat over K consecutive seeds and report medians")
    p.set_defaults(func=cmd_compare)

    p = sub.add_parser("verify-ne", help="exploitability of a finished run")
    p.add_argument("--out", required=True, metavar="DIR", help="directory written by 'run'")
    p.add_argument("--eps", type=float, default=0.05, help="epsilon for the eps-NE verdict")
    p.set_defaults(func=cmd_verify_ne)

    p = sub.add_parser("print-config", help="print the resolved configuration")
    common(p)
    p.set_defaults(func=cmd_print_config)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except Exception as exc:  # noqa: BLE001 - any failure past config resolution is a runtime error
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_RUNTIME


if __name__ == "__main__":
    sys.exit(main())
