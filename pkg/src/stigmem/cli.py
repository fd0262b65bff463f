"""Command-line front end.

Exit status is 0 on success, 1 for usage errors and 2 when a well-formed
command fails at run time (bad config values, unwritable paths).
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from stigmem import experiments, meanfield
from stigmem.engine import PERTURBATIONS, PRESETS, build_configuration, load_config, run
from stigmem.world import ConfigError, WorldConfig, generate_world

EXIT_OK, EXIT_USAGE, EXIT_RUNTIME = 0, 1, 2


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message: str):  # argparse exits with 2 by default
        raise UsageError(f"{self.prog}: error: {message}")


def _csv_list(kind):
    def parse(text: str):
        try:
            return [kind(x) for x in text.split(",") if x.strip()]
        except ValueError as exc:
            raise argparse.ArgumentTypeError(str(exc)) from exc

    return parse


def _emit(text: str, out: str | None) -> None:
    if out is None:
        sys.stdout.write(text)
    else:
        Path(out).parent.mkdir(parents=True, exist_ok=True)
        Path(out).write_text(text, encoding="utf-8", newline="")


def _batch_flags(p: argparse.ArgumentParser, runs: int) -> None:
    p.add_argument("--grid", type=int, default=15, help="grid side length")
    p.add_argument("--runs", type=int, default=runs, help="seeds per configuration")
    p.add_argument("--steps", type=int, default=100)
    p.add_argument("--seed-base", type=int, default=0, help="run i uses seed seed_base + i")
    p.add_argument("--jobs", type=int, default=1, help="worker processes")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="stigmem", description="Stigmergic collective-memory simulator.")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("run", help="one seeded run; writes JSON and CSV records")
    src = p.add_mutually_exclusive_group()
    src.add_argument("--config", help="key = value config file")
    src.add_argument("--preset", choices=PRESETS, default=None)
    p.add_argument("--seed", type=int, default=None, help="overrides the config seed")
    p.add_argument("--out-dir", default=".", help="directory for run.json and run.csv")

    p = sub.add_parser("baseline", help="every configuration over many seeds, with Welch tests")
    _batch_flags(p, runs=50)
    p.add_argument("--agents", type=int, default=7)
    p.add_argument("--configs", type=_csv_list(str), default=list(PRESETS))
    p.add_argument("--out-dir", default="baseline", help="directory for the three CSV tables")

    p = sub.add_parser("sweep", help="metrics across agent densities")
    _batch_flags(p, runs=10)
    p.add_argument("--densities", type=_csv_list(float), default=[0.049, 0.102, 0.151, 0.200, 0.249])
    p.add_argument("--configs", type=_csv_list(str), default=["memory_no_traces", "traces_only"])
    p.add_argument("--out", default=None, help="CSV path (default: stdout)")

    p = sub.add_parser("robustness", help="resilience ratios under a perturbation")
    _batch_flags(p, runs=20)
    p.add_argument("--scenario", required=True, choices=[s for s in PERTURBATIONS if s != "none"])
    p.add_argument("--preset", choices=PRESETS, default="full_memory")
    p.add_argument("--agents", type=int, default=7)
    p.add_argument("--fraction", type=float, default=0.5)
    p.add_argument("--out", default=None, help="CSV path (default: stdout)")

    p = sub.add_parser("meanfield", help="critical density and the theoretical order-parameter curve")
    defaults = meanfield.MeanFieldParams()
    p.add_argument("--alpha", type=float, default=defaults.alpha)
    p.add_argument("--mu", type=float, default=defaults.mu)
    p.add_argument("--degree", type=float, default=defaults.mean_degree)
    p.add_argument("--rho-min", type=float, default=0.0)
    p.add_argument("--rho-max", type=float, default=None, help="default: twice the critical density")
    p.add_argument("--points", type=int, default=41)
    p.add_argument("--out", default=None, help="CSV path for the curve (default: none)")

    p = sub.add_parser("world", help="world utilities")
    wsub = p.add_subparsers(dest="world_command", required=True, parser_class=_Parser)
    d = wsub.add_parser("dump", help="print a generated world as JSON")
    d.add_argument("--config", help="config file whose world section is used")
    d.add_argument("--grid", type=int, default=15)
    d.add_argument("--seed", type=int, default=0)
    d.add_argument("--out", default=None)
    return parser


def _cmd_run(a) -> int:
    cfg = load_config(a.config) if a.config else build_configuration(a.preset or "full_memory")
    if a.seed is not None:
        cfg = cfg.with_(seed=a.seed)
    rec = run(cfg)
    out = Path(a.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    (out / "run.json").write_text(rec.to_json() + "\n", encoding="utf-8")
    (out / "run.csv").write_text(rec.to_csv(), encoding="utf-8")
    print(f"performance = {rec.final['performance']:.4f}")
    return EXIT_OK


def _check_presets(names) -> None:
    bad = [n for n in names if n not in PRESETS]
    if bad:
        raise UsageError(f"unknown configuration(s) {', '.join(bad)}; choose from {', '.join(PRESETS)}")


def _cmd_baseline(a) -> int:
    _check_presets(a.configs)
    batches = experiments.baseline(a.grid, a.agents, a.runs, a.steps, a.seed_base, a.jobs, a.configs)
    out = Path(a.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    summary = experiments.summary_rows(batches)
    (out / "runs.csv").write_text(experiments.to_csv(experiments.per_run_rows(batches)), encoding="utf-8")
    (out / "summary.csv").write_text(experiments.to_csv(summary), encoding="utf-8")
    (out / "welch.csv").write_text(experiments.to_csv(experiments.welch_rows(batches)), encoding="utf-8")
    for row in summary:
        print(f"{row['configuration']:18s} {row['performance_mean']:10.3f} +/- {row['performance_std']:.3f}")
    return EXIT_OK


def _cmd_sweep(a) -> int:
    _check_presets(a.configs)
    rows = experiments.sweep(a.densities, a.grid, a.runs, a.configs, a.steps, a.seed_base, a.jobs)
    _emit(experiments.to_csv(rows), a.out)
    return EXIT_OK


def _cmd_robustness(a) -> int:
    rows = experiments.robustness(
        a.scenario, a.preset, a.agents, a.fraction, a.runs, a.grid, a.steps, a.seed_base, a.jobs
    )
    _emit(experiments.to_csv(rows), a.out)
    m = experiments.mean_resilience(rows)
    print("mean resilience = " + ("undefined" if m is None else f"{m:.4f}"), file=sys.stderr)
    return EXIT_OK


def _cmd_meanfield(a) -> int:
    if a.points < 2:
        raise UsageError("--points must be at least 2")
    p = meanfield.MeanFieldParams(alpha=a.alpha, mu=a.mu, mean_degree=a.degree)
    rc = meanfield.critical_density(p)
    hi = a.rho_max if a.rho_max is not None else 2 * rc
    if not 0 <= a.rho_min < hi:
        raise UsageError("need 0 <= --rho-min < --rho-max")
    step = (hi - a.rho_min) / (a.points - 1)
    grid = [a.rho_min + i * step for i in range(a.points)]
    print(f"rho_c = {rc:.4f}")
    if a.out is not None:
        _emit(meanfield.curve_csv(p, grid), a.out)
    return EXIT_OK


def _cmd_world(a) -> int:
    wc = load_config(a.config).world if a.config else WorldConfig(width=a.grid, height=a.grid)
    text = json.dumps(generate_world(wc, a.seed).to_dict(), sort_keys=True, indent=2) + "\n"
    _emit(text, a.out)
    return EXIT_OK


COMMANDS = {
    "run": _cmd_run,
    "baseline": _cmd_baseline,
    "sweep": _cmd_sweep,
    "robustness": _cmd_robustness,
    "meanfield": _cmd_meanfield,
    "world": _cmd_world,
}


def main(argv: list[str] | None = None) -> int:
    try:
        args = build_parser().parse_args(argv)
        return COMMANDS[args.command](args)
    except UsageError as exc:
        print(exc, file=sys.stderr)
        return EXIT_USAGE
    except (ConfigError, ValueError, OSError, ArithmeticError) as exc:
        print(f"stigmem: {exc}", file=sys.stderr)
        return EXIT_RUNTIME


if __name__ == "__main__":
    sys.exit(main())
