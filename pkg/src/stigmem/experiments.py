"""Seeded batches of runs and the tables built from them.

Run ``i`` of a batch uses seed ``seed_base + i``, and every table is sorted
by configuration and seed, so output is identical for any ``jobs`` setting.
"""

from __future__ import annotations

import csv
import io
import itertools
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from typing import Iterable, Sequence

from stigmem import metrics
from stigmem.engine import PRESETS, ModelConfig, RunRecord, build_configuration, run
from stigmem.stats import mean_std, welch_t
from stigmem.world import WorldConfig

RUN_COLUMNS = (
    "performance",
    "food_efficiency",
    "exploration_coverage",
    "coordination_events",
    "order_parameter",
    "fresh_strong_fraction",
    "memory_efficiency",
    "mean_memory_entries",
    "final_alive",
)


def run_batch(config: ModelConfig, runs: int, seed_base: int = 0, jobs: int = 1) -> list[RunRecord]:
    """``runs`` copies of ``config`` with seeds ``seed_base .. seed_base + runs - 1``, in seed order."""
    if runs < 0:
        raise ValueError(f"runs must be non-negative, got {runs}")
    configs = [config.with_(seed=seed_base + i) for i in range(runs)]
    if jobs <= 1 or runs <= 1:
        return [run(c) for c in configs]
    with ProcessPoolExecutor(max_workers=jobs) as pool:
        # map preserves submission order regardless of completion order
        return list(pool.map(run, configs))


def grid_world(grid: int) -> WorldConfig:
    return WorldConfig(width=grid, height=grid)


@dataclass(frozen=True)
class Batch:
    name: str
    records: list[RunRecord]

    def column(self, key: str) -> list[float]:
        return [r.final[key] for r in self.records]


def _check_metric_identity(rec: RunRecord) -> None:
    f = rec.final
    expected = metrics.performance_score(f["exploration_coverage"], f["food_efficiency"], f["coordination_events"])
    if f["performance"] != expected:
        raise AssertionError(f"performance {f['performance']} does not match its components ({expected})")


def baseline(
    grid: int = 15,
    agents: int = 7,
    runs: int = 50,
    steps: int = 100,
    seed_base: int = 0,
    jobs: int = 1,
    configs: Sequence[str] = PRESETS,
) -> list[Batch]:
    world = grid_world(grid)
    out = []
    for name in configs:
        cfg = build_configuration(name, world=world, n_agents=agents, steps=steps)
        recs = run_batch(cfg, runs, seed_base, jobs)
        for r in recs:
            _check_metric_identity(r)
        out.append(Batch(name, recs))
    return out


def per_run_rows(batches: Iterable[Batch]) -> list[dict]:
    rows = []
    for b in batches:
        for r in b.records:
            row = {"configuration": b.name, "seed": r.config["seed"], "n_agents": r.n_agents}
            row.update({k: r.final[k] for k in RUN_COLUMNS})
            rows.append(row)
    return rows


def summary_rows(batches: Iterable[Batch]) -> list[dict]:
    """One row per configuration with the mean and sample std of each final metric."""
    rows = []
    for b in batches:
        row: dict = {"configuration": b.name, "runs": len(b.records)}
        for k in RUN_COLUMNS:
            m, s = mean_std(b.column(k)) if b.records else (0.0, 0.0)
            row[f"{k}_mean"] = m
            row[f"{k}_std"] = s
        rows.append(row)
    return rows


def welch_rows(batches: Sequence[Batch], metric: str = "performance") -> list[dict]:
    """Pairwise two-tailed Welch tests on ``metric``; degenerate pairs get empty statistics."""
    rows = []
    for a, b in itertools.combinations(batches, 2):
        row = {"configuration_a": a.name, "configuration_b": b.name, "metric": metric}
        try:
            res = welch_t(a.column(metric), b.column(metric))
            row.update(t=res.t, df=res.df, p=res.p)
        except ValueError:
            row.update(t="", df="", p="")
        rows.append(row)
    return rows


def sweep_agents(density: float, grid: int) -> int:
    return round(density * grid * grid)


def sweep(
    densities: Sequence[float],
    grid: int = 15,
    runs: int = 10,
    configs: Sequence[str] = ("memory_no_traces", "traces_only"),
    steps: int = 100,
    seed_base: int = 0,
    jobs: int = 1,
) -> list[dict]:
    """Mean and std of the headline metrics for each (density, configuration) pair."""
    world = grid_world(grid)
    rows = []
    for rho in densities:
        n = sweep_agents(rho, grid)
        for name in configs:
            cfg = build_configuration(name, world=world, n_agents=n, steps=steps)
            b = Batch(name, run_batch(cfg, runs, seed_base, jobs))
            row = {"grid": grid, "density": rho, "n_agents": n, "configuration": name, "runs": runs}
            for k in ("food_efficiency", "performance", "order_parameter"):
                m, s = mean_std(b.column(k)) if runs else (0.0, 0.0)
                row[f"{k}_mean"] = m
                row[f"{k}_std"] = s
            rows.append(row)
    return rows


def robustness(
    scenario: str,
    preset: str = "full_memory",
    agents: int = 7,
    fraction: float = 0.5,
    runs: int = 20,
    grid: int = 15,
    steps: int = 100,
    seed_base: int = 0,
    jobs: int = 1,
) -> list[dict]:
    """Per-seed resilience ratios; a blank value means the pre-trigger window scored zero."""
    cfg = build_configuration(
        preset, world=grid_world(grid), n_agents=agents, steps=steps, perturb=scenario, perturb_fraction=fraction
    )
    rows = []
    for r in run_batch(cfg, runs, seed_base, jobs):
        res = r.final.get("resilience")
        rows.append(
            {
                "scenario": scenario,
                "configuration": preset,
                "seed": r.config["seed"],
                "fraction": fraction,
                "resilience": "" if res is None else res,
                "performance": r.final["performance"],
            }
        )
    return rows


def mean_resilience(rows: Sequence[dict]) -> float | None:
    vals = [r["resilience"] for r in rows if r["resilience"] != ""]
    return sum(vals) / len(vals) if vals else None


def to_csv(rows: Sequence[dict]) -> str:
    """RFC 4180 CSV with floats written by ``repr`` so reruns are byte-identical."""
    buf = io.StringIO()
    if not rows:
        return ""
    w = csv.DictWriter(buf, fieldnames=list(rows[0]), lineterminator="\r\n")
    w.writeheader()
    for row in rows:
        w.writerow({k: repr(v) if isinstance(v, float) else v for k, v in row.items()})
    return buf.getvalue()
