"""Robustness perturbations and resilience ratios.

All perturbations draw from the run's dedicated ``perturb`` stream, so a
zero-strength perturbation leaves the main run stream untouched.
"""

from __future__ import annotations

import math
from dataclasses import replace

from stigmem import metrics
from stigmem.world import ConfigError

CORRUPTION_FACTOR = (0.1, 0.5)


def remove_agents(sim, fraction: float, rng=None):
    """Kill ``ceil(fraction * alive)`` uniformly chosen living agents.

    The product is rounded to one decimal first, so a truncated fraction
    such as 0.167 of 12 agents removes 2 rather than 3.
    """
    if not 0.0 <= fraction < 1.0:
        raise ValueError(f"removal fraction must lie in [0, 1), got {fraction}")
    rng = rng if rng is not None else sim.perturb_rng
    alive = [a for a in sim.agents if a.alive]
    k = math.ceil(round(fraction * len(alive), 1))
    if k == 0:
        return sim
    if k >= len(alive):
        raise ValueError(f"removing {k} of {len(alive)} agents leaves none alive")
    chosen = set(rng.choice(len(alive), size=k, replace=False).tolist())
    for i, a in enumerate(alive):
        if i in chosen:
            a.alive = False
    sim.agents = [a for a in sim.agents if a.alive]
    sim.perturbation_log.append({"step": sim.t, "kind": "agent_failure", "removed": k})
    return sim


def corrupt_traces(sim, fraction: float, rng=None, factor: float | None = None):
    """Weaken each deposit with probability ``fraction`` by a factor drawn from [0.1, 0.5].

    A fixed ``factor`` bypasses the draw. Deposits pushed under the removal
    threshold disappear at the next decay.
    """
    if not 0.0 <= fraction <= 1.0:
        raise ValueError(f"corruption fraction must lie in [0, 1], got {fraction}")
    field = sim.field
    if field is None or fraction == 0.0:
        return sim
    rng = rng if rng is not None else sim.perturb_rng
    lo, hi = CORRUPTION_FACTOR
    hit = 0
    for pos in sorted(field.cells):
        cats = field.cells[pos]
        for cat in sorted(cats):
            for aid in sorted(cats[cat]):
                rec = cats[cat][aid]
                if rng.random() < fraction:
                    f = factor if factor is not None else rng.uniform(lo, hi)
                    rec[0] = max(0.0, rec[0] * f)
                    hit += 1
    field.refresh()
    sim.perturbation_log.append({"step": sim.t, "kind": "trace_corruption", "corrupted": hit})
    return sim


def relocate_food(sim, rng=None):
    """Resample every food site over cells free of obstacles and danger; the count is kept."""
    world = sim.world
    n = len(world.food_sites)
    if n == 0:
        return sim
    rng = rng if rng is not None else sim.perturb_rng
    pool = [
        (x, y)
        for x in range(world.width)
        for y in range(world.height)
        if (x, y) not in world.obstacle_sites and (x, y) not in world.danger_sites
    ]
    if len(pool) < n:
        raise ConfigError(f"cannot relocate {n} food sites into {len(pool)} free cells")
    idx = sorted(rng.choice(len(pool), size=n, replace=False).tolist())
    sim.world = replace(world, food_sites=frozenset(pool[i] for i in idx))
    sim.perturbation_log.append({"step": sim.t, "kind": "dynamic_food", "moved": n})
    return sim


def resilience_score(pre_perf: float, post_perf: float) -> float | None:
    """``post / pre``; ``None`` when the pre-perturbation window scored zero."""
    if pre_perf <= 0:
        return None
    return post_perf / pre_perf


def apply_scheduled(sim) -> None:
    cfg = sim.config
    t = sim.t
    if cfg.perturb == "agent_failure" and t == cfg.perturb_step:
        remove_agents(sim, cfg.perturb_fraction)
    elif cfg.perturb == "trace_corruption" and t == cfg.perturb_step:
        corrupt_traces(sim, cfg.perturb_fraction)
    elif cfg.perturb == "dynamic_food" and t > 0 and t % cfg.relocate_interval == 0:
        relocate_food(sim)


def run_resilience(sim) -> float | None:
    """Resilience of a finished run: the window after the trigger over the window before.

    For dynamic food the first relocation step is the trigger.
    """
    cfg = sim.config
    trigger = cfg.relocate_interval if cfg.perturb == "dynamic_food" else cfg.perturb_step
    w = cfg.window
    pre = metrics.window_performance(sim.record, trigger - w, trigger)
    post = metrics.window_performance(sim.record, trigger, trigger + w)
    return resilience_score(pre, post)
