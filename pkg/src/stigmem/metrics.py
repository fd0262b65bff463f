"""Scalar evaluation metrics over runs and agent populations."""

from __future__ import annotations

import math
from collections import Counter
from dataclasses import dataclass
from typing import Sequence

FRESH_STRENGTH = 0.3
FRESH_AGE = 60


@dataclass(frozen=True)
class MetricWeights:
    coverage: float = 1.0
    food: float = 15.0
    coordination: float = 5.0


def performance_score(e_cov: float, f_eff: float, c_evt: float, weights: MetricWeights = MetricWeights()) -> float:
    """Weighted sum of coverage (a fraction, not a percentage), food per agent and coordination events per agent."""
    if not 0.0 <= e_cov <= 1.0:
        raise ValueError(f"coverage must be a fraction in [0, 1], got {e_cov}")
    if f_eff < 0 or c_evt < 0:
        raise ValueError(f"food efficiency and coordination events must be >= 0, got {f_eff}, {c_evt}")
    return weights.coverage * e_cov + weights.food * f_eff + weights.coordination * c_evt


def exploration_coverage(run) -> float:
    cov = run.series["coverage"]
    return cov[-1] if cov else 0.0


def food_efficiency(run) -> float:
    n = run.n_agents
    return sum(run.series["food_collected"]) / n if n else 0.0


def coordination_events(run) -> float:
    """Mean number of consensus-guided moves per agent."""
    n = run.n_agents
    return sum(run.series["coordination_events"]) / n if n else 0.0


def order_parameter(run) -> float:
    """Fraction of all moves that landed on a cell with consensus above the coordination threshold."""
    moves = sum(run.series["moves"])
    return sum(run.series["coordination_events"]) / moves if moves else 0.0


def run_performance(run, weights: MetricWeights = MetricWeights()) -> float:
    return performance_score(exploration_coverage(run), food_efficiency(run), coordination_events(run), weights)


def window_performance(run, start: int, stop: int, weights: MetricWeights = MetricWeights()) -> float:
    """Performance accrued over steps ``[start, stop)``, normalized by the initial population."""
    s = run.series
    start = max(0, start)
    stop = min(stop, len(s["coverage"]))
    if stop <= start:
        return 0.0
    cov_before = s["coverage"][start - 1] if start > 0 else 0.0
    n = run.n_agents or 1
    return (
        weights.coverage * (s["coverage"][stop - 1] - cov_before)
        + weights.food * sum(s["food_collected"][start:stop]) / n
        + weights.coordination * sum(s["coordination_events"][start:stop]) / n
    )


def memory_quality(agents: Sequence, now: int) -> tuple[float, float]:
    """``(fresh_strong_fraction, efficiency)`` over all stores; zeros when memory is off or empty.

    An entry counts as useful once its owner has stood on its position after
    the entry was created (``MemoryEntry.used``); efficiency is the
    strength-weighted useful share.
    """
    total = fresh = 0
    mass = useful = 0.0
    for a in agents:
        if a.memory is None:
            continue
        for e in a.memory:
            total += 1
            if e.strength > FRESH_STRENGTH and now - e.created_at < FRESH_AGE:
                fresh += 1
            mass += e.strength
            if e.used:
                useful += e.strength
    if total == 0:
        return 0.0, 0.0
    return fresh / total, (useful / mass if mass > 0 else 0.0)


def memory_efficiency(strengths: Sequence[float], utilities: Sequence[float]) -> float:
    mass = sum(strengths)
    if mass <= 0:
        return 0.0
    return sum(s * u for s, u in zip(strengths, utilities)) / mass


def entropy(probabilities: Sequence[float]) -> float:
    return -sum(p * math.log(p) for p in probabilities if p > 0)


def information_entropy(agents: Sequence) -> float:
    """Entropy of who holds unique information.

    Agent ``i`` is weighted by one plus the number of positions in its memory
    that no other agent remembers; the weights are normalized to a
    distribution. Bounded by ``[0, log k]`` for ``k`` agents with memory.
    """
    holders = [a for a in agents if a.memory is not None]
    k = len(holders)
    if k <= 1:
        return 0.0
    position_sets = [a.memory.positions() for a in holders]
    counts: Counter = Counter()
    for ps in position_sets:
        counts.update(ps)
    unique = {p for p, n in counts.items() if n == 1}
    weights = [1 + len(ps & unique) for ps in position_sets]
    total = sum(weights)
    return entropy([w / total for w in weights])
