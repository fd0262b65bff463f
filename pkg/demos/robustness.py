"""Knock the collective over three ways and watch how much performance survives.

    python demos/robustness.py
"""

from __future__ import annotations

from stigmem import experiments

SCENARIOS = [
    ("trace_corruption", 7, 0.5),
    ("agent_failure", 12, 0.167),
    ("dynamic_food", 7, 0.0),
]


def main(runs: int = 20) -> None:
    for scenario, agents, fraction in SCENARIOS:
        rows = experiments.robustness(scenario, "full_memory", agents, fraction, runs=runs)
        m = experiments.mean_resilience(rows)
        print(f"{scenario:17s} agents={agents:2d} fraction={fraction:<5} resilience={m:.3f}")


if __name__ == "__main__":
    main()
