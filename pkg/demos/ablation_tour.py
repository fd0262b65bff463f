"""Run each ablation preset over a handful of seeds and compare the headline metrics.

    python demos/ablation_tour.py [runs]
"""

from __future__ import annotations

import sys

from stigmem import experiments
from stigmem.stats import welch_t


def main(runs: int = 10) -> None:
    batches = experiments.baseline(runs=runs)
    print(f"{'configuration':18s} {'perf':>8s} {'food/agent':>10s} {'coverage':>8s} {'coord':>6s}")
    for row in experiments.summary_rows(batches):
        print(
            f"{row['configuration']:18s} {row['performance_mean']:8.1f} {row['food_efficiency_mean']:10.2f}"
            f" {row['exploration_coverage_mean']:8.3f} {row['coordination_events_mean']:6.1f}"
        )
    by_name = {b.name: b for b in batches}
    for a, b in [("memory_no_traces", "no_memory"), ("traces_only", "no_memory"), ("full_memory", "memory_no_traces")]:
        r = welch_t(by_name[a].column("performance"), by_name[b].column("performance"))
        print(f"{a} vs {b}: t = {r.t:+.2f}, p = {r.p:.3g}")


if __name__ == "__main__":
    main(int(sys.argv[1]) if len(sys.argv) > 1 else 10)
