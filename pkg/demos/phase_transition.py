"""Mean-field critical density next to the simulated coordination order parameter.

The linear model predicts where trace-mediated memory starts to grow; the
simulation shows how often memory agents step onto high-consensus cells as
the population gets denser.

    python demos/phase_transition.py
"""

from __future__ import annotations

from stigmem import experiments
from stigmem.meanfield import MeanFieldParams, critical_density, jacobian_eigenvalues, order_parameter_curve


def main() -> None:
    p = MeanFieldParams()
    rc = critical_density(p)
    print(f"critical density rho_c = {rc:.4f}")
    for rho, op in order_parameter_curve(p, [0.5 * rc, rc, 1.5 * rc, 2 * rc]):
        print(f"  rho = {rho:6.3f}  lambda+ = {jacobian_eigenvalues(p, rho)[0]:+.4f}  order = {op:.3f}")

    print("\nsimulated order parameter, full_memory on 15x15")
    rows = experiments.sweep([0.049, 0.102, 0.151, 0.200, 0.249], runs=5, configs=["full_memory"])
    for r in rows:
        print(f"  density {r['density']:.3f} ({r['n_agents']:2d} agents): {r['order_parameter_mean']:.3f}")


if __name__ == "__main__":
    main()
