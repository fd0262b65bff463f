"""Linear mean-field model of memory and trace densities.

The population-averaged memory density ``M`` and trace density ``T`` obey

    dM/dt = alpha * k * chi * T - beta * M
    dT/dt = rho * kappa * M - mu * T

for agent density ``rho``. The leading Jacobian eigenvalue changes sign at the
critical density, above which collective (trace-mediated) memory grows.
"""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass, fields

import numpy as np
from scipy.linalg import expm
from scipy.optimize import bisect


class IntegrationError(ArithmeticError):
    """Raised when the integrated state stops being finite."""


@dataclass(frozen=True)
class MeanFieldParams:
    """Rates of the linear system. ``beta``, ``chi`` and ``kappa`` are normalized to 1."""

    alpha: float = 0.025
    beta: float = 1.0
    mu: float = 0.20
    mean_degree: float = 3.5
    chi: float = 1.0
    kappa: float = 1.0

    def __post_init__(self) -> None:
        for f in fields(self):
            v = getattr(self, f.name)
            if not (math.isfinite(v) and v > 0):
                raise ValueError(f"{f.name} must be a positive finite number, got {v}")

    @property
    def coupling(self) -> float:
        """``alpha * k * chi * kappa``: the gain of the memory-trace feedback loop per unit density."""
        return self.alpha * self.mean_degree * self.chi * self.kappa


def critical_density(p: MeanFieldParams = MeanFieldParams()) -> float:
    """Density at which the leading eigenvalue is exactly zero: ``beta * mu / coupling``."""
    return p.beta * p.mu / p.coupling


def jacobian(p: MeanFieldParams, rho: float) -> np.ndarray:
    return np.array(
        [
            [-p.beta, p.alpha * p.mean_degree * p.chi],
            [rho * p.kappa, -p.mu],
        ]
    )


def jacobian_eigenvalues(p: MeanFieldParams, rho: float) -> tuple[float, float]:
    """``(lambda_plus, lambda_minus)`` of the Jacobian at density ``rho``.

    The discriminant ``(beta - mu)**2 + 4 * coupling * rho`` is positive, so
    both roots are real. ``lambda_minus`` is computed directly and
    ``lambda_plus`` from the product of roots, which keeps it accurate near
    the critical density where the direct formula cancels.
    """
    if rho < 0:
        raise ValueError(f"density must be non-negative, got {rho}")
    disc = (p.beta - p.mu) ** 2 + 4.0 * p.coupling * rho
    lam_minus = (-(p.beta + p.mu) - math.sqrt(disc)) / 2.0
    const = p.beta * p.mu - p.coupling * rho
    return const / lam_minus + 0.0, lam_minus  # + 0.0 turns -0.0 into 0.0


def critical_density_bisect(p: MeanFieldParams = MeanFieldParams(), xtol: float = 1e-13) -> float:
    """Root of ``lambda_plus(rho)`` found numerically, as a cross-check of the closed form."""
    hi = 1.0
    while jacobian_eigenvalues(p, hi)[0] <= 0:
        hi *= 2.0
    return bisect(lambda r: jacobian_eigenvalues(p, r)[0], 0.0, hi, xtol=xtol, rtol=4 * np.finfo(float).eps)


@dataclass(frozen=True)
class Trajectory:
    t: np.ndarray
    M: np.ndarray
    T: np.ndarray

    def state(self) -> np.ndarray:
        """``(n, 2)`` array of ``(M, T)`` rows."""
        return np.column_stack([self.M, self.T])


def integrate_meanfield(
    p: MeanFieldParams, rho: float, M0: float, T0: float, t_end: float, dt: float = 0.01
) -> Trajectory:
    """Fixed-step classical Runge-Kutta integration from ``t = 0`` to ``t_end``.

    The number of steps is ``round(t_end / dt)``; the last step lands on
    ``t_end`` exactly up to rounding of the step count.
    """
    if dt <= 0:
        raise ValueError(f"dt must be positive, got {dt}")
    if t_end < 0:
        raise ValueError(f"t_end must be non-negative, got {t_end}")
    if M0 < 0 or T0 < 0:
        raise ValueError("initial densities must be non-negative")
    J = jacobian(p, rho)
    n = int(round(t_end / dt))
    out = np.empty((n + 1, 2))
    x = np.array([M0, T0], dtype=float)
    out[0] = x
    # overflow is reported as IntegrationError below, not as a numpy warning
    with np.errstate(over="ignore", invalid="ignore"):
        for i in range(1, n + 1):
            k1 = J @ x
            k2 = J @ (x + 0.5 * dt * k1)
            k3 = J @ (x + 0.5 * dt * k2)
            k4 = J @ (x + dt * k3)
            x = x + (dt / 6.0) * (k1 + 2 * k2 + 2 * k3 + k4)
            if not np.all(np.isfinite(x)):
                raise IntegrationError(f"state became non-finite at step {i} (t = {i * dt:g}): {x}")
            out[i] = x
    t = np.arange(n + 1) * dt
    return Trajectory(t, out[:, 0], out[:, 1])


def linear_solution(p: MeanFieldParams, rho: float, M0: float, T0: float, times) -> Trajectory:
    """Exact solution ``x(t) = expm(J t) x0`` at the requested times."""
    J = jacobian(p, rho)
    x0 = np.array([M0, T0], dtype=float)
    times = np.asarray(times, dtype=float)
    states = np.array([expm(J * t) @ x0 for t in times]).reshape(len(times), 2)
    return Trajectory(times, states[:, 0], states[:, 1])


def order_parameter_curve(p: MeanFieldParams, rho_grid) -> list[tuple[float, float]]:
    """Theoretical order parameter over a density grid.

    Each value is ``max(lambda_plus, 0)`` divided by the same quantity at the
    largest density in the grid: zero at and below the critical density,
    rising to 1. An entirely subcritical grid yields all zeros.
    """
    rhos = [float(r) for r in rho_grid]
    if not rhos:
        raise ValueError("density grid must be non-empty")
    growth = [max(jacobian_eigenvalues(p, r)[0], 0.0) for r in rhos]
    top = max(0.0, jacobian_eigenvalues(p, max(rhos))[0])
    return [(r, g / top if top > 0 else 0.0) for r, g in zip(rhos, growth)]


def curve_table(p: MeanFieldParams, rho_grid) -> list[dict]:
    rows = []
    for rho, op in order_parameter_curve(p, rho_grid):
        lp, lm = jacobian_eigenvalues(p, rho)
        rows.append({"rho": rho, "lambda_plus": lp, "lambda_minus": lm, "order_parameter": op})
    return rows


def curve_csv(p: MeanFieldParams, rho_grid) -> str:
    buf = io.StringIO()
    w = csv.DictWriter(buf, fieldnames=["rho", "lambda_plus", "lambda_minus", "order_parameter"], lineterminator="\n")
    w.writeheader()
    for row in curve_table(p, rho_grid):
        w.writerow({k: repr(v) for k, v in row.items()})
    return buf.getvalue()
