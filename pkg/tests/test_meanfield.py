from __future__ import annotations

import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from stigmem.meanfield import (
    IntegrationError,
    MeanFieldParams,
    critical_density,
    critical_density_bisect,
    curve_csv,
    integrate_meanfield,
    jacobian,
    jacobian_eigenvalues,
    linear_solution,
    order_parameter_curve,
)

DEFAULTS = MeanFieldParams()
RHO_C = critical_density(DEFAULTS)

params_st = st.builds(
    MeanFieldParams,
    alpha=st.floats(0.005, 0.5),
    beta=st.floats(0.1, 3.0),
    mu=st.floats(0.05, 2.0),
    mean_degree=st.floats(1.0, 10.0),
    chi=st.floats(0.2, 3.0),
    kappa=st.floats(0.2, 3.0),
)


class TestParams:
    def test_defaults(self):
        p = DEFAULTS
        assert (p.alpha, p.beta, p.mu, p.mean_degree, p.chi, p.kappa) == (0.025, 1.0, 0.2, 3.5, 1.0, 1.0)

    @pytest.mark.parametrize("field", ["alpha", "beta", "mu", "mean_degree", "chi", "kappa"])
    @pytest.mark.parametrize("value", [0.0, -1.0, math.inf, math.nan])
    def test_rejects_non_positive(self, field, value):
        with pytest.raises(ValueError):
            MeanFieldParams(**{field: value})


class TestCriticalDensity:
    def test_default_ratio(self):
        # mu / (alpha * k) = 0.20 / 0.0875
        assert RHO_C == pytest.approx(0.20 / (0.025 * 3.5), rel=1e-15)
        assert RHO_C == pytest.approx(2.2857142857142856, rel=1e-15)

    def test_unit_ratio(self):
        assert critical_density(MeanFieldParams(alpha=0.05, mean_degree=4.0, mu=0.2)) == pytest.approx(1.0)

    def test_linear_in_mu(self):
        assert critical_density(MeanFieldParams(mu=0.4)) == pytest.approx(2 * RHO_C)

    def test_bisection_agrees(self):
        assert abs(critical_density_bisect(DEFAULTS) - RHO_C) < 1e-9


@settings(max_examples=80, deadline=None)
@given(p=params_st)
def test_closed_form_is_unique_root(p):
    rc = critical_density(p)
    assert abs(critical_density_bisect(p) - rc) <= 1e-9 * max(1.0, rc)
    assert jacobian_eigenvalues(p, 0.5 * rc)[0] < 0 < jacobian_eigenvalues(p, 1.5 * rc)[0]


class TestEigenvalues:
    def test_marginal(self):
        assert abs(jacobian_eigenvalues(DEFAULTS, RHO_C)[0]) < 1e-12

    def test_zero_density_roots(self):
        assert jacobian_eigenvalues(DEFAULTS, 0.0) == pytest.approx((-0.2, -1.0))

    def test_supercritical(self):
        assert jacobian_eigenvalues(DEFAULTS, 2 * RHO_C)[0] > 0

    def test_negative_density_rejected(self):
        with pytest.raises(ValueError):
            jacobian_eigenvalues(DEFAULTS, -0.1)

    def test_match_numpy(self):
        for rho in (0.0, 1.0, RHO_C, 7.5):
            ref = sorted(np.linalg.eigvals(jacobian(DEFAULTS, rho)).real, reverse=True)
            assert jacobian_eigenvalues(DEFAULTS, rho) == pytest.approx(ref, abs=1e-12)


@settings(max_examples=100, deadline=None)
@given(p=params_st, rho=st.floats(0, 50))
def test_vieta(p, rho):
    lp, lm = jacobian_eigenvalues(p, rho)
    assert lp >= lm
    assert lp * lm == pytest.approx(p.beta * p.mu - p.coupling * rho, rel=1e-10, abs=1e-10)
    assert lp + lm == pytest.approx(-(p.beta + p.mu), rel=1e-10, abs=1e-10)


class TestIntegration:
    def test_zero_fixed_point(self):
        tr = integrate_meanfield(DEFAULTS, 3.0, 0.0, 0.0, 10.0)
        assert not tr.state().any()

    def test_subcritical_decays(self):
        tr = integrate_meanfield(DEFAULTS, 0.5 * RHO_C, 1.0, 1.0, 200.0)
        norms = np.linalg.norm(tr.state(), axis=1)
        assert norms[-1] < 1e-3 * norms[0]

    def test_supercritical_exponent(self):
        rho = 2 * RHO_C
        tr = integrate_meanfield(DEFAULTS, rho, 1.0, 0.5, 50.0)
        late = tr.t > 25
        slope = np.polyfit(tr.t[late], np.log(np.linalg.norm(tr.state()[late], axis=1)), 1)[0]
        assert slope == pytest.approx(jacobian_eigenvalues(DEFAULTS, rho)[0], rel=0.01)

    @pytest.mark.parametrize("rho_factor", [0.5, 1.0, 2.0])
    def test_matches_matrix_exponential(self, rho_factor):
        rho = rho_factor * RHO_C
        tr = integrate_meanfield(DEFAULTS, rho, 0.8, 0.3, 50.0, dt=0.01)
        exact = linear_solution(DEFAULTS, rho, 0.8, 0.3, tr.t[::100]).state()
        got = tr.state()[::100]
        rel = np.linalg.norm(got - exact, axis=1) / np.linalg.norm(exact, axis=1)
        assert rel.max() < 1e-6

    def test_step_count(self):
        tr = integrate_meanfield(DEFAULTS, 1.0, 1.0, 0.0, 1.0, dt=0.1)
        assert len(tr.t) == 11 and tr.t[-1] == pytest.approx(1.0)

    def test_overflow_reports_step(self):
        huge = MeanFieldParams(alpha=1e3, mean_degree=1e3)
        with pytest.raises(IntegrationError, match="step"):
            integrate_meanfield(huge, 1e3, 1.0, 1.0, 100.0, dt=0.1)

    @pytest.mark.parametrize("kw", [dict(dt=0.0), dict(t_end=-1.0), dict(M0=-1.0)])
    def test_bad_arguments(self, kw):
        args = dict(p=DEFAULTS, rho=1.0, M0=1.0, T0=1.0, t_end=1.0, dt=0.01) | kw
        with pytest.raises(ValueError):
            integrate_meanfield(**args)


class TestOrderParameterCurve:
    def test_subcritical_grid_is_zero(self):
        assert [v for _, v in order_parameter_curve(DEFAULTS, [0.1, 0.5, 1.0, 2.0])] == [0, 0, 0, 0]

    def test_zero_at_critical(self):
        curve = dict(order_parameter_curve(DEFAULTS, [RHO_C, 2 * RHO_C]))
        assert curve[RHO_C] == 0 and curve[2 * RHO_C] == 1.0

    def test_empty_grid(self):
        with pytest.raises(ValueError):
            order_parameter_curve(DEFAULTS, [])

    def test_csv_header_and_no_negative_zero(self):
        text = curve_csv(DEFAULTS, np.linspace(0, 2 * RHO_C, 5))
        assert text.splitlines()[0] == "rho,lambda_plus,lambda_minus,order_parameter"
        assert "-0.0," not in text


@settings(max_examples=60, deadline=None)
@given(p=params_st, grid=st.lists(st.floats(0, 20), min_size=1, max_size=30))
def test_curve_monotone_and_bounded(p, grid):
    values = [v for _, v in order_parameter_curve(p, sorted(grid))]
    assert all(0.0 <= v <= 1.0 + 1e-12 for v in values)
    assert all(b >= a - 1e-12 for a, b in zip(values, values[1:]))
