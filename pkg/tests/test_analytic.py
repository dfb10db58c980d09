import numpy as np
import pytest

from elastica.analytic import apply_T, picard_solve, small_b_profile
from elastica.errors import NoConvergence
from elastica.field import ThetaField, uniform_grid
from elastica.ode_ivp import IvpControl, integrate_ivp
from elastica.shooting import scan_roots, solve_all

from oracles import bsmall


def _field(theta, n=2048):
    g = uniform_grid(n)
    return ThetaField(g, theta(g) if callable(theta) else theta, np.zeros(n + 1))


def _random_field(rng, n=512):
    g = uniform_grid(n)
    coeffs = rng.normal(size=6) * 2
    theta = sum(c * np.sin((k + 0.5) * np.pi * g) for k, c in enumerate(coeffs))
    return ThetaField(g, theta, np.zeros(n + 1))


class TestApplyT:
    @pytest.mark.parametrize("b", [0.5, 6.0, 60.0])
    def test_zero_field_gives_cubic(self, b):
        out = apply_T(_field(lambda s: 0 * s), b)
        s = out.grid
        # symbolic double integral of (1 - t) over t in (sigma, 1), sigma in (0, s)
        exact = b * (s / 2 - s ** 2 / 2 + s ** 3 / 6)
        assert np.max(np.abs(out.theta - exact)) <= b * out.h ** 2
        assert out.theta[-1] == pytest.approx(b / 6, rel=1e-6)

    def test_zero_load(self, rng):
        out = apply_T(_random_field(rng), 0.0)
        assert np.all(out.theta == 0.0)

    def test_quarter_turn_field_is_unloaded(self):
        # only the clamped node keeps cos = 1; its half panel vanishes with h^2
        errs = []
        for n in (1024, 2048):
            out = apply_T(_field(lambda s: np.full_like(s, np.pi / 2), n), 60.0)
            errs.append(np.max(np.abs(out.theta)))
            assert errs[-1] <= 60.0 * out.h ** 2
        assert errs[0] / errs[1] == pytest.approx(4.0, rel=1e-6)

    def test_boundary_conditions_by_construction(self, rng):
        for _ in range(20):
            out = apply_T(_random_field(rng), rng.uniform(0, 50))
            assert out.theta[0] == 0.0
            assert out.dtheta[-1] == 0.0

    def test_contraction_constant(self, rng):
        for _ in range(200):
            b = rng.uniform(0, 6)
            f1, f2 = _random_field(rng), _random_field(rng)
            lhs = np.max(np.abs(apply_T(f1, b).theta - apply_T(f2, b).theta))
            dist = np.max(np.abs(f1.theta - f2.theta))
            # the discrete operator's constant is b (1/6 + h^2/12)
            assert lhs <= b * (1 / 6 + f1.h ** 2 / 12) * dist + 1e-15


class TestPicard:
    def test_zero_load_one_iteration(self):
        f = picard_solve(0.0, tol=1e-12, max_iter=1)
        assert np.all(f.theta == 0.0)

    def test_small_load_close_to_linearization(self):
        f = picard_solve(0.1, 1e-10)
        assert np.max(np.abs(f.theta - bsmall(f.grid, 0.1))) <= 3e-4

    def test_converges_below_six(self):
        f = picard_solve(5.9, 1e-8)
        assert f.dtheta[-1] == 0.0

    def test_large_load_does_not_converge(self):
        # outcome recorded: the iteration diverges at b = 60 within the default budget
        with pytest.raises(NoConvergence) as info:
            picard_solve(60.0)
        assert info.value.max_iter == 200

    @pytest.mark.parametrize("b", [0.5, 2.0, 5.0])
    def test_agrees_with_shooting(self, b):
        sols = solve_all(b)
        assert len(sols) == 1
        f = picard_solve(b)
        assert np.max(np.abs(f.theta - sols[0].field.theta)) <= 1e-6
        assert len(scan_roots(b)) == 1

    @pytest.mark.parametrize("b", [0.5, 5.0])
    def test_matched_slope_gap_is_quadrature_error(self, b):
        # gap to the IVP at K = theta'(0) shrinks fourfold per grid doubling
        gaps = []
        for n in (1024, 2048, 4096):
            f = picard_solve(b, n=n)
            r = integrate_ivp(b, f.dtheta[0], IvpControl(grid_n=n))
            gaps.append(np.max(np.abs(f.theta - r.field.theta)))
        assert 3.5 < gaps[0] / gaps[1] < 4.5 and 3.5 < gaps[1] / gaps[2] < 4.5

    def test_rejects_bad_arguments(self):
        with pytest.raises(ValueError):
            picard_solve(-1.0)
        with pytest.raises(ValueError):
            picard_solve(1.0, tol=0.0)


class TestSmallB:
    def test_values(self):
        f = small_b_profile(6.0)
        assert f.theta[-1] == pytest.approx(1.0, abs=1e-15)
        assert small_b_profile(0.1).dtheta[0] == pytest.approx(0.05, abs=1e-15)
        assert small_b_profile(6.0).dtheta[-1] == 0.0
        assert np.all(small_b_profile(0.0).theta == 0.0)

    def test_linearization_error_is_cubic(self):
        ratios = []
        for b in (0.4, 0.2, 0.1, 0.05):
            sol = solve_all(b)[0]
            ratios.append(np.max(np.abs(sol.field.theta - small_b_profile(b).theta)) / b ** 3)
        assert max(ratios) < 2 * min(ratios)
        assert max(ratios) < 0.1
