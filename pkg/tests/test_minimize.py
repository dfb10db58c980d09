import numpy as np
import pytest

from elastica.errors import MaxIterations
from elastica.field import ThetaField, uniform_grid
from elastica.minimize import (DescentParams, coil_profile, descend, discrete_energy, l2_gradient,
                               minimize_energy)
from elastica.ode_ivp import residual
from elastica.shooting import BranchLabel, solve_all


def _zero(n=2048):
    g = uniform_grid(n)
    return ThetaField(g, np.zeros(n + 1), np.zeros(n + 1), 0.0)


def _primary(b):
    return next(s for s in solve_all(b) if s.branch_label is BranchLabel.PRIMARY)


@pytest.fixture(scope="module")
def from_zero():
    return {b: descend(b, _zero()) for b in (1.0, 5.0, 20.0, 60.0)}


class TestCoilProfile:
    def test_values(self):
        coil = coil_profile(0.1, 2000)
        assert coil.at(0.05) == pytest.approx(-0.75 * np.pi, abs=1e-12)
        assert coil.at(0.5) == pytest.approx(-1.5 * np.pi, abs=1e-12)
        assert coil.theta[0] == 0.0

    def test_full_ramp(self):
        coil = coil_profile(1.0, 64)
        np.testing.assert_allclose(coil.theta, -1.5 * np.pi * coil.grid, atol=1e-14)

    @pytest.mark.parametrize("R", [0.0, -0.2, 1.5])
    def test_rejects_extent(self, R):
        with pytest.raises(ValueError):
            coil_profile(R)


class TestDescent:
    @pytest.mark.parametrize("b", [1.0, 5.0, 20.0, 60.0])
    def test_lands_on_primary(self, from_zero, b):
        res = from_zero[b]
        ref = _primary(b)
        assert np.max(np.abs(res.field.theta - ref.field.theta)) < 1e-4
        assert res.grad_norm < 1e-8

    @pytest.mark.parametrize("b", [1.0, 5.0, 20.0, 60.0])
    def test_energy_nonincreasing(self, from_zero, b):
        e = from_zero[b].energies
        assert np.all(np.diff(e) <= 0.0)
        assert e[-1] == pytest.approx(discrete_energy(from_zero[b].field.theta, b), abs=1e-9)

    def test_natural_condition_emerges(self, from_zero):
        assert abs(from_zero[5.0].field.dtheta[-1]) < 1e-5

    @pytest.mark.parametrize("b", [1.0, 5.0])
    def test_residual_certificate_small_load(self, from_zero, b):
        assert np.max(residual(from_zero[b].field)) < 1e-6

    def test_residual_is_second_order(self):
        # the three-point scheme leaves an O(h^2) residual against the ODE
        coarse = np.max(residual(descend(60.0, _zero(512)).field))
        fine = np.max(residual(descend(60.0, _zero(1024)).field))
        assert 3.0 < coarse / fine < 5.0

    def test_grid_refinement(self):
        a = descend(20.0, _zero(1024)).field
        b = descend(20.0, _zero(2048)).field
        assert np.max(np.abs(a.theta - b.theta[::2])) < 2e-4

    def test_coil_reaches_curled(self, curled):
        got = minimize_energy(60.0, coil_profile(0.1))
        assert np.max(np.abs(got.theta - curled.field.theta)) < 1e-3
        assert np.all(np.diff(got.theta) <= 1e-8)

    def test_unloaded_random_start(self, rng):
        n = 256
        g = uniform_grid(n)
        theta = rng.uniform(-3.0, 3.0, n + 1)
        theta[0] = 0.0
        res = descend(0.0, ThetaField(g, theta, np.zeros(n + 1), 0.0))
        assert np.max(np.abs(res.field.theta)) < 1e-8
        assert abs(res.energies[-1]) < 1e-12

    def test_plain_metric(self):
        res = descend(5.0, _zero(64), DescentParams(method="plain", gtol=1e-5, max_iter=50000))
        assert np.all(np.diff(res.energies) <= 0.0)
        assert np.max(np.abs(l2_gradient(res.field.theta, 5.0))) < 1e-5
        sob = descend(5.0, _zero(64)).field
        assert np.max(np.abs(res.field.theta - sob.theta)) < 1e-5

    def test_max_iterations(self):
        with pytest.raises(MaxIterations) as err:
            descend(60.0, _zero(), DescentParams(max_iter=1))
        assert err.value.grad_norm > 1e-8

    def test_rejects_unclamped(self):
        class Loose:
            grid = uniform_grid(64)
            theta = np.ones(65)
        bad = Loose()
        with pytest.raises(ValueError):
            descend(1.0, bad)

    def test_rejects_negative_load(self):
        with pytest.raises(ValueError):
            descend(-1.0, _zero(64))

    @pytest.mark.parametrize("kw", [dict(gtol=0.0), dict(max_iter=0), dict(shrink=1.0),
                                    dict(c1=0.0), dict(max_move=0.0), dict(method="newton")])
    def test_params_validation(self, kw):
        with pytest.raises(ValueError):
            DescentParams(**kw)
