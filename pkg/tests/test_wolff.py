"""Potentials of measures: closed-form oracles, divergence, comparability."""

import math

import numpy as np
import pytest

from potlab.errors import ParameterError
from potlab.measure import AtomsMeasure, GridDensityMeasure, GridSpec, RadialProfileMeasure
from potlab.rearrange import RearrangementProfile
from potlab.wolff import (
    potential_shrink_profile,
    rearrangement_bound,
    wolff_dyadic_sum,
    wolff_potential,
)
from potlab.young import YoungFunction

DIRAC = AtomsMeasure([[0.0, 0.0]], [1.0])


class TestPointMassOracles:
    def test_cubic_growth_closed_form(self):
        # g^{-1}(1/r) = (3r)^{-1/2}, so the integral is 2 sqrt(R/3).
        F = YoungFunction.power(3.0)
        res = wolff_potential(F, DIRAC, (0.0, 0.0), 1.0)
        assert not res.divergent
        assert res.value == pytest.approx(2.0 / math.sqrt(3.0), abs=1e-6)

    def test_cubic_growth_other_radius(self):
        F = YoungFunction.power(3.0)
        res = wolff_potential(F, DIRAC, (0.0, 0.0), 0.25)
        assert res.value == pytest.approx(2.0 * math.sqrt(0.25 / 3.0), abs=1e-6)

    def test_quadratic_growth_diverges(self):
        F = YoungFunction.power(2.0)
        res = wolff_potential(F, DIRAC, (0.0, 0.0), 1.0)
        assert res.divergent
        with pytest.raises(ParameterError):
            res.require_finite()

    def test_far_base_point_sees_nothing(self):
        F = YoungFunction.power(3.0)
        res = wolff_potential(F, DIRAC, (5.0, 0.0), 1.0)
        assert res.value == 0.0 and not res.divergent

    def test_quartic_point_mass(self):
        # g = 4 t^3, g^{-1}(1/r) = (4r)^{-1/3}, integral = (3/2) (R^2/4)^{1/3}.
        F = YoungFunction.power(4.0)
        res = wolff_potential(F, DIRAC, (0.0, 0.0), 1.0)
        assert res.value == pytest.approx(1.5 * 0.25 ** (1.0 / 3.0), abs=1e-6)


class TestDyadicSum:
    def test_point_mass_series_closed_form(self):
        # Terms (R_k / 3)^{1/2} sum to sqrt(1/3) / (1 - 2^{-1/2}) at R = 1.
        F = YoungFunction.power(3.0)
        out = wolff_dyadic_sum(F, DIRAC, (0.0, 0.0), 1.0)
        expect = math.sqrt(1.0 / 3.0) / (1.0 - 2.0 ** (-0.5))
        assert not out["divergent"]
        assert out["value"] == pytest.approx(expect, rel=1e-9)

    def test_series_dominates_integral_within_doubling(self):
        F = YoungFunction.power(3.0)
        integral = wolff_potential(F, DIRAC, (0.0, 0.0), 1.0).value
        series = wolff_dyadic_sum(F, DIRAC, (0.0, 0.0), 1.0)["value"]
        assert integral <= series <= 2.0 * integral

    def test_series_flags_divergence(self):
        F = YoungFunction.power(2.0)
        assert wolff_dyadic_sum(F, DIRAC, (0.0, 0.0), 1.0)["divergent"]


class TestScaling:
    def test_mass_scaling_follows_inverse_homogeneity(self):
        # For G = t^p the potential of lam * delta is lam^{1/(p-1)} times that of delta.
        F = YoungFunction.power(3.0)
        lam = 7.0
        big = wolff_potential(F, AtomsMeasure([[0.0, 0.0]], [lam]), (0.0, 0.0), 1.0)
        base = wolff_potential(F, DIRAC, (0.0, 0.0), 1.0)
        assert big.value == pytest.approx(math.sqrt(lam) * base.value, rel=1e-9)

    def test_uniform_density_cross_check(self):
        # rho = 1 on the disk of radius 1: |mu|(B_r) = pi r^2, so the integrand
        # is g^{-1}(pi r) = sqrt(pi r / 3) and the integral is (2/3) sqrt(pi/3).
        F = YoungFunction.power(3.0)
        M = RadialProfileMeasure((0.0, 0.0), lambda s: np.ones_like(s), 1.0)
        res = wolff_potential(F, M, (0.0, 0.0), 1.0)
        assert res.value == pytest.approx(2.0 / 3.0 * math.sqrt(math.pi / 3.0), rel=1e-6)


class TestRearrangementBound:
    def test_bound_dominates_the_potential_for_grid_data(self):
        F = YoungFunction.power(3.0)
        grid = GridSpec(0.0, 1.0, 0.0, 1.0, 48, 48)
        rng = np.random.default_rng(2)
        M = GridDensityMeasure(grid, rng.uniform(0.0, 4.0, (48, 48)))
        prof = RearrangementProfile.from_cells(
            M.values.reshape(-1, 1), np.full(48 * 48, grid.cell_volume)
        )
        bound = rearrangement_bound(F, prof, 1.0).require_finite()
        X, Y = grid.centers()
        centers = np.column_stack([X.ravel()[::97], Y.ravel()[::97]])
        sup_w = max(wolff_potential(F, M, c, 1.0, levels=24).value for c in centers)
        assert sup_w <= 4.0 * bound  # structure constant is modest in the plane

    def test_bound_is_finite_for_a_step_profile(self):
        F = YoungFunction.power(3.0)
        prof = RearrangementProfile.from_cells([[3.0], [1.0]], [0.5, 0.5])
        res = rearrangement_bound(F, prof, 1.0)
        assert not res.divergent and res.value > 0.0

    def test_bad_radius_rejected(self):
        F = YoungFunction.power(3.0)
        prof = RearrangementProfile.from_cells([[1.0]], [1.0])
        with pytest.raises(ParameterError):
            rearrangement_bound(F, prof, 0.0)


class TestShrinkProfile:
    def test_point_mass_profile_follows_sqrt_radius(self):
        F = YoungFunction.power(3.0)
        rows = potential_shrink_profile(F, DIRAC, [[0.0, 0.0]], [0.4, 0.2, 0.1])
        sup = [r["sup_potential"] for r in rows]
        assert sup[0] > sup[1] > sup[2]
        assert sup[1] / sup[2] == pytest.approx(math.sqrt(2.0), rel=1e-6)

    def test_divergence_is_reported_per_radius(self):
        F = YoungFunction.power(2.0)
        rows = potential_shrink_profile(F, DIRAC, [[0.0, 0.0]], [0.2, 0.1])
        assert all(r["divergent"] for r in rows)
