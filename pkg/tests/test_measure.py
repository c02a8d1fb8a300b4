"""Measures: ball masses, growth checks, mollification, coefficient fields."""

import math

import numpy as np
import pytest

from potlab.errors import ParameterError, ValidationError
from potlab.measure import (
    AtomsMeasure,
    CoefficientField,
    GridDensityMeasure,
    GridSpec,
    RadialProfileMeasure,
    bump_peak,
    check_morrey,
    mollify,
)
from potlab.young import YoungFunction


def lens_area(R: float, r: float, d: float) -> float:
    """Area of the intersection of two disks (radii R, r, center gap d)."""
    if d >= R + r:
        return 0.0
    if d <= abs(R - r):
        return math.pi * min(R, r) ** 2
    a = r**2 * math.acos((d**2 + r**2 - R**2) / (2 * d * r))
    b = R**2 * math.acos((d**2 + R**2 - r**2) / (2 * d * R))
    c = 0.5 * math.sqrt((-d + r + R) * (d + r - R) * (d - r + R) * (d + r + R))
    return a + b - c


class TestAtoms:
    def test_closed_ball_counts_boundary_atom(self):
        M = AtomsMeasure([[0.0, 0.0], [1.0, 0.0]], [2.0, 3.0])
        assert M.ball_mass((0.0, 0.0), 1.0) == 5.0
        assert M.ball_mass((0.0, 0.0), 0.999) == 2.0
        assert M.total_variation() == 5.0

    def test_vector_weights_use_euclidean_norm(self):
        M = AtomsMeasure([[0.0, 0.0]], [[3.0, 4.0]])
        assert M.ball_mass((0.0, 0.0), 0.1) == pytest.approx(5.0)
        assert M.components == 2

    def test_negative_radius_rejected(self):
        M = AtomsMeasure([[0.0, 0.0]], [1.0])
        with pytest.raises(ParameterError):
            M.ball_mass((0.0, 0.0), -0.1)


class TestGridDensity:
    def test_uniform_ball_mass_matches_disk_area(self):
        grid = GridSpec(0.0, 1.0, 0.0, 1.0, 64, 64)
        M = GridDensityMeasure(grid, np.ones((64, 64)))
        got = M.ball_mass((0.5, 0.5), 0.25)
        assert got == pytest.approx(math.pi / 16.0, rel=5e-3)

    def test_ball_containing_domain_gives_total_variation(self):
        grid = GridSpec(0.0, 1.0, 0.0, 1.0, 32, 32)
        M = GridDensityMeasure(grid, 2.0 * np.ones((32, 32)))
        assert M.ball_mass((0.5, 0.5), 2.0) == pytest.approx(2.0)
        assert M.total_variation() == pytest.approx(2.0)

    def test_subdivision_tightens_the_boundary_band(self):
        grid = GridSpec(0.0, 1.0, 0.0, 1.0, 32, 32)
        M = GridDensityMeasure(grid, np.ones((32, 32)))
        exact = math.pi / 16.0
        coarse = abs(M.ball_mass((0.5, 0.5), 0.25, subdivisions=0) - exact)
        fine = abs(M.ball_mass((0.5, 0.5), 0.25, subdivisions=3) - exact)
        assert fine < coarse

    def test_density_lookup_inside_and_outside(self):
        grid = GridSpec(0.0, 1.0, 0.0, 1.0, 4, 4)
        vals = np.arange(16.0).reshape(4, 4)
        M = GridDensityMeasure(grid, vals)
        got = M.density_at([[0.1, 0.1], [0.9, 0.9], [1.5, 0.5]])
        assert got[0, 0] == 0.0
        assert got[1, 0] == 15.0
        assert got[2, 0] == 0.0

    def test_csv_roundtrip(self, tmp_path):
        grid = GridSpec(-1.0, 1.0, 0.0, 0.5, 3, 2)
        rng = np.random.default_rng(7)
        M = GridDensityMeasure(grid, rng.uniform(0, 1, (2, 3, 2)))
        path = tmp_path / "density.csv"
        M.to_csv(path)
        back = GridDensityMeasure.from_csv(path)
        np.testing.assert_allclose(back.values, M.values, rtol=1e-12)
        assert back.grid == M.grid

    def test_shape_mismatch_rejected(self):
        with pytest.raises(ParameterError):
            GridDensityMeasure(GridSpec(0, 1, 0, 1, 4, 4), np.ones((3, 4)))


class TestRadialProfile:
    def test_uniform_disk_total_and_centered_ball(self):
        M = RadialProfileMeasure((0.0, 0.0), lambda s: np.ones_like(s), 1.0)
        assert M.total_variation() == pytest.approx(math.pi, rel=1e-6)
        assert M.ball_mass((0.0, 0.0), 0.5) == pytest.approx(math.pi / 4.0, rel=1e-6)

    def test_off_center_ball_inside_support(self):
        M = RadialProfileMeasure((0.0, 0.0), lambda s: np.ones_like(s), 1.0)
        got = M.ball_mass((0.3, 0.0), 0.2)
        assert got == pytest.approx(math.pi * 0.04, rel=1e-4)

    def test_off_center_ball_covering_the_center(self):
        M = RadialProfileMeasure((0.0, 0.0), lambda s: np.ones_like(s), 1.0)
        got = M.ball_mass((0.1, 0.0), 0.5)
        assert got == pytest.approx(math.pi * 0.25, rel=1e-4)

    def test_ball_poking_outside_support_matches_lens_area(self):
        M = RadialProfileMeasure((0.0, 0.0), lambda s: np.ones_like(s), 1.0)
        got = M.ball_mass((0.9, 0.0), 0.5)
        assert got == pytest.approx(lens_area(1.0, 0.5, 0.9), rel=1e-4)

    def test_integrable_singularity_at_the_center(self):
        M = RadialProfileMeasure((0.0, 0.0), lambda s: 1.0 / np.sqrt(s), 1.0)
        # integral of 2 pi s * s^{-1/2} ds = (4 pi / 3) r^{3/2}
        assert M.ball_mass((0.0, 0.0), 0.25) == pytest.approx(
            4.0 * math.pi / 3.0 * 0.25**1.5, rel=1e-5
        )

    def test_vector_direction_is_normalized(self):
        M = RadialProfileMeasure((0.0, 0.0), lambda s: np.ones_like(s), 1.0,
                                 direction=[3.0, 4.0])
        vec = M.density_vector_at([[0.1, 0.0]])
        assert np.hypot(*vec[0]) == pytest.approx(1.0)
        assert M.components == 2


class TestGrowthCheck:
    def test_point_mass_ratio_is_flat_for_cubic_growth(self):
        F = YoungFunction.power(3.0)
        M = AtomsMeasure([[0.0, 0.0]], [1.0])
        radii = np.geomspace(1e-3, 0.5, 12)
        rep = check_morrey(M, F, theta=0.5, radii=radii, centers=[[0.0, 0.0]])
        assert rep.verdict == "bounded"
        assert rep.fitted_constant == pytest.approx(1.0 / 3.0, rel=1e-12)

    def test_point_mass_escapes_quadratic_growth(self):
        F = YoungFunction.power(2.0)
        M = AtomsMeasure([[0.0, 0.0]], [1.0])
        radii = np.geomspace(1e-3, 0.5, 12)
        rep = check_morrey(M, F, theta=0.5, radii=radii, centers=[[0.0, 0.0]])
        assert rep.verdict == "growing"

    def test_radius_sweep_needs_two_points(self):
        F = YoungFunction.power(3.0)
        M = AtomsMeasure([[0.0, 0.0]], [1.0])
        with pytest.raises(ParameterError):
            check_morrey(M, F, theta=0.5, radii=[0.1], centers=[[0.0, 0.0]])


class TestMollify:
    def test_atom_mass_is_preserved_exactly(self):
        grid = GridSpec(0.0, 1.0, 0.0, 1.0, 96, 96)
        M = AtomsMeasure([[0.5, 0.5]], [1.0])
        smooth = mollify(M, 0.2, grid)
        assert abs(smooth.total_variation() - 1.0) < 1e-10

    def test_atom_peak_height_scales_like_inverse_width_squared(self):
        grid = GridSpec(0.0, 1.0, 0.0, 1.0, 192, 192)
        w = 0.2
        smooth = mollify(AtomsMeasure([[0.5, 0.5]], [1.0]), w, grid)
        assert smooth.values.max() == pytest.approx(bump_peak() / w**2, rel=5e-2)

    def test_grid_density_mass_is_preserved(self):
        grid = GridSpec(0.0, 1.0, 0.0, 1.0, 48, 48)
        src_vals = np.zeros((48, 48))
        src_vals[20:28, 20:28] = 3.0
        M = GridDensityMeasure(grid, src_vals)
        smooth = mollify(M, 0.15, grid)
        assert abs(smooth.total_variation() - M.total_variation()) < 1e-10

    def test_radial_profile_mass_is_preserved(self):
        grid = GridSpec(-1.0, 1.0, -1.0, 1.0, 64, 64)
        M = RadialProfileMeasure((0.0, 0.0), lambda s: np.ones_like(s), 0.5)
        smooth = mollify(M, 0.2, grid)
        assert abs(smooth.total_variation() - M.total_variation()) < 1e-8

    def test_width_larger_than_domain_is_rejected(self):
        grid = GridSpec(0.0, 1.0, 0.0, 1.0, 16, 16)
        with pytest.raises(ValidationError):
            mollify(AtomsMeasure([[0.5, 0.5]], [1.0]), 1.5, grid)

    def test_vector_atom_keeps_componentwise_mass(self):
        grid = GridSpec(0.0, 1.0, 0.0, 1.0, 96, 96)
        M = AtomsMeasure([[0.5, 0.5]], [[0.6, -0.8]])
        smooth = mollify(M, 0.2, grid)
        comp = smooth.values.sum(axis=(0, 1)) * grid.cell_volume
        np.testing.assert_allclose(comp, [0.6, -0.8], atol=1e-10)


class TestCoefficientField:
    def test_constant_field(self):
        a = CoefficientField.constant(2.5)
        np.testing.assert_allclose(a([[0.0, 0.0], [3.0, -1.0]]), [2.5, 2.5])
        assert a.lower == a.upper == 2.5

    def test_sinusoidal_respects_bounds_and_modulus(self):
        a = CoefficientField.sinusoidal(1.0, 0.5, kx=2.0, ky=1.0)
        rng = np.random.default_rng(11)
        pts = rng.uniform(-2, 2, (500, 2))
        vals = a(pts)
        assert np.all(vals >= a.lower - 1e-12) and np.all(vals <= a.upper + 1e-12)
        assert a.check_modulus(rng, (-2, 2, -2, 2))

    def test_radial_bump_bounds(self):
        a = CoefficientField.radial_bump(1.0, 0.5, center=(0.0, 0.0), radius=0.5)
        assert a([[0.0, 0.0]])[0] == pytest.approx(1.5)
        assert a([[2.0, 0.0]])[0] == pytest.approx(1.0)

    def test_descriptor_roundtrip(self):
        a = CoefficientField.sinusoidal(1.0, 0.25, kx=3.0)
        b = CoefficientField.from_descriptor(a.to_descriptor())
        pts = [[0.3, 0.4], [-0.7, 0.1]]
        np.testing.assert_allclose(b(pts), a(pts), rtol=1e-12)

    def test_nonpositive_lower_bound_rejected(self):
        with pytest.raises(ParameterError):
            CoefficientField.sinusoidal(1.0, 1.0)
