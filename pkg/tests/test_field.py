"""Radial-structure operator: flux, V-map, truncation, monotonicity bands."""

import numpy as np
import pytest

from potlab.errors import ParameterError
from potlab.field import (
    OperatorSpec,
    apply_A,
    apply_V,
    monotonicity_band_sample,
    monotonicity_gap,
    truncate,
    truncate_jacobian,
)
from potlab.measure import CoefficientField
from potlab.young import YoungFunction


def cubic_spec(**kw):
    return OperatorSpec(YoungFunction.power(3.0), **kw)


class TestFlux:
    def test_cubic_flux_factor(self):
        # g(t) = 3 t^2, so the radial factor at |xi| = 2 is 3 * 4 / 2 = 6.
        A = apply_A(cubic_spec(), (0.0, 0.0), np.array([2.0, 0.0]))
        np.testing.assert_allclose(A, [12.0, 0.0], rtol=1e-12)

    def test_zero_maps_to_zero(self):
        A = apply_A(cubic_spec(), (0.0, 0.0), np.zeros(2))
        np.testing.assert_allclose(A, [0.0, 0.0])

    def test_weight_multiplies_the_flux(self):
        spec = cubic_spec(a=CoefficientField.constant(2.0))
        A = apply_A(spec, (0.3, 0.4), np.array([2.0, 0.0]))
        np.testing.assert_allclose(A, [24.0, 0.0], rtol=1e-12)

    def test_pointwise_weight_batches(self):
        spec = cubic_spec(a=CoefficientField.sinusoidal(1.0, 0.5))
        x = np.array([[0.1, 0.2], [0.7, 0.9]])
        xi = np.array([[1.0, 0.0], [0.0, 2.0]])
        A = apply_A(spec, x, xi)
        w = spec.a(x)
        np.testing.assert_allclose(A[0], w[0] * 3.0 * np.array([1.0, 0.0]), rtol=1e-12)
        np.testing.assert_allclose(A[1], w[1] * 6.0 * np.array([0.0, 2.0]), rtol=1e-12)

    def test_rotation_equivariance(self):
        rng = np.random.default_rng(3)
        Q, _ = np.linalg.qr(rng.normal(size=(4, 4)))
        spec = OperatorSpec(YoungFunction.zygmund(3.0, 1.0), m=2)
        xi = rng.normal(size=(10, 4))
        left = apply_A(spec, (0.0, 0.0), xi @ Q.T)
        right = apply_A(spec, (0.0, 0.0), xi) @ Q.T
        np.testing.assert_allclose(left, right, rtol=1e-10, atol=1e-12)


class TestVMap:
    def test_squared_norm_identity(self):
        F = YoungFunction.power(3.0)
        xi = np.array([[2.0, 0.0], [0.3, -0.4], [0.0, 0.0]])
        V = apply_V(F, xi)
        norms = np.sqrt(np.sum(xi**2, axis=-1))
        np.testing.assert_allclose(np.sum(V**2, axis=-1), F.g(norms) * norms,
                                   rtol=1e-12, atol=1e-300)

    def test_quadratic_v_map_is_linear(self):
        F = YoungFunction.power(2.0)
        xi = np.array([[1.5, -2.0]])
        np.testing.assert_allclose(apply_V(F, xi), np.sqrt(2.0) * xi, rtol=1e-9)


class TestTruncation:
    def test_clamps_to_the_sphere(self):
        np.testing.assert_allclose(truncate(np.array([3.0, 4.0]), 1.0), [0.6, 0.8],
                                   rtol=1e-12)

    def test_inside_values_pass_through(self):
        u = np.array([[0.1, -0.2], [0.0, 0.0]])
        np.testing.assert_allclose(truncate(u, 1.0), u)

    def test_level_must_be_positive(self):
        with pytest.raises(ParameterError):
            truncate(np.array([1.0]), 0.0)

    def test_jacobian_matches_finite_differences(self):
        u = np.array([3.0, 4.0])
        k, h = 1.0, 1e-6
        J = truncate_jacobian(u, k)
        for j in range(2):
            e = np.zeros(2)
            e[j] = h
            fd = (truncate(u + e, k) - truncate(u - e, k)) / (2.0 * h)
            np.testing.assert_allclose(J[:, j], fd, atol=1e-6)

    def test_jacobian_is_identity_inside(self):
        J = truncate_jacobian(np.array([[0.1, 0.2], [5.0, 0.0]]), 1.0)
        np.testing.assert_allclose(J[0], np.eye(2))
        np.testing.assert_allclose(J[1], np.array([[0.0, 0.0], [0.0, 0.2]]), atol=1e-15)


class TestMonotonicity:
    def test_quadratic_growth_collapses_the_band(self):
        spec = OperatorSpec(YoungFunction.power(2.0))
        rng = np.random.default_rng(5)
        xi = rng.normal(size=(50, 2))
        eta = rng.normal(size=(50, 2))
        gaps = monotonicity_gap(spec, (0.0, 0.0), xi, eta)
        diff2 = np.sum((xi - eta) ** 2, axis=-1)
        np.testing.assert_allclose(gaps["lhs"], 2.0 * diff2, rtol=1e-9)
        np.testing.assert_allclose(gaps["coercive"], 2.0 * diff2, rtol=1e-9)
        np.testing.assert_allclose(gaps["v_gap"], 2.0 * diff2, rtol=1e-9)

    def test_pairing_is_nonnegative(self):
        spec = OperatorSpec(YoungFunction.zygmund(2.0, 1.0))
        rng = np.random.default_rng(9)
        xi = 10.0 * rng.normal(size=(200, 2))
        eta = 0.01 * rng.normal(size=(200, 2))
        gaps = monotonicity_gap(spec, (0.5, 0.5), xi, eta)
        assert np.all(gaps["lhs"] >= 0.0)

    def test_band_sample_stays_bounded(self):
        spec = cubic_spec()
        out = monotonicity_band_sample(spec, np.random.default_rng(1), pairs=5000)
        assert out["pairs"] == 5000
        lo, hi = out["lhs_over_coercive"]
        assert lo > 0.0 and np.isfinite(hi)
        assert out["coercive_band"] < 50.0
        assert out["vgap_band"] < 50.0
