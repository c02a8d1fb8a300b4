"""The radial-structure operator, its companion V-map, and truncations.

``apply_A`` evaluates A(x, xi) = a(x) g(|xi|) xi / |xi| on vectors with an
arbitrary trailing axis (a flattened m-by-n gradient works the same as a
scalar gradient — the operator only reads the Euclidean norm).  ``apply_V``
is the companion change of variables with |V(xi)|^2 = g(|xi|) |xi|, whose
squared increments are comparable to the monotonicity pairing.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import ParameterError
from .measure import CoefficientField
from .young import YoungFunction


@dataclass(frozen=True)
class OperatorSpec:
    """Growth function, scalar weight, space dimension n, target dimension m."""

    F: YoungFunction
    a: CoefficientField = field(default_factory=lambda: CoefficientField.constant(1.0))
    n: int = 2
    m: int = 1

    def __post_init__(self):
        if self.n != 2:
            raise ParameterError("only the planar case n = 2 is implemented")
        if self.m < 1:
            raise ParameterError("target dimension m must be >= 1")


def _norm_last(xi: np.ndarray) -> np.ndarray:
    return np.sqrt(np.sum(xi**2, axis=-1))


def radial_factor(F: YoungFunction, rho) -> np.ndarray:
    """g(rho) / rho with the continuous extension at rho = 0."""
    rho = np.asarray(rho, dtype=float)
    out = np.zeros_like(rho)
    pos = rho > 0
    out[pos] = F.g(rho[pos]) / rho[pos]
    if np.any(~pos):
        i_g, _ = F.indices()
        if i_g <= 2.0 + 1e-9:
            tiny = 1e-12
            out[~pos] = F.g(tiny) / tiny
    return out


def _weight_for(spec: OperatorSpec, x, shape: tuple) -> np.ndarray | float:
    """Coefficient values shaped to match a batch, or a plain float."""
    w = spec.a(np.atleast_2d(np.asarray(x, dtype=float)))
    return float(w[0]) if w.size == 1 else w.reshape(shape)


def apply_A(spec: OperatorSpec, x, xi) -> np.ndarray:
    """Flux a(x) g(|xi|) xi / |xi|; zero at xi = 0."""
    xi = np.asarray(xi, dtype=float)
    factor = radial_factor(spec.F, _norm_last(xi))
    weight = _weight_for(spec, x, xi.shape[:-1])
    return np.asarray(weight)[..., None] * factor[..., None] * xi


def apply_V(F: YoungFunction, xi) -> np.ndarray:
    """Companion map with |V(xi)|^2 = g(|xi|) |xi|."""
    xi = np.asarray(xi, dtype=float)
    return np.sqrt(radial_factor(F, _norm_last(xi)))[..., None] * xi


def truncate(u, k: float) -> np.ndarray:
    """Radial clamp of vector values to the closed ball of radius k."""
    if k <= 0:
        raise ParameterError("truncation level must be positive")
    u = np.asarray(u, dtype=float)
    norms = _norm_last(u)
    scale = np.where(norms > k, np.divide(k, norms, out=np.ones_like(norms),
                                          where=norms > 0), 1.0)
    return scale[..., None] * u


def truncate_jacobian(u, k: float) -> np.ndarray:
    """Derivative of the radial clamp at each value: (..., m, m) matrices.

    Identity inside the closed ball; (k/|u|)(I - uhat uhat^T) outside, so a
    chained gradient D(T_k u) = J(u) Du keeps only tangential variation.
    """
    if k <= 0:
        raise ParameterError("truncation level must be positive")
    u = np.asarray(u, dtype=float)
    m = u.shape[-1]
    norms = _norm_last(u)
    eye = np.broadcast_to(np.eye(m), u.shape[:-1] + (m, m)).copy()
    outside = norms > k
    if np.any(outside):
        uh = u[outside] / norms[outside][..., None]
        proj = np.eye(m)[None, :, :] - uh[:, :, None] * uh[:, None, :]
        eye[outside] = (k / norms[outside])[:, None, None] * proj
    return eye


def monotonicity_gap(spec: OperatorSpec, x, xi, eta) -> dict:
    """Pairing (A(x,xi) - A(x,eta)) . (xi - eta) and its comparison partners.

    Returns the pairing ``lhs``, the coercivity gauge
    ``coercive`` = a(x) g(|xi| + |eta|) |xi - eta|^2 / (|xi| + |eta|), and the
    squared V-increment ``v_gap`` = a(x) |V(xi) - V(eta)|^2.  For degenerate
    growth beyond quadratic all three vanish together at xi = eta = 0.
    """
    xi = np.asarray(xi, dtype=float)
    eta = np.asarray(eta, dtype=float)
    lhs = np.sum((apply_A(spec, x, xi) - apply_A(spec, x, eta)) * (xi - eta), axis=-1)
    sigma = _norm_last(xi) + _norm_last(eta)
    weight = _weight_for(spec, x, sigma.shape)
    diff2 = np.sum((xi - eta) ** 2, axis=-1)
    coercive = weight * radial_factor(spec.F, sigma) * diff2
    vg = np.sum((apply_V(spec.F, xi) - apply_V(spec.F, eta)) ** 2, axis=-1)
    return {"lhs": lhs, "coercive": coercive, "v_gap": weight * vg}


def monotonicity_band_sample(spec: OperatorSpec, rng: np.random.Generator,
                             pairs: int = 10_000, scale: float = 10.0) -> dict:
    """Sampled comparison ratios over random vector pairs (log-uniform sizes).

    Reports the extreme finite ratios lhs/coercive, lhs/v_gap and the band
    width (max over min) of each — the certified-structure check is that the
    bands stay bounded, uniformly in the pair.
    """
    d = spec.m * spec.n
    sizes = np.exp(rng.uniform(np.log(1e-4), np.log(scale), (pairs, 2)))
    xi = rng.normal(size=(pairs, d))
    eta = rng.normal(size=(pairs, d))
    xi *= (sizes[:, 0] / np.maximum(_norm_last(xi), 1e-300))[:, None]
    eta *= (sizes[:, 1] / np.maximum(_norm_last(eta), 1e-300))[:, None]
    x = rng.uniform(0.0, 1.0, (pairs, 2))
    gaps = monotonicity_gap(spec, x, xi, eta)
    ok = gaps["coercive"] > 0
    r1 = gaps["lhs"][ok] / gaps["coercive"][ok]
    r2 = gaps["lhs"][ok] / np.maximum(gaps["v_gap"][ok], 1e-300)
    return {
        "pairs": int(np.sum(ok)),
        "lhs_over_coercive": (float(np.min(r1)), float(np.max(r1))),
        "lhs_over_vgap": (float(np.min(r2)), float(np.max(r2))),
        "coercive_band": float(np.max(r1) / np.min(r1)),
        "vgap_band": float(np.max(r2) / np.min(r2)),
    }
