"""Nonlinear potentials of measures: radial integral, dyadic series, bounds.

The potential is integral_0^R g^{-1}(|mu|(B_r(x)) / r^{n-1}) dr.  The dyadic
series over radii R_k = 2^{1-k} R is comparable to it (up to a doubling
factor), and for absolutely continuous data the whole family is dominated by
a rearrangement integral that no longer sees the base point.
"""

from __future__ import annotations

import math

import numpy as np

from .errors import ParameterError
from .quadrature import DyadicResult, dyadic_integral
from .rearrange import RearrangementProfile
from .young import YoungFunction


def wolff_potential(F: YoungFunction, M, x0, R: float, n: int = 2,
                    levels: int = 40, nodes: int = 8) -> DyadicResult:
    """Potential integral_0^R g^{-1}(|mu|(B_r(x0)) / r^{n-1}) dr.

    Divergence at the origin (for example a point mass under quadratic
    growth) is detected from the decay of the dyadic shell sums and reported
    on the result rather than raised.
    """
    if R <= 0:
        raise ParameterError("potential radius must be positive")
    x0 = np.asarray(x0, dtype=float)

    def integrand(r):
        r = np.asarray(r, dtype=float)
        masses = np.array([M.ball_mass(x0, float(ri)) for ri in r.ravel()])
        return np.asarray(F.g_inv(masses / r.ravel() ** (n - 1)), dtype=float).reshape(r.shape)

    out = dyadic_integral(integrand, R, levels=levels, nodes=nodes)
    out.metadata.update({"kind": "wolff", "R": R, "n": n})
    return out


def _geometric_tail(terms: np.ndarray, fit_window: int = 8) -> tuple[float, bool, float | None]:
    """Extrapolated remainder of a decaying series from its trailing terms."""
    window = terms[-fit_window:]
    positive = window > 0
    if int(np.count_nonzero(positive)) < 3:
        return (float(window[positive][-1]) if np.any(positive) else 0.0, False, None)
    ks = np.arange(window.size, dtype=float)[positive]
    slope = np.polyfit(ks, np.log(window[positive]), 1)[0]
    ratio = float(np.exp(slope))
    if ratio >= 1.0 - 1e-9:
        return 0.0, True, ratio
    return float(window[positive][-1]) * ratio / (1.0 - ratio), False, ratio


def wolff_dyadic_sum(F: YoungFunction, M, x0, R: float, n: int = 2,
                     levels: int = 40) -> dict:
    """Series sum_k R_k g^{-1}(|mu|(B_{R_k}(x0)) / R_k^{n-1}), R_k = 2^{1-k} R."""
    if R <= 0:
        raise ParameterError("potential radius must be positive")
    x0 = np.asarray(x0, dtype=float)
    radii = R * np.exp2(1.0 - np.arange(1, levels + 1, dtype=float))
    masses = np.array([M.ball_mass(x0, float(r)) for r in radii])
    terms = radii * np.asarray(F.g_inv(masses / radii ** (n - 1)), dtype=float)
    tail, divergent, ratio = _geometric_tail(terms)
    return {
        "value": float(np.sum(terms)) + tail,
        "divergent": divergent,
        "terms": terms,
        "radii": radii,
        "tail": tail,
        "decay_ratio": ratio,
    }


def rearrangement_bound(F: YoungFunction, profile: RearrangementProfile, R: float,
                        n: int = 2, levels: int = 48) -> DyadicResult:
    """Base-point-free majorant integral_0^{w_n R^n} t^{1/n} g^{-1}(t^{1/n} f**(t)) dt/t.

    ``profile`` is the rearrangement of the density; w_n is the unit-ball
    volume.  Finite output certifies a uniform bound on the potential at
    every base point (up to a structure constant fitted elsewhere).
    """
    if R <= 0:
        raise ParameterError("potential radius must be positive")
    if n != 2:
        raise ParameterError("only the planar case n = 2 is implemented")
    upper = math.pi * R**n

    def integrand(t):
        t = np.asarray(t, dtype=float)
        root = t ** (1.0 / n)
        return root / t * np.asarray(F.g_inv(root * profile.fstarstar(t)), dtype=float)

    edges = profile.edges[(profile.edges > 0) & (profile.edges < upper)]
    out = dyadic_integral(integrand, upper, levels=levels,
                          breakpoints=edges if edges.size else None)
    out.metadata.update({"kind": "rearrangement-bound", "R": R, "n": n})
    return out


def potential_shrink_profile(F: YoungFunction, M, centers, radii, n: int = 2,
                             levels: int = 32) -> list[dict]:
    """sup over centers of the potential, along a shrinking radius sweep.

    Vanishing of this profile as the radius drops is the continuity
    criterion for solutions driven by the measure.
    """
    centers = np.atleast_2d(np.asarray(centers, dtype=float))
    rows = []
    for rho in sorted((float(r) for r in radii), reverse=True):
        vals = []
        any_divergent = False
        for c in centers:
            res = wolff_potential(F, M, c, rho, n=n, levels=levels)
            any_divergent |= res.divergent
            vals.append(res.value)
        rows.append({"radius": rho, "sup_potential": float(np.max(vals)),
                     "divergent": any_divergent})
    return rows
