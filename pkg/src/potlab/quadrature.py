"""Composite quadrature for positive integrands with a power-type origin.

Most integrals in this package share one shape: a locally smooth, nonnegative
integrand on an interval (0, T] whose only delicate behaviour sits at the left
endpoint, where it may grow like a power (integrable or not).  The engine here
integrates over dyadic shells [T/2^{k+1}, T/2^k] with Gauss-Legendre nodes per
shell, fits the geometric decay of the trailing shell sums, and then either
adds the extrapolated remaining mass near zero or reports divergence.

All reductions run in a fixed order over preallocated arrays, so repeated
calls with identical inputs produce bit-identical results.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np

from .errors import ParameterError

#: Relative threshold under which a trailing shell counts as empty.
_EMPTY_REL = 1e-300


@lru_cache(maxsize=16)
def gauss_nodes(n: int) -> tuple[np.ndarray, np.ndarray]:
    """Gauss-Legendre nodes and weights on [0, 1]."""
    x, w = np.polynomial.legendre.leggauss(n)
    return (x + 1.0) / 2.0, w / 2.0


def _refine_breaks(breaks: np.ndarray, extra: np.ndarray | None) -> np.ndarray:
    """Insert interior points of ``extra`` into a sorted break sequence."""
    if extra is None or len(extra) == 0:
        return breaks
    lo, hi = breaks[0], breaks[-1]
    inner = extra[(extra > lo) & (extra < hi)]
    if inner.size == 0:
        return breaks
    return np.unique(np.concatenate([breaks, inner]))


def composite_gl(f, breaks, nodes: int = 8, extra_breaks=None) -> float:
    """Integrate ``f`` over consecutive segments given by ``breaks``."""
    breaks = np.asarray(breaks, dtype=float)
    if breaks.ndim != 1 or breaks.size < 2 or np.any(np.diff(breaks) < 0):
        raise ParameterError("breaks must be a sorted 1-D array with >= 2 entries")
    breaks = _refine_breaks(breaks, None if extra_breaks is None else np.asarray(extra_breaks, dtype=float))
    x, w = gauss_nodes(nodes)
    a = breaks[:-1]
    length = np.diff(breaks)
    pts = a[:, None] + length[:, None] * x[None, :]
    vals = f(pts.ravel()).reshape(pts.shape)
    return float(np.sum(length * (vals @ w)))


def segment_integrals(f, breaks, nodes: int = 8) -> np.ndarray:
    """Per-segment Gauss-Legendre integrals of ``f`` between ``breaks``."""
    breaks = np.asarray(breaks, dtype=float)
    x, w = gauss_nodes(nodes)
    a = breaks[:-1]
    length = np.diff(breaks)
    pts = a[:, None] + length[:, None] * x[None, :]
    vals = f(pts.ravel()).reshape(pts.shape)
    return length * (vals @ w)


@dataclass
class DyadicResult:
    """Outcome of a dyadic-shell integration.

    ``value`` carries the accumulated mass even when ``divergent`` is set, so
    divergence is a value, not an error.
    """

    value: float
    divergent: bool
    shell_sums: np.ndarray
    tail: float
    decay_ratio: float | None
    levels: int
    metadata: dict = field(default_factory=dict)

    def require_finite(self, what: str = "integral") -> float:
        if self.divergent:
            raise ParameterError(f"{what} diverges at the origin")
        return self.value


def dyadic_integral(
    f,
    upper: float,
    levels: int = 40,
    nodes: int = 8,
    breakpoints=None,
    fit_window: int = 8,
) -> DyadicResult:
    """Integrate ``f`` on (0, upper] with origin-tail extrapolation.

    The trailing ``fit_window`` shell sums are fitted with a geometric model
    ``S_k ~ q^k``.  A ratio ``q >= 1`` means the per-shell contributions fail
    to decay, i.e. the local power of the integrand is <= -1, and the result
    is marked divergent.  Otherwise the remaining mass below the last shell is
    added in closed form as ``S_last * q / (1 - q)``.
    """
    if upper <= 0:
        raise ParameterError("upper integration limit must be positive")
    if levels < 8:
        raise ParameterError("dyadic integration needs at least 8 levels")
    extra = None if breakpoints is None else np.asarray(breakpoints, dtype=float)
    edges = upper * np.exp2(-np.arange(levels + 1, dtype=float))
    sums = np.empty(levels)
    for k in range(levels):
        seg = np.array([edges[k + 1], edges[k]])
        seg = _refine_breaks(seg, extra)
        sums[k] = composite_gl(f, seg, nodes=nodes)

    window = sums[-fit_window:]
    scale = float(np.max(np.abs(sums))) if np.any(sums != 0.0) else 0.0
    positive = window > max(scale * 1e-15, _EMPTY_REL)
    tail = 0.0
    ratio: float | None = None
    divergent = False
    npos = int(np.count_nonzero(positive))
    if npos >= 3:
        ks = np.arange(levels - fit_window, levels, dtype=float)[positive]
        slope = np.polyfit(ks, np.log(window[positive]), 1)[0]
        ratio = float(np.exp(slope))
        if ratio >= 1.0 - 1e-9:
            divergent = True
        else:
            tail = float(window[positive][-1]) * ratio / (1.0 - ratio)
    elif npos > 0:
        # Too few live shells for a fit; bound the remainder by one more shell.
        tail = float(window[positive][-1])
    value = float(np.sum(sums)) + tail
    return DyadicResult(
        value=value,
        divergent=divergent,
        shell_sums=sums,
        tail=tail,
        decay_ratio=ratio,
        levels=levels,
    )


def cumulative_log_integral(f, lower: float, upper: float, segments: int = 400, nodes: int = 8):
    """Antiderivative samples ``F(t_i) = integral_lower^{t_i} f`` on a log grid."""
    if not (0 < lower < upper):
        raise ParameterError("need 0 < lower < upper for a log-spaced grid")
    grid = np.geomspace(lower, upper, segments + 1)
    parts = segment_integrals(f, grid, nodes=nodes)
    cum = np.concatenate([[0.0], np.cumsum(parts)])
    return grid, cum
