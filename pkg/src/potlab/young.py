"""Algebra of superquadratic Young functions and their derived scales.

A Young function here is a convex growth function ``G`` with ``G(0) = 0``,
strictly increasing derivative ``g = G'``, and growth indices

    i_G = inf_t t g(t) / G(t),    s_G = sup_t t g(t) / G(t),

computed on a dense logarithmic sample grid.  Admissible functions are
superquadratic (``i_G >= 2``), with a documented near-2 relaxation, and have
finite upper index (doubling); violations are rejected at construction.

Four families are supported: ``power`` (t^p), ``zygmund`` (t^p log^alpha(e+t)),
``scaled`` (constant multiple of a base function), and ``tabulated``
(shape-preserving interpolation of sampled derivative data on a log grid).
"""

from __future__ import annotations

import math
from functools import cached_property

import numpy as np
from scipy.interpolate import PchipInterpolator
from scipy.optimize import minimize_scalar

from .errors import DomainError, ParameterError, RangeError
from .quadrature import dyadic_integral, segment_integrals

_INDEX_GRID_POINTS = 12000
_INDEX_GRID_LO = 1e-8
_INDEX_GRID_HI = 1e8
#: Dimension used by the near-2 admissibility relaxation (planar solver).
_RELAXATION_DIM = 2
#: Upper-index cap: anything above this is treated as non-doubling growth.
_DOUBLING_CAP = 100.0

_FAMILIES = ("power", "zygmund", "scaled", "tabulated")


def _as_array(t):
    arr = np.asarray(t, dtype=float)
    return arr, arr.ndim == 0


class YoungFunction:
    """A validated Young function with vectorized evaluations.

    Instances are immutable after construction and safe to share across
    threads.  Use the classmethods :meth:`power`, :meth:`zygmund`,
    :meth:`scaled`, :meth:`tabulated` or :meth:`from_descriptor` instead of
    calling the constructor directly.
    """

    def __init__(self, family: str, params: dict):
        if family not in _FAMILIES:
            raise ParameterError(f"unknown Young-function family {family!r}")
        self.family = family
        self.params = params
        self._setup()
        self._validate()

    # ------------------------------------------------------------------
    # construction
    # ------------------------------------------------------------------

    @classmethod
    def power(cls, p: float) -> "YoungFunction":
        """G(t) = t**p with p >= 2."""
        return cls("power", {"p": float(p)})

    @classmethod
    def zygmund(cls, p: float, alpha: float) -> "YoungFunction":
        """G(t) = t**p * log(e + t)**alpha with p >= 2."""
        return cls("zygmund", {"p": float(p), "alpha": float(alpha)})

    @classmethod
    def scaled(cls, base: "YoungFunction", factor: float) -> "YoungFunction":
        """G(t) = factor * G_base(t) with factor > 0."""
        return cls("scaled", {"base": base, "factor": float(factor)})

    @classmethod
    def tabulated(cls, t_knots, g_values) -> "YoungFunction":
        """Monotone interpolation of derivative samples g(t_knots) = g_values.

        Knots must be positive and strictly increasing, values positive and
        strictly increasing.  Evaluations are restricted to the knot range
        (plus t = 0, where G and g vanish by definition).
        """
        t = np.asarray(t_knots, dtype=float)
        g = np.asarray(g_values, dtype=float)
        return cls("tabulated", {"t": t, "g": g})

    def _setup(self) -> None:
        fam, prm = self.family, self.params
        if fam == "power":
            p = prm["p"]
            if not (p >= 2.0):
                raise ParameterError(f"power family needs p >= 2, got {p}")
        elif fam == "zygmund":
            p = prm["p"]
            if not (p >= 2.0):
                raise ParameterError(f"zygmund family needs p >= 2, got {p}")
        elif fam == "scaled":
            base = prm["base"]
            if not isinstance(base, YoungFunction):
                raise ParameterError("scaled family needs a YoungFunction base")
            if not (prm["factor"] > 0):
                raise ParameterError("scaling factor must be positive")
        elif fam == "tabulated":
            t, g = prm["t"], prm["g"]
            if t.ndim != 1 or t.shape != g.shape or t.size < 4:
                raise ParameterError("tabulated family needs >= 4 matching samples")
            if not (np.all(t > 0) and np.all(np.diff(t) > 0)):
                raise ParameterError("tabulated knots must be positive and increasing")
            if not (np.all(g > 0) and np.all(np.diff(g) > 0)):
                raise ParameterError("tabulated derivative samples must be positive and strictly increasing")
            self._pchip = PchipInterpolator(np.log(t), np.log(g), extrapolate=False)
            self._pchip_d = self._pchip.derivative()
            # Cumulative integral of g on a refined grid, for G evaluations.
            grid = np.exp(np.linspace(np.log(t[0]), np.log(t[-1]), max(2000, 8 * t.size)))
            parts = segment_integrals(self._g_tab, grid, nodes=8)
            # Sub-knot head: continue g as the local power seen at the first knot.
            kappa0 = float(self._pchip_d(np.log(t[0])))
            if kappa0 <= 0:
                kappa0 = 1.0
            head = g[0] * t[0] / (kappa0 + 1.0)
            cum = head + np.concatenate([[0.0], np.cumsum(parts)])
            self._cum_grid = grid
            self._cum_interp = PchipInterpolator(np.log(grid), np.log(cum), extrapolate=False)
            self._head_kappa = kappa0

    # ------------------------------------------------------------------
    # family evaluations
    # ------------------------------------------------------------------

    def _g_tab(self, t):
        return np.exp(self._pchip(np.log(t)))

    def _domain_check(self, arr: np.ndarray) -> None:
        if self.family == "tabulated":
            t = self.params["t"]
            live = arr > 0
            if np.any(arr < 0):
                raise DomainError("negative argument to a Young function")
            bad = live & ((arr < t[0] * (1 - 1e-12)) | (arr > t[-1] * (1 + 1e-12)))
            if np.any(bad):
                raise DomainError(
                    f"argument outside tabulated range [{t[0]:g}, {t[-1]:g}]"
                )
        elif np.any(arr < 0):
            raise DomainError("negative argument to a Young function")

    def G(self, t):
        """Evaluate G(t); vectorized, G(0) = 0."""
        arr, scalar = _as_array(t)
        self._domain_check(arr)
        fam, prm = self.family, self.params
        if fam == "power":
            out = np.power(arr, prm["p"])
        elif fam == "zygmund":
            out = np.power(arr, prm["p"]) * np.power(np.log(np.e + arr), prm["alpha"])
        elif fam == "scaled":
            out = prm["factor"] * prm["base"].G(arr)
        else:
            out = np.zeros_like(arr)
            live = arr > 0
            if np.any(live):
                x = np.clip(arr[live], self._cum_grid[0], self._cum_grid[-1])
                out[live] = np.exp(self._cum_interp(np.log(x)))
        return float(out) if scalar else out

    def g(self, t):
        """Evaluate the derivative g(t) = G'(t); vectorized, g(0) = 0."""
        arr, scalar = _as_array(t)
        self._domain_check(arr)
        fam, prm = self.family, self.params
        if fam == "power":
            p = prm["p"]
            out = p * np.power(arr, p - 1.0)
        elif fam == "zygmund":
            p, a = prm["p"], prm["alpha"]
            L = np.log(np.e + arr)
            out = p * np.power(arr, p - 1.0) * np.power(L, a)
            out += a * np.power(arr, p) * np.power(L, a - 1.0) / (np.e + arr)
        elif fam == "scaled":
            out = prm["factor"] * prm["base"].g(arr)
        else:
            out = np.zeros_like(arr)
            live = arr > 0
            if np.any(live):
                t0, t1 = self.params["t"][0], self.params["t"][-1]
                x = np.clip(arr[live], t0, t1)
                out[live] = self._g_tab(x)
        return float(out) if scalar else out

    def g_prime(self, t):
        """Evaluate g'(t); closed forms where available, interpolated otherwise."""
        arr, scalar = _as_array(t)
        self._domain_check(arr)
        fam, prm = self.family, self.params
        if fam == "power":
            p = prm["p"]
            out = p * (p - 1.0) * np.power(arr, p - 2.0)
        elif fam == "zygmund":
            p, a = prm["p"], prm["alpha"]
            L = np.log(np.e + arr)
            e_t = np.e + arr
            out = p * (p - 1.0) * np.power(arr, p - 2.0) * np.power(L, a)
            out += 2.0 * p * a * np.power(arr, p - 1.0) * np.power(L, a - 1.0) / e_t
            out += a * (a - 1.0) * np.power(arr, p) * np.power(L, a - 2.0) / e_t**2
            out -= a * np.power(arr, p) * np.power(L, a - 1.0) / e_t**2
        elif fam == "scaled":
            out = prm["factor"] * prm["base"].g_prime(arr)
        else:
            out = np.zeros_like(arr)
            live = arr > 0
            if np.any(live):
                t0, t1 = self.params["t"][0], self.params["t"][-1]
                x = np.clip(arr[live], t0, t1)
                # d log g / d log t converts to g' = g(t)/t * slope.
                out[live] = self._g_tab(x) / x * self._pchip_d(np.log(x))
        return float(out) if scalar else out

    # ------------------------------------------------------------------
    # inversion and conjugation
    # ------------------------------------------------------------------

    def g_inv(self, y):
        """Invert the derivative: the unique t >= 0 with g(t) = y.

        Closed form for power-type families, otherwise bracketed bisection to
        relative accuracy better than 1e-12 followed by a Newton polish.
        """
        arr, scalar = _as_array(y)
        if np.any(arr < 0):
            raise RangeError("cannot invert g at a negative value")
        closed = self._closed_power()
        if closed is not None:
            p, factor = closed
            out = np.power(arr / (factor * p), 1.0 / (p - 1.0))
            return float(out) if scalar else out
        out = self._g_inv_numeric(arr)
        return float(out) if scalar else out

    def _closed_power(self):
        """(p, factor) if this function is a scaled pure power, else None."""
        if self.family == "power":
            return self.params["p"], 1.0
        if self.family == "scaled":
            inner = self.params["base"]._closed_power()
            if inner is not None:
                return inner[0], inner[1] * self.params["factor"]
        return None

    def _g_inv_numeric(self, y: np.ndarray) -> np.ndarray:
        out = np.zeros_like(y)
        live = y > 0
        if not np.any(live):
            return out
        yv = y[live]
        if self.family == "tabulated":
            t_knots = self.params["t"]
            g_lo, g_hi = self.g(t_knots[0]), self.g(t_knots[-1])
            if np.any(yv > g_hi * (1 + 1e-9)) or np.any(yv < g_lo * (1 - 1e-9)):
                raise RangeError(
                    f"inversion target outside tabulated derivative range [{g_lo:g}, {g_hi:g}]"
                )
            lo = np.full_like(yv, t_knots[0])
            hi = np.full_like(yv, t_knots[-1])
        else:
            hi = np.ones_like(yv)
            for _ in range(200):
                mask = self.g(hi) < yv
                if not np.any(mask):
                    break
                hi[mask] *= 2.0
            lo = np.where(hi > 1.0, hi / 2.0, np.ones_like(yv))
            for _ in range(200):
                mask = self.g(lo) > yv
                if not np.any(mask):
                    break
                lo[mask] /= 2.0
            hi = np.where(lo < 1.0, 2.0 * lo, hi)
        for _ in range(80):
            mid = 0.5 * (lo + hi)
            below = self.g(mid) < yv
            lo = np.where(below, mid, lo)
            hi = np.where(below, hi, mid)
        root = 0.5 * (lo + hi)
        for _ in range(2):
            deriv = self.g_prime(root)
            step = np.where(deriv > 0, (self.g(root) - yv) / np.where(deriv > 0, deriv, 1.0), 0.0)
            root = np.clip(root - step, lo, hi)
        out[live] = root
        return out

    def conjugate(self, s):
        """Legendre conjugate value sup_t (s t - G(t)) = s g^{-1}(s) - G(g^{-1}(s))."""
        arr, scalar = _as_array(s)
        if np.any(arr < 0):
            raise RangeError("conjugate is evaluated at nonnegative arguments")
        tstar = self.g_inv(arr)
        out = arr * tstar - self.G(tstar)
        return float(out) if scalar else out

    # ------------------------------------------------------------------
    # indices and validation
    # ------------------------------------------------------------------

    def _sample_grid(self) -> np.ndarray:
        lo, hi = _INDEX_GRID_LO, _INDEX_GRID_HI
        if self.family == "tabulated":
            lo = max(lo, float(self.params["t"][0]))
            hi = min(hi, float(self.params["t"][-1]))
        if self.family == "scaled":
            base = self.params["base"]
            if base.family == "tabulated":
                lo = max(lo, float(base.params["t"][0]))
                hi = min(hi, float(base.params["t"][-1]))
        return np.exp(np.linspace(math.log(lo), math.log(hi), _INDEX_GRID_POINTS))

    @cached_property
    def _index_pair(self) -> tuple[float, float]:
        if self._closed_power() is not None:
            p = self._closed_power()[0]
            return p, p
        if self.family == "scaled":
            return self.params["base"].indices()
        grid = self._sample_grid()
        ratio = grid * self.g(grid) / self.G(grid)
        return float(np.min(ratio)), float(np.max(ratio))

    def indices(self) -> tuple[float, float]:
        """Sampled growth indices (i_G, s_G); closed form for pure powers."""
        return self._index_pair

    @cached_property
    def _derivative_index_pair(self) -> tuple[float, float]:
        if self._closed_power() is not None:
            p = self._closed_power()[0]
            return p, p
        if self.family == "scaled":
            return self.params["base"].derivative_indices()
        grid = self._sample_grid()
        ratio = 1.0 + grid * self.g_prime(grid) / self.g(grid)
        return float(np.min(ratio)), float(np.max(ratio))

    def derivative_indices(self) -> tuple[float, float]:
        """Sampled ellipticity indices (1 + inf t g'/g, 1 + sup t g'/g).

        For pure powers these coincide with :meth:`indices`; for other
        families they may be marginally wider and are the band that actually
        controls second-derivative ratios.
        """
        return self._derivative_index_pair

    def _validate(self) -> None:
        grid = self._sample_grid()
        gvals = self.g(grid)
        if not np.all(np.diff(gvals) > 0):
            raise ParameterError("derivative g must be strictly increasing (convexity)")
        i_g, s_g = self.indices()
        if not math.isfinite(s_g) or s_g > _DOUBLING_CAP:
            raise ParameterError(
                f"upper index {s_g:.3g} exceeds the doubling cap; non-doubling growth is unsupported"
            )
        if i_g < 2.0 - 1e-9:
            slack = (i_g - 1.0) / (i_g + s_g * _RELAXATION_DIM)
            if not (2.0 - i_g < slack):
                raise ParameterError(
                    f"function is not superquadratic: i_G = {i_g:.4f} < 2 and the "
                    f"near-2 relaxation margin {slack:.4f} is not met"
                )

    def doubling_constants(self) -> dict:
        """Index-derived doubling data: G(2t) <= 2**s_G G(t), g^{-1}(2s) <= 2**(1/(i_G-1)) g^{-1}(s)."""
        i_g, s_g = self.indices()
        return {
            "delta2": 2.0**s_g,
            "ginv_doubling": 2.0 ** (1.0 / (i_g - 1.0)),
        }

    # ------------------------------------------------------------------
    # serialization
    # ------------------------------------------------------------------

    def to_descriptor(self) -> dict:
        """JSON-compatible descriptor {family, params}."""
        if self.family == "scaled":
            return {
                "family": "scaled",
                "params": {
                    "factor": self.params["factor"],
                    "base": self.params["base"].to_descriptor(),
                },
            }
        if self.family == "tabulated":
            return {
                "family": "tabulated",
                "params": {
                    "t": [float(v) for v in self.params["t"]],
                    "g": [float(v) for v in self.params["g"]],
                },
            }
        return {"family": self.family, "params": dict(self.params)}

    @classmethod
    def from_descriptor(cls, descriptor: dict) -> "YoungFunction":
        if not isinstance(descriptor, dict) or "family" not in descriptor:
            raise ParameterError("Young descriptor must be a dict with a 'family' key")
        family = descriptor["family"]
        params = descriptor.get("params", {})
        if family == "power":
            return cls.power(params["p"])
        if family == "zygmund":
            return cls.zygmund(params["p"], params["alpha"])
        if family == "scaled":
            return cls.scaled(cls.from_descriptor(params["base"]), params["factor"])
        if family == "tabulated":
            return cls.tabulated(params["t"], params["g"])
        raise ParameterError(f"unknown Young-function family {family!r}")

    def __repr__(self) -> str:  # pragma: no cover - debugging aid
        if self.family == "power":
            return f"YoungFunction.power(p={self.params['p']:g})"
        if self.family == "zygmund":
            return f"YoungFunction.zygmund(p={self.params['p']:g}, alpha={self.params['alpha']:g})"
        if self.family == "scaled":
            return f"YoungFunction.scaled({self.params['base']!r}, factor={self.params['factor']:g})"
        return f"YoungFunction.tabulated(<{self.params['t'].size} knots>)"


# ----------------------------------------------------------------------
# standalone checks
# ----------------------------------------------------------------------


def young_inequality_residual(F: YoungFunction, t, s):
    """Residual G(t) + conjugate(s) - t*s of the product inequality.

    Nonnegative for all t, s >= 0, vanishing exactly at s = g(t).
    """
    t_arr, t_scalar = _as_array(t)
    s_arr, s_scalar = _as_array(s)
    out = F.G(t_arr) + F.conjugate(s_arr) - t_arr * s_arr
    return float(out) if (t_scalar and s_scalar) else out


def equivalence_ratios(F: YoungFunction, t) -> dict:
    """Sampled versions of the standard index equivalences at point(s) t.

    Returns the ratio t g / G (lands in [i_G, s_G]), the ratio
    conjugate(g(t)) / G(t) (lands in [i_G - 1, s_G - 1]) and the doubling
    ratio g^{-1}(2 g(t)) / g^{-1}(g(t)) (at most 2**(1/(i_G - 1))).
    """
    arr, scalar = _as_array(t)
    if np.any(arr <= 0):
        raise DomainError("equivalence ratios need strictly positive arguments")
    g_t = F.g(arr)
    res = {
        "tg_over_G": arr * g_t / F.G(arr),
        "conj_g_over_G": F.conjugate(g_t) / F.G(arr),
        "ginv_doubling": F.g_inv(2.0 * g_t) / F.g_inv(g_t),
    }
    if scalar:
        res = {k: float(v) for k, v in res.items()}
    return res


def biconjugate(F: YoungFunction, t, rel_window: float = 1e6) -> float:
    """Numeric double Legendre transform sup_s (s t - conjugate(s)).

    Maximizes over a logarithmic bracket around the expected dual point and
    polishes with bounded scalar minimization; recovers G(t) for convex G.
    """
    t = float(t)
    if t < 0:
        raise DomainError("biconjugate is evaluated at nonnegative arguments")
    if t == 0.0:
        return 0.0
    center = F.g(t)
    s_grid = np.geomspace(max(center / rel_window, 1e-300), center * rel_window, 2001)
    vals = s_grid * t - F.conjugate(s_grid)
    i = int(np.argmax(vals))
    lo = s_grid[max(i - 1, 0)]
    hi = s_grid[min(i + 1, s_grid.size - 1)]

    def _negated(s: float) -> float:
        return -(s * t - F.conjugate(float(s)))

    res = minimize_scalar(_negated, bounds=(lo, hi), method="bounded",
                          options={"xatol": 1e-14 * hi})
    return float(max(-res.fun, vals[i]))


class HsScale:
    """Interpolation scale H_s(t) = integral_0^t g^(1-s) G^s dr / r.

    Admissible exponents form the open interval
    ``(max(2 - i_G, 0), (i_G - gamma s_G n)/(i_G + s_G n))`` with the margin
    ``gamma`` defaulting to half its allowed ceiling ``1/(s_G n)``.
    """

    def __init__(self, parent: YoungFunction, s: float, n: int = 2, gamma: float | None = None):
        i_g, s_g = parent.indices()
        if gamma is None:
            gamma = 1.0 / (2.0 * s_g * n)
        if not (0.0 < gamma < 1.0 / (s_g * n)):
            raise ParameterError(f"gamma must lie in (0, {1.0 / (s_g * n):.4g})")
        s_lo = max(2.0 - i_g, 0.0)
        s_hi = (i_g - gamma * s_g * n) / (i_g + s_g * n)
        if not (s_lo < s < s_hi):
            raise ParameterError(
                f"exponent s = {s:g} outside the admissible interval ({s_lo:.4g}, {s_hi:.4g})"
            )
        self.parent = parent
        self.s = float(s)
        self.n = int(n)
        self.gamma = float(gamma)
        self.admissible = (s_lo, s_hi)

    def _integrand(self, r):
        s = self.s
        return self.parent.g(r) ** (1.0 - s) * self.parent.G(r) ** s / r

    def value(self, t) -> float:
        """H_s(t) by dyadic quadrature with origin-tail extrapolation."""
        t = float(t)
        if t < 0:
            raise DomainError("H_s is evaluated at nonnegative arguments")
        if t == 0.0:
            return 0.0
        if self.parent.family == "tabulated":
            knots = self.parent.params["t"]
            lo = float(knots[0])
            if t <= lo:
                raise DomainError("H_s evaluation below the tabulated range")
            grid = np.geomspace(lo, t, 400)
            body = float(np.sum(segment_integrals(self._integrand, grid, nodes=8)))
            kappa = (1.0 - self.s) * (self.parent.g_prime(lo) * lo / self.parent.g(lo)) \
                + self.s * (lo * self.parent.g(lo) / self.parent.G(lo)) - 1.0
            head = self._integrand(np.asarray([lo]))[0] * lo / (kappa + 1.0)
            return body + head
        return dyadic_integral(self._integrand, t, levels=48, nodes=8).require_finite("H_s")

    def __call__(self, t) -> float:
        return self.value(t)

    def slope(self, t):
        """The log-derivative t H_s''/H_s' = (1-s) t g'/g + s t g/G - 1."""
        arr, scalar = _as_array(t)
        if np.any(arr <= 0):
            raise DomainError("slope needs strictly positive arguments")
        s = self.s
        out = (1.0 - s) * arr * self.parent.g_prime(arr) / self.parent.g(arr) \
            + s * arr * self.parent.g(arr) / self.parent.G(arr) - 1.0
        return float(out) if scalar else out

    def slope_band(self) -> tuple[float, float]:
        """Guaranteed band for the slope, [s + i - 2, s + s' - 2].

        The bounds combine the growth indices with the sampled ellipticity
        indices of the derivative; for pure powers both coincide and the band
        collapses to [s + i_G - 2, s + s_G - 2] from the growth indices alone.
        """
        i_g, s_g = self.parent.indices()
        i_d, s_d = self.parent.derivative_indices()
        return (self.s + min(i_g, i_d) - 2.0, self.s + max(s_g, s_d) - 2.0)

    def envelope(self, t):
        """Two-sided envelope (lower, upper) of H_s(t) by g^(1-s) G^s.

        The constants 1/(s + s_G - 1) and 1/(s + i_G - 1) follow from the
        monotonicity of the integrand against its extreme local powers.
        """
        arr, scalar = _as_array(t)
        i_g, s_g = self.parent.indices()
        core = self.parent.g(arr) ** (1.0 - self.s) * self.parent.G(arr) ** self.s
        lo = core / (self.s + s_g - 1.0)
        hi = core / (self.s + i_g - 1.0)
        if scalar:
            return float(lo), float(hi)
        return lo, hi
