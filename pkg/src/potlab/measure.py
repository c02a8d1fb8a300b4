"""Vector measures on the plane: atoms, grid densities, radial profiles.

The measure kinds share two queries — ``ball_mass`` (total variation of a
closed ball) and ``total_variation`` — plus conversion through mollification
to a grid density.  Ball masses against grid densities use cell-center
inclusion with two levels of subdivision near the sphere, so the geometric
error per query shrinks like the squared subcell size.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .errors import ParameterError, ValidationError
from .quadrature import composite_gl, cumulative_log_integral
from .report import EstimateReport, classify_ratios


# ----------------------------------------------------------------------
# grids
# ----------------------------------------------------------------------


@dataclass(frozen=True)
class GridSpec:
    """Uniform cell grid on the rectangle [x0, x1] x [y0, y1]."""

    x0: float
    x1: float
    y0: float
    y1: float
    nx: int
    ny: int

    def __post_init__(self):
        if not (self.x1 > self.x0 and self.y1 > self.y0):
            raise ParameterError("grid extents must be nonempty")
        if self.nx < 1 or self.ny < 1:
            raise ParameterError("grid resolution must be positive")

    @property
    def dx(self) -> float:
        return (self.x1 - self.x0) / self.nx

    @property
    def dy(self) -> float:
        return (self.y1 - self.y0) / self.ny

    @property
    def cell_volume(self) -> float:
        return self.dx * self.dy

    def centers(self) -> tuple[np.ndarray, np.ndarray]:
        """Cell-center coordinates as (ny, nx) arrays (X, Y)."""
        cx = self.x0 + (np.arange(self.nx) + 0.5) * self.dx
        cy = self.y0 + (np.arange(self.ny) + 0.5) * self.dy
        return np.meshgrid(cx, cy)


# ----------------------------------------------------------------------
# measures
# ----------------------------------------------------------------------


class MeasureData:
    """Common interface for the measure kinds."""

    kind: str = "abstract"
    components: int = 1

    def ball_mass(self, x0, r: float) -> float:
        raise NotImplementedError

    def total_variation(self) -> float:
        raise NotImplementedError


class AtomsMeasure(MeasureData):
    """Finite sum of weighted Dirac atoms; weights may be vectors."""

    kind = "atoms"

    def __init__(self, points, weights):
        pts = np.atleast_2d(np.asarray(points, dtype=float))
        w = np.asarray(weights, dtype=float)
        if w.ndim == 1:
            w = w[:, None]
        if pts.ndim != 2 or pts.shape[1] != 2 or w.shape[0] != pts.shape[0]:
            raise ParameterError("atoms need (k, 2) points and (k, m) weights")
        self.points = pts
        self.weights = w
        self.components = w.shape[1]
        self._norms = np.sqrt(np.sum(w**2, axis=1))

    def ball_mass(self, x0, r: float) -> float:
        if r < 0:
            raise ParameterError("ball radius must be nonnegative")
        d = np.sqrt(np.sum((self.points - np.asarray(x0, dtype=float)) ** 2, axis=1))
        return float(np.sum(self._norms[d <= r]))

    def total_variation(self) -> float:
        return float(np.sum(self._norms))


class GridDensityMeasure(MeasureData):
    """Piecewise-constant density on a uniform grid (row-major, m components)."""

    kind = "grid"

    def __init__(self, grid: GridSpec, values):
        vals = np.asarray(values, dtype=float)
        if vals.ndim == 2:
            vals = vals[:, :, None]
        if vals.shape[:2] != (grid.ny, grid.nx):
            raise ParameterError(
                f"density array must have shape (ny={grid.ny}, nx={grid.nx}, m)"
            )
        self.grid = grid
        self.values = vals
        self.components = vals.shape[2]
        self._norms = np.sqrt(np.sum(vals**2, axis=2))
        X, Y = grid.centers()
        self._cx, self._cy = X, Y

    def ball_mass(self, x0, r: float, subdivisions: int = 2) -> float:
        if r < 0:
            raise ParameterError("ball radius must be nonnegative")
        x0 = np.asarray(x0, dtype=float)
        g = self.grid
        dist = np.hypot(self._cx - x0[0], self._cy - x0[1])
        half_diag = 0.5 * math.hypot(g.dx, g.dy)
        inside = dist <= r - half_diag
        near = (dist > r - half_diag) & (dist < r + half_diag)
        mass = float(np.sum(self._norms[inside])) * g.cell_volume
        if np.any(near):
            iy, ix = np.nonzero(near)
            k = 2**subdivisions
            sub = (np.arange(k) + 0.5) / k
            sx = g.x0 + (ix[:, None, None] + sub[None, :, None]) * g.dx
            sy = g.y0 + (iy[:, None, None] + sub[None, None, :]) * g.dy
            frac = np.mean(np.hypot(sx - x0[0], sy - x0[1]) <= r, axis=(1, 2))
            mass += float(np.sum(self._norms[iy, ix] * frac)) * g.cell_volume
        return mass

    def total_variation(self) -> float:
        return float(np.sum(self._norms)) * self.grid.cell_volume

    def density_at(self, points) -> np.ndarray:
        """Componentwise density at arbitrary points (zero outside the grid)."""
        pts = np.atleast_2d(np.asarray(points, dtype=float))
        g = self.grid
        ix = np.floor((pts[:, 0] - g.x0) / g.dx).astype(int)
        iy = np.floor((pts[:, 1] - g.y0) / g.dy).astype(int)
        ok = (ix >= 0) & (ix < g.nx) & (iy >= 0) & (iy < g.ny)
        out = np.zeros((pts.shape[0], self.components))
        out[ok] = self.values[iy[ok], ix[ok], :]
        return out

    # ------------------------------------------------------------------
    def to_csv(self, path) -> None:
        """Header row nx,ny,m,x0,x1,y0,y1 then one row-major cell per line."""
        g = self.grid
        lines = [
            "nx,ny,m,x0,x1,y0,y1",
            f"{g.nx},{g.ny},{self.components},{g.x0:.12e},{g.x1:.12e},{g.y0:.12e},{g.y1:.12e}",
        ]
        flat = self.values.reshape(-1, self.components)
        for row in flat:
            lines.append(",".join(f"{v:.12e}" for v in row))
        with open(path, "w", encoding="utf-8") as fh:
            fh.write("\n".join(lines) + "\n")

    @classmethod
    def from_csv(cls, path) -> "GridDensityMeasure":
        with open(path, encoding="utf-8") as fh:
            rows = [line.strip() for line in fh if line.strip()]
        if len(rows) < 2 or rows[0] != "nx,ny,m,x0,x1,y0,y1":
            raise ParameterError("grid CSV must start with header nx,ny,m,x0,x1,y0,y1")
        head = rows[1].split(",")
        nx, ny, m = int(head[0]), int(head[1]), int(head[2])
        x0, x1, y0, y1 = (float(v) for v in head[3:7])
        data = np.array([[float(v) for v in r.split(",")] for r in rows[2:]])
        if data.shape != (nx * ny, m):
            raise ParameterError(f"grid CSV body must have {nx * ny} rows of {m} values")
        return cls(GridSpec(x0, x1, y0, y1, nx, ny), data.reshape(ny, nx, m))


class RadialProfileMeasure(MeasureData):
    """Rotationally symmetric density rho(|x - center|) up to a support radius.

    ``direction`` fixes the (constant) orientation of the vector values; the
    scalar profile is the magnitude.  Cumulative masses are cached on a log
    grid so repeated ball queries stay cheap.
    """

    kind = "radial"

    def __init__(self, center, density, support_radius: float, direction=None):
        if support_radius <= 0:
            raise ParameterError("support radius must be positive")
        self.center = np.asarray(center, dtype=float)
        self.density = density
        self.support_radius = float(support_radius)
        d = np.asarray([1.0] if direction is None else direction, dtype=float)
        norm = math.sqrt(float(np.sum(d**2)))
        if norm == 0:
            raise ParameterError("direction must be a nonzero vector")
        self.direction = d / norm
        self.components = self.direction.size

        def ring(s):
            s = np.asarray(s, dtype=float)
            return 2.0 * math.pi * s * np.abs(np.asarray(self.density(s), dtype=float))

        lo = support_radius * 1e-9
        grid, cum = cumulative_log_integral(ring, lo, support_radius, segments=600)
        # Head below the cached grid: local power extrapolation of the ring mass,
        # integral_0^lo ring ~ ring(lo) * lo / (kappa + 1) when ring ~ s^kappa.
        r0, r1 = float(ring(np.asarray([lo]))[0]), float(ring(np.asarray([2.0 * lo]))[0])
        kappa = math.log(r1 / r0) / math.log(2.0) if r0 > 0 and r1 > 0 else 1.0
        head = r0 * lo / (kappa + 1.0) if kappa > -1.0 else 0.0
        self._r_grid = grid
        self._cum = cum + head
        self._head = head
        self._ring = ring

    def _cumulative(self, r) -> np.ndarray:
        """Mass of the centered ball of radius r (grid anchor + exact finisher)."""
        r = np.minimum(np.asarray(r, dtype=float), self.support_radius)
        out = np.empty_like(r)
        grid, cum = self._r_grid, self._cum
        for i, ri in np.ndenumerate(r):
            if ri < grid[0]:
                out[i] = self._head * (ri / grid[0])
                continue
            j = int(np.searchsorted(grid, ri, side="right")) - 1
            out[i] = cum[j]
            if ri > grid[j]:
                out[i] += composite_gl(self._ring, np.linspace(grid[j], ri, 3), nodes=8)
        return out

    def ball_mass(self, x0, r: float) -> float:
        if r < 0:
            raise ParameterError("ball radius must be nonnegative")
        x0 = np.asarray(x0, dtype=float)
        d = float(np.hypot(*(x0 - self.center)))
        if d <= 1e-14 * max(1.0, r):
            return float(self._cumulative(np.asarray([r]))[0])
        # Off-center ball: integrate ring mass times the covered arc fraction.
        # Rings with s < r - d (if any) are fully covered and handled below.
        lo = max(abs(d - r), self.support_radius * 1e-9)
        hi = min(d + r, self.support_radius)

        def integrand(s):
            s = np.asarray(s, dtype=float)
            cosv = (d**2 + s**2 - r**2) / (2.0 * d * s)
            angle = np.arccos(np.clip(cosv, -1.0, 1.0))
            return 2.0 * math.pi * s * np.abs(np.asarray(self.density(s), dtype=float)) \
                * (angle / math.pi)

        mass = float(self._cumulative(np.asarray([max(r - d, 0.0)]))[0])
        if hi > lo:
            mass += composite_gl(integrand, np.geomspace(lo, hi, 200), nodes=8)
        return mass

    def total_variation(self) -> float:
        return float(self._cumulative(np.asarray([self.support_radius]))[0])

    def density_vector_at(self, points) -> np.ndarray:
        pts = np.atleast_2d(np.asarray(points, dtype=float))
        s = np.hypot(pts[:, 0] - self.center[0], pts[:, 1] - self.center[1])
        rho = np.where(s <= self.support_radius,
                       np.asarray(self.density(np.maximum(s, 1e-300)), dtype=float), 0.0)
        return rho[:, None] * self.direction[None, :]


# ----------------------------------------------------------------------
# growth check
# ----------------------------------------------------------------------


def check_morrey(M: MeasureData, F, theta: float, radii, centers, n: int = 2) -> EstimateReport:
    """Sample the ratio |mu|(B_r(x)) / (r^{n-1} g(r^{theta-1})) on a radius sweep.

    The fitted constant is the maximal ratio; the verdict flags 'growing'
    when some center shows monotone ratio growth under shrinking radii.
    """
    if not (0 < theta < 1):
        raise ParameterError("theta must lie in (0, 1)")
    radii = sorted((float(r) for r in radii), reverse=True)
    if len(radii) < 2:
        raise ParameterError("the radius sweep needs at least two radii")
    samples = []
    any_growing = False
    for ci, c in enumerate(np.atleast_2d(np.asarray(centers, dtype=float))):
        ratios = []
        for r in radii:
            rhs = r ** (n - 1) * F.g(r ** (theta - 1.0))
            lhs = M.ball_mass(c, r)
            ratio = lhs / rhs if rhs > 0 else math.inf
            ratios.append(ratio)
            samples.append({"center": ci, "radius": r, "lhs": lhs, "rhs": rhs, "ratio": ratio})
        if classify_ratios(ratios) == "growing":
            any_growing = True
    rep = EstimateReport.from_samples("morrey-growth", samples,
                                      metadata={"theta": theta, "n": n})
    if any_growing:
        rep.verdict = "growing"
    return rep


# ----------------------------------------------------------------------
# mollification
# ----------------------------------------------------------------------


@lru_cache(maxsize=1)
def _bump_normalizer() -> float:
    """1 / (2 pi * integral_0^1 exp(-1/(1 - s^2)) s ds) for the standard bump."""

    def f(s):
        s = np.asarray(s, dtype=float)
        return np.exp(-1.0 / np.maximum(1.0 - s**2, 1e-300)) * s

    val = composite_gl(f, np.linspace(0.0, 1.0, 200), nodes=8)
    return 1.0 / (2.0 * math.pi * val)


def bump_peak() -> float:
    """Value of the normalized unit bump at the origin."""
    return _bump_normalizer() * math.exp(-1.0)


def _bump_values(dist: np.ndarray, width: float) -> np.ndarray:
    rho = dist / width
    out = np.zeros_like(rho)
    inside = rho < 1.0
    out[inside] = np.exp(-1.0 / (1.0 - rho[inside] ** 2))
    return out * (_bump_normalizer() / width**2)


def mollify(M: MeasureData, width: float, grid: GridSpec) -> GridDensityMeasure:
    """Convolve the measure with a compact smooth bump, targetting ``grid``.

    The discrete kernel is renormalized source-by-source, so for positive
    measures the total variation is preserved exactly (up to float summation).
    """
    if width <= 0:
        raise ParameterError("mollification width must be positive")
    if width > min(grid.x1 - grid.x0, grid.y1 - grid.y0):
        raise ValidationError("mollification width exceeds the target domain size")
    X, Y = grid.centers()
    vol = grid.cell_volume

    if isinstance(M, AtomsMeasure):
        target = np.zeros((grid.ny, grid.nx, M.components))
        for p, w in zip(M.points, M.weights):
            vals = _bump_values(np.hypot(X - p[0], Y - p[1]), width)
            s = float(np.sum(vals)) * vol
            if s <= 0:
                raise ValidationError("an atom mollifies to nothing on this grid; refine it")
            target += vals[:, :, None] * (w[None, None, :] / s)
        return GridDensityMeasure(grid, target)

    if isinstance(M, RadialProfileMeasure):
        pts = np.column_stack([X.ravel(), Y.ravel()])
        raw = M.density_vector_at(pts).reshape(grid.ny, grid.nx, M.components)
        raster = GridDensityMeasure(grid, raw)
        tv_true, tv_raw = M.total_variation(), raster.total_variation()
        if tv_raw <= 0:
            raise ValidationError("radial profile rasterizes to nothing on this grid")
        raster = GridDensityMeasure(grid, raw * (tv_true / tv_raw))
        return mollify(raster, width, grid)

    if isinstance(M, GridDensityMeasure):
        src = M.grid
        target = np.zeros((grid.ny, grid.nx, M.components))
        sx, sy = src.centers()
        svol = src.cell_volume
        live = np.nonzero(M._norms > 0)
        for iy, ix in zip(*live):
            px, py = sx[iy, ix], sy[iy, ix]
            vals = _bump_values(np.hypot(X - px, Y - py), width)
            s = float(np.sum(vals)) * vol
            if s <= 0:
                raise ValidationError("a source cell mollifies to nothing on this grid")
            target += vals[:, :, None] * (M.values[iy, ix, :][None, None, :] * (svol / s))
        return GridDensityMeasure(grid, target)

    raise ParameterError(f"cannot mollify measure kind {M.kind!r}")


# ----------------------------------------------------------------------
# coefficient fields
# ----------------------------------------------------------------------


class CoefficientField:
    """A scalar weight a(x) with declared bounds and modulus of continuity."""

    def __init__(self, func, lower: float, upper: float, modulus, kind: str = "custom",
                 params: dict | None = None):
        if not (0 < lower <= upper):
            raise ParameterError("coefficient bounds must satisfy 0 < lower <= upper")
        self._func = func
        self.lower = float(lower)
        self.upper = float(upper)
        self.modulus = modulus
        self.kind = kind
        self.params = dict(params or {})

    def __call__(self, points) -> np.ndarray:
        pts = np.atleast_2d(np.asarray(points, dtype=float))
        vals = np.asarray(self._func(pts), dtype=float)
        if np.any(vals < self.lower - 1e-12) or np.any(vals > self.upper + 1e-12):
            raise ValidationError("coefficient values escape the declared bounds")
        return vals

    def check_modulus(self, rng: np.random.Generator, bbox, n_pairs: int = 2000,
                      slack: float = 1e-9) -> bool:
        """Sampled increments must be dominated by the declared modulus."""
        x0, x1, y0, y1 = bbox
        p = np.column_stack([rng.uniform(x0, x1, n_pairs), rng.uniform(y0, y1, n_pairs)])
        q = np.column_stack([rng.uniform(x0, x1, n_pairs), rng.uniform(y0, y1, n_pairs)])
        gap = np.abs(self(p) - self(q))
        allowed = np.asarray(self.modulus(np.hypot(*(p - q).T)), dtype=float)
        return bool(np.all(gap <= allowed + slack))

    # ------------------------------------------------------------------
    @classmethod
    def constant(cls, value: float) -> "CoefficientField":
        return cls(lambda p: np.full(p.shape[0], float(value)), value, value,
                   lambda r: np.zeros_like(np.asarray(r, dtype=float)),
                   kind="constant", params={"value": value})

    @classmethod
    def sinusoidal(cls, base: float, amp: float, kx: float = 1.0, ky: float = 1.0) -> "CoefficientField":
        if not (0 <= amp < base):
            raise ParameterError("need 0 <= amp < base for a positive weight")
        lip = amp * math.pi * math.hypot(kx, ky)

        def f(p):
            return base + amp * np.sin(math.pi * kx * p[:, 0]) * np.cos(math.pi * ky * p[:, 1])

        return cls(f, base - amp, base + amp, lambda r: lip * np.asarray(r, dtype=float),
                   kind="sinusoidal", params={"base": base, "amp": amp, "kx": kx, "ky": ky})

    @classmethod
    def radial_bump(cls, base: float, amp: float, center=(0.0, 0.0), radius: float = 0.5) -> "CoefficientField":
        if base <= 0 or base + amp <= 0 or radius <= 0:
            raise ParameterError("bump parameters must keep the weight positive")
        cx, cy = center

        def f(p):
            d = np.hypot(p[:, 0] - cx, p[:, 1] - cy)
            return base + amp * np.maximum(0.0, 1.0 - d / radius)

        lo, hi = (base, base + amp) if amp >= 0 else (base + amp, base)
        lip = abs(amp) / radius
        return cls(f, lo, hi, lambda r: lip * np.asarray(r, dtype=float),
                   kind="radial-bump",
                   params={"base": base, "amp": amp, "center": [cx, cy], "radius": radius})

    @classmethod
    def from_descriptor(cls, desc: dict) -> "CoefficientField":
        kind = desc.get("kind")
        prm = desc.get("params", {})
        if kind == "constant":
            return cls.constant(prm["value"])
        if kind == "sinusoidal":
            return cls.sinusoidal(prm["base"], prm["amp"], prm.get("kx", 1.0), prm.get("ky", 1.0))
        if kind == "radial-bump":
            return cls.radial_bump(prm["base"], prm["amp"], tuple(prm.get("center", (0.0, 0.0))),
                                   prm.get("radius", 0.5))
        raise ParameterError(f"unknown coefficient kind {kind!r}")

    def to_descriptor(self) -> dict:
        return {"kind": self.kind, "params": dict(self.params)}
