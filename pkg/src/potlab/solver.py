"""P1 energy minimization for -div(a(x) g(|Du|) Du / |Du|) = mu on a mesh.

The discrete energy is sum_T |T| a(x_T) G_eps(|Du|_T) - <u, load> with the
regularization G_eps(t) = G(sqrt(t^2 + eps^2)) - G(eps).  The main solve runs
damped Newton (or curvature-adaptive gradient descent) at eps tied to the
mesh size, then polishes at eps = 0 with gradient steps; energy never
increases across accepted iterations.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
import scipy.sparse as sp
import scipy.sparse.linalg as spla
from scipy.optimize import minimize_scalar

from .errors import ConvergenceError, ParameterError, ValidationError
from .field import OperatorSpec, radial_factor
from .measure import (
    AtomsMeasure,
    GridDensityMeasure,
    GridSpec,
    RadialProfileMeasure,
    mollify,
)
from .mesh import Mesh2D, VectorField2D
from .quadrature import composite_gl, cumulative_log_integral, dyadic_integral
from .young import YoungFunction

_DIRECT_DOF_LIMIT = 200_000


@dataclass
class SolveConfig:
    """Iteration controls for the energy minimizer."""

    regularization: float | None = None  # None: tie eps to the mesh size
    max_iter: int = 60
    tolerance: float = 1e-10
    step_rule: str = "newton"  # {"newton", "adaptive-curvature", "fixed"}
    fixed_step: float = 1e-2
    polish_iters: int = 300
    seed: int = 0

    def __post_init__(self):
        if self.tolerance <= 0:
            raise ParameterError("solver tolerance must be positive")
        if self.step_rule not in ("newton", "adaptive-curvature", "fixed"):
            raise ParameterError(f"unknown step rule {self.step_rule!r}")


@dataclass
class SolveResult:
    field: VectorField2D
    energy: float
    residual_norm: float
    iterations: int
    converged: bool
    diagnostics: dict


# ----------------------------------------------------------------------
# load assembly
# ----------------------------------------------------------------------


def _atoms_to_load(mesh: Mesh2D, points: np.ndarray, weights: np.ndarray,
                   strict: bool = True) -> tuple[np.ndarray, float]:
    m = weights.shape[1]
    load = np.zeros((mesh.n_vertices, m))
    idx, bary = mesh.locate(points)
    outside = idx < 0
    if np.any(outside) and strict:
        raise ValidationError("an atomic load falls outside the mesh")
    dropped = float(np.sum(np.sqrt(np.sum(weights[outside] ** 2, axis=1))))
    good = ~outside
    for t, lam, w in zip(idx[good], bary[good], weights[good]):
        np.add.at(load, mesh.triangles[t], lam[:, None] * w[None, :])
    return load, dropped


def assemble_load(mesh: Mesh2D, M) -> np.ndarray:
    """Duality pairing of the measure with the nodal hat basis, (nv, m).

    Atoms pair exactly (barycentric split inside the containing triangle);
    grid densities enter as cell-center point masses; radial profiles are
    integrated per triangle with the edge-midpoint rule.
    """
    if isinstance(M, np.ndarray):
        if M.shape[0] != mesh.n_vertices:
            raise ParameterError("preassembled load must be per-vertex")
        return M if M.ndim == 2 else M[:, None]
    if isinstance(M, AtomsMeasure):
        load, _ = _atoms_to_load(mesh, M.points, M.weights)
        return load
    if isinstance(M, GridDensityMeasure):
        live = M._norms > 0
        iy, ix = np.nonzero(live)
        g = M.grid
        centers = np.column_stack([g.x0 + (ix + 0.5) * g.dx, g.y0 + (iy + 0.5) * g.dy])
        weights = M.values[iy, ix, :] * g.cell_volume
        load, dropped = _atoms_to_load(mesh, centers, weights, strict=False)
        if dropped > 1e-8 * max(M.total_variation(), 1e-300):
            raise ValidationError("a grid-density load leaks outside the mesh")
        return load
    if isinstance(M, RadialProfileMeasure):
        tri = mesh.triangles
        v = mesh.vertices[tri]  # (nt, 3, 2)
        mids = 0.5 * (v + np.roll(v, -1, axis=1))  # midpoints (01, 12, 20)
        dens = M.density_vector_at(mids.reshape(-1, 2)).reshape(tri.shape[0], 3, -1)
        load = np.zeros((mesh.n_vertices, dens.shape[2]))
        w = mesh.areas[:, None] / 6.0
        # Vertex i touches midpoints (i-1, i) and (i, i+1) with hat value 1/2.
        for i in range(3):
            contrib = w * (dens[:, i, :] + dens[:, (i - 1) % 3, :])
            np.add.at(load, tri[:, i], contrib)
        return load
    raise ParameterError(f"cannot assemble a load from {type(M).__name__}")


# ----------------------------------------------------------------------
# energy, residual, tangent
# ----------------------------------------------------------------------


def _as_values(u, mesh: Mesh2D) -> np.ndarray:
    if isinstance(u, VectorField2D):
        return u.values
    u = np.asarray(u, dtype=float)
    if u.ndim == 1:
        u = u[:, None]
    if u.shape[0] != mesh.n_vertices:
        raise ParameterError("field values must be per-vertex")
    return u


def _gradients(mesh: Mesh2D, values: np.ndarray) -> np.ndarray:
    return np.einsum("tim,tid->tmd", values[mesh.triangles], mesh.grads)


def energy(spec: OperatorSpec, mesh: Mesh2D, u, load, eps: float = 0.0) -> float:
    """Sum_T |T| a(x_T) G_eps(|Du|_T) minus the load pairing."""
    values = _as_values(u, mesh)
    load_arr = assemble_load(mesh, load)
    Du = _gradients(mesh, values)
    rho = np.sqrt(np.sum(Du**2, axis=(1, 2)) + eps**2)
    a_t = spec.a(mesh.centroids)
    bulk = float(np.sum(mesh.areas * a_t * spec.F.G(rho)))
    if eps > 0:
        bulk -= float(np.sum(mesh.areas * a_t)) * float(spec.F.G(eps))
    return bulk - float(np.sum(values * load_arr))


def _residual(spec: OperatorSpec, mesh: Mesh2D, values: np.ndarray,
              load_arr: np.ndarray, eps: float) -> np.ndarray:
    Du = _gradients(mesh, values)
    rho_eps = np.sqrt(np.sum(Du**2, axis=(1, 2)) + eps**2)
    a_t = spec.a(mesh.centroids)
    factor = mesh.areas * a_t * radial_factor(spec.F, rho_eps)
    contrib = np.einsum("t,tmd,tid->tim", factor, Du, mesh.grads)
    r = np.zeros_like(values)
    np.add.at(r, mesh.triangles, contrib)
    return r - load_arr


def _tangent_matrix(spec: OperatorSpec, mesh: Mesh2D, values: np.ndarray,
                    eps: float) -> sp.csr_matrix:
    """Second derivative of the regularized bulk energy (SPD for our growth)."""
    nt = mesh.n_triangles
    m = values.shape[1]
    Du = _gradients(mesh, values)
    rho = np.sqrt(np.sum(Du**2, axis=(1, 2)) + eps**2)
    a_t = spec.a(mesh.centroids)
    g = np.asarray(spec.F.g(rho), dtype=float)
    gp = np.asarray(spec.F.g_prime(rho), dtype=float)
    with np.errstate(divide="ignore", invalid="ignore"):
        c1 = mesh.areas * a_t * np.where(rho > 0, g / rho, 0.0)
        c2 = mesh.areas * a_t * np.where(rho > 0, (gp * rho - g) / rho**3, 0.0)
    c2 = np.maximum(c2, 0.0)  # guard float dust; analytically >= 0 here
    kgeom = np.einsum("tid,tjd->tij", mesh.grads, mesh.grads)
    P = np.einsum("tid,tmd->tim", mesh.grads, Du)  # (nt, 3, m)
    dofs = (mesh.triangles[:, :, None] * m + np.arange(m)[None, None, :])  # (nt,3,m)
    if m == 1:
        block = c1[:, None, None] * kgeom + c2[:, None, None] * \
            (P[:, :, 0][:, :, None] * P[:, :, 0][:, None, :])
        rows = np.repeat(dofs[:, :, 0], 3, axis=1)
        cols = np.tile(dofs[:, :, 0], (1, 3))
        data = block.reshape(nt, 9)
    else:
        eye = np.eye(m)
        block = c1[:, None, None, None, None] * kgeom[:, :, None, :, None] * eye[None, None, :, None, :] \
            + c2[:, None, None, None, None] * P[:, :, :, None, None] * P[:, None, None, :, :]
        # block[t, i, a, j, b]
        rows = np.broadcast_to(dofs[:, :, :, None, None], block.shape).reshape(nt, -1)
        cols = np.broadcast_to(dofs[:, None, None, :, :], block.shape).reshape(nt, -1)
        data = block.reshape(nt, -1)
    ndof = mesh.n_vertices * m
    H = sp.coo_matrix((data.ravel(), (rows.ravel(), cols.ravel())),
                      shape=(ndof, ndof))
    return H.tocsr()


def _scalar_stiffness(mesh: Mesh2D) -> sp.csr_matrix:
    kgeom = np.einsum("tid,tjd->tij", mesh.grads, mesh.grads) * mesh.areas[:, None, None]
    rows = np.repeat(mesh.triangles, 3, axis=1)
    cols = np.tile(mesh.triangles, (1, 3))
    K = sp.coo_matrix((kgeom.reshape(-1), (rows.ravel(), cols.ravel())),
                      shape=(mesh.n_vertices, mesh.n_vertices))
    return K.tocsr()


def _solve_spd(H: sp.csr_matrix, b: np.ndarray) -> np.ndarray:
    if H.shape[0] <= _DIRECT_DOF_LIMIT:
        return spla.spsolve(H.tocsc(), b)
    import pyamg

    ml = pyamg.smoothed_aggregation_solver(H, max_coarse=500)
    return ml.solve(b, tol=1e-12, accel="cg", maxiter=600)


# ----------------------------------------------------------------------
# the minimizer
# ----------------------------------------------------------------------


def _boundary_values(mesh: Mesh2D, boundary, m: int) -> np.ndarray:
    vals = np.zeros((mesh.n_vertices, m))
    if boundary is None:
        return vals
    if callable(boundary):
        got = np.asarray(boundary(mesh.vertices), dtype=float)
    elif isinstance(boundary, VectorField2D):
        got = boundary.values
    else:
        got = np.asarray(boundary, dtype=float)
    if got.ndim == 1:
        got = got[:, None]
    if got.shape != (mesh.n_vertices, m):
        raise ParameterError("boundary data must provide per-vertex values")
    vals[mesh.boundary_mask] = got[mesh.boundary_mask]
    return vals


def _warm_start(spec: OperatorSpec, mesh: Mesh2D, load_arr: np.ndarray,
                u_b: np.ndarray, free: np.ndarray, eps: float) -> np.ndarray:
    """Laplace solve with the true data, then a 1-D energy line search."""
    K = _scalar_stiffness(mesh)
    Kff = K[free][:, free].tocsc()
    lu = spla.splu(Kff)
    m = load_arr.shape[1]
    u_lap = u_b.copy()
    lift = u_b.copy()
    for a in range(m):
        rhs_bc = -K[free][:, ~free] @ u_b[~free, a]
        u_lap[free, a] = lu.solve(load_arr[free, a] + rhs_bc)
        lift[free, a] = lu.solve(rhs_bc)
    direction = u_lap - lift
    if not np.any(direction):
        return lift

    def at(s: float) -> float:
        return energy(spec, mesh, lift + s * direction, load_arr, eps)

    grid = np.geomspace(1e-3, 1e3, 25)
    vals = [at(s) for s in grid]
    k = int(np.argmin(vals))
    lo = grid[max(k - 1, 0)]
    hi = grid[min(k + 1, grid.size - 1)]
    best = minimize_scalar(lambda t: at(math.exp(t)),
                           bounds=(math.log(lo), math.log(hi)), method="bounded")
    s_best = math.exp(best.x) if best.fun < vals[k] else grid[k]
    return lift + s_best * direction


def _armijo(spec, mesh, values, load_arr, eps, direction, base_energy,
            slope) -> tuple[np.ndarray, float, float]:
    """Backtracking step on the energy; returns (new values, energy, step)."""
    step = 1.0
    for _ in range(40):
        trial = values + step * direction
        e = energy(spec, mesh, trial, load_arr, eps)
        if e <= base_energy + 1e-4 * step * slope + 1e-13 * (1.0 + abs(base_energy)):
            return trial, e, step
        step *= 0.5
    return values, base_energy, 0.0


def _minimize(spec, mesh, load_arr, u0, free, eps, cfg: SolveConfig,
              rule: str, max_iter: int) -> tuple[np.ndarray, dict]:
    values = u0.copy()
    m = values.shape[1]
    free_rows = np.repeat(free, m)
    tol = cfg.tolerance * (1.0 + float(np.max(np.abs(load_arr))))
    trace = []
    e = energy(spec, mesh, values, load_arr, eps)
    prev_flat = None
    prev_res = None
    bb_step = None
    converged = False
    iters = 0
    for iters in range(1, max_iter + 1):
        r = _residual(spec, mesh, values, load_arr, eps)
        r[~free] = 0.0
        res_norm = float(np.max(np.abs(r))) if r.size else 0.0
        trace.append((e, res_norm))
        if res_norm <= tol:
            converged = True
            break
        if rule == "newton":
            H = _tangent_matrix(spec, mesh, values, eps)
            Hff = H[free_rows][:, free_rows]
            try:
                step_f = _solve_spd(Hff, -r[free].ravel())
            except RuntimeError:
                rule = "adaptive-curvature"
                continue
            direction = np.zeros_like(values)
            direction[free] = step_f.reshape(-1, m)
            slope = float(np.sum(r * direction))
            if slope >= 0:  # tangent lost definiteness numerically; fall back
                direction = -r
                slope = -float(np.sum(r * r))
        elif rule == "adaptive-curvature":
            flat = values[free].ravel()
            rf = r[free].ravel()
            if prev_flat is not None:
                du = flat - prev_flat
                dr = rf - prev_res
                denom = float(du @ dr)
                bb_step = float(du @ du) / denom if denom > 0 else None
            if bb_step is None or not np.isfinite(bb_step) or bb_step <= 0:
                bb_step = 1.0 / (1.0 + float(np.max(np.abs(rf))))
            bb_step = min(max(bb_step, 1e-14), 1e12)
            prev_flat, prev_res = flat.copy(), rf.copy()
            direction = -bb_step * r
            slope = float(np.sum(r * direction))
        else:  # fixed
            direction = -cfg.fixed_step * r
            slope = float(np.sum(r * direction))
        new_values, new_e, step = _armijo(spec, mesh, values, load_arr, eps,
                                          direction, e, slope)
        if step == 0.0:
            break  # no admissible descent left at this regularization
        if new_e > e + 1e-13 * (1.0 + abs(e)):
            raise ConvergenceError("energy increased on an accepted step",
                                   {"energy": e, "new_energy": new_e})
        values, e = new_values, new_e
    r = _residual(spec, mesh, values, load_arr, eps)
    r[~free] = 0.0
    res_norm = float(np.max(np.abs(r))) if r.size else 0.0
    if res_norm <= tol:
        converged = True
    info = {"iterations": iters, "converged": converged, "residual": res_norm,
            "energy": e, "trace": trace, "tolerance": tol, "rule": rule}
    return values, info


def solve_dirichlet(spec: OperatorSpec, mesh: Mesh2D, load, boundary=None,
                    cfg: SolveConfig | None = None) -> SolveResult:
    """Minimize the regularized energy, then polish without regularization.

    ``load`` is a measure (or a preassembled per-vertex array); ``boundary``
    supplies Dirichlet values (None means zero).  Raises when the main phase
    fails to reach stationarity; the polish phase is best-effort and its
    outcome is reported in the diagnostics.
    """
    cfg = cfg or SolveConfig()
    load_arr = assemble_load(mesh, load) if load is not None else None
    m = spec.m
    if load_arr is None:
        load_arr = np.zeros((mesh.n_vertices, m))
    if load_arr.shape[1] != m:
        raise ParameterError("load components do not match the operator")
    u_b = _boundary_values(mesh, boundary, m)
    free = ~mesh.boundary_mask
    eps = cfg.regularization if cfg.regularization is not None else mesh.h
    if not np.any(load_arr) and not np.any(u_b):
        zero = VectorField2D(mesh, np.zeros((mesh.n_vertices, m)))
        return SolveResult(zero, 0.0, 0.0, 0, True,
                           {"eps": eps, "trivial": True})

    u0 = _warm_start(spec, mesh, load_arr, u_b, free, eps)
    u0[~free] = u_b[~free]
    values, main = _minimize(spec, mesh, load_arr, u0, free, eps, cfg,
                             cfg.step_rule, cfg.max_iter)
    if not main["converged"]:
        raise ConvergenceError("energy minimization stalled before stationarity",
                               {"phase": "regularized", **main})
    diagnostics = {"eps": eps, "main": main}
    if eps > 0 and cfg.polish_iters > 0:
        polished, polish = _minimize(spec, mesh, load_arr, values, free, 0.0,
                                     cfg, "adaptive-curvature", cfg.polish_iters)
        if energy(spec, mesh, polished, load_arr, 0.0) <= \
                energy(spec, mesh, values, load_arr, 0.0):
            values = polished
        diagnostics["polish"] = polish
    final_res = _residual(spec, mesh, values, load_arr, 0.0)
    final_res[~free] = 0.0
    return SolveResult(
        field=VectorField2D(mesh, values),
        energy=energy(spec, mesh, values, load_arr, 0.0),
        residual_norm=float(np.max(np.abs(final_res))),
        iterations=main["iterations"],
        converged=True,
        diagnostics=diagnostics,
    )


def weak_form_residual(spec: OperatorSpec, mesh: Mesh2D, u, load) -> float:
    """Max nodal-basis violation of the discrete weak form at eps = 0."""
    values = _as_values(u, mesh)
    load_arr = assemble_load(mesh, load)
    r = _residual(spec, mesh, values, load_arr, 0.0)
    r[mesh.boundary_mask] = 0.0
    return float(np.max(np.abs(r)))


# ----------------------------------------------------------------------
# radial reference
# ----------------------------------------------------------------------


@dataclass
class RadialSolution:
    """Zero-boundary radial solution on a centered ball of radius R.

    The slope satisfies 2 pi s g(|u'(s)|) = mass (flux balance), so
    u(r) = integral_r^R g^{-1}(mass / (2 pi s)) ds.
    """

    F: YoungFunction
    mass: float
    R: float
    n: int = 2
    center_value: float = field(init=False)
    divergent: bool = field(init=False)

    def __post_init__(self):
        if self.n != 2:
            raise ParameterError("only the planar case n = 2 is implemented")
        if self.R <= 0:
            raise ParameterError("ball radius must be positive")
        if self.mass < 0:
            raise ParameterError("mass must be nonnegative")
        if self.mass == 0:
            self.center_value, self.divergent = 0.0, False
            self._grid = np.array([self.R * 1e-10, self.R])
            self._cum = np.zeros(2)
            return
        res = dyadic_integral(self._slope, self.R, levels=48)
        self.divergent = res.divergent
        self.center_value = math.inf if res.divergent else res.value
        lo = self.R * 1e-10
        grid, cum = cumulative_log_integral(self._slope, lo, self.R, segments=800)
        self._grid, self._cum = grid, cum

    def _slope(self, s):
        s = np.asarray(s, dtype=float)
        return np.asarray(self.F.g_inv(self.mass / (2.0 * math.pi * s)), dtype=float)

    def at(self, r) -> np.ndarray:
        """u(r), clamped to zero outside the ball; exact to quadrature."""
        r = np.asarray(np.atleast_1d(r), dtype=float)
        if np.any(r < 0):
            raise ParameterError("radius must be nonnegative")
        if self.mass == 0:
            return np.zeros_like(r)
        out = np.zeros_like(r)
        total = self._cum[-1]
        for i, ri in np.ndenumerate(r):
            if ri >= self.R:
                continue
            if ri <= self._grid[0]:
                # Below the cached grid the remaining gap is O(1e-10 R).
                out[i] = math.inf if self.divergent else self.center_value
                continue
            j = int(np.searchsorted(self._grid, ri, side="right")) - 1
            partial = self._cum[j]
            if ri > self._grid[j]:
                partial += composite_gl(self._slope,
                                        np.linspace(self._grid[j], ri, 3), nodes=8)
            out[i] = total - partial
        return out

    def slope_at(self, r) -> np.ndarray:
        return self._slope(np.maximum(np.asarray(r, dtype=float), self.R * 1e-12))


def radial_reference(F: YoungFunction, mass: float, R: float, n: int = 2) -> RadialSolution:
    """Reference profile for a centered point mass with zero boundary data."""
    return RadialSolution(F=F, mass=mass, R=R, n=n)


# ----------------------------------------------------------------------
# SOLA loop and comparison maps
# ----------------------------------------------------------------------


def _mesh_grid(mesh: Mesh2D, cell: float) -> GridSpec:
    x0, y0 = np.min(mesh.vertices, axis=0)
    x1, y1 = np.max(mesh.vertices, axis=0)
    nx = max(8, int(round((x1 - x0) / cell)))
    ny = max(8, int(round((y1 - y0) / cell)))
    return GridSpec(x0, x1, y0, y1, nx, ny)


def sola_loop(spec: OperatorSpec, mesh: Mesh2D, M, widths,
              cfg: SolveConfig | None = None) -> dict:
    """Solve with mollified data along a shrinking width schedule.

    Reports the discrete gradient distances sum_T |T| |Du_k - Du_{k+1}|
    between consecutive iterates; their decay is the Cauchy diagnostic for
    the approximation limit.
    """
    widths = [float(w) for w in widths]
    if any(b >= a for a, b in zip(widths, widths[1:])):
        raise ParameterError("mollification widths must strictly decrease")
    cfg = cfg or SolveConfig()
    iterates = []
    boundary = None
    previous = None
    distances = []
    for w in widths:
        grid = _mesh_grid(mesh, min(w / 4.0, mesh.h))
        smooth = mollify(M, w, grid)
        result = solve_dirichlet(spec, mesh, smooth, boundary, cfg)
        iterates.append(result)
        if previous is not None:
            gap = previous.field.gradients() - result.field.gradients()
            distances.append(float(np.sum(mesh.areas *
                                          np.sqrt(np.sum(gap**2, axis=(1, 2))))))
        previous = result
    return {"iterates": iterates, "distances": distances, "widths": widths}


def _oscillation_average(u: VectorField2D, tri_mask: np.ndarray) -> float:
    mesh = u.mesh
    areas = mesh.areas[tri_mask]
    tri_vals = u.values[mesh.triangles[tri_mask]].mean(axis=1)  # (k, m)
    mean = np.sum(areas[:, None] * tri_vals, axis=0) / np.sum(areas)
    osc = np.sqrt(np.sum((tri_vals - mean) ** 2, axis=1))
    return float(np.sum(areas * osc) / np.sum(areas))


def aharmonic_comparison(spec: OperatorSpec, mesh: Mesh2D, u: VectorField2D,
                         ball, M=None, cfg: SolveConfig | None = None) -> dict:
    """Homogeneous re-solve on the half ball with the field's own trace.

    Returns the comparison map v, lhs = avg_{B_{r/2}} |Du - Dv|, and the two
    right-hand-side terms (oscillation over r, and the inverted mass density)
    whose combination with fitted constants dominates lhs.
    """
    x0, r = np.asarray(ball[0], dtype=float), float(ball[1])
    if r <= 0:
        raise ParameterError("comparison ball radius must be positive")
    inner = mesh.ball_triangles(x0, r / 2.0)
    if int(np.count_nonzero(inner)) < 8:
        raise ValidationError("comparison ball is unresolved on this mesh")
    sub, vmap = mesh.submesh(inner)
    cfg = cfg or SolveConfig()
    sub_boundary = VectorField2D(sub, u.values[vmap])
    res = solve_dirichlet(spec, sub, None, sub_boundary, cfg)
    Du = u.gradients()[inner]
    Dv = res.field.gradients()
    gap = np.sqrt(np.sum((Du - Dv) ** 2, axis=(1, 2)))
    areas = sub.areas
    lhs = float(np.sum(areas * gap) / np.sum(areas))
    outer = mesh.ball_triangles(x0, r)
    osc_term = _oscillation_average(u, outer) / r
    mass = M.ball_mass(x0, r) if M is not None else 0.0
    mass_term = float(spec.F.g_inv(mass / r ** (spec.n - 1)))
    return {"v": res.field, "submesh": sub, "vertex_map": vmap, "lhs": lhs,
            "rhs_terms": {"oscillation_over_r": osc_term, "mass_term": mass_term},
            "solve": res}
