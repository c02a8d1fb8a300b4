"""Estimate-verification harness.

Everything here turns an inequality that holds with *some* constant into a
measurement: compute both sides on concrete discrete fields, fit the smallest
admissible constant, and classify whether the fitted constants stay bounded
along the declared refinement axis.  The standalone iteration lemmas carry
their proof constants explicitly and double-check the implication on sampled
data.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field

import numpy as np

from .errors import HypothesisViolation, ParameterError, ValidationError
from .field import OperatorSpec
from .mesh import VectorField2D
from .quadrature import composite_gl
from .report import EstimateReport
from .wolff import wolff_potential
from .young import YoungFunction

# ----------------------------------------------------------------------
# ball averages and the excess functional
# ----------------------------------------------------------------------


def _ball_data(u: VectorField2D, x0, r: float):
    """(areas, centered values, centered mean, reference offset) over the
    triangles inside the ball.

    Values are pre-centered at a reference vertex so that adding a constant
    to the field cancels before any weighted reduction; this keeps the
    excess exactly shift-invariant whenever the pointwise subtractions are
    exact (integer-valued data, shared binades).
    """
    mesh = u.mesh
    mask = mesh.ball_triangles(x0, float(r))
    if not np.any(mask):
        raise ValidationError("the ball contains no triangles of this mesh")
    areas = mesh.areas[mask]
    tris = mesh.triangles[mask]
    # Center at a single vertex value before the one-point triangle rule:
    # the subtraction happens while values are still raw nodal data, so an
    # added constant cancels exactly whenever those subtractions are exact
    # (integer-valued data, shared binades), before any division rounds.
    ref = u.values[tris[0, 0]].copy()
    centered = (u.values[tris] - ref).mean(axis=1)
    mean = np.sum(areas[:, None] * centered, axis=0) / np.sum(areas)
    return areas, centered, mean, ref


def ball_mean(u: VectorField2D, x0, r: float) -> np.ndarray:
    """Area-weighted mean of u over the ball (componentwise)."""
    _, _, mean, ref = _ball_data(u, x0, r)
    return ref + mean


def ball_average_norm(u: VectorField2D, x0, r: float) -> float:
    """Area-weighted average of |u| over the ball."""
    areas, centered, _, ref = _ball_data(u, x0, r)
    vals = centered + ref
    return float(np.sum(areas * np.sqrt(np.sum(vals**2, axis=1)))
                 / np.sum(areas))


def excess(u: VectorField2D, x0, r: float) -> float:
    """Average of |u - (u)_{B_r(x0)}| over the ball: the oscillation excess.

    Invariant under adding constants and positively 1-homogeneous; both hold
    bitwise for data whose shifts and scalings are themselves exact.
    """
    areas, centered, mean, _ = _ball_data(u, x0, r)
    dev = np.sqrt(np.sum((centered - mean) ** 2, axis=1))
    return float(np.sum(areas * dev) / np.sum(areas))


def mean_value_gaps(u: VectorField2D, x0, radii) -> list[float]:
    """|u(x0) - (u)_{B_rho}| per radius; shrinking gaps certify that the
    nodal value is a faithful stand-in for the small-ball limit."""
    nodal = u.vertex_values_at([x0])[0]
    return [float(np.sqrt(np.sum((nodal - ball_mean(u, x0, r)) ** 2)))
            for r in radii]


# ----------------------------------------------------------------------
# excess decay on concentric balls
# ----------------------------------------------------------------------


def decay_ratio_cap(c_osc: float = 1.0, alpha_V: float = 0.5, n: int = 2) -> float:
    """Largest admissible shrink ratio for the concentric-ball iteration.

    min{(2^{n+6} c_osc)^{-(1-alpha_V)/2}, 1/4}; with the trivial oscillation
    constant this is exactly 1/4.
    """
    if c_osc < 1.0:
        raise ParameterError("the oscillation constant is at least one")
    if not 0.0 < alpha_V < 1.0:
        raise ParameterError("alpha_V must lie in (0, 1)")
    return min((2.0 ** (n + 6) * c_osc) ** (-(1.0 - alpha_V) / 2.0), 0.25)


@dataclass
class ExcessSequence:
    """Excess values E_j on concentric balls of radii r_j = sigma^{j+1} r."""

    x0: tuple
    r: float
    sigma: float
    values: np.ndarray
    radii: np.ndarray
    alpha_V: float = 0.5
    alpha_D: float = 0.75

    def __post_init__(self):
        self.values = np.asarray(self.values, dtype=float)
        self.radii = np.asarray(self.radii, dtype=float)
        if not 0.0 < self.sigma <= 0.25:
            raise ParameterError("the shrink ratio must lie in (0, 1/4]")
        if self.values.shape != self.radii.shape:
            raise ParameterError("one excess value per radius is required")
        if np.any(np.diff(self.radii) >= 0):
            raise ParameterError("radii must decrease strictly")
        if np.any(self.values < 0):
            raise ParameterError("excess values are nonnegative")

    def __len__(self) -> int:
        return int(self.values.size)


def _fit_two_constants(lhs, term_a, term_b):
    """Smallest-ish (c_a, c_b) >= 0 with lhs_j <= c_a a_j + c_b b_j for all j.

    Nonnegative least squares picks the shape; a final inflation makes every
    constraint hold with equality in the worst row.
    """
    from scipy.optimize import nnls

    lhs = np.asarray(lhs, dtype=float)
    A = np.column_stack([term_a, term_b])
    if not lhs.size:
        return 0.0, 0.0, True
    coef, _ = nnls(A, lhs)
    pred = A @ coef
    ok = True
    scale = 1.0
    for p, y in zip(pred, lhs):
        if y <= 0:
            continue
        if p <= 0:
            ok = False  # nothing on the right can dominate this row
            continue
        scale = max(scale, y / p)
    return float(coef[0] * scale), float(coef[1] * scale), ok


def excess_decay_run(spec: OperatorSpec, mesh, u: VectorField2D, M, x0,
                     r: float, sigma: float = 0.25, J: int = 4,
                     alpha_V: float = 0.5, alpha_D: float | None = None,
                     min_diameter_cells: int = 10) -> dict:
    """Measure E_j on shrinking balls and fit the one-step decay inequality.

    Tests E_{j+1} <= c_D sigma^{alpha_D} E_j + c_E r_j g^{-1}(mass_j / r_j)
    with fitted (c_D, c_E); balls thinner than ``min_diameter_cells`` mesh
    cells are dropped (with a warning) since their averages are noise.
    """
    if alpha_D is None:
        alpha_D = 0.5 * (alpha_V + 1.0)
    if J < 1:
        raise ParameterError("at least two concentric balls are required")
    x0 = np.asarray(x0, dtype=float)
    radii = [sigma ** (j + 1) * r for j in range(J + 1)]
    resolvable = [rj for rj in radii if 2.0 * rj >= min_diameter_cells * mesh.h]
    if len(resolvable) < len(radii):
        warnings.warn(
            f"truncated the excess sequence to {len(resolvable)} balls; "
            f"smaller radii are unresolved at h={mesh.h:g}", stacklevel=2)
    if len(resolvable) < 2:
        raise ValidationError("no two concentric balls are resolvable")
    radii = resolvable
    E = np.array([excess(u, x0, rj) for rj in radii])
    g_inv = spec.F.g_inv
    mass = np.array([(M.ball_mass(x0, rj) if M is not None else 0.0)
                     for rj in radii])
    mass_term = np.array([rj * float(g_inv(mj / rj ** (spec.n - 1)))
                          for rj, mj in zip(radii, mass)])
    seq = ExcessSequence(tuple(x0), r, sigma, E, np.asarray(radii),
                         alpha_V=alpha_V, alpha_D=alpha_D)
    decay_term = sigma ** alpha_D * E[:-1]
    c_D, c_E, fit_ok = _fit_two_constants(E[1:], decay_term, mass_term[:-1])
    samples = []
    for j in range(len(radii) - 1):
        rhs = decay_term[j] + mass_term[j]
        lhs = E[j + 1]
        ratio = lhs / rhs if rhs > 0 else (0.0 if lhs == 0 else math.inf)
        samples.append({"j": j, "radius": radii[j], "lhs": lhs, "rhs": rhs,
                        "ratio": ratio, "decay_term": decay_term[j],
                        "mass_term": mass_term[j]})
    positive = E > 0
    fitted_exponent = None
    if int(np.count_nonzero(positive)) >= 2:
        slope, _ = np.polyfit(np.log(np.asarray(radii)[positive]),
                              np.log(E[positive]), 1)
        fitted_exponent = float(slope)
    report = EstimateReport.from_samples(
        "excess-decay", samples, axis_key="radius",
        metadata={"c_D": c_D, "c_E": c_E, "fit_ok": fit_ok, "sigma": sigma,
                  "alpha_D": alpha_D, "alpha_V": alpha_V,
                  "fitted_exponent": fitted_exponent})
    return {"sequence": seq, "report": report,
            "constants": {"c_D": c_D, "c_E": c_E},
            "fitted_exponent": fitted_exponent}


# ----------------------------------------------------------------------
# pointwise potential bound
# ----------------------------------------------------------------------


def pointwise_wolff_check(spec: OperatorSpec, mesh, u: VectorField2D, M, x0,
                          r: float, levels: int = 40) -> EstimateReport:
    """Compare |u(x0)| against potential + average on one ball.

    Two sample rows: the magnitude form |u(x0)| <= C (W + avg |u|) and the
    oscillation form |u(x0) - (u)_{B_r}| <= C (W + excess).  A divergent
    potential makes both rows trivially true and is flagged as such.
    """
    x0 = np.asarray(x0, dtype=float)
    W = wolff_potential(spec.F, M, x0, r, n=spec.n, levels=levels) \
        if M is not None else None
    divergent = bool(W.divergent) if W is not None else False
    pot = 0.0 if W is None else (math.inf if divergent else float(W.value))
    nodal_vec = u.vertex_values_at([x0])[0]
    nodal = float(np.sqrt(np.sum(nodal_vec**2)))
    mean = ball_mean(u, x0, r)
    dev = float(np.sqrt(np.sum((nodal_vec - mean) ** 2)))
    avg = ball_average_norm(u, x0, r)
    exc = excess(u, x0, r)

    def row(form, lhs, rhs):
        if rhs > 0:
            ratio = lhs / rhs
        else:
            ratio = 0.0 if lhs == 0 else math.inf
        if math.isinf(rhs):
            ratio = 0.0
        return {"form": form, "radius": float(r), "lhs": lhs, "rhs": rhs,
                "ratio": ratio}

    samples = [row("magnitude", nodal, pot + avg),
               row("oscillation", dev, pot + exc)]
    return EstimateReport.from_samples(
        "pointwise-potential", samples,
        metadata={"potential": pot, "trivially_true": divergent,
                  "average": avg, "excess": exc})


# ----------------------------------------------------------------------
# continuity diagnostics
# ----------------------------------------------------------------------


def vmo_profile(u: VectorField2D, x0, radii, threshold_ratio: float = 0.25) -> dict:
    """Mean oscillation along shrinking balls with a vanishing verdict.

    ``vanishing`` iff the smallest-radius oscillation has dropped below
    ``threshold_ratio`` times the largest-radius one.
    """
    radii = [float(t) for t in radii]
    if any(b >= a for a, b in zip(radii, radii[1:])):
        raise ParameterError("radii must decrease strictly")
    if not radii:
        raise ParameterError("at least one radius is required")
    profile = [(rho, excess(u, x0, rho)) for rho in radii]
    base = profile[0][1]
    threshold = threshold_ratio * base
    vanishing = base == 0.0 or profile[-1][1] <= threshold
    return {"profile": profile, "vanishing": bool(vanishing),
            "threshold": float(threshold)}


def campanato_fit(u: VectorField2D, x0, radii, min_octaves: float = 2.0) -> dict:
    """Log-log slope of excess vs radius: the empirical smoothness exponent.

    Requires at least four radii spanning ``min_octaves`` dyadic octaves.
    All-zero excess short-circuits to the exact-fit flag (slope undefined).
    """
    radii = np.asarray(sorted((float(t) for t in radii), reverse=True))
    if radii.size < 4:
        raise ParameterError("at least four radii are required for the fit")
    if radii[0] / radii[-1] < 2.0 ** min_octaves:
        raise ParameterError(
            f"radii must span at least {min_octaves:g} dyadic octaves")
    exc = np.array([excess(u, x0, rho) for rho in radii])
    positive = exc > 0
    if int(np.count_nonzero(positive)) < 2:
        return {"theta_hat": None, "c_hat": 0.0, "residual": 0.0,
                "exact_fit": True, "radii": radii, "excess": exc}
    logs_r = np.log(radii[positive])
    logs_e = np.log(exc[positive])
    slope, intercept = np.polyfit(logs_r, logs_e, 1)
    fit = slope * logs_r + intercept
    residual = float(np.sqrt(np.mean((fit - logs_e) ** 2)))
    return {"theta_hat": float(slope), "c_hat": float(math.exp(intercept)),
            "residual": residual, "exact_fit": False, "radii": radii,
            "excess": exc}


# ----------------------------------------------------------------------
# iteration lemmas with explicit proof constants
# ----------------------------------------------------------------------


def absorb_constant(beta: float) -> float:
    """Constant of the hole-filling iteration with absorption factor 1/2.

    Along radii r_i = R/2 + (R/4)(1 - lambda^i) with lambda = 2^{-1/(2 beta)}
    the unrolled recursion sums to (2 + sqrt 2) 4^beta (1 - lambda)^{-beta};
    the A-column alone needs the constant 2.
    """
    if beta <= 0:
        raise ParameterError("the singularity exponent beta must be positive")
    lam = 2.0 ** (-1.0 / (2.0 * beta))
    return max(2.0, (2.0 + math.sqrt(2.0)) * 4.0**beta * (1.0 - lam) ** (-beta))


def iterate_absorb(phi, R: float, A: float, B: float, beta: float,
                   samples: int = 41, rtol: float = 1e-9) -> dict:
    """Absorption lemma: from phi(r1) <= phi(r2)/2 + A + B/(r2-r1)^beta on
    [R/2, 3R/4] conclude phi(R/2) <= c(beta) (A + B/R^beta).

    The hypothesis is brute-force checked on every ordered pair of a sample
    grid; a violation raises with the witnessing pair.  Failure of the
    conclusion afterwards can only come from off-grid behavior and raises
    the same way.
    """
    if R <= 0:
        raise ParameterError("R must be positive")
    if A < 0 or B < 0:
        raise ParameterError("A and B must be nonnegative")
    grid = np.linspace(R / 2.0, 3.0 * R / 4.0, int(samples))
    vals = np.array([float(phi(t)) for t in grid])
    if np.any(vals < 0):
        raise ParameterError("phi must be nonnegative on [R/2, 3R/4]")
    for i in range(grid.size):
        for j in range(i + 1, grid.size):
            bound = 0.5 * vals[j] + A + B / (grid[j] - grid[i]) ** beta
            if vals[i] > bound * (1.0 + rtol) + rtol:
                raise HypothesisViolation(
                    "phi grows faster than the absorption hypothesis allows",
                    witness={"r1": float(grid[i]), "r2": float(grid[j]),
                             "phi_r1": float(vals[i]), "bound": float(bound)})
    c = absorb_constant(beta)
    conclusion = c * (A + B / R**beta)
    if vals[0] > conclusion * (1.0 + rtol) + rtol:
        raise HypothesisViolation(
            "the conclusion fails, so phi violates the hypothesis between "
            "sample points",
            witness={"phi_R_half": float(vals[0]), "bound": float(conclusion)})
    return {"constant": c, "lhs": float(vals[0]), "bound": float(conclusion),
            "satisfied": True}


def iterate_geometric(phi, R: float, A: float, eps: float, alpha: float,
                      B: float, beta: float, gamma: float,
                      samples: int = 24, rtol: float = 1e-9) -> dict:
    """Geometric-decay lemma for nondecreasing phi on [0, R].

    From phi(rho) <= A[(rho/r)^alpha + eps] phi(r) + B r^beta conclude, for
    gamma in (beta, alpha) and eps below the threshold eps0 = tau^alpha with
    tau = min{(2A)^{-1/(alpha-gamma)}, 1/2}, that
    phi(rho) <= c [(rho/r)^gamma phi(r) + B rho^beta] with
    c = max{tau^-gamma, tau^{-2 beta} / (1 - tau^{gamma-beta})}.
    When eps >= eps0 the conclusion is not asserted (``eps0_ok`` false).
    """
    if R <= 0:
        raise ParameterError("R must be positive")
    if not 0 <= beta < alpha:
        raise ParameterError("the hypothesis needs 0 <= beta < alpha")
    if not beta < gamma < alpha:
        raise ParameterError("gamma must lie strictly between beta and alpha")
    if A < 0 or B < 0 or eps < 0:
        raise ParameterError("A, B and eps must be nonnegative")
    grid = np.geomspace(R * 1e-3, R, int(samples))
    vals = np.array([float(phi(t)) for t in grid])
    if np.any(vals < 0):
        raise ParameterError("phi must be nonnegative")
    slack = rtol * (1.0 + float(np.max(vals)))
    if np.any(vals[1:] < vals[:-1] - slack):
        k = int(np.argmax(vals[:-1] - vals[1:]))
        raise HypothesisViolation(
            "phi must be nondecreasing",
            witness={"r1": float(grid[k]), "r2": float(grid[k + 1]),
                     "phi_r1": float(vals[k]), "phi_r2": float(vals[k + 1])})
    for i in range(grid.size):
        for j in range(i, grid.size):
            rho, r = grid[i], grid[j]
            bound = A * ((rho / r) ** alpha + eps) * vals[j] + B * r**beta
            if vals[i] > bound * (1.0 + rtol) + slack:
                raise HypothesisViolation(
                    "phi violates the geometric-decay hypothesis",
                    witness={"rho": float(rho), "r": float(r),
                             "phi_rho": float(vals[i]), "bound": float(bound)})
    tau = 0.5 if A <= 0 else min((1.0 / (2.0 * A)) ** (1.0 / (alpha - gamma)), 0.5)
    eps0 = tau**alpha
    if eps >= eps0:
        return {"eps0_ok": False, "eps0": float(eps0), "tau": float(tau),
                "constant": None, "satisfied": None}
    c = max(tau ** (-gamma), tau ** (-2.0 * beta) / (1.0 - tau ** (gamma - beta)))
    for i in range(grid.size):
        for j in range(i, grid.size):
            rho, r = grid[i], grid[j]
            bound = c * ((rho / r) ** gamma * vals[j] + B * rho**beta)
            if vals[i] > bound * (1.0 + rtol) + slack:
                raise HypothesisViolation(
                    "the conclusion fails, so phi violates the hypothesis "
                    "between sample points",
                    witness={"rho": float(rho), "r": float(r),
                             "phi_rho": float(vals[i]), "bound": float(bound)})
    return {"eps0_ok": True, "eps0": float(eps0), "tau": float(tau),
            "constant": float(c), "satisfied": True}


# ----------------------------------------------------------------------
# integral identities and modular inequalities
# ----------------------------------------------------------------------


def cavalieri_check(values, weights, gamma: float) -> dict:
    """Layer-cake identity for weighted samples: quadrature of
    int_0^inf nu({|f| < t}) (1+t)^{-(2+gamma)} dt against the direct sum
    (1+gamma)^{-1} sum w_i (1+|f_i|)^{-(1+gamma)}.

    The integral is computed independently, via the substitution
    u = 1/(1+t) that maps the half-line to (0, 1].
    """
    if gamma <= 0:
        raise ParameterError("gamma must be positive")
    f = np.abs(np.asarray(values, dtype=float)).ravel()
    w = np.asarray(weights, dtype=float).ravel()
    if f.shape != w.shape:
        raise ParameterError("one weight per value is required")
    if np.any(w < 0):
        raise ParameterError("weights must be nonnegative")
    direct = float(np.sum(w / (1.0 + f) ** (1.0 + gamma)) / (1.0 + gamma))
    order = np.argsort(f)
    f_sorted = f[order]
    prefix = np.concatenate([[0.0], np.cumsum(w[order])])

    def below(t):
        t = np.asarray(t, dtype=float)
        return prefix[np.searchsorted(f_sorted, t, side="left")]

    def integrand(uu):
        uu = np.asarray(uu, dtype=float)
        return below(1.0 / uu - 1.0) * uu**gamma

    u_break = np.unique(1.0 / (1.0 + f_sorted))
    u_min = float(u_break[0])
    tail = np.geomspace(u_min * 1e-12, u_min, 48)
    breaks = np.unique(np.concatenate([tail, u_break, [1.0]]))
    integral = float(composite_gl(integrand, breaks, nodes=8))
    return {"integral": integral, "direct": direct,
            "difference": abs(integral - direct)}


def caccioppoli_check(spec: OperatorSpec, v: VectorField2D, x0, r: float,
                      sigma: float = 1.0, sigma_prime: float = 0.875,
                      lam=None) -> dict:
    """Energy-over-oscillation ratio on nested balls for a load-free field:
    avg_{B_{s'r}} G(|Dv|) <= c (s - s')^{-s_G} avg_{B_{s r}} G(|v - lam| / r).

    Returns the fitted c (which for genuinely load-free minimizers must stay
    bounded under mesh refinement).
    """
    if not 0.0 < sigma_prime < sigma <= 1.0:
        raise ParameterError("ball fractions must satisfy 0 < s' < s <= 1")
    mesh = v.mesh
    x0 = np.asarray(x0, dtype=float)
    inner = mesh.ball_triangles(x0, sigma_prime * r)
    outer = mesh.ball_triangles(x0, sigma * r)
    if not np.any(inner) or not np.any(outer):
        raise ValidationError("the nested balls are unresolved on this mesh")
    G = spec.F.G
    Dv = v.gradients()
    rho = np.sqrt(np.sum(Dv**2, axis=(1, 2)))
    lhs = float(np.sum(mesh.areas[inner] * G(rho[inner]))
                / np.sum(mesh.areas[inner]))
    areas_o = mesh.areas[outer]
    tri_vals = v.values[mesh.triangles[outer]].mean(axis=1)
    if lam is None:
        lam = np.sum(areas_o[:, None] * tri_vals, axis=0) / np.sum(areas_o)
    lam = np.asarray(lam, dtype=float)
    dev = np.sqrt(np.sum((tri_vals - lam[None, :]) ** 2, axis=1))
    rhs = float(np.sum(areas_o * G(dev / r)) / np.sum(areas_o))
    s_G = spec.F.indices()[1]
    gap = (sigma - sigma_prime) ** s_G
    if rhs > 0:
        c_fit = lhs * gap / rhs
    else:
        c_fit = 0.0 if lhs == 0 else math.inf
    return {"lhs": lhs, "rhs": rhs, "c_fit": c_fit, "s_G": s_G,
            "sigma": sigma, "sigma_prime": sigma_prime}


def sobolev_poincare_check(F: YoungFunction, u: VectorField2D,
                           n_prime: float = 2.0) -> dict:
    """Modular Sobolev inequality for zero-boundary fields:
    int G(|u|)^{n'} <= C (int G(|Du|))^{n'}; returns the fitted C."""
    mesh = u.mesh
    bvals = u.values[mesh.boundary_mask]
    scale = float(np.max(np.abs(u.values))) if u.values.size else 0.0
    if bvals.size and scale > 0 and np.max(np.abs(bvals)) > 1e-12 * scale:
        raise ValidationError("the field must vanish on the mesh boundary")
    tri_vals = u.values[mesh.triangles].mean(axis=1)
    mag = np.sqrt(np.sum(tri_vals**2, axis=1))
    Du = u.gradients()
    rho = np.sqrt(np.sum(Du**2, axis=(1, 2)))
    lhs = float(np.sum(mesh.areas * np.asarray(F.G(mag)) ** n_prime))
    base = float(np.sum(mesh.areas * F.G(rho)))
    rhs = base**n_prime
    if rhs > 0:
        constant = lhs / rhs
    else:
        constant = 0.0 if lhs == 0 else math.inf
    return {"lhs": lhs, "rhs": rhs, "constant": constant, "n_prime": n_prime}


def oscillation_decay_check(spec: OperatorSpec, v: VectorField2D, x0,
                            R: float, deltas=(0.25, 0.125, 0.0625),
                            varsigma: float = 0.5) -> EstimateReport:
    """Excess contraction for load-free fields:
    excess(delta R) <= c delta^{1 + (varsigma-1)/s_G} excess(R) over the
    sampled shrink factors delta in (0, 1/4]."""
    if not 0.0 < varsigma < 1.0:
        raise ParameterError("varsigma must lie in (0, 1)")
    deltas = [float(d) for d in deltas]
    if any(not 0.0 < d <= 0.25 for d in deltas):
        raise ParameterError("shrink factors must lie in (0, 1/4]")
    s_G = spec.F.indices()[1]
    exponent = 1.0 + (varsigma - 1.0) / s_G
    E_R = excess(v, x0, R)
    samples = []
    for d in sorted(deltas, reverse=True):
        lhs = excess(v, x0, d * R)
        rhs = d**exponent * E_R
        ratio = lhs / rhs if rhs > 0 else (0.0 if lhs == 0 else math.inf)
        samples.append({"delta": d, "radius": d * R, "lhs": lhs, "rhs": rhs,
                        "ratio": ratio})
    return EstimateReport.from_samples(
        "oscillation-decay", samples, axis_key="delta",
        metadata={"exponent": exponent, "varsigma": varsigma, "s_G": s_G,
                  "base_excess": E_R})
