"""Scenario engine: JSON descriptors in, CSV/SVG/JSON artifacts out.

A scenario names a task, the analytic ingredients (growth function,
coefficient, measure), a domain with resolutions, and task parameters.
Everything is deterministic given the batch seed; all floating-point output
uses the fixed ``%.12e`` format so reruns are byte-identical.
"""

from __future__ import annotations

import json
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .errors import ConvergenceError, ParameterError, PotlabError, ValidationError
from .field import OperatorSpec
from .measure import (
    AtomsMeasure,
    CoefficientField,
    GridDensityMeasure,
    GridSpec,
    RadialProfileMeasure,
    check_morrey,
    mollify,
)
from .mesh import Mesh2D
from .rearrange import RearrangementProfile, lorentz_integral
from .report import EstimateReport
from .solver import (
    SolveConfig,
    _mesh_grid,
    aharmonic_comparison,
    radial_reference,
    sola_loop,
    solve_dirichlet,
)
from .svg import line_plot
from .verify import (
    campanato_fit,
    excess_decay_run,
    pointwise_wolff_check,
    vmo_profile,
)
from .wolff import (
    potential_shrink_profile,
    rearrangement_bound,
    wolff_dyadic_sum,
    wolff_potential,
)
from .young import YoungFunction, young_inequality_residual

TASKS = ("young-audit", "wolff", "rearrangement-bound", "solve", "sola",
         "comparison", "excess-decay", "pointwise", "vmo", "campanato")

_NEEDS_DOMAIN = {"solve", "sola", "comparison", "excess-decay", "pointwise",
                 "vmo", "campanato"}
_NEEDS_MEASURE = {"wolff", "sola", "comparison", "pointwise", "vmo",
                  "campanato"}

CONFIG_SCHEMA = {
    "type": "object",
    "required": ["scenarios"],
    "additionalProperties": False,
    "properties": {
        "seed": {"type": "integer", "minimum": 0},
        "scenarios": {
            "type": "array",
            "items": {
                "type": "object",
                "required": ["id", "task"],
                "additionalProperties": False,
                "properties": {
                    "id": {"type": "string", "minLength": 1},
                    "description": {"type": "string"},
                    "task": {"enum": list(TASKS)},
                    "young": {
                        "type": "object",
                        "required": ["family"],
                        "additionalProperties": False,
                        "properties": {
                            "family": {"enum": ["power", "zygmund"]},
                            "params": {"type": "object"},
                        },
                    },
                    "coefficient": {
                        "type": "object",
                        "required": ["kind"],
                        "additionalProperties": False,
                        "properties": {
                            "kind": {"enum": ["constant", "sinusoidal",
                                              "radial-bump"]},
                            "params": {"type": "object"},
                        },
                    },
                    "measure": {
                        "type": "object",
                        "required": ["kind"],
                        "properties": {
                            "kind": {"enum": ["atoms", "radial-power",
                                              "uniform", "grid"]},
                        },
                    },
                    "domain": {
                        "type": "object",
                        "required": ["kind"],
                        "properties": {
                            "kind": {"enum": ["disk", "rectangle"]},
                        },
                    },
                    "resolutions": {
                        "type": "array",
                        "items": {"type": "number", "exclusiveMinimum": 0},
                        "minItems": 1,
                    },
                    "params": {"type": "object"},
                    "solver": {
                        "type": "object",
                        "additionalProperties": False,
                        "properties": {
                            "regularization": {"type": ["number", "null"]},
                            "max_iter": {"type": "integer", "minimum": 1},
                            "tolerance": {"type": "number",
                                          "exclusiveMinimum": 0},
                            "step_rule": {"enum": ["newton",
                                                   "adaptive-curvature",
                                                   "fixed"]},
                            "fixed_step": {"type": "number"},
                            "polish_iters": {"type": "integer", "minimum": 0},
                        },
                    },
                    "seed": {"type": "integer", "minimum": 0},
                },
            },
        },
    },
}


def validate_config(config: dict) -> None:
    """Structural validation; raises with a dotted field path on failure."""
    import jsonschema

    try:
        jsonschema.validate(config, CONFIG_SCHEMA)
    except jsonschema.ValidationError as err:
        parts = []
        for p in err.absolute_path:
            if isinstance(p, int):
                parts[-1:] = [f"{parts[-1]}[{p}]"] if parts else [f"[{p}]"]
            else:
                parts.append(str(p))
        path = ".".join(parts) or "<root>"
        raise ValidationError(f"{err.message}", field_path=path) from err
    seen = set()
    for i, sc in enumerate(config["scenarios"]):
        prefix = f"scenarios[{i}]"
        if sc["id"] in seen:
            raise ValidationError(f"duplicate scenario id {sc['id']!r}",
                                  field_path=f"{prefix}.id")
        seen.add(sc["id"])
        if "young" not in sc:
            raise ValidationError("this task needs a young descriptor",
                                  field_path=f"{prefix}.young")
        task = sc["task"]
        if task in _NEEDS_DOMAIN:
            for key in ("domain", "resolutions"):
                if key not in sc:
                    raise ValidationError(f"task {task!r} needs {key!r}",
                                          field_path=f"{prefix}.{key}")
        if task in _NEEDS_MEASURE and "measure" not in sc:
            raise ValidationError(f"task {task!r} needs a measure",
                                  field_path=f"{prefix}.measure")
        if task == "sola" and "widths" not in sc.get("params", {}):
            raise ValidationError("the sola task needs params.widths",
                                  field_path=f"{prefix}.params.widths")


# ----------------------------------------------------------------------
# descriptor builders
# ----------------------------------------------------------------------


def build_measure(desc: dict):
    kind = desc["kind"]
    if kind == "atoms":
        return AtomsMeasure(desc["points"], desc["weights"])
    if kind == "radial-power":
        coeff = float(desc.get("coefficient", 1.0))
        expo = float(desc.get("exponent", 0.0))
        return RadialProfileMeasure(
            tuple(desc.get("center", (0.0, 0.0))),
            lambda s: coeff * np.asarray(s, dtype=float) ** expo,
            float(desc["support_radius"]),
            direction=desc.get("direction"))
    if kind == "uniform":
        dens = float(desc.get("density", 1.0))
        return RadialProfileMeasure(
            tuple(desc.get("center", (0.0, 0.0))),
            lambda s: np.full_like(np.asarray(s, dtype=float), dens),
            float(desc["support_radius"]))
    if kind == "grid":
        g = desc["grid"]
        gs = GridSpec(g["x0"], g["x1"], g["y0"], g["y1"], g["nx"], g["ny"])
        values = np.asarray(desc["values"], dtype=float)
        if values.ndim == 2:
            values = values[:, :, None]
        return GridDensityMeasure(gs, values)
    raise ValidationError(f"unknown measure kind {kind!r}",
                          field_path="measure.kind")


def build_domain(desc: dict, h: float) -> Mesh2D:
    if desc["kind"] == "disk":
        return Mesh2D.disk(float(desc.get("radius", 1.0)), h,
                           center=tuple(desc.get("center", (0.0, 0.0))))
    x0, x1 = float(desc.get("x0", 0.0)), float(desc.get("x1", 1.0))
    y0, y1 = float(desc.get("y0", 0.0)), float(desc.get("y1", 1.0))
    nx = max(2, int(round((x1 - x0) / h)))
    ny = max(2, int(round((y1 - y0) / h)))
    return Mesh2D.rectangle(x0, x1, y0, y1, nx, ny)


def build_boundary(desc: dict | None):
    if desc is None or desc.get("kind", "zero") == "zero":
        return None
    kind = desc["kind"]
    if kind == "linear":
        bx, by = (float(c) for c in desc.get("coeffs", (1.0, 0.0)))
        return lambda p: bx * p[:, 0] + by * p[:, 1]
    if kind == "harmonic-quadratic":
        amp = float(desc.get("amp", 0.3))
        bx, by = (float(c) for c in desc.get("linear", (1.0, 0.0)))
        return lambda p: (bx * p[:, 0] + by * p[:, 1]
                          + amp * (p[:, 0] ** 2 - p[:, 1] ** 2))
    raise ValidationError(f"unknown boundary kind {kind!r}",
                          field_path="params.boundary.kind")


@dataclass
class Scenario:
    """One resolved unit of work."""

    id: str
    task: str
    young: dict | None = None
    coefficient: dict | None = None
    measure: dict | None = None
    domain: dict | None = None
    resolutions: tuple = ()
    params: dict = field(default_factory=dict)
    solver: dict = field(default_factory=dict)
    seed: int | None = None
    description: str = ""

    @classmethod
    def from_dict(cls, d: dict) -> "Scenario":
        return cls(id=d["id"], task=d["task"], young=d.get("young"),
                   coefficient=d.get("coefficient"), measure=d.get("measure"),
                   domain=d.get("domain"),
                   resolutions=tuple(d.get("resolutions", ())),
                   params=dict(d.get("params", {})),
                   solver=dict(d.get("solver", {})), seed=d.get("seed"),
                   description=d.get("description", ""))

    def growth(self) -> YoungFunction:
        return YoungFunction.from_descriptor(self.young)

    def coefficient_field(self) -> CoefficientField:
        if self.coefficient is None:
            return CoefficientField.constant(1.0)
        return CoefficientField.from_descriptor(self.coefficient)

    def solve_config(self) -> SolveConfig:
        return SolveConfig(**self.solver)


# ----------------------------------------------------------------------
# artifact helpers
# ----------------------------------------------------------------------


def _cell(v) -> str:
    if isinstance(v, bool) or isinstance(v, np.bool_):
        return "true" if v else "false"
    if isinstance(v, (int, float, np.integer, np.floating)):
        return f"{float(v):.12e}"
    return str(v)


def write_csv(path, header, rows) -> None:
    lines = [",".join(header)]
    lines.extend(",".join(_cell(v) for v in row) for row in rows)
    Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8")


def _solve_scenario_case(sc: Scenario, F, mesh, M, boundary=None,
                         mollify_width: float | None = None):
    m = M.components if M is not None else 1
    spec = OperatorSpec(F, a=sc.coefficient_field(), m=m)
    load = M
    if M is not None and mollify_width is not None:
        grid = _mesh_grid(mesh, min(mollify_width / 4.0, mesh.h))
        load = mollify(M, mollify_width, grid)
    result = solve_dirichlet(spec, mesh, load, boundary, sc.solve_config())
    return spec, result


# ----------------------------------------------------------------------
# task implementations (each returns a JSON-safe summary dict)
# ----------------------------------------------------------------------


def _task_young_audit(sc: Scenario, rng, out: Path) -> dict:
    F = sc.growth()
    p = sc.params
    t = np.geomspace(p.get("t_lo", 1e-3), p.get("t_hi", 1e3),
                     int(p.get("samples", 200)))
    g = np.asarray(F.g(t), dtype=float)
    roundtrip = np.abs(np.asarray(F.g_inv(g), dtype=float) - t) / t
    pairs = int(p.get("pairs", 2000))
    ts = np.exp(rng.uniform(np.log(1e-3), np.log(1e3), size=(pairs, 2)))
    residuals = young_inequality_residual(F, ts[:, 0], ts[:, 1])
    res_min = float(np.min(residuals))
    eq_gap = float(np.max(np.abs(young_inequality_residual(F, t, g))
                          / (1.0 + t * g)))
    write_csv(out / "young_samples.csv",
              ["t", "G", "g", "conjugate_of_g", "roundtrip_rel_err"],
              [(ti, float(F.G(ti)), gi, float(F.conjugate(gi)), ri)
               for ti, gi, ri in zip(t, g, roundtrip)])
    line_plot([("G", t, np.asarray(F.G(t), dtype=float)), ("g", t, g)],
              out / "growth.svg", title=f"growth {sc.young['family']}",
              xlabel="t", ylabel="value", loglog=True)
    if res_min < -1e-9:
        raise ConvergenceError("Young inequality violated",
                               {"min_residual": res_min})
    i_G, s_G = F.indices()
    return {"indices": [i_G, s_G],
            "derivative_indices": list(F.derivative_indices()),
            "roundtrip_max_rel": float(np.max(roundtrip)),
            "young_residual_min": res_min,
            "equality_gap_at_s_eq_g": eq_gap}


def _task_wolff(sc: Scenario, rng, out: Path) -> dict:
    F = sc.growth()
    M = build_measure(sc.measure)
    p = sc.params
    x0 = np.asarray(p.get("x0", (0.0, 0.0)), dtype=float)
    R = float(p.get("R", 1.0))
    levels = int(p.get("levels", 40))
    pot = wolff_potential(F, M, x0, R, levels=levels)
    dyadic = wolff_dyadic_sum(F, M, x0, R, levels=levels)
    write_csv(out / "wolff_terms.csv", ["k", "radius", "term"],
              [(k, r, t) for k, (r, t) in
               enumerate(zip(dyadic["radii"], dyadic["terms"]), start=1)])
    line_plot([("dyadic term", dyadic["radii"], dyadic["terms"])],
              out / "wolff_terms.svg", title="dyadic shell contributions",
              xlabel="radius", ylabel="term", loglog=True)
    summary = {"value": None if pot.divergent else float(pot.value),
               "divergent": bool(pot.divergent),
               "dyadic_sum": None if dyadic["divergent"] else float(dyadic["value"]),
               "dyadic_divergent": bool(dyadic["divergent"])}
    if not pot.divergent and not dyadic["divergent"] and pot.value > 0:
        summary["sum_over_integral"] = float(dyadic["value"] / pot.value)
    shrink = p.get("shrink_radii")
    if shrink:
        rows = potential_shrink_profile(F, M, [x0], shrink, levels=levels)
        write_csv(out / "potential_shrink.csv",
                  ["radius", "sup_potential", "divergent"],
                  [(r["radius"], r["sup_potential"], r["divergent"])
                   for r in rows])
        summary["shrink_profile"] = [
            [r["radius"], None if r["divergent"] else r["sup_potential"]]
            for r in rows]
    return summary


def _task_rearrangement_bound(sc: Scenario, rng, out: Path) -> dict:
    F = sc.growth()
    p = sc.params
    g = p.get("grid", {"x0": -1.0, "x1": 1.0, "y0": -1.0, "y1": 1.0,
                       "nx": 48, "ny": 48})
    gs = GridSpec(g["x0"], g["x1"], g["y0"], g["y1"], g["nx"], g["ny"])
    count = int(p.get("count", 20))
    amplitude = float(p.get("amplitude", 1.0))
    R = float(p.get("R", 1.0))
    x0 = np.asarray(p.get("x0", ((gs.x0 + gs.x1) / 2.0,
                                 (gs.y0 + gs.y1) / 2.0)), dtype=float)
    samples = []
    volumes = np.full(gs.nx * gs.ny, gs.cell_volume)
    for i in range(count):
        values = rng.uniform(0.0, amplitude, size=(gs.ny, gs.nx))
        M = GridDensityMeasure(gs, values[:, :, None])
        profile = RearrangementProfile.from_cells(values.ravel(), volumes)
        lhs_res = wolff_potential(F, M, x0, R)
        rhs_res = rearrangement_bound(F, profile, R)
        if lhs_res.divergent or rhs_res.divergent:
            raise ConvergenceError(
                "unexpected divergence in the rearrangement comparison",
                {"sample": i})
        lhs, rhs = float(lhs_res.value), float(rhs_res.value)
        ratio = lhs / rhs if rhs > 0 else (0.0 if lhs == 0 else math.inf)
        samples.append({"sample": i, "lhs": lhs, "rhs": rhs, "ratio": ratio})
    report = EstimateReport.from_samples("rearrangement-bound", samples,
                                         metadata={"count": count, "R": R})
    report.to_csv(out / "rearrangement_samples.csv")
    summary = {"fitted_constant": report.fitted_constant,
               "verdict": report.verdict, "count": count}
    lor = p.get("lorentz_check")
    if lor:
        indicator = RearrangementProfile(np.array([1.0]), np.array([1.0]))
        res = lorentz_integral(indicator, float(lor["alpha"]),
                               float(lor["beta"]))
        summary["lorentz_indicator"] = {
            "alpha": lor["alpha"], "beta": lor["beta"],
            "value": None if res.divergent else float(res.value),
            "divergent": bool(res.divergent)}
    return summary


def _sample_cross_section(result, mesh, out: Path, name: str) -> None:
    lo = np.min(mesh.vertices, axis=0)
    hi = np.max(mesh.vertices, axis=0)
    mid_y = 0.5 * (lo[1] + hi[1])
    xs = np.linspace(lo[0] + 1e-9, hi[0] - 1e-9, 101)
    pts = np.column_stack([xs, np.full_like(xs, mid_y)])
    vals = result.field.vertex_values_at(pts)
    mags = np.sqrt(np.sum(vals**2, axis=1))
    write_csv(out / f"{name}.csv", ["x", "magnitude"], list(zip(xs, mags)))
    line_plot([("|u|", xs, mags)], out / f"{name}.svg",
              title="mid-line cross section", xlabel="x", ylabel="|u|")


def _task_solve(sc: Scenario, rng, out: Path) -> dict:
    F = sc.growth()
    M = build_measure(sc.measure) if sc.measure else None
    boundary = build_boundary(sc.params.get("boundary"))
    width_cells = sc.params.get("mollify_width_cells")
    rows = []
    finest = None
    for h in sorted(sc.resolutions, reverse=True):
        mesh = build_domain(sc.domain, h)
        width = width_cells * mesh.h if width_cells else None
        _, result = _solve_scenario_case(sc, F, mesh, M, boundary, width)
        rows.append((mesh.h, mesh.n_vertices, result.energy,
                     result.residual_norm, result.iterations))
        finest = (mesh, result)
    write_csv(out / "solves.csv",
              ["h", "vertices", "energy", "residual", "iterations"], rows)
    mesh, result = finest
    result.field.to_csv(out / "field.csv")
    _sample_cross_section(result, mesh, out, "cross_section")
    return {"cases": [{"h": r[0], "vertices": int(r[1]), "energy": r[2],
                       "residual": r[3], "iterations": int(r[4])}
                      for r in rows]}


def _task_sola(sc: Scenario, rng, out: Path) -> dict:
    F = sc.growth()
    M = build_measure(sc.measure)
    h = min(sc.resolutions)
    mesh = build_domain(sc.domain, h)
    spec = OperatorSpec(F, a=sc.coefficient_field(), m=M.components)
    outcome = sola_loop(spec, mesh, M, sc.params["widths"], sc.solve_config())
    widths = outcome["widths"]
    write_csv(out / "sola_distances.csv", ["width", "distance_to_previous"],
              [(w, d) for w, d in zip(widths[1:], outcome["distances"])])
    if outcome["distances"]:
        line_plot([("gradient distance", widths[1:], outcome["distances"])],
                  out / "sola_distances.svg",
                  title="approximation-step gradient distances",
                  xlabel="mollification width", ylabel="distance", loglog=True)
    outcome["iterates"][-1].field.to_csv(out / "field.csv")
    return {"widths": list(widths), "distances": list(outcome["distances"]),
            "energies": [it.energy for it in outcome["iterates"]]}


def _task_comparison(sc: Scenario, rng, out: Path) -> dict:
    F = sc.growth()
    M = build_measure(sc.measure)
    p = sc.params
    h = min(sc.resolutions)
    mesh = build_domain(sc.domain, h)
    width_cells = p.get("mollify_width_cells")
    width = width_cells * mesh.h if width_cells else None
    spec, result = _solve_scenario_case(sc, F, mesh, M, None, width)
    x0 = np.asarray(p.get("x0", (0.0, 0.0)), dtype=float)
    samples = []
    for r in sorted((float(t) for t in p["radii"]), reverse=True):
        comp = aharmonic_comparison(spec, mesh, result.field, (x0, r), M=M,
                                    cfg=sc.solve_config())
        rhs = comp["rhs_terms"]["oscillation_over_r"] + \
            comp["rhs_terms"]["mass_term"]
        lhs = comp["lhs"]
        ratio = lhs / rhs if rhs > 0 else (0.0 if lhs == 0 else math.inf)
        samples.append({"radius": r, "lhs": lhs, "rhs": rhs, "ratio": ratio,
                        "oscillation_over_r":
                            comp["rhs_terms"]["oscillation_over_r"],
                        "mass_term": comp["rhs_terms"]["mass_term"]})
    report = EstimateReport.from_samples("comparison", samples,
                                         axis_key="radius")
    report.to_csv(out / "comparison_samples.csv")
    return {"fitted_constant": report.fitted_constant,
            "verdict": report.verdict,
            "radii": [s["radius"] for s in samples]}


def _task_excess_decay(sc: Scenario, rng, out: Path) -> dict:
    F = sc.growth()
    M = build_measure(sc.measure) if sc.measure else None
    p = sc.params
    boundary = build_boundary(p.get("boundary"))
    h = min(sc.resolutions)
    mesh = build_domain(sc.domain, h)
    width_cells = p.get("mollify_width_cells")
    width = width_cells * mesh.h if width_cells else None
    spec, result = _solve_scenario_case(sc, F, mesh, M, boundary, width)
    x0 = np.asarray(p["x0"], dtype=float)
    outcome = excess_decay_run(
        spec, mesh, result.field, M, x0, float(p["r"]),
        sigma=float(p.get("sigma", 0.25)), J=int(p.get("J", 4)),
        alpha_V=float(p.get("alpha_V", 0.5)))
    seq = outcome["sequence"]
    write_csv(out / "excess_sequence.csv", ["j", "radius", "excess"],
              [(j, rj, ej) for j, (rj, ej)
               in enumerate(zip(seq.radii, seq.values))])
    outcome["report"].to_csv(out / "decay_samples.csv")
    positive = seq.values > 0
    if np.any(positive):
        line_plot([("excess", seq.radii[positive], seq.values[positive])],
                  out / "excess_decay.svg", title="excess vs radius",
                  xlabel="radius", ylabel="excess", loglog=True)
    return {"constants": outcome["constants"],
            "fitted_exponent": outcome["fitted_exponent"],
            "levels": len(seq), "alpha_D": seq.alpha_D}


def _task_pointwise(sc: Scenario, rng, out: Path) -> dict:
    F = sc.growth()
    M = build_measure(sc.measure)
    p = sc.params
    x0 = np.asarray(p.get("x0", (0.0, 0.0)), dtype=float)
    radius = float(p.get("radius", 1.0))
    width_cells = p.get("mollify_width_cells")
    all_samples = []
    per_h = []
    finest = None
    for h in sorted(sc.resolutions, reverse=True):
        mesh = build_domain(sc.domain, h)
        width = width_cells * mesh.h if width_cells else None
        spec, result = _solve_scenario_case(sc, F, mesh, M, None, width)
        rep = pointwise_wolff_check(spec, mesh, result.field, M, x0, radius)
        for s in rep.samples:
            all_samples.append({"h": mesh.h, **s})
        per_h.append({"h": mesh.h, "fitted_constant": rep.fitted_constant,
                      "trivially_true": rep.metadata["trivially_true"]})
        finest = (mesh, result)
    report = EstimateReport.from_samples("pointwise-potential", all_samples,
                                         axis_key="h",
                                         metadata={"radius": radius})
    report.to_csv(out / "pointwise_samples.csv")
    summary = {"fitted_constant": report.fitted_constant,
               "verdict": report.verdict, "per_h": per_h}
    consts = [c["fitted_constant"] for c in per_h
              if c["fitted_constant"] > 0]
    if len(consts) >= 2:
        summary["stability_factor"] = float(max(consts) / min(consts))
    rad = p.get("radial_reference")
    if rad:
        mesh, result = finest
        ref = radial_reference(F, float(rad["mass"]), radius)
        center = np.asarray(sc.domain.get("center", (0.0, 0.0)), dtype=float)
        rr = np.hypot(mesh.vertices[:, 0] - center[0],
                      mesh.vertices[:, 1] - center[1])
        order = np.argsort(rr)
        mags = np.sqrt(np.sum(result.field.values**2, axis=1))
        write_csv(out / "radial_comparison.csv",
                  ["r", "computed", "reference"],
                  [(rr[i], mags[i], float(ref.at(rr[i])[0])) for i in order])
        line_plot([("computed", rr[order], mags[order]),
                   ("reference", rr[order], ref.at(rr[order]))],
                  out / "radial_comparison.svg",
                  title="radial profile vs reference", xlabel="r",
                  ylabel="|u|")
    return summary


def _task_vmo(sc: Scenario, rng, out: Path) -> dict:
    F = sc.growth()
    M = build_measure(sc.measure)
    p = sc.params
    h = min(sc.resolutions)
    mesh = build_domain(sc.domain, h)
    width_cells = p.get("mollify_width_cells")
    width = width_cells * mesh.h if width_cells else None
    spec, result = _solve_scenario_case(sc, F, mesh, M, None, width)
    x0 = np.asarray(p["x0"], dtype=float)
    radii = [float(t) for t in p["radii"]]
    prof = vmo_profile(result.field, x0, radii,
                       threshold_ratio=float(p.get("threshold_ratio", 0.25)))
    shrink = potential_shrink_profile(F, M, [x0], radii)
    by_radius = {row["radius"]: row for row in shrink}
    write_csv(out / "vmo_profile.csv",
              ["radius", "mean_oscillation", "sup_potential"],
              [(rho, osc, by_radius[rho]["sup_potential"])
               for rho, osc in prof["profile"]])
    line_plot([("oscillation", [r for r, _ in prof["profile"]],
                [o for _, o in prof["profile"]]),
               ("potential", [row["radius"] for row in shrink],
                [row["sup_potential"] for row in shrink])],
              out / "vmo_profile.svg", title="oscillation and potential decay",
              xlabel="radius", ylabel="value", loglog=True)
    return {"vanishing": prof["vanishing"],
            "profile": [[r, o] for r, o in prof["profile"]],
            "potential_shrink": [[row["radius"], row["sup_potential"]]
                                 for row in shrink]}


def _task_campanato(sc: Scenario, rng, out: Path) -> dict:
    F = sc.growth()
    M = build_measure(sc.measure)
    p = sc.params
    h = min(sc.resolutions)
    mesh = build_domain(sc.domain, h)
    width_cells = p.get("mollify_width_cells")
    width = width_cells * mesh.h if width_cells else None
    spec, result = _solve_scenario_case(sc, F, mesh, M, None, width)
    x0 = np.asarray(p["x0"], dtype=float)
    radii = [float(t) for t in p["radii"]]
    fit = campanato_fit(result.field, x0, radii)
    write_csv(out / "campanato_excess.csv", ["radius", "excess"],
              list(zip(fit["radii"], fit["excess"])))
    summary = {"theta_hat": fit["theta_hat"], "c_hat": fit["c_hat"],
               "residual": fit["residual"], "exact_fit": fit["exact_fit"]}
    theta = p.get("theta")
    if theta is not None:
        morrey = check_morrey(M, F, float(theta), radii, [x0], n=spec.n)
        summary["morrey"] = {"theta": float(theta),
                             "verdict": morrey.verdict,
                             "fitted_constant": morrey.fitted_constant}
    if not fit["exact_fit"]:
        line_plot([("excess", fit["radii"], fit["excess"])],
                  out / "campanato_fit.svg", title="excess scaling",
                  xlabel="radius", ylabel="excess", loglog=True)
    return summary


_TASK_RUNNERS = {
    "young-audit": _task_young_audit,
    "wolff": _task_wolff,
    "rearrangement-bound": _task_rearrangement_bound,
    "solve": _task_solve,
    "sola": _task_sola,
    "comparison": _task_comparison,
    "excess-decay": _task_excess_decay,
    "pointwise": _task_pointwise,
    "vmo": _task_vmo,
    "campanato": _task_campanato,
}


# ----------------------------------------------------------------------
# batch runner
# ----------------------------------------------------------------------


def run_scenario(sc: Scenario, batch_seed: int, index: int, out_root) -> dict:
    out = Path(out_root) / sc.id
    out.mkdir(parents=True, exist_ok=True)
    rng = np.random.default_rng([batch_seed,
                                 sc.seed if sc.seed is not None else index])
    entry = {"id": sc.id, "task": sc.task}
    try:
        summary = _TASK_RUNNERS[sc.task](sc, rng, out)
        entry["status"] = "ok"
        entry["summary"] = summary
    except PotlabError as err:
        entry["status"] = "failed"
        entry["diagnostic"] = str(err)
        if isinstance(err, ConvergenceError):
            entry["details"] = {k: v for k, v in err.diagnostics.items()
                                if isinstance(v, (int, float, str, bool))}
    entry["artifacts"] = sorted(p.name for p in out.iterdir() if p.is_file())
    return entry


def run_batch(config: dict, out_root, jobs: int = 1,
              seed_override: int | None = None) -> dict:
    """Execute every scenario; returns the merged summary (also written to
    ``summary.json``).  Scenario work runs in a thread pool; the summary is
    merged single-threaded in config order."""
    validate_config(config)
    out_root = Path(out_root)
    out_root.mkdir(parents=True, exist_ok=True)
    seed = int(seed_override if seed_override is not None
               else config.get("seed", 0))
    scenarios = [Scenario.from_dict(d) for d in config["scenarios"]]
    results: dict[str, dict] = {}
    if jobs > 1 and len(scenarios) > 1:
        with ThreadPoolExecutor(max_workers=jobs) as pool:
            futures = {sc.id: pool.submit(run_scenario, sc, seed, i, out_root)
                       for i, sc in enumerate(scenarios)}
        results = {sid: f.result() for sid, f in futures.items()}
    else:
        for i, sc in enumerate(scenarios):
            results[sc.id] = run_scenario(sc, seed, i, out_root)
    entries = [results[sc.id] for sc in scenarios]
    summary = {"seed": seed, "n_scenarios": len(entries),
               "failures": [e["id"] for e in entries
                            if e["status"] != "ok"],
               "scenarios": entries}
    (out_root / "summary.json").write_text(
        json.dumps(summary, indent=2, sort_keys=True) + "\n",
        encoding="utf-8")
    return summary


# ----------------------------------------------------------------------
# builtin catalog
# ----------------------------------------------------------------------


def _catalog() -> list[dict]:
    young_p3 = {"family": "power", "params": {"p": 3.0}}
    young_p2 = {"family": "power", "params": {"p": 2.0}}
    zygmund31 = {"family": "zygmund", "params": {"p": 3.0, "alpha": 1.0}}
    disk = {"kind": "disk", "radius": 1.0}
    dirac = {"kind": "atoms", "points": [[0.0, 0.0]], "weights": [1.0]}
    return [
        {"id": "young-audit-p3", "task": "young-audit", "young": young_p3,
         "description": "index/conjugate/inequality audit of the cubic power law"},
        {"id": "young-audit-zygmund31", "task": "young-audit",
         "young": zygmund31,
         "description": "audit of the log-perturbed cubic growth"},
        {"id": "wolff-dirac-p3", "task": "wolff", "young": young_p3,
         "measure": dirac, "params": {"R": 1.0, "shrink_radii":
                                      [1.0, 0.5, 0.25, 0.125]},
         "description": "point-mass potential with closed-form value 2/sqrt(3)"},
        {"id": "rearrangement-bound-random", "task": "rearrangement-bound",
         "young": young_p3,
         "params": {"count": 20, "R": 1.0,
                    "lorentz_check": {"alpha": 2.0, "beta": 1.0}},
         "description": "potential majorized through the symmetrized density "
                        "over random grid data; Lorentz indicator closed form"},
        {"id": "solve-linear-oracle", "task": "solve", "young": young_p2,
         "measure": {"kind": "atoms", "points": [[0.4, 0.55], [0.7, 0.3]],
                     "weights": [1.0, -0.5]},
         "domain": {"kind": "rectangle", "x0": 0.0, "x1": 1.0, "y0": 0.0,
                    "y1": 1.0},
         "resolutions": [0.0625, 0.03125],
         "description": "quadratic-energy solve (reduces to the discrete "
                        "Laplace system)"},
        {"id": "dirac-p3-disk", "task": "pointwise", "young": young_p3,
         "measure": dirac, "domain": disk, "resolutions": [0.03125, 0.015625],
         "params": {"x0": [0.0, 0.0], "radius": 1.0,
                    "mollify_width_cells": 2.0,
                    "radial_reference": {"mass": 1.0}},
         "description": "pointwise potential bound for the centered point "
                        "mass with the radial closed form"},
        {"id": "sola-dirac-p3", "task": "sola", "young": young_p3,
         "measure": dirac, "domain": disk, "resolutions": [0.0416667],
         "params": {"widths": [0.4, 0.2, 0.1]},
         "description": "shrinking-mollification solve chain with gradient "
                        "Cauchy distances"},
        {"id": "comparison-dirac-p3", "task": "comparison", "young": young_p3,
         "measure": dirac, "domain": disk, "resolutions": [0.03125],
         "params": {"x0": [0.0, 0.0], "radii": [0.6, 0.45, 0.3],
                    "mollify_width_cells": 2.0},
         "description": "load-free re-solve on half balls against the "
                        "oscillation + mass majorant"},
        {"id": "excess-decay-aharmonic", "task": "excess-decay",
         "young": young_p3,
         "domain": {"kind": "rectangle", "x0": 0.0, "x1": 1.0, "y0": 0.0,
                    "y1": 1.0},
         "resolutions": [0.00520833],
         "params": {"x0": [0.5, 0.5], "r": 1.9, "sigma": 0.25, "J": 2,
                    "boundary": {"kind": "harmonic-quadratic", "amp": 0.3}},
         "description": "concentric-ball excess contraction for a load-free "
                        "minimizer"},
        {"id": "pointwise-zygmund-weighted", "task": "pointwise",
         "young": zygmund31,
         "coefficient": {"kind": "sinusoidal",
                         "params": {"base": 1.0, "amp": 0.3, "kx": 2.0,
                                    "ky": 1.0}},
         "measure": {"kind": "uniform", "density": 1.0,
                     "support_radius": 1.0},
         "domain": disk, "resolutions": [0.0416667],
         "params": {"x0": [0.0, 0.0], "radius": 1.0},
         "description": "log-perturbed growth with an oscillating continuous "
                        "weight and a uniform load"},
        {"id": "vmo-morrey-p3", "task": "vmo", "young": young_p3,
         "measure": {"kind": "radial-power", "coefficient": 1.0,
                     "exponent": -0.5, "support_radius": 1.0},
         "domain": disk, "resolutions": [0.0208333],
         "params": {"x0": [0.0, 0.0], "radii": [0.8, 0.4, 0.2, 0.1]},
         "description": "vanishing mean oscillation against the shrinking "
                        "potential for a scaling density"},
        {"id": "campanato-dirac-p3", "task": "campanato", "young": young_p3,
         "measure": dirac, "domain": disk, "resolutions": [0.03125],
         "params": {"x0": [0.0, 0.0], "radii": [0.4, 0.2, 0.1, 0.05],
                    "theta": 0.5, "mollify_width_cells": 2.0},
         "description": "smoothness-exponent regression for the point mass "
                        "under the mass-scaling gauge"},
    ]


def list_builtin_scenarios() -> list[dict]:
    """Stable catalog of runnable scenario descriptors."""
    entries = _catalog()
    ids = [e["id"] for e in entries]
    if len(set(ids)) != len(ids):  # pragma: no cover - packaging invariant
        raise ParameterError("catalog ids must be unique")
    return entries


def builtin_batch(ids=None, seed: int = 0) -> dict:
    """Assemble a config dict from catalog entries (all by default)."""
    catalog = {e["id"]: e for e in list_builtin_scenarios()}
    if ids is None:
        picked = list(catalog.values())
    else:
        missing = [i for i in ids if i not in catalog]
        if missing:
            raise ParameterError(f"unknown catalog ids: {missing}")
        picked = [catalog[i] for i in ids]
    return {"seed": seed, "scenarios": picked}
