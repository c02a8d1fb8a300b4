"""Numerical laboratory for nonlinear potential estimates with Orlicz growth.

The package is organized around a pipeline:

- :mod:`potlab.young` — growth functions (Young functions) with indices,
  conjugates, and inequality audits;
- :mod:`potlab.measure` — measure data (atoms, radial profiles, grid
  densities), coefficient fields, mollification, Morrey gauges;
- :mod:`potlab.rearrange` — decreasing rearrangements and the Lorentz /
  Marcinkiewicz functionals built on them;
- :mod:`potlab.wolff` — nonlinear potentials via adaptive dyadic quadrature
  and their rearrangement majorants;
- :mod:`potlab.field` — the vector-field algebra of the operator (monotone
  structure, truncations);
- :mod:`potlab.mesh` / :mod:`potlab.solver` — P1 finite elements and the
  regularized energy minimizer with measure loads;
- :mod:`potlab.verify` — ball averages, excess decay, pointwise bounds,
  smoothness-exponent regressions, iteration lemmas;
- :mod:`potlab.scenarios` / :mod:`potlab.cli` — JSON-driven batches that
  emit CSV tables and SVG plots deterministically.
"""

from .errors import (
    ConvergenceError,
    DomainError,
    HypothesisViolation,
    ParameterError,
    PotlabError,
    RangeError,
    ValidationError,
)
from .field import OperatorSpec, monotonicity_gap, truncate, truncate_jacobian
from .measure import (
    AtomsMeasure,
    CoefficientField,
    GridDensityMeasure,
    GridSpec,
    RadialProfileMeasure,
    check_morrey,
    mollify,
)
from .mesh import Mesh2D, VectorField2D
from .rearrange import (
    RearrangementProfile,
    lorentz_integral,
    marcinkiewicz_gauge,
    morrey_gauge,
)
from .report import EstimateReport
from .scenarios import builtin_batch, list_builtin_scenarios, run_batch
from .solver import (
    RadialSolution,
    SolveConfig,
    SolveResult,
    aharmonic_comparison,
    assemble_load,
    radial_reference,
    sola_loop,
    solve_dirichlet,
)
from .verify import (
    ExcessSequence,
    ball_average_norm,
    ball_mean,
    caccioppoli_check,
    campanato_fit,
    cavalieri_check,
    excess,
    excess_decay_run,
    iterate_absorb,
    iterate_geometric,
    pointwise_wolff_check,
    sobolev_poincare_check,
    vmo_profile,
)
from .wolff import (
    potential_shrink_profile,
    rearrangement_bound,
    wolff_dyadic_sum,
    wolff_potential,
)
from .young import YoungFunction, young_inequality_residual

__version__ = "0.1.0"

__all__ = [
    "AtomsMeasure",
    "CoefficientField",
    "ConvergenceError",
    "DomainError",
    "EstimateReport",
    "ExcessSequence",
    "GridDensityMeasure",
    "GridSpec",
    "HypothesisViolation",
    "Mesh2D",
    "OperatorSpec",
    "ParameterError",
    "PotlabError",
    "RadialProfileMeasure",
    "RadialSolution",
    "RangeError",
    "RearrangementProfile",
    "SolveConfig",
    "SolveResult",
    "ValidationError",
    "VectorField2D",
    "YoungFunction",
    "aharmonic_comparison",
    "assemble_load",
    "ball_average_norm",
    "ball_mean",
    "builtin_batch",
    "caccioppoli_check",
    "campanato_fit",
    "cavalieri_check",
    "check_morrey",
    "excess",
    "excess_decay_run",
    "iterate_absorb",
    "iterate_geometric",
    "list_builtin_scenarios",
    "lorentz_integral",
    "marcinkiewicz_gauge",
    "mollify",
    "monotonicity_gap",
    "morrey_gauge",
    "pointwise_wolff_check",
    "potential_shrink_profile",
    "radial_reference",
    "rearrangement_bound",
    "run_batch",
    "sobolev_poincare_check",
    "sola_loop",
    "solve_dirichlet",
    "truncate",
    "truncate_jacobian",
    "vmo_profile",
    "wolff_dyadic_sum",
    "wolff_potential",
    "young_inequality_residual",
]
