"""Caputo derivatives, Mittag-Leffler solutions and regularity diagnostics
for time-fractional heat and wave problems."""

from fracreg.caputo import (
    SampledFunction,
    TimeGrid,
    caputo_quadrature,
    l1_operator,
    l2_operator,
    lemma1_bound_check,
)
from fracreg.exactsol import EigenMode, ExactProblem, exact_dt, exact_dtt, exact_value
from fracreg.fdsolver import ProblemSpec, SolutionField, SpaceGrid, convergence_study, solve
from fracreg.regdiag import (
    Assumption1,
    DiagnosticsReport,
    SteadyOperator,
    assumption1_check,
    corollary1_limit_check,
    diagnose,
    estimate_singularity_exponent,
    forced_initial_condition,
    theorem_residual,
)
from fracreg.specialfn import (
    FractionalOrder,
    SeriesEvalConfig,
    gamma,
    ml_second_time_derivative,
    ml_time_derivative,
    mittag_leffler,
)

__version__ = "0.1.0"

__all__ = [
    "Assumption1",
    "DiagnosticsReport",
    "EigenMode",
    "ExactProblem",
    "FractionalOrder",
    "ProblemSpec",
    "SampledFunction",
    "SeriesEvalConfig",
    "SolutionField",
    "SpaceGrid",
    "SteadyOperator",
    "TimeGrid",
    "assumption1_check",
    "caputo_quadrature",
    "convergence_study",
    "corollary1_limit_check",
    "diagnose",
    "estimate_singularity_exponent",
    "exact_dt",
    "exact_dtt",
    "exact_value",
    "forced_initial_condition",
    "gamma",
    "l1_operator",
    "l2_operator",
    "lemma1_bound_check",
    "ml_second_time_derivative",
    "ml_time_derivative",
    "mittag_leffler",
    "solve",
    "theorem_residual",
]
