"""Exclusivity, contextuality and quantum-measure bounds for finite scenarios.

Values are exact rationals throughout unless a table was entered with
decimals, in which case comparisons use an absolute tolerance of 1e-9.
"""

__version__ = "0.1.0"

from .ce import (
    CEReport,
    NCResult,
    NonMonotoneError,
    OptResult,
    ThresholdResult,
    ce_check,
    ce_optimize,
    consistent_optimize,
    nc_check,
    nc_optimize,
    threshold_search,
)
from .cliques import CliqueSet, maximal_cliques
from .kernels import BACKEND
from .limits import Limits, ResourceLimitError, get_limits
from .probability import (
    JointDistribution,
    LinearFunctional,
    ProbabilityError,
    ProbabilityFunction,
    consistency_check,
    evaluate,
    is_valid,
    power_probability,
    preset_box,
    preset_functional,
    product_probability,
    validate,
)
from .qm import (
    PairMeasure,
    QMOptResult,
    QMResult,
    mu_eval,
    qm_feasible,
    qm_optimize,
    sample_qm_vertex,
    separation_oracle,
    sorkin_residual,
)
from .scenario import (
    COARSE,
    STRICT,
    ExclusivityGraph,
    Measurement,
    Outcome,
    Scenario,
    ScenarioError,
    build_marginal_scenario,
    exclusive,
    exclusivity_graph,
    power_scenario,
    preset_scenario,
    product_scenario,
)

__all__ = [
    "BACKEND", "COARSE", "STRICT", "CEReport", "CliqueSet", "ExclusivityGraph", "JointDistribution",
    "Limits", "LinearFunctional", "Measurement", "NCResult", "NonMonotoneError", "OptResult", "Outcome",
    "PairMeasure", "ProbabilityError", "ProbabilityFunction", "QMOptResult", "QMResult",
    "ResourceLimitError", "Scenario", "ScenarioError", "ThresholdResult", "build_marginal_scenario",
    "ce_check", "ce_optimize", "consistency_check", "consistent_optimize", "evaluate", "exclusive",
    "exclusivity_graph", "get_limits", "is_valid", "maximal_cliques", "mu_eval", "nc_check", "nc_optimize",
    "power_probability", "power_scenario", "preset_box", "preset_functional", "preset_scenario",
    "product_probability", "product_scenario", "qm_feasible", "qm_optimize", "sample_qm_vertex",
    "separation_oracle", "sorkin_residual", "threshold_search", "validate",
]
