"""Van Trees information and adaptive phase estimation with coherent states."""
from .adaptive import (
    AdaptiveRunReport,
    calibrate_alpha,
    run_fisher_adaptive,
    run_fixed_povm,
    run_vantrees_adaptive,
)
from .hilbert import CoherentModel, FockVector, coherent_state, phase_evolve
from .infotheory import (
    OutcomeDistribution,
    SingularFisher,
    fisher_information,
    generalized_qfi_vq,
    van_trees_information,
    zq_restricted_analytic,
)
from .optimizer import OptimizationReport, optimize_montecarlo, optimize_restricted
from .povm import InvalidPovm, Povm, projector_family, random_projective_povm, validate
from .priors import DegeneratePosterior, PriorGrid, bayes_update, flat_prior, gaussian_prior

__all__ = [
    "AdaptiveRunReport",
    "CoherentModel",
    "DegeneratePosterior",
    "FockVector",
    "InvalidPovm",
    "OptimizationReport",
    "OutcomeDistribution",
    "Povm",
    "PriorGrid",
    "SingularFisher",
    "bayes_update",
    "calibrate_alpha",
    "coherent_state",
    "fisher_information",
    "flat_prior",
    "gaussian_prior",
    "generalized_qfi_vq",
    "optimize_montecarlo",
    "optimize_restricted",
    "phase_evolve",
    "projector_family",
    "random_projective_povm",
    "run_fisher_adaptive",
    "run_fixed_povm",
    "run_vantrees_adaptive",
    "validate",
    "van_trees_information",
    "zq_restricted_analytic",
]

__version__ = "0.1.0"
