"""Nonlinear spectroscopy of small exciton systems and an invasiveness witness.

Units: angular frequencies with hbar = 1 throughout; dipoles are scalar
magnitudes.  See the module docstrings for the sign and prefactor
conventions of the response pipeline.
"""

from .operators import (
    DEFAULT_TOL,
    DensityMatrix,
    LiouvilleVector,
    NotHermitianError,
    NotPositiveError,
    StateValidationError,
    TraceNotOneError,
    adjoint,
    as_operator,
    commutator,
    expectation,
    validate_density,
)
from .models import (
    ClassicalMixture,
    DegenerateModelError,
    DimerParams,
    DimerSpectrum,
    ExcitonModel,
    build_dimer,
    build_general,
    diagonalize_dimer,
    eigenstate,
    gibbs_populations,
    gibbs_state,
)
from .dynamics import (
    DephasingModel,
    FieldProfile,
    StepSizeError,
    apply_impulsive_interaction,
    free_propagate,
    nonperturbative_evolve,
)
from .response import (
    REPHASING_PATTERN,
    PathwayTerm,
    PulseEvent,
    QuadratureError,
    ResponseSample,
    enumerate_pathways,
    pathway_contribution,
    polarization_convolved,
    polarization_impulsive,
    response_function,
    select_phase_matched,
    split_dipole,
    spectrum_2d,
)
from .witness import (
    ControlSolve,
    ExperimentSpec,
    IllConditionedError,
    InputNotClassicalError,
    ProtocolConfig,
    WitnessReport,
    evaluate_witness,
    run_control_experiment,
    run_main_experiment,
    run_protocol,
    solve_controls,
)
from .config import ConfigError, load_config, validate_config

__version__ = "0.1.0"

__all__ = [
    "DEFAULT_TOL",
    "DensityMatrix",
    "LiouvilleVector",
    "StateValidationError",
    "NotHermitianError",
    "TraceNotOneError",
    "NotPositiveError",
    "adjoint",
    "as_operator",
    "commutator",
    "expectation",
    "validate_density",
    "ClassicalMixture",
    "DegenerateModelError",
    "DimerParams",
    "DimerSpectrum",
    "ExcitonModel",
    "build_dimer",
    "build_general",
    "diagonalize_dimer",
    "eigenstate",
    "gibbs_populations",
    "gibbs_state",
    "DephasingModel",
    "FieldProfile",
    "StepSizeError",
    "apply_impulsive_interaction",
    "free_propagate",
    "nonperturbative_evolve",
    "REPHASING_PATTERN",
    "PathwayTerm",
    "PulseEvent",
    "QuadratureError",
    "ResponseSample",
    "enumerate_pathways",
    "pathway_contribution",
    "polarization_convolved",
    "polarization_impulsive",
    "response_function",
    "select_phase_matched",
    "split_dipole",
    "spectrum_2d",
    "ControlSolve",
    "ExperimentSpec",
    "IllConditionedError",
    "InputNotClassicalError",
    "ProtocolConfig",
    "WitnessReport",
    "evaluate_witness",
    "run_control_experiment",
    "run_main_experiment",
    "run_protocol",
    "solve_controls",
    "ConfigError",
    "load_config",
    "validate_config",
]
