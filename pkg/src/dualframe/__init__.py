"""Optimal dual frames for estimating ensemble averages from POVM data."""

from .errors import (
    CountMismatch,
    DimensionError,
    DualFrameError,
    IncompleteSum,
    InvalidDual,
    InvalidEnsemble,
    InvalidPovm,
    InvalidState,
    MissingGamma,
    NegativeProbability,
    NotHermitian,
    NotInSpan,
    NotPositive,
    SingularFrame,
    ZeroWeightOutcome,
)
from .estimation import (
    CoefficientMap,
    NoiseReport,
    OutcomeWeights,
    build_lambda,
    check_min_norm_condition,
    gamma_from_dual,
    min_noise,
    noise,
    optimal_dual,
    outcome_weights,
    verify_identity_eq15,
)
from .frames import (
    Coefficients,
    DualFrame,
    FrameAnalysis,
    alternate_dual,
    analyze_frame,
    expansion_coefficients,
    verify_dual,
)
from .hs import (
    Ensemble,
    OperatorSpan,
    Povm,
    born_probabilities,
    density_matrix,
    hs_inner,
    is_informationally_complete,
    make_ensemble,
    project_onto_span,
    span_basis,
    validate_povm,
)
from .simulator import OutcomeCounts, SimulationResult, run_experiment, sample_ensemble, sample_outcomes
from .tolerances import DEFAULT as DEFAULT_TOLERANCES
from .tolerances import Tolerances

__version__ = "0.1.0"
