"""Deterministic Lanchester attrition models: laws, invariants, solutions, tactics, fitting."""

__version__ = "0.1.0"

from .analytic import TerminalResult, aimed_state_at, aimed_terminal, asym_limit, asym_state_at
from .errors import (
    DegenerateFitError,
    DomainError,
    InsufficientDataError,
    LanchesterError,
    NumericalFailure,
    UnsupportedModelError,
)
from .estimate import FitResult, fit_bracken, implied_invariant
from .models import (
    AimedParams,
    AsymmetricParams,
    BrackenParams,
    ConstantParams,
    ForceState,
    MixedParams,
    MixedState,
    UnaimedParams,
    Verdict,
    alpha,
    average_effectiveness,
    invariant,
    predict_winner,
    rate,
    rescale_units,
)
from .simulate import (
    SimControls,
    SimOutcome,
    Trajectory,
    default_controls,
    discrete_step,
    drift_report,
    integrate,
    run_salvos,
)
from .tactics import (
    DivisionPlan,
    SupportSplit,
    divide_and_conquer,
    infer_kappa,
    optimal_fighting_fraction,
    optimal_split,
    optimal_support_ratio,
    support_strength,
    total_effectiveness_at_ratio,
)
