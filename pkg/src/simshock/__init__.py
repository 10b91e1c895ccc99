"""Self-similar profiles of u u_tt - (u_t)^2 = u u_x u_t.

The package integrates the singular profile ODEs that the similarity
substitutions produce, launches them from series expansions at their
singular points, classifies the outcomes, and verifies solved profiles
against the original PDE.
"""

from .errors import (
    ConfigError,
    CoverageGapError,
    GuardTrippedError,
    MatchFailureError,
    MissingTailFitError,
    NoBracketError,
    NonPositiveValuesError,
    OutOfRangeError,
    OutOfSpanError,
    PositivityLostError,
    SolverError,
    StepUnderflowError,
    UnknownKeyError,
    WindowTooShortError,
    ZeroDenominatorError,
)
from .integrator import (
    EVENT_GUARD,
    EVENT_SPAN_END,
    EVENT_VALUE_CAP,
    EVENT_ZERO_CROSS,
    Event,
    OdeSystem,
    Tolerances,
    Trajectory,
    dense_eval,
    integrate,
)
from .odes import (
    KIND_ALGEBRAIC_TAIL,
    KIND_FARFIELD,
    KIND_FLAT,
    KIND_ORIGIN,
    KIND_SHOCK_POINT,
    ExpansionCoeffs,
    SimilarityParams,
    exponents,
    farfield_series,
    flat_series,
    origin_series,
    rescale,
    rhs_blowup,
    rhs_global,
    rhs_rarefaction,
    rhs_shock,
    shock_series,
)
from .shooting import (
    FAMILY_BLOWUP,
    FAMILY_COMPACT,
    FAMILY_FARFIELD,
    FAMILY_GLOBAL,
    FAMILY_RAREFACTION,
    FAMILY_SHOCK,
    OUTCOME_BLOWUP,
    OUTCOME_CONVERGES,
    OUTCOME_FLAT_DECAY,
    OUTCOME_HITS_ZERO,
    OUTCOME_INDETERMINATE,
    ExtensionPair,
    FlatFit,
    Outcome,
    Profile,
    ShootConfig,
    ShootResult,
    SweepRecord,
    TailFit,
    build_compact_profile,
    build_extension_pair,
    classify,
    fit_tail,
    reflect,
    solve_blowup_family,
    solve_farfield,
    solve_global,
    solve_shock_bvp,
    sweep_parameter,
)
from .verification import (
    CriticalPoint,
    LogDivergenceReport,
    ParabolicityReport,
    PdeResidualReport,
    ResidualReport,
    final_profile,
    log_divergence,
    max_principle_scan,
    ode_residual,
    parabolicity,
    pde_residual,
    reflection_check,
)

__version__ = "0.1.0"
