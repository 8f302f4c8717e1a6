"""Expectile-based expected shortfall and related risk measures."""

from .asymptotics import (
    ConvergenceReport,
    MdaSpec,
    RatioTable,
    convergence_report,
    ratio_curve,
    theoretical_limits,
)
from .bounds import beta_grid, lower_bound_at, r_alpha, r_phi
from .distortion import (
    DistortionCurve,
    distortion_curve,
    gamma_beta,
    mixture_distortion,
    non_domination_witness,
    phi,
    phi_prime,
)
from .distributions import (
    Bernoulli,
    BetaPower,
    Empirical,
    Exponential1,
    FiniteLossModel,
    Koenker,
    LossDistribution,
    Pareto,
    Uniform01,
    from_sample,
    read_empirical_csv,
    read_finite_csv,
)
from .dual import (
    DualDensity,
    DualityReport,
    es_dual_discretized,
    expectile_dual_max,
    verify_duality,
)
from .errors import (
    ClassMismatch,
    DegenerateTail,
    Divergent,
    DomainError,
    EmptySample,
    InfeasibleDensity,
    NonIntegrable,
    ParseError,
    RiskError,
    UnsupportedKind,
    ValidationError,
    WitnessNotFound,
)
from .expectile import (
    ExpectileCurve,
    exceedance_beta,
    expectile,
    expectile_curve,
    expectile_density,
)
from .risk import (
    Failed,
    RiskReport,
    closed_form_es,
    expected_shortfall,
    expectile_es,
    expectile_tce,
    risk_report,
    tail_conditional_expectation,
    value_at_risk,
)

__version__ = "0.1.0"
