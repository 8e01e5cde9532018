"""Sharp tail and quantile bounds under increasing convex domination.

Given a known law Y and an unknown X with ``E phi(X) <= E phi(Y)`` for every
non-decreasing convex ``phi`` (equivalently, stop-loss domination), this
package computes the sharp bound ``P{X >= E(Y | Y > s)} <= P{Y > s}``, the
law attaining it, averaged-quantile envelopes, multiplicative tail
comparisons with the classical sharp constants, and the log-space blow-up
construction showing that quantile ratios escape any such control.
"""

from .distributions import (
    PROB_ATOL,
    AtomicMixture,
    CollapsedTail,
    Distribution,
    Empirical,
    Exponential,
    HingeFunction,
    LogNormal,
    Normal,
    Pareto,
    QuantileGrid,
    TailExpectation,
    Uniform,
    parse_distribution,
)
from .envelope import (
    BoundCurve,
    ConvexityCheck,
    OmegaSpec,
    RegionAreas,
    RegularityParams,
    check_regularity,
    derivative_conditions,
    gaussian_transfer,
    geometric_criterion,
    kemperman_constant,
    kemperman_criterion,
    lambda_r,
    omega_bound,
    proof_side_coefficient,
    quantile_envelope,
    region_areas,
    tail_ratio_bound,
)
from .errors import (
    ConvexTailError,
    DomainError,
    EmptyTailError,
    HypothesisError,
    NotRegularError,
    NumericalError,
    PreconditionError,
    SpecParseError,
)
from .majorization import (
    HingeMinimizer,
    OrderCheckReport,
    SharpBound,
    extremal_construction,
    icx_dominates,
    optimal_hinge,
    sharp_tail_bound,
)
from .oracle import (
    CounterexamplePair,
    VerificationReport,
    contraction_pair,
    counterexample,
    verify_bound,
)
from .quadrature import quad_unit

__version__ = "0.1.0"

__all__ = [
    "PROB_ATOL",
    "AtomicMixture",
    "BoundCurve",
    "CollapsedTail",
    "ConvexTailError",
    "ConvexityCheck",
    "CounterexamplePair",
    "Distribution",
    "DomainError",
    "Empirical",
    "EmptyTailError",
    "Exponential",
    "HingeFunction",
    "HingeMinimizer",
    "HypothesisError",
    "LogNormal",
    "Normal",
    "NotRegularError",
    "NumericalError",
    "OmegaSpec",
    "OrderCheckReport",
    "Pareto",
    "PreconditionError",
    "QuantileGrid",
    "RegionAreas",
    "RegularityParams",
    "SharpBound",
    "SpecParseError",
    "TailExpectation",
    "Uniform",
    "VerificationReport",
    "check_regularity",
    "contraction_pair",
    "counterexample",
    "derivative_conditions",
    "extremal_construction",
    "gaussian_transfer",
    "geometric_criterion",
    "icx_dominates",
    "kemperman_constant",
    "kemperman_criterion",
    "lambda_r",
    "omega_bound",
    "optimal_hinge",
    "parse_distribution",
    "proof_side_coefficient",
    "quad_unit",
    "quantile_envelope",
    "region_areas",
    "sharp_tail_bound",
    "tail_ratio_bound",
    "verify_bound",
]
