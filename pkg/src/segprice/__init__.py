"""Uniform pricing versus third-degree price discrimination.

Profits, profit ratios and the worst-case instance families for markets
split into weighted segments with known value distributions.
"""

from .constructions import (ConstructionParams, build, dirac_worst_case, staircase, tight_pair,
                            triangular_regular, trunc_exp_mhr, unbounded_flat)
from .distributions import (Dirac, Discrete, PiecewiseCdf, SegmentDistribution, Triangular,
                            TruncatedExponential, Uniform, affine_survival)
from .errors import (ConfigurationError, ConstructionError, DomainError, InfeasibleProfile,
                     InvariantViolation, PreconditionError, SegpriceError, SpecError)
from .instance_io import InstanceSpec, build_market, dumps, loads, spec_from_construction, spec_from_market
from .market import (MarketInstance, ShapeDiagnosis, diagnose_shape, market_profit, segment_profit,
                     uniform_profit)
from .pricing import (PricingReport, analyze, lower_envelope_profit, midpoint_price_profit,
                      optimal_segment_price, optimal_uniform_price, random_pricing_expectation)
from .screening import (ScreeningInstance, ScreeningReport, interim_rent_floor, static_profit,
                        threshold_seq_optimum)

__version__ = "0.1.0"

__all__ = [
    "ConstructionParams", "build", "dirac_worst_case", "staircase", "tight_pair",
    "triangular_regular", "trunc_exp_mhr", "unbounded_flat",
    "Dirac", "Discrete", "PiecewiseCdf", "SegmentDistribution", "Triangular",
    "TruncatedExponential", "Uniform", "affine_survival",
    "ConfigurationError", "ConstructionError", "DomainError", "InfeasibleProfile",
    "InvariantViolation", "PreconditionError", "SegpriceError", "SpecError",
    "InstanceSpec", "build_market", "dumps", "loads", "spec_from_construction", "spec_from_market",
    "MarketInstance", "ShapeDiagnosis", "diagnose_shape", "market_profit", "segment_profit",
    "uniform_profit",
    "PricingReport", "analyze", "lower_envelope_profit", "midpoint_price_profit",
    "optimal_segment_price", "optimal_uniform_price", "random_pricing_expectation",
    "ScreeningInstance", "ScreeningReport", "interim_rent_floor", "static_profit",
    "threshold_seq_optimum",
]
