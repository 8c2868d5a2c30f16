"""Heston-model option pricing and quantum pricing-circuit cost estimation.

Classical side: strong Euler, weak Euler and order-2.0 weak Taylor
discretizations of the Heston system, Asian/barrier payoffs on discretely
monitored paths, and a deterministic Monte Carlo pricer with convergence
studies.

Quantum side: bit-exact fixed-point arithmetic emulation with
piecewise-polynomial function approximants, T-count/T-depth/qubit models of
the amplitude-estimation pricing circuits, the additive error budget, and an
outcome-level simulator of iterative amplitude estimation.
"""

from .model import (
    FellerViolationError,
    HestonParams,
    SdeCoefficients,
    bs_call_price,
    coefficients,
    feller_check,
)
from .payoff import OptionSpec, estimate_z, normalized_logreturn_payoff, raw_payoff
from .pricer import PriceEstimate, convergence_study, price
from .schemes import (
    PathState,
    TimeGrid,
    generate_path,
    sample_increments,
    step_strong_euler,
    step_weak_euler,
    step_weak_taylor2,
)
from .fixedpoint import (
    DiscreteGaussian,
    FixedFormat,
    FixedPointOverflowError,
    FixedValue,
    PiecewisePoly,
    build_piecewise_poly,
    discrete_gaussian,
    estimate_arith_error,
    quantize,
)
from .qresource import (
    AlgorithmConfig,
    ErrorBudget,
    ResourceCost,
    TotalCost,
    cost_primitive,
    cost_u1,
    cost_u2,
    cost_u3,
    cost_ugauss,
    cost_usin,
    error_budget,
    gauss_prep_params,
    n_oracle,
    qubit_ledger,
    total_cost,
)
from .iqae import AmplitudeOracle, IqaeResult, grover_sample, iqae_estimate

__version__ = "0.1.0"

__all__ = [
    "AlgorithmConfig",
    "AmplitudeOracle",
    "DiscreteGaussian",
    "ErrorBudget",
    "FellerViolationError",
    "FixedFormat",
    "FixedPointOverflowError",
    "FixedValue",
    "HestonParams",
    "IqaeResult",
    "OptionSpec",
    "PathState",
    "PiecewisePoly",
    "PriceEstimate",
    "ResourceCost",
    "SdeCoefficients",
    "TimeGrid",
    "TotalCost",
    "bs_call_price",
    "build_piecewise_poly",
    "coefficients",
    "convergence_study",
    "cost_primitive",
    "cost_u1",
    "cost_u2",
    "cost_u3",
    "cost_ugauss",
    "cost_usin",
    "discrete_gaussian",
    "error_budget",
    "estimate_arith_error",
    "estimate_z",
    "feller_check",
    "gauss_prep_params",
    "generate_path",
    "grover_sample",
    "iqae_estimate",
    "n_oracle",
    "normalized_logreturn_payoff",
    "price",
    "quantize",
    "qubit_ledger",
    "raw_payoff",
    "sample_increments",
    "step_strong_euler",
    "step_weak_euler",
    "step_weak_taylor2",
    "total_cost",
]
