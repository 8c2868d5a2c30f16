"""Heston model primitives.

The Heston model describes an asset whose instantaneous variance follows a
mean-reverting CIR process correlated with the price process:

    dS_t  = r S_t dt + sqrt(nu_t) S_t dW^1_t
    dnu_t = kappa (theta - nu_t) dt + xi sqrt(nu_t) dW^2_t

with corr(dW^1, dW^2) = rho.  Working in the log return R_t = ln(S_t / S_0)
and an independent pair of Brownian drivers, the system takes the standard
two-dimensional SDE form whose drift/diffusion coefficients are exposed by
:func:`coefficients`.

:func:`bs_call_price` provides the Black-Scholes closed form, which serves as
a validation oracle for the degenerate case xi = 0, kappa = 0, nu0 = sigma**2
(constant variance, i.e. geometric Brownian motion).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Mapping

__all__ = [
    "FellerViolationError",
    "HestonParams",
    "SdeCoefficients",
    "bs_call_price",
    "coefficients",
    "feller_check",
    "normal_cdf",
]

_SQRT2 = math.sqrt(2.0)

#: Keys accepted by :meth:`HestonParams.from_mapping`, in canonical order.
PARAM_KEYS = ("r", "rho", "kappa", "theta", "xi", "s0", "nu0")


class FellerViolationError(ValueError):
    """Parameter set violates 2*kappa*theta > xi**2 (or is degenerate)."""


def normal_cdf(x: float) -> float:
    """Standard normal cdf N(x) = (1 + erf(x / sqrt(2))) / 2.

    ``math.erf`` is correctly rounded on all supported platforms, so the
    absolute error of this evaluation is far below 1e-12.
    """
    return 0.5 * (1.0 + math.erf(x / _SQRT2))


@dataclass(frozen=True)
class HestonParams:
    """Model constants and initial condition.

    Parameters
    ----------
    r : float
        Risk-free rate (1/year).
    rho : float
        Correlation between the price and variance drivers, in [-1, 1].
    kappa : float
        Mean-reversion rate of the variance (1/year).
    theta : float
        Long-term variance level.
    xi : float
        Volatility of volatility.
    s0 : float
        Spot price at time 0.
    nu0 : float
        Variance at time 0.
    allow_feller_violation : bool
        Degenerate or Feller-violating parameter sets (e.g. the constant
        variance limit kappa = xi = 0 used to cross-check against
        Black-Scholes) are rejected at construction unless this flag is set.
    """

    r: float
    rho: float
    kappa: float
    theta: float
    xi: float
    s0: float
    nu0: float
    allow_feller_violation: bool = False

    def __post_init__(self) -> None:
        for name in PARAM_KEYS:
            v = getattr(self, name)
            if not math.isfinite(v):
                raise ValueError(f"parameter {name!r} must be finite, got {v!r}")
        if not -1.0 <= self.rho <= 1.0:
            raise ValueError(f"rho must lie in [-1, 1], got {self.rho}")
        if self.xi < 0.0:
            raise ValueError(f"xi must be >= 0, got {self.xi}")
        if self.s0 <= 0.0:
            raise ValueError(f"s0 must be > 0, got {self.s0}")
        if self.nu0 < 0.0:
            raise ValueError(f"nu0 must be >= 0, got {self.nu0}")
        if self.allow_feller_violation:
            if self.kappa < 0.0 or self.theta < 0.0:
                raise ValueError("kappa and theta must be >= 0")
        else:
            if self.kappa <= 0.0 or self.theta <= 0.0:
                raise ValueError(
                    "kappa and theta must be > 0 "
                    "(set allow_feller_violation=True for degenerate models)"
                )
            if not feller_check(self):
                raise FellerViolationError(
                    f"Feller condition 2*kappa*theta > xi**2 fails: "
                    f"2*{self.kappa}*{self.theta} = {2 * self.kappa * self.theta} "
                    f"<= {self.xi**2} (set allow_feller_violation=True to override)"
                )

    @classmethod
    def from_mapping(
        cls, data: Mapping[str, float], allow_feller_violation: bool = False
    ) -> "HestonParams":
        """Build from a config mapping with keys r, rho, kappa, theta, xi, s0, nu0."""
        missing = [k for k in PARAM_KEYS if k not in data]
        if missing:
            raise KeyError(missing[0])
        values = {k: float(data[k]) for k in PARAM_KEYS}
        return cls(allow_feller_violation=allow_feller_violation, **values)


def feller_check(params: HestonParams) -> bool:
    """True iff 2*kappa*theta > xi**2 (continuous variance stays positive)."""
    return 2.0 * params.kappa * params.theta > params.xi**2


@dataclass(frozen=True)
class SdeCoefficients:
    """Drift/diffusion values of the standard-form system at one state.

    Component 1 is the log return, component 2 the variance; the second
    diffusion column of the variance row is identically zero.
    """

    a1: float
    a2: float
    b11: float
    b12: float
    b21: float


def coefficients(
    params: HestonParams, state, truncate: bool = True
) -> SdeCoefficients:
    """Evaluate the standard-form SDE coefficients at ``state``.

    ``state`` needs attributes ``y1`` (log return) and ``y2`` (variance):

        a1 = r - nu/2            b11 = rho sqrt(nu)
        a2 = kappa (theta - nu)  b12 = sqrt(1 - rho^2) sqrt(nu)
                                 b21 = xi sqrt(nu)

    Discrete updates can drive the variance negative even when the Feller
    condition holds.  Under the default full-truncation policy the square
    roots use max(nu, 0) while the drift keeps the raw nu.  With
    ``truncate=False`` a negative variance raises ``ValueError`` instead.
    """
    nu = float(state.y2)
    if nu < 0.0:
        if not truncate:
            raise ValueError(f"negative variance {nu} with truncation disabled")
        nu_pos = 0.0
    else:
        nu_pos = nu
    sqrt_nu = math.sqrt(nu_pos)
    return SdeCoefficients(
        a1=params.r - 0.5 * nu,
        a2=params.kappa * (params.theta - nu),
        b11=params.rho * sqrt_nu,
        b12=math.sqrt(1.0 - params.rho**2) * sqrt_nu,
        b21=params.xi * sqrt_nu,
    )


def bs_call_price(s: float, k: float, tau: float, r: float, sigma: float) -> float:
    """Black-Scholes value of a European call.

    C(S, tau) = S N(d+) - K exp(-r tau) N(d-),
    d+- = [ln(S/K) + tau (r +- sigma^2 / 2)] / (sigma sqrt(tau)).

    The sigma = 0 limit is the deterministic forward (S - K exp(-r tau))^+.
    A vanishing strike returns S.
    """
    if s <= 0.0 or k < 0.0:
        raise ValueError("need s > 0 and k >= 0")
    if tau <= 0.0:
        raise ValueError("need tau > 0")
    if sigma < 0.0:
        raise ValueError("need sigma >= 0")
    disc = math.exp(-r * tau)
    if k == 0.0:
        return s
    if sigma == 0.0:
        return max(s - k * disc, 0.0)
    srt = sigma * math.sqrt(tau)
    d_plus = (math.log(s / k) + tau * (r + 0.5 * sigma**2)) / srt
    d_minus = d_plus - srt
    return s * normal_cdf(d_plus) - k * disc * normal_cdf(d_minus)
