"""Asian and barrier payoffs on discretely monitored paths.

All statistics (average, running max/min) run over the monitoring dates
j = 1..N; the fixed initial price S_0 is excluded.  Barrier knock comparisons
are inclusive on both sides.  :func:`normalized_logreturn_payoff` evaluates
the same payoff from log returns, rescaled by the bound Z into [0, 1]; this
is the form whose expectation an amplitude-estimation pricer targets.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .model import HestonParams
from .schemes import TimeGrid, simulate_block

__all__ = [
    "ASIAN_KINDS",
    "BARRIER_KINDS",
    "OPTION_KINDS",
    "OptionSpec",
    "estimate_z",
    "is_barrier",
    "normalized_logreturn_payoff",
    "raw_payoff",
]

logger = logging.getLogger(__name__)

ASIAN_KINDS = frozenset({"asian-call", "asian-put"})
BARRIER_KINDS = frozenset(
    f"{side}-and-{gate}-{cp}"
    for side in ("up", "down")
    for gate in ("in", "out")
    for cp in ("call", "put")
)
OPTION_KINDS = ASIAN_KINDS | BARRIER_KINDS

#: Floor returned by estimate_z when every sampled payoff is zero.
Z_FLOOR = 1.0


def is_barrier(kind: str) -> bool:
    return kind in BARRIER_KINDS


@dataclass(frozen=True)
class OptionSpec:
    """Option contract: kind, strike, optional barrier, expiry, payoff bound.

    ``z_bound`` normalizes payoffs into [0, 1]; it is required only by the
    normalized form (configured values take precedence over estimates from
    :func:`estimate_z`).
    """

    kind: str
    strike: float
    expiry: float
    barrier: Optional[float] = None
    z_bound: Optional[float] = None

    def __post_init__(self) -> None:
        if self.kind not in OPTION_KINDS:
            raise ValueError(f"unknown option kind {self.kind!r}")
        if self.strike <= 0.0:
            raise ValueError(f"strike must be > 0, got {self.strike}")
        if self.expiry <= 0.0:
            raise ValueError(f"expiry must be > 0, got {self.expiry}")
        if is_barrier(self.kind):
            if self.barrier is None or self.barrier <= 0.0:
                raise ValueError(f"{self.kind} needs a barrier > 0, got {self.barrier}")
        elif self.barrier is not None:
            raise ValueError(f"{self.kind} takes no barrier")
        if self.z_bound is not None and self.z_bound <= 0.0:
            raise ValueError(f"z_bound must be > 0, got {self.z_bound}")


def raw_payoff(spec: OptionSpec, prices) -> np.ndarray:
    """Payoff in currency units on one price path (or a batch of paths).

    ``prices`` has shape (..., N+1) with prices[..., 0] = S_0; the average
    and max/min run over indices 1..N.  Asian:

        ((1/N) sum_j S_j - K)^+        (call; reversed for the put)

    Barrier: vanilla terminal payoff gated by an inclusive indicator on the
    running max (up) or min (down), knock-in requiring the barrier to be
    reached, knock-out requiring it never to be.
    """
    prices = np.asarray(prices, dtype=float)
    if prices.shape[-1] < 2:
        raise ValueError("need at least one monitoring date after S0")
    monitored = prices[..., 1:]
    kind = spec.kind
    if kind in ASIAN_KINDS:
        avg = monitored.mean(axis=-1)
        intrinsic = avg - spec.strike if kind == "asian-call" else spec.strike - avg
        return np.maximum(intrinsic, 0.0)

    terminal = prices[..., -1]
    if kind.endswith("call"):
        vanilla = np.maximum(terminal - spec.strike, 0.0)
    else:
        vanilla = np.maximum(spec.strike - terminal, 0.0)
    if kind.startswith("up"):
        extremum = monitored.max(axis=-1)
        knocked = extremum >= spec.barrier
    else:
        extremum = monitored.min(axis=-1)
        knocked = extremum <= spec.barrier
    indicator = knocked if "-in-" in kind else ~knocked
    return vanilla * indicator


def normalized_logreturn_payoff(
    spec: OptionSpec,
    s0: float,
    logreturns,
    return_clip_count: bool = False,
):
    """Payoff from a log-return path, divided by Z and clipped to [0, 1].

    ``logreturns`` has shape (..., N+1) with R_0 = 0 by convention.  Agrees
    with raw_payoff(spec, s0 * exp(R)) / Z up to floating round-off; values
    exceeding 1 (payoff above the bound Z) are clipped and counted.
    """
    if spec.z_bound is None:
        raise ValueError("spec.z_bound is required for the normalized payoff")
    r = np.asarray(logreturns, dtype=float)
    scaled = raw_payoff(spec, s0 * np.exp(r)) / spec.z_bound
    n_clipped = int(np.count_nonzero(scaled > 1.0))
    out = np.clip(scaled, 0.0, 1.0)
    if return_clip_count:
        return out, n_clipped
    return out


def _round_up_2sig(x: float) -> float:
    """Smallest number with two significant figures that is >= x."""
    if x <= 0.0:
        raise ValueError("x must be positive")
    exp = math.floor(math.log10(x)) - 1
    scale = 10.0**exp
    return math.ceil(x / scale - 1e-12) * scale


def estimate_z(
    spec: OptionSpec,
    params: HestonParams,
    scheme: str,
    grid: TimeGrid,
    n_paths: int,
    rng: np.random.Generator,
) -> float:
    """Empirical payoff bound: max raw payoff over ``n_paths`` simulated paths,
    rounded up to two significant figures.

    If every sampled payoff is zero (e.g. a knock-out struck hopelessly), the
    bound Z = 0 would make normalization meaningless, so the floor 1.0 is
    returned and the degenerate spec is logged.
    """
    if n_paths < 1:
        raise ValueError("n_paths must be >= 1")
    best = 0.0
    block = 65536
    done = 0
    while done < n_paths:
        m = min(block, n_paths - done)
        logret, _ = simulate_block(scheme, params, grid.n_steps, grid.h, m, rng)
        payoffs = raw_payoff(spec, params.s0 * np.exp(logret))
        best = max(best, float(payoffs.max()))
        done += m
    if best <= 0.0:
        logger.warning(
            "estimate_z: all %d sampled payoffs are zero for %s; returning floor %g",
            n_paths,
            spec.kind,
            Z_FLOOR,
        )
        return Z_FLOOR
    return _round_up_2sig(best)
