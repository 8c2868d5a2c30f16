"""Monte Carlo pricing engine and per-scheme convergence studies.

Paths are processed in fixed blocks; block b of a run draws from the Philox
stream keyed by (scheme, n_steps, b), and block partials are always combined
in block order, so a price is a pure function of (inputs, seed) no matter how
many workers execute the blocks.  Partial sums are accumulated with
``math.fsum`` to keep millions of payoffs from losing digits.
"""

from __future__ import annotations

import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .model import HestonParams
from .payoff import OptionSpec, raw_payoff
from .schemes import SCHEME_NAMES, TimeGrid, simulate_block, stream

__all__ = ["BLOCK_SIZE", "ConvergenceRow", "PriceEstimate", "convergence_study", "price"]

BLOCK_SIZE = 4096

#: Stable numeric ids used in RNG stream keys (never reordered).
_SCHEME_ID = {name: i for i, name in enumerate(SCHEME_NAMES)}


@dataclass(frozen=True)
class PriceEstimate:
    """Discounted Monte Carlo estimate with its standard error.

    ``clamp_rate`` is the fraction of simulation steps whose incoming
    variance was negative (and hence truncated inside the diffusion terms).
    """

    mean: float
    std_error: float
    n_paths: int
    discounted: bool
    clamp_rate: float


@dataclass(frozen=True)
class ConvergenceRow:
    """One (scheme, N) entry of a convergence study."""

    scheme: str
    n_steps: int
    n_paths: int
    mean: float
    std_error: float
    clamp_rate: float
    deviation: float


def _n_workers() -> int:
    cap = os.environ.get("HESTON_QCOST_THREADS")
    if cap is not None:
        return max(1, int(cap))
    return 1


def _block_stats(spec, params, scheme, grid, seed, block_index, block_paths):
    rng = stream(seed, _SCHEME_ID[scheme], grid.n_steps, block_index)
    logret, clamps = simulate_block(scheme, params, grid.n_steps, grid.h, block_paths, rng)
    payoffs = raw_payoff(spec, params.s0 * np.exp(logret))
    return float(np.sum(payoffs)), float(np.dot(payoffs, payoffs)), clamps


def price(
    spec: OptionSpec,
    params: HestonParams,
    scheme: str,
    grid: TimeGrid,
    n_paths: int,
    seed: int,
    discount: bool = True,
) -> PriceEstimate:
    """Estimate the no-arbitrage price exp(-rT) E[f] by Monte Carlo.

    Deterministic per (inputs, seed); the worker count (HESTON_QCOST_THREADS)
    does not affect the result.
    """
    if scheme not in SCHEME_NAMES:
        raise ValueError(f"unknown scheme {scheme!r}; expected one of {SCHEME_NAMES}")
    if n_paths < 1:
        raise ValueError("n_paths must be >= 1")
    if not math.isclose(grid.t_end, spec.expiry, rel_tol=1e-12):
        raise ValueError(f"grid.t_end={grid.t_end} does not match option expiry {spec.expiry}")

    sizes = [BLOCK_SIZE] * (n_paths // BLOCK_SIZE)
    if n_paths % BLOCK_SIZE:
        sizes.append(n_paths % BLOCK_SIZE)
    tasks = list(enumerate(sizes))

    workers = _n_workers()
    if workers > 1 and len(tasks) > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            results = list(
                pool.map(lambda t: _block_stats(spec, params, scheme, grid, seed, *t), tasks)
            )
    else:
        results = [_block_stats(spec, params, scheme, grid, seed, *t) for t in tasks]

    total = math.fsum(r[0] for r in results)
    total_sq = math.fsum(r[1] for r in results)
    clamps = sum(r[2] for r in results)

    mean = total / n_paths
    if n_paths > 1:
        var = max(total_sq - n_paths * mean * mean, 0.0) / (n_paths - 1)
        se = math.sqrt(var / n_paths)
    else:
        se = 0.0
    factor = math.exp(-params.r * grid.t_end) if discount else 1.0
    return PriceEstimate(
        mean=factor * mean,
        std_error=factor * se,
        n_paths=n_paths,
        discounted=discount,
        clamp_rate=clamps / (n_paths * grid.n_steps),
    )


def convergence_study(
    spec: OptionSpec,
    params: HestonParams,
    schemes: Sequence[str],
    n_list: Sequence[int],
    n_paths: int,
    seed: int,
) -> list[ConvergenceRow]:
    """Price at each (scheme, N) and report deviations from a reference value.

    The reference is the strong Euler estimate at the largest N in ``n_list``
    (a conventional stand-in for the true value); when that run is part of
    the study its own deviation is exactly zero.
    """
    if not n_list:
        raise ValueError("n_list must be nonempty")
    if list(n_list) != sorted(n_list):
        raise ValueError("n_list must be ascending")
    n_max = n_list[-1]

    estimates: dict[tuple[str, int], PriceEstimate] = {}
    for scheme in schemes:
        for n in n_list:
            grid = TimeGrid(spec.expiry, n)
            estimates[(scheme, n)] = price(spec, params, scheme, grid, n_paths, seed)

    baseline = estimates.get(("strong-euler", n_max))
    if baseline is None:
        baseline = price(spec, params, "strong-euler", TimeGrid(spec.expiry, n_max), n_paths, seed)

    rows = []
    for scheme in schemes:
        for n in n_list:
            est = estimates[(scheme, n)]
            rows.append(
                ConvergenceRow(
                    scheme=scheme,
                    n_steps=n,
                    n_paths=n_paths,
                    mean=est.mean,
                    std_error=est.std_error,
                    clamp_rate=est.clamp_rate,
                    deviation=est.mean - baseline.mean,
                )
            )
    return rows
