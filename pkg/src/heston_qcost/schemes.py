"""Discretization schemes for the Heston system.

Three steppers over an equidistant grid t_n = n h, h = T/N, all started at
(Y1, Y2) = (0, nu0):

* ``strong-euler``  -- Euler-Maruyama with Gaussian increments N(0, h).
* ``weak-euler``    -- Euler with two-point increments +-sqrt(h), matching the
  first two moments of the Gaussian ones.
* ``weak-taylor2``  -- simplified order-2.0 weak Taylor scheme with three-point
  increments {0, +-sqrt(3h)} and an antisymmetric two-point area term.

Random numbers come from counter-based Philox streams keyed by
(seed, stream key...), so every path block replays bit-identically regardless
of how work is scheduled across workers.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, Sequence, Union

import numpy as np
from scipy.special import ndtri

from .model import HestonParams

__all__ = [
    "SCHEME_NAMES",
    "PathState",
    "TimeGrid",
    "StrongEulerIncrements",
    "WeakEulerIncrements",
    "WeakTaylor2Increments",
    "sample_increments",
    "step_strong_euler",
    "step_weak_euler",
    "step_weak_taylor2",
    "step",
    "generate_path",
    "simulate_block",
    "stream",
]

SCHEME_NAMES = ("strong-euler", "weak-euler", "weak-taylor2")

#: Floor used inside the nu^(-1/2) terms of the weak Taylor step.  Feller
#: compliant settings essentially never approach it; it only prevents overflow
#: when a discrete step lands at (or below) zero variance.
NU_MIN = 1e-12


@dataclass(frozen=True)
class PathState:
    """Log return and variance at one grid time."""

    y1: float
    y2: float


@dataclass(frozen=True)
class TimeGrid:
    """Equidistant grid on [0, t_end] with n_steps steps of width h."""

    t_end: float
    n_steps: int

    def __post_init__(self) -> None:
        if self.t_end <= 0.0:
            raise ValueError(f"t_end must be > 0, got {self.t_end}")
        if self.n_steps < 1:
            raise ValueError(f"n_steps must be >= 1, got {self.n_steps}")

    @property
    def h(self) -> float:
        return self.t_end / self.n_steps


@dataclass(frozen=True)
class StrongEulerIncrements:
    """Standard normal draws; the step scales them by sqrt(h)."""

    z1: float
    z2: float


@dataclass(frozen=True)
class WeakEulerIncrements:
    """Signs +-1, each with probability 1/2."""

    s1: int
    s2: int


@dataclass(frozen=True)
class WeakTaylor2Increments:
    """Three-point increments and the antisymmetric area draw.

    w1, w2 take values -sqrt(3h), 0, +sqrt(3h) with probabilities 1/6, 2/3,
    1/6; v12 takes -h, +h with probability 1/2 each.
    """

    w1: float
    w2: float
    v12: float


Increments = Union[StrongEulerIncrements, WeakEulerIncrements, WeakTaylor2Increments]


# ---------------------------------------------------------------------------
# random sampling


def stream(seed: int, *key: int) -> np.random.Generator:
    """Counter-based generator for the sub-stream identified by ``key``."""
    ss = np.random.SeedSequence(seed, spawn_key=tuple(int(k) for k in key))
    return np.random.Generator(np.random.Philox(ss))


def _uniform_open(rng: np.random.Generator, size=None) -> np.ndarray:
    """Uniforms in (0, 1) built from a 64-bit draw: u = (k + 1/2) / 2^64."""
    k = rng.integers(0, 2**64, size=size, dtype=np.uint64)
    u = (k.astype(np.float64) + 0.5) * 2.0**-64
    return np.clip(u, 2.0**-65, np.nextafter(1.0, 0.0))


def _standard_normal(rng: np.random.Generator, size=None) -> np.ndarray:
    """Normals via the inverse cdf applied to a 64-bit uniform.

    Slightly slower than ziggurat-style sampling but has no rejection loop,
    so draw positions in the stream are input-independent and replayable.
    """
    return ndtri(_uniform_open(rng, size))


def _weak_signs(rng: np.random.Generator, size=None) -> np.ndarray:
    return 2.0 * rng.integers(0, 2, size=size).astype(np.float64) - 1.0


def _taylor_w(rng: np.random.Generator, h: float, size=None) -> np.ndarray:
    u = rng.integers(0, 6, size=size)
    return math.sqrt(3.0 * h) * ((u == 0).astype(np.float64) - (u == 1))


def sample_increments(scheme: str, h: float, rng: np.random.Generator) -> Increments:
    """Draw one step's worth of increments for ``scheme``."""
    if scheme == "strong-euler":
        z = _standard_normal(rng, size=2)
        return StrongEulerIncrements(float(z[0]), float(z[1]))
    if scheme == "weak-euler":
        s = rng.integers(0, 2, size=2)
        return WeakEulerIncrements(int(2 * s[0] - 1), int(2 * s[1] - 1))
    if scheme == "weak-taylor2":
        w = _taylor_w(rng, h, size=2)
        v = float(h * (2.0 * rng.integers(0, 2) - 1.0))
        return WeakTaylor2Increments(float(w[0]), float(w[1]), v)
    raise ValueError(f"unknown scheme {scheme!r}; expected one of {SCHEME_NAMES}")


# ---------------------------------------------------------------------------
# steppers


def _euler_update(y1, y2, p: HestonParams, h: float, a, b):
    """Shared Euler update; ``a``, ``b`` are the unit-scale driver draws.

    Works elementwise on scalars or arrays.  The diffusion square root uses
    the truncated variance max(y2, 0); the drift keeps y2 as is.
    """
    sqh = math.sqrt(h)
    sq = np.sqrt(np.maximum(y2, 0.0))
    y1n = y1 + (p.r - 0.5 * y2) * h + sq * (p.rho * a + math.sqrt(1.0 - p.rho**2) * b) * sqh
    y2n = y2 + p.kappa * (p.theta - y2) * h + p.xi * sq * a * sqh
    return y1n, y2n


def _taylor2_update(y1, y2, p: HestonParams, h: float, w1, w2, v12):
    """Simplified order-2.0 weak Taylor update for the Heston system.

    Only the variance component carries a nonzero second diffusion operator,
    which collapses the general scheme to the terms below.  The nu^(-1/2)
    factors (from differentiating sqrt(nu)) are floored at NU_MIN.
    """
    sqh2 = h * h
    nu_pos = np.maximum(y2, 0.0)
    sq = np.sqrt(nu_pos)
    isq = 1.0 / np.sqrt(np.maximum(y2, NU_MIN))
    srho = math.sqrt(1.0 - p.rho**2)

    a1 = p.r - 0.5 * y2
    a2 = p.kappa * (p.theta - y2)
    l0a1 = -0.5 * a2
    l0a2 = -p.kappa * a2
    l1a1 = -0.5 * p.xi * sq
    l1a2 = -p.kappa * p.xi * sq
    # L0 applied to any diffusion entry c*sqrt(nu) equals c*g with the shared
    # factor g below; L1 applied to it is the constant c*xi/2.
    g = (0.5 * a2 - 0.125 * p.xi**2) * isq
    l1b11 = 0.5 * p.xi * p.rho
    l1b12 = 0.5 * p.xi * srho
    l1b21 = 0.5 * p.xi**2

    y1n = (
        y1
        + a1 * h
        + sq * (p.rho * w1 + srho * w2)
        + 0.5 * l0a1 * sqh2
        + 0.5 * h * ((p.rho * g + l1a1) * w1 + srho * g * w2)
        + 0.5 * l1b11 * (w1 * w1 - h)
        + 0.5 * l1b12 * (w1 * w2 + v12)
    )
    y2n = (
        y2
        + a2 * h
        + p.xi * sq * w1
        + 0.5 * l0a2 * sqh2
        + 0.5 * h * (p.xi * g + l1a2) * w1
        + 0.5 * l1b21 * (w1 * w1 - h)
    )
    return y1n, y2n


def step_strong_euler(
    state: PathState, params: HestonParams, h: float, z: Sequence[float]
) -> PathState:
    """One Euler-Maruyama step driven by standard normal draws ``z``."""
    y1, y2 = _euler_update(state.y1, state.y2, params, h, z[0], z[1])
    return PathState(float(y1), float(y2))


def step_weak_euler(
    state: PathState, params: HestonParams, h: float, signs: Sequence[int]
) -> PathState:
    """One weak Euler step; ``signs`` are +-1 so the increments are +-sqrt(h)."""
    y1, y2 = _euler_update(state.y1, state.y2, params, h, float(signs[0]), float(signs[1]))
    return PathState(float(y1), float(y2))


def step_weak_taylor2(
    state: PathState, params: HestonParams, h: float, inc: WeakTaylor2Increments
) -> PathState:
    """One simplified order-2.0 weak Taylor step."""
    y1, y2 = _taylor2_update(state.y1, state.y2, params, h, inc.w1, inc.w2, inc.v12)
    return PathState(float(y1), float(y2))


def step(scheme: str, state: PathState, params: HestonParams, h: float, inc: Increments) -> PathState:
    """Dispatch a single step by scheme name."""
    if scheme == "strong-euler":
        return step_strong_euler(state, params, h, (inc.z1, inc.z2))
    if scheme == "weak-euler":
        return step_weak_euler(state, params, h, (inc.s1, inc.s2))
    if scheme == "weak-taylor2":
        return step_weak_taylor2(state, params, h, inc)
    raise ValueError(f"unknown scheme {scheme!r}; expected one of {SCHEME_NAMES}")


def generate_path(
    scheme: str, params: HestonParams, grid: TimeGrid, rng: np.random.Generator
) -> tuple[list[PathState], int]:
    """Simulate one path; returns the N+1 states and the truncation count.

    The path starts at (0, nu0).  A step counts as clamped when its incoming
    variance is negative, i.e. whenever the square roots actually truncated.
    """
    h = grid.h
    states = [PathState(0.0, params.nu0)]
    clamps = 0
    for _ in range(grid.n_steps):
        cur = states[-1]
        if cur.y2 < 0.0:
            clamps += 1
        states.append(step(scheme, cur, params, h, sample_increments(scheme, h, rng)))
    return states, clamps


def simulate_block(
    scheme: str,
    params: HestonParams,
    n_steps: int,
    h: float,
    n_paths: int,
    rng: np.random.Generator,
) -> tuple[np.ndarray, int]:
    """Simulate ``n_paths`` paths at once; returns (log returns, clamp count).

    The log-return array has shape (n_paths, n_steps + 1) with column 0 all
    zeros.  Draw order is fixed (per step: driver 1 then driver 2), so the
    output is a pure function of the generator state.
    """
    y1 = np.zeros(n_paths)
    y2 = np.full(n_paths, params.nu0)
    out = np.empty((n_paths, n_steps + 1))
    out[:, 0] = 0.0
    clamps = 0
    for j in range(n_steps):
        clamps += int(np.count_nonzero(y2 < 0.0))
        if scheme == "strong-euler":
            a = _standard_normal(rng, n_paths)
            b = _standard_normal(rng, n_paths)
            y1, y2 = _euler_update(y1, y2, params, h, a, b)
        elif scheme == "weak-euler":
            a = _weak_signs(rng, n_paths)
            b = _weak_signs(rng, n_paths)
            y1, y2 = _euler_update(y1, y2, params, h, a, b)
        elif scheme == "weak-taylor2":
            w1 = _taylor_w(rng, h, n_paths)
            w2 = _taylor_w(rng, h, n_paths)
            v12 = h * _weak_signs(rng, n_paths)
            y1, y2 = _taylor2_update(y1, y2, params, h, w1, w2, v12)
        else:
            raise ValueError(f"unknown scheme {scheme!r}; expected one of {SCHEME_NAMES}")
        out[:, j + 1] = y1
    return out, clamps
