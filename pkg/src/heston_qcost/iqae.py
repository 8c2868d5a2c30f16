"""Outcome-level simulator of iterative quantum amplitude estimation.

No quantum state is simulated: a Grover-iterate power k applied to a state
with amplitude a hits the flag outcome with probability
sin^2((2k+1) arcsin(sqrt(a))), so shots are plain binomial draws and the
oracle just counts how many iterate applications they would have consumed.

The estimator follows the iterative scheme: keep a confidence interval for
theta = arcsin(sqrt(a)), choose iterate powers whose amplified angle stays
inside a known half-circle so the measured probability inverts uniquely,
sharpen with Clopper-Pearson intervals, and at least double the effective
power whenever the interval allows it.  Shot batches are sized so the total
iterate count stays within the standard query budget
(1.4/eps) ln((2/delta) log2(pi/(4 eps))); the per-look confidence levels form
a convergent series summing to delta, so the final interval covers the truth
with probability at least 1 - delta.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

import numpy as np
from scipy.stats import beta as _beta

__all__ = ["AmplitudeOracle", "IqaeResult", "grover_sample", "hit_probability", "iqae_estimate"]

_TWO_PI = 2.0 * math.pi

#: Iterate powers are capped at K = 4k+2 around this multiple of 1/eps.
_K_CAP_FACTOR = 0.8

#: Target fraction of the cap for the first amplified level.  Power-0 shots
#: cost no iterate queries, so the estimator pools them until the interval
#: supports jumping straight into this band (or the power-0 budget runs out),
#: keeping the number of query-bearing levels small.
_DIRECT_JUMP_FACTOR = 0.45

#: Power-0 shot budget ~ 0.13/eps^2 (a few percent of the classical
#: sampling cost; these shots consume state preparations but no iterates).
_FREE_SHOT_BUDGET = 0.13

#: Fraction of the termination width targeted when sizing the final batches.
_SIZING_MARGIN = 0.85

#: Hard stop against cycling (far beyond anything a sane run needs).
_MAX_LOOKS = 100_000


@dataclass
class AmplitudeOracle:
    """Bernoulli stand-in for a state-preparation circuit with amplitude a.

    ``call_counter`` accumulates Grover-iterate applications (k per shot at
    power k); ``prep_counter`` counts state preparations (one per shot).
    """

    a_true: float
    call_counter: int = 0
    prep_counter: int = 0

    def __post_init__(self) -> None:
        if not 0.0 <= self.a_true <= 1.0:
            raise ValueError(f"a_true must be in [0, 1], got {self.a_true}")


def hit_probability(a: float, k: int) -> float:
    """P(flag) after k Grover iterates: sin^2((2k+1) arcsin(sqrt(a)))."""
    theta = math.asin(math.sqrt(a))
    return math.sin((2 * k + 1) * theta) ** 2


def grover_sample(oracle: AmplitudeOracle, k: int, shots: int, rng: np.random.Generator) -> int:
    """Measure the flag ``shots`` times at iterate power k; returns hit count."""
    if k < 0:
        raise ValueError("k must be >= 0")
    if shots < 1:
        raise ValueError("shots must be >= 1")
    oracle.call_counter += shots * k
    oracle.prep_counter += shots
    return int(rng.binomial(shots, hit_probability(oracle.a_true, k)))


@dataclass(frozen=True)
class IqaeResult:
    a_hat: float
    interval: tuple[float, float]
    calls: int
    preps: int
    rounds: int
    final_k: int


def _clopper_pearson(x: int, n: int, alpha: float) -> tuple[float, float]:
    lo = float(_beta.ppf(alpha / 2.0, x, n - x + 1)) if x > 0 else 0.0
    hi = float(_beta.ppf(1.0 - alpha / 2.0, x + 1, n - x)) if x < n else 1.0
    return lo, hi


def _to_2mod4(k_big: int) -> int:
    return max(2, k_big - (k_big - 2) % 4)


def _half_circle(big_k: int, theta_l: float, theta_u: float) -> Optional[bool]:
    """True/False for the upper/lower half-circle containing the amplified
    interval [K theta_l, K theta_u] (mod 1 turn), None if it straddles."""
    fl = big_k * theta_l - math.floor(big_k * theta_l)
    fu = big_k * theta_u - math.floor(big_k * theta_u)
    if fu < fl:
        return None
    if fu <= 0.5:
        return True
    if fl >= 0.5:
        return False
    return None


def _placement(big_k: int, theta_l: float, theta_u: float) -> float:
    """Worst-case |sin| over the amplified interval.

    The true angle can sit anywhere in [K theta_l, K theta_u]; |sin| is
    smallest at whichever endpoint lies closest to the half-circle boundary,
    and probability inversion degenerates there.
    """
    fl = big_k * theta_l - math.floor(big_k * theta_l)
    fu = big_k * theta_u - math.floor(big_k * theta_u)
    return min(abs(math.sin(_TWO_PI * fl)), abs(math.sin(_TWO_PI * fu)))


def _find_next_k(
    k: int,
    upper: bool,
    theta_l: float,
    theta_u: float,
    k_cap: int,
    k_floor: Optional[int] = None,
) -> tuple[int, bool]:
    """Best admissible power whose amplified interval fits one half-circle.

    Admissible K = 4k'+2 at least double the current power (and reach
    ``k_floor`` when given), keep the amplified interval inside a half-circle
    (so the probability inverts uniquely), and respect the width/cap limit.
    Among them the score K * placement^2 picks the cheapest projected
    finish: shots needed scale as 1/(K placement)^2 per iterate power ~K.
    """
    k_cur = 4 * k + 2
    width = theta_u - theta_l
    if width <= 0.0:
        return k, upper
    k_hi = min(int(1.0 / (2.0 * width)), k_cap)
    big = _to_2mod4(k_hi)
    low = max(2 * k_cur, k_floor if k_floor is not None else 0)
    if big < low:
        return k, upper
    best: Optional[tuple[float, int, bool]] = None
    while big >= low:
        side = _half_circle(big, theta_l, theta_u)
        if side is not None:
            score = big * _placement(big, theta_l, theta_u) ** 2
            if best is None or score > best[0]:
                best = (score, big, side)
        big -= 4
    if best is None:
        return k, upper
    return (best[1] - 2) // 4, best[2]


def _update_interval(
    theta_l: float, theta_u: float, k: int, upper: bool, a_lo: float, a_hi: float
) -> tuple[float, float]:
    """Intersect [theta_l, theta_u] with the inversion of the probability CI."""
    big_k = 4 * k + 2
    phi_lo = math.acos(max(-1.0, min(1.0, 1.0 - 2.0 * a_lo))) / _TWO_PI
    phi_hi = math.acos(max(-1.0, min(1.0, 1.0 - 2.0 * a_hi))) / _TWO_PI
    if upper:
        frac_l, frac_u = phi_lo, phi_hi
    else:
        frac_l, frac_u = 1.0 - phi_hi, 1.0 - phi_lo
    new_l = (math.floor(big_k * theta_l) + frac_l) / big_k
    new_u = (math.floor(big_k * theta_u) + frac_u) / big_k
    lo = max(theta_l, new_l)
    hi = min(theta_u, new_u)
    if lo > hi:
        # the confidence event already failed; collapse to the midpoint so
        # the run terminates (this counts toward the delta failure budget)
        mid = 0.5 * (lo + hi)
        return mid, mid
    return lo, hi


def _a_interval(theta_l: float, theta_u: float) -> tuple[float, float]:
    return math.sin(_TWO_PI * theta_l) ** 2, math.sin(_TWO_PI * theta_u) ** 2


def _needed_shots(width_target: float, alpha: float) -> int:
    """Shots for a two-sided binomial CI of roughly the given half-width."""
    w = min(max(width_target, 1e-6), 0.4)
    return max(1, math.ceil(math.log(2.0 / alpha) / (2.0 * w * w)))


def _direct_goal(theta_l: float, theta_u: float, eps: float, k_cap: int) -> int:
    """Power (in K = 4k+2 units) at which one amplified level can finish.

    Termination needs the probability CI at width ~ eps K sin(amplified) /
    sin(2 theta); with the CI half-width capped near 0.4 this is reachable
    for K around 0.6 sin(2 theta)/eps, which is therefore the jump target
    worth waiting for while shots are still query-free.
    """
    mid = 0.5 * (theta_l + theta_u)
    s_out = max(abs(math.sin(2.0 * _TWO_PI * mid)), 0.05)
    return min(k_cap, _to_2mod4(max(6, math.ceil(0.6 * s_out / eps))))


def iqae_estimate(
    oracle: AmplitudeOracle,
    eps: float,
    delta: float,
    rng: np.random.Generator,
    shots_per_round: int = 100,
) -> IqaeResult:
    """Estimate the oracle amplitude to within eps at confidence 1 - delta.

    Returns an interval of width <= 2 eps whose midpoint is the estimate;
    ``calls`` is the total number of Grover-iterate applications consumed.
    ``shots_per_round`` scales the shot batches (batches start near a tenth
    of it and grow geometrically while a power level needs sharpening).
    """
    if not 0.0 < eps < 0.5:
        raise ValueError("eps must be in (0, 0.5)")
    if not 0.0 < delta < 1.0:
        raise ValueError("delta must be in (0, 1)")
    if shots_per_round < 1:
        raise ValueError("shots_per_round must be >= 1")

    k_cap = _to_2mod4(max(2, math.ceil(_K_CAP_FACTOR / eps)))
    free_budget = min(20_000, math.ceil(_FREE_SHOT_BUDGET / (eps * eps)))
    batch0 = max(1, math.ceil(shots_per_round / 10))

    theta_l, theta_u = 0.0, 0.25  # turns; a = sin^2(2 pi theta)
    k, upper = 0, True
    hits = shots = look = rounds = 0

    for _ in range(_MAX_LOOKS):
        a_lo_cur, a_hi_cur = _a_interval(theta_l, theta_u)
        if a_hi_cur - a_lo_cur <= 2.0 * eps:
            break

        look += 1
        # Confidence budget per power level, proportional to its K: levels at
        # least double K, so the level budgets sum to at most delta/2, and
        # halving across looks keeps each level within its budget.  Expensive
        # high-power levels thereby get the loosest (cheapest) intervals.
        alpha_level = min(delta * (4 * k + 2) / (4.0 * k_cap), 0.25 * delta)
        alpha_look = alpha_level * 0.5 ** min(look, 50)
        batch = _plan_batch(
            theta_l, theta_u, k, eps, alpha_look, batch0, look, shots, k_cap
        )
        got = grover_sample(oracle, k, batch, rng)
        hits += got
        shots += batch
        rounds += 1

        a_lo, a_hi = _clopper_pearson(hits, shots, alpha_look)
        theta_l, theta_u = _update_interval(theta_l, theta_u, k, upper, a_lo, a_hi)

        a_lo_cur, a_hi_cur = _a_interval(theta_l, theta_u)
        if a_hi_cur - a_lo_cur <= 2.0 * eps:
            break

        k2, up2 = _find_next_k(k, upper, theta_l, theta_u, k_cap)
        if k2 != k:
            # While still at power 0 (query-free), hold out for a jump deep
            # enough to finish in one amplified level, unless the power-0
            # shot budget is exhausted.
            deep_enough = 4 * k2 + 2 >= _direct_goal(theta_l, theta_u, eps, k_cap)
            if k > 0 or deep_enough or shots >= free_budget:
                k, upper = k2, up2
                hits = shots = look = 0
    else:
        raise RuntimeError("amplitude estimation failed to terminate")

    a_lo_cur, a_hi_cur = _a_interval(theta_l, theta_u)
    return IqaeResult(
        a_hat=0.5 * (a_lo_cur + a_hi_cur),
        interval=(a_lo_cur, a_hi_cur),
        calls=oracle.call_counter,
        preps=oracle.prep_counter,
        rounds=rounds,
        final_k=k,
    )


def _log2(x: float) -> float:
    return math.log(x) / math.log(2.0)


def _plan_batch(
    theta_l: float,
    theta_u: float,
    k: int,
    eps: float,
    alpha_look: float,
    batch0: int,
    look: int,
    shots_so_far: int,
    k_cap: int,
) -> int:
    """Next shot batch at the current power level.

    Free levels (k = 0) just escalate geometrically.  At amplified levels the
    batch is sized toward the cheaper of the two exits: sharpening enough to
    terminate here, or enough to let the power at least double.  Whatever the
    sizing says, the pooled count grows by at least half per look, so a level
    cannot stall.
    """
    if k == 0:
        return batch0 * 2 ** (look - 1)

    big_k = 4 * k + 2
    mid = 0.5 * (theta_l + theta_u)
    amp = big_k * mid
    s_inner = max(abs(math.sin(_TWO_PI * (amp - math.floor(amp)))), 0.05)
    s_outer = max(abs(math.sin(2.0 * _TWO_PI * mid)), 1e-3)

    # probability-CI half-width that would shrink the a-interval to 2 eps
    w_term = _SIZING_MARGIN * eps * big_k * s_inner / s_outer
    n_term = _needed_shots(w_term, alpha_look)
    # half-width that lets the power double (amplified width <= 1/(4K))
    w_adv = math.pi * s_inner / 4.0
    n_adv = _needed_shots(w_adv, alpha_look)

    # attempt to finish at this level only if no further doubling is possible
    # or finishing is genuinely no dearer than advancing; otherwise advance.
    # An advance batch gets doubled insurance: a retry at this level costs k
    # queries per extra shot, so undershooting is dearer than padding.
    last_level = big_k * 2 > k_cap
    if last_level or n_term <= 1.2 * n_adv:
        target = n_term
    else:
        target = 2 * n_adv
    # Clopper-Pearson intervals run wider than the Hoeffding sizing bound;
    # inflate so one batch usually suffices, with a gentle growth floor
    floor_total = shots_so_far + max(batch0, math.ceil(0.3 * shots_so_far))
    return max(math.ceil(1.35 * target), floor_total) - shots_so_far
