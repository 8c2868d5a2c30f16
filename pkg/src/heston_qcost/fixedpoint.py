"""Two's-complement fixed-point emulation and function approximation.

An (n, p) format stores values z * 2^(p-n) for integers z in
[-2^(n-1), 2^(n-1)); p counts the integer bits including the sign.  Addition
and subtraction are exact on the grid; multiplication and square root return
the exact real result floored to the grid (the "bar" map
x -> 2^(p-n) * floor(2^(n-p) x)).  Overflow is always detected and raised,
never wrapped.

The module also provides piecewise-polynomial approximants for exp/arcsin
(the form a reversible arithmetic circuit evaluates), a discretized standard
normal on a symmetric 2^m-point grid, and :func:`estimate_arith_error`, which
replays simulated paths once in float64 and once through the fixed-point
operation chain to measure the payoff error those roundings induce.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Callable, Mapping, Optional, Union

import numpy as np
from scipy.special import ndtr, ndtri

from .model import HestonParams
from .payoff import OptionSpec, is_barrier
from .schemes import TimeGrid, stream

__all__ = [
    "ArithReplayResult",
    "DiscreteGaussian",
    "FixedFormat",
    "FixedPointOverflowError",
    "FixedValue",
    "PiecewisePoly",
    "build_piecewise_poly",
    "discrete_gaussian",
    "estimate_arith_error",
    "fx_add",
    "fx_compare_const",
    "fx_mul",
    "fx_mul_const",
    "fx_sqrt",
    "fx_sub",
    "quantize",
]

logger = logging.getLogger(__name__)

# int64 covers raw products (z1*z2 < 2^62) and shifted radicands up to n=32;
# wider formats fall back to exact Python integers on object arrays.
_VECTOR_MAX_BITS = 32
_TABLE_MAX_POINTS = 1 << 20


class FixedPointOverflowError(OverflowError):
    """A result left the representable range [-2^(p-1), 2^(p-1))."""

    def __init__(self, message: str, step: Optional[int] = None, op: Optional[str] = None):
        super().__init__(message)
        self.step = step
        self.op = op


@dataclass(frozen=True)
class FixedFormat:
    """n total bits, p integer bits (sign included)."""

    n: int
    p: int

    def __post_init__(self) -> None:
        if not 1 <= self.p <= self.n:
            raise ValueError(f"need 1 <= p <= n, got n={self.n}, p={self.p}")

    @property
    def shift(self) -> int:
        return self.n - self.p

    @property
    def ulp(self) -> float:
        return 2.0 ** (self.p - self.n)

    @property
    def raw_min(self) -> int:
        return -(1 << (self.n - 1))

    @property
    def raw_max(self) -> int:
        return (1 << (self.n - 1)) - 1


@dataclass(frozen=True)
class FixedValue:
    """Raw integer plus its format; value = raw * 2^(p-n)."""

    raw: int
    fmt: FixedFormat

    def __post_init__(self) -> None:
        if not self.fmt.raw_min <= self.raw <= self.fmt.raw_max:
            raise FixedPointOverflowError(
                f"raw {self.raw} outside [{self.fmt.raw_min}, {self.fmt.raw_max}]"
            )

    @property
    def value(self) -> float:
        return self.raw * self.fmt.ulp


def quantize(x: float, fmt: FixedFormat) -> FixedValue:
    """Largest grid value <= x (the bar map).  Out-of-range x overflows."""
    if not math.isfinite(x):
        raise ValueError(f"cannot quantize {x!r}")
    raw = math.floor(x * 2.0**fmt.shift)
    if not fmt.raw_min <= raw <= fmt.raw_max:
        raise FixedPointOverflowError(f"{x} outside representable range of ({fmt.n},{fmt.p})")
    return FixedValue(raw, fmt)


def _as_fixed(c: Union[float, FixedValue], fmt: FixedFormat) -> FixedValue:
    if isinstance(c, FixedValue):
        if c.fmt != fmt:
            raise ValueError("mixed fixed-point formats")
        return c
    return quantize(float(c), fmt)


def _check(raw: int, fmt: FixedFormat, op: str) -> FixedValue:
    if not fmt.raw_min <= raw <= fmt.raw_max:
        raise FixedPointOverflowError(f"overflow in {op}", op=op)
    return FixedValue(raw, fmt)


def fx_add(a: FixedValue, b: FixedValue) -> FixedValue:
    """Exact grid addition."""
    if a.fmt != b.fmt:
        raise ValueError("mixed fixed-point formats")
    return _check(a.raw + b.raw, a.fmt, "add")


def fx_sub(a: FixedValue, b: FixedValue) -> FixedValue:
    """Exact grid subtraction."""
    if a.fmt != b.fmt:
        raise ValueError("mixed fixed-point formats")
    return _check(a.raw - b.raw, a.fmt, "sub")


def fx_mul(a: FixedValue, b: FixedValue) -> FixedValue:
    """Floor of the exact product: raw = (a.raw * b.raw) >> (n - p)."""
    if a.fmt != b.fmt:
        raise ValueError("mixed fixed-point formats")
    return _check((a.raw * b.raw) >> a.fmt.shift, a.fmt, "mul")


def fx_mul_const(x: FixedValue, c: Union[float, FixedValue]) -> FixedValue:
    """Multiply by a grid constant (floats are quantized first)."""
    return fx_mul(x, _as_fixed(c, x.fmt))


def fx_sqrt(x: FixedValue) -> FixedValue:
    """Floor of the exact square root; negative input is a domain error."""
    if x.raw < 0:
        raise ValueError("fx_sqrt of negative value (truncate first)")
    return _check(math.isqrt(x.raw << x.fmt.shift), x.fmt, "sqrt")


def fx_compare_const(x: FixedValue, c: Union[float, FixedValue]) -> int:
    """1 iff x >= c."""
    return int(x.raw >= _as_fixed(c, x.fmt).raw)


# ---------------------------------------------------------------------------
# vectorized raw-integer kernels (int64 for n <= 32, Python ints above)


def _raw_dtype(fmt: FixedFormat):
    return np.int64 if fmt.n <= _VECTOR_MAX_BITS else object


def _quantize_array(x: np.ndarray, fmt: FixedFormat, step: Optional[int], op: str) -> np.ndarray:
    scaled = np.floor(np.asarray(x, dtype=np.float64) * 2.0**fmt.shift)
    _check_array(scaled, fmt, step, op, as_float=True)
    if _raw_dtype(fmt) is np.int64:
        return scaled.astype(np.int64)
    return np.frompyfunc(int, 1, 1)(scaled)


def _check_array(raw, fmt: FixedFormat, step: Optional[int], op: str, as_float: bool = False):
    lo, hi = fmt.raw_min, fmt.raw_max
    bad = np.logical_or(raw < lo, raw > hi)
    if np.any(bad):
        where = f" at step {step}" if step is not None else ""
        raise FixedPointOverflowError(
            f"fixed-point overflow in {op}{where}: format ({fmt.n},{fmt.p}) too narrow",
            step=step,
            op=op,
        )
    return raw


def _mul_raw(a, b, fmt: FixedFormat, step: Optional[int], op: str):
    return _check_array((a * b) >> fmt.shift, fmt, step, op)


def _isqrt_raw(y_raw, fmt: FixedFormat):
    """floor(sqrt(value)) on the grid: isqrt(max(raw, 0) << shift)."""
    v = np.maximum(y_raw, 0) << fmt.shift
    if _raw_dtype(fmt) is object:
        return np.frompyfunc(math.isqrt, 1, 1)(v)
    s = np.floor(np.sqrt(v.astype(np.float64))).astype(np.int64)
    s = np.where((s + 1) * (s + 1) <= v, s + 1, s)
    s = np.where(s * s > v, s - 1, s)
    return s


# ---------------------------------------------------------------------------
# piecewise polynomials


@dataclass(frozen=True)
class PiecewisePoly:
    """Degree-d polynomial on each of M half-open subintervals of the domain.

    ``coeffs[i, j]`` is the coefficient of x^j on [breakpoints[i],
    breakpoints[i+1]).  ``sup_error`` is the verified sup-norm distance to the
    target over the domain.  Inputs outside the domain evaluate with the
    nearest edge interval's polynomial (matching a comparator cascade).
    """

    target: str
    domain: tuple[float, float]
    breakpoints: np.ndarray
    coeffs: np.ndarray
    sup_error: float

    @property
    def n_intervals(self) -> int:
        return self.coeffs.shape[0]

    @property
    def degree(self) -> int:
        return self.coeffs.shape[1] - 1

    def _interval_index(self, x: np.ndarray) -> np.ndarray:
        idx = np.searchsorted(self.breakpoints[1:-1], x, side="right")
        return np.clip(idx, 0, self.n_intervals - 1)

    def __call__(self, x) -> np.ndarray:
        x = np.asarray(x, dtype=np.float64)
        c = self.coeffs[self._interval_index(x)]
        acc = c[..., -1] * np.ones_like(x)
        for j in range(self.degree - 1, -1, -1):
            acc = acc * x + c[..., j]
        return acc

    def eval_fixed(self, x_raw, fmt: FixedFormat, step: Optional[int] = None):
        """Horner evaluation through fixed-point multiply/add on raw ints."""
        bp_raw = [quantize(float(b), fmt).raw for b in self.breakpoints[1:-1]]
        coef_raw = np.array(
            [[quantize(float(c), fmt).raw for c in row] for row in self.coeffs],
            dtype=_raw_dtype(fmt),
        )
        idx = np.zeros(np.shape(x_raw), dtype=np.int64)
        for b in bp_raw:
            idx += x_raw >= b
        acc = coef_raw[idx, self.degree]
        for j in range(self.degree - 1, -1, -1):
            acc = _mul_raw(acc, x_raw, fmt, step, "ppoly-mul") + coef_raw[idx, j]
            _check_array(acc, fmt, step, "ppoly-add")
        return acc


_TARGETS: dict[str, Callable[[np.ndarray], np.ndarray]] = {
    "exp": np.exp,
    "arcsin": np.arcsin,
}

_SAMPLES_PER_INTERVAL = 10_000


def _power_coeffs(f, a: float, b: float, d: int) -> np.ndarray:
    """Plain-x coefficients interpolating f at d+1 Chebyshev nodes on [a, b]."""
    k = np.arange(d + 1)
    nodes = np.cos(np.pi * (2 * k + 1) / (2 * (d + 1)))
    x = 0.5 * (a + b) + 0.5 * (b - a) * nodes
    return np.polynomial.polynomial.polyfit(x, f(x), d)


def _fit_candidate(f, domain, m: int, d: int, name: str) -> PiecewisePoly:
    a, b = domain
    bp = np.linspace(a, b, m + 1)
    coeffs = np.vstack([_power_coeffs(f, bp[i], bp[i + 1], d) for i in range(m)])
    pp = PiecewisePoly(name, (a, b), bp, coeffs, sup_error=math.inf)
    xs = np.linspace(a, b, m * _SAMPLES_PER_INTERVAL + 1)
    err = float(np.max(np.abs(pp(xs) - f(xs))))
    return PiecewisePoly(name, (a, b), bp, coeffs, sup_error=err)


def build_piecewise_poly(
    target: Union[str, Callable],
    domain: tuple[float, float],
    eps: float,
    fmt: FixedFormat,
    max_degree: int = 8,
    max_intervals: int = 512,
) -> PiecewisePoly:
    """Fit an eps-accurate piecewise polynomial, minimizing its circuit cost.

    Each degree d in 0..max_degree is tried with the interval count doubling
    from 1 until the verified sup error (dense sampling, 10^4 points per
    interval) drops below eps; among the successful (M, d) pairs the one with
    the smallest evaluation T-count for ``fmt`` wins.
    """
    if eps <= 0.0:
        raise ValueError("eps must be > 0")
    if isinstance(target, str):
        if target not in _TARGETS:
            raise ValueError(f"unknown target {target!r}; expected one of {sorted(_TARGETS)}")
        if target == "arcsin" and not (-1.0 < domain[0] < domain[1] < 1.0):
            raise ValueError("arcsin fits need a domain inside (-1, 1)")
        return _build_cached(target, tuple(domain), float(eps), fmt, max_degree, max_intervals)
    return _build(target, getattr(target, "__name__", "custom"), tuple(domain), eps, fmt, max_degree, max_intervals)


@lru_cache(maxsize=64)
def _build_cached(target, domain, eps, fmt, max_degree, max_intervals) -> PiecewisePoly:
    return _build(_TARGETS[target], target, domain, eps, fmt, max_degree, max_intervals)


def _build(f, name, domain, eps, fmt, max_degree, max_intervals) -> PiecewisePoly:
    from .qresource import cost_primitive  # deferred: qresource imports this module

    best = None
    for d in range(0, max_degree + 1):
        m = 1
        while m <= max_intervals:
            pp = _fit_candidate(f, domain, m, d, name)
            if pp.sup_error <= eps:
                cost = cost_primitive("ppoly", fmt.n, fmt.p, m=m, d=d).t_count
                if best is None or cost < best[0]:
                    best = (cost, pp)
                break
            m *= 2
    if best is None:
        raise ValueError(
            f"no ({name}) fit reaches eps={eps} within d<={max_degree}, M<={max_intervals}"
        )
    return best[1]


# ---------------------------------------------------------------------------
# discretized standard normal


@dataclass
class DiscreteGaussian:
    """Standard normal restricted to the grid x_i = (-1 + 2i/M) eta.

    Mass at x_i is exp(-x_i^2/2)/Z with Z the normalizing sum (a state
    preparation routine would load the amplitudes exp(-x_i^2/4)/sqrt(Z)).
    Explicit mass tables are built only for M <= 2^20; larger supports are
    sampled by drawing a truncated normal and snapping down to the grid,
    whose relative mass error is O(eta |x| / M) and negligible at such M.
    """

    m_points: int
    eta: float
    _x: Optional[np.ndarray] = field(default=None, repr=False)
    _pmf: Optional[np.ndarray] = field(default=None, repr=False)

    def __post_init__(self) -> None:
        m = self.m_points
        if m < 2 or (m & (m - 1)) != 0:
            raise ValueError(f"m_points must be a power of two >= 2, got {m}")
        if self.eta <= 0.0:
            raise ValueError(f"eta must be > 0, got {self.eta}")

    @property
    def x(self) -> np.ndarray:
        if self._x is None:
            self._ensure_table()
        return self._x

    @property
    def pmf(self) -> np.ndarray:
        if self._pmf is None:
            self._ensure_table()
        return self._pmf

    def _ensure_table(self) -> None:
        if self.m_points > _TABLE_MAX_POINTS:
            raise ValueError(f"explicit table limited to M <= {_TABLE_MAX_POINTS}")
        i = np.arange(self.m_points)
        x = (2.0 * i - self.m_points) * self.eta / self.m_points
        w = np.exp(-0.5 * x * x)
        self._x = x
        self._pmf = w / w.sum()

    def amplitudes(self) -> np.ndarray:
        i = np.arange(self.m_points)
        x = (2.0 * i - self.m_points) * self.eta / self.m_points
        a = np.exp(-0.25 * x * x)
        return a / math.sqrt(float(np.sum(a * a)))

    def mean(self) -> float:
        return float(np.dot(self.pmf, self.x))

    def variance(self) -> float:
        mu = self.mean()
        return float(np.dot(self.pmf, (self.x - mu) ** 2))

    def sample(self, rng: np.random.Generator, size=None) -> np.ndarray:
        if self.m_points <= _TABLE_MAX_POINTS:
            cdf = np.cumsum(self.pmf)
            idx = np.searchsorted(cdf, rng.random(size), side="right")
            idx = np.minimum(idx, self.m_points - 1)
            return self.x[idx]
        lo, hi = ndtr(-self.eta), ndtr(self.eta)
        z = ndtri(lo + (hi - lo) * rng.random(size))
        idx = np.floor((z + self.eta) * (self.m_points / (2.0 * self.eta)))
        idx = np.clip(idx, 0, self.m_points - 1)
        return (2.0 * idx - self.m_points) * self.eta / self.m_points


def discrete_gaussian(m_points: int, eta: float) -> DiscreteGaussian:
    """Discretized standard normal on 2^m symmetric grid points."""
    return DiscreteGaussian(m_points, eta)


# ---------------------------------------------------------------------------
# float vs fixed-point path replay


@dataclass(frozen=True)
class ArithReplayResult:
    """Outcome of a float-vs-fixed replay.

    ``eps_arithm`` is the mean absolute difference between the normalized
    payoffs of the two replays (for Gaussian-increment runs this includes the
    effect of drawing the increments from the discretized normal).
    ``step_max_dev[j]`` is the largest |log-return difference| seen at step j.
    ``saturation_count`` counts samples whose exponential-sum register was
    saturated at the format bound (see :func:`estimate_arith_error`).
    """

    eps_arithm: float
    step_max_dev: np.ndarray
    n_samples: int
    clip_count: int
    saturation_count: int = 0


def estimate_arith_error(
    spec: OptionSpec,
    params: HestonParams,
    scheme: str,
    fmt: FixedFormat,
    pp_set: Mapping[str, PiecewisePoly],
    grid: TimeGrid,
    n_samples: int = 10_000,
    seed: int = 0,
    eta: float = 6.0,
    block: int = 2048,
) -> ArithReplayResult:
    """Replay paths in float64 and in fixed point; average the payoff gap.

    The fixed-point chain follows the reversible-circuit evaluation order:
    square root of the (truncated) variance, products of positive-magnitude
    step constants (signs, including sign(rho) and the increment coins, enter
    through the exact add/subtract accumulation), then the payoff network
    with the fitted exp approximant.  Increments are +-1 coin flips for
    ``weak-euler`` and draws from :func:`discrete_gaussian` (M = 2^n) for
    ``strong-euler``; both replays consume the same draws.

    The exponential-sum register of averaging payoffs can exceed the format
    bound on rare extreme paths even at otherwise adequate p; because the
    sum only enters through a payoff that such paths pin at 0 or 1 anyway,
    the register saturates at the bound (counted and logged) instead of
    failing the whole replay.  Any other overflow raises
    :class:`FixedPointOverflowError` naming the offending step, which
    signals that p is too small for the dynamics.
    """
    if scheme not in ("strong-euler", "weak-euler"):
        raise ValueError(f"replay supports strong-euler/weak-euler, got {scheme!r}")
    if "exp" not in pp_set:
        raise ValueError("pp_set must provide an 'exp' approximant")
    if spec.z_bound is None:
        raise ValueError("spec.z_bound is required (payoffs are compared normalized)")
    pp_exp = pp_set["exp"]
    n_steps = grid.n_steps
    h = grid.h
    strong = scheme == "strong-euler"
    gauss = discrete_gaussian(2**fmt.n, eta) if strong else None

    q = lambda v: quantize(v, fmt)  # noqa: E731
    sgn_rho = 1 if params.rho >= 0.0 else -1
    c_drift1 = q(0.5 * h).raw
    c_rho = q(abs(params.rho) * math.sqrt(h)).raw
    c_orth = q(math.sqrt(h * (1.0 - params.rho**2))).raw
    c_drift2 = q(params.kappa * h).raw
    c_xi = q(params.xi * math.sqrt(h)).raw
    c_rh = q(params.r * h).raw
    c_kth = q(params.kappa * params.theta * h).raw

    barrier = is_barrier(spec.kind)
    z_bound = float(spec.z_bound)
    if barrier:
        c_scale = q(params.s0 / z_bound).raw
        log_barrier_f = math.log(spec.barrier / params.s0)
        log_barrier_raw = q(log_barrier_f).raw
    else:
        c_scale = q(params.s0 / (n_steps * z_bound)).raw
    k_norm = q(spec.strike / z_bound).raw

    dtype = _raw_dtype(fmt)
    step_max_dev = np.zeros(n_steps + 1)
    diff_sum = 0.0
    clip_count = 0
    saturation_count = 0
    done = 0
    block_index = 0
    while done < n_samples:
        m = min(block, n_samples - done)
        rng = stream(seed, block_index)
        y1f = np.zeros(m)
        y2f = np.full(m, params.nu0)
        y1r = np.zeros(m, dtype=dtype)
        y2r = np.full(m, q(params.nu0).raw, dtype=dtype)
        if not barrier:
            accf = np.zeros(m)
            accr = np.zeros(m, dtype=dtype)
        else:
            maxf = np.full(m, -np.inf)
            minf = np.full(m, np.inf)
            maxr = np.full(m, fmt.raw_min, dtype=dtype)
            minr = np.full(m, fmt.raw_max, dtype=dtype)

        for j in range(n_steps):
            if strong:
                a = gauss.sample(rng, m)
                b = gauss.sample(rng, m)
            else:
                a = 2.0 * rng.integers(0, 2, m) - 1.0
                b = 2.0 * rng.integers(0, 2, m) - 1.0

            # float twin (exact arithmetic reference)
            sqf = np.sqrt(np.maximum(y2f, 0.0))
            y1f = y1f + (-0.5 * h) * y2f + sqf * (params.rho * math.sqrt(h) * a) + sqf * (
                math.sqrt(h * (1.0 - params.rho**2)) * b
            ) + params.r * h
            y2f = y2f + (-params.kappa * h) * y2f + sqf * (params.xi * math.sqrt(h) * a) + (
                params.kappa * params.theta * h
            )

            # fixed-point chain
            sqr = _isqrt_raw(y2r, fmt)
            g1 = _mul_raw(y2r, c_drift1, fmt, j, "mul_const")
            g4 = _mul_raw(y2r, c_drift2, fmt, j, "mul_const")
            if strong:
                ar = _quantize_array(a, fmt, j, "increment")
                br = _quantize_array(b, fmt, j, "increment")
                lam1 = _mul_raw(ar, sqr, fmt, j, "mul")
                lam2 = _mul_raw(br, sqr, fmt, j, "mul")
                g2 = _mul_raw(lam1, c_rho, fmt, j, "mul_const")
                g3 = _mul_raw(lam2, c_orth, fmt, j, "mul_const")
                g5 = _mul_raw(lam1, c_xi, fmt, j, "mul_const")
                y1r = _check_array(y1r - g1 + sgn_rho * g2 + g3 + c_rh, fmt, j, "add")
                y2r = _check_array(y2r - g4 + g5 + c_kth, fmt, j, "add")
            else:
                si = a.astype(np.int64) if dtype is np.int64 else np.frompyfunc(int, 1, 1)(a)
                ti = b.astype(np.int64) if dtype is np.int64 else np.frompyfunc(int, 1, 1)(b)
                g2 = _mul_raw(sqr, c_rho, fmt, j, "mul_const")
                g3 = _mul_raw(sqr, c_orth, fmt, j, "mul_const")
                g5 = _mul_raw(sqr, c_xi, fmt, j, "mul_const")
                y1r = _check_array(y1r - g1 + (sgn_rho * si) * g2 + ti * g3 + c_rh, fmt, j, "add")
                y2r = _check_array(y2r - g4 + si * g5 + c_kth, fmt, j, "add")

            dev = np.abs(y1r.astype(np.float64) * fmt.ulp - y1f)
            step_max_dev[j + 1] = max(step_max_dev[j + 1], float(dev.max()))

            if not barrier:
                er = pp_exp.eval_fixed(y1r, fmt, step=j)
                accr = accr + er  # exact here; saturated at the format bound below
                accf = accf + np.exp(y1f)
            else:
                maxf = np.maximum(maxf, y1f)
                minf = np.minimum(minf, y1f)
                maxr = np.maximum(maxr, y1r)
                minr = np.minimum(minr, y1r)

        # payoff network
        if not barrier:
            sat = np.logical_or(accr > fmt.raw_max, accr < fmt.raw_min)
            if np.any(sat):
                saturation_count += int(np.count_nonzero(sat))
                accr = np.clip(accr, fmt.raw_min, fmt.raw_max)
            xf = (params.s0 / (n_steps * z_bound)) * accf - spec.strike / z_bound
            if spec.kind == "asian-put":
                xf = -xf
            xr = _mul_raw(accr, c_scale, fmt, None, "payoff-mul_const") - k_norm
            if spec.kind == "asian-put":
                xr = -xr
        else:
            er = pp_exp.eval_fixed(y1r, fmt, step=n_steps)
            termf = (params.s0 / z_bound) * np.exp(y1f)
            termr = _mul_raw(er, c_scale, fmt, None, "payoff-mul_const")
            if spec.kind.endswith("call"):
                xf = termf - spec.strike / z_bound
                xr = termr - k_norm
            else:
                xf = spec.strike / z_bound - termf
                xr = k_norm - termr
            if spec.kind.startswith("up"):
                knockedf = maxf >= log_barrier_f
                knockedr = maxr >= log_barrier_raw
            else:
                knockedf = minf <= log_barrier_f
                knockedr = minr <= log_barrier_raw
            keepf = knockedf if "-in-" in spec.kind else ~knockedf
            keepr = knockedr if "-in-" in spec.kind else ~knockedr
            xf = np.where(keepf, xf, 0.0)
            xr = np.where(keepr, xr, 0)

        ff = np.clip(xf, 0.0, 1.0)
        fr_unclipped = np.maximum(xr, 0).astype(np.float64) * fmt.ulp
        clip_count += int(np.count_nonzero(xf > 1.0)) + int(np.count_nonzero(fr_unclipped > 1.0))
        fr = np.clip(fr_unclipped, 0.0, 1.0)
        diff_sum += float(np.sum(np.abs(fr - ff)))

        done += m
        block_index += 1

    if saturation_count:
        logger.warning(
            "estimate_arith_error: exponential-sum register saturated on %d of %d samples "
            "(format (%d,%d) has little headroom for this instance)",
            saturation_count,
            n_samples,
            fmt.n,
            fmt.p,
        )
    return ArithReplayResult(
        eps_arithm=diff_sum / n_samples,
        step_max_dev=step_max_dev,
        n_samples=n_samples,
        clip_count=clip_count,
        saturation_count=saturation_count,
    )
