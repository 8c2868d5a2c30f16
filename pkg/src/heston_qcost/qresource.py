"""Fault-tolerant cost model for the amplitude-estimation pricing circuits.

Costs are measured in T-count, T-depth and ancilla qubits over Clifford+T.
The primitive table covers the standard reversible-arithmetic constructions
(Gidney adders, Jones / temporary-AND multiqubit Toffolis, the Amy
phase-gadget Toffoli, shift-and-add multipliers, a non-restoring square root,
comparator, and piecewise-polynomial evaluators for exp / arcsin-of-sqrt).
On top of the primitives sit:

* ``cost_usin``    -- block-encoding of a shifted sine (conventional
  two-rotations-per-control synthesis vs. the catalyst-assisted single
  rotation layer),
* ``cost_ugauss``  -- Gaussian state preparation via quantum eigenvalue
  transformation of the sine block-encoding plus exact amplitude
  amplification,
* ``cost_u1/u2/u3`` -- the path-simulation, payoff and amplitude-transfer
  stages of the pricing circuit, per scheme and option family,
* ``total_cost``   -- the full Grover-iterate budget including the reflection
  Toffoli and the amplitude-estimation query count ``n_oracle``,
* ``qubit_ledger`` -- peak logical-qubit usage with an explicitly reusable
  transient ancilla pool,
* ``error_budget`` -- the additive accuracy decomposition of the estimate.

All rotation-synthesis terms use 1.15 log2(1/eps) T gates per rotation;
real-valued totals are rounded up once, at the outermost level.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from typing import Optional

from .fixedpoint import FixedFormat, build_piecewise_poly
from .payoff import OPTION_KINDS, is_barrier

__all__ = [
    "AlgorithmConfig",
    "ErrorBudget",
    "GaussPrepParams",
    "ResourceCost",
    "TotalCost",
    "cost_primitive",
    "cost_u1",
    "cost_u2",
    "cost_u3",
    "cost_ugauss",
    "cost_usin",
    "error_budget",
    "gauss_prep_params",
    "n_oracle",
    "qubit_ledger",
    "total_cost",
]

_LOG2 = math.log(2.0)


def _log2(x: float) -> float:
    return math.log(x) / _LOG2


@dataclass(frozen=True)
class ResourceCost:
    """T-count, T-depth and ancilla requirement of one operation.

    Sequential composition adds counts and depths; the ancilla pool is
    reusable, so a sequence needs only the maximum of its parts.
    """

    t_count: int
    t_depth: int
    ancilla: int

    def __post_init__(self) -> None:
        if min(self.t_count, self.t_depth, self.ancilla) < 0:
            raise ValueError("resource components must be nonnegative")
        if self.t_depth > self.t_count:
            raise ValueError("t_depth cannot exceed t_count")

    def __add__(self, other: "ResourceCost") -> "ResourceCost":
        return ResourceCost(
            self.t_count + other.t_count,
            self.t_depth + other.t_depth,
            max(self.ancilla, other.ancilla),
        )

    def times(self, k: int) -> "ResourceCost":
        """k sequential repetitions."""
        if k < 0:
            raise ValueError("k must be >= 0")
        return ResourceCost(k * self.t_count, k * self.t_depth, self.ancilla if k else 0)


_ZERO = ResourceCost(0, 0, 0)


def _mul_poly(n: int, p: int) -> tuple[int, int]:
    tc = 4 * n * n - 8 * n + 8 * p * n - 8 * p * p + 8 * p
    return tc, tc // 2


def cost_primitive(
    kind: str, n: int, p: Optional[int] = None, m: Optional[int] = None, d: Optional[int] = None
) -> ResourceCost:
    """Cost of one fixed-point arithmetic primitive on n-bit registers.

    ``p`` is the integer-bit count (multipliers and polynomial evaluators
    need it); ``m``/``d`` are the interval count and degree of piecewise
    polynomial evaluators.  ``toffoli_jones``/``toffoli_amy`` are n-qubit
    Toffolis (the Amy construction needs n >= 5 but only one ancilla).
    """
    if n < 1:
        raise ValueError("n must be >= 1")

    def need_p() -> int:
        if p is None:
            raise ValueError(f"{kind} needs the integer-bit count p")
        if not 1 <= p <= n:
            raise ValueError(f"need 1 <= p <= n, got p={p}")
        return p

    def need_md() -> tuple[int, int]:
        if m is None or d is None:
            raise ValueError(f"{kind} needs the piecewise-polynomial shape (m, d)")
        if m < 1 or d < 0:
            raise ValueError(f"invalid piecewise-polynomial shape (m={m}, d={d})")
        return m, d

    if kind == "toffoli_jones":
        return ResourceCost(4 * n - 8, n - 2, n - 1) if n >= 3 else _ZERO
    if kind == "toffoli_amy":
        if n < 5:
            raise ValueError("toffoli_amy needs n >= 5")
        return ResourceCost(16 * n - 60, 16 * n - 60, 1)
    if kind in ("add", "sub"):
        return ResourceCost(4 * n - 4, 2 * n - 2, n - 1)
    if kind in ("c_add", "c_sub"):
        return ResourceCost(8 * n - 4, 4 * n - 2, 2 * n - 1)
    if kind in ("add_const", "sub_const"):
        return ResourceCost(4 * n - 8, 2 * n - 4, 2 * n - 2)
    if kind == "comp_const":
        return ResourceCost(8 * n - 16, 4 * n - 8, 3 * n - 2)
    if kind == "mul":
        pp = need_p()
        tc, td = _mul_poly(n, pp)
        return ResourceCost(tc, td, 2 * n - 1)
    if kind == "mul_const":
        pp = need_p()
        tc = 2 * n * n - 6 * n + 4 * pp * n - 4 * pp * pp + 4 * pp
        td = n * n - 3 * n + 2 * pp * n - 2 * pp * pp + 2 * pp
        return ResourceCost(tc, td, n - 1)
    if kind == "sqrt":
        half = (n + 1) // 2
        return ResourceCost(
            8 * half * half + 32 * half - 8,
            4 * half * half + 16 * half - 4,
            math.ceil(3.5 * n),
        )
    if kind in ("ppoly", "exp"):
        pp = need_p()
        mm, dd = need_md()
        logm = math.ceil(_log2(mm)) if mm > 1 else 0
        base = n * n - n + 2 * pp * n - 2 * pp * pp + 2 * pp - 1
        depth_core = n * n - 2 * n + 2 * pp * n - 2 * pp * pp + 2 * pp
        tc = 8 * dd * base + 32 * mm * (n - 2) + 16 * dd * mm * (logm - 1)
        td = 4 * dd * max(depth_core, mm * (logm - 1)) + 16 * mm * (n - 2) + 4 * dd * (n - 1)
        anc = (dd + 4) * n + 2 * logm
        return ResourceCost(tc, td, anc)
    if kind == "arcsin_sqrt":
        pp = need_p()
        mm, dd = need_md()
        logm = math.ceil(_log2(mm)) if mm > 1 else 0
        half = (n + 1) // 2
        base = n * n - n + 2 * pp * n - 2 * pp * pp + 2 * pp - 1
        depth_core = n * n - 2 * n + 2 * pp * n - 2 * pp * pp + 2 * pp
        tc = (
            16 * dd * base
            + 64 * mm * (n - 2)
            + 32 * dd * mm * (logm - 1)
            + 16 * half * half
            + 48 * n
            + 64 * half
            - 64
        )
        td = (
            8 * dd * max(depth_core, mm * (logm - 1))
            + 32 * mm * (n - 2)
            + 8 * dd * (n - 1)
            + 8 * half * half
            + 24 * n
            + 32 * half
            - 32
        )
        anc = (dd + 7) * n + 2 * logm + 1
        return ResourceCost(tc, td, anc)
    raise ValueError(f"unknown primitive kind {kind!r}")


def cost_usin(n: int, eps_sin: float, mode: str = "optimized") -> ResourceCost:
    """Block-encoding of the sine over an n-bit index register.

    ``conventional`` compiles each controlled rotation into two synthesized
    rotations (T-count 3.3 n log2(2n/eps)); ``optimized`` uses n
    temporary-AND gates plus a catalyst-assisted single rotation layer
    (T-count 4n + 3.3 log2(2/eps)).  The one-time catalyst synthesis is
    excluded (it is reused across all invocations).
    """
    if not 0.0 < eps_sin < 1.0:
        raise ValueError("eps_sin must be in (0, 1)")
    if mode == "conventional":
        t = 3.3 * n * _log2(2.0 * n / eps_sin)
        return ResourceCost(math.ceil(t), math.ceil(t), 1)
    if mode == "optimized":
        tc = 4.0 * n + 3.3 * _log2(2.0 / eps_sin)
        td = n + 1.15 * _log2(2.0 / eps_sin) + 1.0
        return ResourceCost(math.ceil(tc), math.ceil(td), 3 * n + 2)
    raise ValueError(f"unknown mode {mode!r}")


@dataclass(frozen=True)
class GaussPrepParams:
    """Derived parameters of the Gaussian state-preparation circuit.

    beta = eta^2/2; f_lb is the analytic lower bound 2^(1/4)/(5 sqrt(eta)) on
    the L2 filling fraction; delta = eps_prep * f_lb is the polynomial target
    accuracy; d_delta the polynomial degree; k the exact-amplitude-
    amplification round count; m_delta the total rotation count.
    """

    beta: float
    delta: float
    d_delta: int
    f_lb: float
    k: int
    m_delta: int


def gauss_prep_params(n: int, eta: float, eps_prep: float) -> GaussPrepParams:
    """Degree, amplification rounds and rotation count for Gaussian loading."""
    if eta <= 0.0 or eps_prep <= 0.0:
        raise ValueError("eta and eps_prep must be > 0")
    beta = 0.5 * eta * eta
    if 2.0**n < math.sqrt(beta):
        raise ValueError(f"need 2^n >= sqrt(beta); n={n} too small for eta={eta}")
    f_lb = 2.0**0.25 / (5.0 * math.sqrt(eta))
    delta = eps_prep * f_lb
    d_delta = math.ceil((math.pi**2 / 8.0 * beta + math.log(1.0 / delta)) / (1.0 - math.sin(1.0)) - 1.0)
    k = math.ceil(math.pi / (4.0 * math.asin(0.5 * f_lb)) - 0.5)
    m_delta = (6 * d_delta + 1) * (2 * k + 1)
    return GaussPrepParams(beta=beta, delta=delta, d_delta=d_delta, f_lb=f_lb, k=k, m_delta=m_delta)


def cost_ugauss(n: int, eta: float, eps_prep: float, eps_gauss: float) -> ResourceCost:
    """Gaussian state preparation on n qubits.

    eps_prep bounds the trace distance of the prepared state from the
    discretized Gaussian; eps_gauss is the synthesis budget shared by the
    M_delta rotations, each costing 1.15 log2(M_delta/eps_gauss) T gates.
    """
    if not 0.0 < eps_gauss < 1.0:
        raise ValueError("eps_gauss must be in (0, 1)")
    g = gauss_prep_params(n, eta, eps_prep)
    rounds = 2 * g.k + 1
    rot = 1.15 * _log2(g.m_delta / eps_gauss)
    tc = 4.0 * n * g.d_delta * rounds + 4.0 * g.k * (n + 4) + g.m_delta * rot
    td = g.d_delta * (n + 1) * rounds + g.k * (n + 4) + (5 * g.d_delta + 1) * rounds * rot
    return ResourceCost(math.ceil(tc), math.ceil(td), 3 * n + 6)


# ---------------------------------------------------------------------------
# algorithm-level composition


@dataclass(frozen=True)
class AlgorithmConfig:
    """Everything the resource and error estimates need for one run.

    ``pp_exp``/``pp_arcsin`` pin the (intervals, degree) shape of the
    polynomial evaluators; leave them None to fit cost-minimizing shapes for
    ``eps_exp``/``eps_arcsin`` (exp over ``exp_domain``, arcsin over
    [-1/2, 1/2]).
    """

    scheme: str
    option_kind: str
    n_steps: int
    fmt: FixedFormat
    eps_sin: float
    eps_estimate: float = 1e-3
    delta_fail: float = 0.1
    eps_exp: float = 1e-6
    eps_arcsin: float = 1e-6
    eps_gauss: Optional[float] = None
    eps_prep: Optional[float] = None
    eta: float = 6.0
    pp_exp: Optional[tuple[int, int]] = None
    pp_arcsin: Optional[tuple[int, int]] = None
    exp_domain: tuple[float, float] = (-2.0, 2.0)

    def __post_init__(self) -> None:
        if self.scheme not in ("strong-euler", "weak-euler"):
            raise ValueError(
                f"no quantum circuit for scheme {self.scheme!r} "
                "(supported: strong-euler, weak-euler)"
            )
        if self.option_kind not in OPTION_KINDS:
            raise ValueError(f"unknown option kind {self.option_kind!r}")
        if self.n_steps < 0:
            raise ValueError("n_steps must be >= 0")
        for name in ("eps_sin", "eps_estimate", "eps_exp", "eps_arcsin"):
            v = getattr(self, name)
            if not 0.0 < v < 1.0:
                raise ValueError(f"{name} must be in (0, 1), got {v}")
        if not 0.0 < self.delta_fail < 1.0:
            raise ValueError("delta_fail must be in (0, 1)")
        if self.scheme == "strong-euler" and (self.eps_gauss is None or self.eps_prep is None):
            raise ValueError("strong-euler configs need eps_gauss and eps_prep")

    def resolved(self) -> "AlgorithmConfig":
        """Fill pp_exp / pp_arcsin with cost-minimizing fits if unset."""
        cfg = self
        if cfg.pp_exp is None:
            pp = build_piecewise_poly("exp", cfg.exp_domain, cfg.eps_exp, cfg.fmt)
            cfg = replace(cfg, pp_exp=(pp.n_intervals, pp.degree))
        if cfg.pp_arcsin is None:
            pp = build_piecewise_poly("arcsin", (-0.5, 0.5), cfg.eps_arcsin, cfg.fmt)
            cfg = replace(cfg, pp_arcsin=(pp.n_intervals, pp.degree))
        return cfg


def cost_u1(cfg: AlgorithmConfig) -> ResourceCost:
    """Path-simulation stage: N update iterations (plus state loading).

    Per iteration both schemes use 5 additions, 2 constant additions,
    10 constant multiplications and 2 square roots (compute + uncompute);
    Gaussian increments additionally need 4 multiplications and 2 state
    preparations per iteration, which is what makes them expensive.
    """
    n, p = cfg.fmt.n, cfg.fmt.p
    per_step = (
        cost_primitive("add", n).times(5)
        + cost_primitive("add_const", n).times(2)
        + cost_primitive("mul_const", n, p).times(10)
        + cost_primitive("sqrt", n).times(2)
    )
    if cfg.scheme == "strong-euler":
        per_step = per_step + cost_primitive("mul", n, p).times(4)
        per_step = per_step + cost_ugauss(n, cfg.eta, cfg.eps_prep, cfg.eps_gauss).times(2)
    return per_step.times(cfg.n_steps)


def _require_pp(cfg: AlgorithmConfig, which: str) -> tuple[int, int]:
    shape = getattr(cfg, which)
    if shape is None:
        raise ValueError(f"{which} not set; call cfg.resolved() or pin a shape")
    return shape


def cost_u2(cfg: AlgorithmConfig) -> ResourceCost:
    """Payoff stage.

    Averaging options: N exponentials, N-1 additions, one constant multiply,
    one constant subtract and an n-Toffoli rectifier.  Barrier options: N
    comparators, one (N+1)-qubit Toffoli for the joint knock indicator, one
    exponential of the terminal value, constant multiply/add and 2n Toffolis.
    """
    n, p = cfg.fmt.n, cfg.fmt.p
    m_exp, d_exp = _require_pp(cfg, "pp_exp")
    exp_cost = cost_primitive("exp", n, p, m=m_exp, d=d_exp)
    toff3 = cost_primitive("toffoli_jones", 3)
    if not is_barrier(cfg.option_kind):
        return (
            exp_cost.times(cfg.n_steps)
            + cost_primitive("add", n).times(max(cfg.n_steps - 1, 0))
            + cost_primitive("mul_const", n, p)
            + cost_primitive("sub_const", n)
            + toff3.times(n)
        )
    return (
        cost_primitive("comp_const", n).times(cfg.n_steps)
        + cost_primitive("toffoli_jones", cfg.n_steps + 1)
        + exp_cost
        + cost_primitive("mul_const", n, p)
        + cost_primitive("add_const", n)
        + toff3.times(2 * n)
    )


def cost_u3(cfg: AlgorithmConfig) -> ResourceCost:
    """Amplitude-transfer stage: arcsin-of-sqrt then the sine block-encoding."""
    n, p = cfg.fmt.n, cfg.fmt.p
    m_a, d_a = _require_pp(cfg, "pp_arcsin")
    return cost_primitive("arcsin_sqrt", n, p, m=m_a, d=d_a) + cost_usin(n, cfg.eps_sin)


def qubit_ledger(cfg: AlgorithmConfig) -> int:
    """Peak logical-qubit count of the Grover iterate.

    Persistent registers: the N+1 log-return and N+1 variance registers (n
    qubits each), 2N increment registers (n qubits each for Gaussian
    increments, 1 for coin flips), the payoff scratch (N n-qubit exponentials
    plus an n-qubit accumulator for averaging options; N knock bits, their
    product bit and two n-qubit values for barrier options), the payoff
    register, the amplitude flag and the angle register.  On top of those,
    the largest transient pool any stage needs concurrently: the step
    workspace (sqrt output, five products, plus two increment products for
    Gaussian increments) together with its busiest primitive, the Gaussian
    loader, the polynomial evaluators, or the (N+1)-Toffoli.  The reflection
    in the Grover iterate adds one final qubit.
    """
    cfg = cfg.resolved()
    n, big_n = cfg.fmt.n, cfg.n_steps
    strong = cfg.scheme == "strong-euler"

    persistent = 2 * (big_n + 1) * n
    persistent += 2 * big_n * (n if strong else 1)
    if is_barrier(cfg.option_kind):
        persistent += big_n + 1 + 2 * n
    else:
        persistent += big_n * n + n
    persistent += n + 1 + n  # payoff value, flag, angle

    work = n + 5 * n + (2 * n if strong else 0)
    u1_ops = [
        cost_primitive("add", n).ancilla,
        cost_primitive("add_const", n).ancilla,
        cost_primitive("mul_const", n, cfg.fmt.p).ancilla,
    ]
    u1_peak = max(
        work + max(u1_ops + ([cost_primitive("mul", n, cfg.fmt.p).ancilla] if strong else [])),
        n + cost_primitive("sqrt", n).ancilla,
    )
    if strong:
        u1_peak = max(u1_peak, cost_ugauss(n, cfg.eta, cfg.eps_prep, cfg.eps_gauss).ancilla)

    m_exp, d_exp = cfg.pp_exp
    u2_peak = cost_primitive("exp", n, cfg.fmt.p, m=m_exp, d=d_exp).ancilla
    if is_barrier(cfg.option_kind):
        u2_peak = max(
            u2_peak,
            cost_primitive("comp_const", n).ancilla,
            cost_primitive("toffoli_jones", big_n + 1).ancilla,
        )

    m_a, d_a = cfg.pp_arcsin
    u3_peak = max(
        cost_primitive("arcsin_sqrt", n, cfg.fmt.p, m=m_a, d=d_a).ancilla,
        cost_usin(n, cfg.eps_sin).ancilla,
    )

    return persistent + max(u1_peak, u2_peak, u3_peak) + 1


def n_oracle(eps_estimate: float, delta_fail: float) -> int:
    """Grover-iterate budget of iterative amplitude estimation:

        (1.4/eps) * ln((2/delta) * log2(pi/(4 eps)))

    rounded to the nearest integer (the convention that reproduces the
    published query counts).
    """
    if not 0.0 < eps_estimate < 1.0 or not 0.0 < delta_fail < 1.0:
        raise ValueError("eps_estimate and delta_fail must be in (0, 1)")
    bound = (1.4 / eps_estimate) * math.log(
        (2.0 / delta_fail) * _log2(math.pi / (4.0 * eps_estimate))
    )
    return int(math.floor(bound + 0.5))


@dataclass(frozen=True)
class TotalCost:
    """Full algorithm budget and its stage breakdown."""

    u1: ResourceCost
    u2: ResourceCost
    u3: ResourceCost
    circuit: ResourceCost  # one state preparation (U3 U2 U1)
    grover: ResourceCost  # one Grover iterate Q
    qubits: int
    n_oracle: int
    t_count: int
    t_depth: int


def total_cost(cfg: AlgorithmConfig) -> TotalCost:
    """Compose the stage costs into the total T budget.

    One Grover iterate applies the state preparation twice plus the
    reflection, implemented as a single-ancilla phase-gadget Toffoli over all
    its qubits; the estimate makes n_oracle iterate applications.
    """
    cfg = cfg.resolved()
    u1, u2, u3 = cost_u1(cfg), cost_u2(cfg), cost_u3(cfg)
    circuit = u1 + u2 + u3
    qubits = qubit_ledger(cfg)
    reflection = cost_primitive("toffoli_amy", qubits)
    grover = circuit + circuit + reflection
    calls = n_oracle(cfg.eps_estimate, cfg.delta_fail)
    return TotalCost(
        u1=u1,
        u2=u2,
        u3=u3,
        circuit=circuit,
        grover=grover,
        qubits=qubits,
        n_oracle=calls,
        t_count=calls * grover.t_count,
        t_depth=calls * grover.t_depth,
    )


@dataclass(frozen=True)
class ErrorBudget:
    """Additive error decomposition of the amplitude estimate.

    ``sin_term`` is 2 N_oracle eps_sin (every iterate applies the sine
    block-encoding twice); ``gauss_term`` is 4 N N_oracle (eps_prep +
    eps_gauss) and only applies to Gaussian-increment runs;
    ``eps_arithm`` comes from the fixed-point replay.
    """

    eps_estimate: float
    eps_arithm: float
    sin_term: float
    gauss_term: float

    @property
    def total(self) -> float:
        return self.eps_estimate + self.eps_arithm + self.sin_term + self.gauss_term


def error_budget(cfg: AlgorithmConfig, eps_arithm: float) -> ErrorBudget:
    """Compose the accuracy budget for ``cfg`` given the replay estimate."""
    if eps_arithm < 0.0:
        raise ValueError("eps_arithm must be >= 0")
    calls = n_oracle(cfg.eps_estimate, cfg.delta_fail)
    if cfg.scheme == "strong-euler":
        gauss_term = 4.0 * cfg.n_steps * calls * (cfg.eps_prep + cfg.eps_gauss)
    else:
        gauss_term = 0.0
    return ErrorBudget(
        eps_estimate=cfg.eps_estimate,
        eps_arithm=eps_arithm,
        sin_term=2.0 * calls * cfg.eps_sin,
        gauss_term=gauss_term,
    )
