"""Command line interface.

Subcommands: ``price``, ``converge``, ``resources``, ``error-budget``,
``fixedpoint-error``, ``iqae-sim``.  Runs are configured by ``--instance``
(bundled presets c1..c8 / q1..q4) or ``--config`` (a TOML file of the same
shape); ``--scheme``, ``--n-steps``, ``--paths`` and ``--seed`` override the
config.  Results go to stdout or ``--out`` as CSV (default) or JSON.

Exit codes: 0 success, 1 configuration error (the message names the missing
or offending key), 2 fixed-point overflow at run time.

CSV uses '.' decimals, no thousands separators.  Column headers by
subcommand:

* price:            scheme,N,n_paths,mean,std_error,clamp_rate
* converge:         scheme,N,n_paths,mean,std_error,clamp_rate,deviation
* resources:        component,t_count,t_depth,ancilla  (+ summary rows)
* error-budget:     component,value
* fixedpoint-error: step,max_abs_dev  (after a summary row with eps_arithm)
* iqae-sim:         trial,a_hat,calls,success

The JSON variant wraps the same rows as {"subcommand", "rows": [...]}, with
each row an object keyed by the column names.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys
from typing import Any, Optional, Sequence

import numpy as np

from . import pricer, qresource
from .fixedpoint import FixedPointOverflowError, build_piecewise_poly, estimate_arith_error
from .iqae import AmplitudeOracle, iqae_estimate
from .presets import (
    ConfigError,
    algorithm_config,
    grid_from_config,
    instance_names,
    load_config,
    load_instance,
    option_from_config,
    params_from_config,
)
from .schemes import SCHEME_NAMES, stream

EXIT_OK = 0
EXIT_CONFIG = 1
EXIT_OVERFLOW = 2

#: JSON result schemas (field name -> required type) by subcommand.
RESULT_SCHEMAS: dict[str, dict[str, type]] = {
    "price": {
        "scheme": str, "N": int, "n_paths": int,
        "mean": float, "std_error": float, "clamp_rate": float,
    },
    "converge": {
        "scheme": str, "N": int, "n_paths": int,
        "mean": float, "std_error": float, "clamp_rate": float, "deviation": float,
    },
    "resources": {"component": str, "t_count": int, "t_depth": int, "ancilla": int},
    "error-budget": {"component": str, "value": float},
    "fixedpoint-error": {"step": int, "max_abs_dev": float},
    "iqae-sim": {"trial": int, "a_hat": float, "calls": int, "success": bool},
}


def _load(args) -> dict[str, Any]:
    if args.config:
        return load_config(args.config)
    if args.instance:
        return load_instance(args.instance)
    raise ConfigError("need --instance or --config")


def _emit(args, subcommand: str, rows: list[dict[str, Any]]) -> None:
    if args.format == "json":
        text = json.dumps({"subcommand": subcommand, "rows": rows}, indent=2) + "\n"
    else:
        buf = io.StringIO()
        writer = csv.DictWriter(buf, fieldnames=list(RESULT_SCHEMAS[subcommand]))
        writer.writeheader()
        writer.writerows(rows)
        text = buf.getvalue()
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _sampling(args, cfg) -> tuple[int, int]:
    sampling = cfg.get("sampling", {})
    paths = args.paths if args.paths is not None else int(sampling.get("paths", 100_000))
    seed = args.seed if args.seed is not None else int(sampling.get("seed", 1))
    return paths, seed


def _powers_of_two_up_to(n_max: int) -> list[int]:
    return [2**j for j in range(1, int(math.log2(n_max)) + 1)]


def cmd_price(args) -> int:
    cfg = _load(args)
    params = params_from_config(cfg)
    spec = option_from_config(cfg)
    grid = grid_from_config(cfg, args.n_steps)
    paths, seed = _sampling(args, cfg)
    scheme = args.scheme or "strong-euler"
    est = pricer.price(spec, params, scheme, grid, paths, seed)
    _emit(args, "price", [{
        "scheme": scheme, "N": grid.n_steps, "n_paths": est.n_paths,
        "mean": est.mean, "std_error": est.std_error, "clamp_rate": est.clamp_rate,
    }])
    return EXIT_OK


def cmd_converge(args) -> int:
    cfg = _load(args)
    params = params_from_config(cfg)
    spec = option_from_config(cfg)
    paths, seed = _sampling(args, cfg)
    schemes = [args.scheme] if args.scheme else list(SCHEME_NAMES)
    n_max = args.n_steps if args.n_steps is not None else 1024
    rows = pricer.convergence_study(spec, params, schemes, _powers_of_two_up_to(n_max), paths, seed)
    _emit(args, "converge", [{
        "scheme": r.scheme, "N": r.n_steps, "n_paths": r.n_paths, "mean": r.mean,
        "std_error": r.std_error, "clamp_rate": r.clamp_rate, "deviation": r.deviation,
    } for r in rows])
    return EXIT_OK


def _resource_rows(cost: qresource.TotalCost) -> list[dict[str, Any]]:
    rows = []
    for name, rc in (("U1", cost.u1), ("U2", cost.u2), ("U3", cost.u3),
                     ("A", cost.circuit), ("Q", cost.grover)):
        rows.append({"component": name, "t_count": rc.t_count,
                     "t_depth": rc.t_depth, "ancilla": rc.ancilla})
    rows.append({"component": "total", "t_count": cost.t_count,
                 "t_depth": cost.t_depth, "ancilla": cost.qubits})
    rows.append({"component": "n_oracle", "t_count": cost.n_oracle,
                 "t_depth": cost.n_oracle, "ancilla": 0})
    return rows


def cmd_resources(args) -> int:
    cfg = _load(args)
    acfg = algorithm_config(cfg, args.scheme or "weak-euler", args.n_steps)
    cost = qresource.total_cost(acfg)
    _emit(args, "resources", _resource_rows(cost))
    return EXIT_OK


def _replay(args, cfg, scheme, samples):
    params = params_from_config(cfg)
    spec = option_from_config(cfg)
    acfg = algorithm_config(cfg, scheme, args.n_steps).resolved()
    grid = grid_from_config(cfg, args.n_steps)
    pp_exp = build_piecewise_poly("exp", acfg.exp_domain, acfg.eps_exp, acfg.fmt)
    _, seed = _sampling(args, cfg)
    result = estimate_arith_error(
        spec, params, scheme, acfg.fmt, {"exp": pp_exp}, grid,
        n_samples=samples, seed=seed, eta=acfg.eta,
    )
    return acfg, result


def cmd_error_budget(args) -> int:
    cfg = _load(args)
    scheme = args.scheme or "weak-euler"
    acfg, replay = _replay(args, cfg, scheme, args.samples)
    budget = qresource.error_budget(acfg, replay.eps_arithm)
    _emit(args, "error-budget", [
        {"component": "eps_estimate", "value": budget.eps_estimate},
        {"component": "eps_arithm", "value": budget.eps_arithm},
        {"component": "sin_term", "value": budget.sin_term},
        {"component": "gauss_term", "value": budget.gauss_term},
        {"component": "total", "value": budget.total},
    ])
    return EXIT_OK


def cmd_fixedpoint_error(args) -> int:
    cfg = _load(args)
    scheme = args.scheme or "weak-euler"
    _, replay = _replay(args, cfg, scheme, args.samples)
    rows = [{"step": -1, "max_abs_dev": replay.eps_arithm}]
    rows += [{"step": j, "max_abs_dev": float(v)} for j, v in enumerate(replay.step_max_dev)]
    _emit(args, "fixedpoint-error", rows)
    return EXIT_OK


def cmd_iqae_sim(args) -> int:
    budget = qresource.n_oracle(args.eps, args.delta)
    rows = []
    for trial in range(args.trials):
        oracle = AmplitudeOracle(args.a)
        result = iqae_estimate(oracle, args.eps, args.delta, stream(args.seed or 1, trial))
        rows.append({
            "trial": trial,
            "a_hat": result.a_hat,
            "calls": result.calls,
            "success": bool(abs(result.a_hat - args.a) <= args.eps and result.calls <= budget),
        })
    _emit(args, "iqae-sim", rows)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="heston-qcost",
        description="Heston option pricing and quantum pricing-circuit cost estimation",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, schemes=True):
        p.add_argument("--config", help="TOML run configuration")
        p.add_argument("--instance", help=f"bundled preset ({', '.join(instance_names())})")
        if schemes:
            p.add_argument("--scheme", choices=SCHEME_NAMES)
        p.add_argument("--n-steps", type=int, help="override [grid] n_steps")
        p.add_argument("--paths", type=int, help="override [sampling] paths")
        p.add_argument("--seed", type=int, help="override [sampling] seed")
        p.add_argument("--out", help="write results to this file instead of stdout")
        p.add_argument("--format", choices=("csv", "json"), default="csv")

    common(sub.add_parser("price", help="Monte Carlo price of one instance"))
    common(sub.add_parser("converge", help="price while doubling the step count"))
    common(sub.add_parser("resources", help="T-count/T-depth/qubit breakdown"))

    p = sub.add_parser("error-budget", help="composed accuracy budget")
    common(p)
    p.add_argument("--samples", type=int, default=10_000)

    p = sub.add_parser("fixedpoint-error", help="float-vs-fixed replay deviations")
    common(p)
    p.add_argument("--samples", type=int, default=10_000)

    p = sub.add_parser("iqae-sim", help="simulate amplitude-estimation trials")
    p.add_argument("--a", type=float, required=True, help="true amplitude in [0, 1]")
    p.add_argument("--eps", type=float, required=True)
    p.add_argument("--delta", type=float, required=True)
    p.add_argument("--trials", type=int, default=100)
    p.add_argument("--seed", type=int, default=1)
    p.add_argument("--out")
    p.add_argument("--format", choices=("csv", "json"), default="csv")
    return parser


_HANDLERS = {
    "price": cmd_price,
    "converge": cmd_converge,
    "resources": cmd_resources,
    "error-budget": cmd_error_budget,
    "fixedpoint-error": cmd_fixedpoint_error,
    "iqae-sim": cmd_iqae_sim,
}


def main(argv: Optional[Sequence[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return _HANDLERS[args.command](args)
    except (ConfigError, KeyError, ValueError) as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except FixedPointOverflowError as exc:
        print(f"fixed-point overflow: {exc}", file=sys.stderr)
        return EXIT_OVERFLOW


if __name__ == "__main__":
    sys.exit(main())
