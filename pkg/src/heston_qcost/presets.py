"""Config loading and the bundled instance presets.

Configs are TOML with [model], [option], [grid], [sampling] tables and, for
instances that carry quantum parameters, a [quantum] table with per-scheme
subtables.  Presets c1..c8 cover the classical pricing studies, q1..q4 the
quantum resource case studies.
"""

from __future__ import annotations

import sys
from importlib import resources
from pathlib import Path
from typing import Any, Mapping, Optional

if sys.version_info >= (3, 11):
    import tomllib
else:  # pragma: no cover
    import tomli as tomllib

from .fixedpoint import FixedFormat
from .model import HestonParams
from .payoff import OptionSpec
from .qresource import AlgorithmConfig
from .schemes import TimeGrid

__all__ = [
    "ConfigError",
    "algorithm_config",
    "instance_names",
    "load_config",
    "load_instance",
    "option_from_config",
    "params_from_config",
    "grid_from_config",
]


class ConfigError(ValueError):
    """Invalid or incomplete run configuration; the message names the key."""


def instance_names() -> list[str]:
    files = resources.files("heston_qcost.instances")
    return sorted(p.name[:-5] for p in files.iterdir() if p.name.endswith(".toml"))


def load_instance(name: str) -> dict[str, Any]:
    files = resources.files("heston_qcost.instances")
    path = files / f"{name}.toml"
    try:
        data = path.read_bytes()
    except FileNotFoundError:
        raise ConfigError(f"unknown instance {name!r}; available: {', '.join(instance_names())}")
    return tomllib.loads(data.decode())


def load_config(path: str | Path) -> dict[str, Any]:
    with open(path, "rb") as fh:
        return tomllib.load(fh)


def _table(cfg: Mapping[str, Any], name: str) -> Mapping[str, Any]:
    if name not in cfg:
        raise ConfigError(f"missing config table [{name}]")
    return cfg[name]


def _get(table: Mapping[str, Any], table_name: str, key: str) -> Any:
    if key not in table:
        raise ConfigError(f"missing config key {key!r} in [{table_name}]")
    return table[key]


def params_from_config(cfg: Mapping[str, Any], allow_feller_violation: bool = False) -> HestonParams:
    model = _table(cfg, "model")
    try:
        return HestonParams.from_mapping(model, allow_feller_violation=allow_feller_violation)
    except KeyError as exc:
        raise ConfigError(f"missing config key {exc.args[0]!r} in [model]") from exc


def option_from_config(cfg: Mapping[str, Any]) -> OptionSpec:
    opt = _table(cfg, "option")
    try:
        return OptionSpec(
            kind=_get(opt, "option", "kind"),
            strike=float(_get(opt, "option", "strike")),
            expiry=float(_get(opt, "option", "expiry")),
            barrier=float(opt["barrier"]) if "barrier" in opt else None,
            z_bound=float(opt["z_bound"]) if "z_bound" in opt else None,
        )
    except ValueError as exc:
        raise ConfigError(f"invalid [option] config: {exc}") from exc


def grid_from_config(cfg: Mapping[str, Any], n_steps: Optional[int] = None) -> TimeGrid:
    expiry = float(_get(_table(cfg, "option"), "option", "expiry"))
    if n_steps is None:
        n_steps = int(_get(_table(cfg, "grid"), "grid", "n_steps"))
    return TimeGrid(expiry, n_steps)


def algorithm_config(
    cfg: Mapping[str, Any], scheme: str, n_steps: Optional[int] = None
) -> AlgorithmConfig:
    """Assemble the quantum-resource configuration for one scheme."""
    q = _table(cfg, "quantum")
    if scheme not in q:
        raise ConfigError(f"missing config table [quantum.\"{scheme}\"]")
    qs = q[scheme]
    option = option_from_config(cfg)
    if n_steps is None:
        n_steps = int(_get(_table(cfg, "grid"), "grid", "n_steps"))
    try:
        return AlgorithmConfig(
            scheme=scheme,
            option_kind=option.kind,
            n_steps=n_steps,
            fmt=FixedFormat(
                int(_get(qs, f'quantum."{scheme}"', "n_bits")),
                int(_get(qs, f'quantum."{scheme}"', "int_bits")),
            ),
            eps_sin=float(_get(qs, f'quantum."{scheme}"', "eps_sin")),
            eps_estimate=float(_get(q, "quantum", "eps_estimate")),
            delta_fail=float(_get(q, "quantum", "delta_fail")),
            eps_exp=float(_get(q, "quantum", "eps_exp")),
            eps_arcsin=float(_get(q, "quantum", "eps_arcsin")),
            eps_gauss=float(qs["eps_gauss"]) if "eps_gauss" in qs else None,
            eps_prep=float(qs["eps_prep"]) if "eps_prep" in qs else None,
            eta=float(q.get("eta", 6.0)),
        )
    except ValueError as exc:
        raise ConfigError(f"invalid [quantum] config: {exc}") from exc
