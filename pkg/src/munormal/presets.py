"""Named schedule configurations and their materialisation.

A config is a JSON object::

    {"system": "qary" | "lueroth" | "beta" | "cf",
     "q": 2,                                   # qary only
     "parry": {"preperiod": [...], "period": [...]},   # beta only
     "symbolic": true}                         # formula schedule, log space

or, for a materialised surrogate::

    {"system": ..., "stages": N,
     "surrogate": {"windows": [...], "copies": [...], "eps": [...],
                   "k": 3, "weight_factor": 1,
                   "measure_stages": [...]}}   # lueroth / cf only

``weight_factor`` multiplies the smallest admissible weight ``ceil(1/m_w)``.
"""

from __future__ import annotations

import json
import math
from functools import lru_cache
from importlib import resources
from typing import Union

from .languages import ParryData, ShiftLanguage, beta_shift, full_shift
from .measures import CylinderMeasure, GaussMeasure, LuerothMeasure, ParryMeasure, QaryMeasure
from .schedule import (Schedule, StageSpec, SymbolicSchedule, _auto_weight, formula_beta,
                       formula_cf, formula_lueroth, formula_qary)

SYSTEMS = ("qary", "lueroth", "beta", "cf")


class ConfigError(ValueError):
    """Malformed or unknown configuration."""


@lru_cache(maxsize=1)
def _registry() -> dict:
    text = resources.files("munormal").joinpath("presets.json").read_text()
    return json.loads(text)


def preset_names() -> list:
    return sorted(_registry())


def get_preset(name: str) -> dict:
    try:
        return json.loads(json.dumps(_registry()[name]))  # private copy
    except KeyError:
        raise ConfigError(f"unknown preset {name!r}; available: {', '.join(preset_names())}") from None


def load_config(path: str) -> dict:
    try:
        with open(path) as fh:
            cfg = json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc
    if "preset" in cfg and "system" not in cfg:
        base = get_preset(cfg.pop("preset"))
        base.update(cfg)
        cfg = base
    return cfg


def _system(cfg: dict) -> str:
    system = cfg.get("system")
    if system not in SYSTEMS:
        raise ConfigError(f"system must be one of {SYSTEMS}, got {system!r}")
    return system


def parry_data(cfg: dict) -> ParryData:
    try:
        return ParryData.from_json(cfg["parry"]).validate()
    except KeyError:
        raise ConfigError("beta configs need 'parry' data") from None
    except ValueError as exc:
        raise ConfigError(f"invalid Parry data: {exc}") from exc


def language_for(cfg: dict) -> ShiftLanguage:
    system = _system(cfg)
    if system == "qary":
        return full_shift(int(cfg.get("q", 2)))
    if system == "lueroth":
        return full_shift(None, min_digit=2)
    if system == "cf":
        return full_shift(None, min_digit=1)
    return beta_shift(parry_data(cfg))


def target_measure(cfg: dict) -> CylinderMeasure:
    """The measure ``mu`` the schedule is built for."""
    system = _system(cfg)
    if system == "qary":
        return QaryMeasure(int(cfg.get("q", 2)))
    if system == "lueroth":
        return LuerothMeasure()
    if system == "cf":
        return GaussMeasure()
    return ParryMeasure(parry_data(cfg))


def _stage_measure(system: str, target: CylinderMeasure, s: int) -> CylinderMeasure:
    if system == "lueroth":
        return LuerothMeasure(stage=s)
    if system == "cf":
        return GaussMeasure(stage=s)
    return target


def _per_stage(value, n: int, name: str) -> list:
    if isinstance(value, list):
        if len(value) < n:
            raise ConfigError(f"surrogate.{name} lists {len(value)} values for {n} stages")
        return value[:n]
    return [value] * n


def is_symbolic(cfg: dict) -> bool:
    return bool(cfg.get("symbolic"))


def symbolic_schedule(cfg: dict) -> SymbolicSchedule:
    system = _system(cfg)
    if system == "qary":
        W = formula_qary(int(cfg.get("q", 2)))
    elif system == "lueroth":
        W = formula_lueroth()
    elif system == "beta":
        W = formula_beta(parry_data(cfg))
    else:
        W = formula_cf()
    eps = cfg.get("eps")
    if eps is not None:
        # constant tolerance override, used to exercise failing checks
        value = float(eps)
        W = SymbolicSchedule(W.name + "-const-eps", W.log_q, W.log_M, W.log_copies,
                             lambda i: value, W.j, W.first)
        if not 0 < value < 1:
            raise ConfigError("eps override must lie in (0, 1)")
    return W


def build_schedule(cfg: dict, name: str = "custom") -> Union[Schedule, SymbolicSchedule]:
    """Materialised :class:`Schedule` or, for symbolic configs, the formula schedule."""
    if is_symbolic(cfg):
        return symbolic_schedule(cfg)
    system = _system(cfg)
    sur = cfg.get("surrogate")
    if not isinstance(sur, dict):
        raise ConfigError("config needs either 'symbolic': true or a 'surrogate' block")
    language = language_for(cfg)
    target = target_measure(cfg)
    try:
        windows = list(sur["windows"])
        n = int(cfg.get("stages", len(windows)))
        windows = _per_stage(windows, n, "windows")
        copies = _per_stage(sur["copies"], n, "copies")
        eps = _per_stage(sur["eps"], n, "eps")
    except KeyError as exc:
        raise ConfigError(f"surrogate is missing {exc}") from None
    ks = _per_stage(sur.get("k", 3), n, "k")
    factors = _per_stage(sur.get("weight_factor", 1), n, "weight_factor")
    if system in ("lueroth", "cf"):
        if "measure_stages" not in sur:
            raise ConfigError(f"{system} surrogates need 'measure_stages'")
        mstages = _per_stage(sur["measure_stages"], n, "measure_stages")
    else:
        mstages = [None] * n

    if system == "qary":
        q = int(cfg.get("q", 2))
        base_offset = [(q, 0)] * n
    elif system == "beta":
        q = math.ceil(float(parry_data(cfg).beta(64)))
        base_offset = [(q, 0)] * n
    elif system == "lueroth":
        base_offset = [(s + 2, 2) for s in mstages]
    else:
        base_offset = [(s + 1, 1) for s in mstages]

    stages = []
    for idx in range(n):
        base, offset = base_offset[idx]
        nu = _stage_measure(system, target, mstages[idx]) if mstages[idx] else target
        probe = StageSpec(int(copies[idx]), float(eps[idx]), int(ks[idx]), nu, int(windows[idx]), base,
                          None, offset)
        weight = None
        if int(copies[idx]) > 0:
            weight = int(factors[idx]) * _auto_weight(probe, language)
        stages.append(StageSpec(probe.copies, probe.eps, probe.k, nu, probe.window, base,
                                weight if weight is not None else 1, offset))
    for a, b in zip(eps, eps[1:]):
        if not b < a:
            raise ConfigError("surrogate eps must be strictly decreasing")
    if any(not 0 < e < 1 for e in eps):
        raise ConfigError("surrogate eps must lie in (0, 1)")
    return Schedule(language, target, stages, name=name)


def resolve(preset: str = None, config: str = None) -> tuple:
    """``(name, cfg)`` from a preset name or a config path."""
    if (preset is None) == (config is None):
        raise ConfigError("give exactly one of a preset name or a config file")
    if preset is not None:
        return preset, get_preset(preset)
    return config, load_config(config)
