"""Energy and latency estimates derived from operation counters.

All constants live in :class:`CostParams`; the bundled defaults
(``data/cost_params.json``) are round placeholder numbers and carry no
claim about any real converter or exponential unit. Only ratios between
runs evaluated with the same parameters are meaningful.
"""

from __future__ import annotations

import json
import math
from dataclasses import asdict, dataclass, fields
from importlib import resources
from pathlib import Path

from .crossbar import OpCounters
from .schedule import ConfigError

COMPONENTS = ("adc", "cells", "exponential", "digital")


@dataclass(frozen=True)
class CostParams:
    e_adc: float = 2e-12
    t_adc: float = 1e-9
    e_cell: float = 1e-16
    e_exp: float = 5e-11
    t_exp: float = 1e-8
    e_digital: float = 1e-12
    t_digital: float = 0.0
    mux_group: int = 8
    # None: every mux group converts concurrently, time follows the busiest group
    group_parallelism: int | None = None
    # "uphill": one exponential per candidate with delta > 0, "always": one per iteration
    exp_policy: str = "uphill"

    def __post_init__(self):
        for f in fields(self):
            v = getattr(self, f.name)
            if f.name in ("exp_policy", "group_parallelism"):
                continue
            if not isinstance(v, (int, float)) or not math.isfinite(v) or v < 0:
                raise ConfigError(f"cost parameter {f.name} must be a finite non-negative number")
        if int(self.mux_group) < 1:
            raise ConfigError("mux_group must be >= 1")
        if self.group_parallelism is not None and int(self.group_parallelism) < 1:
            raise ConfigError("group_parallelism must be >= 1")
        if self.exp_policy not in ("uphill", "always"):
            raise ConfigError(f"unknown exp_policy {self.exp_policy!r}")

    @classmethod
    def from_dict(cls, d: dict) -> "CostParams":
        known = {f.name for f in fields(cls)}
        extra = sorted(k for k in d if k not in known and not k.startswith("_"))
        if extra:
            raise ConfigError(f"unknown cost parameter(s): {', '.join(extra)}")
        return cls(**{k: v for k, v in d.items() if k in known})

    def as_dict(self) -> dict:
        return asdict(self)


def load_cost_params(path=None) -> CostParams:
    """Read parameters from a JSON file; ``None`` loads the bundled placeholders."""
    if path is None:
        text = resources.files("inc_anneal").joinpath("data/cost_params.json").read_text()
        where = "bundled cost_params.json"
    else:
        try:
            text = Path(path).read_text()
        except OSError as exc:
            raise ConfigError(f"cannot read cost parameters {path}: {exc}") from exc
        where = str(path)
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"{where}:{exc.lineno}: invalid JSON ({exc.msg})") from exc
    if not isinstance(data, dict):
        raise ConfigError(f"{where}: expected a JSON object")
    return CostParams.from_dict(data)


@dataclass(frozen=True)
class CostReport:
    method: str
    energy_breakdown: dict
    time_breakdown: dict

    @property
    def total_energy(self) -> float:
        return math.fsum(self.energy_breakdown.values())

    @property
    def total_time(self) -> float:
        return math.fsum(self.time_breakdown.values())

    def as_dict(self) -> dict:
        return {"method": self.method, "total_energy": self.total_energy, "total_time": self.total_time,
                "energy_breakdown": dict(self.energy_breakdown), "time_breakdown": dict(self.time_breakdown)}


def _adc_slots(counters: OpCounters, params: CostParams) -> int:
    if params.group_parallelism is None:
        return int(counters.adc_cycles)
    if counters.passes == 0:
        return 0
    # every pass of a run converts the same number of columns
    per_pass = counters.adc_conversions / counters.passes
    return int(counters.passes * math.ceil(per_pass / params.group_parallelism))


def estimate_run_cost(counters: OpCounters, params: CostParams, method: str, iterations: int) -> CostReport:
    if method not in ("insitu", "baseline"):
        raise ValueError(f"unknown method {method!r}")
    if iterations < 0:
        raise ValueError("iterations must be non-negative")
    if method == "baseline":
        n_exp = iterations if params.exp_policy == "always" else counters.exp_evaluations
    else:
        n_exp = 0
    energy = {
        "adc": counters.adc_conversions * params.e_adc,
        "cells": counters.activated_cells * params.e_cell,
        "exponential": n_exp * params.e_exp,
        "digital": iterations * params.e_digital,
    }
    latency = {
        "adc": _adc_slots(counters, params) * params.t_adc,
        "cells": 0.0,
        "exponential": n_exp * params.t_exp,
        "digital": iterations * params.t_digital,
    }
    return CostReport(method, energy, latency)


def _ratio(num: float, den: float) -> float:
    if den == 0:
        return math.nan if num == 0 else math.inf
    return num / den


@dataclass(frozen=True)
class CostComparison:
    energy_ratio: float
    time_ratio: float
    energy_breakdown_ratio: dict
    time_breakdown_ratio: dict

    @property
    def infinite(self) -> bool:
        vals = [self.energy_ratio, self.time_ratio, *self.energy_breakdown_ratio.values(),
                *self.time_breakdown_ratio.values()]
        return any(math.isinf(v) for v in vals)

    def as_dict(self) -> dict:
        return {"energy_ratio": self.energy_ratio, "time_ratio": self.time_ratio,
                "energy_breakdown_ratio": dict(self.energy_breakdown_ratio),
                "time_breakdown_ratio": dict(self.time_breakdown_ratio), "infinite": self.infinite}


def compare_costs(a: CostReport, b: CostReport) -> CostComparison:
    """Ratios ``b / a``. A zero denominator gives ``inf`` (``nan`` for 0/0)."""
    return CostComparison(
        _ratio(b.total_energy, a.total_energy),
        _ratio(b.total_time, a.total_time),
        {c: _ratio(b.energy_breakdown[c], a.energy_breakdown[c]) for c in COMPONENTS},
        {c: _ratio(b.time_breakdown[c], a.time_breakdown[c]) for c in COMPONENTS},
    )
