"""Fractional annealing factor and the back-gate voltage temperature schedule."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np


class ConfigError(ValueError):
    pass


@dataclass(frozen=True)
class Schedule:
    """Linear temperature grid tied to the back-gate sweep.

    Level ``l`` has ``V_BG = v_bg_max * (steps - l) / steps`` and
    ``T = t_max * V_BG / v_bg_max``, with ``steps = v_bg_max / v_bg_step``
    (70 for 0.7 V in 0.01 V steps, i.e. 71 levels including 0 V).
    """

    t_max: float = 700.0
    v_bg_max: float = 0.7
    v_bg_step: float = 0.01

    def __post_init__(self):
        if not self.t_max > 0:
            raise ConfigError("t_max must be positive")
        if not (self.v_bg_max > 0 and self.v_bg_step > 0):
            raise ConfigError("back-gate range and step must be positive")
        ratio = self.v_bg_max / self.v_bg_step
        if abs(ratio - round(ratio)) > 1e-9 or round(ratio) < 1:
            raise ConfigError("v_bg_max must be an integer multiple of v_bg_step")

    @property
    def steps(self) -> int:
        return int(round(self.v_bg_max / self.v_bg_step))

    @property
    def levels(self) -> int:
        return self.steps + 1

    def v_bg(self, level: int) -> float:
        level = min(max(int(level), 0), self.steps)
        return self.v_bg_max * (self.steps - level) / self.steps

    def temperature(self, level: int) -> float:
        level = min(max(int(level), 0), self.steps)
        return self.t_max * (self.steps - level) / self.steps

    def temperature_for_voltage(self, v_bg: float) -> float:
        return self.t_max * (v_bg / self.v_bg_max)

    def grid(self) -> np.ndarray:
        return np.array([self.temperature(lv) for lv in range(self.levels)])

    def level_for_voltage(self, v_bg: float, tol: float = 1e-9) -> int:
        pos = (self.v_bg_max - v_bg) / self.v_bg_step
        level = int(round(pos))
        if not 0 <= level <= self.steps or abs(pos - level) > tol * max(1.0, self.steps):
            raise ValueError(f"V_BG={v_bg!r} is not on the {self.v_bg_step} V grid in [0, {self.v_bg_max}]")
        return level

    def level_for_temperature(self, T: float, tol: float = 1e-9) -> int:
        pos = (1.0 - T / self.t_max) * self.steps
        level = int(round(pos))
        if not 0 <= level <= self.steps or abs(pos - level) > tol * max(1.0, self.steps):
            raise ValueError(f"T={T!r} is not on the schedule grid")
        return level

    def default_iterations_per_level(self, total_iterations: int) -> int:
        # the budget is spread over the non-zero levels; V_BG = 0 ends the run
        return max(1, math.ceil(total_iterations / self.steps))


def bg_voltage_for(T: float, schedule: Schedule) -> float:
    return schedule.v_bg(schedule.level_for_temperature(T))


class ScheduleState:
    """Stateful cursor over a :class:`Schedule`; ``step()`` mirrors one annealing iteration."""

    def __init__(self, schedule: Schedule, iterations_per_level: int, level: int = 0):
        if iterations_per_level < 1:
            raise ConfigError("iterations_per_level must be >= 1")
        self.schedule = schedule
        self.iterations_per_level = int(iterations_per_level)
        self.current_level = min(max(int(level), 0), schedule.steps)
        self._calls = 0

    @property
    def done(self) -> bool:
        return self.current_level >= self.schedule.steps

    def current(self) -> tuple[float, float, bool]:
        lv = self.current_level
        return self.schedule.temperature(lv), self.schedule.v_bg(lv), self.done

    def step(self) -> tuple[float, float, bool]:
        """Return ``(T, V_BG, done)`` for this call, then advance the counter."""
        out = self.current()
        if not self.done:
            self._calls += 1
            if self._calls >= self.iterations_per_level:
                self._calls = 0
                self.current_level += 1
        return out


def schedule_step(state: ScheduleState) -> tuple[float, float, bool]:
    return state.step()


@dataclass(frozen=True)
class FractionalFactor:
    """``f(T) = a / (b*T + c) + d``, validated on the schedule grid.

    Construction fails unless ``f`` is pole-free on ``[0, t_max]``, strictly
    positive on every non-zero grid temperature and strictly increasing
    along the grid.
    """

    a: float = 1.0
    b: float = -0.006
    c: float = 5.0
    d: float = -0.2
    t_max: float = 700.0
    levels: int = 71

    def __post_init__(self):
        vals = [self.a, self.b, self.c, self.d, self.t_max]
        if not all(math.isfinite(v) for v in vals):
            raise ConfigError("factor parameters must be finite")
        if self.levels < 2:
            raise ConfigError("need at least two grid levels")
        lo, hi = self.c, self.b * self.t_max + self.c
        if lo == 0 or hi == 0 or (lo > 0) != (hi > 0):
            raise ConfigError(f"f(T) has a pole in [0, {self.t_max}] (b*T + c crosses zero)")
        grid = self.grid()
        with np.errstate(over="ignore", divide="ignore"):
            f = np.array([self(T) for T in grid])
        if not np.all(np.isfinite(f)):
            raise ConfigError("f(T) is not finite on the grid")
        if not np.all(f[1:] > 0):
            raise ConfigError("f(T) must be positive on every non-zero grid temperature")
        if not np.all(np.diff(f) > 0):
            raise ConfigError("f(T) must be strictly increasing on the grid")

    def grid(self) -> np.ndarray:
        return np.linspace(0.0, self.t_max, self.levels)

    def __call__(self, T: float) -> float:
        return self.a / (self.b * T + self.c) + self.d

    @classmethod
    def for_schedule(cls, schedule: Schedule, a=1.0, b=-0.006, c=5.0, d=-0.2) -> "FractionalFactor":
        return cls(a, b, c, d, t_max=schedule.t_max, levels=schedule.levels)


def fractional_factor_value(factor: FractionalFactor, T: float) -> float:
    if not 0 <= T <= factor.t_max:
        raise ValueError(f"T={T} outside [0, {factor.t_max}]")
    return factor(T)
