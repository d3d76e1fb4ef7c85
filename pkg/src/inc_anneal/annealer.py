"""In-situ incremental-energy annealer and the direct-energy baseline.

Randomness: ``SeedSequence(seed).spawn(2)`` gives two PCG64 streams. The
first ("flip" stream) draws the initial spins, then a ``(iterations, t)``
block of partial Fisher-Yates offsets (column ``a`` uniform on
``[0, n - a)``) applied to a persistent index permutation; the first ``t``
entries after the swaps are the flip set. The second ("accept" stream)
draws one uniform ``r`` in ``[0, 1)`` per iteration, used or not. Both
backends consume exactly these arrays.
"""

from __future__ import annotations

import math
import time
from dataclasses import dataclass, field

import numpy as np

from . import _backend
from .crossbar import OpCounters
from .evaluators import make_evaluator
from .incremental import default_normalizer, incremental_product, make_flip_plan
from .model import IsingModel
from .schedule import ConfigError, FractionalFactor, Schedule


@dataclass(frozen=True)
class AnnealConfig:
    total_iterations: int
    t_flips: int = 1
    schedule: Schedule = field(default_factory=Schedule)
    factor: FractionalFactor | None = None
    iterations_per_level: int | None = None
    seed: int = 0
    normalizer: str | float = "unit"
    evaluator: str = "ideal"
    k_bits: int = 1
    mux_group: int = 8
    adc_bits: int | None = None
    backend: str | None = None

    def __post_init__(self):
        if int(self.total_iterations) < 1:
            raise ConfigError("total_iterations must be >= 1")
        if int(self.t_flips) < 1:
            raise ConfigError("t_flips must be >= 1")
        if self.iterations_per_level is not None and int(self.iterations_per_level) < 1:
            raise ConfigError("iterations_per_level must be >= 1")
        if int(self.seed) < 0:
            raise ConfigError("seed must be a non-negative integer")
        if isinstance(self.normalizer, str):
            if self.normalizer not in ("unit", "degree"):
                raise ConfigError(f"unknown normalizer policy {self.normalizer!r}")
        elif not float(self.normalizer) > 0:
            raise ConfigError("explicit normalizer must be positive")
        if self.backend not in (None, "python", "cython"):
            raise ConfigError(f"unknown backend {self.backend!r}")
        if self.evaluator not in ("ideal", "crossbar"):
            raise ConfigError(f"unknown evaluator {self.evaluator!r}")
        if self.factor is None:
            object.__setattr__(self, "factor", FractionalFactor.for_schedule(self.schedule))
        elif self.factor.t_max != self.schedule.t_max:
            raise ConfigError("factor and schedule disagree on t_max")

    @property
    def level_length(self) -> int:
        if self.iterations_per_level is not None:
            return int(self.iterations_per_level)
        return self.schedule.default_iterations_per_level(self.total_iterations)

    @property
    def executed_iterations(self) -> int:
        # iterations stop once V_BG reaches 0
        return min(int(self.total_iterations), self.level_length * self.schedule.steps)


@dataclass
class RunResult:
    method: str
    seed: int
    best_state: np.ndarray
    best_energy: float
    energy_trace: np.ndarray
    accept_count: int
    greedy_accepts: int
    nonpositive_moves: int
    op_counters: OpCounters
    normalizer: float
    backend: str
    wall_time_s: float = 0.0

    @property
    def iterations(self) -> int:
        return int(self.energy_trace.size)

    @property
    def best_trace(self) -> np.ndarray:
        """Best energy seen up to and including each iteration."""
        return np.minimum.accumulate(self.energy_trace)


def insitu_accepts(e_inc_value: float, r: float) -> bool:
    return e_inc_value <= 0 or e_inc_value <= r


def baseline_accepts(delta: float, t_norm: float, r: float, energy_scale: float) -> bool:
    if delta <= 0:
        return True
    return t_norm > 0 and r <= math.exp(-(delta / energy_scale) / t_norm)


@dataclass
class _Draws:
    init: np.ndarray
    flips: np.ndarray
    r: np.ndarray
    levels: np.ndarray


def _prepare(n: int, config: AnnealConfig) -> _Draws:
    t = int(config.t_flips)
    if t > n:
        raise ConfigError(f"t_flips={t} exceeds the number of spins {n}")
    iters = config.executed_iterations
    flip_ss, accept_ss = np.random.SeedSequence(int(config.seed)).spawn(2)
    rf = np.random.Generator(np.random.PCG64(flip_ss))
    ra = np.random.Generator(np.random.PCG64(accept_ss))
    init = (rf.integers(0, 2, size=n, dtype=np.int8) * 2 - 1).astype(np.int8)
    flips = rf.integers(0, n - np.arange(t), size=(iters, t), dtype=np.int64)
    r = ra.random(iters)
    levels = np.arange(iters, dtype=np.int64) // config.level_length
    return _Draws(init, np.ascontiguousarray(flips), r, levels)


def _schedule_arrays(config: AnnealConfig, levels: np.ndarray):
    sched = config.schedule
    lut_T = np.array([sched.temperature(lv) for lv in range(sched.levels)])
    lut_v = np.array([sched.v_bg(lv) for lv in range(sched.levels)])
    lut_f = np.array([config.factor(T) for T in lut_T])
    return lut_T[levels], lut_v[levels], lut_f[levels]


def _check_model(model: IsingModel):
    if not isinstance(model, IsingModel):
        raise TypeError("model must be an IsingModel")


def _host_energy(J: np.ndarray, spins: np.ndarray) -> float:
    s = spins.astype(np.float64)
    return float(s @ (J @ s))


def _can_fast_path(evaluator, config: AnnealConfig) -> bool:
    if not getattr(evaluator, "fast_path", False):
        return False
    state = getattr(evaluator, "state", None)
    if state is not None and (state.factor != config.factor or state.schedule != config.schedule):
        return False
    return True


def _result(method, config, out, normalizer, backend, counters_extra, started) -> RunResult:
    trace, best_state, best, accepts, greedy, nonpos, counters = out
    ctr = OpCounters.from_array(counters) + counters_extra
    return RunResult(method, int(config.seed), np.asarray(best_state, dtype=np.int8), float(best),
                     np.asarray(trace), int(accepts), int(greedy), int(nonpos), ctr,
                     float(normalizer), backend, time.perf_counter() - started)


def anneal_insitu(model: IsingModel, config: AnnealConfig, evaluator=None, *, generic: bool = False) -> RunResult:
    """Run the in-situ annealing loop.

    Each iteration flips ``t`` random spins into a candidate, computes
    ``E_inc = (sigma_r^T J sigma_c / Z) * f(T)`` and accepts when
    ``E_inc <= 0`` or ``E_inc <= r``. ``generic=True`` forces per-move
    evaluator calls even when the compiled loop is equivalent.
    """
    _check_model(model)
    started = time.perf_counter()
    if evaluator is None:
        evaluator = make_evaluator(model, config.evaluator, k=config.k_bits, mux_group=config.mux_group,
                                   adc_bits=config.adc_bits, factor=config.factor, schedule=config.schedule)
    d = _prepare(model.n, config)
    _, v_bg, fvals = _schedule_arrays(config, d.levels)
    Z = default_normalizer(model, config.t_flips, config.normalizer)
    J = evaluator.matrix
    E0 = _host_energy(J, d.init)

    if not generic and _can_fast_path(evaluator, config):
        kern = _backend.get(config.backend)
        backend = "cython" if kern is _backend.compiled else "python"
        out = kern.insitu_kernel(J, d.init.copy(), E0, d.flips, d.r, fvals, float(Z),
                                 int(evaluator.counts_ops), int(evaluator.k), int(evaluator.mux_group),
                                 int(evaluator.n_arrays))
        return _result("insitu", config, out, Z, backend, OpCounters(), started)

    n = model.n
    perm = np.arange(n, dtype=np.int64)
    spins = d.init.copy()
    iters = d.flips.shape[0]
    trace = np.empty(iters)
    best_state, best, E = spins.copy(), math.inf, E0
    accepts = greedy = nonpos = 0
    counters = OpCounters()
    for it in range(iters):
        F = _backend.fallback._draw_flips(perm, d.flips[it]).tolist()
        plan = make_flip_plan(spins, F)
        try:
            value, ctr = evaluator.e_inc(plan, float(fvals[it]), float(v_bg[it]), Z)
        except Exception as exc:
            raise RuntimeError(f"evaluator failed at iteration {it}: {exc}") from exc
        counters += ctr
        accept = False
        if value <= 0:
            accept = True
            greedy += 1
            nonpos += 1
        elif value <= d.r[it]:
            accept = True
        if accept:
            accepts += 1
            E += 4.0 * incremental_product(J, plan)
            spins = plan.sigma_new.copy()
        trace[it] = E
        if E < best:
            best = E
            best_state = spins.copy()
    out = (trace, best_state, best, accepts, greedy, nonpos, np.zeros(6, dtype=np.int64))
    return _result("insitu", config, out, Z, "generic", counters, started)


def anneal_direct_baseline(model: IsingModel, config: AnnealConfig, evaluator=None, *,
                           generic: bool = False) -> RunResult:
    """Direct-energy annealer: full ``sigma_new^T J sigma_new`` every iteration.

    ``delta = E_new - E`` is accepted when non-positive, otherwise with
    probability ``exp(-(delta / 4Z) / (T / t_max))`` on the same schedule
    and normaliser as the in-situ run.
    """
    _check_model(model)
    started = time.perf_counter()
    if evaluator is None:
        evaluator = make_evaluator(model, config.evaluator, k=config.k_bits, mux_group=config.mux_group,
                                   adc_bits=config.adc_bits, factor=config.factor, schedule=config.schedule)
    d = _prepare(model.n, config)
    T, _, _ = _schedule_arrays(config, d.levels)
    t_norm = T / config.schedule.t_max
    Z = default_normalizer(model, config.t_flips, config.normalizer)
    scale = 4.0 * Z
    J = evaluator.matrix
    # initial energy needs one full evaluation on the hardware
    E0, init_ctr = evaluator.energy(d.init)

    if not generic and _can_fast_path(evaluator, config):
        kern = _backend.get(config.backend)
        backend = "cython" if kern is _backend.compiled else "python"
        out = kern.baseline_kernel(J, d.init.copy(), float(E0), d.flips, d.r, t_norm, float(scale),
                                   int(evaluator.counts_ops), int(evaluator.k), int(evaluator.mux_group),
                                   int(evaluator.n_arrays))
        return _result("baseline", config, out, Z, backend, init_ctr, started)

    n = model.n
    perm = np.arange(n, dtype=np.int64)
    spins = d.init.copy()
    iters = d.flips.shape[0]
    trace = np.empty(iters)
    best_state, best, E = spins.copy(), math.inf, float(E0)
    accepts = greedy = nonpos = 0
    counters = init_ctr
    for it in range(iters):
        F = _backend.fallback._draw_flips(perm, d.flips[it]).tolist()
        new = spins.copy()
        new[F] = -new[F]
        try:
            e_new, ctr = evaluator.energy(new)
        except Exception as exc:
            raise RuntimeError(f"evaluator failed at iteration {it}: {exc}") from exc
        counters += ctr
        delta = e_new - E
        if delta <= 0:
            greedy += 1
            nonpos += 1
            accept = True
        else:
            counters.exp_evaluations += 1
            accept = baseline_accepts(delta, float(t_norm[it]), float(d.r[it]), scale)
        if accept:
            accepts += 1
            spins, E = new, e_new
        trace[it] = E
        if E < best:
            best = E
            best_state = spins.copy()
    out = (trace, best_state, best, accepts, greedy, nonpos, np.zeros(6, dtype=np.int64))
    return _result("baseline", config, out, Z, "generic", counters, started)


def anneal(model: IsingModel, config: AnnealConfig, method: str = "insitu", evaluator=None) -> RunResult:
    if method == "insitu":
        return anneal_insitu(model, config, evaluator)
    if method == "baseline":
        return anneal_direct_baseline(model, config, evaluator)
    raise ValueError(f"unknown solver {method!r}")
