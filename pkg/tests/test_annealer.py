import math

import numpy as np
import pytest

from inc_anneal.annealer import (
    AnnealConfig,
    anneal,
    anneal_insitu,
    baseline_accepts,
    insitu_accepts,
)
from inc_anneal.evaluators import CrossbarEvaluator, make_evaluator
from inc_anneal.model import IsingModel, brute_force_ground_state, energy_direct, random_pm1_model
from inc_anneal.schedule import ConfigError, FractionalFactor, Schedule

from oracles import metropolis_accept


def test_acceptance_rules():
    assert insitu_accepts(-0.1, 0.0)
    assert insitu_accepts(0.0, 0.0)
    assert insitu_accepts(0.3, 0.5)
    assert not insitu_accepts(0.6, 0.5)
    for d, tn, r in [(-1, 0.5, 0.9), (2.0, 0.5, 0.1), (2.0, 0.5, 0.9), (1.0, 0.0, 0.0), (0.5, 1.0, 0.6)]:
        assert baseline_accepts(d, tn, r, 4.0) == metropolis_accept(d, tn, r, 4.0)


def test_config_defaults_and_validation():
    c = AnnealConfig(7000)
    assert c.level_length == 100
    assert c.executed_iterations == 7000
    assert c.factor == FractionalFactor()
    assert AnnealConfig(7001).executed_iterations == 7001
    assert AnnealConfig(100, iterations_per_level=1).executed_iterations == 70
    for bad in [dict(total_iterations=0), dict(total_iterations=10, t_flips=0),
                dict(total_iterations=10, seed=-1), dict(total_iterations=10, evaluator="x"),
                dict(total_iterations=10, normalizer="x"), dict(total_iterations=10, normalizer=0.0),
                dict(total_iterations=10, iterations_per_level=0)]:
        with pytest.raises(ConfigError):
            AnnealConfig(**bad)
    with pytest.raises(ConfigError):
        AnnealConfig(10, schedule=Schedule(t_max=500.0), factor=FractionalFactor())


def test_too_many_flips():
    with pytest.raises(ConfigError):
        anneal_insitu(random_pm1_model(3, 0), AnnealConfig(10, t_flips=4))


@pytest.mark.parametrize("method", ["insitu", "baseline"])
def test_determinism_and_trace(method):
    m = random_pm1_model(10, 2)
    a = anneal(m, AnnealConfig(2000, seed=4), method)
    b = anneal(m, AnnealConfig(2000, seed=4), method)
    c = anneal(m, AnnealConfig(2000, seed=5), method)
    assert np.array_equal(a.energy_trace, b.energy_trace)
    assert not np.array_equal(a.energy_trace, c.energy_trace)
    assert a.iterations == 2000
    assert a.best_energy == a.energy_trace.min()
    assert energy_direct(m, a.best_state) == a.best_energy


def test_trace_steps_are_single_moves():
    # with t = 2 and +-1 couplings one move changes E by at most 4 * 2 * (n - 2)
    m = random_pm1_model(12, 7)
    res = anneal_insitu(m, AnnealConfig(3000, t_flips=2, seed=1))
    steps = np.diff(res.energy_trace)
    assert np.all(np.abs(steps) <= 4 * 2 * 10)
    assert np.count_nonzero(steps) <= res.accept_count
    assert res.greedy_accepts == res.nonpositive_moves <= res.accept_count


@pytest.mark.parametrize("method", ["insitu", "baseline"])
def test_finds_ground_state(method):
    m = random_pm1_model(12, 3)
    _, e0 = brute_force_ground_state(m)
    hits = sum(anneal(m, AnnealConfig(5000, seed=s), method).best_energy == e0 for s in range(20))
    assert hits >= 18


def test_run_stops_before_zero_voltage():
    m = random_pm1_model(10, 0)
    res = anneal_insitu(m, AnnealConfig(5000, iterations_per_level=10, seed=0))
    assert res.iterations == 700


def test_unknown_method():
    with pytest.raises(ValueError):
        anneal(random_pm1_model(4, 0), AnnealConfig(10), "quantum")


def test_evaluator_errors_carry_iteration():
    class Broken:
        fast_path = False
        counts_ops = False
        matrix = random_pm1_model(5, 0).J

        def e_inc(self, plan, f, v, z):
            raise ArithmeticError("boom")

    with pytest.raises(RuntimeError, match="iteration 0"):
        anneal_insitu(random_pm1_model(5, 0), AnnealConfig(10), Broken())


def test_finite_adc_run_goes_through_simulator():
    m = random_pm1_model(8, 1)
    ev = CrossbarEvaluator(m, k=1, adc_bits=2)
    assert not ev.fast_path
    res = anneal_insitu(m, AnnealConfig(300, evaluator="crossbar", adc_bits=2), ev)
    assert res.backend == "generic"
    assert res.op_counters.adc_conversions > 0


def test_real_weights_through_crossbar():
    rng = np.random.default_rng(0)
    W = np.triu(rng.uniform(-1, 1, (10, 10)), 1)
    m = IsingModel(W + W.T)
    res = anneal_insitu(m, AnnealConfig(2000, evaluator="crossbar", k_bits=3))
    assert math.isfinite(res.best_energy)
    with pytest.raises(ValueError):
        make_evaluator(m, "analog")
