import json
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from inc_anneal.annealer import AnnealConfig, anneal_direct_baseline, anneal_insitu
from inc_anneal.costmodel import CostParams, CostReport, compare_costs, estimate_run_cost, load_cost_params
from inc_anneal.crossbar import OpCounters
from inc_anneal.model import random_pm1_model
from inc_anneal.schedule import ConfigError

P = CostParams(e_adc=2.0, t_adc=1.0, e_cell=0.5, e_exp=7.0, t_exp=3.0, e_digital=0.25, t_digital=0.125)

counters = st.builds(OpCounters, *[st.integers(0, 10**6)] * 6)


def test_zero_counters_zero_cost():
    r = estimate_run_cost(OpCounters(), P, "insitu", 0)
    assert r.total_energy == 0 and r.total_time == 0


def test_insitu_hand_example():
    c = OpCounters(adc_conversions=1000, activated_cells=99000, passes=1000, adc_cycles=1000)
    r = estimate_run_cost(c, P, "insitu", 1000)
    assert r.energy_breakdown == {"adc": 2000.0, "cells": 49500.0, "exponential": 0.0, "digital": 250.0}
    assert r.time_breakdown["adc"] == 1000.0
    assert r.total_time == 1000.0 + 125.0


def test_baseline_exponential_policy():
    c = OpCounters(adc_conversions=100, passes=1, adc_cycles=8, exp_evaluations=3)
    up = estimate_run_cost(c, P, "baseline", 10)
    always = estimate_run_cost(c, CostParams(**{**P.as_dict(), "exp_policy": "always"}), "baseline", 10)
    assert up.energy_breakdown["exponential"] == 21.0
    assert always.energy_breakdown["exponential"] == 70.0
    assert always.time_breakdown["exponential"] == 30.0
    assert estimate_run_cost(c, P, "insitu", 10).energy_breakdown["exponential"] == 0.0


def test_group_parallelism_schedule():
    c = OpCounters(adc_conversions=1000, passes=10, adc_cycles=80)
    assert estimate_run_cost(c, P, "baseline", 0).time_breakdown["adc"] == 80.0
    par = CostParams(**{**P.as_dict(), "group_parallelism": 30})
    # 100 conversions per pass on 30 converters -> 4 slots per pass
    assert estimate_run_cost(c, par, "baseline", 0).time_breakdown["adc"] == 40.0


@settings(max_examples=100, deadline=None)
@given(counters, st.integers(0, 10**6), st.sampled_from(["insitu", "baseline"]))
def test_breakdown_conservation(c, iters, method):
    r = estimate_run_cost(c, P, method, iters)
    assert r.total_energy == math.fsum(r.energy_breakdown.values())
    assert r.total_time == math.fsum(r.time_breakdown.values())


@settings(max_examples=100, deadline=None)
@given(counters, counters, st.integers(0, 1000), st.integers(0, 1000))
def test_linearity(a, b, ia, ib):
    ra = estimate_run_cost(a, P, "baseline", ia)
    rb = estimate_run_cost(b, P, "baseline", ib)
    rs = estimate_run_cost(a + b, P, "baseline", ia + ib)
    assert rs.total_energy == pytest.approx(ra.total_energy + rb.total_energy, rel=1e-12)
    assert rs.total_time == pytest.approx(ra.total_time + rb.total_time, rel=1e-12)


def test_compare_identical_and_zero():
    r = estimate_run_cost(OpCounters(5, 5, 1, 5, 5, 1), P, "baseline", 3)
    cmp = compare_costs(r, r)
    assert cmp.energy_ratio == 1 and cmp.time_ratio == 1
    assert all(v == 1 for v in cmp.energy_breakdown_ratio.values())
    assert not cmp.infinite
    z = estimate_run_cost(OpCounters(), P, "insitu", 0)
    cz = compare_costs(z, r)
    assert cz.infinite and math.isinf(cz.energy_ratio)
    assert math.isnan(compare_costs(z, z).energy_ratio)


@pytest.mark.parametrize("n", [100, 500, 1000, 3000])
def test_synthetic_scaling_law(n):
    # one iteration, t = k = 1, two row-sign passes on one array for both methods
    ins = OpCounters(adc_conversions=2, activated_cells=n - 1, passes=2, adc_cycles=2)
    base = OpCounters(adc_conversions=2 * n, activated_cells=n * n, passes=2, adc_cycles=16)
    adc_only = CostParams(e_adc=1.0, t_adc=1.0, e_cell=0.0, e_exp=0.0, t_exp=0.0, e_digital=0.0)
    cmp = compare_costs(estimate_run_cost(ins, adc_only, "insitu", 1), estimate_run_cost(base, adc_only, "baseline", 1))
    assert cmp.energy_ratio == n
    assert cmp.time_ratio == 8


def test_params_validation_and_loading(tmp_path):
    with pytest.raises(ConfigError):
        CostParams(e_adc=-1)
    with pytest.raises(ConfigError):
        CostParams(mux_group=0)
    with pytest.raises(ConfigError):
        CostParams(exp_policy="sometimes")
    with pytest.raises(ConfigError):
        CostParams.from_dict({"e_adcc": 1})
    bundled = load_cost_params()
    assert bundled.mux_group == 8
    p = tmp_path / "c.json"
    p.write_text(json.dumps({"e_adc": 1e-12, "_note": "x"}))
    assert load_cost_params(p).e_adc == 1e-12
    p.write_text("{bad")
    with pytest.raises(ConfigError, match="c.json:1"):
        load_cost_params(p)
    with pytest.raises(ConfigError):
        load_cost_params(tmp_path / "missing.json")


def test_report_from_real_runs():
    m = random_pm1_model(40, 0)
    cfg = AnnealConfig(700, evaluator="crossbar")
    a = anneal_insitu(m, cfg)
    b = anneal_direct_baseline(m, cfg)
    params = load_cost_params()
    cmp = compare_costs(estimate_run_cost(a.op_counters, params, "insitu", a.iterations),
                        estimate_run_cost(b.op_counters, params, "baseline", b.iterations))
    assert cmp.energy_ratio > 1 and cmp.time_ratio > 1
    d = estimate_run_cost(a.op_counters, params, "insitu", a.iterations).as_dict()
    assert set(d["energy_breakdown"]) == {"adc", "cells", "exponential", "digital"}
    assert isinstance(CostReport("insitu", {}, {}).total_energy, float)
    assert np.isfinite(cmp.energy_ratio)
