"""Energy evaluators plugged into the annealers.

An evaluator exposes ``matrix`` (the couplings it effectively computes
with), ``e_inc(plan, factor_value, v_bg, normalizer)`` for the in-situ
annealer and ``energy(spins)`` for the direct-energy baseline; both return
``(value, OpCounters)``. ``fast_path`` tells the annealer the compiled loop
reproduces the evaluator exactly and may be used instead of per-move calls.
"""

from __future__ import annotations

import numpy as np

from .crossbar import OpCounters, crossbar_e_inc, crossbar_energy, program_crossbar, quantize_matrix
from .incremental import FlipPlan, incremental_product
from .model import IsingModel
from .schedule import FractionalFactor, Schedule


class IdealEvaluator:
    name = "ideal"
    fast_path = True
    counts_ops = False
    k = 1
    mux_group = 8
    n_arrays = 0

    def __init__(self, model: IsingModel):
        self.model = model
        self.matrix = model.J

    def e_inc(self, plan: FlipPlan, factor_value: float, v_bg: float, normalizer: float):
        return incremental_product(self.matrix, plan) / normalizer * factor_value, OpCounters()

    def energy(self, spins):
        s = np.asarray(spins, dtype=np.float64)
        return float(s @ (self.matrix @ s)), OpCounters()


class CrossbarEvaluator:
    name = "crossbar"
    counts_ops = True

    def __init__(self, model: IsingModel, k: int = 1, mux_group: int = 8, adc_bits: int | None = None,
                 factor: FractionalFactor | None = None, schedule: Schedule | None = None):
        self.model = model
        self.state = program_crossbar(quantize_matrix(model.J, k), mux_group=mux_group,
                                      factor=factor, schedule=schedule, adc_bits=adc_bits)
        J = np.ascontiguousarray(self.state.qm.reconstructed())
        J.setflags(write=False)
        self.matrix = J
        self.k = k
        self.mux_group = mux_group
        self.n_arrays = len(self.state.arrays)
        # a finite-resolution ADC changes values, so every move must go through the simulator
        self.fast_path = adc_bits is None

    def e_inc(self, plan: FlipPlan, factor_value: float, v_bg: float, normalizer: float):
        return crossbar_e_inc(self.state, plan.sigma_r, plan.sigma_c, v_bg, normalizer)

    def energy(self, spins):
        return crossbar_energy(self.state, spins)


def make_evaluator(model: IsingModel, kind: str = "ideal", *, k: int = 1, mux_group: int = 8,
                   adc_bits: int | None = None, factor: FractionalFactor | None = None,
                   schedule: Schedule | None = None):
    if kind == "ideal":
        return IdealEvaluator(model)
    if kind == "crossbar":
        return CrossbarEvaluator(model, k=k, mux_group=mux_group, adc_bits=adc_bits,
                                 factor=factor, schedule=schedule)
    raise ValueError(f"unknown evaluator {kind!r} (expected 'ideal' or 'crossbar')")
