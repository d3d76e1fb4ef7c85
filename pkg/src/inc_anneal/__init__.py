"""Incremental-energy simulated annealing for Ising / Max-Cut problems.

Core pieces: exact Ising energies and the Gset reader (:mod:`.model`),
flip plans and incremental energies (:mod:`.incremental`), the fractional
factor and back-gate schedule (:mod:`.schedule`), the annealers
(:mod:`.annealer`), a behavioural DG-FeFET crossbar (:mod:`.crossbar`) and
the counter-driven cost model (:mod:`.costmodel`).
"""

from ._backend import BACKEND
from .annealer import AnnealConfig, RunResult, anneal, anneal_direct_baseline, anneal_insitu
from .costmodel import CostParams, CostReport, compare_costs, estimate_run_cost, load_cost_params
from .crossbar import (
    CrossbarState,
    OpCounters,
    QuantizedMatrix,
    crossbar_e_inc,
    crossbar_energy,
    device_current,
    program_crossbar,
    quantize_matrix,
)
from .evaluators import CrossbarEvaluator, IdealEvaluator, make_evaluator
from .incremental import FlipPlan, default_normalizer, delta_e, e_inc, make_flip_plan
from .model import (
    IsingModel,
    MaxCutInstance,
    brute_force_ground_state,
    cut_value,
    energy_direct,
    load_gset,
    maxcut_to_ising,
)
from .schedule import (
    ConfigError,
    FractionalFactor,
    Schedule,
    ScheduleState,
    bg_voltage_for,
    fractional_factor_value,
    schedule_step,
)

__version__ = "0.1.0"

__all__ = [
    "BACKEND", "AnnealConfig", "RunResult", "anneal", "anneal_direct_baseline", "anneal_insitu",
    "CostParams", "CostReport", "compare_costs", "estimate_run_cost", "load_cost_params",
    "CrossbarState", "OpCounters", "QuantizedMatrix", "crossbar_e_inc", "crossbar_energy", "device_current",
    "program_crossbar", "quantize_matrix", "CrossbarEvaluator", "IdealEvaluator", "make_evaluator",
    "FlipPlan", "default_normalizer", "delta_e", "e_inc", "make_flip_plan", "IsingModel", "MaxCutInstance",
    "brute_force_ground_state", "cut_value", "energy_direct", "load_gset", "maxcut_to_ising", "ConfigError",
    "FractionalFactor", "Schedule", "ScheduleState", "bg_voltage_for", "fractional_factor_value", "schedule_step",
]
