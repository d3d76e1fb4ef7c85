"""``inc-anneal`` command line: single runs, seeded campaigns, oracle and cost reports.

Configuration is one JSON document. Only ``instance`` is required::

    {
      "instance": "G1",
      "solver": "insitu",
      "runs": 100,
      "seed_base": 0,
      "target_fraction": 0.9,
      "anneal": {"iterations_per_node": 20, "evaluator": "crossbar"},
      "cost": "costs.json"
    }

Relative instance paths are resolved against the config file's directory,
then against ``$INC_ANNEAL_GSET_DIR``. Exit codes: 0 success, 1 usage or
configuration error, 2 runtime error.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import os
import sys
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from datetime import datetime, timezone
from importlib import resources
from pathlib import Path

import numpy as np

from . import __version__
from .annealer import AnnealConfig, anneal
from .costmodel import CostParams, CostReport, compare_costs, estimate_run_cost, load_cost_params
from .crossbar import OpCounters
from .model import (CapacityError, MaxCutInstance, brute_force_ground_state, cut_from_energy, cut_value, energy_direct,
                    load_gset, maxcut_to_ising)
from .schedule import ConfigError, FractionalFactor, Schedule

CSV_COLUMNS = ("seed", "solver", "iterations", "best_energy", "best_cut", "success",
               "adc_conversions", "activated_cells", "energy_j", "time_s")
SOLVERS = ("insitu", "baseline")
GSET_ENV = "INC_ANNEAL_GSET_DIR"

_ANNEAL_KEYS = {"total_iterations", "iterations_per_node", "t_flips", "iterations_per_level", "normalizer",
                "evaluator", "k_bits", "mux_group", "adc_bits", "backend", "schedule", "factor"}
_TOP_KEYS = {"instance", "instances", "solver", "runs", "seed_base", "target_fraction", "best_known",
             "anneal", "cost", "output", "workers"}


def bundled_best_known() -> dict[str, float]:
    text = resources.files("inc_anneal").joinpath("data/gset_best_known.json").read_text()
    return {k: float(v) for k, v in json.loads(text).items()}


@dataclass
class ExperimentConfig:
    instances: list[str]
    solver: str = "insitu"
    runs: int = 1
    seed_base: int = 0
    target_fraction: float = 0.9
    best_known: float | dict | None = None
    anneal: dict = field(default_factory=dict)
    cost_params: CostParams = field(default_factory=CostParams)
    output: str | None = None
    workers: int = 1
    base_dir: Path = field(default_factory=Path.cwd)

    def __post_init__(self):
        if not self.instances:
            raise ConfigError("config must name an instance")
        if self.solver not in (*SOLVERS, "both"):
            raise ConfigError(f"solver must be insitu, baseline or both, got {self.solver!r}")
        if not isinstance(self.runs, int) or self.runs < 1:
            raise ConfigError("runs must be an integer >= 1")
        if not isinstance(self.seed_base, int) or not 0 <= self.seed_base < 2**64:
            raise ConfigError("seed_base must be a 64-bit non-negative integer")
        if not 0 < float(self.target_fraction) <= 1:
            raise ConfigError("target_fraction must be in (0, 1]")
        if not isinstance(self.workers, int) or self.workers < 1:
            raise ConfigError("workers must be an integer >= 1")
        extra = sorted(set(self.anneal) - _ANNEAL_KEYS)
        if extra:
            raise ConfigError(f"unknown anneal field(s): {', '.join(extra)}")
        # fail early on bad annealer settings rather than inside a worker
        self.anneal_config(16, self.seed_base)

    @property
    def solvers(self) -> tuple[str, ...]:
        return SOLVERS if self.solver == "both" else (self.solver,)

    @classmethod
    def from_dict(cls, data: dict, base_dir: Path | None = None) -> "ExperimentConfig":
        if not isinstance(data, dict):
            raise ConfigError("config must be a JSON object")
        extra = sorted(k for k in set(data) - _TOP_KEYS if not k.startswith("_"))
        if extra:
            raise ConfigError(f"unknown config field(s): {', '.join(extra)}")
        if "instance" in data and "instances" in data:
            raise ConfigError("give either 'instance' or 'instances', not both")
        inst = data.get("instances", data.get("instance"))
        if isinstance(inst, str):
            inst = [inst]
        if not isinstance(inst, list) or not all(isinstance(p, str) for p in inst):
            raise ConfigError("instance must be a path or a list of paths")
        base_dir = Path(base_dir) if base_dir is not None else Path.cwd()
        cost = data.get("cost")
        if cost is None:
            params = load_cost_params()
        elif isinstance(cost, str):
            p = Path(cost)
            params = load_cost_params(p if p.is_absolute() else base_dir / p)
        elif isinstance(cost, dict):
            params = CostParams.from_dict(cost)
        else:
            raise ConfigError("cost must be a path or an object")
        anneal_cfg = data.get("anneal", {})
        if not isinstance(anneal_cfg, dict):
            raise ConfigError("anneal must be an object")
        try:
            return cls(instances=inst, solver=data.get("solver", "insitu"), runs=data.get("runs", 1),
                       seed_base=data.get("seed_base", 0), target_fraction=data.get("target_fraction", 0.9),
                       best_known=data.get("best_known"), anneal=dict(anneal_cfg), cost_params=params,
                       output=data.get("output"), workers=data.get("workers", 1), base_dir=base_dir)
        except TypeError as exc:
            raise ConfigError(str(exc)) from exc

    @classmethod
    def load(cls, path) -> "ExperimentConfig":
        path = Path(path)
        try:
            text = path.read_text()
        except OSError as exc:
            raise ConfigError(f"cannot read config {path}: {exc}") from exc
        try:
            data = json.loads(text)
        except json.JSONDecodeError as exc:
            raise ConfigError(f"{path}:{exc.lineno}: invalid JSON ({exc.msg})") from exc
        return cls.from_dict(data, path.parent)

    def resolve_instance(self, ref: str) -> Path:
        p = Path(ref)
        candidates = [p] if p.is_absolute() else [self.base_dir / p]
        if not p.is_absolute() and os.environ.get(GSET_ENV):
            candidates.append(Path(os.environ[GSET_ENV]) / p)
        for c in candidates:
            if c.is_file():
                return c
        raise FileNotFoundError(f"instance {ref!r} not found (looked in: {', '.join(map(str, candidates))})")

    def best_known_for(self, instance_name: str) -> float | None:
        if isinstance(self.best_known, (int, float)):
            return float(self.best_known)
        if isinstance(self.best_known, dict) and instance_name in self.best_known:
            return float(self.best_known[instance_name])
        return bundled_best_known().get(instance_name)

    def anneal_config(self, n: int, seed: int) -> AnnealConfig:
        a = dict(self.anneal)
        per_node = a.pop("iterations_per_node", 20)
        total = a.pop("total_iterations", None)
        if total is None:
            total = int(per_node) * n
        sched = a.pop("schedule", None) or {}
        fac = a.pop("factor", None)
        try:
            schedule = Schedule(**sched)
            factor = FractionalFactor.for_schedule(schedule, **fac) if fac else None
            a.setdefault("mux_group", self.cost_params.mux_group)
            return AnnealConfig(total_iterations=int(total), schedule=schedule, factor=factor, seed=int(seed), **a)
        except TypeError as exc:
            raise ConfigError(f"bad anneal settings: {exc}") from exc


@dataclass
class RunRecord:
    seed: int
    solver: str
    iterations: int
    best_energy: float
    best_cut: float
    counters: OpCounters
    cost: CostReport
    success: bool | None = None

    def as_dict(self) -> dict:
        return {"seed": self.seed, "solver": self.solver, "iterations": self.iterations,
                "best_energy": self.best_energy, "best_cut": self.best_cut, "success": self.success,
                "counters": self.counters.as_dict(), "cost": self.cost.as_dict()}


@dataclass
class CampaignSummary:
    instance: str
    solver: str
    records: list[RunRecord]
    best_known: float | None
    target_fraction: float
    success_rate: float | None
    mean_cut: float
    min_cut: float
    max_cut: float

    @property
    def runs(self) -> int:
        return len(self.records)

    def as_dict(self) -> dict:
        return {"instance": self.instance, "solver": self.solver, "runs": self.runs,
                "best_known": self.best_known, "target_fraction": self.target_fraction,
                "success_rate": self.success_rate, "mean_cut": self.mean_cut, "min_cut": self.min_cut,
                "max_cut": self.max_cut, "records": [r.as_dict() for r in self.records]}


def summarize(records, best_known: float | None = None, target_fraction: float = 0.9,
              instance: str = "") -> CampaignSummary:
    """Aggregate per-run records of a single solver.

    A run succeeds when its best cut reaches ``target_fraction * best_known``;
    without ``best_known`` the success rate is ``None``.
    """
    records = sorted(records, key=lambda r: r.seed)
    if not records:
        raise ValueError("summarize needs at least one record")
    solvers = {r.solver for r in records}
    if len(solvers) > 1:
        raise ValueError(f"records mix solvers {sorted(solvers)}; summarise each solver separately")
    if not 0 < target_fraction <= 1:
        raise ValueError("target_fraction must be in (0, 1]")
    cuts = [r.best_cut for r in records]
    rate = None
    if best_known is not None:
        threshold = target_fraction * best_known
        for r in records:
            r.success = r.best_cut >= threshold
        rate = sum(r.success for r in records) / len(records)
    else:
        for r in records:
            r.success = None
    return CampaignSummary(instance, records[0].solver, records, best_known, target_fraction, rate,
                           math.fsum(cuts) / len(cuts), min(cuts), max(cuts))


def _run_one(job) -> RunRecord:
    instance, config, solver, params = job
    model = maxcut_to_ising(instance)
    try:
        res = anneal(model, config, solver)
    except Exception as exc:
        raise RuntimeError(f"run with seed {config.seed} failed: {exc}") from exc
    cost = estimate_run_cost(res.op_counters, params, solver, res.iterations)
    # score the best state on the exact couplings (a quantised evaluator may differ)
    energy = energy_direct(model, res.best_state)
    return RunRecord(config.seed, solver, res.iterations, energy, cut_from_energy(instance, energy),
                     res.op_counters, cost)


def run_campaign(config: ExperimentConfig, instance: MaxCutInstance, solver: str) -> CampaignSummary:
    """Run ``config.runs`` independent seeds ``seed_base, seed_base + 1, ...`` of one solver."""
    jobs = [(instance, config.anneal_config(instance.n, config.seed_base + i), solver, config.cost_params)
            for i in range(config.runs)]
    if config.workers > 1:
        with ProcessPoolExecutor(max_workers=config.workers) as pool:
            records = list(pool.map(_run_one, jobs))
    else:
        records = [_run_one(j) for j in jobs]
    return summarize(records, config.best_known_for(instance.name), float(config.target_fraction), instance.name)


def _fmt(v) -> str:
    if v is None:
        return "NA"
    if isinstance(v, bool):
        return str(int(v))
    if isinstance(v, float):
        return repr(v)
    return str(v)


def csv_body(summary: CampaignSummary) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(CSV_COLUMNS)
    for r in summary.records:
        w.writerow([_fmt(v) for v in (r.seed, r.solver, r.iterations, r.best_energy, r.best_cut, r.success,
                                      r.counters.adc_conversions, r.counters.activated_cells,
                                      r.cost.total_energy, r.cost.total_time)])
    return buf.getvalue()


def write_campaign(summary: CampaignSummary, csv_path: Path, json_path: Path, meta: dict) -> None:
    header = f"# inc-anneal {__version__} {summary.instance} {summary.solver} generated {meta['timestamp']}\n"
    csv_path.write_text(header + csv_body(summary))
    json_path.write_text(json.dumps({"meta": meta, "summary": summary.as_dict()}, indent=1, default=_json_default))


def _json_default(o):
    if isinstance(o, (np.integer,)):
        return int(o)
    if isinstance(o, (np.floating,)):
        return float(o)
    raise TypeError(f"not JSON serialisable: {type(o).__name__}")


def _load_instance(config: ExperimentConfig, ref: str) -> MaxCutInstance:
    path = config.resolve_instance(ref)
    return load_gset(path, name=Path(ref).stem)


def _output_paths(out: Path, instance: str, solver: str, many: bool) -> tuple[Path, Path]:
    stem = out.with_suffix("") if out.suffix in (".csv", ".json") else out
    if many:
        stem = stem.with_name(f"{stem.name}.{instance}.{solver}")
    return stem.parent / f"{stem.name}.csv", stem.parent / f"{stem.name}.json"


def cmd_bench(config: ExperimentConfig, args) -> int:
    out = Path(args.out or config.output or "campaign")
    combos = [(ref, s) for ref in config.instances for s in config.solvers]
    stamp = datetime.now(timezone.utc).isoformat(timespec="seconds")
    for ref, solver in combos:
        instance = _load_instance(config, ref)
        summary = run_campaign(config, instance, solver)
        csv_path, json_path = _output_paths(out, instance.name, solver, len(combos) > 1)
        meta = {"timestamp": stamp, "version": __version__, "cost_params": config.cost_params.as_dict(),
                "anneal": config.anneal}
        write_campaign(summary, csv_path, json_path, meta)
        rate = "NA" if summary.success_rate is None else f"{summary.success_rate:.3f}"
        print(f"{instance.name} {solver}: runs={summary.runs} success_rate={rate} "
              f"cut mean/min/max={summary.mean_cut:.1f}/{summary.min_cut:g}/{summary.max_cut:g} -> {csv_path}")
    return 0


def cmd_solve(config: ExperimentConfig, args) -> int:
    ref = config.instances[0]
    instance = _load_instance(config, ref)
    model = maxcut_to_ising(instance)
    solver = config.solvers[0]
    acfg = config.anneal_config(instance.n, config.seed_base)
    res = anneal(model, acfg, solver)
    cost = estimate_run_cost(res.op_counters, config.cost_params, solver, res.iterations)
    trace = res.energy_trace
    marks = np.unique(np.linspace(0, trace.size - 1, min(trace.size, 11)).astype(int))
    out = {
        "instance": instance.name, "solver": solver, "seed": res.seed, "n": instance.n,
        "iterations": res.iterations, "best_energy": energy_direct(model, res.best_state),
        "best_cut": cut_value(instance, res.best_state), "accepts": res.accept_count,
        "trace": {int(i): float(trace[i]) for i in marks}, "counters": res.op_counters.as_dict(),
        "cost": cost.as_dict(), "backend": res.backend, "best_state": res.best_state.tolist(),
    }
    print(f"{instance.name} {solver} seed={res.seed}: best_energy={out['best_energy']:g} "
          f"best_cut={out['best_cut']:g} iterations={res.iterations} accepts={res.accept_count}")
    for i, e in out["trace"].items():
        print(f"  iter {i:>8d}  E={e:g}")
    if args.out:
        Path(args.out).write_text(json.dumps(out, indent=1, default=_json_default))
    return 0


def cmd_oracle(config: ExperimentConfig, args) -> int:
    ref = config.instances[0]
    instance = _load_instance(config, ref)
    spins, energy = brute_force_ground_state(maxcut_to_ising(instance))
    out = {"instance": instance.name, "n": instance.n, "ground_energy": energy,
           "max_cut": cut_from_energy(instance, energy), "state": spins.tolist()}
    print(f"{instance.name}: ground energy {energy:g}, max cut {out['max_cut']:g}")
    if args.out:
        Path(args.out).write_text(json.dumps(out, indent=1))
    return 0


def _mean_report(summary_json: dict, params: CostParams) -> tuple[str, CostReport]:
    s = summary_json.get("summary", summary_json)
    records = s.get("records")
    if not records:
        raise ConfigError("campaign summary has no records")
    solver = s["solver"]
    reports = [estimate_run_cost(OpCounters(**r["counters"]), params, solver, int(r["iterations"])) for r in records]
    k = len(reports)
    energy = {c: math.fsum(r.energy_breakdown[c] for r in reports) / k for c in reports[0].energy_breakdown}
    latency = {c: math.fsum(r.time_breakdown[c] for r in reports) / k for c in reports[0].time_breakdown}
    return solver, CostReport(solver, energy, latency)


def cmd_cost(config: ExperimentConfig | None, args) -> int:
    if len(args.summaries) != 2:
        raise ConfigError("cost needs exactly two campaign summary files (reference first)")
    params = config.cost_params if config is not None else load_cost_params()
    reports = []
    for p in args.summaries:
        try:
            data = json.loads(Path(p).read_text())
        except OSError as exc:
            raise ConfigError(f"cannot read {p}: {exc}") from exc
        except json.JSONDecodeError as exc:
            raise ConfigError(f"{p}:{exc.lineno}: invalid JSON ({exc.msg})") from exc
        reports.append(_mean_report(data, params))
    (sa, a), (sb, b) = reports
    cmp = compare_costs(a, b)
    out = {"reference": sa, "other": sb, "reference_cost": a.as_dict(), "other_cost": b.as_dict(),
           "ratio": cmp.as_dict()}
    print(f"{sb} / {sa}: energy x{cmp.energy_ratio:.4g}, time x{cmp.time_ratio:.4g}")
    text = json.dumps(out, indent=1)
    if args.out:
        Path(args.out).write_text(text)
    else:
        print(text)
    return 0


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(1, f"{self.prog}: error: {message}\n")


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="inc-anneal", description="Incremental-energy annealing for Max-Cut.")
    p.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    p.add_argument("command", choices=("solve", "bench", "oracle", "cost"))
    p.add_argument("summaries", nargs="*", help="cost: reference and other campaign JSON summaries")
    p.add_argument("--config", help="experiment config (JSON)")
    p.add_argument("--out", help="output path")
    p.add_argument("--seed", type=int, help="override seed_base")
    p.add_argument("--solver", choices=SOLVERS, help="override the configured solver")
    p.add_argument("--workers", type=int, help="parallel worker processes for bench")
    return p


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        config = None
        if args.config is None:
            if args.command != "cost":
                parser.error(f"{args.command} requires --config")
        else:
            config = ExperimentConfig.load(args.config)
            if args.seed is not None:
                config.seed_base = args.seed
            if args.solver is not None:
                config.solver = args.solver
            if args.workers is not None:
                config.workers = args.workers
            config.__post_init__()
        if args.summaries and args.command != "cost":
            parser.error("positional arguments are only accepted by 'cost'")
        handler = {"solve": cmd_solve, "bench": cmd_bench, "oracle": cmd_oracle, "cost": cmd_cost}[args.command]
        return handler(config, args)
    except (ConfigError, CapacityError) as exc:
        print(f"inc-anneal: configuration error: {exc}", file=sys.stderr)
        return 1
    except Exception as exc:
        print(f"inc-anneal: error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
