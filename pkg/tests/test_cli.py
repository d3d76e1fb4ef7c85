import json
import subprocess
import sys

import pytest

from inc_anneal.cli import (
    CSV_COLUMNS,
    ExperimentConfig,
    RunRecord,
    bundled_best_known,
    main,
    run_campaign,
    summarize,
)
from inc_anneal.costmodel import CostReport
from inc_anneal.crossbar import OpCounters
from inc_anneal.model import load_gset
from inc_anneal.schedule import ConfigError

TRIANGLE = "3 3\n1 2 1\n2 3 1\n1 3 1\n"


@pytest.fixture
def workdir(tmp_path):
    (tmp_path / "tri.txt").write_text(TRIANGLE)
    return tmp_path


def _write(path, cfg):
    path.write_text(json.dumps(cfg))
    return str(path)


def _rec(seed, cut, solver="insitu"):
    return RunRecord(seed, solver, 10, -cut, cut, OpCounters(), CostReport(solver, {}, {}))


def test_triangle_campaign(workdir):
    cfg = ExperimentConfig.from_dict({"instance": "tri.txt", "runs": 20, "best_known": 2,
                                      "anneal": {"total_iterations": 200}}, workdir)
    s = run_campaign(cfg, load_gset(workdir / "tri.txt", name="tri"), "insitu")
    assert s.success_rate == 1.0
    assert s.max_cut == 2 and s.runs == 20
    assert [r.seed for r in s.records] == list(range(20))


def test_summarize_rules():
    assert summarize([_rec(0, 10.0)], 10.0).success_rate == 1.0
    recs = [_rec(i, 10.0 if i % 2 else 5.0) for i in range(10)]
    assert summarize(recs, 10.0, 0.9).success_rate == 0.5
    assert summarize(recs, None).success_rate is None
    with pytest.raises(ValueError):
        summarize([])
    with pytest.raises(ValueError):
        summarize([_rec(0, 1.0), _rec(1, 1.0, "baseline")], 1.0)
    s = summarize([_rec(3, 1.0), _rec(1, 2.0)], 2.0)
    assert [r.seed for r in s.records] == [1, 3]


def test_config_errors(workdir):
    with pytest.raises(ConfigError):
        ExperimentConfig.from_dict({"instance": "tri.txt", "anneal": {"total_iterations": 0}}, workdir)
    for bad in [{"instance": "tri.txt", "runs": 0}, {"instance": "tri.txt", "target_fraction": 0},
                {"instance": "tri.txt", "solver": "greedy"}, {"instance": "tri.txt", "colour": 1},
                {"instance": "tri.txt", "anneal": {"speed": 1}}, {}, {"instance": 3}]:
        with pytest.raises(ConfigError):
            ExperimentConfig.from_dict(bad, workdir)


def test_default_iterations_per_node(workdir):
    cfg = ExperimentConfig.from_dict({"instance": "tri.txt"}, workdir)
    assert cfg.anneal_config(800, 0).total_iterations == 16000


def test_best_known_lookup(workdir):
    table = bundled_best_known()
    assert table["G1"] == 11624
    cfg = ExperimentConfig.from_dict({"instance": "tri.txt"}, workdir)
    assert cfg.best_known_for("G1") == 11624
    assert cfg.best_known_for("tri") is None


def test_bench_csv_schema_and_determinism(workdir):
    c = _write(workdir / "c.json", {"instance": "tri.txt", "runs": 5, "best_known": 2,
                                    "anneal": {"total_iterations": 300, "evaluator": "crossbar"}})
    assert main(["bench", "--config", c, "--out", str(workdir / "a")]) == 0
    assert main(["bench", "--config", c, "--out", str(workdir / "b.csv")]) == 0
    a = (workdir / "a.csv").read_text().splitlines()
    b = (workdir / "b.csv").read_text().splitlines()
    assert a[0].startswith("#")
    assert a[1] == ",".join(CSV_COLUMNS)
    assert a[1:] == b[1:]
    assert len(a) == 2 + 5
    summary = json.loads((workdir / "a.json").read_text())["summary"]
    assert summary["success_rate"] == 1.0


def test_bench_without_best_known(workdir):
    c = _write(workdir / "c.json", {"instance": "tri.txt", "runs": 2, "anneal": {"total_iterations": 50}})
    assert main(["bench", "--config", c, "--out", str(workdir / "o")]) == 0
    rows = (workdir / "o.csv").read_text().splitlines()[2:]
    assert all(r.split(",")[5] == "NA" for r in rows)
    assert json.loads((workdir / "o.json").read_text())["summary"]["success_rate"] is None


def test_both_solvers_and_cost(workdir, capsys):
    c = _write(workdir / "c.json", {"instance": "tri.txt", "runs": 3, "solver": "both",
                                    "anneal": {"total_iterations": 100, "evaluator": "crossbar"}})
    assert main(["bench", "--config", c, "--out", str(workdir / "r")]) == 0
    ins, base = workdir / "r.tri.insitu.json", workdir / "r.tri.baseline.json"
    assert ins.exists() and base.exists()
    out = workdir / "ratio.json"
    assert main(["cost", str(ins), str(base), "--config", c, "--out", str(out)]) == 0
    ratio = json.loads(out.read_text())["ratio"]
    assert ratio["energy_ratio"] > 1
    assert main(["cost", str(ins)]) == 1


def test_solve_and_oracle(workdir, capsys):
    c = _write(workdir / "c.json", {"instance": "tri.txt", "anneal": {"total_iterations": 100}})
    assert main(["solve", "--config", c, "--seed", "3", "--out", str(workdir / "s.json")]) == 0
    s = json.loads((workdir / "s.json").read_text())
    assert s["seed"] == 3 and s["best_cut"] == 2
    assert main(["oracle", "--config", c]) == 0
    assert "max cut 2" in capsys.readouterr().out


def test_exit_codes(workdir):
    missing = _write(workdir / "m.json", {"instance": "nope.txt"})
    assert main(["bench", "--config", missing]) == 2
    (workdir / "broken.txt").write_text("3 2\n1 2 1\n")
    broken = _write(workdir / "b.json", {"instance": "broken.txt"})
    assert main(["bench", "--config", broken, "--out", str(workdir / "x")]) == 2
    bad = workdir / "bad.json"
    bad.write_text("{")
    assert main(["bench", "--config", str(bad)]) == 1
    with pytest.raises(SystemExit) as ei:
        main(["bench"])
    assert ei.value.code == 1
    with pytest.raises(SystemExit) as ei:
        main(["launch"])
    assert ei.value.code == 1
    big = "25 1\n1 2 1\n"
    (workdir / "big.txt").write_text(big)
    assert main(["oracle", "--config", _write(workdir / "g.json", {"instance": "big.txt"})]) == 1


def test_parse_error_has_line_context(workdir, capsys):
    (workdir / "broken.txt").write_text("3 1\n1 9 1\n")
    c = _write(workdir / "b.json", {"instance": "broken.txt"})
    assert main(["solve", "--config", c]) == 2
    assert "line 2" in capsys.readouterr().err


def test_parallel_workers_match_serial(workdir):
    base = {"instance": "tri.txt", "runs": 4, "anneal": {"total_iterations": 120}}
    c1 = _write(workdir / "c1.json", base)
    c2 = _write(workdir / "c2.json", {**base, "workers": 2})
    main(["bench", "--config", c1, "--out", str(workdir / "s")])
    main(["bench", "--config", c2, "--out", str(workdir / "p")])
    assert (workdir / "s.csv").read_text().splitlines()[1:] == (workdir / "p.csv").read_text().splitlines()[1:]


def test_console_entry_point(workdir):
    c = _write(workdir / "c.json", {"instance": "tri.txt", "anneal": {"total_iterations": 50}})
    out = subprocess.run([sys.executable, "-m", "inc_anneal.cli", "oracle", "--config", c],
                         capture_output=True, text=True)
    assert out.returncode == 0
    assert "max cut 2" in out.stdout
