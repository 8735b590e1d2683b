import csv
import io
import json
import subprocess
import sys
from fractions import Fraction

import pytest

from helpers import DATA, fixture_instance
from vrpsd import recourse
from vrpsd.cli import BENCH_COLUMNS, main
from vrpsd.instance import load_instance
from vrpsd.oracle import brute_force_optimum

FIXTURE = str(DATA / "counterexample.json")


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def test_solve_prints_the_optimum(capsys):
    code, out, _ = run(capsys, "solve", FIXTURE, "--mode", "d2", "--set-cuts")
    record = json.loads(out)
    want, _ = brute_force_optimum(fixture_instance())
    assert code == 0
    assert record["status"] == "optimal"
    assert Fraction(record["objective"]) == want
    assert record["config"] == {"mode": "d2", "set_cuts": True, "activation": "whs"}


def test_solve_writes_output_file(tmp_path, capsys):
    target = tmp_path / "out.json"
    code, out, _ = run(capsys, "solve", FIXTURE, "--mode", "d1", "-o", str(target))
    assert code == 0 and out == ""
    assert json.loads(target.read_text())["instance"] == "counterexample.json"


@pytest.mark.parametrize(
    "argv",
    [
        ["solve", FIXTURE, "--mode", "d1", "--set-cuts"],
        ["solve", "/nonexistent/instance.json"],
        ["solve", FIXTURE, "--mode", "d9"],
        ["evaluate", FIXTURE, "--routes", "1,2,3,4,5"],
        ["evaluate", FIXTURE, "--routes", "1,x"],
        ["bench", "/nonexistent"],
        ["generate", "--n", "0"],
        [],
    ],
)
def test_usage_errors_exit_with_two(argv, capsys):
    assert main(argv) == 2


def test_limit_exits_with_one(tmp_path, capsys):
    path = tmp_path / "big.json"
    # the scale smoke instance needs branching
    assert main(["generate", "--n", "15", "--k", "3", "--capacity", "100", "--scenarios", "50",
                 "--fill", "0.8", "--cv", "0.3", "--seed", "2", "-o", str(path)]) == 0
    code, out, _ = run(capsys, "solve", str(path), "--node-limit", "1", "--time-limit", "60")
    assert code == 1 and json.loads(out)["status"] == "limit"


def test_time_limit_from_environment(tmp_path, capsys, monkeypatch):
    path = tmp_path / "big.json"
    main(["generate", "--n", "12", "--k", "3", "--seed", "3", "-o", str(path)])
    monkeypatch.setenv("VRPSD_TIME_LIMIT", "0")
    code, out, _ = run(capsys, "solve", str(path))
    assert code == 1 and json.loads(out)["status"] == "limit"
    monkeypatch.setenv("VRPSD_TIME_LIMIT", "soon")
    assert main(["solve", str(path)]) == 2


def test_generate_is_reproducible(tmp_path, capsys):
    args = ["generate", "--n", "6", "--k", "2", "--capacity", "50", "--scenarios", "4",
            "--distribution", "correlated", "--seed", "9"]
    _, first, _ = run(capsys, *args)
    _, second, _ = run(capsys, *args)
    assert first == second
    path = tmp_path / "g.json"
    path.write_text(first)
    inst = load_instance(path)
    assert inst.n == 6 and inst.fleet == 2 and inst.n_scenarios == 4


def test_evaluate_golden_plan(capsys):
    code, out, _ = run(capsys, "evaluate", FIXTURE, "--routes", "1,2,3,4;5")
    record = json.loads(out)
    assert code == 0
    assert Fraction(record["recourse"]) == Fraction(3, 2)
    inst = fixture_instance()
    assert Fraction(record["routing_cost"]) == 1 + 1 + 1 + 1 + 2 + 2 * 1
    assert Fraction(record["total"]) == Fraction(record["routing_cost"]) + Fraction(3, 2) + inst.objective_offset


def test_bench_on_empty_directory_writes_header_only(tmp_path, capsys):
    code, out, _ = run(capsys, "bench", str(tmp_path))
    assert code == 0
    assert out.strip() == ",".join(BENCH_COLUMNS)


def test_bench_rows_per_instance_and_configuration(tmp_path, capsys):
    for seed in range(3):
        main(["generate", "--n", "5", "--k", "2", "--capacity", "50", "--scenarios", "3",
              "--seed", str(seed), "-o", str(tmp_path / f"inst{seed}.json")])
    capsys.readouterr()
    target = tmp_path / "bench.csv"
    code, _, _ = run(capsys, "bench", str(tmp_path), "--jobs", "2", "-o", str(target))
    rows = list(csv.DictReader(io.StringIO(target.read_text())))
    assert code == 0 and len(rows) == 9
    assert {(r["mode"], r["setcuts"]) for r in rows} == {("d1", "0"), ("d2", "0"), ("d2", "1")}
    by_instance = {}
    for r in rows:
        by_instance.setdefault(r["instance"], set()).add(r["obj"])
    assert all(len(values) == 1 for values in by_instance.values())


def test_bench_rejects_unknown_configuration(tmp_path):
    assert main(["bench", str(tmp_path), "--configs", "d1+set"]) == 2
    assert main(["bench", str(tmp_path), "--configs", "d7"]) == 2


def test_oracle_check_passes(capsys):
    code, out, _ = run(capsys, "oracle-check", "--seed", "4", "--instances", "3")
    assert code == 0
    assert out.count("PASS") == 4


def test_oracle_check_with_zero_budget_is_vacuous(capsys):
    code, out, err = run(capsys, "oracle-check", "--instances", "0")
    assert code == 0 and "vacuous" in out and "warning" in err


def test_oracle_check_catches_an_off_by_one_failure_count(capsys, monkeypatch):
    original = recourse.fail
    monkeypatch.setattr(recourse, "fail", lambda *args: original(*args) + 1)
    code, out, _ = run(capsys, "oracle-check", "--seed", "4", "--instances", "3")
    assert code == 1
    assert "FAIL fail-count" in out


def test_module_entry_point():
    done = subprocess.run([sys.executable, "-m", "vrpsd.cli", "evaluate", FIXTURE, "--routes", "1,2,3,4;5"],
                          capture_output=True, text=True, check=False)
    assert done.returncode == 0
    assert Fraction(json.loads(done.stdout)["recourse"]) == Fraction(3, 2)
