import json
import sys

import pytest

from hfactor.cli import main

K3_TEXT = "graph 3\n0 1\n1 2\n0 2\n"
K2_TEXT = "graph 2\n0 1\n"


@pytest.fixture
def k3_file(tmp_path):
    path = tmp_path / "k3.txt"
    path.write_text(K3_TEXT)
    return str(path)


@pytest.fixture
def k2_file(tmp_path):
    path = tmp_path / "k2.txt"
    path.write_text(K2_TEXT)
    return str(path)


def run_cli(args, capsys):
    code = main(args)
    out = capsys.readouterr()
    return code, out.out, out.err


def test_analyze_json(k3_file, capsys):
    code, out, _ = run_cli(["analyze", "--pattern", k3_file], capsys)
    assert code == 0
    rep = json.loads(out)
    assert rep["density"] == "3/2"
    assert rep["balance"] == "strictly_balanced"
    assert rep["automorphism_count"] == 6


def test_count_complete(k3_file, capsys):
    code, out, _ = run_cli(["count", "--pattern", k3_file, "--n", "6"], capsys)
    assert code == 0
    assert json.loads(out)["labeled"] == 360


def test_count_host_file(k3_file, tmp_path, capsys):
    host_path = tmp_path / "k6.txt"
    lines = ["graph 6"] + [f"{i} {j}" for i in range(6) for j in range(i + 1, 6)]
    host_path.write_text("\n".join(lines) + "\n")
    code, out, _ = run_cli(
        ["count", "--pattern", k3_file, "--host", str(host_path)], capsys
    )
    assert code == 0
    assert json.loads(out)["labeled"] == 360


def test_trace_csv_deterministic(k3_file, tmp_path, capsys):
    args = ["trace", "--pattern", k3_file, "--n", "6", "--seed", "3",
            "--format", "csv"]
    code, first, _ = run_cli(args, capsys)
    assert code == 0
    code, second, _ = run_cli(args, capsys)
    assert first == second
    header = first.splitlines()[0]
    assert header == ("i,edge,xi_num,xi_den,gamma_num,gamma_den,z,x_partial,"
                      "log_factor_count,margin,guard_state")


def test_trace_n3_single_row(k3_file, capsys):
    code, out, _ = run_cli(
        ["trace", "--pattern", k3_file, "--n", "3", "--seed", "1", "--format", "csv"],
        capsys,
    )
    rows = out.strip().splitlines()
    assert len(rows) == 2
    fields = rows[1].split(",")
    assert fields[2:6] == ["1", "1", "1", "1"]  # xi = gamma = 1


def test_scan_csv(k2_file, tmp_path, capsys):
    out_path = tmp_path / "scan.csv"
    code, _, _ = run_cli(
        ["scan", "--pattern", k2_file, "--n-list", "8", "--trials", "50",
         "--seed", "2", "--format", "csv", "--out", str(out_path), "--workers", "1"],
        capsys,
    )
    assert code == 0
    lines = out_path.read_text().splitlines()
    assert lines[0] == "n,p_half,ci_low,ci_high,formula_value,ratio,trials,seed,property"
    assert lines[1].split(",")[0] == "8"


def test_models_json(k2_file, capsys):
    code, out, _ = run_cli(
        ["models", "--pattern", k2_file, "--n", "6", "--p", "0.6",
         "--trials", "40", "--seed", "4", "--workers", "1"],
        capsys,
    )
    assert code == 0
    rep = json.loads(out)
    assert {"pr_gnp", "pr_gnm", "difference", "combined_se"} <= rep.keys()


def test_martingale_and_shearer(k2_file, capsys):
    code, out, _ = run_cli(
        ["martingale-check", "--pattern", k2_file, "--n", "6", "--trials", "5",
         "--p", "0.8", "--seed", "6"],
        capsys,
    )
    assert code == 0
    assert json.loads(out)["all_equal"] is True
    code, out, _ = run_cli(
        ["shearer", "--pattern", k2_file, "--n", "6", "--trials", "5",
         "--p", "0.8", "--seed", "6"],
        capsys,
    )
    assert code == 0
    assert json.loads(out)["min_slack"] >= 0


def test_window_csv(tmp_path, capsys):
    weights = tmp_path / "w.csv"
    weights.write_text("a,1.0\nb,2.0\nc,1.5\n")
    code, out, _ = run_cli(["window", "--weights", str(weights)], capsys)
    assert code == 0
    rep = json.loads(out)
    assert rep["weight_ratio"] == 1.0


def test_weight_lemma_csv(tmp_path, capsys):
    import itertools

    weights = tmp_path / "w.csv"
    rows = [f"{a},{b},1.5" for a, b in itertools.combinations(range(6), 2)]
    weights.write_text("\n".join(rows) + "\n")
    code, out, _ = run_cli(
        ["weight-lemma", "--weights", str(weights), "--n", "6", "--v", "2",
         "--B", "1.0"],
        capsys,
    )
    assert code == 0
    rep = json.loads(out)
    assert rep["hypothesis_holds"] and rep["conclusion_holds"]


def test_poly_modes(k3_file, capsys):
    base = ["poly", "--pattern", k3_file, "--n", "8", "--p", "0.5",
            "--anchor-role", "0", "--anchor-vertex", "0"]
    code, out, _ = run_cli(base + ["--mode", "profile"], capsys)
    assert code == 0
    assert json.loads(out)["degree"] == 3
    code, out, _ = run_cli(
        base + ["--mode", "check", "--theorem", "all-order", "--eps", "0.3"], capsys
    )
    assert code == 0
    assert "passes" in json.loads(out)
    code, out, _ = run_cli(
        base + ["--mode", "trial", "--trials", "20", "--seed", "9",
                "--eps", "0.5", "--workers", "1"],
        capsys,
    )
    assert code == 0
    assert json.loads(out)["trials"] == 20


def test_regularity(k3_file, capsys):
    code, out, _ = run_cli(
        ["regularity", "--pattern", k3_file, "--n", "12", "--p", "0.8",
         "--seed", "3", "--eps", "0.5", "--beta", "20"],
        capsys,
    )
    assert code == 0
    rep = json.loads(out)
    assert "part_a" in rep and "part_b" in rep


def test_config_file_with_flag_override(k3_file, tmp_path, capsys):
    config = tmp_path / "cfg.json"
    config.write_text(json.dumps({"pattern": k3_file, "n": 3}))
    code, out, _ = run_cli(["count", "--config", str(config), "--n", "6"], capsys)
    assert code == 0
    assert json.loads(out)["labeled"] == 360  # flag wins over config


def test_exit_code_validation_error(k3_file, capsys):
    code, _, err = run_cli(["count", "--pattern", k3_file, "--n", "7"], capsys)
    assert code == 1
    assert "error" in err


def test_exit_code_missing_file(capsys):
    code, _, _ = run_cli(["analyze", "--pattern", "/nonexistent/p.txt"], capsys)
    assert code == 1


def test_exit_code_bad_flag(capsys):
    code, _, _ = run_cli(["analyze", "--nonsense"], capsys)
    assert code == 1


def test_exit_code_invariant_failure(monkeypatch, capsys, k2_file):
    import hfactor.cli as cli_mod
    from hfactor.errors import InvariantError

    def boom(cfg):
        raise InvariantError("forced")

    monkeypatch.setitem(cli_mod._DISPATCH, "analyze", boom)
    code, _, err = run_cli(["analyze", "--pattern", k2_file], capsys)
    assert code == 2
    assert "invariant" in err


def test_byte_identical_json(k3_file, capsys):
    args = ["analyze", "--pattern", k3_file]
    _, first, _ = run_cli(args, capsys)
    _, second, _ = run_cli(args, capsys)
    assert first == second
