import json

import pytest

from thermoq.cli import main

from conftest import CASE


def run_cli(capsys, *argv):
    code = main(list(argv))
    captured = capsys.readouterr()
    return code, captured.out, captured.err


def test_steady_json(capsys):
    code, out, err = run_cli(capsys, "steady")
    assert code == 0
    payload = json.loads(out)
    assert abs(payload["q_c"] - CASE["q_c"]) < 1e-14
    assert payload["cooling"] is True
    assert payload["basis"] == ["00", "10", "01", "11"]
    assert payload["config"]["t_h"] == 20.0
    assert "[steady]" in err


def test_steady_out_file(capsys, tmp_path):
    path = tmp_path / "report.json"
    code, out, _ = run_cli(capsys, "steady", "--out", str(path))
    assert code == 0 and out == ""
    payload = json.loads(path.read_text())
    assert abs(payload["q_h"] - CASE["q_h"]) < 1e-14


def test_steady_flags_override(capsys):
    code, out, _ = run_cli(capsys, "steady", "--th", "5", "--e2", "3")
    assert code == 0
    payload = json.loads(out)
    assert payload["config"]["t_h"] == 5.0 and payload["config"]["e2"] == 3.0


def test_steady_qutrit_model(capsys):
    code, out, _ = run_cli(capsys, "steady", "--model", "qutrit")
    assert code == 0
    payload = json.loads(out)
    assert payload["basis"] == ["0", "1", "2"]
    assert abs(payload["q_c"] - CASE["q_c_qutrit"]) < 1e-14


def test_steady_infinite_carnot_serialized_as_null(capsys):
    # t_c = t_r puts the Carnot bound at infinity; JSON must stay valid
    code, out, _ = run_cli(capsys, "steady", "--tc", "1", "--tr", "1")
    assert code == 0
    payload = json.loads(out)
    assert payload["eta_carnot"] is None
    assert payload["eta_carnot_unbounded"] is True


def test_exit_codes(capsys):
    assert run_cli(capsys, "steady", "--e2", "0.5")[0] == 2
    assert run_cli(capsys, "steady", "--model", "compare")[0] == 2
    assert run_cli(capsys, "sweep", "--sweep", "bogus:1:2:3")[0] == 2
    assert run_cli(capsys, "carnot", "--tc", "1", "--tr", "1")[0] == 4
    _, _, err = run_cli(capsys, "steady", "--e2", "0.5")
    assert "e2" in err


def test_config_file_plus_flags(capsys, tmp_path):
    cfg = tmp_path / "cfg.json"
    cfg.write_text(json.dumps({"e2": 3.0, "t_h": 10.0}))
    code, out, _ = run_cli(capsys, "steady", "--config", str(cfg), "--th", "15")
    assert code == 0
    payload = json.loads(out)
    assert payload["config"]["e2"] == 3.0
    assert payload["config"]["t_h"] == 15.0


def test_evolve_writes_trajectory(capsys, tmp_path):
    path = tmp_path / "traj.csv"
    code, _, err = run_cli(
        capsys,
        "evolve", "--t-final", "4", "--samples", "9", "--out", str(path),
    )
    assert code == 0
    lines = path.read_text().splitlines()
    data = [l for l in lines if not l.startswith("#")]
    assert len(data) == 10  # header plus nine samples
    assert data[0].split(",")[0] == "t"
    assert "[evolve]" in err


def test_evolve_rho0_forms(capsys, tmp_path):
    for rho0 in ("ground", "mixed", "stationary", "basis:01"):
        path = tmp_path / f"t_{rho0.replace(':', '_')}.csv"
        code, _, _ = run_cli(
            capsys,
            "evolve", "--t-final", "1", "--samples", "3",
            "--rho0", rho0, "--out", str(path),
        )
        assert code == 0
    assert run_cli(capsys, "evolve", "--rho0", "basis:99")[0] == 2
    assert run_cli(capsys, "evolve", "--rho0", "bogus")[0] == 2


def test_evolve_plot(capsys, tmp_path):
    path = tmp_path / "traj.csv"
    code, _, err = run_cli(
        capsys,
        "evolve", "--t-final", "2", "--samples", "5",
        "--out", str(path), "--plot",
    )
    assert code == 0
    svg = tmp_path / "traj.svg"
    assert svg.exists() and svg.stat().st_size > 1000
    assert str(svg) in err


def test_plot_requires_out(capsys):
    assert run_cli(capsys, "evolve", "--t-final", "1", "--plot")[0] == 2


def test_sweep_csv(capsys, tmp_path):
    path = tmp_path / "sweep.csv"
    code, _, err = run_cli(
        capsys, "sweep", "--sweep", "th:1.2:50:6:log", "--out", str(path)
    )
    assert code == 0
    data = [l for l in path.read_text().splitlines() if not l.startswith("#")]
    assert data[0].startswith("th,status,")
    assert len(data) == 7
    assert "[sweep]" in err


def test_sweep_stdout_and_determinism(capsys, tmp_path):
    a = tmp_path / "a.csv"
    b = tmp_path / "b.csv"
    run_cli(capsys, "sweep", "--sweep", "e2:1.2:4:5", "--out", str(a))
    run_cli(capsys, "sweep", "--sweep", "e2:1.2:4:5", "--out", str(b))
    assert a.read_bytes() == b.read_bytes()
    code, out, _ = run_cli(capsys, "sweep", "--sweep", "e2:1.2:4:3")
    assert code == 0
    assert out.startswith("#") and "e2,status," in out


def test_sweep_compare_schema(capsys, tmp_path):
    path = tmp_path / "cmp.csv"
    code, _, _ = run_cli(
        capsys,
        "sweep", "--model", "compare", "--sweep", "th:1.5:50:3", "--out", str(path),
    )
    assert code == 0
    data = [l for l in path.read_text().splitlines() if not l.startswith("#")]
    assert data[0] == "th,status,q_c_two_qubit,q_c_qutrit,winner,error"
    assert data[-1].split(",")[4] == "qutrit"


def test_optimize_e2_json(capsys):
    code, out, _ = run_cli(capsys, "optimize-e2")
    assert code == 0
    payload = json.loads(out)
    assert abs(payload["e2_opt"] - CASE["e2_opt"]) < 1e-4
    assert payload["bracket"][0] < payload["e2_opt"] < payload["bracket"][1]


def test_optimize_e2_boundary_exit(capsys):
    assert run_cli(capsys, "optimize-e2", "--e2-max", "2.0")[0] == 4


def test_optimize_e2_scan(capsys, tmp_path):
    path = tmp_path / "scan.csv"
    code, _, _ = run_cli(
        capsys, "optimize-e2", "--scan", "5:100:3:log", "--out", str(path)
    )
    assert code == 0
    data = [l for l in path.read_text().splitlines() if not l.startswith("#")]
    assert data[0] == "t_h,e2_opt,q_c_opt"
    assert len(data) == 4


def test_carnot_verified(capsys):
    code, out, _ = run_cli(capsys, "carnot")
    assert code == 0
    payload = json.loads(out)
    assert abs(payload["e2_carnot"] - CASE["e2_carnot"]) < 1e-12
    assert payload["verified"] is True
    assert payload["trace_distance_to_product"] < 1e-9
    assert payload["max_abs_current"] < 1e-9


def test_compare_json(capsys):
    code, out, _ = run_cli(capsys, "compare")
    assert code == 0
    payload = json.loads(out)
    assert payload["winner"] == "qutrit"
    assert abs(payload["q_c_two_qubit"] - CASE["q_c"]) < 1e-14


def test_compare_search(capsys):
    code, out, _ = run_cli(capsys, "compare", "--search", "40", "--seed", "3")
    assert code == 0
    payload = json.loads(out)
    search = payload["search"]
    assert search["draws"] == 40
    total = search["two_qubit_wins"] + search["qutrit_wins"] + search["ties"]
    assert total == 40


def test_version(capsys):
    with pytest.raises(SystemExit) as exc:
        main(["--version"])
    assert exc.value.code == 0
    assert "thermoq" in capsys.readouterr().out
