import json
import math
import os

import pytest

from cqduffing.cli import main


def run_cli(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    summary = json.loads(out.out.strip().splitlines()[-1]) if out.out.strip() else {}
    return code, summary, out.err


def read_csv(path):
    with open(path) as fh:
        lines = fh.read().splitlines()
    assert lines[0].startswith("# cqduffing ")
    header = lines[1].split(",")
    rows = [line.split(",") for line in lines[2:]]
    return lines[0], header, rows


class TestExactCommand:
    def test_reference_solution_values(self, tmp_path, capsys):
        out = tmp_path / "exact.json"
        code, summary, _ = run_cli(capsys, "exact", "--a", "-1", "--b", "2", "--c", "3",
                                   "--x0", "1", "--out", str(out))
        assert code == 0
        doc = json.loads(out.read_text())
        sol = doc["solution"]
        assert float(sol["lam"]) == pytest.approx(4 - 3 * math.sqrt(2), abs=1e-9)
        assert float(sol["mu"]) == pytest.approx(12 * math.sqrt(2) - 17, abs=1e-9)
        assert float(sol["omega"]) == pytest.approx(3 * math.sqrt(2), abs=1e-9)
        assert float(sol["m"]) == pytest.approx((3 - 2 * math.sqrt(2)) / 6, abs=1e-9)
        assert summary["lam"] == pytest.approx(4 - 3 * math.sqrt(2), abs=1e-9)


class TestSimulateCommand:
    def test_equilibrium_stays_put(self, tmp_path, capsys):
        out = tmp_path / "sim.csv"
        code, summary, _ = run_cli(capsys, "simulate", "--a", "1", "--b", "1", "--c", "1",
                                   "--x0", "0", "--v0", "0", "--t-end", "10",
                                   "--out", str(out))
        assert code == 0
        _, header, rows = read_csv(str(out))
        assert header == ["t", "x", "v"]
        assert all(float(r[1]) == 0.0 and float(r[2]) == 0.0 for r in rows)

    def test_rerun_is_byte_identical(self, tmp_path, capsys):
        args = ("simulate", "--a", "1", "--b", "0.5", "--c", "0.25", "--x0", "0.3",
                "--t-end", "5")
        out1, out2 = tmp_path / "r1.csv", tmp_path / "r2.csv"
        assert run_cli(capsys, *args, "--out", str(out1))[0] == 0
        assert run_cli(capsys, *args, "--out", str(out2))[0] == 0
        assert out1.read_bytes() == out2.read_bytes()

    def test_numerical_failure_exit_code(self, tmp_path, capsys):
        code, _, err = run_cli(capsys, "simulate", "--a", "1", "--b", "0", "--c", "-1",
                               "--x0", "2", "--t-end", "50",
                               "--out", str(tmp_path / "x.csv"))
        assert code == 1
        assert "error" in err

    def test_gnuplot_script(self, tmp_path, capsys):
        out = tmp_path / "sim.csv"
        code, *_ = run_cli(capsys, "simulate", "--a", "-1", "--b", "0", "--c", "0",
                           "--x0", "1", "--t-end", "3", "--out", str(out), "--gnuplot")
        assert code == 0
        assert (tmp_path / "sim.csv.gp").read_text().startswith("set datafile")


class TestPresets:
    def test_poincare_chaotic_preset(self, tmp_path, capsys):
        out = tmp_path / "p.csv"
        code, summary, _ = run_cli(capsys, "poincare", "--preset", "fig6",
                                   "--points", "300", "--transient", "100",
                                   "--out", str(out))
        assert code == 0
        assert summary["clusters"] > 100
        _, header, rows = read_csv(str(out))
        assert header == ["n", "P", "Q"] and len(rows) == 300

    def test_preset_flag_conflict_is_validation_error(self, tmp_path, capsys):
        with pytest.raises(SystemExit) as exc:
            main(["poincare", "--preset", "fig6", "--gamma", "0.2",
                  "--out", str(tmp_path / "p.csv")])
        assert exc.value.code == 2

    def test_unknown_preset_rejected(self, tmp_path, capsys):
        with pytest.raises(SystemExit) as exc:
            main(["poincare", "--preset", "fig99", "--out", str(tmp_path / "p.csv")])
        assert exc.value.code == 2

    def test_control_preset_runs(self, tmp_path, capsys):
        out = tmp_path / "c.csv"
        code, summary, _ = run_cli(capsys, "control", "--preset", "fig10",
                                   "--out", str(out))
        assert code == 0
        doc = json.loads((tmp_path / "c.json").read_text())
        assert doc["report"]["controller_norm"] == pytest.approx(0.143, abs=0.02)
        assert len(doc["orbit_fit"]["monomial_coefficients"]) == 6


class TestScanCommand:
    def test_explicit_omega_row(self, tmp_path, capsys):
        out = tmp_path / "scan.csv"
        code, summary, _ = run_cli(capsys, "scan", "--omega", "1.4",
                                   "--gamma-min", "0.30", "--gamma-max", "0.40",
                                   "--resolution", "0.02", "--coarse-step", "0.02",
                                   "--out", str(out))
        assert code == 0
        _, header, rows = read_csv(str(out))
        assert header == ["omega", "gamma_c", "lyapunov"]
        assert len(rows) == 1
        omega, gamma_c, lyap = map(float, rows[0])
        assert omega == 1.4
        assert 0.30 <= gamma_c <= 0.38
        assert lyap > 0.01

    def test_table_preset_rows(self, tmp_path, capsys):
        out = tmp_path / "table.csv"
        code, summary, _ = run_cli(capsys, "scan", "--preset", "table1", "--rows", "2",
                                   "--resolution", "0.02", "--coarse-step", "0.04",
                                   "--out", str(out))
        assert code == 0
        _, header, rows = read_csv(str(out))
        assert header == ["omega", "gamma_c", "lyapunov"]
        assert len(rows) == 2
        assert [float(r[0]) for r in rows] == [0.05, 0.10]

    def test_jobs_do_not_change_output(self, tmp_path, capsys):
        base = ("scan", "--omega", "1.4", "--gamma-min", "0.32", "--gamma-max", "0.38",
                "--resolution", "0.03", "--coarse-step", "0.03")
        out1, out2 = tmp_path / "s1.csv", tmp_path / "s2.csv"
        assert run_cli(capsys, *base, "--jobs", "1", "--out", str(out1))[0] == 0
        assert run_cli(capsys, *base, "--jobs", "2", "--out", str(out2))[0] == 0
        b1 = out1.read_text().replace('"jobs": 1', '"jobs": N')
        b2 = out2.read_text().replace('"jobs": 2', '"jobs": N')
        assert b1 == b2


class TestControlSearch:
    def test_search_csv_and_parallel_merge(self, tmp_path, capsys):
        base = ("control", "--search", "--a", "1", "--b", "1", "--c", "0.2",
                "--delta", "0.1", "--gamma", "0.35", "--omega", "1.4",
                "--mu-min", "1.0", "--mu-max", "2.0", "--tau-min", "3.0",
                "--tau-max", "5.0", "--grid", "2")
        out1, out2 = tmp_path / "g1.csv", tmp_path / "g2.csv"
        assert run_cli(capsys, *base, "--jobs", "1", "--out", str(out1))[0] == 0
        assert run_cli(capsys, *base, "--jobs", "2", "--out", str(out2))[0] == 0
        _, header, rows = read_csv(str(out1))
        assert header == ["mu", "tau", "controller_norm", "is_periodic"]
        assert len(rows) == 4
        b1 = out1.read_text().replace('"jobs": 1', '"jobs": N')
        b2 = out2.read_text().replace('"jobs": 2', '"jobs": N')
        assert b1 == b2


class TestSdeCommand:
    def test_paths_and_summary(self, tmp_path, capsys):
        out = tmp_path / "paths.csv"
        code, summary, _ = run_cli(capsys, "sde", "--a", "0", "--b", "0", "--c", "0",
                                   "--gamma", "1.0", "--omega", "1.0",
                                   "--dt", "0.01", "--n-steps", "100", "--seed", "4",
                                   "--sigma", "0.1", "--ensemble", "20",
                                   "--save-paths", "3", "--out", str(out))
        assert code == 0
        _, header, rows = read_csv(str(out))
        assert header == ["path", "t", "x", "v"]
        assert {r[0] for r in rows} == {"0", "1", "2"}
        doc = json.loads((tmp_path / "paths.json").read_text())
        assert doc["final_time_stats"]["n"] == 20

    def test_deterministic_reruns(self, tmp_path, capsys):
        args = ("sde", "--a", "0", "--b", "0", "--c", "0", "--gamma", "0.5",
                "--omega", "1.0", "--dt", "0.02", "--n-steps", "50", "--seed", "10",
                "--ensemble", "4")
        out1, out2 = tmp_path / "a.csv", tmp_path / "b.csv"
        assert run_cli(capsys, *args, "--out", str(out1))[0] == 0
        assert run_cli(capsys, *args, "--out", str(out2))[0] == 0
        assert out1.read_bytes() == out2.read_bytes()


class TestOutdir:
    def test_env_var_default(self, tmp_path, capsys, monkeypatch):
        monkeypatch.setenv("CQDUFFING_OUTDIR", str(tmp_path))
        code, summary, _ = run_cli(capsys, "simulate", "--a", "-1", "--b", "0",
                                   "--c", "0", "--x0", "1", "--t-end", "2")
        assert code == 0
        assert os.path.dirname(summary["output"]) == str(tmp_path)
        assert os.path.exists(summary["output"])


class TestKbmBifurcateMelnikov:
    def test_kbm_compare_columns(self, tmp_path, capsys):
        out = tmp_path / "kbm.csv"
        code, summary, _ = run_cli(capsys, "kbm", "--a", "-1", "--b", "2", "--c", "1",
                                   "--delta", "0.025", "--gamma", "0.01",
                                   "--omega", "0.1", "--x0", "0.25", "--t-end", "30",
                                   "--compare", "--out", str(out))
        assert code == 0
        _, header, rows = read_csv(str(out))
        assert header == ["t", "x_approx", "x_reference"]
        assert summary["max_error_vs_reference"] < 0.02

    def test_bifurcate_long_format(self, tmp_path, capsys):
        out = tmp_path / "bif.csv"
        code, summary, _ = run_cli(capsys, "bifurcate", "--a", "1", "--b", "1", "--c", "0",
                                   "--delta", "0.1", "--omega", "1.4",
                                   "--gamma-min", "0.2", "--gamma-max", "0.25",
                                   "--gamma-steps", "3", "--points", "20",
                                   "--transient", "60", "--out", str(out))
        assert code == 0
        _, header, rows = read_csv(str(out))
        assert header == ["gamma", "p_value"]
        assert len(rows) == 60

    def test_melnikov_json(self, tmp_path, capsys):
        out = tmp_path / "mel.json"
        code, summary, _ = run_cli(capsys, "melnikov", "--a", "1", "--b", "1",
                                   "--c", "0.2", "--delta", "0.1", "--gamma", "0.35",
                                   "--omega", "1.4", "--out", str(out))
        assert code == 0
        doc = json.loads(out.read_text())
        assert doc["has_simple_zeros"] is True
        assert 0.05 < float(doc["critical_gamma"]) < 0.35
