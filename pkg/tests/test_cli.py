import os
import subprocess
import sys

import pytest

from compnoma import cli
from compnoma.experiments import FIELDNAMES, read_csv


def run(capsys, *argv):
    code = cli.main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def test_capacity_b2_perfect_rows(capsys):
    code, out, _ = run(capsys, "capacity", "--preset", "b2", "--csi", "perfect", "--samples", "2000")
    assert code == 0
    lines = out.splitlines()[2:]
    for method in ("analytic", "monte-carlo"):
        users = [ln.split()[1] for ln in lines if ln.split()[0] == method]
        assert users == ["CCU-1", "CCU-2", "CEU", "SUM"]


def test_capacity_csv_output(capsys):
    code, out, _ = run(capsys, "capacity", "--preset", "b3", "--method", "analytic", "--csv",
                       "--scheme", "OMA", "--sigma2-eps", "0.01")
    rows = read_csv(out)
    assert code == 0 and len(rows) == 5
    assert all(r.scheme == "OMA" and r.case == "NA" and r.sigma2_eps == 0.01 for r in rows)


def test_variance_exhausted_exit(capsys):
    code, _, err = run(capsys, "capacity", "--preset", "b3", "--sigma2-eps", "0.2", "--method", "analytic")
    assert code != 0
    assert "variance exhausted" in err and "BS-3 -> CCU-1" in err


def test_power_split_exit(capsys):
    code, _, err = run(capsys, "capacity", "--alpha", "0.3", "--beta", "0.8", "--method", "analytic")
    assert code != 0 and "alpha + beta must equal 1" in err


def test_config_file_with_overrides(tmp_path, capsys):
    cfg = tmp_path / "run.cfg"
    cfg.write_text(
        "# four-cell layout\n"
        "bs_positions = 0,0; 2,0; 2,2; 0,2\n"
        "ccu_positions = 0.45,0.37; 1.52,0.55; 1.43,1.41; 0.61,1.53\n"
        "ceu_position = 1.03,0.91\n"
        "rho_db = 10\n"
        "method = analytic\n"
    )
    code, out, _ = run(capsys, "capacity", "--config", str(cfg), "--rho-db", "25", "--csv")
    rows = read_csv(out)
    assert code == 0
    assert rows[0].preset == "custom" and rows[0].B == 4 and rows[0].rho_dB == pytest.approx(25.0)


def test_config_errors(tmp_path, capsys):
    cfg = tmp_path / "bad.cfg"
    cfg.write_text("colour = blue\n")
    code, _, err = run(capsys, "capacity", "--config", str(cfg))
    assert code != 0 and "unknown key" in err


def test_ideal_sic_toggle(capsys):
    _, out, _ = run(capsys, "capacity", "--method", "analytic", "--ideal-sic", "--csv")
    assert read_csv(out)[0].upsilon_dB == float("-inf")


def test_parse_values():
    assert cli.parse_values("0:30:5") == [0, 5, 10, 15, 20, 25, 30]
    assert cli.parse_values("0.5,0.9") == [0.5, 0.9]


def test_sweep_custom_to_file(tmp_path, capsys):
    out = tmp_path / "s.csv"
    code, _, _ = run(capsys, "sweep", "--preset", "b2", "--axis", "sigma2_eps", "--values", "0,0.01",
                     "--method", "analytic", "--users", "CCU-1,CEU", "--out", str(out))
    assert code == 0
    lines = out.read_text().splitlines()
    assert lines[0].startswith("# ") and "version=" in lines[0] and "seed=" in lines[0]
    assert lines[1] == ",".join(FIELDNAMES)
    assert len(lines) == 2 + 2 * 2


def test_sweep_empty_values(capsys):
    code, _, err = run(capsys, "sweep", "--axis", "rho_dB", "--values", "", "--method", "analytic")
    assert code != 0 and "nonempty" in err


def test_sweep_abort_leaves_no_file(tmp_path, capsys):
    out = tmp_path / "s.csv"
    code, _, err = run(capsys, "sweep", "--preset", "b3", "--axis", "sigma2_eps", "--values", "0,0.2",
                       "--method", "analytic", "--out", str(out))
    assert code != 0 and "variance exhausted" in err
    assert os.listdir(tmp_path) == []


def test_sweep_figure_preset_stdout(capsys):
    code, out, _ = run(capsys, "sweep", "--preset", "fig7", "--method", "analytic")
    rows = read_csv(out)
    assert code == 0
    assert {r.user for r in rows} == {"CCU-1", "CEU"}
    assert len(rows) == 2 * 6 * 2


def test_validate_quick(capsys):
    code, out, _ = run(capsys, "validate", "--grid", "quick", "--samples", "50000")
    assert code == 0 and out.strip().endswith("PASS")


def test_validate_corrupted_fails(capsys):
    code, out, _ = run(capsys, "validate", "--grid", "quick", "--samples", "50000",
                       "--corrupt-upsilon-db", "-15")
    assert code != 0 and out.strip().endswith("FAIL")


def test_pdf_check(capsys):
    code, out, _ = run(capsys, "pdf-check", "--ks-samples", "20000")
    assert code == 0 and "b3 CEU numerator KS statistic" in out


def test_console_script_seed_env(tmp_path):
    env = dict(os.environ, COMPNOMA_SEED="99")
    res = subprocess.run([sys.executable, "-m", "compnoma.cli", "capacity", "--samples", "1000",
                          "--method", "monte-carlo", "--csv"], capture_output=True, text=True, env=env)
    assert res.returncode == 0
    assert {r.seed for r in read_csv(res.stdout)} == {99}
