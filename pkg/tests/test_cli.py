import os

import pytest

from aqrmsim.cli import main
from aqrmsim.sweep import COLUMNS


def run(capsys, *argv):
    code = main(list(argv))
    captured = capsys.readouterr()
    return code, captured.out, captured.err


def test_spectrum_command(capsys):
    code, out, _ = run(capsys, "spectrum", "--g", "0.3", "--r", "0", "--levels", "3")
    assert code == 0
    lines = out.strip().splitlines()
    assert lines[1] == "level,energy,parity"
    energies = [float(l.split(",")[1]) for l in lines[2:]]
    assert energies == pytest.approx([-0.5, 0.2, 0.8], abs=1e-10)


def test_g2_command_near_crossing(capsys):
    code, out, _ = run(capsys, "g2", "--r", "0.5", "--g", "1.1547")
    assert code == 0
    header, row = out.strip().splitlines()
    assert header == ",".join(COLUMNS)
    cells = dict(zip(COLUMNS, row.split(",")))
    assert float(cells["gap10"]) < 1e-3
    assert float(cells["g2_dressed"]) > 1e2


def test_rates_command(capsys):
    code, out, _ = run(capsys, "rates", "--g", "0.5", "--r", "0.3", "--levels", "6")
    assert code == 0
    lines = out.strip().splitlines()
    assert lines[0] == "j,k,gap,gamma_q,gamma_c"
    assert len(lines) > 1
    for line in lines[1:]:
        j, k, gap, gq, gc = line.split(",")
        assert int(j) < int(k)
        assert float(gap) > 0


def test_crossings_command_empty_at_r1(capsys):
    code, out, _ = run(capsys, "crossings", "--r", "1", "--g", "0..3")
    assert code == 0
    assert out.strip().splitlines() == ["n,g_c,parity_before,parity_after"]


def test_crossings_command_r05(capsys):
    code, out, _ = run(capsys, "crossings", "--r", "0.5", "--g", "1.0..1.3")
    assert code == 0
    lines = out.strip().splitlines()
    assert len(lines) == 2
    g_c = float(lines[1].split(",")[1])
    assert g_c == pytest.approx(1.1547005, abs=1e-4)


def test_crossings_requires_range(capsys):
    code, _, err = run(capsys, "crossings", "--r", "0.5", "--g", "1.0")
    assert code == 1
    assert "--g" in err


def test_unknown_flag_is_error(capsys):
    code, _, err = run(capsys, "g2", "--bogus", "1")
    assert code == 1
    assert "bogus" in err


def test_unknown_subcommand(capsys):
    code, _, _ = run(capsys, "frobnicate")
    assert code == 1


def test_sweep_command_writes_file(tmp_path, capsys):
    out_file = tmp_path / "mini.csv"
    code, out, _ = run(
        capsys, "sweep", "--g-axis", "0.2:0.8:3", "--r-axis", "0.1:0.3:2",
        "--out", str(out_file),
    )
    assert code == 0
    lines = out_file.read_text().splitlines()
    assert lines[0] == ",".join(COLUMNS)
    assert len(lines) == 7


def test_sweep_needs_axes_or_preset(capsys):
    code, _, err = run(capsys, "sweep")
    assert code == 1
    assert "preset" in err


def test_sweep_jsonl_format(tmp_path, capsys):
    out_file = tmp_path / "mini.jsonl"
    code, _, _ = run(
        capsys, "sweep", "--g-axis", "0.2:0.8:2", "--format", "jsonl",
        "--out", str(out_file),
    )
    assert code == 0
    assert out_file.exists()


def test_config_file_merging(tmp_path, capsys):
    cfg = tmp_path / "run.cfg"
    cfg.write_text("g = 0.3\nr = 0\nlevels = 3\n")
    code, out, _ = run(capsys, "spectrum", "--config", str(cfg))
    assert code == 0
    energies = [float(l.split(",")[1]) for l in out.strip().splitlines()[2:]]
    assert energies == pytest.approx([-0.5, 0.2, 0.8], abs=1e-10)
    # explicit flag beats the file
    code, out, _ = run(capsys, "spectrum", "--config", str(cfg), "--g", "0.1")
    energies = [float(l.split(",")[1]) for l in out.strip().splitlines()[2:]]
    assert energies == pytest.approx([-0.5, 0.4, 0.6], abs=1e-10)


def test_config_file_unknown_key(tmp_path, capsys):
    cfg = tmp_path / "bad.cfg"
    cfg.write_text("quux = 1\n")
    code, _, err = run(capsys, "spectrum", "--config", str(cfg))
    assert code == 1
    assert "quux" in err


def test_out_dir_env_var(tmp_path, capsys, monkeypatch):
    monkeypatch.setenv("AQRMSIM_OUT_DIR", str(tmp_path))
    code, _, _ = run(capsys, "sweep", "--g-axis", "0.2:0.8:2")
    assert code == 0
    assert (tmp_path / "sweep.csv").exists()


def test_numerical_failure_exit_code(capsys):
    # an impossible tolerance under a tiny cap cannot converge
    code, _, err = run(
        capsys, "spectrum", "--g", "2", "--r", "0.9",
        "--tol-e", "1e-30", "--nmax-cap", "60",
    )
    assert code == 2
    assert "converge" in err.lower()


def test_identical_invocations_identical_output(capsys):
    _, out1, _ = run(capsys, "g2", "--r", "0.4", "--g", "0.9")
    _, out2, _ = run(capsys, "g2", "--r", "0.4", "--g", "0.9")
    assert out1 == out2


def test_selfcheck(capsys):
    code, out, _ = run(capsys, "selfcheck")
    assert code == 0
    lines = out.strip().splitlines()
    assert len(lines) == 3
    assert all(line.startswith("PASS") for line in lines)
