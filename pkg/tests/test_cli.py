"""Command-line interface: subcommands, outputs and exit codes."""

import numpy as np
import pytest

from zns.cli import main
from zns.harness import TRIAD_COLUMNS
from zns.lattice import read_snapshot

TINY_CONFIG = """
# small benchmark setup
n1 = 16
n2 = 16
mu = 1.0
epsilon = 0.2, 0.1
h = 0.01
t_spin = 10.0
t_end = 12.0
seed = 3
omega0_norm = 0.5
forcing.kind = steady
forcing.mode = 0,1,1.0,0.0
forcing.mode = 1,1,0.5,0.0
"""


@pytest.fixture
def config_file(tmp_path):
    path = tmp_path / "bench.cfg"
    path.write_text(TINY_CONFIG)
    return path


class TestTriadCheck:
    def test_scan_passes_and_writes_csv(self, tmp_path, capsys):
        out = tmp_path / "triads"
        assert main(["triad-check", "--max-k", "6", "--out", str(out)]) == 0
        lines = (out / "triads.csv").read_text().splitlines()
        assert lines[0] == ",".join(TRIAD_COLUMNS)
        residuals = [float(l.split(",")[-1]) for l in lines[1:]]
        assert max(residuals) < 1e-10 * (2 * np.pi) ** 2
        assert "max residual" in capsys.readouterr().out


class TestSimulate:
    def test_missing_config_exits_1(self, tmp_path, capsys):
        code = main(["simulate", "--config", str(tmp_path / "missing.cfg")])
        assert code == 1
        assert "error" in capsys.readouterr().err

    def test_bad_key_exits_1(self, tmp_path, capsys):
        path = tmp_path / "bad.cfg"
        path.write_text("nope = 3\n")
        assert main(["simulate", "--config", str(path)]) == 1

    def test_run_and_resume(self, config_file, tmp_path):
        out1 = tmp_path / "run1"
        assert main([
            "simulate", "--config", str(config_file), "--out", str(out1),
            "--quiet",
        ]) == 0
        assert (out1 / "diagnostics.csv").exists()
        snap = out1 / "state_final.zns"
        w, eps, mu, t = read_snapshot(snap)
        assert t == pytest.approx(12.0)
        out2 = tmp_path / "run2"
        assert main([
            "simulate", "--config", str(config_file), "--out", str(out2),
            "--resume", str(snap), "--quiet",
        ]) == 0

    def test_blowup_exits_2(self, tmp_path, capsys):
        path = tmp_path / "explode.cfg"
        path.write_text(TINY_CONFIG + "blowup_threshold = 1e-6\n")
        code = main(["simulate", "--config", str(path), "--out", str(tmp_path / "x")])
        assert code == 2
        assert "BLOW-UP" in capsys.readouterr().err


class TestSweep:
    def test_summary_table_and_exit_zero(self, config_file, tmp_path, capsys):
        out = tmp_path / "sweep"
        code = main(["sweep-epsilon", "--config", str(config_file), "--out", str(out)])
        assert code == 0
        text = (out / "summary.csv").read_text().splitlines()
        assert text[0] == "epsilon,sup_fast_sq,ratio,sup_fast_h1_sq,ratio_h1,slope,slope_h1"
        assert len(text) == 3
        assert "slope" in capsys.readouterr().out

    def test_resolution_override(self, config_file, tmp_path):
        out = tmp_path / "sweep8"
        code = main([
            "sweep-epsilon", "--config", str(config_file), "--out", str(out),
            "--resolution", "8", "--quiet",
        ])
        assert code == 0


class TestContraction:
    def test_violation_exit_3(self, tmp_path, capsys):
        path = tmp_path / "strict.cfg"
        path.write_text(
            TINY_CONFIG.replace("epsilon = 0.2, 0.1", "epsilon = 0.05")
            .replace("t_end = 12.0", "t_end = 14.0")
            + "record_every = 5\ntol.rate_factor = 50.0\n"
        )
        code = main(["contraction", "--config", str(path), "--out", str(tmp_path / "c"),
                     "--quiet"])
        assert code == 3
        assert "THEOREM-VIOLATION" in capsys.readouterr().err
        assert (tmp_path / "c" / "contraction.csv").exists()


class TestSteadyResidual:
    def test_runs_clean(self, tmp_path, capsys):
        path = tmp_path / "steady.cfg"
        path.write_text(TINY_CONFIG.replace("t_end = 12.0", "t_end = 28.0"))
        code = main(["steady-residual", "--config", str(path), "--quiet"])
        assert code == 0


class TestAgmon:
    def test_small_ensemble_ok(self, capsys):
        code = main(["agmon-check", "--samples", "5", "--resolution", "16",
                     "--constant", "1.0"])
        assert code == 0

    def test_tiny_constant_exit_3(self, capsys):
        code = main(["agmon-check", "--samples", "3", "--resolution", "16",
                     "--constant", "1e-9", "--quiet"])
        assert code == 3
        assert "PROPERTY-VIOLATION" in capsys.readouterr().err
