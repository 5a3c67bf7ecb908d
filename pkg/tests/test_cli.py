"""Command-line interface: subcommands, exit codes, determinism, sweep."""

import numpy as np

import aggdiff as ad
from aggdiff.cli import (
    EXIT_BLOWUP,
    EXIT_CHECK_FAILED,
    EXIT_CONFIG,
    EXIT_OK,
    EXIT_USAGE,
    cli_main,
)

QUICK_TOML = """
[grid]
M = 64
L = 1.0

[species]
N = 2
D = [1.0, 1.0]
H = [[0.0, -2.0], [-2.0, 0.0]]

[kernel]
family = "von_mises"
parameter = 3.225

[initial_condition]
means = [1.0, 1.0]
perturbation_amplitude = 0.01
perturbation_max_mode = 8
seed = 42

[integrator]
dt = 1e-3
t_end = 1.5
snapshot_every = 0.05
check_every = 0.01

[output]
directory = "{out}"
format = "{fmt}"
"""


def write_quick_config(tmp_path, fmt="csv", name="run.toml", **overrides):
    out = tmp_path / "out"
    text = QUICK_TOML.format(out=str(out).replace("\\", "/"), fmt=fmt)
    for old, new in overrides.items():
        text = text.replace(old, new)
    path = tmp_path / name
    path.write_text(text)
    return path, out


class TestRunCommand:
    def test_run_writes_record_and_report(self, tmp_path, capsys):
        cfg_path, out = write_quick_config(tmp_path)
        code = cli_main(["run", str(cfg_path)])
        assert code == EXIT_OK
        assert (out / "record.csv").exists()
        assert (out / "report.csv").exists()
        lines = (out / "report.csv").read_text().splitlines()
        assert lines[0].startswith("run_id,classification")
        assert "stationary_pattern" in lines[1]

    def test_refuses_overwrite_without_force(self, tmp_path):
        cfg_path, _ = write_quick_config(tmp_path)
        assert cli_main(["run", str(cfg_path)]) == EXIT_OK
        assert cli_main(["run", str(cfg_path)]) == EXIT_CONFIG
        assert cli_main(["run", str(cfg_path), "--force"]) == EXIT_OK

    def test_blowup_exits_2_with_partial_output(self, tmp_path):
        cfg_path, out = write_quick_config(
            tmp_path,
            **{"parameter = 3.225": "parameter = 41.01",
               "H = [[0.0, -2.0], [-2.0, 0.0]]": "H = [[8.0, 0.0], [0.0, 8.0]]",
               "D = [1.0, 1.0]": "D = [0.05, 0.05]",
               "dt = 1e-3": "dt = 1.0",
               "t_end = 1.5": "t_end = 100.0",
               "snapshot_every = 0.05": "snapshot_every = 1.0",
               "check_every = 0.01": "check_every = 1.0",
               "perturbation_amplitude = 0.01": "perturbation_amplitude = 0.05"})
        code = cli_main(["run", str(cfg_path)])
        assert code == EXIT_BLOWUP
        assert (out / "record.csv").exists()  # partial diagnostics saved

    def test_config_errors_exit_65(self, tmp_path):
        cfg_path, _ = write_quick_config(tmp_path, **{"M = 64": "M = 63"})
        assert cli_main(["run", str(cfg_path)]) == EXIT_CONFIG

    def test_seed_override(self, tmp_path):
        cfg_path, out = write_quick_config(tmp_path, fmt="binary")
        assert cli_main(["run", str(cfg_path), "--seed", "7"]) == EXIT_OK
        rec = ad.read_record(out / "record.bin")
        assert rec.seed == 7

    def test_emit_spectra(self, tmp_path):
        cfg_path, out = write_quick_config(
            tmp_path, **{'format = "csv"': 'format = "csv"\nemit_spectra = true'})
        assert cli_main(["run", str(cfg_path)]) == EXIT_OK
        spectra = (out / "spectra.csv").read_text().splitlines()
        assert spectra[0] == "species_index,mode,re,im"
        assert len(spectra) == 1 + 2 * 64


class TestUsageErrors:
    def test_unknown_flag_exits_64(self, tmp_path, capsys):
        cfg_path, _ = write_quick_config(tmp_path)
        assert cli_main(["run", str(cfg_path), "--frobnicate"]) == EXIT_USAGE

    def test_unknown_subcommand_exits_64(self):
        assert cli_main(["transmogrify"]) == EXIT_USAGE

    def test_missing_required_exits_64(self):
        assert cli_main(["kernel", "vonmises"]) == EXIT_USAGE


class TestKernelCommand:
    def test_prints_parameter_for_sigma(self, capsys):
        assert cli_main(["kernel", "vonmises", "--sigma", "0.1"]) == EXIT_OK
        out = capsys.readouterr().out
        token = out.split()[-1]
        assert token.startswith("a=")
        a = float(token.split("=")[1])
        assert abs(a - 3.225) / 3.225 < 0.01

    def test_prints_samples(self, capsys):
        assert cli_main(["kernel", "tophat", "--sigma", "0.05", "--grid-m", "64",
                         "--samples"]) == EXIT_OK
        lines = capsys.readouterr().out.splitlines()
        assert "gamma=" in lines[0]
        samples = np.array([float(v) for v in lines[1:]])
        assert len(samples) == 64
        assert abs(samples.sum() / 64 - 1.0) < 1e-10  # dx * sum = 1

    def test_out_of_range_sigma_exits_65(self, capsys):
        assert cli_main(["kernel", "vonmises", "--sigma", "0.9"]) == EXIT_CONFIG


class TestCheckCommand:
    def test_check_passes_on_solver_output(self, tmp_path, capsys):
        cfg_path, out = write_quick_config(tmp_path)
        assert cli_main(["run", str(cfg_path)]) == EXIT_OK
        assert cli_main(["check", str(out / "record.csv")]) == EXIT_OK
        assert "ok" in capsys.readouterr().out

    def test_check_fails_on_tampered_record(self, tmp_path):
        from aggdiff.records import SimulationRecord
        frames = np.ones((2, 1, 8))
        frames[1] *= 1.5  # 50% mass jump between frames
        rec = SimulationRecord(M=8, L=1.0, N=1, times=[0.0, 1.0], frames=frames)
        path = tmp_path / "bad.bin"
        ad.write_record(rec, path, "binary")
        assert cli_main(["check", str(path)]) == EXIT_CHECK_FAILED


class TestDeterminism:
    def test_identical_config_seed_bitwise_identical_binary_records(self, tmp_path):
        cfg_path, out = write_quick_config(tmp_path, fmt="binary")
        assert cli_main(["run", str(cfg_path)]) == EXIT_OK
        first = (out / "record.bin").read_bytes()
        assert cli_main(["run", str(cfg_path), "--force"]) == EXIT_OK
        second = (out / "record.bin").read_bytes()
        assert first == second


class TestSweepCommand:
    def test_sweep_over_seeds(self, tmp_path):
        cfg_path, out = write_quick_config(tmp_path)
        code = cli_main(["sweep", str(cfg_path), "--vary",
                         "initial_condition.seed=1,2,3"])
        assert code == EXIT_OK
        report = (out / "sweep_report.csv").read_text().splitlines()
        assert len(report) == 4
        for seed in (1, 2, 3):
            sub = out / f"initial_condition.seed={seed}"
            assert (sub / "record.csv").exists()
            assert (sub / "report.csv").exists()

    def test_sweep_results_independent_of_workers(self, tmp_path):
        cfg_a, out_a = write_quick_config(tmp_path, name="a.toml")
        code = cli_main(["sweep", str(cfg_a), "--vary",
                         "initial_condition.seed=5,6", "--threads", "1",
                         "--output", str(tmp_path / "serial")])
        assert code == EXIT_OK
        code = cli_main(["sweep", str(cfg_a), "--vary",
                         "initial_condition.seed=5,6", "--threads", "2",
                         "--output", str(tmp_path / "parallel")])
        assert code == EXIT_OK
        for seed in (5, 6):
            a = ad.read_record(tmp_path / "serial" / f"initial_condition.seed={seed}" / "record.csv")
            b = ad.read_record(tmp_path / "parallel" / f"initial_condition.seed={seed}" / "record.csv")
            assert np.array_equal(a.frames, b.frames)
        ra = (tmp_path / "serial" / "sweep_report.csv").read_text()
        rb = (tmp_path / "parallel" / "sweep_report.csv").read_text()
        assert ra == rb

    def test_unsupported_sweep_key(self, tmp_path):
        cfg_path, _ = write_quick_config(tmp_path)
        assert cli_main(["sweep", str(cfg_path), "--vary", "grid.M=32,64"]) == EXIT_CONFIG

    def test_thread_env_default(self, tmp_path, monkeypatch):
        monkeypatch.setenv("AGGDIFF_THREADS", "2")
        cfg_path, out = write_quick_config(tmp_path)
        assert cli_main(["sweep", str(cfg_path), "--vary",
                         "initial_condition.seed=9,10"]) == EXIT_OK
        assert (out / "sweep_report.csv").exists()
