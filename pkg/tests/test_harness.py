"""Initial data, config parsing, experiment artifacts, reproducibility."""

import os

import numpy as np
import pytest

from aggflow.config import ConfigError, load_config, parse_config
from aggflow.harness import run_experiment
from aggflow.initial import InitialSpec, make_initial_data
from aggflow.runio import read_csv_columns
from aggflow.spectral import make_grid

MINIMAL_RUN = """
[experiment]
kind = run

[grid]
dim = 2
n = 32

[kernel]
kind = keller_segel

[solver]
gamma = 2.0
dt_init = 1e-3
horizon = 0.01
record_every = 2

[initial]
kind = gaussian_bump
mass = 1.0
width = 0.15

[output]
dir = out/minimal
"""


class TestInitialData:
    def test_constant(self):
        g = make_grid(2, 16)
        f = make_initial_data(InitialSpec(kind="constant", value=2.5), g)
        assert np.all(f.values == 2.5)

    def test_gaussian_mass_exact(self):
        g = make_grid(2, 128)
        f = make_initial_data(InitialSpec(kind="gaussian_bump", mass=10.0, width=0.05), g)
        assert np.min(f.values) >= 0.0
        assert abs(np.mean(f.values) - 10.0) <= 1e-10 * 10.0

    def test_gaussian_off_center(self):
        g = make_grid(2, 64)
        f = make_initial_data(
            InitialSpec(kind="gaussian_bump", mass=1.0, width=0.1, center=(0.25, -0.25)), g
        )
        idx = np.unravel_index(np.argmax(f.values), f.values.shape)
        x, y = g.node_mesh()
        assert abs(x[idx] - 0.25) <= g.h and abs(y[idx] + 0.25) <= g.h

    def test_gaussian_periodization_continuity(self):
        # a wide bump must wrap smoothly across the box boundary
        g = make_grid(2, 64)
        f = make_initial_data(InitialSpec(kind="gaussian_bump", mass=1.0, width=0.12), g)
        edge = np.abs(f.values[0, :] - f.values[-1, :])
        assert np.max(edge) < 0.1 * np.max(f.values)

    def test_random_band_limited_deterministic(self):
        g = make_grid(2, 64)
        spec = InitialSpec(kind="random_band_limited", seed=9, band=5, amplitude=2.0)
        a = make_initial_data(spec, g)
        b = make_initial_data(spec, g)
        assert np.array_equal(a.values, b.values)
        assert abs(np.sqrt(np.mean(a.values**2)) - 2.0) < 1e-12
        assert abs(np.mean(a.values)) < 1e-13

    def test_random_band_limited_seed_sensitivity(self):
        g = make_grid(2, 32)
        a = make_initial_data(InitialSpec(kind="random_band_limited", seed=1, band=4), g)
        b = make_initial_data(InitialSpec(kind="random_band_limited", seed=2, band=4), g)
        assert not np.array_equal(a.values, b.values)

    def test_unresolved_width_rejected(self):
        g = make_grid(2, 16)
        with pytest.raises(ValueError):
            make_initial_data(InitialSpec(kind="gaussian_bump", mass=1.0, width=0.05), g)


class TestConfigParsing:
    def test_minimal_round_trip(self):
        cfg = parse_config(MINIMAL_RUN)
        assert cfg.kind == "run"
        assert cfg.grid.n == 32
        assert cfg.kernel_kind == "keller_segel"
        assert cfg.solver.gamma == 2.0
        assert cfg.initial.mass == 1.0
        assert cfg.outdir == "out/minimal"

    def test_unknown_key_is_error(self):
        bad = MINIMAL_RUN.replace("mass = 1.0", "mass = 1.0\nwobble = 3")
        with pytest.raises(ConfigError) as err:
            parse_config(bad)
        assert "wobble" in str(err.value)

    def test_unknown_section_is_error(self):
        with pytest.raises(ConfigError) as err:
            parse_config(MINIMAL_RUN + "\n[mystery]\nx = 1\n")
        assert "mystery" in str(err.value)

    def test_type_error_names_key(self):
        bad = MINIMAL_RUN.replace("gamma = 2.0", "gamma = fast")
        with pytest.raises(ConfigError) as err:
            parse_config(bad)
        assert "[solver] gamma" in str(err.value)

    def test_missing_required_key(self):
        bad = MINIMAL_RUN.replace("dim = 2\n", "")
        with pytest.raises(ConfigError) as err:
            parse_config(bad)
        assert "[grid] dim" in str(err.value)

    def test_kind_override_mismatch(self):
        with pytest.raises(ConfigError):
            parse_config(MINIMAL_RUN, kind_override="relax")

    def test_missing_file(self):
        with pytest.raises(ConfigError) as err:
            load_config("/nonexistent/path.cfg")
        assert "/nonexistent/path.cfg" in str(err.value)

    def test_sweep_requires_amplitudes(self):
        bad = MINIMAL_RUN.replace("kind = run", "kind = sweep_A")
        with pytest.raises(ConfigError) as err:
            parse_config(bad)
        assert "[sweep] amplitudes" in str(err.value)


class TestRunExperiment:
    def test_run_artifacts(self, tmp_path):
        cfg = parse_config(MINIMAL_RUN)
        paths = run_experiment(cfg, outdir=str(tmp_path / "out"))
        assert set(paths) == {"series", "manifest"}
        cols = read_csv_columns(paths["series"])
        assert list(cols) == [
            "t", "mean", "min", "l2_dist", "hgamma2", "moment2",
            "annular_mass", "crit_r2", "crit_r4", "dt", "tail_frac",
        ]
        manifest = open(paths["manifest"]).read()
        assert "multiplier_convention = laplacian_consistent" in manifest
        assert "dealias_rule = 2/3" in manifest
        assert "outcome = global" in manifest

    def test_constant_run_rows_constant(self, tmp_path):
        text = MINIMAL_RUN.replace("kind = gaussian_bump", "kind = constant") \
                          .replace("mass = 1.0", "value = 2.0") \
                          .replace("width = 0.15", "")
        cfg = parse_config(text)
        paths = run_experiment(cfg, outdir=str(tmp_path / "out"))
        cols = read_csv_columns(paths["series"])
        assert len(set(cols["l2_dist"])) == 1
        assert len(set(cols["mean"])) == 1

    def test_terminal_dump_inside_outdir(self, tmp_path):
        text = MINIMAL_RUN + "\ndump_terminal = true\n"
        # dump_terminal lives in [output]; append within that section
        text = MINIMAL_RUN.replace("dir = out/minimal", "dir = out/minimal\ndump_terminal = true")
        cfg = parse_config(text)
        out = str(tmp_path / "artifacts")
        paths = run_experiment(cfg, outdir=out)
        assert "terminal" in paths
        for p in paths.values():
            assert os.path.abspath(p).startswith(os.path.abspath(out))

    def test_byte_identical_reruns(self, tmp_path):
        cfg = parse_config(MINIMAL_RUN)
        a = run_experiment(cfg, outdir=str(tmp_path / "a"))
        b = run_experiment(cfg, outdir=str(tmp_path / "b"))
        for key in a:
            assert open(a[key], "rb").read() == open(b[key], "rb").read()

    def test_sweep_summary_complete(self, tmp_path):
        text = MINIMAL_RUN.replace("kind = run", "kind = sweep_A") + (
            "\n[sweep]\namplitudes = 0, 10\n"
        )
        text = text.replace("[flow]", "")  # no flow section yet; add one
        text += "\n[flow]\nfamily = time_changed_translation\nq_coeffs = 0.3\nq_phases = 0.0\n"
        cfg = parse_config(text)
        paths = run_experiment(cfg, outdir=str(tmp_path / "sweep"))
        cols = read_csv_columns(paths["summary"])
        assert cols["A"] == ["0.0", "10.0"]
        assert all(status in ("global", "blowup") for status in cols["outcome"])

    def test_relax_rows(self, tmp_path):
        text = """
[experiment]
kind = relax

[grid]
dim = 2
n = 32

[flow]
family = time_changed_translation
q_coeffs = 0.4
q_phases = 0.2

[solver]
gamma = 1.5
convention = paper_lambda
dt_init = 1e-3
cfl = 0.7
integrator = etd_rk4
horizon = 1.0

[initial]
kind = random_band_limited
band = 3

[relax]
amplitudes = 0, 10
tau = 0.05

[output]
dir = out/relax
"""
        cfg = parse_config(text)
        paths = run_experiment(cfg, outdir=str(tmp_path / "relax"))
        cols = read_csv_columns(paths["relax"])
        assert cols["A"] == ["0.0", "10.0"]
        ratios = [float(s) for s in cols["ratio"]]
        assert all(0.0 < r < 1.0 for r in ratios)

    def test_kernel_check_power(self, tmp_path):
        text = """
[experiment]
kind = kernel_check

[grid]
dim = 2
n = 32

[kernel]
kind = power
a = 0.0
eps = 0.2

[output]
dir = out/kc
"""
        cfg = parse_config(text)
        paths = run_experiment(cfg, outdir=str(tmp_path / "kc"))
        report = open(paths["report"]).read()
        assert "FAIL" not in report
        assert "refinement" in report

    def test_kernel_check_newtonian(self, tmp_path):
        text = """
[experiment]
kind = kernel_check

[grid]
dim = 2
n = 32

[kernel]
kind = keller_segel

[output]
dir = out/kc
"""
        cfg = parse_config(text)
        paths = run_experiment(cfg, outdir=str(tmp_path / "kc"))
        report = open(paths["report"]).read()
        assert "PASS newtonian_identity" in report

    def test_lp_check_report(self, tmp_path):
        text = """
[experiment]
kind = lp_check

[grid]
dim = 2
n = 32

[lp]
cases = 10

[output]
dir = out/lp
"""
        cfg = parse_config(text)
        paths = run_experiment(cfg, outdir=str(tmp_path / "lp"))
        report = open(paths["report"]).read()
        assert report.count("PASS") == 3
        assert "FAIL" not in report
