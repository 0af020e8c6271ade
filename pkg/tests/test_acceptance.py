"""Acceptance gate: one test per criterion, each printing a PASS line.

The heavy scenarios run through the harness exactly as shipped in configs/,
so the artifacts checked here are the artifacts users regenerate.  Run with
``pytest tests/test_acceptance.py -v -s`` to see the per-criterion lines.
"""

import os
import time

import numpy as np
import pytest

from aggflow.config import load_config
from aggflow.dynamics import SolverConfig, run_linear
from aggflow.flows import FlowSpec, build_flow
from aggflow.harness import run_experiment
from aggflow.initial import InitialSpec, make_initial_data
from aggflow.kernels import apply_kernel_spectral, build_ks_kernel
from aggflow.lp import commutator_check, equivalence_ratio_bounds, lp_norm_equivalence, lp_reconstruct
from aggflow.runio import read_csv_columns
from aggflow.spectral import (
    Field,
    MultiplierConvention,
    SpectralField,
    apply_lambda,
    divergence,
    forward,
    inverse,
    make_grid,
    sobolev_norm,
)

PAPER = MultiplierConvention.PAPER_LAMBDA

CONFIG_DIR = os.path.join(os.path.dirname(__file__), os.pardir, "configs")

# growth-bound constant of the transport criterion, frozen at build time from
# the measured slope/velocity-norm ratios (max observed 1.56; margin ~1.6x)
C_IMPL = 2.5

# dyadic norm-equivalence bracket at sigma = 0.75, frozen from the exact
# per-radius scan (0.405 .. 1.454) with a slim margin
EQUIV_BRACKET = (0.40, 1.46)

WORKERS = int(os.environ.get("AGGFLOW_THREADS", "3"))

# the winding flow family shared by the suppression and relaxation scenarios
TCT = FlowSpec(
    family="time_changed_translation", q_coeffs=(0.45, 0.45), q_phases=(0.0, 1.3)
)


def cfg_path(name: str) -> str:
    return os.path.join(CONFIG_DIR, name)


def run_config(name: str, outdir: str, workers: int = 1) -> dict:
    cfg = load_config(cfg_path(name))
    return run_experiment(cfg, outdir=outdir, workers=workers)


def read_manifest(path: str) -> dict:
    entries = {}
    with open(path) as fh:
        for line in fh:
            key, _, value = line.partition(" = ")
            entries[key.strip()] = value.strip()
    return entries


def floats(cols, name):
    return np.array([float(s) for s in cols[name]])


@pytest.fixture(scope="module")
def outroot(tmp_path_factory):
    return tmp_path_factory.mktemp("acceptance")


@pytest.fixture(scope="module")
def blowup_outputs(outroot):
    names = ["blowup_hi.cfg", "blowup_lo.cfg", "blowup_hi_n128.cfg", "blowup_lo_n128.cfg"]
    start = time.perf_counter()
    paths = {
        name: run_config(name, str(outroot / name.replace(".cfg", "")))
        for name in names
    }
    return paths, time.perf_counter() - start


@pytest.fixture(scope="module")
def suppression_outputs(outroot):
    start = time.perf_counter()
    paths = run_config("suppression.cfg", str(outroot / "suppression"), workers=WORKERS)
    return paths, time.perf_counter() - start


@pytest.fixture(scope="module")
def ks_outputs(outroot):
    return run_config("ks_suppression.cfg", str(outroot / "ks_suppression"),
                      workers=WORKERS)


@pytest.fixture(scope="module")
def transport_outputs(outroot):
    names = ["transport_shear.cfg", "transport_tct_a.cfg", "transport_tct_b.cfg"]
    return {
        name: run_config(name, str(outroot / name.replace(".cfg", "")))
        for name in names
    }


def test_criterion_01_spectral_identities():
    g = make_grid(2, 32)
    rng = np.random.default_rng(101)
    for case in range(100):
        f = Field(g, rng.standard_normal(g.shape))
        h = Field(g, rng.standard_normal(g.shape))
        s1, s2 = rng.uniform(-0.5, 2.0, size=2)
        F = forward(f)
        # semigroup composition
        combined = apply_lambda(apply_lambda(F, s1, PAPER), s2, PAPER)
        direct = apply_lambda(F, s1 + s2, PAPER)
        scale = np.max(np.abs(direct.coeffs))
        assert np.max(np.abs(combined.coeffs - direct.coeffs)) <= 1e-12 * scale
        # self-adjointness
        sigma = float(rng.uniform(0.2, 1.8))
        lf = inverse(apply_lambda(F, sigma, PAPER))
        lh = inverse(apply_lambda(forward(h), sigma, PAPER))
        a = np.mean(f.values * lh.values)
        b = np.mean(lf.values * h.values)
        assert abs(a - b) <= 1e-12 * max(1.0, abs(a), abs(b))
        # Sobolev norm equals the L2 norm of the fractional derivative
        n1 = sobolev_norm(f, sigma, homogeneous=True)
        n2 = float(np.sqrt(np.mean(lf.values**2)))
        assert abs(n1 - n2) <= 1e-12 * max(1.0, n1)
    print("[criterion 01] PASS - semigroup, self-adjointness, norm identity on 100 fields")


@pytest.mark.parametrize("gamma", [1.2, 1.5, 2.0])
def test_criterion_02_fractional_heat_exactness(gamma):
    g = make_grid(2, 32)
    mu0 = make_initial_data(
        InitialSpec(kind="random_band_limited", seed=202, band=8, amplitude=1.0), g
    )
    cfg = SolverConfig(gamma=gamma, convention=PAPER, dt_init=1e-3, horizon=1.0,
                       record_every=10**6)
    rec = run_linear(mu0, None, 0.0, cfg)
    tT = rec.samples[-1].t
    c0 = forward(mu0).coeffs
    cT = forward(rec.final_field).coeffs
    kabs = np.sqrt(sum(km.astype(float) ** 2 for km in g.wavenumber_mesh()))
    decay = np.exp(-(kabs**gamma) * tT)
    decay.flat[0] = 1.0
    expected = c0 * decay
    # modes that decayed below ~1e-9 of the spectrum peak sit at the float64
    # transform noise floor and carry no information
    active = np.abs(expected) > 1e-9 * np.max(np.abs(c0))
    assert np.count_nonzero(active) > 40
    rel = np.abs(cT[active] - expected[active]) / np.abs(expected[active])
    assert np.max(rel) < 1e-8
    print(f"[criterion 02] PASS - gamma={gamma}: {np.count_nonzero(active)} modes, "
          f"worst relative error {np.max(rel):.2e}")


def test_criterion_03_conservation_and_positivity(blowup_outputs, suppression_outputs,
                                                  ks_outputs, transport_outputs):
    # mean conservation on every regression series produced in this session
    series_paths = []
    for paths in blowup_outputs[0].values():
        series_paths.append(paths["series"])
    for paths in (suppression_outputs[0], ks_outputs):
        series_paths.extend(p for k, p in paths.items() if k.startswith("series_A"))
    for paths in transport_outputs.values():
        series_paths.append(paths["series"])
    assert len(series_paths) >= 13
    for path in series_paths:
        cols = read_csv_columns(path)
        mean = floats(cols, "mean")
        assert np.max(np.abs(mean - mean[0])) <= 1e-10 * (1.0 + abs(mean[0])), path

    # the maximum-principle monitor applies to resolved density evolution:
    # diffusion-dominated runs must satisfy it throughout; collapse runs on
    # every sample that is still spectrally resolved (tail <= 1e-5).  The
    # strongly stirred sweep runs under-resolve the filaments at this grid
    # and carry the documented under-resolution flag instead.
    peak = {
        "blowup_lo.cfg": _initial_peak(1.0),
        "blowup_lo_n128.cfg": _initial_peak(1.0),
        "blowup_hi.cfg": _initial_peak(2.0),
        "blowup_hi_n128.cfg": _initial_peak(2.0),
    }
    checked = 0
    for name, artifacts in blowup_outputs[0].items():
        cols = read_csv_columns(artifacts["series"])
        min_vals = floats(cols, "min")
        tails = floats(cols, "tail_frac")
        tol = -1e-6 * peak[name]
        if "_lo" in name:
            assert np.min(min_vals) >= tol, name
            manifest = read_manifest(artifacts["manifest"])
            assert "positivity_violation" not in manifest.get("flags", ""), name
        else:
            resolved = tails <= 1e-5
            assert np.count_nonzero(resolved) >= 2, name
            assert np.min(min_vals[resolved]) >= tol, name
        checked += 1
    assert checked == 4
    print(f"[criterion 03] PASS - mean drift <= 1e-10 on {len(series_paths)} runs, "
          f"positivity on the 4 resolved density runs")


_PEAK_CACHE = {}


def _initial_peak(mass: float) -> float:
    """Max of the collapse-scenario initial datum (grid-independent node at 0)."""
    if mass not in _PEAK_CACHE:
        grid = make_grid(2, 64)
        f = make_initial_data(InitialSpec(kind="gaussian_bump", mass=mass, width=0.1), grid)
        _PEAK_CACHE[mass] = float(np.max(f.values))
    return _PEAK_CACHE[mass]


def test_criterion_04_littlewood_paley_suite():
    g = make_grid(2, 64)
    rng = np.random.default_rng(404)
    # partition of unity
    worst = 0.0
    for case in range(10):
        f = Field(g, rng.standard_normal(g.shape))
        rec = lp_reconstruct(f)
        worst = max(worst, float(np.max(np.abs(rec.values - f.values))
                                 / max(1.0, np.max(np.abs(f.values)))))
    assert worst < 1e-12
    # commutator inequality on a 100-case alias-free corpus
    violations = 0
    for case in range(100):
        gf = make_initial_data(
            InitialSpec(kind="random_band_limited", seed=7000 + case, band=8,
                        amplitude=1.0), g)
        ff = make_initial_data(
            InitialSpec(kind="random_band_limited", seed=8000 + case, band=20,
                        amplitude=1.0), g)
        k = int(rng.integers(0, 6))
        lhs, rhs = commutator_check(gf, ff, k)
        if lhs > rhs:
            violations += 1
    assert violations == 0
    # norm equivalence within the frozen bracket
    lo, hi = equivalence_ratio_bounds(0.75, np.sqrt(2) * 64)
    assert EQUIV_BRACKET[0] <= lo <= hi <= EQUIV_BRACKET[1]
    for case in range(10):
        f = make_initial_data(
            InitialSpec(kind="random_band_limited", seed=9000 + case, band=20,
                        amplitude=1.0), g)
        lhs, rhs = lp_norm_equivalence(f, 0.75)
        assert EQUIV_BRACKET[0] <= lhs / rhs <= EQUIV_BRACKET[1]
    print(f"[criterion 04] PASS - reconstruction {worst:.1e}, 100/100 commutator cases, "
          f"ratio bracket [{EQUIV_BRACKET[0]}, {EQUIV_BRACKET[1]}]")


def test_criterion_05_blowup_reproduction(blowup_outputs):
    paths, elapsed = blowup_outputs
    outcomes = {}
    for name, artifact in paths.items():
        manifest = read_manifest(artifact["manifest"])
        outcomes[name] = manifest["outcome"]
    assert outcomes["blowup_hi.cfg"] == "blowup"
    assert outcomes["blowup_hi_n128.cfg"] == "blowup"
    assert outcomes["blowup_lo.cfg"] == "global"
    assert outcomes["blowup_lo_n128.cfg"] == "global"
    # second moment strictly decreasing on the final recorded quarter
    for name in ("blowup_hi.cfg", "blowup_hi_n128.cfg"):
        cols = read_csv_columns(paths[name]["series"])
        mom = floats(cols, "moment2")
        tail = mom[len(mom) - max(2, len(mom) // 4):]
        assert np.all(np.diff(tail) < 0.0), name
    assert elapsed < 300.0
    print(f"[criterion 05] PASS - classification stable 64->128, moment decreasing, "
          f"{elapsed:.0f}s < 300s")


def test_criterion_06_suppression_bracket(suppression_outputs):
    paths, elapsed = suppression_outputs
    manifest = read_manifest(paths["manifest"])
    a_low = float(manifest["bracket_A_low"])
    a_high = float(manifest["bracket_A_high"])
    assert a_low < a_high
    cols = read_csv_columns(paths["summary"])
    status = dict(zip(floats(cols, "A"), cols["outcome"]))
    assert status[a_low] == "blowup"
    assert status[a_high] == "global"
    assert status[0.0] == "blowup"
    assert elapsed < 1200.0
    print(f"[criterion 06] PASS - bracket ({a_low}, {a_high}) recorded, "
          f"{elapsed:.0f}s < 1200s")


def test_criterion_07_enhanced_relaxation():
    g = make_grid(2, 64)
    x, y = g.node_mesh()
    flow = build_flow(TCT, g)
    cfg = SolverConfig(gamma=1.5, convention=PAPER, dt_init=1e-3, cfl=0.7,
                       horizon=0.5, integrator="etd_rk4", record_every=10**6)
    mu0 = Field(g, np.cos(2 * np.pi * x))
    ratios = []
    for A in (0.0, 50.0, 200.0, 800.0):
        rec = run_linear(mu0, flow, A, cfg)
        l2 = rec.series("l2_dist")
        ratios.append(float(l2[-1] / l2[0]))
    assert all(b < a for a, b in zip(ratios, ratios[1:])), ratios
    # eigenfunction obstruction: a shear cannot act on its invariant profile
    shear = build_flow(FlowSpec(family="shear"), g)
    mu_y = Field(g, np.cos(2 * np.pi * y))
    shear_ratios = []
    for A in (0.0, 50.0, 200.0, 800.0):
        rec = run_linear(mu_y, shear, A, cfg)
        l2 = rec.series("l2_dist")
        shear_ratios.append(float(l2[-1] / l2[0]))
    assert max(shear_ratios) - min(shear_ratios) < 1e-8
    print(f"[criterion 07] PASS - ratios {['%.4f' % r for r in ratios]} strictly "
          f"decreasing; shear spread {max(shear_ratios) - min(shear_ratios):.1e}")


def test_criterion_08_transport_bound(transport_outputs):
    for name, artifact in transport_outputs.items():
        manifest = read_manifest(artifact["manifest"])
        slope = float(manifest["fitted_log_slope"])
        vnorm = float(manifest["velocity_sobolev_norm"])
        loss = float(manifest["filter_loss"])
        assert vnorm > 0.0, name
        assert slope <= C_IMPL * vnorm, (name, slope, vnorm)
        assert loss <= 1e-4, name
        assert "resolution_limited" not in manifest.get("flags", "")
    print(f"[criterion 08] PASS - 3 flows within slope <= {C_IMPL} * |v| and "
          f"filter loss <= 1e-4")


def test_criterion_09_keller_segel_mode(ks_outputs):
    # exact Newtonian identity in coefficient space
    g = make_grid(2, 64)
    ks = build_ks_kernel(g)
    rng = np.random.default_rng(909)
    rho_hat = forward(Field(g, rng.standard_normal(g.shape))).coeffs
    div = divergence([SpectralField(g, c) for c in apply_kernel_spectral(ks, rho_hat)])
    target = rho_hat.copy()
    target.flat[0] = 0.0
    assert np.max(np.abs(div.coeffs - target)) < 1e-12
    # supercritical classical run: collapse at rest, survival when stirred
    manifest = read_manifest(ks_outputs["manifest"])
    a_low = float(manifest["bracket_A_low"])
    a_high = float(manifest["bracket_A_high"])
    assert a_low < a_high
    cols = read_csv_columns(ks_outputs["summary"])
    status = dict(zip(floats(cols, "A"), cols["outcome"]))
    assert status[0.0] == "blowup"
    assert status[max(status)] == "global"
    print(f"[criterion 09] PASS - Newtonian identity exact; bracket ({a_low}, {a_high})")


def test_criterion_10_determinism(outroot):
    names = ["blowup_hi.cfg", "transport_shear.cfg", "relax_tct.cfg",
             "determinism_sweep.cfg"]
    for name in names:
        first = run_config(name, str(outroot / f"det_a_{name}"))
        second = run_config(name, str(outroot / f"det_b_{name}"))
        assert set(first) == set(second)
        for key in first:
            a = open(first[key], "rb").read()
            b = open(second[key], "rb").read()
            assert a == b, f"{name}:{key} differs between reruns"
    print(f"[criterion 10] PASS - byte-identical artifacts for {len(names)} configs")
