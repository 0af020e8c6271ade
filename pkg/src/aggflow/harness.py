"""Experiment orchestration: build, run, persist.

Every experiment writes a manifest echoing the configuration (plus code
version, backend, multiplier convention and dealiasing rule) and one or more
CSVs with a stable schema.  Re-running the same config with the same seed and
worker count reproduces all numeric output byte for byte.
"""

from __future__ import annotations

import math
import os

import numpy as np

from . import __version__
from ._accel import BACKEND_NAME
from .config import ExperimentConfig
from .diagnostics import criticality_report
from .dynamics import (
    SolverConfig,
    fit_log_slope,
    find_threshold_amplitude,
    run_linear,
    run_nonlinear,
    run_transport,
)
from .flows import build_flow, save_field_table
from .initial import InitialSpec, make_initial_data
from .kernels import build_ks_kernel, build_power_kernel, save_kernel
from .lp import (
    commutator_check,
    equivalence_ratio_bounds,
    lp_norm_equivalence,
    lp_reconstruct,
)
from .runio import fmt, write_manifest, write_relax_csv, write_series_csv, write_summary_csv
from .spectral import Field, forward, make_grid, sobolev_norm

__all__ = ["run_experiment", "make_initial_data"]


def _build_kernel(cfg: ExperimentConfig):
    if cfg.kernel_kind == "none":
        return None
    if cfg.kernel_kind == "keller_segel":
        return build_ks_kernel(cfg.grid)
    return build_power_kernel(cfg.grid, cfg.kernel_a, cfg.kernel_eps)


def _manifest_entries(cfg: ExperimentConfig, extra) -> list:
    entries = [
        ("aggflow_version", __version__),
        ("backend", BACKEND_NAME),
        ("dealias_rule", "2/3"),
        ("experiment_kind", cfg.kind),
        ("experiment_seed", str(cfg.seed)),
    ]
    if cfg.solver is not None:
        entries.append(("multiplier_convention", cfg.solver.convention.value))
    for section, key, value in cfg.raw_items:
        entries.append((f"config.{section}.{key}", value))
    entries.extend(extra)
    return entries


def _summary_row(A: float, record) -> tuple:
    l2 = record.series("l2_dist")
    outcome = record.outcome
    t_value = outcome.t_star if outcome.is_blowup else record.config.horizon
    return (A, outcome.status, t_value, float(l2[-1]), float(np.max(l2)))


def run_experiment(cfg: ExperimentConfig, outdir: str | None = None,
                   workers: int = 1, log=None) -> dict:
    """Execute one experiment; returns {artifact name: path}."""
    if log is None:
        def log(msg):
            pass
    outdir = outdir or cfg.outdir
    os.makedirs(outdir, exist_ok=True)
    dispatch = {
        "run": _experiment_run,
        "sweep_A": _experiment_sweep,
        "relax": _experiment_relax,
        "transport_bound": _experiment_transport,
        "lp_check": _experiment_lp_check,
        "kernel_check": _experiment_kernel_check,
    }
    return dispatch[cfg.kind](cfg, outdir, workers, log)


def _experiment_run(cfg: ExperimentConfig, outdir, workers, log) -> dict:
    kernel = _build_kernel(cfg)
    flow = build_flow(cfg.flow, cfg.grid)
    rho0 = make_initial_data(cfg.initial, cfg.grid)
    record = run_nonlinear(rho0, flow, cfg.amplitude_A, kernel, cfg.solver)
    log(f"run: outcome={record.outcome.status} t_star={record.outcome.t_star}")
    series_path = os.path.join(outdir, "series.csv")
    write_series_csv(series_path, record.samples)
    crit = criticality_report(cfg.kernel_a if kernel is not None else 0.0,
                              cfg.solver.gamma, 2.0, cfg.grid.dim)
    extra = [
        ("outcome", record.outcome.status),
        ("t_star", fmt(record.outcome.t_star)),
        ("trigger", record.outcome.trigger),
        ("flags", ";".join(record.flags)),
        ("criticality_label", crit.label),
        ("gamma_c", fmt(crit.gamma_c)),
    ]
    paths = {"series": series_path}
    if cfg.dump_terminal and record.final_field is not None:
        dump_path = os.path.join(outdir, "terminal.field")
        save_field_table(dump_path, [record.final_field.values], cfg.grid)
        paths["terminal"] = dump_path
    manifest_path = os.path.join(outdir, "manifest.txt")
    write_manifest(manifest_path, _manifest_entries(cfg, extra))
    paths["manifest"] = manifest_path
    return paths


def _experiment_sweep(cfg: ExperimentConfig, outdir, workers, log) -> dict:
    kernel = _build_kernel(cfg)
    flow = build_flow(cfg.flow, cfg.grid)
    rho0 = make_initial_data(cfg.initial, cfg.grid)
    result = find_threshold_amplitude(
        rho0, flow, kernel, cfg.solver, cfg.sweep_amplitudes,
        workers=workers,
        progress=lambda A, rec: log(
            f"sweep: A={A} outcome={rec.outcome.status} t_star={rec.outcome.t_star}"
        ),
    )
    rows = []
    paths = {}
    for A, record in result.records:
        rows.append(_summary_row(A, record))
        series_path = os.path.join(outdir, f"series_A{fmt(A)}.csv")
        write_series_csv(series_path, record.samples)
        paths[f"series_A{fmt(A)}"] = series_path
    summary_path = os.path.join(outdir, "summary.csv")
    write_summary_csv(summary_path, rows)
    paths["summary"] = summary_path
    extra = [
        ("all_global", str(result.all_global)),
        ("all_blowup", str(result.all_blowup)),
        ("monotone", str(result.monotone)),
        ("bracket_A_low", fmt(result.bracket[0]) if result.bracket else "none"),
        ("bracket_A_high", fmt(result.bracket[1]) if result.bracket else "none"),
    ]
    manifest_path = os.path.join(outdir, "manifest.txt")
    write_manifest(manifest_path, _manifest_entries(cfg, extra))
    paths["manifest"] = manifest_path
    return paths


def _experiment_relax(cfg: ExperimentConfig, outdir, workers, log) -> dict:
    flow = build_flow(cfg.flow, cfg.grid)
    mu0 = make_initial_data(cfg.initial, cfg.grid)
    tau = cfg.relax_tau
    solver = SolverConfig(
        gamma=cfg.solver.gamma,
        convention=cfg.solver.convention,
        dt_init=cfg.solver.dt_init,
        cfl=cfg.solver.cfl,
        dt_floor=cfg.solver.dt_floor,
        blowup_l2_factor=cfg.solver.blowup_l2_factor,
        horizon=tau,
        integrator=cfg.solver.integrator,
        record_every=cfg.solver.record_every,
        moment_b=cfg.solver.moment_b,
    )
    rows = []
    for A in cfg.relax_amplitudes:
        record = run_linear(mu0, flow, A, solver)
        l2 = record.series("l2_dist")
        ratio = float(l2[-1] / l2[0]) if l2[0] > 0 else math.nan
        rows.append((A, tau, ratio, float(l2[0]), float(l2[-1])))
        log(f"relax: A={A} ratio={ratio}")
    relax_path = os.path.join(outdir, "relax.csv")
    write_relax_csv(relax_path, rows)
    manifest_path = os.path.join(outdir, "manifest.txt")
    write_manifest(manifest_path, _manifest_entries(cfg, [("tau", fmt(tau))]))
    return {"relax": relax_path, "manifest": manifest_path}


def transport_velocity_norm(flow_field, gamma: float) -> float:
    """Sobolev norm of the velocity at the order entering the growth bound."""
    sigma = gamma / 2.0 + flow_field.grid.dim / 2.0 + 1.0
    total = 0.0
    for comp in flow_field.components:
        total += sobolev_norm(Field(flow_field.grid, comp), sigma, homogeneous=True) ** 2
    return math.sqrt(total)


def _experiment_transport(cfg: ExperimentConfig, outdir, workers, log) -> dict:
    flow = build_flow(cfg.flow, cfg.grid)
    eta0 = make_initial_data(cfg.initial, cfg.grid)
    record = run_transport(eta0, flow, cfg.solver)
    t = record.series("t")
    hnorm = record.series("hgamma2")
    slope = fit_log_slope(t, hnorm)
    vnorm = transport_velocity_norm(flow, cfg.solver.gamma)
    l2 = record.series("l2_dist")
    mean = record.series("mean")
    full = np.sqrt(l2**2 + mean**2)
    loss = abs(full[-1] - full[0]) / full[0] if full[0] > 0 else 0.0
    log(f"transport: slope={slope} vnorm={vnorm} filter_loss={loss}")
    series_path = os.path.join(outdir, "series.csv")
    write_series_csv(series_path, record.samples)
    extra = [
        ("fitted_log_slope", fmt(slope)),
        ("velocity_sobolev_norm", fmt(vnorm)),
        ("filter_loss", fmt(loss)),
        ("flags", ";".join(record.flags)),
    ]
    manifest_path = os.path.join(outdir, "manifest.txt")
    write_manifest(manifest_path, _manifest_entries(cfg, extra))
    return {"series": series_path, "manifest": manifest_path}


def _experiment_lp_check(cfg: ExperimentConfig, outdir, workers, log) -> dict:
    grid = cfg.grid
    rng_seed = cfg.seed
    cases = cfg.lp_cases
    sigma = cfg.lp_sigma
    lines = []
    ok = True

    # partition of unity on random fields
    worst = 0.0
    for case in range(8):
        f = make_initial_data(
            InitialSpec(kind="random_band_limited", seed=rng_seed + case,
                        band=max(2, grid.n // 4), amplitude=1.0),
            grid,
        )
        rec = lp_reconstruct(f)
        worst = max(worst, float(np.max(np.abs(rec.values - f.values))))
    passed = worst < 1e-12
    ok &= passed
    lines.append(f"{'PASS' if passed else 'FAIL'} partition_of_unity max_error={worst!r}")

    # commutator inequality corpus
    rng = np.random.default_rng(rng_seed)
    violations = 0
    checked = 0
    margin = math.inf
    bw_g = max(2, grid.n // 8)
    bw_f = max(2, grid.n // 4)
    for case in range(cases):
        g = make_initial_data(
            InitialSpec(kind="random_band_limited", seed=rng_seed + 1000 + case,
                        band=bw_g, amplitude=1.0), grid)
        f = make_initial_data(
            InitialSpec(kind="random_band_limited", seed=rng_seed + 2000 + case,
                        band=bw_f, amplitude=1.0), grid)
        k = int(rng.integers(0, 6))
        lhs, rhs = commutator_check(g, f, k)
        checked += 1
        if lhs > rhs:
            violations += 1
        if rhs > 0:
            margin = min(margin, rhs - lhs)
    passed = violations == 0
    ok &= passed
    lines.append(
        f"{'PASS' if passed else 'FAIL'} commutator_inequality cases={checked} "
        f"violations={violations} min_margin={margin!r}"
    )

    # norm equivalence against the exact per-radius bounds
    lo, hi = equivalence_ratio_bounds(sigma, math.sqrt(grid.dim) * grid.n / 2.0)
    worst_lo, worst_hi = math.inf, 0.0
    for case in range(8):
        f = make_initial_data(
            InitialSpec(kind="random_band_limited", seed=rng_seed + 3000 + case,
                        band=max(2, grid.n // 4), amplitude=1.0), grid)
        lhs, rhs = lp_norm_equivalence(f, sigma)
        ratio = lhs / rhs
        worst_lo = min(worst_lo, ratio)
        worst_hi = max(worst_hi, ratio)
    passed = (worst_lo >= lo * (1 - 1e-9)) and (worst_hi <= hi * (1 + 1e-9))
    ok &= passed
    lines.append(
        f"{'PASS' if passed else 'FAIL'} norm_equivalence sigma={sigma!r} "
        f"measured=[{worst_lo!r},{worst_hi!r}] bounds=[{lo!r},{hi!r}]"
    )

    report_path = os.path.join(outdir, "report.txt")
    with open(report_path, "w") as fh:
        fh.write("\n".join(lines) + "\n")
    manifest_path = os.path.join(outdir, "manifest.txt")
    write_manifest(manifest_path, _manifest_entries(cfg, [("passed", str(ok))]))
    for line in lines:
        log(line)
    if not ok:
        raise RuntimeError(f"lp_check failed; see {report_path}")
    return {"report": report_path, "manifest": manifest_path}


def _experiment_kernel_check(cfg: ExperimentConfig, outdir, workers, log) -> dict:
    if cfg.kernel_kind == "none":
        from .config import ConfigError

        raise ConfigError("[kernel] kind: kernel_check needs a kernel (got 'none')")
    lines = []
    ok = True
    grid = cfg.grid

    if cfg.kernel_kind == "keller_segel":
        from .kernels import apply_kernel
        from .spectral import divergence as spectral_div

        ks = build_ks_kernel(grid)
        f = make_initial_data(
            InitialSpec(kind="random_band_limited", seed=cfg.seed, band=grid.n // 4,
                        amplitude=1.0), grid)
        drift = apply_kernel(ks, f)
        div = spectral_div([forward(comp) for comp in drift])
        target = forward(f).coeffs.copy()
        target.flat[0] = 0.0
        err = float(np.max(np.abs(div.coeffs - target)))
        passed = err < 1e-12
        ok &= passed
        lines.append(f"{'PASS' if passed else 'FAIL'} newtonian_identity max_coeff_error={err!r}")
    else:
        from .kernels import apply_kernel

        errors = []
        resolutions = [grid.n, 2 * grid.n]
        fine_n = 4 * grid.n
        fine_grid = make_grid(grid.dim, fine_n)
        probe_width = max(0.1, 4.0 / grid.n)
        bump_spec = InitialSpec(kind="gaussian_bump", mass=1.0, width=probe_width)
        fine_kernel = build_power_kernel(fine_grid, cfg.kernel_a, cfg.kernel_eps)
        fine_rho = make_initial_data(bump_spec, fine_grid)
        fine_out = apply_kernel(fine_kernel, fine_rho)
        for n in resolutions:
            coarse_grid = make_grid(grid.dim, n)
            kern = build_power_kernel(coarse_grid, cfg.kernel_a, cfg.kernel_eps)
            rho = make_initial_data(bump_spec, coarse_grid)
            out = apply_kernel(kern, rho)
            err_sq = 0.0
            for comp_coarse, comp_fine in zip(out, fine_out):
                coarse_up = _spectral_upsample(comp_coarse, fine_grid)
                diff = coarse_up.values - comp_fine.values
                err_sq += float(np.mean(diff * diff))
            errors.append(math.sqrt(err_sq))
        factor = errors[0] / errors[1] if errors[1] > 0 else math.inf
        passed = factor >= 2.0
        ok &= passed
        lines.append(
            f"{'PASS' if passed else 'FAIL'} refinement factor={factor!r} "
            f"errors={[repr(e) for e in errors]}"
        )

        kern = build_power_kernel(grid, cfg.kernel_a, cfg.kernel_eps)
        from .spectral import SpectralField, inverse

        odd_err = 0.0
        scale = 0.0
        for comp in kern.components:
            vals = inverse(SpectralField(grid, comp)).values
            flipped = _point_reflect(vals)
            odd_err = max(odd_err, float(np.max(np.abs(vals + flipped))))
            scale = max(scale, float(np.max(np.abs(vals))))
        passed = odd_err < 1e-10 * scale
        ok &= passed
        lines.append(f"{'PASS' if passed else 'FAIL'} oddness error={odd_err!r} scale={scale!r}")

        zero_modes = max(abs(complex(comp.flat[0])) for comp in kern.components)
        passed = zero_modes == 0.0
        ok &= passed
        lines.append(f"{'PASS' if passed else 'FAIL'} zero_mean max|khat(0)|={zero_modes!r}")

        kernel_path = os.path.join(outdir, "kernel.txt")
        save_kernel(kern, kernel_path)

    report_path = os.path.join(outdir, "report.txt")
    with open(report_path, "w") as fh:
        fh.write("\n".join(lines) + "\n")
    manifest_path = os.path.join(outdir, "manifest.txt")
    write_manifest(manifest_path, _manifest_entries(cfg, [("passed", str(ok))]))
    for line in lines:
        log(line)
    if not ok:
        raise RuntimeError(f"kernel_check failed; see {report_path}")
    return {"report": report_path, "manifest": manifest_path}


def _point_reflect(vals: np.ndarray) -> np.ndarray:
    """Values at -x for node-sampled data (node set is reflection-symmetric)."""
    out = vals
    for axis in range(vals.ndim):
        out = np.flip(np.roll(out, -1, axis=axis), axis=axis)
    return out


def _spectral_upsample(f: Field, fine_grid) -> Field:
    """Zero-pad the spectrum of f onto a finer grid (exact for trig polys)."""
    coarse = forward(f)
    n_c = f.grid.n
    n_f = fine_grid.n
    if n_f == n_c:
        return f
    coeffs_f = np.zeros(fine_grid.shape, dtype=np.complex128)
    idx_c = np.fft.fftfreq(n_c) * n_c
    idx_c = np.rint(idx_c).astype(int)
    slicer_src = tuple(np.ix_(*([np.arange(n_c)] * f.grid.dim)))
    # map each coarse index to the fine array position with the same wavenumber
    pos = [np.where(idx_c >= 0, idx_c, n_f + idx_c) for _ in range(f.grid.dim)]
    dest = np.ix_(*pos)
    coeffs_f[dest] = coarse.coeffs[slicer_src]
    from .spectral import SpectralField, inverse as spectral_inverse

    return spectral_inverse(SpectralField(fine_grid, coeffs_f))
