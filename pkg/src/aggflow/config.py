"""Experiment configuration: a strict sectioned key=value format.

Unknown sections or keys are errors; every validation message names the
offending section and key so sweeps stay reviewable in diffs.
"""

from __future__ import annotations

import configparser
import os
from dataclasses import dataclass, field

from .dynamics import SolverConfig
from .flows import FlowSpec
from .initial import InitialSpec
from .spectral import Grid, MultiplierConvention, make_grid

__all__ = ["ConfigError", "ExperimentConfig", "parse_config", "load_config"]

EXPERIMENT_KINDS = (
    "run",
    "sweep_A",
    "relax",
    "transport_bound",
    "lp_check",
    "kernel_check",
)


class ConfigError(ValueError):
    """Configuration problem; the message names the offending key."""


def _parse_bool(text: str) -> bool:
    lowered = text.strip().lower()
    if lowered in ("1", "true", "yes", "on"):
        return True
    if lowered in ("0", "false", "no", "off"):
        return False
    raise ValueError(f"expected a boolean, got {text!r}")


def _parse_float_list(text: str) -> tuple:
    items = [part.strip() for part in text.split(",") if part.strip()]
    return tuple(float(part) for part in items)


_SCHEMA = {
    "experiment": {
        "kind": str,
        "seed": int,
        "A": float,
    },
    "grid": {
        "dim": int,
        "n": int,
    },
    "kernel": {
        "kind": str,
        "a": float,
        "eps": float,
    },
    "flow": {
        "family": str,
        "alpha": float,
        "q_coeffs": _parse_float_list,
        "q_phases": _parse_float_list,
        "shear_sin": _parse_float_list,
        "shear_cos": _parse_float_list,
        "amplitude": float,
        "path": str,
    },
    "solver": {
        "gamma": float,
        "convention": str,
        "dt_init": float,
        "cfl": float,
        "dt_floor": float,
        "blowup_l2_factor": float,
        "horizon": float,
        "integrator": str,
        "record_every": int,
        "moment_b": float,
    },
    "initial": {
        "kind": str,
        "value": float,
        "mass": float,
        "width": float,
        "center": _parse_float_list,
        "band": int,
        "amplitude": float,
        "path": str,
    },
    "sweep": {
        "amplitudes": _parse_float_list,
    },
    "relax": {
        "amplitudes": _parse_float_list,
        "tau": float,
    },
    "lp": {
        "cases": int,
        "sigma": float,
    },
    "output": {
        "dir": str,
        "dump_terminal": _parse_bool,
    },
}


@dataclass
class ExperimentConfig:
    kind: str
    seed: int
    amplitude_A: float
    grid: Grid | None
    kernel_kind: str
    kernel_a: float
    kernel_eps: float
    flow: FlowSpec
    solver: SolverConfig | None
    initial: InitialSpec | None
    sweep_amplitudes: tuple
    relax_amplitudes: tuple
    relax_tau: float
    lp_cases: int
    lp_sigma: float
    outdir: str
    dump_terminal: bool
    raw_items: tuple = field(default_factory=tuple)  # (section, key, value) echo


def _typed(section: str, key: str, text: str):
    parser = _SCHEMA[section][key]
    try:
        return parser(text)
    except ValueError as exc:
        raise ConfigError(f"[{section}] {key}: {exc}") from exc


def parse_config(text: str, kind_override: str | None = None) -> ExperimentConfig:
    cp = configparser.ConfigParser(
        interpolation=None, inline_comment_prefixes=("#",), strict=True
    )
    cp.optionxform = str  # keys are case-sensitive (A is an amplitude)
    try:
        cp.read_string(text)
    except configparser.Error as exc:
        raise ConfigError(f"config syntax error: {exc}") from exc

    values: dict = {}
    raw_items = []
    for section in cp.sections():
        if section not in _SCHEMA:
            raise ConfigError(f"unknown section [{section}]")
        for key, raw in cp.items(section):
            if key not in _SCHEMA[section]:
                raise ConfigError(f"[{section}] {key}: unknown key")
            values[(section, key)] = _typed(section, key, raw)
            raw_items.append((section, key, raw.strip()))

    def get(section, key, default=None, required=False):
        if (section, key) in values:
            return values[(section, key)]
        if required:
            raise ConfigError(f"[{section}] {key}: required key is missing")
        return default

    kind = get("experiment", "kind", default=kind_override)
    if kind is None:
        raise ConfigError("[experiment] kind: required key is missing")
    if kind_override is not None and kind != kind_override:
        raise ConfigError(
            f"[experiment] kind: config says {kind!r} but the subcommand expects {kind_override!r}"
        )
    if kind not in EXPERIMENT_KINDS:
        raise ConfigError(f"[experiment] kind: unknown experiment kind {kind!r}")

    seed = get("experiment", "seed", default=0)
    amplitude_A = get("experiment", "A", default=0.0)

    dim = get("grid", "dim", required=True)
    n = get("grid", "n", required=True)
    try:
        grid = make_grid(dim, n)
    except ValueError as exc:
        raise ConfigError(f"[grid] {exc}") from exc

    kernel_kind = get("kernel", "kind", default="none")
    if kernel_kind not in ("power", "keller_segel", "none"):
        raise ConfigError(f"[kernel] kind: unknown kernel kind {kernel_kind!r}")
    kernel_a = get("kernel", "a", default=0.0)
    kernel_eps = get("kernel", "eps", default=0.2)

    try:
        flow = FlowSpec(
            family=get("flow", "family", default="zero"),
            amplitude=get("flow", "amplitude", default=1.0),
            alpha=get("flow", "alpha", default=FlowSpec.__dataclass_fields__["alpha"].default),
            q_coeffs=get("flow", "q_coeffs", default=()),
            q_phases=get("flow", "q_phases", default=()),
            shear_sin=get("flow", "shear_sin", default=(1.0,)),
            shear_cos=get("flow", "shear_cos", default=()),
            path=get("flow", "path", default=""),
        )
    except ValueError as exc:
        raise ConfigError(f"[flow] {exc}") from exc

    solver = None
    needs_solver = kind in ("run", "sweep_A", "relax", "transport_bound")
    if needs_solver or ("solver", "gamma") in values:
        try:
            solver = SolverConfig(
                gamma=get("solver", "gamma", required=needs_solver, default=1.5),
                convention=MultiplierConvention.parse(
                    get("solver", "convention", default="laplacian_consistent")
                ),
                dt_init=get("solver", "dt_init", default=1e-3),
                cfl=get("solver", "cfl", default=0.4),
                dt_floor=get("solver", "dt_floor", default=1e-9),
                blowup_l2_factor=get("solver", "blowup_l2_factor", default=1e6),
                horizon=get("solver", "horizon", default=1.0),
                integrator=get("solver", "integrator", default="etd2"),
                record_every=get("solver", "record_every", default=1),
                moment_b=get("solver", "moment_b", default=0.1),
            )
        except ValueError as exc:
            raise ConfigError(f"[solver] {exc}") from exc

    initial = None
    needs_initial = kind in ("run", "sweep_A", "relax", "transport_bound")
    if needs_initial or ("initial", "kind") in values:
        try:
            initial = InitialSpec(
                kind=get("initial", "kind", required=needs_initial, default="constant"),
                value=get("initial", "value", default=1.0),
                mass=get("initial", "mass", default=1.0),
                width=get("initial", "width", default=0.05),
                center=get("initial", "center", default=()),
                seed=seed,
                band=get("initial", "band", default=4),
                amplitude=get("initial", "amplitude", default=1.0),
                path=get("initial", "path", default=""),
            )
        except ValueError as exc:
            raise ConfigError(f"[initial] {exc}") from exc

    sweep_amplitudes = get("sweep", "amplitudes", default=())
    if kind == "sweep_A" and not sweep_amplitudes:
        raise ConfigError("[sweep] amplitudes: required key is missing")

    relax_amplitudes = get("relax", "amplitudes", default=())
    relax_tau = get("relax", "tau", default=0.5)
    if kind == "relax" and not relax_amplitudes:
        raise ConfigError("[relax] amplitudes: required key is missing")
    if relax_tau <= 0.0:
        raise ConfigError("[relax] tau: must be positive")

    return ExperimentConfig(
        kind=kind,
        seed=seed,
        amplitude_A=amplitude_A,
        grid=grid,
        kernel_kind=kernel_kind,
        kernel_a=kernel_a,
        kernel_eps=kernel_eps,
        flow=flow,
        solver=solver,
        initial=initial,
        sweep_amplitudes=sweep_amplitudes,
        relax_amplitudes=relax_amplitudes,
        relax_tau=relax_tau,
        lp_cases=get("lp", "cases", default=100),
        lp_sigma=get("lp", "sigma", default=0.75),
        outdir=get("output", "dir", default="out"),
        dump_terminal=get("output", "dump_terminal", default=False),
        raw_items=tuple(raw_items),
    )


def load_config(path: str, kind_override: str | None = None) -> ExperimentConfig:
    if not os.path.exists(path):
        raise ConfigError(f"config file not found: {path}")
    with open(path) as fh:
        return parse_config(fh.read(), kind_override)
