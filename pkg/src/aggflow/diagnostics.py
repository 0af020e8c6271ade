"""Scalar observables recorded along a run and scaling/criticality reports."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .lp import plateau_profile
from .spectral import Field, Grid, _arrays

__all__ = [
    "CSV_COLUMNS",
    "DiagnosticsRow",
    "second_moment",
    "annular_mass",
    "criticality_report",
    "CriticalityReport",
]

# Stable CSV contract consumed by the plotting front end.
CSV_COLUMNS = (
    "t",
    "mean",
    "min",
    "l2_dist",
    "hgamma2",
    "moment2",
    "annular_mass",
    "crit_r2",
    "crit_r4",
    "dt",
    "tail_frac",
)


@dataclass(frozen=True)
class DiagnosticsRow:
    """One sampled row of the run time series."""

    t: float
    mean: float
    min_val: float
    l2_dist: float
    hgamma2: float
    moment2: float
    annular_mass: float
    crit_r2: float
    crit_r4: float
    dt_used: float
    tail_frac: float

    def as_tuple(self) -> tuple:
        return (
            self.t,
            self.mean,
            self.min_val,
            self.l2_dist,
            self.hgamma2,
            self.moment2,
            self.annular_mass,
            self.crit_r2,
            self.crit_r4,
            self.dt_used,
            self.tail_frac,
        )


_WEIGHT_CACHE: dict = {}


def _moment_weights(grid: Grid, b: float):
    """Cached (|x|^2 * cutoff, annulus mask) for the moment diagnostics."""
    key = (grid.dim, grid.n, float(b))
    cached = _WEIGHT_CACHE.get(key)
    if cached is not None:
        return cached
    xmesh = grid.node_mesh()
    rsq = np.zeros(grid.shape)
    for xm in xmesh:
        rsq += xm * xm
    r = np.sqrt(rsq)
    cutoff = plateau_profile(r / b, inner=1.0, outer=1.1)
    weights = (rsq * cutoff, r >= b)
    _WEIGHT_CACHE[key] = weights
    return weights


def second_moment(rho: Field, b: float) -> float:
    """Quadrature of |x|^2 rho(x) phi(x) with phi a plateau cutoff at scale b.

    The cutoff equals 1 inside radius b and vanishes beyond 1.1*b, so the
    integrand is supported well inside the box for every admissible b.
    """
    if not 0.0 < b < 0.125:
        raise ValueError(f"moment cutoff scale b must lie in (0, 1/8), got {b}")
    if b < 2.0 / rho.grid.n:
        raise ValueError(f"moment cutoff b={b} unresolved on n={rho.grid.n}")
    weight, _ = _moment_weights(rho.grid, b)
    return float(np.mean(weight * rho.values))


def annular_mass(rho: Field, b: float) -> float:
    """Mass of |rho| outside the ball of radius b (grid quadrature)."""
    _, outside = _moment_weights(rho.grid, b) if 0.0 < b < 0.125 else (None, None)
    if outside is None:
        xmesh = rho.grid.node_mesh()
        rsq = np.zeros(rho.grid.shape)
        for xm in xmesh:
            rsq += xm * xm
        outside = np.sqrt(rsq) >= b
    return float(np.mean(np.abs(rho.values) * outside))


@dataclass(frozen=True)
class CriticalityReport:
    a: float
    gamma: float
    p: float
    dim: int
    gamma_c: float
    gamma_p_critical: float
    label: str


def criticality_report(a: float, gamma: float, p: float, dim: int) -> CriticalityReport:
    """Scaling classification of the dissipation strength.

    ``gamma_c = 2 + a`` is the mass-critical exponent; the Lp-critical
    exponent is ``2 + a - d (1 - 1/p)``.  The label compares gamma with
    gamma_c: below is supercritical (blowup expected), above subcritical.
    """
    if a < 0.0:
        raise ValueError("a must be >= 0")
    if p < 1.0:
        raise ValueError("p must be >= 1")
    gamma_c = 2.0 + a
    gamma_p = 2.0 + a - dim * (1.0 - 1.0 / p)
    if abs(gamma - gamma_c) <= 1e-12 * max(1.0, abs(gamma_c)):
        label = "critical"
    elif gamma < gamma_c:
        label = "supercritical"
    else:
        label = "subcritical"
    return CriticalityReport(
        a=float(a),
        gamma=float(gamma),
        p=float(p),
        dim=int(dim),
        gamma_c=gamma_c,
        gamma_p_critical=gamma_p,
        label=label,
    )


def spectral_tail_fraction(grid: Grid, coeffs: np.ndarray) -> float:
    """Fraction of non-mean energy carried by |k| > n/3."""
    arr = _arrays(grid)
    power = np.abs(coeffs) ** 2
    power.flat[0] = 0.0
    total = float(np.sum(power))
    if total == 0.0:
        return 0.0
    tail = float(np.sum(power[arr.kabs > grid.n / 3.0]))
    return tail / total


def compute_row(field: Field, t: float, gamma: float, moment_b: float,
                crit_r2: float, crit_r4: float, dt_used: float) -> DiagnosticsRow:
    """Diagnostics row as a pure function of the sampled field.

    The solver calls this on its physical-space state, so recomputing the row
    from a persisted copy of the field reproduces it bit for bit.
    """
    from .spectral import forward, spectral_sobolev_norm

    coeffs = forward(field).coeffs
    power = np.abs(coeffs) ** 2
    power.flat[0] = 0.0
    return DiagnosticsRow(
        t=float(t),
        mean=float(coeffs.flat[0].real),
        min_val=float(np.min(field.values)),
        l2_dist=float(np.sqrt(np.sum(power))),
        hgamma2=spectral_sobolev_norm(field.grid, coeffs, gamma / 2.0, True),
        moment2=second_moment(field, moment_b),
        annular_mass=annular_mass(field, moment_b),
        crit_r2=float(crit_r2),
        crit_r4=float(crit_r4),
        dt_used=float(dt_used),
        tail_frac=spectral_tail_fraction(field.grid, coeffs),
    )
