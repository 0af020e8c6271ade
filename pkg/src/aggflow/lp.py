"""Dyadic frequency-band projections built from a radial plateau bump.

The generating profile ``phi0`` equals 1 on the unit ball, decays smoothly on
``1 < |xi| < 11/10`` and vanishes beyond.  The band symbol is
``phi(xi) = phi0(xi) - phi0(2 xi)``, giving the exact telescoping partition

    phi0(2 xi) + sum_{k >= 0} phi(2^-k xi) = 1      for every xi.

Band ``k = -1`` therefore captures exactly the mean; band ``k >= 0`` lives on
the dyadic annulus around ``|xi| ~ 2^k``.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np

from .spectral import Field, SpectralField, _arrays, forward, inverse, l2_norm

__all__ = [
    "LPBump",
    "plateau_profile",
    "lp_max_level",
    "lp_project",
    "lp_reconstruct",
    "lp_norm_equivalence",
    "commutator_check",
    "AliasWarning",
]


class AliasWarning(UserWarning):
    """Emitted when a pointwise product exceeds the grid bandwidth."""


def plateau_profile(r: np.ndarray, inner: float = 1.0, outer: float = 1.1) -> np.ndarray:
    """Radial plateau: 1 on [0, inner], smooth decay to 0 at ``outer``.

    The decay branch is exp(1 - 1/(1-s^2)) with s the normalised distance
    into the transition zone.
    """
    r = np.asarray(r, dtype=np.float64)
    out = np.zeros(r.shape, dtype=np.float64)
    out[r <= inner] = 1.0
    trans = (r > inner) & (r < outer)
    if np.any(trans):
        s = (r[trans] - inner) / (outer - inner)
        out[trans] = np.exp(1.0 - 1.0 / (1.0 - s * s))
    return out


@dataclass(frozen=True)
class LPBump:
    """Radial profile pair (phi0, phi) generating the dyadic decomposition."""

    inner: float = 1.0
    outer: float = 1.1

    def phi0(self, r) -> np.ndarray:
        return plateau_profile(np.asarray(r, dtype=np.float64), self.inner, self.outer)

    def phi(self, r) -> np.ndarray:
        r = np.asarray(r, dtype=np.float64)
        return self.phi0(r) - self.phi0(2.0 * r)

    def grad_phi_sup(self) -> float:
        """sup over radii of |d/dr phi(r)|, by dense sampling.

        For a radial symbol this equals the sup of the Euclidean norm of the
        full gradient.  Deterministic: fixed sampling resolution.
        """
        r = np.linspace(0.25, 1.5 * self.outer, 2_000_001)
        vals = self.phi(r)
        deriv = np.diff(vals) / np.diff(r)
        return float(np.max(np.abs(deriv)))


DEFAULT_BUMP = LPBump()


def lp_max_level(grid) -> int:
    """Smallest K such that bands -1..K reconstruct every lattice frequency."""
    rmax = float(np.sqrt(grid.dim) * (grid.n / 2.0))
    return int(np.ceil(np.log2(max(rmax, 1.0))))


def _band_symbol(grid, k: int, bump: LPBump) -> np.ndarray:
    kabs = _arrays(grid).kabs
    if k == -1:
        return bump.phi0(2.0 * kabs)
    return bump.phi(kabs / (1 << k))


def lp_project(f: Field, k: int, bump: LPBump = DEFAULT_BUMP) -> Field:
    """Band projection S_k f (k = -1 is the mean-mode projection)."""
    if k < -1:
        raise ValueError(f"band index must be >= -1, got {k}")
    symbol = _band_symbol(f.grid, k, bump)
    return inverse(SpectralField(f.grid, forward(f).coeffs * symbol))


def lp_reconstruct(f: Field, bump: LPBump = DEFAULT_BUMP) -> Field:
    """Sum of all band projections up to the grid's top level."""
    coeffs = forward(f).coeffs
    total = np.zeros(f.grid.shape, dtype=np.complex128)
    for k in range(-1, lp_max_level(f.grid) + 1):
        total += coeffs * _band_symbol(f.grid, k, bump)
    return inverse(SpectralField(f.grid, total))


def lp_norm_equivalence(f: Field, sigma: float, bump: LPBump = DEFAULT_BUMP):
    """Both sides of the dyadic characterisation of the homogeneous norm.

    Returns (lhs, rhs) with
        lhs = ||f||_{Hdot^sigma}^2 = sum_{k != 0} |k|^(2 sigma) |fhat|^2
        rhs = sum_{j >= 0} 2^(2 sigma j) ||S_j f||_{L2}^2 .
    """
    arr = _arrays(f.grid)
    coeffs = forward(f).coeffs
    power = np.abs(coeffs) ** 2
    with np.errstate(divide="ignore"):
        weight = np.where(arr.kabs > 0.0, arr.kabs ** (2.0 * sigma), 0.0)
    lhs = float(np.sum(weight * power))
    rhs = 0.0
    for j in range(0, lp_max_level(f.grid) + 1):
        symbol = _band_symbol(f.grid, j, bump)
        rhs += (4.0**(sigma * j)) * float(np.sum((symbol**2) * power))
    return lhs, rhs


def equivalence_ratio_bounds(sigma: float, rmax: float, bump: LPBump = DEFAULT_BUMP):
    """Exact bounds of lhs/rhs over all lattice radii up to ``rmax``.

    The ratio of the two quadratic forms at a single frequency of radius r is
    r^(2 sigma) / sum_j 4^(sigma j) phi(2^-j r)^2, so its range over a band of
    radii brackets the ratio for every field supported there.
    """
    r = np.arange(1, int(np.ceil(rmax)) + 1, dtype=np.float64)
    # fill in non-integer lattice radii by dense sampling between 1 and rmax
    r = np.unique(np.concatenate([r, np.linspace(1.0, max(rmax, 1.0), 20001)]))
    kmax = int(np.ceil(np.log2(r[-1]))) + 1
    denom = np.zeros_like(r)
    for j in range(0, kmax + 1):
        denom += (4.0**(sigma * j)) * bump.phi(r / (1 << j)) ** 2
    ratio = r ** (2.0 * sigma) / denom
    return float(np.min(ratio)), float(np.max(ratio))


def bandwidth(F: SpectralField, rel_tol: float = 1e-13) -> int:
    """Largest per-axis |k_j| carrying a non-negligible coefficient."""
    mags = np.abs(F.coeffs)
    cut = rel_tol * float(np.max(mags)) if np.max(mags) > 0 else 0.0
    active = mags > cut
    arr = _arrays(F.grid)
    bw = 0
    for km in arr.kmesh:
        if np.any(active):
            bw = max(bw, int(np.max(np.abs(km[active]))))
    return bw


def commutator_check(g: Field, f: Field, k: int, bump: LPBump = DEFAULT_BUMP):
    """Both sides of the band-commutator bound.

    lhs = || S_k(g f) - g S_k f ||_{L2}
    rhs = 2^-k * sup|phi'| * sum_beta |ghat(beta)| |beta| * ||f||_{L2}

    The inequality lhs <= rhs is exact for trigonometric polynomials, hence it
    holds on the grid whenever the product g*f is alias-free.  A warning is
    emitted otherwise.
    """
    if k < 0:
        raise ValueError("commutator bound is stated for bands k >= 0")
    if g.grid != f.grid:
        raise ValueError("g and f must share a grid")
    grid = g.grid
    ghat = forward(g)
    fhat = forward(f)
    if bandwidth(ghat) + bandwidth(fhat) > grid.n // 2 - 1:
        warnings.warn(
            "product bandwidth exceeds the grid; commutator bound unreliable",
            AliasWarning,
            stacklevel=2,
        )
    product = Field(grid, g.values * f.values)
    skgf = lp_project(product, k, bump)
    skf = lp_project(f, k, bump)
    commutator = Field(grid, skgf.values - g.values * skf.values)
    lhs = l2_norm(commutator)

    arr = _arrays(grid)
    gmoment = float(np.sum(np.abs(ghat.coeffs) * arr.kabs))
    rhs = (2.0**-k) * bump.grad_phi_sup() * gmoment * l2_norm(f)
    return lhs, rhs
