"""Interaction kernels: truncated power-law attraction and the Newtonian kernel.

The power kernel's vector profile is ``x / |x|^(2+a)`` inside the core radius
``eps``, blended to zero by ``2*eps`` with a smooth radial cutoff, and sampled
on the grid (the origin node is zero by odd symmetry).  The Newtonian
(chemotaxis) kernel is defined directly in Fourier space so that the
divergence of its output reproduces the mean-free density exactly.
"""

from __future__ import annotations

import io
from dataclasses import dataclass

import numpy as np

from .lp import plateau_profile
from .spectral import (
    Field,
    Grid,
    GridMismatchError,
    SpectralField,
    _arrays,
    forward,
    inverse,
)

__all__ = [
    "KernelSpec",
    "build_power_kernel",
    "build_ks_kernel",
    "apply_kernel",
    "apply_kernel_spectral",
    "save_kernel",
    "load_kernel",
]

POWER = "power"
KELLER_SEGEL = "keller_segel"


@dataclass(frozen=True)
class KernelSpec:
    """Spectral representation of the interaction kernel components."""

    grid: Grid
    kind: str
    a: float
    eps: float
    components: tuple  # one complex coefficient array per dimension

    @property
    def p0_limit(self) -> float:
        """Supremum of admissible integrability exponents d/(1+a)."""
        return self.grid.dim / (1.0 + self.a)


def _admissibility(dim: int, a: float):
    if a < 0.0:
        raise ValueError(f"singularity exponent a must be >= 0, got {a}")
    if dim / (1.0 + a) <= 1.0:
        raise ValueError(
            f"inadmissible kernel: need d/(1+a) > 1, got d={dim}, a={a}"
        )


def build_power_kernel(grid: Grid, a: float, eps: float) -> KernelSpec:
    """Truncated power-law kernel with core ``x/|x|^(2+a)`` on ``|x| <= eps``."""
    _admissibility(grid.dim, a)
    if not 0.0 < eps <= 0.25:
        raise ValueError(f"core radius eps must lie in (0, 1/4], got {eps}")
    if eps < 4.0 / grid.n:
        raise ValueError(
            f"core radius eps={eps} unresolved on n={grid.n} (need eps >= 4/n)"
        )
    xmesh = grid.node_mesh()
    rsq = np.zeros(grid.shape)
    for xm in xmesh:
        rsq += xm * xm
    r = np.sqrt(rsq)
    cutoff = plateau_profile(r / eps, inner=1.0, outer=2.0)
    with np.errstate(divide="ignore", invalid="ignore"):
        radial = np.where(r > 0.0, r ** -(2.0 + a), 0.0)
    profile = radial * cutoff
    components = []
    for xm in xmesh:
        coeffs = forward(Field(grid, xm * profile)).coeffs
        coeffs.flat[0] = 0.0  # odd kernel: convolution with constants vanishes
        components.append(coeffs)
    return KernelSpec(grid=grid, kind=POWER, a=float(a), eps=float(eps),
                      components=tuple(components))


def build_ks_kernel(grid: Grid) -> KernelSpec:
    """Newtonian kernel: component j has symbol -i k_j / (2 pi |k|^2)."""
    arr = _arrays(grid)
    ksq = arr.ksq
    components = []
    for km in arr.kmesh:
        with np.errstate(divide="ignore", invalid="ignore"):
            sym = np.where(ksq > 0.0, -1.0j * km / (2.0 * np.pi * ksq), 0.0)
        components.append(sym.astype(np.complex128))
    a_equiv = float(grid.dim - 2)
    return KernelSpec(grid=grid, kind=KELLER_SEGEL, a=a_equiv, eps=0.0,
                      components=tuple(components))


def apply_kernel_spectral(ks: KernelSpec, rho_hat: np.ndarray) -> list:
    """Coefficient arrays of the convolved drift, one per component."""
    return [comp * rho_hat for comp in ks.components]


def apply_kernel(ks: KernelSpec, rho: Field) -> list:
    """Periodic convolution of each kernel component with the density."""
    if ks.grid != rho.grid:
        raise GridMismatchError(f"grid mismatch: {ks.grid} vs {rho.grid}")
    rho_hat = forward(rho).coeffs
    return [
        inverse(SpectralField(ks.grid, comp_hat))
        for comp_hat in apply_kernel_spectral(ks, rho_hat)
    ]


_KERNEL_MAGIC = "aggflow-kernel v1"


def save_kernel(ks: KernelSpec, path) -> None:
    """Write the kernel coefficient table as reproducible plain text."""
    buf = io.StringIO()
    buf.write(f"{_KERNEL_MAGIC}\n")
    buf.write(f"kind={ks.kind}\n")
    buf.write(f"dim={ks.grid.dim}\n")
    buf.write(f"n={ks.grid.n}\n")
    buf.write(f"a={ks.a!r}\n")
    buf.write(f"eps={ks.eps!r}\n")
    for j, comp in enumerate(ks.components):
        buf.write(f"component={j}\n")
        flat = comp.ravel()
        for z in flat:
            buf.write(f"{float(z.real)!r} {float(z.imag)!r}\n")
    with open(path, "w") as fh:
        fh.write(buf.getvalue())


def load_kernel(path) -> KernelSpec:
    """Read a kernel written by :func:`save_kernel`."""
    with open(path) as fh:
        lines = fh.read().splitlines()
    if not lines or lines[0] != _KERNEL_MAGIC:
        raise ValueError(f"{path}: not an aggflow kernel file")
    header = {}
    idx = 1
    while idx < len(lines) and "=" in lines[idx] and not lines[idx].startswith("component="):
        key, _, value = lines[idx].partition("=")
        header[key] = value
        idx += 1
    grid = Grid(dim=int(header["dim"]), n=int(header["n"]))
    comps = []
    size = grid.size
    while idx < len(lines):
        if not lines[idx].startswith("component="):
            raise ValueError(f"{path}: malformed component header at line {idx + 1}")
        idx += 1
        block = np.empty(size, dtype=np.complex128)
        for pos in range(size):
            re_s, im_s = lines[idx + pos].split()
            block[pos] = complex(float(re_s), float(im_s))
        idx += size
        comps.append(block.reshape(grid.shape))
    if len(comps) != grid.dim:
        raise ValueError(f"{path}: expected {grid.dim} components, found {len(comps)}")
    return KernelSpec(grid=grid, kind=header["kind"], a=float(header["a"]),
                      eps=float(header["eps"]), components=tuple(comps))
