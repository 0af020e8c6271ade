"""Periodic grids, discrete Fourier transforms and Fourier-multiplier operators.

The domain is the unit periodic box ``[-1/2, 1/2)^d`` with ``n`` uniformly
spaced nodes per axis.  Spectral coefficients follow the convention

    f(x) = sum_k  fhat(k) exp(2*pi*i k.x),   k integer lattice,

so a real constant field has ``fhat(0)`` equal to its value and
``cos(2*pi*x_1)`` has coefficients ``1/2`` at ``k = +-e_1``.  Coefficient
arrays are stored in standard FFT order (non-negative frequencies first).

Two conventions for the fractional dissipation multiplier are supported:

* ``paper_lambda``:          multiplier ``|k|^sigma``
* ``laplacian_consistent``:  multiplier ``(2*pi*|k|)^sigma``

The second makes the ``sigma = 2`` operator coincide with ``-Laplacian`` for
this transform convention (derivative multiplier ``2*pi*i*k_j``).  Sobolev
norms are always reported in the ``paper_lambda`` normalisation, independent
of the convention a solver runs with.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass

import numpy as np

__all__ = [
    "Grid",
    "Field",
    "SpectralField",
    "MultiplierConvention",
    "GridMismatchError",
    "make_grid",
    "forward",
    "inverse",
    "apply_lambda",
    "gradient",
    "divergence",
    "sobolev_norm",
    "dealias",
    "dealias_limit",
    "l2_norm",
    "inner_product",
]


class GridMismatchError(ValueError):
    """Raised when an operation mixes fields living on different grids."""


class MultiplierConvention(enum.Enum):
    PAPER_LAMBDA = "paper_lambda"
    LAPLACIAN_CONSISTENT = "laplacian_consistent"

    @classmethod
    def parse(cls, name: str) -> "MultiplierConvention":
        for conv in cls:
            if conv.value == name:
                return conv
        raise ValueError(f"unknown multiplier convention: {name!r}")


@dataclass(frozen=True)
class Grid:
    """Uniform periodic grid on ``[-1/2, 1/2)^dim`` with ``n`` nodes per axis."""

    dim: int
    n: int

    @property
    def h(self) -> float:
        """Node spacing, identical on every axis."""
        return 1.0 / self.n

    @property
    def shape(self) -> tuple:
        return (self.n,) * self.dim

    @property
    def size(self) -> int:
        return self.n**self.dim

    def axis_nodes(self) -> np.ndarray:
        """1D node coordinates ``-1/2 + j/n``."""
        return _arrays(self).nodes1d

    def node_mesh(self) -> tuple:
        """Node coordinate arrays, one per axis, each of full grid shape."""
        return _arrays(self).xmesh

    def axis_wavenumbers(self) -> np.ndarray:
        """1D integer wavenumbers in FFT order, components in [-n/2, n/2)."""
        return _arrays(self).k1d

    def wavenumber_mesh(self) -> tuple:
        """Integer wavenumber arrays, one per axis, each of full grid shape."""
        return _arrays(self).kmesh

    def wavenumber_norm(self) -> np.ndarray:
        """Euclidean norm |k| of the wavenumber lattice, full grid shape."""
        return _arrays(self).kabs


@dataclass(frozen=True)
class Field:
    """Real scalar field sampled on the nodes of a grid."""

    grid: Grid
    values: np.ndarray

    def __post_init__(self):
        vals = np.asarray(self.values, dtype=np.float64)
        if vals.shape != self.grid.shape:
            raise ValueError(
                f"values shape {vals.shape} does not match grid shape {self.grid.shape}"
            )
        object.__setattr__(self, "values", vals)


@dataclass(frozen=True)
class SpectralField:
    """Complex Fourier coefficients of a field, in FFT order."""

    grid: Grid
    coeffs: np.ndarray

    def __post_init__(self):
        coeffs = np.asarray(self.coeffs, dtype=np.complex128)
        if coeffs.shape != self.grid.shape:
            raise ValueError(
                f"coeffs shape {coeffs.shape} does not match grid shape {self.grid.shape}"
            )
        object.__setattr__(self, "coeffs", coeffs)


@dataclass(frozen=True)
class _GridArrays:
    """Per-grid cached arrays shared by all spectral operations."""

    nodes1d: np.ndarray
    xmesh: tuple
    k1d: np.ndarray
    kmesh: tuple
    kabs: np.ndarray
    ksq: np.ndarray
    sign: np.ndarray          # (-1)^(k_1+...+k_d), the node-offset phase
    dealias_mask: np.ndarray


_GRID_CACHE: dict = {}


def _arrays(grid: Grid) -> "_GridArrays":
    key = (grid.dim, grid.n)
    cached = _GRID_CACHE.get(key)
    if cached is not None:
        return cached
    n, dim = grid.n, grid.dim
    nodes1d = -0.5 + np.arange(n) / n
    k1d = np.rint(np.fft.fftfreq(n) * n).astype(np.int64)
    xmesh = tuple(np.meshgrid(*([nodes1d] * dim), indexing="ij"))
    kmesh = tuple(np.meshgrid(*([k1d] * dim), indexing="ij"))
    ksq = np.zeros(grid.shape, dtype=np.float64)
    for km in kmesh:
        ksq += km.astype(np.float64) ** 2
    kabs = np.sqrt(ksq)
    sign1d = np.where(k1d % 2 == 0, 1.0, -1.0)
    sign = np.ones(grid.shape, dtype=np.float64)
    for axis in range(dim):
        shape = [1] * dim
        shape[axis] = n
        sign = sign * sign1d.reshape(shape)
    cut = n / 3.0
    keep = np.ones(grid.shape, dtype=bool)
    for km in kmesh:
        keep &= np.abs(km) < cut
    arrays = _GridArrays(
        nodes1d=nodes1d,
        xmesh=xmesh,
        k1d=k1d,
        kmesh=kmesh,
        kabs=kabs,
        ksq=ksq,
        sign=sign,
        dealias_mask=keep,
    )
    _GRID_CACHE[key] = arrays
    return arrays


def make_grid(dim: int, n: int) -> Grid:
    """Create a periodic grid; rejects odd or too-small resolutions."""
    if dim not in (1, 2, 3):
        raise ValueError(f"dim must be 1, 2 or 3, got {dim}")
    if n < 8:
        raise ValueError(f"resolution n={n} too small (need n >= 8)")
    if n % 2 != 0:
        raise ValueError(f"resolution n={n} must be even (aliasing hazard)")
    return Grid(dim=dim, n=n)


def _check_same_grid(a, b):
    if a.grid != b.grid:
        raise GridMismatchError(f"grid mismatch: {a.grid} vs {b.grid}")


def forward(f: Field) -> SpectralField:
    """Fourier coefficients of a real field (exact for band-limited data)."""
    arr = _arrays(f.grid)
    coeffs = np.fft.fftn(f.values) * (arr.sign / f.grid.size)
    return SpectralField(f.grid, coeffs)


def inverse(F: SpectralField) -> Field:
    """Field values at the nodes; imaginary round-off is discarded."""
    arr = _arrays(F.grid)
    vals = np.fft.ifftn(F.coeffs * arr.sign) * F.grid.size
    return Field(F.grid, np.ascontiguousarray(vals.real))


def lambda_multiplier(grid: Grid, sigma: float, conv: MultiplierConvention) -> np.ndarray:
    """Multiplier array for the fractional dissipation operator; 0 at k=0."""
    kabs = _arrays(grid).kabs
    scale = 2.0 * np.pi if conv is MultiplierConvention.LAPLACIAN_CONSISTENT else 1.0
    with np.errstate(divide="ignore"):
        mult = np.where(kabs > 0.0, (scale * kabs) ** sigma, 0.0)
    return mult


def apply_lambda(
    F: SpectralField,
    sigma: float,
    conv: MultiplierConvention = MultiplierConvention.LAPLACIAN_CONSISTENT,
) -> SpectralField:
    """Fractional derivative of order sigma; the k=0 mode is always dropped."""
    mult = lambda_multiplier(F.grid, sigma, conv)
    return SpectralField(F.grid, F.coeffs * mult)


def gradient(F: SpectralField) -> list:
    """Spectral gradient: component j multiplied by 2*pi*i*k_j."""
    kmesh = _arrays(F.grid).kmesh
    return [
        SpectralField(F.grid, F.coeffs * (2.0j * np.pi * km)) for km in kmesh
    ]


def divergence(components) -> SpectralField:
    """Spectral divergence of a vector of spectral fields."""
    components = list(components)
    grid = components[0].grid
    for comp in components[1:]:
        _check_same_grid(components[0], comp)
    if len(components) != grid.dim:
        raise ValueError(
            f"expected {grid.dim} components for a dim={grid.dim} grid, got {len(components)}"
        )
    kmesh = _arrays(grid).kmesh
    out = np.zeros(grid.shape, dtype=np.complex128)
    for comp, km in zip(components, kmesh):
        out += comp.coeffs * (2.0j * np.pi * km)
    return SpectralField(grid, out)


def sobolev_norm(f: Field, sigma: float, homogeneous: bool = True) -> float:
    """Sobolev norm from the coefficient sums, in the |k|^sigma normalisation.

    Homogeneous: sqrt(sum_{k != 0} |k|^(2 sigma) |fhat(k)|^2).
    Inhomogeneous uses (1 + |k|^2)^sigma and keeps the zero mode.
    """
    coeffs = forward(f).coeffs
    return spectral_sobolev_norm(f.grid, coeffs, sigma, homogeneous)


def spectral_sobolev_norm(
    grid: Grid, coeffs: np.ndarray, sigma: float, homogeneous: bool = True
) -> float:
    arr = _arrays(grid)
    power = np.abs(coeffs) ** 2
    if homogeneous:
        with np.errstate(divide="ignore"):
            weight = np.where(arr.kabs > 0.0, arr.kabs ** (2.0 * sigma), 0.0)
    else:
        weight = (1.0 + arr.ksq) ** sigma
    return float(np.sqrt(np.sum(weight * power)))


def dealias_limit(grid: Grid) -> int:
    """Largest retained |k_j| under the 2/3 rule."""
    k1d = np.abs(_arrays(grid).k1d)
    return int(np.max(k1d[k1d < grid.n / 3.0]))


def dealias(F: SpectralField) -> SpectralField:
    """2/3-rule truncation: zero every coefficient with any |k_j| >= n/3."""
    mask = _arrays(F.grid).dealias_mask
    return SpectralField(F.grid, np.where(mask, F.coeffs, 0.0))


def dealias_mask(grid: Grid) -> np.ndarray:
    return _arrays(grid).dealias_mask


def l2_norm(f: Field) -> float:
    """L2 norm on the unit-volume box (trapezoidal = spectral quadrature)."""
    return float(np.sqrt(np.mean(f.values * f.values)))


def inner_product(f: Field, g: Field) -> float:
    """L2 inner product on the unit-volume box."""
    _check_same_grid(f, g)
    return float(np.mean(f.values * g.values))
