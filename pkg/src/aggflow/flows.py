"""Steady incompressible velocity fields on the periodic box.

Built-in families (all two-dimensional except ``zero`` and ``custom_file``):

* ``zero``          -- no flow.
* ``shear``         -- u = (v(y), 0) with a trigonometric profile v.
* ``translation``   -- u = (1, alpha), a constant drift of slope alpha.
* ``time_changed_translation`` -- u = (Q(y), alpha*Q(x)) for a positive
  trigonometric polynomial Q with Q = 1 recovering the plain translation.
  Each component depends on the transverse coordinate only, so the field is
  divergence-free exactly, while a non-constant Q modulates the speed of the
  winding and shears neighbouring trajectories apart.
* ``custom_file``   -- components read from a field table on disk.

A genuinely Liouvillean slope is not representable in floating point; the
default slope is the golden-ratio conjugate, and measured relaxation
enhancement is understood as the finite-resolution surrogate of the
spectral-theoretic property.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .spectral import (
    Field,
    Grid,
    GridMismatchError,
    SpectralField,
    _arrays,
    dealias,
    divergence,
    forward,
    inverse,
)

__all__ = [
    "GOLDEN_SLOPE",
    "FlowSpec",
    "VelocityField",
    "build_flow",
    "advect_term",
    "divergence_residual",
    "save_field_table",
    "load_field_table",
]

GOLDEN_SLOPE = (np.sqrt(5.0) - 1.0) / 2.0

FAMILIES = ("zero", "shear", "translation", "time_changed_translation", "custom_file")

DIV_TOL = 1e-10


@dataclass(frozen=True)
class FlowSpec:
    """Parametric description of a steady incompressible flow."""

    family: str
    amplitude: float = 1.0
    alpha: float = GOLDEN_SLOPE
    q_coeffs: tuple = ()      # cosine amplitudes c_m of Q(s) = 1 + sum c_m cos(2 pi m s + theta_m)
    q_phases: tuple = ()
    shear_sin: tuple = (1.0,)  # sine coefficients of v(y)
    shear_cos: tuple = ()
    path: str = ""

    def __post_init__(self):
        if self.family not in FAMILIES:
            raise ValueError(f"unknown flow family: {self.family!r}")
        if self.amplitude < 0.0:
            raise ValueError("flow amplitude must be >= 0")
        if self.family == "time_changed_translation":
            if sum(abs(c) for c in self.q_coeffs) > 0.9 + 1e-12:
                raise ValueError(
                    "time-change profile must satisfy sum |c_m| <= 0.9 (positivity)"
                )
            if self.q_phases and len(self.q_phases) != len(self.q_coeffs):
                raise ValueError("q_phases must match q_coeffs in length")
        if self.family == "custom_file" and not self.path:
            raise ValueError("custom_file flow needs a path")

    def q_profile(self, s: np.ndarray) -> np.ndarray:
        """Positive speed profile Q(s); identically 1 when no coefficients."""
        out = np.ones_like(np.asarray(s, dtype=np.float64))
        phases = self.q_phases if self.q_phases else (0.0,) * len(self.q_coeffs)
        for m, (c, theta) in enumerate(zip(self.q_coeffs, phases), start=1):
            out = out + c * np.cos(2.0 * np.pi * m * s + theta)
        return out

    def shear_profile(self, y: np.ndarray) -> np.ndarray:
        out = np.zeros_like(np.asarray(y, dtype=np.float64))
        for m, c in enumerate(self.shear_sin, start=1):
            out = out + c * np.sin(2.0 * np.pi * m * y)
        for m, c in enumerate(self.shear_cos, start=1):
            out = out + c * np.cos(2.0 * np.pi * m * y)
        return out


@dataclass(frozen=True)
class VelocityField:
    """Sampled velocity components on a common grid."""

    grid: Grid
    components: tuple

    def __post_init__(self):
        comps = tuple(np.asarray(c, dtype=np.float64) for c in self.components)
        if len(comps) != self.grid.dim:
            raise ValueError(
                f"expected {self.grid.dim} components, got {len(comps)}"
            )
        for c in comps:
            if c.shape != self.grid.shape:
                raise ValueError("component shape does not match grid")
        object.__setattr__(self, "components", comps)

    def max_speed(self) -> float:
        speed_sq = np.zeros(self.grid.shape)
        for c in self.components:
            speed_sq += c * c
        return float(np.sqrt(np.max(speed_sq)))


def divergence_residual(v: VelocityField) -> float:
    """Relative spectral divergence ||div u||_L2 / ||u||_L2 (0 for u = 0)."""
    div = divergence([forward(Field(v.grid, c)) for c in v.components])
    div_l2 = float(np.sqrt(np.sum(np.abs(div.coeffs) ** 2)))
    u_l2 = 0.0
    for c in v.components:
        u_l2 += float(np.mean(c * c))
    u_l2 = np.sqrt(u_l2)
    if u_l2 == 0.0:
        return div_l2
    return div_l2 / u_l2


def build_flow(spec: FlowSpec, grid: Grid) -> VelocityField:
    """Sample a flow family on the grid and verify incompressibility."""
    planar = ("shear", "translation", "time_changed_translation")
    if spec.family in planar and grid.dim != 2:
        raise ValueError(f"flow family {spec.family!r} requires dim=2")
    if spec.family == "zero":
        comps = tuple(np.zeros(grid.shape) for _ in range(grid.dim))
        return VelocityField(grid, comps)

    if spec.family == "custom_file":
        dim, n, arrays = load_field_table(spec.path)
        if dim != grid.dim or n != grid.n:
            raise ValueError(
                f"{spec.path}: table is dim={dim}, n={n}; expected grid {grid.dim}, {grid.n}"
            )
        if len(arrays) != grid.dim:
            raise ValueError(f"{spec.path}: expected {grid.dim} components")
        comps = tuple(spec.amplitude * a for a in arrays)
        v = VelocityField(grid, comps)
        if divergence_residual(v) > DIV_TOL:
            raise ValueError(f"{spec.path}: custom flow is not divergence-free")
        return v

    x, y = grid.node_mesh()
    if spec.family == "translation":
        comps = (np.full(grid.shape, 1.0), np.full(grid.shape, spec.alpha))
    elif spec.family == "shear":
        comps = (spec.shear_profile(y), np.zeros(grid.shape))
    else:  # time_changed_translation
        q = spec.q_profile
        if float(np.min(q(np.linspace(0.0, 1.0, 4096)))) <= 0.0:
            raise ValueError("time-change profile Q must be strictly positive")
        comps = (q(y), spec.alpha * q(x))
    comps = tuple(spec.amplitude * c for c in comps)
    v = VelocityField(grid, comps)
    residual = divergence_residual(v)
    if residual > DIV_TOL:
        raise AssertionError(
            f"built-in family {spec.family!r} failed divergence check: {residual}"
        )
    return v


def advect_term(u: VelocityField, rho: Field, A: float) -> Field:
    """A * (u . grad rho), computed pseudo-spectrally with dealiasing."""
    if u.grid != rho.grid:
        raise GridMismatchError(f"grid mismatch: {u.grid} vs {rho.grid}")
    grid = rho.grid
    rho_hat = dealias(forward(rho))
    kmesh = _arrays(grid).kmesh
    total = np.zeros(grid.shape)
    for comp, km in zip(u.components, kmesh):
        comp_d = inverse(dealias(forward(Field(grid, comp)))).values
        grad_j = inverse(SpectralField(grid, rho_hat.coeffs * (2.0j * np.pi * km))).values
        total += comp_d * grad_j
    out_hat = dealias(forward(Field(grid, total)))
    return Field(grid, A * inverse(out_hat).values)


_TABLE_MAGIC = "aggflow-field v1"


def save_field_table(path, arrays, grid: Grid) -> None:
    """Plain-text field table: header (dim, n, components), row-major values."""
    arrays = [np.asarray(a, dtype=np.float64) for a in arrays]
    with open(path, "w") as fh:
        fh.write(f"{_TABLE_MAGIC}\n")
        fh.write(f"dim={grid.dim}\n")
        fh.write(f"n={grid.n}\n")
        fh.write(f"components={len(arrays)}\n")
        for arr in arrays:
            for val in arr.ravel():
                fh.write(f"{float(val)!r}\n")


def load_field_table(path):
    """Read a table written by :func:`save_field_table`.

    Returns (dim, n, [arrays]).
    """
    with open(path) as fh:
        lines = fh.read().splitlines()
    if not lines or lines[0] != _TABLE_MAGIC:
        raise ValueError(f"{path}: not an aggflow field table")
    header = {}
    for offset in range(1, 4):
        key, _, value = lines[offset].partition("=")
        header[key] = int(value)
    dim, n, ncomp = header["dim"], header["n"], header["components"]
    size = n**dim
    expected = 4 + ncomp * size
    if len(lines) < expected:
        raise ValueError(f"{path}: truncated table ({len(lines)} < {expected} lines)")
    arrays = []
    pos = 4
    for _ in range(ncomp):
        block = np.array([float(s) for s in lines[pos:pos + size]], dtype=np.float64)
        arrays.append(block.reshape((n,) * dim))
        pos += size
    return dim, n, arrays
