"""NumPy implementation of the per-step hot kernels.

Mirrors ``_kernels_cy`` operation for operation.  The transcendentals
(exp/expm1) are evaluated with NumPy in both backends so the remaining
arithmetic, which is individually IEEE-rounded, produces bit-identical
results (the extension is compiled with FP contraction disabled for the same
reason).  All stage coefficients are real because the dissipation multiplier
is real and non-negative.
"""

from __future__ import annotations

import numpy as np

BACKEND_NAME = "python"

SERIES_SWITCH = 0.1

# Taylor coefficients (constant term first) of the stage functions near z = 0.
PHI2_SERIES = (1 / 2, 1 / 6, 1 / 24, 1 / 120, 1 / 720, 1 / 5040, 1 / 40320)
F1_SERIES = (1 / 6, 1 / 6, 3 / 40, 1 / 45, 5 / 1008, 1 / 1120, 49 / 362880)
F2_SERIES = (1 / 6, 1 / 12, 1 / 40, 1 / 180, 1 / 1008, 1 / 6720, 1 / 51840)
F3_SERIES = (1 / 6, 0.0, -1 / 120, -1 / 360, -1 / 1680, -1 / 10080, -1 / 72576)


def _horner(coeffs, z):
    out = np.full_like(z, coeffs[-1])
    for c in coeffs[-2::-1]:
        out = out * z + c
    return out


def transcendentals(lam, dt, half: bool):
    """Shared exp/expm1 evaluations; identical inputs for both backends."""
    z = (-dt) * np.asarray(lam, dtype=np.float64)
    E = np.exp(z)
    if half:
        E2 = np.exp(0.5 * z)
        em_half = np.expm1(0.5 * z)
        return z, E, E2, em_half
    em = np.expm1(z)
    return z, E, em


def etd2_coeffs(lam, dt):
    """Propagator and the two stage weights of the second-order scheme."""
    z, E, em = transcendentals(lam, dt, half=False)
    c1 = np.full_like(z, dt)
    nz = z != 0.0
    c1[nz] = dt * (em[nz] / z[nz])
    c2 = dt * _horner(PHI2_SERIES, z)
    big = np.abs(z) >= SERIES_SWITCH
    zb = z[big]
    c2[big] = dt * ((em[big] - zb) / (zb * zb))
    return E, c1, c2


def etdrk4_coeffs(lam, dt):
    """Propagators and the four stage weights of the fourth-order scheme."""
    z, E, E2, em_half = transcendentals(lam, dt, half=True)
    f0 = np.full_like(z, 0.5 * dt)
    nz = z != 0.0
    f0[nz] = dt * (em_half[nz] / z[nz])
    f1 = dt * _horner(F1_SERIES, z)
    f2 = dt * _horner(F2_SERIES, z)
    f3 = dt * _horner(F3_SERIES, z)
    big = np.abs(z) >= SERIES_SWITCH
    zb = z[big]
    Eb = E[big]
    z3 = (zb * zb) * zb
    f1[big] = dt * ((-4.0 - zb + Eb * (4.0 - 3.0 * zb + zb * zb)) / z3)
    f2[big] = dt * ((2.0 + zb + Eb * (zb - 2.0)) / z3)
    f3[big] = dt * ((-4.0 - 3.0 * zb - zb * zb + Eb * (4.0 - zb)) / z3)
    return E, E2, f0, f1, f2, f3


def axpy_fused(E, v, c, N):
    """E*v + c*N for real weights and complex states."""
    return E * v + c * N


def etd2_correct(a, c2, Na, N0):
    """a + c2*(Na - N0)."""
    return a + c2 * (Na - N0)


def rk4_stage_c(E2, a, f0, N2, N0):
    """E2*a + f0*(2*N2 - N0)."""
    return E2 * a + f0 * (2.0 * N2 - N0)


def rk4_combine(E, v, f1, N0, f2, N1, N2, f3, N3):
    """E*v + f1*N0 + (2*f2)*(N1 + N2) + f3*N3."""
    return ((E * v + f1 * N0) + (2.0 * f2) * (N1 + N2)) + f3 * N3


def max_combined_speed(u_components, drift_components, A):
    """max over nodes of the Euclidean norm of A*u + drift."""
    total = None
    if drift_components is None:
        drift_components = (None,) * len(u_components)
    for u, d in zip(u_components, drift_components):
        if u is None:
            comp = d
        elif d is None:
            comp = A * u
        else:
            comp = A * u + d
        sq = comp * comp
        total = sq if total is None else total + sq
    if total is None:
        return 0.0
    return float(np.sqrt(np.max(total)))
