# cython: boundscheck=False, wraparound=False, cdivision=True, language_level=3
"""Cython implementation of the per-step hot kernels.

Fuses the exponential-integrator stage algebra into single passes over the
coefficient arrays.  The exp/expm1 evaluations are delegated to NumPy (shared
with the fallback); everything else is plain IEEE arithmetic in the same
association order as ``_kernels_py``, so the two backends agree bit for bit.
Built with FP contraction disabled to keep that true.
"""

import numpy as np

cimport numpy as cnp

from libc.math cimport fabs, sqrt

cnp.import_array()

from ._kernels_py import transcendentals

BACKEND_NAME = "cython"

cdef double _SWITCH = 0.1

cdef double[7] _PHI2_C = [1.0 / 2, 1.0 / 6, 1.0 / 24, 1.0 / 120, 1.0 / 720,
                          1.0 / 5040, 1.0 / 40320]
cdef double[7] _F1_C = [1.0 / 6, 1.0 / 6, 3.0 / 40, 1.0 / 45, 5.0 / 1008,
                        1.0 / 1120, 49.0 / 362880]
cdef double[7] _F2_C = [1.0 / 6, 1.0 / 12, 1.0 / 40, 1.0 / 180, 1.0 / 1008,
                        1.0 / 6720, 1.0 / 51840]
cdef double[7] _F3_C = [1.0 / 6, 0.0, -1.0 / 120, -1.0 / 360, -1.0 / 1680,
                        -1.0 / 10080, -1.0 / 72576]


cdef inline double _horner7(const double* c, double z) nogil:
    cdef double out = c[6]
    out = out * z + c[5]
    out = out * z + c[4]
    out = out * z + c[3]
    out = out * z + c[2]
    out = out * z + c[1]
    out = out * z + c[0]
    return out


def etd2_coeffs(object lam, double dt):
    z_a, E_a, em_a = transcendentals(lam, dt, False)
    cdef cnp.ndarray[double, ndim=1] z = np.ascontiguousarray(z_a, dtype=np.float64).ravel()
    cdef cnp.ndarray[double, ndim=1] em = np.ascontiguousarray(em_a, dtype=np.float64).ravel()
    cdef Py_ssize_t size = z.shape[0]
    cdef cnp.ndarray[double, ndim=1] c1 = np.empty(size, dtype=np.float64)
    cdef cnp.ndarray[double, ndim=1] c2 = np.empty(size, dtype=np.float64)
    cdef Py_ssize_t i
    cdef double zi
    for i in range(size):
        zi = z[i]
        if zi == 0.0:
            c1[i] = dt
        else:
            c1[i] = dt * (em[i] / zi)
        if fabs(zi) >= _SWITCH:
            c2[i] = dt * ((em[i] - zi) / (zi * zi))
        else:
            c2[i] = dt * _horner7(_PHI2_C, zi)
    shape = np.shape(lam)
    return E_a.reshape(shape), c1.reshape(shape), c2.reshape(shape)


def etdrk4_coeffs(object lam, double dt):
    z_a, E_a, E2_a, em_half_a = transcendentals(lam, dt, True)
    cdef cnp.ndarray[double, ndim=1] z = np.ascontiguousarray(z_a, dtype=np.float64).ravel()
    cdef cnp.ndarray[double, ndim=1] E = np.ascontiguousarray(E_a, dtype=np.float64).ravel()
    cdef cnp.ndarray[double, ndim=1] em_half = np.ascontiguousarray(em_half_a, dtype=np.float64).ravel()
    cdef Py_ssize_t size = z.shape[0]
    cdef cnp.ndarray[double, ndim=1] f0 = np.empty(size, dtype=np.float64)
    cdef cnp.ndarray[double, ndim=1] f1 = np.empty(size, dtype=np.float64)
    cdef cnp.ndarray[double, ndim=1] f2 = np.empty(size, dtype=np.float64)
    cdef cnp.ndarray[double, ndim=1] f3 = np.empty(size, dtype=np.float64)
    cdef Py_ssize_t i
    cdef double zi, Ei, z3
    for i in range(size):
        zi = z[i]
        if zi == 0.0:
            f0[i] = 0.5 * dt
        else:
            f0[i] = dt * (em_half[i] / zi)
        if fabs(zi) >= _SWITCH:
            Ei = E[i]
            z3 = (zi * zi) * zi
            f1[i] = dt * ((-4.0 - zi + Ei * (4.0 - 3.0 * zi + zi * zi)) / z3)
            f2[i] = dt * ((2.0 + zi + Ei * (zi - 2.0)) / z3)
            f3[i] = dt * ((-4.0 - 3.0 * zi - zi * zi + Ei * (4.0 - zi)) / z3)
        else:
            f1[i] = dt * _horner7(_F1_C, zi)
            f2[i] = dt * _horner7(_F2_C, zi)
            f3[i] = dt * _horner7(_F3_C, zi)
    shape = np.shape(lam)
    return (E_a.reshape(shape), E2_a.reshape(shape), f0.reshape(shape),
            f1.reshape(shape), f2.reshape(shape), f3.reshape(shape))


def axpy_fused(object E, object v, object c, object N):
    cdef cnp.ndarray[double, ndim=1] E_f = np.ascontiguousarray(E, dtype=np.float64).ravel()
    cdef cnp.ndarray[double, ndim=1] c_f = np.ascontiguousarray(c, dtype=np.float64).ravel()
    cdef cnp.ndarray[cnp.complex128_t, ndim=1] v_f = np.ascontiguousarray(v, dtype=np.complex128).ravel()
    cdef cnp.ndarray[cnp.complex128_t, ndim=1] N_f = np.ascontiguousarray(N, dtype=np.complex128).ravel()
    cdef Py_ssize_t size = v_f.shape[0]
    cdef cnp.ndarray[cnp.complex128_t, ndim=1] out = np.empty(size, dtype=np.complex128)
    cdef Py_ssize_t i
    for i in range(size):
        out[i] = E_f[i] * v_f[i] + c_f[i] * N_f[i]
    return out.reshape(np.shape(v))


def etd2_correct(object a, object c2, object Na, object N0):
    cdef cnp.ndarray[cnp.complex128_t, ndim=1] a_f = np.ascontiguousarray(a, dtype=np.complex128).ravel()
    cdef cnp.ndarray[double, ndim=1] c_f = np.ascontiguousarray(c2, dtype=np.float64).ravel()
    cdef cnp.ndarray[cnp.complex128_t, ndim=1] Na_f = np.ascontiguousarray(Na, dtype=np.complex128).ravel()
    cdef cnp.ndarray[cnp.complex128_t, ndim=1] N0_f = np.ascontiguousarray(N0, dtype=np.complex128).ravel()
    cdef Py_ssize_t size = a_f.shape[0]
    cdef cnp.ndarray[cnp.complex128_t, ndim=1] out = np.empty(size, dtype=np.complex128)
    cdef Py_ssize_t i
    for i in range(size):
        out[i] = a_f[i] + c_f[i] * (Na_f[i] - N0_f[i])
    return out.reshape(np.shape(a))


def rk4_stage_c(object E2, object a, object f0, object N2, object N0):
    cdef cnp.ndarray[double, ndim=1] E_f = np.ascontiguousarray(E2, dtype=np.float64).ravel()
    cdef cnp.ndarray[cnp.complex128_t, ndim=1] a_f = np.ascontiguousarray(a, dtype=np.complex128).ravel()
    cdef cnp.ndarray[double, ndim=1] f_f = np.ascontiguousarray(f0, dtype=np.float64).ravel()
    cdef cnp.ndarray[cnp.complex128_t, ndim=1] N2_f = np.ascontiguousarray(N2, dtype=np.complex128).ravel()
    cdef cnp.ndarray[cnp.complex128_t, ndim=1] N0_f = np.ascontiguousarray(N0, dtype=np.complex128).ravel()
    cdef Py_ssize_t size = a_f.shape[0]
    cdef cnp.ndarray[cnp.complex128_t, ndim=1] out = np.empty(size, dtype=np.complex128)
    cdef Py_ssize_t i
    for i in range(size):
        out[i] = E_f[i] * a_f[i] + f_f[i] * (2.0 * N2_f[i] - N0_f[i])
    return out.reshape(np.shape(a))


def rk4_combine(object E, object v, object f1, object N0, object f2,
                object N1, object N2, object f3, object N3):
    cdef cnp.ndarray[double, ndim=1] E_f = np.ascontiguousarray(E, dtype=np.float64).ravel()
    cdef cnp.ndarray[cnp.complex128_t, ndim=1] v_f = np.ascontiguousarray(v, dtype=np.complex128).ravel()
    cdef cnp.ndarray[double, ndim=1] f1_f = np.ascontiguousarray(f1, dtype=np.float64).ravel()
    cdef cnp.ndarray[cnp.complex128_t, ndim=1] N0_f = np.ascontiguousarray(N0, dtype=np.complex128).ravel()
    cdef cnp.ndarray[double, ndim=1] f2_f = np.ascontiguousarray(f2, dtype=np.float64).ravel()
    cdef cnp.ndarray[cnp.complex128_t, ndim=1] N1_f = np.ascontiguousarray(N1, dtype=np.complex128).ravel()
    cdef cnp.ndarray[cnp.complex128_t, ndim=1] N2_f = np.ascontiguousarray(N2, dtype=np.complex128).ravel()
    cdef cnp.ndarray[double, ndim=1] f3_f = np.ascontiguousarray(f3, dtype=np.float64).ravel()
    cdef cnp.ndarray[cnp.complex128_t, ndim=1] N3_f = np.ascontiguousarray(N3, dtype=np.complex128).ravel()
    cdef Py_ssize_t size = v_f.shape[0]
    cdef cnp.ndarray[cnp.complex128_t, ndim=1] out = np.empty(size, dtype=np.complex128)
    cdef Py_ssize_t i
    for i in range(size):
        out[i] = ((E_f[i] * v_f[i] + f1_f[i] * N0_f[i])
                  + (2.0 * f2_f[i]) * (N1_f[i] + N2_f[i])) + f3_f[i] * N3_f[i]
    return out.reshape(np.shape(v))


def max_combined_speed(object u_components, object drift_components, double A):
    cdef list us = list(u_components)
    cdef list ds = list(drift_components) if drift_components is not None else [None] * len(us)
    cdef Py_ssize_t ncomp = len(us)
    if ncomp == 0:
        return 0.0
    cdef Py_ssize_t size = 0
    flat_u = []
    flat_d = []
    cdef Py_ssize_t j
    for j in range(ncomp):
        fu = None if us[j] is None else np.ascontiguousarray(us[j], dtype=np.float64).ravel()
        fd = None if ds[j] is None else np.ascontiguousarray(ds[j], dtype=np.float64).ravel()
        flat_u.append(fu)
        flat_d.append(fd)
        if fu is not None:
            size = fu.shape[0]
        elif fd is not None:
            size = fd.shape[0]
    cdef double best = 0.0
    cdef double comp
    cdef Py_ssize_t i
    cdef double[:] uv
    cdef double[:] dv
    cdef double[:] tv
    cdef bint has_u, has_d
    cdef cnp.ndarray[double, ndim=1] total = np.zeros(size, dtype=np.float64)
    tv = total
    for j in range(ncomp):
        has_u = flat_u[j] is not None
        has_d = flat_d[j] is not None
        if has_u and has_d:
            uv = flat_u[j]
            dv = flat_d[j]
            for i in range(size):
                comp = A * uv[i] + dv[i]
                tv[i] = tv[i] + comp * comp
        elif has_u:
            uv = flat_u[j]
            for i in range(size):
                comp = A * uv[i]
                tv[i] = tv[i] + comp * comp
        elif has_d:
            dv = flat_d[j]
            for i in range(size):
                comp = dv[i]
                tv[i] = tv[i] + comp * comp
    for i in range(size):
        if tv[i] > best:
            best = tv[i]
    return sqrt(best)
