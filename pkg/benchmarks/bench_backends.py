#!/usr/bin/env python3
"""Compare the compiled and NumPy backends on the per-step hot kernels.

Usage: python benchmarks/bench_backends.py [--repeats N]
"""

import argparse
import time

import numpy as np

from aggflow._accel import _kernels_py

try:
    from aggflow._accel import _kernels_cy
except ImportError:
    _kernels_cy = None


def timeit(fn, repeats):
    best = float("inf")
    for _ in range(repeats):
        start = time.perf_counter()
        fn()
        best = min(best, time.perf_counter() - start)
    return best


def bench_kernels(n, repeats):
    shape = (n, n)
    rng = np.random.default_rng(0)
    lam = (2 * np.pi * np.abs(rng.standard_normal(shape))) ** 1.5
    E, E2, f0, f1, f2, f3 = _kernels_py.etdrk4_coeffs(lam, 1e-4)
    v = (rng.standard_normal(shape) + 1j * rng.standard_normal(shape))
    N0, N1, N2, N3 = (rng.standard_normal(shape) + 1j * rng.standard_normal(shape)
                      for _ in range(4))
    rows = []
    backends = [("python", _kernels_py)]
    if _kernels_cy is not None:
        backends.append(("cython", _kernels_cy))
    for name, mod in backends:
        rows.append((
            name,
            timeit(lambda: mod.etdrk4_coeffs(lam, 1e-4), repeats),
            timeit(lambda: mod.axpy_fused(E2, v, f0, N0), repeats),
            timeit(lambda: mod.rk4_combine(E, v, f1, N0, f2, N1, N2, f3, N3), repeats),
            timeit(lambda: mod.max_combined_speed([N0.real, N1.real],
                                                  [N2.real, N3.real], 3.0), repeats),
        ))
    return rows


def bench_full_step(n, repeats):
    from aggflow.dynamics import _Engine, _Stepper
    from aggflow.flows import FlowSpec, build_flow
    from aggflow.initial import InitialSpec, make_initial_data
    from aggflow.kernels import build_power_kernel
    from aggflow.spectral import MultiplierConvention, lambda_multiplier, make_grid
    from aggflow import _accel

    grid = make_grid(2, n)
    ks = build_power_kernel(grid, 0.0, 0.2)
    flow = build_flow(
        FlowSpec(family="time_changed_translation", q_coeffs=(0.45, 0.45),
                 q_phases=(0.0, 1.3)), grid)
    lam = lambda_multiplier(grid, 1.5, MultiplierConvention.LAPLACIAN_CONSISTENT)
    engine = _Engine(grid, lam, flow, 100.0, ks)
    stepper = _Stepper(engine, "etd_rk4")
    rho0 = make_initial_data(InitialSpec(kind="gaussian_bump", mass=2.0, width=0.1), grid)
    v = engine.initial_state(rho0.values)
    N0, _ = engine.rhs(v)
    stepper.coeffs(1e-5)

    def one_step():
        stepper.advance(v, N0, 1e-5)

    return timeit(one_step, repeats), _accel.BACKEND_NAME


def main():
    parser = argparse.ArgumentParser()
    parser.add_argument("--repeats", type=int, default=20)
    args = parser.parse_args()

    print(f"{'backend':<8} {'size':>6} {'coeffs':>10} {'axpy':>10} {'combine':>10} {'speedmax':>10}")
    for n in (64, 128, 256):
        for name, t_coeff, t_axpy, t_comb, t_speed in bench_kernels(n, args.repeats):
            print(f"{name:<8} {n:>4}^2 {t_coeff * 1e6:>8.1f}us {t_axpy * 1e6:>8.1f}us "
                  f"{t_comb * 1e6:>8.1f}us {t_speed * 1e6:>8.1f}us")
    if _kernels_cy is None:
        print("compiled backend unavailable; only the NumPy path was timed")

    step_time, active = bench_full_step(64, args.repeats)
    print(f"\nfull etd_rk4 step at 64^2 with the active backend ({active}): "
          f"{step_time * 1e3:.2f} ms")


if __name__ == "__main__":
    main()
