#!/usr/bin/env python3
"""Time the compiled RK4 kernel against the pure-Python twin.

Runs the same biased-sine workload through both and reports steps per
second and the speedup. The trajectories are bit-identical; only the
wall time differs.
"""
import time

from cmutkit import BiasedSine, CmutCell, SimConfig, derive_lumped, simulate
from cmutkit import dynamics
from cmutkit import _integrator_py

try:
    from cmutkit import _integrator
except ImportError:
    _integrator = None


def time_kernel(kernel, cell, drive, config, repeats):
    saved = dynamics._kernel
    dynamics._kernel = kernel
    try:
        series = simulate(cell, drive, config)  # warm-up
        start = time.perf_counter()
        for _ in range(repeats):
            series = simulate(cell, drive, config)
        elapsed = (time.perf_counter() - start) / repeats
    finally:
        dynamics._kernel = saved
    return elapsed, len(series.times) - 1


def main():
    cell = CmutCell(
        vibrating_radius=85e-6,
        membrane_thickness=3e-6,
        gap=0.7e-6,
        electrode_thickness=2.07e-6,
    )
    params = derive_lumped(cell)
    drive = BiasedSine(v_dc=60.0, v_ac=10.0, frequency=params.lumped_frequency)
    config = SimConfig(dt=1.0 / (200.0 * params.lumped_frequency), duration=2e-4)

    py_time, steps = time_kernel(_integrator_py, cell, drive, config, repeats=3)
    print(f"workload: {steps} RK4 steps, biased-sine drive")
    print(f"python   kernel: {py_time * 1e3:8.2f} ms  "
          f"({steps / py_time:,.0f} steps/s)")
    if _integrator is None:
        print("compiled kernel: not built in this environment")
        return
    c_time, _ = time_kernel(_integrator, cell, drive, config, repeats=10)
    print(f"compiled kernel: {c_time * 1e3:8.2f} ms  "
          f"({steps / c_time:,.0f} steps/s)")
    print(f"speedup: {py_time / c_time:.1f}x")


if __name__ == "__main__":
    main()
