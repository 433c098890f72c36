"""
Steering the fixed point with the detector
==========================================

With a ground-state detector every Brouwer fixed point sits on the z axis.
Tilting the detector moves it off the axis, and an inverse search over
``(g, dt_f, dt_m)`` and the detector state can place it almost anywhere.
"""
import time

import numpy as np

from zenolike.fixedpoint import SearchConfig, detector_sweep, fibonacci_sphere, freeze_design
from zenolike.model import ModelParams, QubitState

np.set_printoptions(precision=4, suppress=True)

sweep = detector_sweep(ModelParams(1.1, 2.3, 3.7), n_dirs=64, n_radii=4)
fp = sweep.fixed_points
print(f"{len(fp)} detector states: fixed-point |r| from {np.linalg.norm(fp, axis=1).min():.3f} "
      f"to {np.linalg.norm(fp, axis=1).max():.3f}, z from {fp[:, 2].min():.3f} to {fp[:, 2].max():.3f}")

# %%
# Inverse design for a handful of directions at Bloch radius 0.85.
t0 = time.perf_counter()
for d in fibonacci_sphere(6):
    res = freeze_design(QubitState.from_bloch(0.85 * d), SearchConfig(budget=3000))
    print(f"target {0.85 * d} -> fixed point {res.fixed_point.bloch}  "
          f"g={res.params.g_over_omega:.3f} dtf={res.params.omega_dtf:.3f} dtm={res.params.omega_dtm:.3f}  "
          f"detector {res.detector.bloch}")
print(f"{time.perf_counter() - t0:.1f}s")

# %%
# Pure targets on the equator are at the edge of what one cycle can fix.
res = freeze_design(QubitState.from_bloch([1.0, 0, 0]), SearchConfig(budget=3000))
print(f"\ntarget +x: closest fixed point {res.fixed_point.bloch}, converged = {res.converged}")
