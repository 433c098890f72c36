"""
Where are the Zeno-like points?
===============================

A grid scan over ``(g, dt_f, dt_m)`` with a ground-state detector flags
every channel whose second eigenvalue lies within ``eps`` of one. The
reference point is too narrow a feature for the default grid, so we zoom in
with a local grid, and then look at the states the flagged channels
preserve.
"""
import time

import numpy as np

from zenolike.errors import NumericalFailure
from zenolike.fixedpoint import ScanGrid, refine_zeno_point, zeno_preserved_state, zeno_scan
from zenolike.model import ModelParams, cycle_channel
from zenolike.reconcile import REFERENCE_PARAMS

np.set_printoptions(precision=4, suppress=True)

grid = ScanGrid()
t0 = time.perf_counter()
res = zeno_scan(grid, eps=1e-2)
print(f"default grid: {len(res)} points in {time.perf_counter() - t0:.1f}s, {res.flagged.sum()} flagged")

# %%
# Closest default-grid points to the reference parameters. The basin where
# the gap is below 1e-2 is only about 0.03 wide in dt_f and dt_m, while
# the grid step is 0.2.
d = np.abs(res.params - np.array(REFERENCE_PARAMS)) / np.array([0.05, 0.201, 0.201])
near = np.all(d <= 1, axis=1)
print("adjacent grid points and their gaps:")
for k in np.flatnonzero(near):
    print("   ", res.params[k], f"{res.min_gap[k]:.3f}")

local = ScanGrid(g=(0.86, 0.87, 3), dtf=(15.0, 15.3, 16), dtm=(14.8, 15.1, 16))
loc = zeno_scan(local, eps=1e-2)
print(f"local 0.02-spaced grid: {loc.flagged.sum()} of {len(loc)} flagged")

# %%
# Refine a random subset of flagged points and build the preserved state of
# each. Two kinds of point show up. Where the population block becomes the
# identity the preserved states lie on the z axis. Where a coherence
# eigenvalue reaches one the preserved states are pure states on the
# equator, along a diameter through I/2 whose direction varies from point to
# point.
rng = np.random.default_rng(0)
pick = rng.choice(res.flagged_indices, 120, replace=False)
blochs, missed = [], 0
for k in pick:
    ref = refine_zeno_point(ModelParams(*res.params[k]), box=0.05, maxfev=1500)
    if not ref.converged:
        missed += 1
        continue
    try:
        blochs.append(zeno_preserved_state(cycle_channel(ref.params)).bloch)
    except NumericalFailure:
        missed += 1
b = np.array(blochs)
axial = np.abs(b[:, 2]) > 0.5
print(f"\n{len(b)} refined, {missed} stayed near misses inside a 5% box")
print(f"z-axis type: {axial.sum()}, equatorial type: {(~axial).sum()}")
eq = b[~axial]
if len(eq):
    print(f"equatorial: max |z| {np.abs(eq[:, 2]).max():.1e}, radius {np.linalg.norm(eq, axis=1).min():.6f}")
    # a diameter covers both phi and phi + pi
    phi = np.mod(np.arctan2(eq[:, 1], eq[:, 0]), np.pi)
    print("diameter orientations per 45 degree bin:", np.histogram(phi, 4, range=(0, np.pi))[0])
