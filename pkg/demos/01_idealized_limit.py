"""
The infinite-frequency limit
============================

When the precession is much faster than anything else, one cycle reduces to
a z-rotation by ``2 phi`` followed by partial dephasing in the x basis with
strength set by ``theta = g dt_m``. This script walks through its spectrum,
the quadratic approach of the slow eigenvalue to one, and the projective
case ``theta = pi/4``.
"""
import math

import numpy as np

from zenolike.fixedpoint import idealized_slow_gap, scaling_probe
from zenolike.measurement import kraus_from_channel
from zenolike.model import idealized_channel

np.set_printoptions(precision=5, suppress=True)

# At phi = 0 the spectrum is {1, 1, cos 2theta, cos 2theta}: the coherence
# along x survives, the y and z components are damped every cycle.
print("theta     eigenvalues at phi = 0")
for theta in np.linspace(0.2, 1.4, 5):
    vals = np.sort(np.linalg.eigvals(idealized_channel(theta, 0.0)).real)[::-1]
    print(f"{theta:.2f}  {vals}   cos 2theta = {math.cos(2 * theta):+.5f}")

# %%
# Switching on a little free evolution tilts the protected x coherence away
# from the measurement axis, so one eigenvalue leaves 1. The gap grows like
# 2 cot^2(theta) phi^2.
dtf = np.logspace(-4, -2, 9)
print("\ntheta     exponent   coefficient / (2 cot^2 theta)")
for theta in (math.pi / 8, math.pi / 4, math.pi / 3, 7 * math.pi / 16):
    fit = scaling_probe(theta, dtf)
    print(f"{theta:.4f}   {fit.exponent:.4f}     {fit.coefficient / (2 / math.tan(theta) ** 2):.5f}")

# %%
# The expansion needs phi << tan(theta). For small theta the quoted
# coefficient is only reached at much smaller phi:
theta = 0.05
for phi in (1e-2, 1e-3, 1e-4):
    print(f"theta = {theta}, phi = {phi:g}: gap / (2 cot^2 theta phi^2) = "
          f"{idealized_slow_gap(theta, phi) / (2 / math.tan(theta) ** 2 * phi ** 2):.4f}")

# %%
# At theta = pi/2 the dephasing is a full reflection (rho -> X rho X). The
# x-y block is then a rotation followed by a reflection, which always has a
# unit eigenvalue, so there is no gap to fit at any phi.
fit = scaling_probe(math.pi / 2, dtf)
print(f"\ntheta = pi/2: largest gap {np.max(fit.gaps):.1e}, degenerate fit = {fit.degenerate}")

# %%
# theta = pi/4 is a projective measurement of sigma_x whose outcome is
# discarded. The canonical Kraus operators are I/sqrt2 and X/sqrt2.
ks = kraus_from_channel(idealized_channel(math.pi / 4, 0.0))
for k in ks:
    print(np.round(k * math.sqrt(2), 12))
