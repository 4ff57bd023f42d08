"""
Phase sensitivity against squeezing
===================================

Acceleration maps to a squeezing parameter r. Sweeping r at fixed N shows the
QFI falling monotonically, and the dual-rail encoding always below the single rail.
"""

import math

import numpy as np

from unruhqfi import ModeSpec, squeezing_from_mode, study

# %%
# A mode frequency and acceleration fix r through tanh r = exp(-pi omega / a).
mode = ModeSpec(omega=1.0, accel=2.0)
print("r =", squeezing_from_mode(mode), " check:", math.atanh(math.exp(-math.pi / 2)))

# %%
rs = np.round(np.arange(0.0, 1.41, 0.2), 12)
single = study.sweep_over_r("single", 2, rs, precision=1e-5)
dual = study.sweep_over_r("dual", 2, rs, precision=1e-5)
print(" r      single     dual      cutoff")
for s, d in zip(single, dual):
    print(f"{s.r:4.1f} {s.qfi:10.5f} {d.qfi:10.5f} {s.dim_used:6d}")
