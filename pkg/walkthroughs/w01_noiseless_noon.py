"""
NOON states without acceleration
================================

With no squeezing the channel is the identity, so a NOON state keeps its full
phase sensitivity and the QFI sits exactly on the Heisenberg value N^2.
"""

import numpy as np

from unruhqfi import NoonSpec, qfi_converged

# %%
# Both encodings reach N^2 at r = 0.
for encoding in ("single", "dual"):
    values = np.array([qfi_converged(NoonSpec(encoding, n), 0.0, 1e-5).value for n in range(1, 9)])
    print(encoding, values.round(10))

# %%
# The dense state has support on |0><0|, |N><N| and the two coherences only.
from unruhqfi import fock

rho = fock.rob_state(NoonSpec("single", 3, theta=0.7), 0.0, 5)
print(np.argwhere(np.abs(rho) > 0))
