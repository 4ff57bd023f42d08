"""
Exponential decay past the optimum
==================================

Beyond N* the single-rail QFI falls roughly as N^2 exp(-a N + b). The fit is
linear in log space. The squeezing values here are moderate so it runs in
seconds; large r needs cutoffs in the thousands.
"""

import numpy as np

from unruhqfi import study

fits = []
for r in (1.0, 1.2, 1.4, 1.6):
    fit = study.tail_fit("single", r, precision=1e-5)
    fits.append(fit)
    print(f"r={r:3.1f}  a={fit.a_coeff:.4f}  b={fit.b_coeff:+.4f}  R^2={fit.r_squared:.5f}  N in {fit.n_range}")

slope = study.slope_of_a(fits, 1.0, 1.6)
print(f"da/dr = {slope.gradient:.4f} +- {slope.stderr:.4f}")

# %%
# Fitted curve against data at the last r.
points = study.sweep_over_n("single", fits[-1].r, range(1, fits[-1].n_range[1] + 1), precision=1e-5)
n = np.array([p.n for p in points])
print(np.column_stack([n, [p.qfi for p in points], fits[-1].predict(n)]).round(5))
