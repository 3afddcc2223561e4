"""
The initial layer of the fractional heat equation
=================================================

``v = E_delta(-t^delta) sin x`` solves ``D^delta v = v_xx`` with
``v(x, 0) = sin x``. It is continuous up to t = 0, but ``v_t`` blows up
like ``t^(delta - 1)``, and the Caputo derivative tends to ``-sin x``
rather than zero.
"""

import math

import numpy as np

from fracreg import (
    corollary1_limit_check,
    estimate_singularity_exponent,
    exact_dt,
)
from fracreg.exactsol import example1_problem

x = math.pi / 2
t = np.logspace(-6, -3, 31)

# %%
# Fitted blow-up exponents; the asymptotic value is delta - 1. For
# delta = 0.3 the second series term still bends the slope on this window.
for d in (0.3, 0.5, 0.7):
    slope = estimate_singularity_exponent(np.column_stack([t, exact_dt(example1_problem(d), x, t)]))
    print(f"delta = {d}: fitted {slope:+.4f}, asymptotic {d - 1:+.1f}")

# %%
# The Caputo derivative at the midpoint as t -> 0+.
r = corollary1_limit_check(example1_problem(0.5), x, [1e-1, 1e-2, 1e-3, 1e-4])
for ti, v in zip(r.t, r.values):
    print(f"D^0.5 v(pi/2, {ti:.0e}) = {v:+.6f}")
print("vanishes:", r.vanishes)

# %%
try:
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt
except ImportError:
    raise SystemExit(0)

fig, ax = plt.subplots()
for d in (0.3, 0.5, 0.7):
    ax.loglog(t, np.abs(exact_dt(example1_problem(d), x, t)), label=rf"$\delta = {d}$")
ax.set_xlabel("t")
ax.set_ylabel(r"$|v_t(\pi/2, t)|$")
ax.legend()
fig.savefig("initial_layer.png", dpi=120)
