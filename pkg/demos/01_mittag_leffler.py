"""
The Mittag-Leffler function
===========================

``E_alpha(z)`` interpolates between ``exp(z)`` (alpha = 1) and
``cosh(sqrt(z))`` (alpha = 2). For the relaxation ``E_delta(-t^delta)``
with ``delta < 1`` the decay is fast at first and then only algebraic.
"""

import numpy as np

from fracreg import mittag_leffler, ml_time_derivative

# %%
# Reductions to elementary functions.
z = np.linspace(-5, 5, 11)
print("max |E_1(z) - exp(z)|        =", np.max(np.abs(mittag_leffler(1.0, z) - np.exp(z))))
z = np.linspace(0, 5, 11)
print("max |E_2(z) - cosh(sqrt z)|  =", np.max(np.abs(mittag_leffler(2.0, z) - np.cosh(np.sqrt(z)))))

# %%
# Relaxation curves for a few orders.
t = np.linspace(0, 5, 201)
curves = {d: mittag_leffler(d, -(t**d)) for d in (0.3, 0.5, 0.7, 1.0)}
for d, v in curves.items():
    print(f"delta = {d}: E(-t^delta) at t = 5 is {v[-1]:.5f}")

# %%
# The slope blows up at t = 0 like t^(delta - 1).
for d in (0.3, 0.5, 0.7):
    print(f"delta = {d}: d/dt E at t = 1e-6 is {ml_time_derivative(d, 1e-6):.4e}")

# %%
try:
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt
except ImportError:
    raise SystemExit(0)

fig, ax = plt.subplots()
for d, v in curves.items():
    ax.plot(t, v, label=rf"$\delta = {d}$")
ax.set_xlabel("t")
ax.set_ylabel(r"$E_\delta(-t^\delta)$")
ax.legend()
fig.savefig("mittag_leffler.png", dpi=120)
