"""
Caputo derivatives: quadrature against the L1 and L2 operators
==============================================================

The quadrature evaluates the defining integral directly and serves as the
reference. The L1 operator (0 < delta < 1) and the L2 operator
(1 < delta < 2) are the difference formulas used by the solver.
"""

import math

import numpy as np

from fracreg import (
    SampledFunction,
    TimeGrid,
    caputo_quadrature,
    l1_operator,
    l2_operator,
)

# %%
# sin t with delta = 0.5 at t = 1.
ref = caputo_quadrature(np.cos, 0.5, 1.0)
print(f"quadrature: {ref:.12f}")
for M in (16, 64, 256, 1024):
    f = SampledFunction.from_callable(TimeGrid(1.0, M), np.sin)
    print(f"L1, M = {M:5d}: error {abs(l1_operator(f, 0.5).values[-1] - ref):.3e}")

# %%
# t^3 with delta = 1.5; the exact value is 6 / Gamma(2.5).
exact = 6 / math.gamma(2.5)
for M in (16, 64, 256, 1024):
    f = SampledFunction.from_callable(TimeGrid(1.0, M), lambda s: s**3)
    print(f"L2, M = {M:5d}: error {abs(l2_operator(f, 1.5, 0.0).values[-1] - exact):.3e}")

# %%
# A function that is not smooth at 0: t^delta has the constant derivative
# Gamma(1 + delta), so it does not vanish as t -> 0.
d = 0.5
for t in (1e-1, 1e-3, 1e-5):
    value = caputo_quadrature(lambda s: d * s ** (d - 1), d, t)
    print(f"D^0.5 t^0.5 at t = {t:.0e}: {value:.10f}")
