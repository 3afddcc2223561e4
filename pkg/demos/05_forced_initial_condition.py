"""
Which initial values admit a smooth start?
==========================================

If a solution has continuous time derivatives up to t = 0, then its
Caputo derivative vanishes there and the initial value must solve the
steady problem ``L0 phi0 = f(., 0)``. With zero source and zero boundary
values this forces ``phi0 = 0``, so the only smooth solution is zero.
"""

import math

from fracreg import SpaceGrid, diagnose, theorem_residual
from fracreg.problems import example1, example2, manufactured

space = SpaceGrid(0.0, math.pi, 128)

# %%
for P in (example1(0.5), example2(0.5), manufactured(0.5)):
    print(f"== {P.name}: residual {theorem_residual(P.spec, space):.3e}")

# %%
# The full report for the initial-layer data.
P = example1(0.5)
print(diagnose(P.spec, space, exact=P.exact_problem).summary())
