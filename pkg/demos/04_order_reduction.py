"""
Order reduction on uniform meshes and the graded-mesh remedy
============================================================

The L1 scheme is of order 2 - delta for smooth solutions. With the initial
layer the global max-norm error drops to order delta on a uniform mesh;
grading the mesh toward t = 0 recovers it. Takes about a minute.
"""

import math

from fracreg import SpaceGrid, convergence_study
from fracreg.problems import example1, manufactured

space = SpaceGrid(0.0, math.pi, 512)
M_list = (32, 64, 128, 256, 512)

# %%
for label, P, grading in [
    ("layer, uniform", example1(0.5), 1.0),
    ("smooth, uniform", manufactured(0.5), 1.0),
    ("layer, graded r = 3", example1(0.5), 3.0),
]:
    report = convergence_study(P.spec, space, M_list, grading, exact=P.exact)
    print(f"== {label}")
    print(report.table())
    print()
