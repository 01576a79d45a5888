"""
Which receiver states can be created?
=====================================

The sender prepares a pure state of its first two nodes with four control
angles. Only the two alphas change the receiver's eigenvalue lambda and the
eigenvector angle beta1; the phases are fixed by the phase-matching rule.
Sweeping the alphas therefore draws a two-dimensional region in the
(lambda, beta1) plane.
"""

import math

import numpy as np

from spinline import build_profile, creatable_map, find_t0
from spinline.region import rasterize

# %%
# Perfect transfer reaches every point of the rectangle [1/2, 1] x [0, 1]
m = creatable_map(build_profile("ekert", 20), math.pi, 401)
print(f"ekert N=20:   min lambda={m.lam.min():.6f}  beta1 in "
      f"[{np.nanmin(m.beta1):.3f}, {np.nanmax(m.beta1):.3f}]")

# %%
# A short uniform chain at its best time still reaches lambda = 1/2, but a
# long one is squeezed into a corner next to (1, 0)
for n in (6, 60, 120):
    spec = build_profile("homogeneous", n)
    t0 = find_t0(spec, (0, 1.5 * n)).t0
    m = creatable_map(spec, t0, 201)
    cells = rasterize(m.lam, m.beta1)
    print(f"homogeneous N={n:3d} at t0={t0:8.3f}: lambda >= {m.lam.min():.3f}, "
          f"beta1 <= {np.nanmax(m.beta1):.3f}, {cells.mean():.1%} of the rectangle")

# %%
# The map is stored row by row; the first rows of the CSV look like this
print("\n".join(m.to_csv().splitlines()[:4]))
