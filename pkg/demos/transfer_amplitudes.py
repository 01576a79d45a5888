"""
Excitation transfer along a chain
=================================

An excitation placed on node 1 spreads through the chain. Its amplitude on
the last node, p_N1(t), decides how much of the sender's state ever reaches
the receiver. Engineered couplings move it across perfectly at t = pi,
while a uniform chain only gets part of the way.
"""

import math

import numpy as np

from spinline import build_profile, decompose_chain, find_t0
from spinline.spectral import amplitude_series

# %%
# Uniform couplings: a ballistic wave front with dispersion
n = 20
uniform = build_profile("homogeneous", n)
sd = decompose_chain(uniform)
times = np.linspace(0, 1.5 * n, 7)
for t, p in zip(times, amplitude_series(sd, n, 1, times)):
    print(f"homogeneous  t={t:6.2f}  |p_N1|={abs(p):.4f}")

best = find_t0(uniform, (0, 1.5 * n))
print(f"best arrival t0={best.t0:.4f} with |p_N1|={best.r_max:.4f}")

# %%
# Couplings sqrt(i (N - i)) make the spectrum equally spaced, so every mode
# rephases at t = pi and the excitation lands entirely on node N
ekert = build_profile("ekert", n)
res = find_t0(ekert, (0, 4))
print(f"ekert        t0={res.t0:.9f} (pi={math.pi:.9f})  |p_N1|={res.r_max:.12f}")

# %%
# The amplitude keeps its whole history in a phase as well as a modulus
p = amplitude_series(decompose_chain(ekert), n, 1, [math.pi])[0]
print(f"p_N1(pi) = {p:.6f}, phase/2pi = {np.angle(p) / (2 * np.pi) % 1:.6f}")
