"""
How long can a chain be and still create every eigenvalue?
==========================================================

The smallest eigenvalue the receiver can get is max(1/2, 1 - r_max^2),
where r_max is the best transfer amplitude. Once r_max drops below
1/sqrt(2), lambda = 1/2 is out of reach. The largest length that still
makes it is the critical length. Alternating the couplings can stretch it.
"""

from spinline import build_profile, critical_length, lambda_min_cr
from spinline.region import lambda_min_direct, find_t0

# %%
report = critical_length("homogeneous", "standard", range(2, 41))
print("homogeneous N_c =", report.n_c)
for rec in report.records[30:36]:
    print(f"  N={rec.n}: r_max={rec.r_max:.5f}  lambda_min={rec.lambda_min_cr:.6f}")

# %%
# The closed form is checked against a brute-force search over the controls
spec = build_profile("homogeneous", 38)
t0 = find_t0(spec, (0, 57)).t0
print(f"N=38 closed form {lambda_min_cr(spec, (0, 57)):.8f}, brute force {lambda_min_direct(spec, [t0]):.8f}")

# %%
# A few alternation ratios d for even chains, read in the late window
sweep = critical_length("alternating", "alt-w2", range(2, 81, 2), d_values=[0.1, 0.5, 1.0, 1.5])
for d, nc in sweep.n_c_by_d:
    print(f"alternating d={d}: N_c={nc}")
