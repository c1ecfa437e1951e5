# %% [markdown]
# # Constants for s-concave summands
#
# For s ∈ (−1/d, 0) and r ∈ (−sd, 1) there is an explicit constant c such that
# N_r(X+Y) ≥ c (N_r(X) + N_r(Y)) for independent s-concave X, Y. Above a
# threshold r0 an exponent α makes the inequality hold with constant one.

# %%
import numpy as np

from renyi_epi import alpha_theorem3, c_theorem2, constant_bundle, epi_check, modified_epi_check, verify_simplex_min
from renyi_epi.sconcave import certify_s_concave, sample_s_concave

# %%
print(constant_bundle(-0.1, 0.5, 1).to_json())
print(constant_bundle(-0.1, 0.9, 1).to_json())

# %% [markdown]
# The constant is a minimum over the weight simplex, attained at uniform
# weights. Random sampling should never go below it.

# %%
res = verify_simplex_min(-0.1, 0.5, 1, 3, samples=10_000, seed=0)
print(res)

# %% [markdown]
# Random s-concave pairs: the observed ratio sits well above c.

# %%
rng = np.random.default_rng(0)
s, r = -0.1, 0.5
c = c_theorem2(s, r, 1, 2)
ratios = []
while len(ratios) < 10:
    f, g = sample_s_concave(rng, s), sample_s_concave(rng, s)
    if certify_s_concave(f, s).certified and certify_s_concave(g, s).certified:
        ratios.append(epi_check([f, g], r, c).ratio)
print(f"c={c:.4f}, ratios min={min(ratios):.4f} max={max(ratios):.4f}")

# %%
alpha = alpha_theorem3(s, 0.9, 1)
lhs, rhs = modified_epi_check(f, g, 0.9, alpha)
print(f"alpha={alpha:.4f}: N^alpha(X+Y)={lhs:.4f} >= {rhs:.4f}")
