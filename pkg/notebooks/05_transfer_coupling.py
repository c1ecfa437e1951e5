# %% [markdown]
# # Beating independence with a dependent coupling
#
# Take X uniform on [0, 1/3] ∪ [2/3, 1]. Moving mass off the diagonal of the
# identical coupling makes (X+Y)/2 uniform on [0, 1], which has more entropy
# than X itself. For densities that are not (r−1)-concave a shift set can be
# found where a small transfer increases the order-r entropy.

# %%
import math

import numpy as np

from renyi_epi import build_transfer, canonical_example, entropy_gain, find_shift_set, make_two_block
from renyi_epi.coupling import delta_max

# %%
h_sum, h_diag = canonical_example(2.0)
print(f"h((X+Y)/2)={h_sum:.6f} (log 2={math.log(2):.6f}), h(X)={h_diag:.6f} (log 4/3={math.log(4/3):.6f})")

# %%
f = make_two_block(333)
x0, mask = find_shift_set(f, 2.0)
dmax = delta_max(f, x0, mask, 2.0)
print(f"shift x0={x0:.4f}, {mask.sum()} cells, delta_max={dmax:.4f}")
for frac in (0.1, 0.25, 0.5, 1.0):
    coupling, mix = build_transfer(f, x0, mask, frac * dmax)
    mx, my = coupling.marginals()
    print(f"delta={frac * dmax:.4f} gain={entropy_gain(f, mix.fhat, 2.0):.6f} "
          f"marginal error={max(np.abs(mx - f.values).max(), np.abs(my - f.values).max()):.1e}")
