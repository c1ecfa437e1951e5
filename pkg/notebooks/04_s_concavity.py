# %% [markdown]
# # Certifying s-concavity
#
# A density is s-concave when f((x+y)/2) is at least the s-mean of f(x) and
# f(y). The certificate checks every midpoint pair on the grid.

# %%
import numpy as np

from renyi_epi import certify_s_concave, check_G_logconcave, make_gaussian, make_pareto_trunc, make_two_block
from renyi_epi.density import make_triangle

# %%
for name, f in [("gaussian", make_gaussian(1.0, 1e-2)), ("triangle", make_triangle(1.0, 1e-2)),
                ("two_block", make_two_block(33))]:
    for s in (-0.5, 0.0, 1.0):
        rep = certify_s_concave(f, s)
        print(f"{name:<10} s={s:<5} {rep.verdict:<10} margin={rep.worst_margin:.3g}")

# %% [markdown]
# For s-concave f the function r ↦ C(r) ∫ f^r is log-concave. The returned
# number is the smallest second difference of −log G, so it should be ≥ 0.

# %%
print("gaussian:", check_G_logconcave(make_gaussian(1.0, 1e-3), 0.0, np.arange(0.1, 5.0, 0.05)))
_, radial = make_pareto_trunc(10.0, 3.5, 1, 1e-3)
print("pareto:  ", check_G_logconcave(radial.to_grid(), -1 / 3.5, np.arange(0.3, 3.0, 0.05)))
