"""Numerical laboratory for Rényi entropy power inequalities.

Densities live on uniform one-dimensional grids (``GridDensity``) or as
radial profiles in d dimensions (``RadialDensity``). On top of those sit
Rényi entropies, exact step-function convolution, s-concavity tests, the
closed-form constants for s-concave summands, and a mass-transfer coupling.
"""

__version__ = "0.1.0"

from .constants import (
    ConstantBundle,
    SimplexWeights,
    alpha_theorem3,
    big_C_s,
    c_theorem2,
    constant_bundle,
    holder_conjugate,
    r0_theorem3,
    ratio_diagnostics,
    verify_simplex_min,
)
from .convolve import CltTrace, clt_iterate, convolve, hoeffding_tail_check, is_symmetric_unimodal
from .coupling import (
    MixDensity,
    TransferCoupling,
    build_transfer,
    canonical_example,
    entropy_gain,
    find_shift_set,
    reverse_epi_corollary,
    sup_coupling_check,
)
from .density import (
    GridDensity,
    ParetoTruncSpec,
    RadialDensity,
    make_gaussian,
    make_pareto_trunc,
    make_two_block,
    make_uniform,
    moments,
    scale_density,
)
from .entropy import GaussianSpec, RenyiOrder, entropy_power, gaussian_renyi, renyi_entropy, renyi_entropy_radial
from .epi import counterexample_experiment, epi_check, info_young_deficit, linearized_check, modified_epi_check
from .sconcave import CertReport, certify_s_concave, check_G_logconcave, entropy_compare_bound, g_function
