"""Closed-form EPI constants for s-concave densities and numerical checks of their derivation.

Notation: ``r`` is the Rényi order in (0, 1), ``rp = r/(r-1)`` its Hölder
conjugate (negative), ``s`` in (-1/d, 0) the concavity parameter, ``n`` the
number of summands and ``lam`` a point of the probability simplex.

The constant of the s-concave EPI is ``exp(min F)`` with
``F(lam) = A(lam) + (2/d) * sum_k g_k(lam)``; the minimum sits at the
uniform weight vector, which :func:`verify_simplex_min` checks by sampling.
"""

from __future__ import annotations

import json
import math
from dataclasses import asdict, dataclass

import numpy as np

SQRT3_FACTOR = 2.0 / (1.0 + math.sqrt(3.0))


@dataclass(frozen=True)
class SimplexWeights:
    lambdas: tuple

    def __post_init__(self):
        lam = np.asarray(self.lambdas, dtype=float)
        if lam.ndim != 1 or lam.size == 0:
            raise ValueError("weights must be a non-empty vector")
        if np.any(lam < 0):
            raise ValueError("weights must be non-negative")
        if abs(lam.sum() - 1.0) > 1e-12:
            raise ValueError(f"weights sum to {lam.sum()!r}, not 1")
        object.__setattr__(self, "lambdas", tuple(float(x) for x in lam))

    @property
    def array(self) -> np.ndarray:
        return np.array(self.lambdas)

    def __len__(self):
        return len(self.lambdas)


def _lam(lam) -> np.ndarray:
    if isinstance(lam, SimplexWeights):
        return lam.array
    return SimplexWeights(tuple(np.atleast_1d(lam))).array


@dataclass
class ConstantBundle:
    s: float
    r: float
    dim: int
    n: int
    r_prime: float
    c: float
    r0: float
    alpha: float | None
    big_C: float

    def to_json(self) -> str:
        return json.dumps(asdict(self))


# -- domain checks -------------------------------------------------------


def check_s(s: float, dim: int) -> None:
    if dim < 1:
        raise ValueError("dimension must be a positive integer")
    if not -1.0 / dim < s < 0:
        raise ValueError(f"s must lie in (-1/d, 0) = ({-1.0 / dim}, 0); got {s}")


def check_sr(s: float, r: float, dim: int) -> None:
    check_s(s, dim)
    if not -s * dim < r < 1:
        raise ValueError(f"r must lie in (-s*d, 1) = ({-s * dim}, 1); got {r}")


# -- elementary pieces ---------------------------------------------------


def holder_conjugate(r: float) -> float:
    if r == 1:
        raise ValueError("r = 1 has no finite Hölder conjugate")
    if not r > 0:
        raise ValueError("order must be positive")
    return r / (r - 1)


def discrete_entropy(lam) -> float:
    lam = _lam(lam)
    p = lam[lam > 0]
    return float(-np.sum(p * np.log(p)))


def _xlogx1(x):
    """``(1 + x) log(1 + x)``."""
    return (1 + x) * np.log1p(x)


def A_of_lambda(lam, r: float) -> float:
    if not 0 < r < 1:
        raise ValueError("A(lambda) is defined for r in (0, 1)")
    lam = _lam(lam)
    rp = holder_conjugate(r)
    q = abs(rp)
    # (1 - t/rp) = 1 + t/|rp| for rp < 0
    return float(rp * (_xlogx1(1 / q) - np.sum(_xlogx1(lam / q))))


def g_k_of_lambda(lam, r: float, s: float, k: int, dim: int | None = None) -> float:
    lam = _lam(lam)
    dim = k if dim is None else dim
    check_sr(s, r, dim)
    if not 1 <= k <= dim:
        raise ValueError("k must lie in 1..d")
    n = lam.size
    rp = holder_conjugate(r)
    ks = k * s
    u = 1 - lam / rp
    args = np.concatenate([[1 + ks, 1 + ks / r], 1 + ks * u])
    if np.any(args <= 0):
        raise ValueError("logarithm argument non-positive: r too close to -s*d")
    return float(
        (1 - n) * rp * math.log1p(ks)
        + (1 - rp) * math.log1p(ks / r)
        + rp * np.sum(u * np.log1p(ks * u))
    )


def F_of_lambda(lam, s: float, r: float, dim: int) -> float:
    """``A(lam) + (2/d) sum_k g_k(lam)``, the log of the linearized EPI constant at ``lam``."""
    return A_of_lambda(lam, r) + (2.0 / dim) * sum(
        g_k_of_lambda(lam, r, s, k, dim) for k in range(1, dim + 1)
    )


# -- closed-form constants ----------------------------------------------


def log_c_theorem2(s: float, r: float, dim: int, n: int) -> float:
    check_sr(s, r, dim)
    if n < 2:
        raise ValueError("need at least two summands")
    q = abs(holder_conjugate(r))
    t = 1 / (n * q)
    out = math.log(r) / (1 - r) + (1 + n * q) * math.log1p(t)
    bracket = 0.0
    for k in range(1, dim + 1):
        ks = k * s
        bracket += (
            q * (n - 1) * math.log1p(ks)
            + (1 + q) * math.log1p(ks / r)
            - (1 + n * q) * math.log1p(ks * (1 + t))
        )
    return out + (2.0 / dim) * bracket


def c_theorem2(s: float, r: float, dim: int, n: int) -> float:
    """EPI constant for n independent s-concave summands (evaluated in log space)."""
    return math.exp(log_c_theorem2(s, r, dim, n))


def big_C_s(s: float, r: float, dim: int) -> float:
    check_sr(s, r, dim)
    total = 0.0
    for k in range(1, dim + 1):
        ks = k * s
        arg = 1 + ks * (r + 1) / (2 * r)
        if arg <= 0:
            raise ValueError("logarithm argument non-positive in C(s)")
        total += math.log1p(ks / r) + r * math.log1p(ks) - (r + 1) * math.log(arg)
    return 2.0 / dim * total


def r0_theorem3(s: float, dim: int) -> float:
    check_s(s, dim)
    return 1.0 / (1.0 - SQRT3_FACTOR * (1.0 + 1.0 / (s * dim)))


def alpha_theorem3(s: float, r: float, dim: int) -> float:
    """Exponent of the modified EPI ``N(X+Y)^a >= N(X)^a + N(Y)^a``."""
    check_sr(s, r, dim)
    r0 = r0_theorem3(s, dim)
    if not r > r0:
        raise ValueError(f"r must exceed r0 = {r0}")
    num = math.log(r) + (r + 1) * math.log((r + 1) / (2 * r)) + big_C_s(s, r, dim)
    denom = 1 + num / ((1 - r) * math.log(2))
    if not denom > 0:
        raise ValueError("alpha is not positive for these parameters")
    return 1.0 / denom


def constant_bundle(s: float, r: float, dim: int, n: int = 2) -> ConstantBundle:
    r0 = r0_theorem3(s, dim)
    return ConstantBundle(
        s=s,
        r=r,
        dim=dim,
        n=n,
        r_prime=holder_conjugate(r),
        c=c_theorem2(s, r, dim, n),
        r0=r0,
        alpha=alpha_theorem3(s, r, dim) if r > r0 else None,
        big_C=big_C_s(s, r, dim),
    )


# -- numerical verification ---------------------------------------------


def sample_simplex(rng: np.random.Generator, n: int, size: int) -> np.ndarray:
    """Uniform points on the simplex via normalized exponential spacings."""
    e = rng.exponential(size=(size, n))
    return e / e.sum(axis=1, keepdims=True)


def _F_batch(lams: np.ndarray, s: float, r: float, dim: int) -> np.ndarray:
    """Vectorized ``F`` over rows of ``lams``."""
    n = lams.shape[1]
    rp = holder_conjugate(r)
    q = abs(rp)
    A = rp * (_xlogx1(1 / q) - np.sum(_xlogx1(lams / q), axis=1))
    u = 1 - lams / rp
    g = np.zeros(lams.shape[0])
    for k in range(1, dim + 1):
        ks = k * s
        g += (
            (1 - n) * rp * math.log1p(ks)
            + (1 - rp) * math.log1p(ks / r)
            + rp * np.sum(u * np.log1p(ks * u), axis=1)
        )
    return A + 2.0 / dim * g


def verify_simplex_min(s: float, r: float, dim: int, n: int, samples: int = 10_000, seed: int = 0) -> dict:
    """Random search for the minimum of F over the simplex.

    Evaluates F at ``samples`` uniform random points plus every vertex and
    every edge midpoint. Returns the sampled minimum, the value at the uniform
    point, the closed-form log-constant and the seed.
    """
    check_sr(s, r, dim)
    if samples < 1000:
        raise ValueError("use at least 1000 samples")
    rng = np.random.default_rng(seed)
    pts = [sample_simplex(rng, n, samples), np.eye(n)]
    mids = [(np.eye(n)[i] + np.eye(n)[j]) / 2 for i in range(n) for j in range(i + 1, n)]
    pts.append(np.array(mids))
    lams = np.vstack(pts)
    vals = _F_batch(lams, s, r, dim)
    at_uniform = F_of_lambda(np.full(n, 1.0 / n), s, r, dim)
    i = int(np.argmin(vals))
    return {
        "min_found": float(vals[i]),
        "argmin": lams[i].tolist(),
        "at_uniform": at_uniform,
        "log_c": log_c_theorem2(s, r, dim, n),
        "seed": seed,
        "samples": samples,
    }


def ratio_diagnostics(s: float, r: float, dim: int, grid_pts: int = 1000, lam_min: float = 1e-6) -> dict:
    """Numerical checks of the monotonicity argument behind the exponent alpha (n = 2).

    On a grid of ``lam`` in ``[lam_min, 1/2]`` reports the forward differences
    of ``-A/H`` and of each ``-g_k/H``; for each k it also reports, on
    ``x in [0, 1/(2|r'|)]``, the functions W1, W2, T and U used in that
    argument, and whether ``1/|r'| <= (2/(1+sqrt 3)) (1/(k|s|) - 1)``.
    Contract flags are only meaningful when ``r > r0``.
    """
    check_sr(s, r, dim)
    rp = holder_conjugate(r)
    q = abs(rp)
    lam = np.linspace(lam_min, 0.5, grid_pts)
    pairs = np.column_stack([lam, 1 - lam])
    H = -(lam * np.log(lam) + (1 - lam) * np.log1p(-lam))
    A = rp * (_xlogx1(1 / q) - np.sum(_xlogx1(pairs / q), axis=1))
    neg_A_over_H = -A / H
    r0 = r0_theorem3(s, dim)
    report = {
        "s": s,
        "r": r,
        "dim": dim,
        "r0": r0,
        "in_proof_range": bool(r > r0),
        "lam": lam.tolist(),
        "dA": float(np.min(np.diff(neg_A_over_H))),
        "k": {},
    }
    x = np.linspace(0.0, 1.0 / (2 * q), grid_pts)
    y = 1.0 / q - x
    all_ok = report["dA"] >= -1e-9
    u = 1 - pairs / rp
    for k in range(1, dim + 1):
        ks = k * s
        g = (
            -rp * math.log1p(ks)
            + (1 - rp) * math.log1p(ks / r)
            + rp * np.sum(u * np.log1p(ks * u), axis=1)
        )
        neg_g_over_H = -g / H
        a = 1 + ks * (1 + x)
        b = 1 + ks * (1 + y)
        W1 = x * y * (1 / a + 1 / b)
        W2 = x * y * (1 / a**2 + 1 / b**2)
        T = a * b * (a**2 + b**2) - 2 * ks**2 * x * y * (a**2 + a * b + b**2)
        U = a**2 + b**2 + 4 * a * b - 2 * ks**2 * x * y
        cond = 1.0 / q <= SQRT3_FACTOR * (1.0 / (k * abs(s)) - 1.0)
        entry = {
            "dg": float(np.min(np.diff(neg_g_over_H))),
            "dW1": float(np.min(np.diff(W1))),
            "dW2": float(np.min(np.diff(W2))),
            "T_min": float(T.min()),
            "U0": float(U[0]),
            "U_spread": float(U.max() - U.min()),
            "ab_identity_gap": float(
                np.max(np.abs(a * b - ks**2 * x * y - (1 + ks) * (1 + ks / r)))
            ),
            "condition": bool(cond),
        }
        entry["ok"] = bool(
            entry["dg"] >= -1e-9
            and entry["U_spread"] <= 1e-9 * abs(entry["U0"])
            and entry["T_min"] >= -1e-9
        )
        all_ok = all_ok and entry["ok"]
        report["k"][k] = entry
    report["contracts_hold"] = bool(all_ok)
    return report
