"""s-concavity certification and the log-concavity of ``C(r) * int f^r`` in r.

A density is s-concave when its value at every midpoint dominates the
s-mean of its values at the endpoints, wherever both endpoint values are
positive. On a grid the test is run over every index triple ``(i, m, j)``
with ``m = (i + j) / 2``.
"""

from __future__ import annotations

import json
import math
from dataclasses import asdict, dataclass

import numpy as np

from .density import GridDensity, RadialDensity
from .entropy import renyi_entropy, renyi_entropy_radial

CERT_TOL = 1e-9


def s_mean(a, b, s: float):
    """Equal-weight s-mean of positive arrays ``a`` and ``b``.

    ``s = 0`` is the geometric mean, ``s = -inf`` the minimum and
    ``s = +inf`` the maximum.
    """
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    if s == -math.inf:
        return np.minimum(a, b)
    if s == math.inf:
        return np.maximum(a, b)
    if s == 0:
        return np.sqrt(a * b)
    # log-sum-exp keeps a^s, b^s in range for large |s| and wide ratios
    la, lb = np.log(a), np.log(b)
    if abs(s) < 1e-6:
        # second-order expansion around the geometric mean; cancellation-free
        return np.sqrt(a * b) * np.exp(s * (la - lb) ** 2 / 8)
    out = np.exp((np.logaddexp(s * la, s * lb) - math.log(2)) / s)
    # the mean always lies between the two values; clamp round-off
    return np.clip(out, np.minimum(a, b), np.maximum(a, b))


@dataclass
class CertReport:
    verdict: str
    worst_margin: float
    witness: tuple | None = None
    reason: str = ""

    @property
    def certified(self) -> bool:
        return self.verdict == "certified"

    def to_json(self) -> str:
        return json.dumps(asdict(self))


def _support_gap(v: np.ndarray):
    pos = np.flatnonzero(v > 0)
    gaps = np.flatnonzero(np.diff(pos) > 1)
    if gaps.size == 0:
        return None
    return int(pos[gaps[0]]), int(pos[gaps[0] + 1])


def midpoint_violations(v: np.ndarray, s: float, shift: int) -> np.ndarray:
    """Margins ``v[m] - M_s(v[m-shift], v[m+shift])`` for every admissible midpoint.

    Entries are ``+inf`` where either endpoint is zero or out of range.
    """
    n = v.size
    out = np.full(n, np.inf)
    if shift >= n or shift < 1:
        return out
    mid = v[shift : n - shift]
    lo = v[: n - 2 * shift]
    hi = v[2 * shift :]
    ok = (lo > 0) & (hi > 0)
    margin = np.full(mid.size, np.inf)
    margin[ok] = mid[ok] - s_mean(lo[ok], hi[ok], s)
    out[shift : n - shift] = margin
    return out


def certify_s_concave(f: GridDensity, s: float, tol: float = CERT_TOL) -> CertReport:
    """Midpoint test of s-concavity over every grid triple.

    A refutation carries the witness ``(x, y, midpoint)`` at the worst
    triple. Non-contiguous support is refuted outright, with the witness
    spanning the first gap.
    """
    if not tol > 0:
        raise ValueError("tolerance must be positive")
    v = f.values
    x = f.centers
    gap = _support_gap(v)
    if gap is not None:
        i, j = gap
        return CertReport(
            "refuted",
            -float(max(v[i], v[j])),
            (float(x[i]), float(x[j]), float((x[i] + x[j]) / 2)),
            reason="support is not an interval",
        )
    pos = np.flatnonzero(v > 0)
    lo, hi = pos[0], pos[-1] + 1
    w = v[lo:hi]
    worst, where = math.inf, None
    for k in range(1, (w.size - 1) // 2 + 1):
        margins = midpoint_violations(w, s, k)
        m = int(np.argmin(margins))
        if margins[m] < worst:
            worst, where = float(margins[m]), (m, k)
    if where is None:
        return CertReport("certified", math.inf)
    m, k = where
    witness = (float(x[lo + m - k]), float(x[lo + m + k]), float(x[lo + m]))
    if worst < -tol:
        return CertReport("refuted", worst, witness, reason="midpoint inequality fails")
    return CertReport("certified", worst, witness)


def sample_s_concave(rng: np.random.Generator, s: float, h: float = 2e-3, max_half_width: float = 3.0) -> GridDensity:
    """Random s-concave density sampled pointwise on a grid (s < 0 or s = 0).

    Built as ``phi^(1/s)`` (``exp(-phi)`` for ``s = 0``) with ``phi`` a random
    convex function: a positive base plus absolute-value and quadratic terms
    around a random centre, restricted to a random interval.
    """
    a = rng.uniform(0.3, max_half_width)
    b = rng.uniform(0.3, max_half_width)
    c = rng.uniform(-0.3, 0.3) * min(a, b)
    n = int(round((a + b) / h))
    step = (a + b) / n
    x = -a + (np.arange(n) + 0.5) * step
    u = x - c
    k1, k2 = rng.uniform(0, 1.5), rng.uniform(0, 1.0)
    tilt = rng.uniform(-0.5, 0.5) * k1
    phi = k1 * np.abs(u) + tilt * u + k2 * u**2
    if s == 0:
        vals = np.exp(-phi)
    elif s < 0:
        base = rng.uniform(0.2, 2.0)
        vals = (base + phi - phi.min()) ** (1.0 / s)
    else:
        raise ValueError("sampler covers s <= 0 only")
    return GridDensity.normalized(-a, step, vals)


def C_of_r(r: float, s: float, dim: int) -> float:
    """``(r + s)(r + 2s)...(r + dim*s)``."""
    return float(np.prod([r + k * s for k in range(1, dim + 1)]))


def _integral_power(f, r: float) -> float:
    if isinstance(f, RadialDensity):
        return float(np.sum(f.shell_weights * f.profile ** r))
    v = f.values
    return float(np.sum(v[v > 0] ** r) * f.h)


def _dim(f) -> int:
    return f.dim if isinstance(f, RadialDensity) else 1


def g_function(f, s: float, r: float) -> float:
    """``C(r) * int f^r`` for a grid or radial density."""
    d = _dim(f)
    if not r > max(0.0, -s * d):
        raise ValueError(f"r must exceed max(0, -s*d) = {max(0.0, -s * d)}")
    return C_of_r(r, s, d) * _integral_power(f, r)


def check_G_logconcave(f, s: float, r_grid, tol: float = 1e-8) -> float:
    """Worst midpoint-concavity margin of ``log G`` over consecutive triples of ``r_grid``.

    Triples whose middle point is not the average of its neighbours are
    skipped. ``tol`` is the tolerance used to decide equal spacing.
    """
    r_grid = np.asarray(r_grid, dtype=float)
    if r_grid.size < 3:
        raise ValueError("need at least three orders")
    if np.any(np.diff(r_grid) <= 0):
        raise ValueError("orders must be strictly increasing")
    logG = np.array([math.log(g_function(f, s, r)) for r in r_grid])
    r1, r2, r3 = r_grid[:-2], r_grid[1:-1], r_grid[2:]
    even = np.abs(r2 - 0.5 * (r1 + r3)) <= 1e-9 * np.maximum(1.0, r2)
    if not even.any():
        raise ValueError("no evenly spaced triples in the order grid")
    margins = logG[1:-1] - 0.5 * (logG[:-2] + logG[2:])
    return float(margins[even].min())


def comparison_correction(s: float, r: float, q: float, dim: int) -> float:
    """``log[C(r)^(1/(1-r)) C(1)^((q-r)/((1-q)(1-r))) / C(q)^(1/(1-q))]``."""
    return (
        math.log(C_of_r(r, s, dim)) / (1 - r)
        + (q - r) / ((1 - q) * (1 - r)) * math.log(C_of_r(1.0, s, dim))
        - math.log(C_of_r(q, s, dim)) / (1 - q)
    )


def entropy_compare_bound(f, s: float, r: float, q: float) -> tuple[float, float]:
    """Return ``(h_q(f), h_r(f) + correction)``; s-concave f gives lhs >= rhs."""
    d = _dim(f)
    if not (-s * d < r < q < 1 and r > 0):
        raise ValueError("orders must satisfy max(0, -s*d) < r < q < 1")
    ent = renyi_entropy_radial if isinstance(f, RadialDensity) else renyi_entropy
    return ent(f, q), ent(f, r) + comparison_correction(s, r, q, d)
