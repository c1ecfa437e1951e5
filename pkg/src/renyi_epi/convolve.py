"""Convolution of grid densities and entropy along the central limit theorem."""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field

import numpy as np
from scipy import signal

from .density import GridDensity, center, moments, resample, scale_density, unit_ball_volume
from .entropy import GaussianSpec, as_order, gaussian_renyi, renyi_entropy

DIRECT_LIMIT = 4096
MAX_DOUBLINGS = 8


def _conv_direct(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    return np.convolve(a, b)


def _conv_fft(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    return signal.fftconvolve(a, b)


def _raw_convolution(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    if a.size + b.size < DIRECT_LIMIT:
        return _conv_direct(a, b)
    return _conv_fft(a, b)


def same_step(f: GridDensity, g: GridDensity, rtol: float = 1e-9) -> bool:
    return math.isclose(f.h, g.h, rel_tol=rtol)


def convolve(f: GridDensity, g: GridDensity) -> GridDensity:
    """Density of X + Y for independent X ~ f, Y ~ g.

    Both inputs are read as step functions; the result holds the cell
    averages of their exact convolution on a grid whose support is the
    Minkowski sum of the two supports. That is the discrete convolution
    followed by a two-tap average, because the convolution of two cell
    indicators is a triangle centred on a cell edge.
    """
    if not same_step(f, g):
        raise ValueError(f"mismatched grid steps {f.h} and {g.h}")
    h = f.h
    raw = _raw_convolution(f.values, g.values) * h
    padded = np.concatenate([[0.0], raw, [0.0]])
    values = np.clip(0.5 * (padded[:-1] + padded[1:]), 0.0, None)
    mass = values.sum() * h
    if abs(mass - 1.0) > 1e-7:
        raise ArithmeticError(f"convolution lost mass: {mass!r}")
    return GridDensity.normalized(f.x0 + g.x0, h, values)


def convolve_many(fs: list[GridDensity]) -> GridDensity:
    if not fs:
        raise ValueError("nothing to convolve")
    out = fs[0]
    for g in fs[1:]:
        out = convolve(out, g)
    return out


def rescale_to_grid(f: GridDensity, a: float, h: float) -> GridDensity:
    """Law of ``a X`` carried back to step ``h`` on a grid centred like ``f``."""
    g = scale_density(f, a)
    length = len(g) * g.h
    n = int(math.ceil(length / h - 1e-9))
    mid = g.x0 + length / 2
    return resample(g, h, x0=mid - n * h / 2)


@dataclass
class CltTrace:
    """Rényi entropies of the normalized sums Z_n for n = 1, 2, 4, ..."""

    orders: list
    entries: list = field(default_factory=list)
    reference: dict = field(default_factory=dict)
    sigma2: float = float("nan")
    h: float = float("nan")
    final: GridDensity | None = None
    densities: list = field(default_factory=list)

    @property
    def ns(self) -> list[int]:
        return [n for n, _ in self.entries]

    def values(self, order) -> np.ndarray:
        key = str(as_order(order))
        return np.array([hs[key] for _, hs in self.entries])

    def gaps(self, order) -> np.ndarray:
        key = str(as_order(order))
        return np.abs(self.values(order) - self.reference[key])

    def rows(self):
        for n, hs in self.entries:
            for key, val in hs.items():
                ref = self.reference[key]
                yield (n, key, val, ref, abs(val - ref))

    def to_csv(self, path) -> None:
        with open(path, "w", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(["n", "order", "h_r", "reference", "gap"])
            for row in self.rows():
                writer.writerow([repr(x) if isinstance(x, float) else x for x in row])


def clt_iterate(f: GridDensity, k_max: int, orders, keep: bool = False) -> CltTrace:
    """Track h_r(Z_n) for n = 2^k, k = 0..k_max, by repeated doubling.

    Each step convolves the current density with itself and maps the result
    back to the original step through the factor 1/sqrt(2). The input is
    centred first. With ``keep=True`` every intermediate density is stored.
    """
    if not 0 <= k_max <= MAX_DOUBLINGS:
        raise ValueError(f"k_max must lie in [0, {MAX_DOUBLINGS}]")
    orders = [as_order(o) for o in orders]
    if not orders:
        raise ValueError("need at least one order")
    rho = center(f)
    _, sigma2 = moments(rho)
    if not (math.isfinite(sigma2) and sigma2 > 0):
        raise ValueError("base density needs finite positive variance")
    gauss = GaussianSpec(1, sigma2)
    trace = CltTrace(
        orders=orders,
        reference={str(o): gaussian_renyi(gauss, o) for o in orders},
        sigma2=sigma2,
        h=f.h,
    )

    def record(n, dens):
        trace.entries.append((n, {str(o): renyi_entropy(dens, o) for o in orders}))
        if keep:
            trace.densities.append(dens)

    record(1, rho)
    for k in range(1, k_max + 1):
        rho = rescale_to_grid(convolve(rho, rho), 1 / math.sqrt(2), f.h)
        record(2**k, rho)
    trace.final = rho
    return trace


def is_symmetric_unimodal(f: GridDensity, tol: float = 1e-9) -> bool:
    """Even about the mass centre and non-increasing away from it, up to ``tol``."""
    mean, _ = moments(f)
    twice_c = 2 * (mean - f.x0) / f.h
    k = round(twice_c)
    if abs(twice_c - k) > 1e-6:
        return False
    v = f.values
    n = v.size
    i = np.arange(n)
    j = k - 1 - i
    mirror = np.where((j >= 0) & (j < n), v[np.clip(j, 0, n - 1)], 0.0)
    if np.max(np.abs(v - mirror)) > tol:
        return False
    # beyond the array ends the mirror is zero, which the check above covers
    cell_pos = 2 * i + 1 - twice_c  # sign of (center - mean)
    d = np.diff(v)
    left = cell_pos[1:] <= 0
    right = cell_pos[:-1] >= 0
    if np.any(d[left] < -tol):
        return False
    if np.any(d[right] > tol):
        return False
    return True


def hoeffding_constant(dim: int) -> float:
    """The constant 2d / ((2^d - 1) omega_d) of the pointwise Hoeffding tail bound."""
    return 2 * dim / ((2**dim - 1) * unit_ball_volume(dim))


def hoeffding_tail_check(rho_n: GridDensity, R: float, dim: int = 1) -> float:
    """Largest excess of ``rho_n`` over ``c_d exp(-(|x|-1)^2 / (2 d^2 R^2))`` for |x| > 2.

    Returns ``-inf`` when no grid cell lies beyond |x| = 2.
    """
    if dim != 1:
        raise ValueError("grid densities are one-dimensional")
    if not is_symmetric_unimodal(rho_n, tol=1e-9 * rho_n.values.max()):
        raise ValueError("tail bound needs a symmetric unimodal density")
    x = rho_n.centers
    far = np.abs(x) > 2
    if not far.any():
        return -math.inf
    ax = np.abs(x[far])
    bound = hoeffding_constant(dim) * np.exp(-((ax - 1) ** 2) / (2 * dim**2 * R**2))
    return float(np.max(rho_n.values[far] - bound))
