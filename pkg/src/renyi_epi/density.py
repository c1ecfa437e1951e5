"""Discretized probability densities.

A :class:`GridDensity` is a one-dimensional density stored as cell heights on
a uniform grid. The density is read as piecewise constant: cell ``i`` covers
``[x0 + i*h, x0 + (i+1)*h)`` and carries the height ``values[i]``. Every
integral in the package is the cell-centred midpoint sum, which is exact for
that piecewise-constant reading.

A :class:`RadialDensity` stores a spherically symmetric density on
:math:`\\mathbb{R}^d` by its radial profile. It only supports entropy
integrals; there is no convolution on it.
"""

from __future__ import annotations

import csv
import json
import math
from dataclasses import dataclass
from pathlib import Path

import numpy as np
from scipy import integrate, special

MASS_TOL = 1e-9
RADIAL_MASS_TOL = 1e-7


def _frozen(values) -> np.ndarray:
    arr = np.array(values, dtype=float)
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True, eq=False)
class GridDensity:
    """Density on the uniform grid ``x0 + (i + 1/2) h``, ``i = 0..len-1``.

    Instances validate themselves: heights must be finite and non-negative,
    and the midpoint mass must be 1 within ``MASS_TOL``. Use
    :meth:`normalized` to build one from unnormalized heights.
    """

    x0: float
    h: float
    values: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "values", _frozen(self.values))
        object.__setattr__(self, "x0", float(self.x0))
        object.__setattr__(self, "h", float(self.h))
        v = self.values
        if v.ndim != 1 or v.size == 0:
            raise ValueError("density needs a non-empty 1-D array of values")
        if not (self.h > 0 and math.isfinite(self.h)):
            raise ValueError(f"grid step must be positive, got {self.h}")
        if not np.all(np.isfinite(v)):
            raise ValueError("density values must be finite")
        if np.any(v < 0):
            raise ValueError("density values must be non-negative")
        mass = self.mass
        if abs(mass - 1.0) > MASS_TOL:
            raise ValueError(f"density mass is {mass!r}, expected 1")

    @classmethod
    def normalized(cls, x0: float, h: float, values) -> "GridDensity":
        v = np.asarray(values, dtype=float)
        if np.any(v < 0):
            raise ValueError("density values must be non-negative")
        total = v.sum() * h
        if not total > 0:
            raise ValueError("density has zero mass")
        return cls(x0, h, v / total)

    def __len__(self) -> int:
        return self.values.size

    @property
    def mass(self) -> float:
        return float(self.values.sum() * self.h)

    @property
    def centers(self) -> np.ndarray:
        return self.x0 + (np.arange(len(self)) + 0.5) * self.h

    @property
    def edges(self) -> np.ndarray:
        return self.x0 + np.arange(len(self) + 1) * self.h

    @property
    def support(self) -> tuple[float, float]:
        """Closed hull of the cells carrying positive mass."""
        nz = np.flatnonzero(self.values > 0)
        return (self.x0 + nz[0] * self.h, self.x0 + (nz[-1] + 1) * self.h)

    def __call__(self, x):
        """Evaluate the piecewise-constant density at ``x``."""
        x = np.asarray(x, dtype=float)
        idx = np.floor((x - self.x0) / self.h).astype(int)
        inside = (idx >= 0) & (idx < len(self))
        out = np.zeros_like(x)
        out[inside] = self.values[idx[inside]]
        return out if out.ndim else float(out)

    def allclose(self, other: "GridDensity", atol: float = 1e-12) -> bool:
        return (
            len(self) == len(other)
            and math.isclose(self.h, other.h, rel_tol=1e-12)
            and math.isclose(self.x0, other.x0, rel_tol=1e-12, abs_tol=1e-12)
            and np.allclose(self.values, other.values, rtol=0, atol=atol)
        )

    # -- serialization -------------------------------------------------

    def to_json(self) -> str:
        return json.dumps({"x0": self.x0, "h": self.h, "values": self.values.tolist()})

    @classmethod
    def from_json(cls, text: str) -> "GridDensity":
        data = json.loads(text)
        try:
            return cls(data["x0"], data["h"], data["values"])
        except KeyError as exc:
            raise ValueError(f"missing field {exc} in density JSON") from None

    def to_csv(self, path) -> None:
        with open(path, "w", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(["x", "value"])
            for x, v in zip(self.centers, self.values):
                writer.writerow([repr(float(x)), repr(float(v))])

    @classmethod
    def from_csv(cls, path) -> "GridDensity":
        rows = np.loadtxt(Path(path), delimiter=",", skiprows=1, ndmin=2)
        x, v = rows[:, 0], rows[:, 1]
        if x.size < 2:
            raise ValueError("need at least two rows to infer the grid step")
        h = (x[-1] - x[0]) / (x.size - 1)
        if not np.allclose(np.diff(x), h, rtol=1e-6, atol=0):
            raise ValueError("abscissae are not uniformly spaced")
        return cls(x[0] - h / 2, h, v)


@dataclass(frozen=True, eq=False)
class RadialDensity:
    """Spherically symmetric density on R^dim given by its radial profile.

    ``profile[i]`` is the height at radius ``(i + 1/2) h``.
    """

    dim: int
    h: float
    profile: np.ndarray
    unimodal: bool = False

    def __post_init__(self):
        object.__setattr__(self, "profile", _frozen(self.profile))
        if self.dim < 1:
            raise ValueError("dimension must be a positive integer")
        if not self.h > 0:
            raise ValueError("radial step must be positive")
        p = self.profile
        if p.ndim != 1 or p.size == 0 or np.any(p < 0) or not np.all(np.isfinite(p)):
            raise ValueError("profile must be a non-empty array of finite non-negative values")
        if abs(self.mass - 1.0) > RADIAL_MASS_TOL:
            raise ValueError(f"radial density mass is {self.mass!r}, expected 1")
        if self.unimodal and np.any(np.diff(p) > 0):
            raise ValueError("profile flagged unimodal but increases somewhere")

    @property
    def radii(self) -> np.ndarray:
        return (np.arange(self.profile.size) + 0.5) * self.h

    @property
    def shell_weights(self) -> np.ndarray:
        """Volume of each radial cell, ``d * omega_d * rho^(d-1) * h``."""
        d = self.dim
        return d * unit_ball_volume(d) * self.radii ** (d - 1) * self.h

    @property
    def mass(self) -> float:
        return float(np.sum(self.profile * self.shell_weights))

    def to_grid(self) -> GridDensity:
        """Mirror a one-dimensional profile onto the grid on ``[-R, R]``."""
        if self.dim != 1:
            raise ValueError("only one-dimensional radial densities map to a grid")
        p = self.profile
        R = p.size * self.h
        return GridDensity.normalized(-R, self.h, np.concatenate([p[::-1], p]))


@dataclass(frozen=True)
class ParetoTruncSpec:
    """Parameters of ``C_R (1 + |x|)^(-p)`` restricted to the ball of radius R."""

    R: float
    p: float
    dim: int
    C_R: float
    sigma2_R: float


def unit_ball_volume(d: int) -> float:
    return math.pi ** (d / 2) / math.gamma(d / 2 + 1)


# -- constructors --------------------------------------------------------


def make_uniform(a: float, b: float, h: float) -> GridDensity:
    """Uniform density on ``[a, b]``; the step is adjusted to tile it exactly."""
    if not b > a:
        raise ValueError(f"degenerate interval [{a}, {b}]")
    if not h > 0:
        raise ValueError("grid step must be positive")
    if h > b - a:
        raise ValueError("step larger than interval")
    n = int(round((b - a) / h))
    if n < 8:
        raise ValueError("interval must hold at least 8 cells")
    return GridDensity(a, (b - a) / n, np.full(n, 1.0 / (b - a)))


def make_two_block(cells_per_block: int = 333) -> GridDensity:
    """Height 3/2 on (0, 1/3) and (2/3, 1), zero on the middle third."""
    m = int(cells_per_block)
    if m < 1:
        raise ValueError("need at least one cell per block")
    v = np.zeros(3 * m)
    v[:m] = 1.5
    v[2 * m :] = 1.5
    return GridDensity(0.0, 1.0 / (3 * m), v)


def make_gaussian(sigma2: float = 1.0, h: float = 1e-3, width: float = 12.0, mean: float = 0.0) -> GridDensity:
    """Point samples of N(mean, sigma2) on ``mean +- width*sigma``, renormalized."""
    if not sigma2 > 0:
        raise ValueError("variance must be positive")
    sigma = math.sqrt(sigma2)
    n = int(math.ceil(2 * width * sigma / h))
    x0 = mean - n * h / 2
    x = x0 + (np.arange(n) + 0.5) * h
    v = np.exp(-0.5 * (x - mean) ** 2 / sigma2)
    return GridDensity.normalized(x0, h, v)


def make_triangle(half_width: float = 1.0, h: float = 1e-3) -> GridDensity:
    """Symmetric triangular density on ``[-half_width, half_width]``."""
    n = 2 * int(round(half_width / h))
    step = 2 * half_width / n
    x = -half_width + (np.arange(n) + 0.5) * step
    return GridDensity.normalized(-half_width, step, half_width - np.abs(x))


def _pareto_moment(R: float, p: float, dim: int, power: int) -> float:
    """Integral of rho^(dim-1+power) (1+rho)^(-p) over [0, R]."""
    a = dim + power
    b = p - a
    if b > 0:
        full = special.beta(a, b)
        if math.isinf(R):
            return full
        return full * special.betainc(a, b, R / (1 + R))
    if math.isinf(R):
        return math.inf
    val, _ = integrate.quad(lambda t: t ** (a - 1) * (1 + t) ** (-p), 0, R, limit=200)
    return val


def pareto_spec(R: float, p: float, dim: int) -> ParetoTruncSpec:
    """Normalizer and per-coordinate variance of the truncated Pareto density.

    ``R`` may be ``math.inf``, in which case ``p > dim`` is required for the
    normalizer to exist; the variance is infinite unless ``p > dim + 2``.
    """
    if not R > 0:
        raise ValueError("truncation radius must be positive")
    if not p > 0:
        raise ValueError("decay exponent must be positive")
    if dim < 1:
        raise ValueError("dimension must be a positive integer")
    if math.isinf(R) and p <= dim:
        raise ValueError(f"p <= dim ({p} <= {dim}): the untruncated density is not integrable")
    surface = dim * unit_ball_volume(dim)
    C = 1.0 / (surface * _pareto_moment(R, p, dim, 0))
    second = C * surface * _pareto_moment(R, p, dim, 2)
    return ParetoTruncSpec(R=R, p=p, dim=dim, C_R=C, sigma2_R=second / dim)


def make_pareto_trunc(R: float, p: float, dim: int, h: float) -> tuple[ParetoTruncSpec, RadialDensity]:
    """Truncated Pareto density and its radial discretization.

    The radial step is adjusted so ``R/h`` is an integer. The discrete profile
    is renormalized; the analytic normalizer is kept in the returned spec.
    """
    spec = pareto_spec(R, p, dim)
    if math.isinf(R):
        raise ValueError("an infinite radius cannot be discretized")
    if not 0 < h <= R / 1000:
        raise ValueError("radial step must satisfy 0 < h <= R/1000")
    n = int(round(R / h))
    step = R / n
    rho = (np.arange(n) + 0.5) * step
    prof = (1.0 + rho) ** (-p)
    weights = dim * unit_ball_volume(dim) * rho ** (dim - 1) * step
    prof = prof / np.sum(prof * weights)
    return spec, RadialDensity(dim, step, prof, unimodal=True)


# -- transforms ----------------------------------------------------------


def scale_density(f: GridDensity, a: float) -> GridDensity:
    """Law of ``a X`` for ``a > 0``: the grid is stretched, heights divided by a."""
    if not a > 0:
        raise ValueError(f"scale factor must be positive, got {a}")
    return GridDensity(f.x0 * a, f.h * a, f.values / a)


def reflect(f: GridDensity, about: float = 0.0) -> GridDensity:
    """Law of ``2*about - X``."""
    right = f.x0 + len(f) * f.h
    return GridDensity(2 * about - right, f.h, f.values[::-1])


def shift(f: GridDensity, t: float) -> GridDensity:
    return GridDensity(f.x0 + t, f.h, f.values)


def resample(f: GridDensity, h: float, x0: float | None = None) -> GridDensity:
    """Mass-preserving transfer of ``f`` onto a grid of step ``h``.

    New cell masses are differences of the (piecewise-linear) distribution
    function of ``f`` at the new cell edges, so every new cell receives
    exactly the mass of ``f`` it overlaps.
    """
    if not h > 0:
        raise ValueError("grid step must be positive")
    lo = f.x0 if x0 is None else x0
    hi = f.x0 + len(f) * f.h
    if lo > f.x0 + 1e-12 * max(1.0, abs(f.x0)):
        raise ValueError("new grid must start at or before the old one")
    n = int(math.ceil((hi - lo) / h - 1e-9))
    new_edges = lo + np.arange(n + 1) * h
    cdf = np.concatenate([[0.0], np.cumsum(f.values * f.h)])
    masses = np.diff(np.interp(new_edges, f.edges, cdf, left=0.0, right=cdf[-1]))
    masses = np.clip(masses, 0.0, None)
    return GridDensity.normalized(lo, h, masses / h)


def center(f: GridDensity) -> GridDensity:
    mean, _ = moments(f)
    return shift(f, -mean)


def trim(f: GridDensity, threshold: float = 0.0) -> GridDensity:
    """Drop leading and trailing cells with height ``<= threshold``."""
    keep = np.flatnonzero(f.values > threshold)
    if keep.size == 0:
        raise ValueError("nothing left after trimming")
    i, j = keep[0], keep[-1] + 1
    return GridDensity.normalized(f.x0 + i * f.h, f.h, f.values[i:j])


def moments(f: GridDensity) -> tuple[float, float]:
    """Midpoint-rule mean and variance."""
    x = f.centers
    w = f.values * f.h
    mean = float(np.dot(w, x))
    var = float(np.dot(w, (x - mean) ** 2))
    return mean, var
