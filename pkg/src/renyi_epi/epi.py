"""Numerical checks of Rényi entropy power inequalities on grid densities."""

from __future__ import annotations

import csv
import json
import math
from dataclasses import asdict, dataclass, field

import numpy as np

from .constants import discrete_entropy, holder_conjugate
from .convolve import clt_iterate, convolve_many
from .density import GridDensity, make_pareto_trunc, pareto_spec, resample, scale_density
from .entropy import GaussianSpec, as_order, entropy_power, gaussian_renyi, renyi_entropy


@dataclass
class EpiReport:
    entropies: list
    sum_entropy: float
    powers: list
    sum_power: float
    ratio: float
    constant_used: float
    passed: bool

    def to_json(self) -> str:
        return json.dumps(asdict(self))


def common_step(fs: list[GridDensity]) -> list[GridDensity]:
    """Bring every density to the smallest step among them."""
    h = min(f.h for f in fs)
    return [f if math.isclose(f.h, h, rel_tol=1e-9) else resample(f, h) for f in fs]


def epi_check(fs: list[GridDensity], r, c: float) -> EpiReport:
    """Compare ``N_r(X_1 + ... + X_n)`` with ``c * sum N_r(X_i)``."""
    if len(fs) < 2:
        raise ValueError("need at least two summands")
    order = as_order(r)
    fs = common_step(fs)
    ents = [renyi_entropy(f, order) for f in fs]
    total = renyi_entropy(convolve_many(fs), order)
    powers = [entropy_power(e) for e in ents]
    sum_power = entropy_power(total)
    ratio = sum_power / sum(powers)
    return EpiReport(
        entropies=ents,
        sum_entropy=total,
        powers=powers,
        sum_power=sum_power,
        ratio=ratio,
        constant_used=c,
        passed=bool(ratio >= c * (1 - 1e-9)),
    )


def _weighted_sum_density(fs, lam) -> tuple[list, list, GridDensity]:
    lam = np.asarray(lam, dtype=float)
    if len(fs) != lam.size:
        raise ValueError("one weight per density")
    if np.any(lam < 0) or abs(lam.sum() - 1) > 1e-12:
        raise ValueError("weights must lie on the simplex")
    keep = [i for i in range(lam.size) if lam[i] > 0]
    scaled = [fs[i] if lam[i] == 1 else scale_density(fs[i], math.sqrt(lam[i])) for i in keep]
    if len(scaled) == 1:
        return keep, lam, scaled[0]
    return keep, lam, convolve_many(common_step(scaled))


def linearized_check(fs, lam, r, c: float, alpha: float = 1.0) -> tuple[float, float]:
    """Linearized EPI: ``h_r(sum sqrt(lam_i) X_i) - sum lam_i h_r(X_i)`` against
    ``(1/2)(log(c)/alpha + (1/alpha - 1) H(lam))``. Zero weights drop their summand.
    """
    order = as_order(r)
    keep, lam, dens = _weighted_sum_density(fs, lam)
    lhs = renyi_entropy(dens, order) - sum(lam[i] * renyi_entropy(fs[i], order) for i in keep)
    rhs = 0.5 * (math.log(c) / alpha + (1 / alpha - 1) * discrete_entropy(lam))
    return lhs, rhs


def young_orders(lam, r: float) -> np.ndarray:
    """Orders ``r_i`` with ``lam_i = r'/r_i'``; zero weights give NaN."""
    lam = np.asarray(lam, dtype=float)
    rp = holder_conjugate(r)
    out = np.full(lam.size, np.nan)
    pos = lam > 0
    rip = rp / lam[pos]
    ri = rip / (rip - 1)
    if np.any(ri <= 0):
        raise ValueError("derived orders must be positive")
    out[pos] = ri
    return out


def info_young_deficit(fs, lam, r: float) -> float:
    """Slack in the entropic form of the sharp Young inequality (d = 1)."""
    if not (r > 0 and r != 1):
        raise ValueError("r must be positive and different from 1")
    rp = holder_conjugate(r)
    ri = young_orders(lam, r)
    keep, lam, dens = _weighted_sum_density(fs, lam)
    lhs = renyi_entropy(dens, r) - sum(lam[i] * renyi_entropy(fs[i], ri[i]) for i in keep)
    bound = 0.5 * rp * (math.log(r) / r - sum(math.log(ri[i]) / ri[i] for i in keep))
    return lhs - bound


def modified_epi_check(f: GridDensity, g: GridDensity, r, alpha: float) -> tuple[float, float]:
    """Return ``(N_r(X+Y)^alpha, N_r(X)^alpha + N_r(Y)^alpha)``."""
    if not alpha > 0:
        raise ValueError("alpha must be positive")
    order = as_order(r)
    f, g = common_step([f, g])
    lhs = entropy_power(renyi_entropy(convolve_many([f, g]), order)) ** alpha
    rhs = entropy_power(renyi_entropy(f, order)) ** alpha + entropy_power(renyi_entropy(g, order)) ** alpha
    return lhs, rhs


# -- failure of the generic EPI for r < 1 -------------------------------


def critical_dimension(r: float) -> int:
    """Smallest integer d with d > 2r/(1-r)."""
    if not 0 < r < 1:
        raise ValueError("r must lie in (0, 1)")
    return int(math.floor(2 * r / (1 - r))) + 1


def adaptive_step(R: float) -> float:
    return max(1e-3, R / 1e5)


@dataclass
class CounterexampleTable:
    r: float
    p: float
    n: int
    sigma2_inf: float
    N_gauss_std: float
    rows: list = field(default_factory=list)

    COLUMNS = ("R", "h", "sigma2_R", "N_r_X1", "N_r_Zn", "cr_bound")

    @property
    def gaussian_bound(self) -> float:
        """``(sigma_inf^2 + 2) N_r(standard Gaussian)``."""
        return (self.sigma2_inf + 2) * self.N_gauss_std

    def column(self, name) -> np.ndarray:
        return np.array([row[name] for row in self.rows])

    def decreasing(self, slack: float = 1e-3) -> bool:
        b = self.column("cr_bound")
        return bool(np.all(b[1:] <= b[:-1] * (1 + slack)))

    def to_csv(self, path) -> None:
        with open(path, "w", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(self.COLUMNS)
            for row in self.rows:
                writer.writerow([repr(row[c]) for c in self.COLUMNS])

    def to_jsonl(self, path) -> None:
        with open(path, "w") as fh:
            for row in self.rows:
                fh.write(json.dumps(row) + "\n")


def counterexample_experiment(r: float, p: float, R_list, n: int = 64, h: float | None = None) -> CounterexampleTable:
    """Upper bounds on the best EPI constant from i.i.d. truncated Pareto summands.

    For each radius the bound is ``N_r(Z_n) / N_r(X_1)``, the ratio
    ``N_r(X_1 + ... + X_n) / sum N_r(X_i)`` for i.i.d. copies. Only the
    one-dimensional case is supported, which requires ``r < 1/3``.
    """
    if not 0 < r < 1:
        raise ValueError("r must lie in (0, 1)")
    if r >= 1 / 3:
        raise ValueError("r >= 1/3 unsupported: the construction needs dimension >= 2")
    d = critical_dimension(r)
    if not d + 2 < p <= d / r:
        raise ValueError(f"p must lie in ({d + 2}, {d / r}]")
    k = int(round(math.log2(n)))
    if n < 1 or 2**k != n:
        raise ValueError("n must be a power of two")
    order = as_order(r)
    table = CounterexampleTable(
        r=r,
        p=p,
        n=n,
        sigma2_inf=pareto_spec(math.inf, p, d).sigma2_R,
        N_gauss_std=entropy_power(gaussian_renyi(GaussianSpec(d, 1.0), order), d),
    )
    for R in sorted(R_list):
        step = adaptive_step(R) if h is None else h
        spec, radial = make_pareto_trunc(R, p, d, step)
        f = radial.to_grid()
        trace = clt_iterate(f, k, [order])
        hs = trace.values(order)
        N1 = entropy_power(hs[0])
        Nn = entropy_power(hs[-1])
        table.rows.append(
            {
                "R": float(R),
                "h": radial.h,
                "sigma2_R": spec.sigma2_R,
                "N_r_X1": N1,
                "N_r_Zn": Nn,
                "cr_bound": Nn / N1,
            }
        )
    return table
