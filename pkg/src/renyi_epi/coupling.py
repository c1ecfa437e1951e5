"""Mass-transfer couplings of two copies of one density.

Start from the diagonal coupling ``Y = X`` and move a mass density
``delta`` from the diagonal points ``(x - x0, x - x0)`` and
``(x + x0, x + x0)`` to the off-diagonal points ``(x - x0, x + x0)`` and
``(x + x0, x - x0)`` for every ``x`` in a set ``Lam``. Both marginals stay
equal to the base density, while ``(X + Y)/2`` gains the density
``delta * (2 1_Lam - 1_{Lam + x0} - 1_{Lam - x0})``.

If the base density fails the midpoint (r-1)-concavity test at shift x0 on
``Lam``, a small enough transfer strictly raises the r-Rényi entropy of
the midpoint ``(X + Y)/2`` above that of ``X``.

Everything lives on the grid of the base density: shifts are whole numbers
of cells, so translated sets land exactly on cells.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass

import numpy as np

from .convolve import convolve
from .density import GridDensity, scale_density
from .entropy import as_order, entropy_power, renyi_entropy
from .epi import common_step
from .sconcave import certify_s_concave, midpoint_violations

VIOLATION_TOL = 1e-9
TRANSLATE_FLOOR = 1e-6
COUPLING_KINDS = ("identical", "independent", "antithetic")


@dataclass(frozen=True, eq=False)
class TransferCoupling:
    base: GridDensity
    shift_cells: int
    lam_set: np.ndarray
    delta: float

    @property
    def x0(self) -> float:
        return self.shift_cells * self.base.h

    def _translate(self, mask: np.ndarray, cells: int) -> np.ndarray:
        out = np.zeros_like(mask)
        if cells >= 0:
            out[cells:] = mask[: mask.size - cells]
        else:
            out[:cells] = mask[-cells:]
        return out

    @property
    def plus(self) -> np.ndarray:
        return self._translate(self.lam_set, self.shift_cells)

    @property
    def minus(self) -> np.ndarray:
        return self._translate(self.lam_set, -self.shift_cells)

    def diagonal(self) -> np.ndarray:
        """Remaining mass density on the diagonal, per cell of X."""
        f = self.base.values
        return np.where(self.plus | self.minus, f - self.delta, f)

    def marginals(self) -> tuple[np.ndarray, np.ndarray]:
        """Cellwise marginal densities of X and Y.

        The off-diagonal point ``(x - x0, x + x0)`` puts its mass on X at
        ``x - x0`` and on Y at ``x + x0``; its mirror does the reverse.
        Both marginals are diagonal + delta on the two translates.
        """
        diag = self.diagonal()
        mx = diag + self.delta * self.minus + self.delta * self.plus
        my = diag + self.delta * self.plus + self.delta * self.minus
        return mx, my

    def midpoint_density(self) -> GridDensity:
        """Density of ``(X + Y)/2`` under the coupling."""
        f = self.base.values
        bump = 2.0 * self.lam_set - self.plus - self.minus
        return GridDensity.normalized(self.base.x0, self.base.h, f + self.delta * bump)

    def to_json(self) -> str:
        idx = np.flatnonzero(self.lam_set)
        return json.dumps(
            {
                "x0": self.x0,
                "shift_cells": self.shift_cells,
                "lam_cells": [int(idx[0]), int(idx[-1])] if idx.size else [],
                "lam_size": int(idx.size),
                "delta": self.delta,
            }
        )


@dataclass(frozen=True, eq=False)
class MixDensity:
    fhat: GridDensity


def _runs(mask: np.ndarray):
    """Start and stop indices of the connected runs of ``mask``."""
    padded = np.concatenate([[False], mask, [False]]).astype(int)
    d = np.diff(padded)
    return zip(np.flatnonzero(d == 1), np.flatnonzero(d == -1))


def _best_window(v: np.ndarray, s: float, tol: float, min_cells: int, floor: float):
    n = v.size
    best = None
    for m in range(1, (n - 1) // 2 + 1):
        margins = midpoint_violations(v, s, m)
        viol = np.where(margins < -tol, -margins, 0.0)
        if floor > 0:
            ends = np.zeros(n)
            ends[m : n - m] = np.minimum(v[: n - 2 * m], v[2 * m :])
            viol[ends < floor] = 0.0
        if not viol.any():
            continue
        csum = np.concatenate([[0.0], np.cumsum(viol)])
        for start, stop in _runs(viol > 0):
            width = min(stop - start, m)
            if width < min_cells:
                continue
            totals = csum[start + width : stop + 1] - csum[start : stop - width + 1]
            j = int(np.argmax(totals))
            score = float(totals[j])
            if best is None or score > best[0]:
                best = (score, m, start + j, width)
    return best


def find_shift_set(
    f: GridDensity, r: float, tol: float = VIOLATION_TOL, min_cells: int = 3, rel_floor: float = TRANSLATE_FLOOR
):
    """Search for a shift and a run of cells where (r-1)-concavity fails.

    For every shift of ``m`` cells, cells whose height falls below the
    (r-1)-mean of the heights ``m`` cells away on both sides (by more than
    ``tol``) are violations. For r < 1 the exponent r - 1 is negative and
    the same test is the reversed inequality between powers.
    Each connected run of violations is cut to at most ``m`` cells so the
    set and its two translates are disjoint; the window with the largest
    total violation wins across all shifts.

    Windows whose translates reach heights below ``rel_floor * max f`` can
    only carry a negligible transfer, so they are used only when nothing
    else is found.

    Returns ``(x0, mask)`` or ``None`` when nothing is found.
    """
    if r == 1 or not r > 0:
        raise ValueError("r must be positive and different from 1")
    v = f.values
    best = _best_window(v, r - 1, tol, min_cells, rel_floor * v.max())
    if best is None:
        best = _best_window(v, r - 1, tol, min_cells, 0.0)
    if best is None:
        return None
    _, m, start, width = best
    mask = np.zeros(v.size, dtype=bool)
    mask[start : start + width] = True
    return m * f.h, mask


def _gain_sign(r: float) -> float:
    # the midpoint entropy rises when sum f^r falls (r > 1) or rises (r < 1)
    return -1.0 if r > 1 else 1.0


def _set_gain(fm, a, b, delta, r):
    """Signed change of ``sum f^r`` over the set and its translates after a transfer.

    Written with expm1/log1p so the tiny gains of small transfers survive
    the cancellation between the three terms.
    """

    def change(v, dv):
        pos = v > 0
        safe = np.where(pos, v, 1.0)
        with np.errstate(divide="ignore"):
            rel = np.expm1(r * np.log1p(dv / safe))
        # empty cells only ever receive mass
        return np.where(pos, safe**r * rel, np.maximum(dv, 0.0) ** r)

    total = change(fm, 2 * delta) + change(a, -delta) + change(b, -delta)
    return _gain_sign(r) * float(np.sum(total))


def delta_max(f: GridDensity, x0: float, mask: np.ndarray, r: float) -> float:
    """Largest transfer for which the midpoint entropy does not drop.

    The signed change of ``sum f^r`` is concave in ``delta``, vanishes at 0
    and has positive slope there on a violation set, so it stays positive up
    to its first root. The result is the smaller of that root (found by
    bisection) and the smallest base height on the two translates, which
    keeps the diagonal mass non-negative.
    """
    m = int(round(x0 / f.h))
    v = f.values
    idx = np.flatnonzero(mask)
    if idx.size == 0:
        raise ValueError("empty set")
    if idx[0] - m < 0 or idx[-1] + m >= v.size:
        raise ValueError("translated set leaves the grid")
    fm, a, b = v[idx], v[idx + m], v[idx - m]
    cap = float(np.minimum(a, b).min())
    if not cap > 0:
        raise ValueError("base density vanishes on a translate")
    if _set_gain(fm, a, b, cap, r) > 0:
        return cap
    lo, hi = 0.0, cap
    for _ in range(100):
        mid = 0.5 * (lo + hi)
        if _set_gain(fm, a, b, mid, r) > 0:
            lo = mid
        else:
            hi = mid
    return lo


def build_transfer(f: GridDensity, x0: float, mask, delta: float) -> tuple[TransferCoupling, MixDensity]:
    """Construct the transfer coupling and the density of its midpoint.

    ``delta`` is rounded down to a multiple of the spacing of floating-point
    numbers near the largest height involved, so that removing and restoring
    it is exact and the marginals match the base density bit for bit.
    """
    mask = np.asarray(mask, dtype=bool)
    if mask.shape != f.values.shape:
        raise ValueError("mask must have one entry per cell")
    if not delta >= 0:
        raise ValueError("delta must be non-negative")
    m = int(round(x0 / f.h))
    if m < 1 or not math.isclose(m * f.h, x0, rel_tol=1e-9):
        raise ValueError("shift must be a positive whole number of cells")
    idx = np.flatnonzero(mask)
    if idx.size and (idx[0] - m < 0 or idx[-1] + m >= mask.size):
        raise ValueError("translated set leaves the grid")
    coupling = TransferCoupling(f, m, mask, 0.0)
    plus, minus = coupling.plus, coupling.minus
    if np.any(plus & minus) or np.any(mask & (plus | minus)):
        raise ValueError("set and its translates overlap")
    touched = f.values[plus | minus]
    if touched.size:
        ulp = np.spacing(touched.max())
        delta = math.floor(delta / ulp) * ulp
        if delta > touched.min():
            raise ValueError("delta too large: diagonal mass would turn negative")
    else:
        delta = 0.0
    coupling = TransferCoupling(f, m, mask, float(delta))
    return coupling, MixDensity(coupling.midpoint_density())


def entropy_gain(f: GridDensity, fhat: GridDensity, r) -> float:
    return renyi_entropy(fhat, r) - renyi_entropy(f, r)


def canonical_example(r, cells_per_block: int = 333) -> tuple[float, float]:
    """Two-block density 3/2 on (0,1/3) and (2/3,1) with the transfer making X+Y uniform on (0,2).

    Returns ``(h_r(X+Y), h_r(2X))``; the expected values are log 2 and log(4/3).
    """
    from .density import make_two_block

    f = make_two_block(cells_per_block)
    m = cells_per_block
    mask = np.zeros(len(f), dtype=bool)
    mask[m : 2 * m] = True
    _, mix = build_transfer(f, m * f.h, mask, 0.5)
    h_sum = renyi_entropy(scale_density(mix.fhat, 2.0), r)
    h_diag = renyi_entropy(scale_density(f, 2.0), r)
    return h_sum, h_diag


# -- checks for s-concave densities -------------------------------------


def _require_certified(f: GridDensity, s: float) -> None:
    if not certify_s_concave(f, s).certified:
        raise ValueError(f"density is not certified {s}-concave")


def _mixture_entropy(f: GridDensity, lam: float, coupling, order) -> float:
    """``h_r(lam X + (1 - lam) Y)`` under the named coupling or a transfer."""
    if isinstance(coupling, TransferCoupling):
        if not math.isclose(lam, 0.5):
            raise ValueError("transfer couplings are evaluated at lam = 1/2 only")
        return renyi_entropy(coupling.midpoint_density(), order)
    if coupling == "identical":
        return renyi_entropy(f, order)
    if coupling == "antithetic":
        a = abs(2 * lam - 1)
        if a == 0:
            return -math.inf
        return renyi_entropy(scale_density(f, a), order)
    if coupling == "independent":
        parts = [scale_density(f, w) for w in (lam, 1 - lam) if w > 0]
        if len(parts) == 1:
            return renyi_entropy(parts[0], order)
        return renyi_entropy(convolve(*common_step(parts)), order)
    raise ValueError(f"unknown coupling {coupling!r}")


def sup_coupling_check(f: GridDensity, s: float, lam: float, couplings) -> float:
    """Largest ``h_r(lam X + (1-lam) Y) - h_r(X)`` over a family of couplings, r = 1 + s."""
    _require_certified(f, s)
    r = 1 + s
    if not 0 < lam < 1:
        raise ValueError("lam must lie in (0, 1)")
    order = as_order(r)
    base = renyi_entropy(f, order)
    return max(_mixture_entropy(f, lam, c, order) - base for c in couplings)


def reverse_epi_corollary(f: GridDensity, s: float, coupling) -> tuple[float, float]:
    """Return ``(N_r(X + Y), 4 N_r(X))`` for Y coupled to X as requested, r = 1 + s."""
    _require_certified(f, s)
    order = as_order(1 + s)
    if isinstance(coupling, TransferCoupling):
        dens = scale_density(coupling.midpoint_density(), 2.0)
        lhs = entropy_power(renyi_entropy(dens, order))
    elif coupling == "identical":
        lhs = entropy_power(renyi_entropy(scale_density(f, 2.0), order))
    elif coupling == "independent":
        lhs = entropy_power(renyi_entropy(convolve(f, f), order))
    elif coupling == "antithetic":
        lhs = 0.0
    else:
        raise ValueError(f"unknown coupling {coupling!r}")
    return lhs, 4 * entropy_power(renyi_entropy(f, order))
