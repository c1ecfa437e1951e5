"""Acceptance criteria, one test each, printing a PASS/FAIL line per criterion.

Run on its own with ``pytest tests/test_acceptance.py -v``; the summary
lines are written straight to the terminal even when output is captured.
"""

import math
import time

import numpy as np
import pytest

from generators import random_density, random_symmetric_unimodal
from oracles import gaussian_renyi_quad
from renyi_epi import cli
from renyi_epi.constants import alpha_theorem3, c_theorem2, ratio_diagnostics, verify_simplex_min
from renyi_epi.convolve import clt_iterate, convolve, hoeffding_constant, hoeffding_tail_check, is_symmetric_unimodal
from renyi_epi.coupling import (
    build_transfer,
    canonical_example,
    delta_max,
    entropy_gain,
    find_shift_set,
    reverse_epi_corollary,
)
from renyi_epi.density import RadialDensity, make_gaussian, make_pareto_trunc, make_uniform
from renyi_epi.entropy import GaussianSpec, gaussian_renyi, renyi_entropy, renyi_entropy_radial
from renyi_epi.epi import counterexample_experiment, epi_check, info_young_deficit, modified_epi_check
from renyi_epi.sconcave import certify_s_concave, check_G_logconcave, entropy_compare_bound, sample_s_concave


@pytest.fixture
def report(capsys):
    def _report(number, passed, detail):
        with capsys.disabled():
            print(f"\n{'PASS' if passed else 'FAIL'} criterion {number:>2}: {detail}")
        assert passed, detail

    return _report


def certified_pair(rng, s):
    out = []
    while len(out) < 2:
        f = sample_s_concave(rng, s)
        if certify_s_concave(f, s).certified:
            out.append(f)
    return out


def test_criterion_01_cover_zhang_numbers(report, tmp_path):
    t = time.perf_counter()
    worst = 0.0
    for r in (0.7, 2.0):
        h_sum, h_diag = canonical_example(r)
        worst = max(worst, abs(h_sum - math.log(2)), abs(h_diag - math.log(4 / 3)))
    code = cli.main(["coverzhang", "--r", "0.7", "2", "--h", "1e-3", "--output", str(tmp_path / "cz")])
    elapsed = time.perf_counter() - t
    ok = worst <= 1e-4 and code == 0 and elapsed < 1.0
    report(1, ok, f"max error {worst:.2e} (tol 1e-4), cli exit {code}, {elapsed:.2f}s (limit 1s)")


def test_criterion_02_gaussian_closed_form(report):
    t = time.perf_counter()
    worst = 0.0
    grid = make_gaussian(1.0, 1e-3, 12.0)
    rho = np.arange(0, 12.0, 1e-3) + 5e-4
    for d in (1, 2):
        if d == 2:
            profile = np.exp(-0.5 * rho**2)
            radial = RadialDensity(2, 1e-3, profile / (2 * math.pi * np.sum(profile * rho) * 1e-3))
        for r in (0.5, 1, 2, 5):
            closed = gaussian_renyi(GaussianSpec(d, 1.0), r)
            quad = gaussian_renyi_quad(1.0, r, d)
            discrete = renyi_entropy(grid, r) if d == 1 else renyi_entropy_radial(radial, r)
            worst = max(worst, abs(closed - quad), abs(closed - discrete))
    elapsed = time.perf_counter() - t
    report(2, worst <= 1e-4 and elapsed < 1.0, f"max |closed - quadrature| {worst:.2e} (tol 1e-4), {elapsed:.2f}s")


def test_criterion_03_clt_convergence(report):
    t = time.perf_counter()
    trace = clt_iterate(make_uniform(-math.sqrt(3), math.sqrt(3), 1e-3), 6, [0.5])
    gaps = trace.gaps(0.5)[1:]
    monotone = bool(np.all(np.diff(gaps) <= 1e-3))
    elapsed = time.perf_counter() - t
    ok = monotone and gaps[-1] <= 0.01 and elapsed < 30
    report(3, ok, f"gaps k=1..6 {np.round(gaps, 4).tolist()}, final {gaps[-1]:.4f} (<= 0.01), {elapsed:.1f}s")


def test_criterion_04_epi_failure(report):
    t = time.perf_counter()
    table = counterexample_experiment(0.25, 3.5, [10, 1e2, 1e3, 1e4], n=64)
    elapsed = time.perf_counter() - t
    bound = table.column("cr_bound")
    Nz = table.column("N_r_Zn")
    decreasing = table.decreasing(1e-3)
    small = bound[-1] < 0.1
    within = bool(np.all(Nz <= 1.1 * table.gaussian_bound))
    ok = decreasing and small and within and elapsed < 300
    detail = (
        f"c_r bounds {np.round(bound, 3).tolist()} decreasing={decreasing}, final<0.1={small}; "
        f"N_r(Z_n) {np.round(Nz, 1).tolist()} vs 1.1*{table.gaussian_bound:.1f} within={within}; {elapsed:.0f}s"
    )
    report(4, ok, detail)


def test_criterion_05_theorem2_constant(report):
    t = time.perf_counter()
    rng = np.random.default_rng(5)
    s, r = -0.1, 0.5
    c = c_theorem2(s, r, 1, 2)
    reps = [epi_check(certified_pair(rng, s), r, c) for _ in range(20)]
    elapsed = time.perf_counter() - t
    ok = all(rep.passed for rep in reps) and elapsed < 60
    worst = min(rep.ratio for rep in reps)
    report(5, ok, f"min ratio {worst:.4f} vs c={c:.4f} on 20 pairs, {elapsed:.1f}s")


def test_criterion_06_simplex_minimum(report):
    worst_gap, worst_rel = math.inf, 0.0
    for d in (1, 2):
        for n in (2, 3):
            res = verify_simplex_min(-0.1, 0.5, d, n, samples=10_000, seed=6)
            worst_gap = min(worst_gap, res["min_found"] - res["at_uniform"])
            c = c_theorem2(-0.1, 0.5, d, n)
            worst_rel = max(worst_rel, abs(math.exp(res["at_uniform"]) - c) / c)
    ok = worst_gap >= -1e-9 and worst_rel <= 1e-9
    report(6, ok, f"min(sampled - uniform) {worst_gap:.2e} (>= -1e-9), exp(F(uniform)) vs c rel {worst_rel:.1e}")


def test_criterion_07_proof_diagnostics(report):
    rep = ratio_diagnostics(-0.1, 0.9, 1, grid_pts=1000)
    k1 = rep["k"][1]
    ok = (
        rep["in_proof_range"]
        and rep["dA"] >= -1e-9
        and k1["dg"] >= -1e-9
        and k1["U_spread"] <= 1e-9 * abs(k1["U0"])
        and k1["T_min"] >= -1e-9
    )
    detail = (
        f"r0={rep['r0']:.4f}, min d(-A/H)={rep['dA']:.2e}, min d(-g1/H)={k1['dg']:.2e}, "
        f"U spread/U0={k1['U_spread'] / abs(k1['U0']):.1e}, T min={k1['T_min']:.3f}"
    )
    report(7, ok, detail)


def test_criterion_08_theorem3_exponent(report):
    t = time.perf_counter()
    rng = np.random.default_rng(8)
    s, r = -0.1, 0.9
    alpha = alpha_theorem3(s, r, 1)
    worst = math.inf
    for _ in range(20):
        lhs, rhs = modified_epi_check(*certified_pair(rng, s), r, alpha)
        worst = min(worst, lhs / rhs - 1)
    elapsed = time.perf_counter() - t
    ok = worst >= -1e-6 and elapsed < 60
    report(8, ok, f"alpha={alpha:.4f}, min relative slack {worst:.3e} on 20 pairs, {elapsed:.1f}s")


def test_criterion_09_flm_logconcavity(report):
    t = time.perf_counter()
    gauss = check_G_logconcave(make_gaussian(1.0, 1e-3), 0.0, np.round(np.arange(0.1, 5.0001, 0.05), 10))
    p = 3.5
    _, radial = make_pareto_trunc(10.0, p, 1, 1e-3)
    pareto = check_G_logconcave(radial.to_grid(), -1 / p, np.round(np.arange(0.3, 3.0001, 0.05), 10))
    rng = np.random.default_rng(9)
    slack = math.inf
    done = 0
    while done < 100:
        s = -rng.uniform(0.0, 0.5)
        f = sample_s_concave(rng, s, h=5e-3)
        if not certify_s_concave(f, s).certified:
            continue
        lo = max(0.0, -s) + 1e-3
        r, q = np.sort(rng.uniform(lo, 0.999, size=2))
        if q - r < 1e-3:
            continue
        lhs, rhs = entropy_compare_bound(f, s, r, q)
        slack = min(slack, lhs - rhs)
        done += 1
    elapsed = time.perf_counter() - t
    ok = gauss >= -1e-8 and pareto >= -1e-8 and slack >= -1e-6
    report(9, ok, f"log G margins gauss {gauss:.2e}, pareto {pareto:.2e}; min comparison slack {slack:.2e}; {elapsed:.1f}s")


def test_criterion_10_entropic_young(report):
    rng = np.random.default_rng(10)
    worst = math.inf
    for i in range(100):
        r = (0.5, 2.0)[i % 2]
        fs = [random_density(rng, 1e-2), random_density(rng, 1e-2)]
        lam = rng.uniform(0.05, 0.95)
        worst = min(worst, info_young_deficit(fs, [lam, 1 - lam], r))
    sweep = []
    for ratio in np.geomspace(0.25, 4.0, 17):
        f = make_gaussian(1.0, 2e-3, 12.0)
        g = make_gaussian(float(ratio), 2e-3, 12.0 * math.sqrt(max(1.0, 1 / ratio)))
        sweep.append(info_young_deficit([f, g], [0.5, 0.5], 2.0))
    ok = worst >= -1e-6 and min(sweep) <= 1e-3
    report(10, ok, f"min deficit random pairs {worst:.2e} (>= -1e-6); Gaussian sweep min {min(sweep):.2e} (<= 1e-3)")


def test_criterion_11_symmetric_unimodal_and_tails(report):
    rng = np.random.default_rng(11)
    closed = 0
    for _ in range(200):
        f = random_symmetric_unimodal(rng)
        g = random_symmetric_unimodal(rng)
        if f.h != g.h:
            g = random_symmetric_unimodal(rng)
            while g.h != f.h:
                g = random_symmetric_unimodal(rng)
        closed += is_symmetric_unimodal(convolve(f, g), 1e-9)
    trace = clt_iterate(make_uniform(-1, 1, 1e-3), 6, [2.0], keep=True)
    tails = {n: hoeffding_tail_check(trace.densities[k], 1.0, 1) for k, n in ((1, 2), (6, 64))}
    ok = closed == 200 and all(v <= 0 for v in tails.values()) and math.isclose(hoeffding_constant(1), 1.0, rel_tol=1e-12)
    report(11, ok, f"closure {closed}/200; tail excess n=2: {tails[2]:.3g}, n=64: {tails[64]:.3g}; c_1={hoeffding_constant(1):.12f}")


def test_criterion_12_characterization(report):
    rng = np.random.default_rng(12)
    agree, gains = 0, []
    for _ in range(100):
        f = random_density(rng, 1e-2)
        found = find_shift_set(f, 2.0)
        certified = certify_s_concave(f, 1.0).certified
        agree += (found is None) == certified
        if found is not None:
            x0, mask = found
            _, mix = build_transfer(f, x0, mask, delta_max(f, x0, mask, 2.0) / 4)
            gains.append(entropy_gain(f, mix.fhat, 2.0))
    lhs, rhs = reverse_epi_corollary(make_uniform(0, 1, 1e-3), 1.0, "identical")
    equality = abs(lhs - rhs) <= 1e-12 * rhs
    ok = agree == 100 and all(g > 0 for g in gains) and equality
    report(12, ok, f"agreement {agree}/100, {len(gains)} gains all > 0: {all(g > 0 for g in gains)} "
                   f"(min {min(gains):.2e}); identical coupling N(2X)/4N(X) = {lhs / rhs:.15f}")
