import json
import math

import numpy as np
import pytest

from generators import random_density
from renyi_epi.constants import c_theorem2, discrete_entropy
from renyi_epi.density import make_gaussian, make_pareto_trunc, make_uniform, scale_density
from renyi_epi.entropy import renyi_entropy
from renyi_epi.epi import (
    CounterexampleTable,
    adaptive_step,
    counterexample_experiment,
    critical_dimension,
    epi_check,
    info_young_deficit,
    linearized_check,
    modified_epi_check,
    young_orders,
)
from renyi_epi.convolve import convolve
from renyi_epi.sconcave import certify_s_concave, sample_s_concave


@pytest.fixture(scope="module")
def gaussian():
    return make_gaussian(1.0, 2e-3, 12.0)


class TestEpiCheck:
    def test_zero_constant(self):
        f = make_uniform(0, 1, 1e-3)
        rep = epi_check([f, f], 2, 0.0)
        assert rep.passed and rep.ratio > 0
        assert json.loads(rep.to_json())["constant_used"] == 0.0

    def test_gaussian_equality(self, gaussian):
        rep = epi_check([gaussian, gaussian], 1, 1.0)
        assert rep.ratio == pytest.approx(1.0, abs=1e-3)

    def test_pareto_pair(self):
        _, radial = make_pareto_trunc(10.0, 3.5, 1, 1e-3)
        f = radial.to_grid()
        s = -1 / 3.5
        rep = epi_check([f, f], 0.5, c_theorem2(s, 0.5, 1, 2))
        assert rep.passed

    def test_common_refinement(self):
        f = make_uniform(0, 1, 1e-2)
        g = make_uniform(0, 2, 5e-3)
        rep = epi_check([f, g], 2, 0.0)
        assert rep.passed

    def test_needs_two(self):
        with pytest.raises(ValueError):
            epi_check([make_uniform(0, 1, 0.01)], 2, 0.5)

    def test_random_s_concave_pairs(self):
        rng = np.random.default_rng(21)
        s, r = -0.2, 0.6
        c = c_theorem2(s, r, 1, 2)
        for _ in range(5):
            f, g = sample_s_concave(rng, s), sample_s_concave(rng, s)
            assert certify_s_concave(f, s).certified and certify_s_concave(g, s).certified
            assert epi_check([f, g], r, c).passed


class TestLinearized:
    def test_single_summand(self):
        f = make_uniform(0, 1, 1e-3)
        lhs, rhs = linearized_check([f, f], [1.0, 0.0], 0.5, 1.0, alpha=0.7)
        assert lhs == pytest.approx(0.0, abs=1e-12)
        assert rhs == pytest.approx(0.0, abs=1e-12)

    def test_half_half(self):
        f = make_uniform(0, 1, 1e-3)
        lhs, _ = linearized_check([f, f], [0.5, 0.5], 2.0, 1.0)
        direct = renyi_entropy(scale_density(convolve(f, f), 1 / math.sqrt(2)), 2.0) - renyi_entropy(f, 2.0)
        assert lhs == pytest.approx(direct, abs=1e-12)

    def test_rhs_formula(self):
        f = make_uniform(0, 1, 1e-2)
        _, rhs = linearized_check([f, f], [0.3, 0.7], 0.5, 0.6, alpha=0.8)
        assert rhs == pytest.approx(0.5 * (math.log(0.6) / 0.8 + (1 / 0.8 - 1) * discrete_entropy([0.3, 0.7])))

    def test_s_concave_pair(self):
        rng = np.random.default_rng(22)
        s, r = -0.1, 0.5
        c = c_theorem2(s, r, 1, 2)
        for lam in (0.2, 0.5, 0.8):
            f, g = sample_s_concave(rng, s), sample_s_concave(rng, s)
            lhs, rhs = linearized_check([f, g], [lam, 1 - lam], r, c)
            assert lhs >= rhs - 1e-6

    def test_bad_weights(self):
        f = make_uniform(0, 1, 1e-2)
        with pytest.raises(ValueError):
            linearized_check([f, f], [0.6, 0.6], 0.5, 1.0)


class TestYoung:
    def test_orders(self):
        # r = 2, lam = (1/2, 1/2): r' = 2, r_i' = 4, r_i = 4/3
        assert young_orders([0.5, 0.5], 2.0) == pytest.approx([4 / 3, 4 / 3])
        assert young_orders([1.0, 0.0], 0.5)[0] == pytest.approx(0.5)

    def test_degenerate_zero(self):
        f = make_gaussian(1.0, 1e-2)
        assert info_young_deficit([f, f], [1.0, 0.0], 2.0) == 0.0

    def test_uniforms_half(self):
        f = make_uniform(0, 1, 1e-3)
        assert info_young_deficit([f, f], [0.5, 0.5], 0.5) >= 0

    @pytest.mark.parametrize("r", [0.5, 2.0])
    def test_gaussian_equality(self, gaussian, r):
        assert abs(info_young_deficit([gaussian, gaussian], [0.5, 0.5], r)) < 1e-5

    def test_gaussian_variance_sweep(self):
        vals = []
        for ratio in (0.25, 0.5, 1.0, 2.0, 4.0):
            g = make_gaussian(ratio, 2e-3, 12.0 * math.sqrt(max(1.0, 1 / ratio)))
            vals.append(info_young_deficit([make_gaussian(1.0, 2e-3), g], [0.5, 0.5], 2.0))
        assert min(vals) >= -1e-6
        assert int(np.argmin(vals)) == 2

    @pytest.mark.parametrize("r", [0.5, 2.0])
    def test_jensen_ordering(self, r):
        rng = np.random.default_rng(23)
        for _ in range(10):
            f = random_density(rng)
            lam = rng.uniform(0.1, 0.9)
            for ri in young_orders([lam, 1 - lam], r):
                if r > 1:
                    assert 1 < ri < r
                    assert renyi_entropy(f, r) <= renyi_entropy(f, ri) + 1e-12
                else:
                    assert r < ri < 1
                    assert renyi_entropy(f, r) >= renyi_entropy(f, ri) - 1e-12

    def test_random_nonnegative(self):
        rng = np.random.default_rng(24)
        for i in range(20):
            r = (0.5, 2.0)[i % 2]
            lam = rng.uniform(0.05, 0.95)
            assert info_young_deficit([random_density(rng), random_density(rng)], [lam, 1 - lam], r) >= -1e-6

    def test_order_one(self):
        f = make_uniform(0, 1, 0.01)
        with pytest.raises(ValueError):
            info_young_deficit([f, f], [0.5, 0.5], 1.0)


class TestModified:
    def test_small_alpha(self):
        f = make_uniform(0, 1e-2, 1e-4)
        lhs, rhs = modified_epi_check(f, f, 2.0, 1e-3)
        assert rhs > lhs and rhs == pytest.approx(2.0, rel=1e-2)

    def test_gaussian_shannon(self, gaussian):
        lhs, rhs = modified_epi_check(gaussian, gaussian, 1, 1.0)
        assert lhs == pytest.approx(rhs, rel=1e-3)

    def test_alpha_positive(self):
        f = make_uniform(0, 1, 0.01)
        with pytest.raises(ValueError):
            modified_epi_check(f, f, 2.0, 0.0)


class TestCounterexample:
    def test_critical_dimension(self):
        assert critical_dimension(0.25) == 1
        assert critical_dimension(0.4) == 2
        assert critical_dimension(0.5) == 3

    def test_adaptive_step(self):
        assert adaptive_step(10) == 1e-3
        assert adaptive_step(1e4) == pytest.approx(0.1)

    @pytest.mark.parametrize("r", [0.4, 1 / 3])
    def test_scope_guard(self, r):
        with pytest.raises(ValueError, match="r >= 1/3 unsupported"):
            counterexample_experiment(r, 3.5, [10])

    @pytest.mark.parametrize("p", [3.0, 4.5])
    def test_p_range(self, p):
        with pytest.raises(ValueError, match="p must lie"):
            counterexample_experiment(0.25, p, [10])

    def test_power_of_two(self):
        with pytest.raises(ValueError):
            counterexample_experiment(0.25, 3.5, [10], n=48)

    def test_small_table(self, tmp_path):
        table = counterexample_experiment(0.25, 3.5, [10, 30], n=8)
        assert isinstance(table, CounterexampleTable)
        assert np.all(np.diff(table.column("N_r_X1")) > 0)
        assert table.sigma2_inf == pytest.approx(8 / 3)
        table.to_csv(tmp_path / "t.csv")
        table.to_jsonl(tmp_path / "t.jsonl")
        lines = (tmp_path / "t.csv").read_text().splitlines()
        assert lines[0] == "R,h,sigma2_R,N_r_X1,N_r_Zn,cr_bound"
        rows = [json.loads(x) for x in (tmp_path / "t.jsonl").read_text().splitlines()]
        assert [r["R"] for r in rows] == [10.0, 30.0]
