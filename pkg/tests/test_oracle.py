import dataclasses

import numpy as np
import pytest

from firmsoup.closed_form import ToyEconomy
from firmsoup.core import EconomySpec
from firmsoup.oracle import adjudicate_labor_share, brute_force_labor_check, check_marginal_conditions
from firmsoup.solver import assemble_solution

from conftest import random_economy, random_toy


def solved(spec):
    return spec, assemble_solution(spec, strict=False)


class TestMarginalConditions:
    def test_toy_solution_passes(self):
        spec, sol = solved(ToyEconomy([0.5, 0.25], [2.0, 1.0], 0.0, 1.0, 0.05, 90.0).to_economy())
        report = check_marginal_conditions(spec, sol)
        assert report.passed
        assert report.max_abs_residual < 1e-5

    def test_perturbed_price_flagged(self):
        spec, sol = solved(ToyEconomy([0.5, 0.25], [2.0, 1.0], 0.05, 1.0, 0.05, 90.0).to_economy())
        prices = np.array(sol.prices)
        prices[0] *= 1.01
        report = check_marginal_conditions(spec, dataclasses.replace(sol, prices=prices))
        assert not report.passed
        assert report.wage_residuals[0] == pytest.approx(1e-2, rel=1e-4)
        assert abs(report.wage_residuals[1]) < 1e-5

    def test_pure_labor_has_no_capital_checks(self):
        spec = EconomySpec(["a", "b"], np.zeros((2, 2)), [1.0, 3.0], [0.0, 0.0], [1.0, 2.0], 10.0, 0.05)
        report = check_marginal_conditions(*solved(spec))
        assert report.capital_residuals == {}
        assert np.max(np.abs(report.wage_residuals)) < 1e-5

    def test_random_economies(self, rng):
        for _ in range(100):
            report = check_marginal_conditions(*solved(random_economy(rng)))
            assert report.passed, report

    def test_does_not_mutate(self, rng):
        spec, sol = solved(random_economy(rng, m=3))
        before = sol.prices.copy()
        check_marginal_conditions(spec, sol)
        assert np.array_equal(before, sol.prices)


class TestLaborCheck:
    def test_shares_equal_sigma(self):
        spec, sol = solved(ToyEconomy([0.6, 0.6], 1.0, 0.05, [1.0, 3.0], 0.1, 100.0).to_economy())
        verdict = brute_force_labor_check(spec, sol)
        assert verdict.passed
        assert verdict.shares == pytest.approx([0.25, 0.75], rel=1e-12)

    def test_heterogeneous_toy(self, rng):
        for _ in range(50):
            verdict = brute_force_labor_check(*solved(random_toy(rng).to_economy()))
            assert verdict.passed

    def test_general_economies(self, rng):
        for _ in range(50):
            assert brute_force_labor_check(*solved(random_economy(rng))).passed

    def test_swapped_labor_fails(self):
        spec, sol = solved(ToyEconomy([0.5, 0.25], [2.0, 1.0], 0.03, [1.0, 2.0], 0.05, 90.0).to_economy())
        swapped = dataclasses.replace(sol, labor=sol.labor[::-1].copy())
        verdict = brute_force_labor_check(spec, swapped)
        assert not verdict.passed
        assert verdict.ratio_spread > 1e-3


class TestAdjudication:
    def test_one_sector(self):
        c = adjudicate_labor_share(ToyEconomy([2 / 3], 1.0, 0.0, 1.0, 1 / 3, 100.0))
        assert c.direct == pytest.approx(2 / 3, rel=1e-14)
        assert c.corrected == pytest.approx(2 / 3, rel=1e-14)
        assert c.printed == pytest.approx(3 / 2, rel=1e-14)
        assert c.passed

    def test_common_lambda(self):
        c = adjudicate_labor_share(ToyEconomy([0.4, 0.4, 0.4], [1, 2, 3], 0.05, [1, 5, 2], 0.02, 50.0))
        assert c.direct == pytest.approx(0.4, rel=1e-13)

    def test_two_sector(self):
        c = adjudicate_labor_share(ToyEconomy([0.5, 0.25], 1.0, 0.0, 1.0, 0.05, 90.0))
        assert c.direct == pytest.approx(3 / 8, rel=1e-13)
        assert c.printed == pytest.approx(8 / 3, rel=1e-13)

    def test_random(self, rng):
        for _ in range(300):
            c = adjudicate_labor_share(random_toy(rng))
            assert c.passed
            assert abs(c.corrected * c.printed - 1) < 1e-12
