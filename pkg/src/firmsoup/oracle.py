"""Independent checks of a solved economy.

Derivatives here come from central finite differences of
:func:`~firmsoup.core.evaluate_production`; the closed-form marginal products
are deliberately never used.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .closed_form import (
    ToyEconomy,
    toy_aggregates,
    toy_capital_intensities,
    toy_labor_distribution,
    toy_prices,
)
from .core import EconomySpec, FloatArray, ProductionInput, evaluate_production
from .errors import DomainError
from .solver import EquilibriumSolution

FD_STEP = 1e-6
FD_TOL = 1e-5
IDENTITY_TOL = 1e-9
LAGRANGE_TOL = 1e-6


@dataclass(frozen=True)
class ResidualReport:
    """Relative residuals ``observed / expected - 1`` of every equilibrium condition."""

    wage_residuals: FloatArray
    capital_residuals: dict[tuple[int, int], float]
    walras_residual: float
    accounting_residual: float
    fd_tol: float = FD_TOL
    identity_tol: float = IDENTITY_TOL

    @property
    def max_marginal_residual(self) -> float:
        vals = [float(np.max(np.abs(self.wage_residuals), initial=0.0))]
        vals += [abs(r) for r in self.capital_residuals.values()]
        return max(vals)

    @property
    def max_abs_residual(self) -> float:
        return max(self.max_marginal_residual, abs(self.walras_residual), abs(self.accounting_residual))

    @property
    def passed(self) -> bool:
        return (
            self.max_marginal_residual < self.fd_tol
            and abs(self.walras_residual) < self.identity_tol
            and abs(self.accounting_residual) < self.identity_tol
        )


def _central_difference(f, x: float, step: float = FD_STEP) -> float:
    h = step * abs(x)
    return (f(x + h) - f(x - h)) / (2.0 * h)


def _sector_input(sol: EquilibriumSolution, a: int) -> ProductionInput:
    return ProductionInput(sol.labor[a], sol.capital_stocks[a])


def _outputs(spec: EconomySpec, sol: EquilibriumSolution) -> FloatArray:
    return np.array([evaluate_production(spec, a, _sector_input(sol, a)) for a in range(spec.n_sectors)])


def check_marginal_conditions(
    spec: EconomySpec,
    solution: EquilibriumSolution,
    fd_tol: float = FD_TOL,
    identity_tol: float = IDENTITY_TOL,
) -> ResidualReport:
    """Finite-difference marginal conditions plus the Walras and accounting identities."""
    m = spec.n_sectors
    lam = spec.capital_exponents
    prices, labor, stocks = solution.prices, solution.labor, solution.capital_stocks
    if np.any(labor <= 0) or np.any((lam > 0) & (stocks <= 0)):
        raise DomainError("finite differences need positive labor and positive stocks of used goods")
    wage_res = np.empty(m)
    cap_res: dict[tuple[int, int], float] = {}
    for a in range(m):
        n_row = np.array(stocks[a])

        def q_of_labor(x, a=a, n_row=n_row):
            return evaluate_production(spec, a, ProductionInput(x, n_row))

        d_labor = _central_difference(q_of_labor, labor[a])
        wage_res[a] = prices[a] * d_labor / spec.wage - 1.0
        for b in np.flatnonzero(lam[a] > 0):

            def q_of_stock(x, a=a, b=b, n_row=n_row):
                bumped = n_row.copy()
                bumped[b] = x
                return evaluate_production(spec, a, ProductionInput(labor[a], bumped))

            d_stock = _central_difference(q_of_stock, n_row[b])
            cap_res[(a, int(b))] = prices[a] * d_stock / (prices[b] * spec.user_cost[b]) - 1.0

    outputs = _outputs(spec, solution)
    consumption = outputs - spec.depreciation * stocks.sum(axis=0)
    capital = float(np.sum(stocks * prices[None, :]))
    income = spec.wage * spec.total_labor + spec.rate_of_return * capital
    walras = float(np.sum(prices * consumption)) / income - 1.0
    gdp = float(np.sum(prices * outputs))
    capital_income = float(np.sum(stocks * (prices * spec.user_cost)[None, :]))
    accounting = (spec.wage * spec.total_labor + capital_income) / gdp - 1.0
    wage_res.setflags(write=False)
    return ResidualReport(wage_res, cap_res, walras, accounting, fd_tol, identity_tol)


@dataclass(frozen=True)
class LaborVerdict:
    """Demand-side check: equal Lagrange ratios and expenditure shares equal to s_a."""

    lagrange_ratios: FloatArray
    shares: FloatArray
    target_shares: FloatArray
    tol: float = LAGRANGE_TOL
    notes: list[str] = field(default_factory=list)

    @property
    def multiplier(self) -> float:
        """Common value of the ratios (the multiplier over utility)."""
        return float(np.mean(self.lagrange_ratios))

    @property
    def ratio_spread(self) -> float:
        return float(np.max(np.abs(self.lagrange_ratios / self.multiplier - 1.0)))

    @property
    def share_error(self) -> float:
        return float(np.max(np.abs(self.shares / self.target_shares - 1.0)))

    @property
    def passed(self) -> bool:
        return self.ratio_spread < self.tol and self.share_error < self.tol


def brute_force_labor_check(
    spec: EconomySpec, solution: EquilibriumSolution, tol: float = LAGRANGE_TOL
) -> LaborVerdict:
    """Recompute outputs from the solution's labor and intensities and test the demand side."""
    labor = np.asarray(solution.labor, dtype=float)
    stocks = solution.capital_intensity * labor[:, None]
    outputs = np.array(
        [evaluate_production(spec, a, ProductionInput(labor[a], stocks[a])) for a in range(spec.n_sectors)]
    )
    consumption = outputs - spec.depreciation * stocks.sum(axis=0)
    notes = []
    if np.any(consumption <= 0):
        notes.append("non-positive consumption")
        consumption = np.where(consumption <= 0, np.nan, consumption)
    ratios = spec.utility_weights * spec.labor_exponents * outputs / (consumption * labor)
    capital = float(np.sum(stocks * solution.prices[None, :]))
    income = spec.wage * spec.total_labor + spec.rate_of_return * capital
    shares = solution.prices * consumption / income
    target = spec.utility_weights / spec.utility_weights.sum()
    return LaborVerdict(ratios, shares, target, tol, notes)


@dataclass(frozen=True)
class LaborShareComparison:
    direct: float
    corrected: float
    printed: float

    @property
    def corrected_matches(self) -> bool:
        return abs(self.corrected / self.direct - 1.0) < 1e-12

    @property
    def printed_is_reciprocal(self) -> bool:
        return abs(self.printed * self.direct - 1.0) < 1e-12

    @property
    def passed(self) -> bool:
        return self.corrected_matches and self.printed_is_reciprocal


def adjudicate_labor_share(toy: ToyEconomy) -> LaborShareComparison:
    """Compare ``L_t W / GDP`` (GDP summed from prices and outputs) with both closed forms."""
    labor = toy_labor_distribution(toy)
    n = toy_capital_intensities(toy)
    lam = toy.labor_exponents
    outputs = (toy.productivity * labor) ** lam * (n * labor) ** (1.0 - lam)
    gdp = float(np.sum(toy_prices(toy) * outputs))
    agg = toy_aggregates(toy)
    return LaborShareComparison(
        direct=toy.total_labor * toy.wage / gdp,
        corrected=agg.formula_labor_share,
        printed=agg.printed_labor_share,
    )
