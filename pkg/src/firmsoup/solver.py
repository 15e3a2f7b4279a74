"""General M-sector long-run equilibrium.

Prices come from the log of the marginal conditions, which for Cobb-Douglas
technology is the linear system ``(I - Lambda) log P = c``. Capital per
laborer follows from the capital condition, and the labor allocation from
Cobb-Douglas (expenditure-share) demand over net outputs, which is linear in
``L`` once prices and intensities are fixed.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass

import numpy as np

from .core import (
    AggregateReport,
    EconomySpec,
    FloatArray,
    ensure_valid,
    per_labor_output,
    xlogy,
)
from .errors import InfeasibleEconomyError, OracleFailure, OutOfRangeError, SingularSystemError

log = logging.getLogger(__name__)

RESIDUAL_TOL = 1e-8
IDENTITY_TOL = 1e-9
_COND_LIMIT = 1e12


@dataclass(frozen=True)
class PriceSystem:
    matrix: FloatArray
    constant: FloatArray
    log_prices: FloatArray

    @property
    def prices(self) -> FloatArray:
        return np.exp(self.log_prices)


@dataclass(frozen=True)
class EquilibriumSolution:
    """Long-run equilibrium of an :class:`EconomySpec`.

    ``capital_intensity[a, b]`` is units of good ``b`` per laborer of sector
    ``a``; ``capital_stocks`` is the same matrix times ``labor[a]``.
    """

    spec: EconomySpec
    prices: FloatArray
    capital_intensity: FloatArray
    labor: FloatArray
    output_per_labor: FloatArray
    capital_stocks: FloatArray
    aggregates: AggregateReport

    @property
    def outputs(self) -> FloatArray:
        return self.output_per_labor * self.labor

    @property
    def consumption(self) -> FloatArray:
        return net_consumption(self.spec, self.outputs, self.capital_stocks)

    @property
    def household_income(self) -> float:
        s = self.spec
        return s.wage * s.total_labor + s.rate_of_return * self.aggregates.aggregate_capital

    @property
    def expenditure_shares(self) -> FloatArray:
        return self.prices * self.outputs / self.aggregates.nominal_gdp


def net_consumption(spec: EconomySpec, outputs: FloatArray, stocks: FloatArray) -> FloatArray:
    """C_a = Y_a - delta_a * sum_b N_ba: output left after replacing worn-out good a."""
    return outputs - spec.depreciation * stocks.sum(axis=0)


def price_system(spec: EconomySpec) -> PriceSystem:
    ensure_valid(spec)
    lam = spec.capital_exponents
    lab = spec.labor_exponents
    w = spec.wage
    m = spec.n_sectors
    rental = lam * w / (lab[:, None] * spec.user_cost[None, :])
    c = (
        math.log(w)
        - np.log(lab)
        - lab * np.log(spec.productivity)
        - np.sum(xlogy(lam, np.where(lam > 0, rental, 1.0)), axis=1)
    )
    matrix = np.eye(m) - lam
    if np.linalg.cond(matrix) > _COND_LIMIT:
        raise SingularSystemError("price system (I - Lambda) is numerically singular")
    try:
        log_p = np.linalg.solve(matrix, c)
    except np.linalg.LinAlgError as exc:
        raise SingularSystemError(str(exc)) from exc
    for arr in (matrix, c, log_p):
        arr.setflags(write=False)
    return PriceSystem(matrix, c, log_p)


def solve_prices(spec: EconomySpec) -> FloatArray:
    """Unique price vector (wage units) satisfying every marginal condition."""
    return price_system(spec).prices


def capital_intensities(spec: EconomySpec, prices: FloatArray) -> FloatArray:
    """n_ab = lambda_ab W / (labor_exp_a P_b (R_c + delta_b))."""
    lam = spec.capital_exponents
    return lam * spec.wage / (spec.labor_exponents[:, None] * prices[None, :] * spec.user_cost[None, :])


def labor_distribution(spec: EconomySpec, prices: FloatArray, intensities: FloatArray) -> FloatArray:
    """Labor allocation clearing Cobb-Douglas demand.

    Solves ``P_a C_a(L) = s_a (W L_t + R_c K_t(L))`` for all but one sector
    (Walras' law makes the last redundant) together with ``sum(L) = L_t``.
    """
    y = per_labor_output(spec, intensities)
    shares = spec.utility_weights / spec.utility_weights.sum()
    # value of net consumption of good a per worker in sector j
    spend = np.diag(prices * y) - (prices * spec.depreciation)[:, None] * intensities.T
    capital_per_worker = intensities @ prices
    system = spend - spec.rate_of_return * np.outer(shares, capital_per_worker)
    rhs = shares * spec.wage * spec.total_labor
    system[-1] = 1.0
    rhs[-1] = spec.total_labor
    if np.linalg.cond(system) > _COND_LIMIT:
        raise SingularSystemError("labor-allocation system is rank deficient")
    labor = np.linalg.solve(system, rhs)
    if np.any(labor <= 0):
        bad = [spec.sector_names[i] for i in np.flatnonzero(labor <= 0)]
        raise InfeasibleEconomyError(f"non-positive labor in sectors {bad}")
    consumption = net_consumption(spec, y * labor, intensities * labor[:, None])
    if np.any(consumption <= 0):
        bad = [spec.sector_names[i] for i in np.flatnonzero(consumption <= 0)]
        raise InfeasibleEconomyError(
            f"depreciation absorbs all output of goods {bad}; no consumption left"
        )
    return labor


def aggregate(spec: EconomySpec, prices: FloatArray, labor: FloatArray, y: FloatArray,
              stocks: FloatArray) -> AggregateReport:
    capital = float(np.sum(stocks * prices[None, :]))
    gdp = float(np.sum(prices * y * labor))
    labor_income = spec.wage * spec.total_labor
    capital_income = float(np.sum(stocks * (prices * spec.user_cost)[None, :]))
    return AggregateReport(
        aggregate_capital=capital,
        nominal_gdp=gdp,
        labor_income=labor_income,
        capital_income=capital_income,
        labor_share=labor_income / gdp,
    )


def assemble_solution(spec: EconomySpec, strict: bool = True) -> EquilibriumSolution:
    """Solve prices, intensities and labor, then aggregate.

    Marginal-condition, Walras and national-accounting residuals are always
    checked. ``strict`` additionally runs the finite-difference and
    first-order-condition oracles; any failure raises :class:`OracleFailure`.
    """
    prices = solve_prices(spec)
    n = capital_intensities(spec, prices)
    labor = labor_distribution(spec, prices, n)
    y = per_labor_output(spec, n)
    stocks = n * labor[:, None]
    for arr in (prices, n, labor, y, stocks):
        arr.setflags(write=False)
    sol = EquilibriumSolution(
        spec=spec,
        prices=prices,
        capital_intensity=n,
        labor=labor,
        output_per_labor=y,
        capital_stocks=stocks,
        aggregates=aggregate(spec, prices, labor, y, stocks),
    )
    worst = max_analytic_residual(sol)
    if worst >= RESIDUAL_TOL:
        raise OracleFailure(f"marginal-condition residual {worst:.3e} exceeds {RESIDUAL_TOL}")
    walras = float(np.sum(prices * sol.consumption)) / sol.household_income - 1.0
    accounting = sol.aggregates.accounting_residual
    if max(abs(walras), abs(accounting)) >= IDENTITY_TOL:
        raise OracleFailure(f"Walras {walras:.3e} / accounting {accounting:.3e} identity broken")
    if strict:
        from .oracle import brute_force_labor_check, check_marginal_conditions

        report = check_marginal_conditions(spec, sol)
        if not report.passed:
            raise OracleFailure(f"oracle residual {report.max_abs_residual:.3e} too large")
        verdict = brute_force_labor_check(spec, sol)
        if not verdict.passed:
            raise OracleFailure("demand-side first-order conditions violated")
    return sol


def max_analytic_residual(sol: EquilibriumSolution) -> float:
    """Largest relative violation of the closed-form marginal conditions."""
    s = sol.spec
    lam = s.capital_exponents
    value_out = sol.prices * sol.outputs
    wage_res = s.labor_exponents * value_out / (s.wage * sol.labor) - 1.0
    used = lam > 0
    cap_res = np.zeros_like(lam)
    denom = sol.prices[None, :] * sol.capital_stocks * s.user_cost[None, :]
    cap_res[used] = (lam * value_out[:, None])[used] / denom[used] - 1.0
    return float(max(np.max(np.abs(wage_res)), np.max(np.abs(cap_res), initial=0.0)))


def aggregate_capital_at(spec: EconomySpec, rate_of_return: float) -> float:
    return assemble_solution(spec.replace(rate_of_return=rate_of_return), strict=False).aggregates.aggregate_capital


def calibrate_rate_of_return(
    spec: EconomySpec,
    target_capital: float,
    r_min: float = 1e-12,
    r_max: float = 1e3,
    max_iter: int = 400,
) -> float:
    """Rate of return at which aggregate capital equals ``target_capital``.

    ``spec.rate_of_return`` is ignored. Aggregate capital falls monotonically
    in R_c, so the root is bracketed on ``[r_min, r_max]`` and bisected
    (geometrically while the bracket spans orders of magnitude).
    """
    if not (target_capital > 0 and math.isfinite(target_capital)):
        raise OutOfRangeError(f"target capital must be positive and finite, got {target_capital!r}")
    lo, hi = r_min, r_max
    k_lo = aggregate_capital_at(spec, lo)
    k_hi = aggregate_capital_at(spec, hi)
    if target_capital > k_lo:
        raise OutOfRangeError(
            f"target capital {target_capital:.6g} exceeds golden-level capital {k_lo:.6g} (R_c -> {r_min:g})"
        )
    if target_capital < k_hi:
        raise OutOfRangeError(
            f"target capital {target_capital:.6g} below capital {k_hi:.6g} at R_c = {r_max:g}"
        )
    mid = lo
    for _ in range(max_iter):
        mid = math.sqrt(lo * hi) if hi > 2.0 * lo else 0.5 * (lo + hi)
        k_mid = aggregate_capital_at(spec, mid)
        if abs(k_mid / target_capital - 1.0) < 1e-10 or hi - lo < 1e-12:
            break
        if k_mid > target_capital:
            lo = mid
        else:
            hi = mid
    log.debug("calibrated R_c=%.17g", mid)
    return mid
