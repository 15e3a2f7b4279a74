"""Closed-form evaluators for the diagonal ("toy") and two-sector economies.

The toy economy uses the *labor* exponent convention,
``Y_a = (T_a L_a) ** lam_a * N_a ** (1 - lam_a)``, with each sector using only
its own good as capital. The bisector economy uses the capital-exponent
convention of :class:`~firmsoup.core.EconomySpec` with a common depreciation.
These are used as analytic oracles for the general solver.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .core import AggregateReport, EconomySpec, FloatArray, _frozen, xlogy
from .errors import DegenerateDenominatorError, ValidationError


@dataclass(frozen=True)
class ToyEconomy:
    """Economy with no intermediate goods: sector ``a`` uses only good ``a`` as capital."""

    labor_exponents: FloatArray
    productivity: FloatArray
    depreciation: FloatArray
    utility_weights: FloatArray
    rate_of_return: float
    total_labor: float
    wage: float = 1.0
    sector_names: tuple[str, ...] | None = None

    def __post_init__(self) -> None:
        lam = _frozen(self.labor_exponents, 1, "labor_exponents")
        m = lam.shape[0]
        object.__setattr__(self, "labor_exponents", lam)
        for name in ("productivity", "depreciation", "utility_weights"):
            arr = _frozen(np.broadcast_to(np.asarray(getattr(self, name), float), (m,)), 1, name)
            object.__setattr__(self, name, arr)
        for name in ("rate_of_return", "total_labor", "wage"):
            object.__setattr__(self, name, float(getattr(self, name)))
        names = self.sector_names
        if names is None:
            names = tuple(f"s{i + 1}" for i in range(m))
        object.__setattr__(self, "sector_names", tuple(names))
        if len(self.sector_names) != m:
            raise ValueError("sector_names length must match labor_exponents")
        self._validate()

    def _validate(self) -> None:
        lam, r, d = self.labor_exponents, self.rate_of_return, self.depreciation
        problems = []
        if np.any(~(lam > 0)) or np.any(lam > 1):
            problems.append("labor exponents must lie in (0, 1]")
        if np.any(~(self.productivity > 0)):
            problems.append("productivity must be positive")
        if np.any(~(d >= 0)):
            problems.append("depreciation must be >= 0")
        if np.any(~(self.utility_weights > 0)):
            problems.append("utility weights must be positive")
        if not r >= 0:
            problems.append("rate of return must be >= 0")
        if np.any(~(r + d > 0)) or np.any(~(r + d * lam > 0)):
            problems.append("R_c + delta_a and R_c + delta_a * lam_a must be positive")
        if not self.total_labor > 0 or not self.wage > 0:
            problems.append("total labor and wage must be positive")
        if problems:
            raise ValidationError("; ".join(problems))

    @property
    def n_sectors(self) -> int:
        return self.labor_exponents.shape[0]

    @property
    def user_cost(self) -> FloatArray:
        return self.rate_of_return + self.depreciation

    def to_economy(self) -> EconomySpec:
        """General representation: capital exponent matrix ``diag(1 - lam_a)``."""
        return EconomySpec(
            sector_names=self.sector_names,
            capital_exponents=np.diag(1.0 - self.labor_exponents),
            productivity=self.productivity,
            depreciation=self.depreciation,
            utility_weights=self.utility_weights,
            total_labor=self.total_labor,
            rate_of_return=self.rate_of_return,
            wage=self.wage,
        )

    @classmethod
    def from_economy(cls, spec: EconomySpec) -> ToyEconomy:
        if not spec.is_diagonal:
            raise ValidationError("economy has cross-sector capital; not a toy economy")
        return cls(
            labor_exponents=1.0 - np.diag(spec.capital_exponents),
            productivity=spec.productivity,
            depreciation=spec.depreciation,
            utility_weights=spec.utility_weights,
            rate_of_return=spec.rate_of_return,
            total_labor=spec.total_labor,
            wage=spec.wage,
            sector_names=spec.sector_names,
        )

    def replace(self, **changes) -> ToyEconomy:
        kwargs = {
            f: getattr(self, f)
            for f in (
                "labor_exponents",
                "productivity",
                "depreciation",
                "utility_weights",
                "rate_of_return",
                "total_labor",
                "wage",
                "sector_names",
            )
        }
        kwargs.update(changes)
        return ToyEconomy(**kwargs)


def toy_capital_intensities(toy: ToyEconomy) -> FloatArray:
    """n_a = N_a / L_a = T_a ((1 - lam_a) / (R_c + delta_a)) ** (1 / lam_a)."""
    lam = toy.labor_exponents
    ratio = (1.0 - lam) / toy.user_cost
    return toy.productivity * np.exp(xlogy(1.0 / lam, ratio))


def toy_capital_per_labor(toy: ToyEconomy, sector: int) -> float:
    return float(toy_capital_intensities(toy)[sector])


def toy_prices(toy: ToyEconomy) -> FloatArray:
    """P_a = W / (lam_a T_a) * ((1 - lam_a) / (R_c + delta_a)) ** ((lam_a - 1) / lam_a)."""
    lam = toy.labor_exponents
    ratio = (1.0 - lam) / toy.user_cost
    # pure-labor sectors: exponent is 0 and the base is 0, giving P = W / T
    return toy.wage / (lam * toy.productivity) * np.exp(xlogy((lam - 1.0) / lam, ratio))


def toy_price(toy: ToyEconomy, sector: int) -> float:
    return float(toy_prices(toy)[sector])


def _labor_weights(toy: ToyEconomy) -> tuple[FloatArray, FloatArray]:
    lam, r, d = toy.labor_exponents, toy.rate_of_return, toy.depreciation
    phi = (r + d) / (r + d * lam)
    return phi, lam * toy.utility_weights * phi


def toy_labor_distribution(toy: ToyEconomy) -> FloatArray:
    """Labor allocation implied by Cobb-Douglas utility over net outputs."""
    _, w = _labor_weights(toy)
    return toy.total_labor * w / w.sum()


def toy_consumption(toy: ToyEconomy) -> FloatArray:
    """Net output C_a = Y_a - delta_a N_a at the toy equilibrium."""
    labor = toy_labor_distribution(toy)
    n = toy_capital_intensities(toy)
    lam = toy.labor_exponents
    y = toy.productivity**lam * n ** (1.0 - lam)
    c = (y - toy.depreciation * n) * labor
    if np.any(c <= 0):
        raise ValidationError("non-positive consumption in toy economy")
    return c


def toy_aggregate_capital(toy: ToyEconomy) -> float:
    """K_t straight from the parameters, without forming the labor allocation."""
    phi, w = _labor_weights(toy)
    lam, r, d = toy.labor_exponents, toy.rate_of_return, toy.depreciation
    return float(
        toy.wage * toy.total_labor / w.sum() * np.sum(toy.utility_weights * (1 - lam) / (r + d * lam))
    )


def toy_aggregates(toy: ToyEconomy) -> AggregateReport:
    """Aggregate capital, GDP and labor share in closed form.

    ``labor_share`` is computed directly as ``L_t W / GDP``;
    ``formula_labor_share`` is ``sum(lam sigma phi) / sum(sigma phi)`` and
    ``printed_labor_share`` the reciprocal orientation of that ratio.
    """
    lam = toy.labor_exponents
    labor = toy_labor_distribution(toy)
    capital = toy.wage * float(np.sum(labor * (1.0 - lam) / (lam * toy.user_cost)))
    gdp = toy.wage * float(np.sum(labor / lam))
    labor_income = toy.wage * toy.total_labor
    capital_income = toy.wage * float(np.sum(labor * (1.0 - lam) / lam))
    phi, w = _labor_weights(toy)
    sigma_phi = float(np.sum(toy.utility_weights * phi))
    return AggregateReport(
        aggregate_capital=capital,
        nominal_gdp=gdp,
        labor_income=labor_income,
        capital_income=capital_income,
        labor_share=labor_income / gdp,
        formula_labor_share=float(w.sum()) / sigma_phi,
        printed_labor_share=sigma_phi / float(w.sum()),
    )


@dataclass(frozen=True)
class BisectorEconomy:
    """Two sectors A and B, each using both goods as capital, common depreciation."""

    lam_AA: float
    lam_AB: float
    lam_BA: float
    lam_BB: float
    T_A: float
    T_B: float
    depreciation: float
    rate_of_return: float
    wage: float = 1.0

    def __post_init__(self) -> None:
        for f in self.__dataclass_fields__:
            object.__setattr__(self, f, float(getattr(self, f)))
        lams = (self.lam_AA, self.lam_AB, self.lam_BA, self.lam_BB)
        problems = []
        if any(not x >= 0 for x in lams):
            problems.append("exponents must be >= 0")
        if not self.lam_AA + self.lam_AB < 1 or not self.lam_BA + self.lam_BB < 1:
            problems.append("exponent row sums must be below 1")
        if not (self.T_A > 0 and self.T_B > 0 and self.wage > 0):
            problems.append("productivities and wage must be positive")
        if not (self.depreciation >= 0 and self.rate_of_return >= 0):
            problems.append("depreciation and rate of return must be >= 0")
        if not self.rate_of_return + self.depreciation > 0:
            problems.append("R_c + delta must be positive")
        if problems:
            raise ValidationError("; ".join(problems))

    @property
    def denominator(self) -> float:
        a, b, c, d = self.lam_AA, self.lam_AB, self.lam_BA, self.lam_BB
        return 1.0 - d - a + a * d - b * c

    def swapped(self) -> BisectorEconomy:
        """Relabel A <-> B."""
        return BisectorEconomy(
            lam_AA=self.lam_BB,
            lam_AB=self.lam_BA,
            lam_BA=self.lam_AB,
            lam_BB=self.lam_AA,
            T_A=self.T_B,
            T_B=self.T_A,
            depreciation=self.depreciation,
            rate_of_return=self.rate_of_return,
            wage=self.wage,
        )

    def to_economy(self, utility_weights=(1.0, 1.0), total_labor: float = 1.0) -> EconomySpec:
        return EconomySpec(
            sector_names=("A", "B"),
            capital_exponents=[[self.lam_AA, self.lam_AB], [self.lam_BA, self.lam_BB]],
            productivity=[self.T_A, self.T_B],
            depreciation=[self.depreciation, self.depreciation],
            utility_weights=utility_weights,
            total_labor=total_labor,
            rate_of_return=self.rate_of_return,
            wage=self.wage,
        )

    @classmethod
    def from_economy(cls, spec: EconomySpec) -> BisectorEconomy:
        if spec.n_sectors != 2:
            raise ValidationError("bisector economy needs exactly two sectors")
        if spec.depreciation[0] != spec.depreciation[1]:
            raise ValidationError("bisector closed form assumes a common depreciation rate")
        lam = spec.capital_exponents
        return cls(
            lam_AA=lam[0, 0],
            lam_AB=lam[0, 1],
            lam_BA=lam[1, 0],
            lam_BB=lam[1, 1],
            T_A=spec.productivity[0],
            T_B=spec.productivity[1],
            depreciation=spec.depreciation[0],
            rate_of_return=spec.rate_of_return,
            wage=spec.wage,
        )


def bisector_price_A(b: BisectorEconomy) -> float:
    """Long-run price of good A, evaluated term by term in log space."""
    aa, ab, ba, bb = b.lam_AA, b.lam_AB, b.lam_BA, b.lam_BB
    denom = b.denominator
    if abs(denom) < 1e-12:
        raise DegenerateDenominatorError(f"exponent denominator {denom!r} vanishes")
    labor_A = 1.0 - aa - ab
    labor_B = 1.0 - bb - ba
    cost = b.rate_of_return + b.depreciation
    terms = (
        (bb - aa * bb - ab * bb - 1 + aa + ab, b.T_A),
        (ab * bb + ab * ba - ab, b.T_B),
        (ab * ba + aa + ab - aa * bb, cost),
        (aa * (bb - 1), aa),
        (ab * (bb - 1), ab),
        (-ab * ba, ba),
        (-ab * bb, bb),
        (aa + ab + bb - aa * bb - ab * bb - 1, labor_A),
        (ab * bb + ab * ba - ab, labor_B),
    )
    log_bracket = sum(xlogy(exponent, base) for exponent, base in terms)
    return b.wage * float(np.exp(log_bracket / denom))


def bisector_price_B(b: BisectorEconomy) -> float:
    return bisector_price_A(b.swapped())


def bisector_capital_allocation(b: BisectorEconomy, labor_A: float) -> tuple[float, float]:
    """Stocks ``(N_AA, N_AB)`` installed in sector A employing ``labor_A`` workers."""
    p_a = bisector_price_A(b)
    p_b = bisector_price_B(b)
    scale = labor_A * b.wage / ((1.0 - b.lam_AA - b.lam_AB) * (b.rate_of_return + b.depreciation))
    return scale * b.lam_AA / p_a, scale * b.lam_AB / p_b
