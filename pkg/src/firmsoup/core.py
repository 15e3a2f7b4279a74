"""Domain types and Cobb-Douglas production primitives.

Sector ``a`` produces

    Q_a = (T_a L_a) ** labor_exp[a] * prod_b N_ab ** capital_exponents[a, b]

where ``capital_exponents[a, b]`` is the exponent of good ``b`` installed as
physical capital in sector ``a`` and ``labor_exp[a] = 1 - sum_b
capital_exponents[a, b]``. Money values are in units of the wage.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from numpy.typing import ArrayLike, NDArray

from .errors import DomainError, ValidationError

FloatArray = NDArray[np.float64]


def _frozen(values: ArrayLike, ndim: int, name: str) -> FloatArray:
    arr = np.array(values, dtype=float)
    if arr.ndim != ndim:
        raise ValueError(f"{name} must be {ndim}-dimensional, got shape {arr.shape}")
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True)
class EconomySpec:
    """Full parameterization of an M-sector economy.

    Attributes:
        sector_names: M distinct labels; good ``b`` is the output of sector ``b``.
        capital_exponents: M x M matrix, entry ``[a, b]`` is the exponent of
            good ``b`` used as capital in sector ``a``.
        productivity: T_a > 0, output units per effective laborer.
        depreciation: delta_a >= 0, fraction of good ``a`` lost per period
            wherever it is installed.
        utility_weights: sigma_a > 0, Cobb-Douglas utility exponents.
        total_labor: L_t > 0.
        rate_of_return: R_c >= 0 per period.
        wage: W > 0, the numeraire.
    """

    sector_names: tuple[str, ...]
    capital_exponents: FloatArray
    productivity: FloatArray
    depreciation: FloatArray
    utility_weights: FloatArray
    total_labor: float
    rate_of_return: float
    wage: float = 1.0

    def __post_init__(self) -> None:
        object.__setattr__(self, "sector_names", tuple(str(s) for s in self.sector_names))
        m = len(self.sector_names)
        lam = _frozen(self.capital_exponents, 2, "capital_exponents")
        if lam.shape != (m, m):
            raise ValueError(f"capital_exponents must be {m}x{m}, got {lam.shape}")
        object.__setattr__(self, "capital_exponents", lam)
        for name in ("productivity", "depreciation", "utility_weights"):
            arr = _frozen(getattr(self, name), 1, name)
            if arr.shape != (m,):
                raise ValueError(f"{name} must have length {m}, got {arr.shape[0]}")
            object.__setattr__(self, name, arr)
        for name in ("total_labor", "rate_of_return", "wage"):
            object.__setattr__(self, name, float(getattr(self, name)))

    @property
    def n_sectors(self) -> int:
        return len(self.sector_names)

    @property
    def labor_exponents(self) -> FloatArray:
        return 1.0 - self.capital_exponents.sum(axis=1)

    @property
    def user_cost(self) -> FloatArray:
        """R_c + delta_b per good: rental cost of one wage-unit of capital good b."""
        return self.rate_of_return + self.depreciation

    @property
    def is_diagonal(self) -> bool:
        lam = self.capital_exponents
        return bool(np.all(lam[~np.eye(self.n_sectors, dtype=bool)] == 0.0))

    def index(self, sector: int | str) -> int:
        if isinstance(sector, str):
            try:
                return self.sector_names.index(sector)
            except ValueError:
                raise KeyError(f"unknown sector {sector!r}") from None
        if not 0 <= sector < self.n_sectors:
            raise IndexError(f"sector index {sector} out of range")
        return int(sector)

    def replace(self, **changes) -> EconomySpec:
        kwargs = dict(
            sector_names=self.sector_names,
            capital_exponents=self.capital_exponents,
            productivity=self.productivity,
            depreciation=self.depreciation,
            utility_weights=self.utility_weights,
            total_labor=self.total_labor,
            rate_of_return=self.rate_of_return,
            wage=self.wage,
        )
        kwargs.update(changes)
        return EconomySpec(**kwargs)


@dataclass(frozen=True)
class ProductionInput:
    """Labor and physical capital quantities installed in one sector."""

    labor: float
    capital_quantities: FloatArray

    def __post_init__(self) -> None:
        object.__setattr__(self, "labor", float(self.labor))
        object.__setattr__(
            self, "capital_quantities", _frozen(self.capital_quantities, 1, "capital_quantities")
        )

    def scaled(self, z: float) -> ProductionInput:
        return ProductionInput(self.labor * z, self.capital_quantities * z)


@dataclass(frozen=True)
class Violation:
    message: str
    sector: int | None = None

    def __str__(self) -> str:
        return self.message


@dataclass(frozen=True)
class ValidationReport:
    violations: tuple[Violation, ...] = field(default_factory=tuple)

    @property
    def passed(self) -> bool:
        return not self.violations

    def __bool__(self) -> bool:
        return self.passed

    @property
    def messages(self) -> list[str]:
        return [v.message for v in self.violations]


def validate_economy(spec: EconomySpec) -> ValidationReport:
    """Check every structural invariant of ``spec``; never raises."""
    out: list[Violation] = []
    names = spec.sector_names
    if len(set(names)) != len(names):
        out.append(Violation("sector names must be distinct"))
    if spec.n_sectors == 0:
        out.append(Violation("economy must have at least one sector"))
    lam = spec.capital_exponents
    for a, name in enumerate(names):
        row = lam[a]
        if not np.all(np.isfinite(row)) or np.any(row < 0):
            out.append(Violation(f"capital exponents of sector {name!r} must be finite and >= 0", a))
        lab = spec.labor_exponents[a]
        if not lab > 0:
            out.append(
                Violation(f"labor exponent must be positive in sector {name!r} (got {lab:.17g})", a)
            )
        elif lab > 1:
            out.append(Violation(f"labor exponent must be <= 1 in sector {name!r}", a))
        if not spec.productivity[a] > 0:
            out.append(Violation(f"productivity of sector {name!r} must be positive", a))
        if not spec.depreciation[a] >= 0:
            out.append(Violation(f"depreciation of sector {name!r} must be >= 0", a))
        if not spec.utility_weights[a] > 0:
            out.append(Violation(f"utility weight of sector {name!r} must be positive", a))
        if not spec.rate_of_return + spec.depreciation[a] > 0:
            out.append(Violation(f"R_c + delta_{a + 1} must be positive (sector {name!r})", a))
    if not spec.total_labor > 0:
        out.append(Violation("total labor must be positive"))
    if not spec.rate_of_return >= 0:
        out.append(Violation("rate of return must be >= 0"))
    if not spec.wage > 0:
        out.append(Violation("wage must be positive"))
    return ValidationReport(tuple(out))


def ensure_valid(spec: EconomySpec) -> None:
    report = validate_economy(spec)
    if not report.passed:
        raise ValidationError("; ".join(report.messages))


def _check_inputs(spec: EconomySpec, a: int, inp: ProductionInput) -> None:
    if inp.capital_quantities.shape != (spec.n_sectors,):
        raise ValueError("capital_quantities must have one entry per good")
    if inp.labor < 0 or np.any(inp.capital_quantities < 0):
        raise DomainError("production inputs must be nonnegative")


def evaluate_production(spec: EconomySpec, sector: int | str, inp: ProductionInput) -> float:
    """Output Q_a of ``sector`` for the given labor and capital stocks."""
    a = spec.index(sector)
    _check_inputs(spec, a, inp)
    lam = spec.capital_exponents[a]
    # numpy defines 0.0 ** 0.0 == 1.0, so absent goods contribute a neutral factor
    effective_labor = spec.productivity[a] * inp.labor
    q = effective_labor ** spec.labor_exponents[a]
    q *= float(np.prod(np.power(inp.capital_quantities, lam)))
    return float(q)


def marginal_products(
    spec: EconomySpec, sector: int | str, inp: ProductionInput
) -> tuple[float, FloatArray]:
    """Return ``(dQ/dL, dQ/dN_a.)`` in closed form.

    Goods with zero exponent get a zero marginal product. Raises
    :class:`DomainError` when an input with positive exponent is zero.
    """
    a = spec.index(sector)
    _check_inputs(spec, a, inp)
    lam = spec.capital_exponents[a]
    n = inp.capital_quantities
    if inp.labor <= 0 or np.any((lam > 0) & (n <= 0)):
        raise DomainError(f"marginal product undefined at zero input in sector {spec.sector_names[a]!r}")
    q = evaluate_production(spec, a, inp)
    d_labor = spec.labor_exponents[a] * q / inp.labor
    d_capital = np.zeros_like(n)
    used = lam > 0
    d_capital[used] = lam[used] * q / n[used]
    return float(d_labor), d_capital


def per_labor_output(spec: EconomySpec, intensities: FloatArray) -> FloatArray:
    """y_a = T_a ** labor_exp * prod_b n_ab ** lambda_ab (output per laborer)."""
    lam = spec.capital_exponents
    return spec.productivity ** spec.labor_exponents * np.prod(np.power(intensities, lam), axis=1)


def sector_outputs(spec: EconomySpec, labor: FloatArray, stocks: FloatArray) -> FloatArray:
    """Vectorized Q_a for every sector at once."""
    lam = spec.capital_exponents
    return (spec.productivity * labor) ** spec.labor_exponents * np.prod(np.power(stocks, lam), axis=1)


def xlogy(x, y):
    """Elementwise ``x * log(y)`` with the convention ``0 * log(anything) = 0``."""
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    out = np.zeros(np.broadcast(x, y).shape)
    mask = np.broadcast_to(x != 0, out.shape)
    xb = np.broadcast_to(x, out.shape)
    yb = np.broadcast_to(y, out.shape)
    with np.errstate(divide="ignore"):
        out[mask] = xb[mask] * np.log(yb[mask])
    return out if out.ndim else float(out)


@dataclass(frozen=True)
class AggregateReport:
    """Extensive aggregates of a solved economy, all money values in wage units.

    ``labor_share`` is ``labor_income / nominal_gdp``. The closed-form toy
    evaluator additionally fills ``formula_labor_share`` (the convex-combination
    closed form) and ``printed_labor_share`` (the reciprocal orientation) so the
    three can be compared.
    """

    aggregate_capital: float
    nominal_gdp: float
    labor_income: float
    capital_income: float
    labor_share: float
    formula_labor_share: float | None = None
    printed_labor_share: float | None = None

    @property
    def implied_aggregate_lambda(self) -> float:
        """Labor exponent of the aggregate Cobb-Douglas that reproduces this share."""
        return self.labor_share

    @property
    def accounting_residual(self) -> float:
        return (self.labor_income + self.capital_income) / self.nominal_gdp - 1.0
