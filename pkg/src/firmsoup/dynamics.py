"""Labor relaxation toward equal wages, and Baumol cost-disease trajectories."""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field
from functools import cached_property
from typing import Mapping, Sequence

import numpy as np

from .closed_form import ToyEconomy
from .core import EconomySpec, FloatArray, sector_outputs
from .errors import EconomyError, NonConvergenceError, StepSizeError
from .solver import EquilibriumSolution, assemble_solution

log = logging.getLogger(__name__)

DEFAULT_ETA = 0.1


def _conserve(labor: FloatArray, total: float) -> FloatArray:
    """Rescale to ``total`` and push the rounding remainder into the largest sector."""
    out = labor * (total / labor.sum())
    k = int(np.argmax(out))
    j = int(np.argmin(out))
    for _ in range(64):
        if math.fsum(out) == total:
            break
        gap = math.fsum([total, *(-out)])
        bumped = out[k] + gap
        if bumped != out[k]:
            out[k] = bumped
        else:
            # gap below half an ulp of the largest entry: nudge the smallest, whose ulp is finer
            out[j] = np.nextafter(out[j], math.copysign(math.inf, gap))
    return out


@dataclass(frozen=True)
class RelaxationState:
    """Out-of-equilibrium labor allocation with capital stocks and prices frozen."""

    spec: EconomySpec
    labor: FloatArray
    capital_stocks: FloatArray
    prices: FloatArray
    step: int = 0

    @classmethod
    def from_solution(cls, sol: EquilibriumSolution, labor: FloatArray | None = None) -> RelaxationState:
        lab = np.array(sol.labor if labor is None else labor, dtype=float)
        if np.any(lab <= 0):
            raise StepSizeError("initial labor allocation must be positive")
        lab = _conserve(lab, sol.spec.total_labor)
        return cls(sol.spec, lab, sol.capital_stocks, sol.prices)

    @cached_property
    def wages(self) -> FloatArray:
        """Value of the marginal product of labor, P_a * labor_exp_a * Y_a / L_a."""
        s = self.spec
        q = sector_outputs(s, self.labor, self.capital_stocks)
        return self.prices * s.labor_exponents * q / self.labor

    @property
    def mean_wage(self) -> float:
        return float(np.sum(self.labor * self.wages) / self.spec.total_labor)

    @property
    def dispersion(self) -> float:
        w = self.wages
        mean = float(np.sum(self.labor * w) / self.spec.total_labor)
        return float(np.max(np.abs(w - mean)) / mean)

    @property
    def wage_variance(self) -> float:
        """Labor-weighted variance of wages relative to the squared mean wage."""
        w = self.wages
        mean = float(np.sum(self.labor * w) / self.spec.total_labor)
        return float(np.sum(self.labor * (w - mean) ** 2) / self.spec.total_labor) / mean**2


def relax_step(state: RelaxationState, eta: float = DEFAULT_ETA) -> RelaxationState:
    """Move labor toward high-wage sectors: ``L_a *= 1 + eta (W_a - mean) / mean``."""
    if not eta > 0:
        raise StepSizeError(f"eta must be positive, got {eta!r}")
    w = state.wages
    mean = float(np.sum(state.labor * w) / state.spec.total_labor)
    moved = state.labor * (1.0 + eta * (w - mean) / mean)
    if np.any(moved <= 0):
        raise StepSizeError(f"eta={eta:g} drives labor non-positive at step {state.step}; reduce eta")
    return RelaxationState(
        state.spec,
        _conserve(moved, state.spec.total_labor),
        state.capital_stocks,
        state.prices,
        state.step + 1,
    )


@dataclass
class RelaxationTrace:
    labor: list[FloatArray]
    dispersion: list[float]
    wage_variance: list[float]
    equilibrium_labor: FloatArray
    converged: bool = False

    @property
    def steps(self) -> int:
        return len(self.dispersion) - 1

    @property
    def final_labor(self) -> FloatArray:
        return self.labor[-1]

    @property
    def distance_to_equilibrium(self) -> float:
        return float(np.max(np.abs(self.final_labor / self.equilibrium_labor - 1.0)))

    def is_monotone(self, series: str = "dispersion", slack: float = 1e-14) -> bool:
        vals = np.asarray(getattr(self, series))
        return bool(np.all(np.diff(vals) <= slack))

    def rows(self):
        for t, (lab, disp, var) in enumerate(zip(self.labor, self.dispersion, self.wage_variance)):
            yield t, lab, disp, var


def perturbed_labor(labor: FloatArray, perturbation: Sequence[float] | float) -> FloatArray:
    """Apply relative changes to ``labor`` and rescale to the same total.

    A scalar ``p`` means alternating ``+p, -p, +p, ...``.
    """
    labor = np.asarray(labor, dtype=float)
    if np.isscalar(perturbation):
        p = float(perturbation) * np.where(np.arange(labor.size) % 2 == 0, 1.0, -1.0)
    else:
        p = np.asarray(perturbation, dtype=float)
    return _conserve(labor * (1.0 + p), float(labor.sum()))


def simulate_relaxation(
    spec: EconomySpec,
    perturbation: Sequence[float] | float = 0.0,
    eta: float = DEFAULT_ETA,
    max_steps: int = 10_000,
    tol: float = 1e-6,
) -> RelaxationTrace:
    """Iterate :func:`relax_step` from a perturbed equilibrium until wages equalize.

    Raises :class:`NonConvergenceError` (carrying the trace) when the
    dispersion is still above ``tol`` after ``max_steps``.
    """
    sol = assemble_solution(spec, strict=False)
    state = RelaxationState.from_solution(sol, perturbed_labor(sol.labor, perturbation))
    trace = RelaxationTrace([state.labor], [state.dispersion], [state.wage_variance], sol.labor)
    while trace.dispersion[-1] >= tol:
        if state.step >= max_steps:
            raise NonConvergenceError(
                f"no convergence after {max_steps} steps (dispersion {trace.dispersion[-1]:.3e})",
                trace.dispersion[-1],
                trace,
            )
        state = relax_step(state, eta)
        trace.labor.append(state.labor)
        trace.dispersion.append(state.dispersion)
        trace.wage_variance.append(state.wage_variance)
    trace.converged = True
    log.debug("relaxation converged in %d steps", trace.steps)
    return trace


STAGNANT = "stagnant"
PROGRESSIVE = "progressive"


@dataclass(frozen=True)
class TrajectorySpec:
    """Exogenous productivity growth ``T_a(t) = T_a(0) (1 + g_a) ** t`` over ``horizon`` periods."""

    base: EconomySpec
    growth: FloatArray
    horizon: int
    labels: tuple[str, ...] | None = None

    def __post_init__(self) -> None:
        base = self.base.to_economy() if isinstance(self.base, ToyEconomy) else self.base
        object.__setattr__(self, "base", base)
        g = np.array(self.growth, dtype=float)
        if g.shape != (base.n_sectors,):
            raise ValueError("growth needs one rate per sector")
        if np.any(~(1.0 + g > 0)):
            raise ValueError("growth factors 1 + g must be positive")
        if int(self.horizon) < 1:
            raise ValueError("horizon must be >= 1")
        g.setflags(write=False)
        object.__setattr__(self, "growth", g)
        object.__setattr__(self, "horizon", int(self.horizon))
        labels = self.labels
        if labels is None:
            labels = tuple(STAGNANT if x < g.mean() else PROGRESSIVE for x in g)
        if len(labels) != base.n_sectors or any(x not in (STAGNANT, PROGRESSIVE) for x in labels):
            raise ValueError("labels must be 'stagnant' or 'progressive', one per sector")
        object.__setattr__(self, "labels", tuple(labels))

    @classmethod
    def from_mapping(cls, base, growth: Mapping[str, float], horizon: int, labels=None) -> TrajectorySpec:
        spec = base.to_economy() if isinstance(base, ToyEconomy) else base
        g = [float(growth.get(name, 0.0)) for name in spec.sector_names]
        return cls(spec, g, horizon, labels)

    def productivity_at(self, t: int) -> FloatArray:
        return self.base.productivity * (1.0 + self.growth) ** t


@dataclass(frozen=True)
class TrajectoryReport:
    """Per-period equilibrium quantities; arrays are indexed ``[t, sector]``."""

    spec: TrajectorySpec
    productivity: FloatArray
    prices: FloatArray
    outputs: FloatArray
    labor: FloatArray
    expenditure_shares: FloatArray

    @property
    def periods(self) -> FloatArray:
        return np.arange(self.spec.horizon + 1)

    @property
    def reference_sector(self) -> int:
        """Most progressive sector (highest growth rate, first on ties)."""
        return int(np.argmax(self.spec.growth))

    @property
    def relative_prices(self) -> FloatArray:
        """Prices in units of the reference sector's good."""
        return self.prices / self.prices[:, [self.reference_sector]]

    def relative_price(self, sector: int | str, numeraire: int | str, t: int) -> float:
        a = self.spec.base.index(sector)
        b = self.spec.base.index(numeraire)
        return float(self.prices[t, a] / self.prices[t, b])

    @property
    def invariance_deviation(self) -> FloatArray:
        """max_t |P_a(t) T_a(t) / (P_a(0) T_a(0)) - 1| per sector."""
        pt = self.prices * self.productivity
        return np.max(np.abs(pt / pt[0] - 1.0), axis=0)

    def invariance_holds(self, tol: float = 1e-12) -> bool:
        return bool(np.all(self.invariance_deviation < tol))


def _tag_period(exc: EconomyError, t: int) -> EconomyError:
    try:
        tagged = type(exc)(f"period {t}: {exc}")
    except TypeError:
        tagged = EconomyError(f"period {t}: {exc}")
    tagged.period = t
    return tagged


def baumol_trajectory(traj: TrajectorySpec) -> TrajectoryReport:
    """Re-solve the long-run equilibrium at every period's productivities."""
    m = traj.base.n_sectors
    shape = (traj.horizon + 1, m)
    prod, prices, outputs, labor, shares = (np.empty(shape) for _ in range(5))
    for t in range(traj.horizon + 1):
        prod[t] = traj.productivity_at(t)
        try:
            sol = assemble_solution(traj.base.replace(productivity=prod[t]))
        except EconomyError as exc:
            raise _tag_period(exc, t) from exc
        prices[t] = sol.prices
        outputs[t] = sol.outputs
        labor[t] = sol.labor
        shares[t] = sol.expenditure_shares
    for arr in (prod, prices, outputs, labor, shares):
        arr.setflags(write=False)
    return TrajectoryReport(traj, prod, prices, outputs, labor, shares)


@dataclass(frozen=True)
class CostDiseaseSummary:
    reference_sector: str | None
    growth_factors: dict[str, float] = field(default_factory=dict)
    inconsistent: tuple[str, ...] = ()

    @property
    def consistent(self) -> bool:
        return not self.inconsistent


def cost_disease_report(report: TrajectoryReport) -> CostDiseaseSummary:
    """Cumulative relative-price growth of each sector against the most progressive one.

    A sector labeled stagnant whose growth rate is below the mean must end
    up relatively dearer; any that do not are listed in ``inconsistent``.
    """
    spec = report.spec
    names = spec.base.sector_names
    if len(names) < 2:
        return CostDiseaseSummary(None)
    ref = report.reference_sector
    rel = report.relative_prices
    factors = {names[a]: float(rel[-1, a] / rel[0, a]) for a in range(len(names)) if a != ref}
    mean_g = float(spec.growth.mean())
    bad = tuple(
        names[a]
        for a in range(len(names))
        if a != ref and spec.labels[a] == STAGNANT and spec.growth[a] < mean_g and not factors[names[a]] > 1.0
    )
    return CostDiseaseSummary(names[ref], factors, bad)
