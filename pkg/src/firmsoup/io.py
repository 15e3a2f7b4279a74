"""Economy config files and solution reports.

Config documents are JSON. Reports are a directory of CSV tables plus a
``manifest.json``; every float is written as ``%.16e`` (17 significant
digits) so a report read back reproduces the doubles exactly.
"""

from __future__ import annotations

import csv
import io
import json
import os
import re
import tempfile
import warnings
from dataclasses import dataclass
from pathlib import Path
from typing import Any, Iterable, Mapping

import numpy as np

from . import __version__
from .closed_form import BisectorEconomy, ToyEconomy
from .core import AggregateReport, EconomySpec, validate_economy
from .dynamics import TrajectorySpec
from .errors import ConfigError, ValidationError
from .solver import EquilibriumSolution, aggregate

TOP_KEYS = ("sectors", "total_labor", "wage", "rate_of_return", "target_aggregate_capital", "growth", "horizon")
SECTOR_KEYS = ("name", "productivity", "depreciation", "utility_weight", "capital_exponents")
REPORT_FILES = ("prices.csv", "intensities.csv", "labor.csv", "aggregates.csv", "residuals.csv")


def fmt(x: float) -> str:
    return f"{float(x):.16e}"


def strict_mode() -> bool:
    return os.environ.get("ECON_STRICT", "1") != "0"


def _line_of(text: str, key: str) -> int | None:
    m = re.search(r'"%s"\s*:' % re.escape(key), text)
    return text.count("\n", 0, m.start()) + 1 if m else None


@dataclass(frozen=True)
class EconomyConfig:
    """Parsed config document.

    Holds everything except possibly the rate of return, which may instead
    be pinned down by ``target_aggregate_capital``.
    """

    sector_names: tuple[str, ...]
    capital_exponents: np.ndarray
    productivity: np.ndarray
    depreciation: np.ndarray
    utility_weights: np.ndarray
    total_labor: float
    wage: float = 1.0
    rate_of_return: float | None = None
    target_aggregate_capital: float | None = None
    growth: dict[str, float] | None = None
    horizon: int | None = None
    source: str | None = None

    def economy_at(self, rate_of_return: float) -> EconomySpec:
        return EconomySpec(
            sector_names=self.sector_names,
            capital_exponents=self.capital_exponents,
            productivity=self.productivity,
            depreciation=self.depreciation,
            utility_weights=self.utility_weights,
            total_labor=self.total_labor,
            rate_of_return=rate_of_return,
            wage=self.wage,
        )

    @property
    def economy(self) -> EconomySpec:
        if self.rate_of_return is None:
            raise ConfigError(f"{self.source}: no rate_of_return given (calibrate from target_aggregate_capital)")
        return self.economy_at(self.rate_of_return)

    @property
    def is_diagonal(self) -> bool:
        lam = self.capital_exponents
        return bool(np.all(lam[~np.eye(len(self.sector_names), dtype=bool)] == 0.0))

    def toy(self) -> ToyEconomy | None:
        if not self.is_diagonal or self.rate_of_return is None:
            return None
        return ToyEconomy.from_economy(self.economy)

    def bisector(self) -> BisectorEconomy | None:
        if len(self.sector_names) != 2 or self.rate_of_return is None:
            return None
        if self.depreciation[0] != self.depreciation[1]:
            return None
        return BisectorEconomy.from_economy(self.economy)

    def most_specific(self) -> EconomySpec | ToyEconomy | BisectorEconomy:
        """Toy if diagonal, else bisector if two sectors with equal depreciation, else general."""
        return self.toy() or self.bisector() or self.economy

    def trajectory(self, horizon: int | None = None) -> TrajectorySpec:
        h = horizon if horizon is not None else self.horizon
        if h is None:
            raise ConfigError(f"{self.source}: trajectory needs a horizon")
        return TrajectorySpec.from_mapping(self.economy, self.growth or {}, h)


def _unknown(keys: Iterable[str], allowed: tuple[str, ...], where: str, text: str, source: str) -> None:
    extra = [k for k in keys if k not in allowed]
    for k in extra:
        line = _line_of(text, k)
        msg = f"{source}:{line or '?'}: unknown key {k!r} in {where}"
        if strict_mode():
            raise ConfigError(msg)
        warnings.warn(msg, stacklevel=3)


def _number(obj: Mapping[str, Any], key: str, where: str, text: str, source: str, required=True):
    if key not in obj:
        if required:
            raise ConfigError(f"{source}: missing key {key!r} in {where}")
        return None
    v = obj[key]
    if isinstance(v, bool) or not isinstance(v, (int, float)):
        raise ConfigError(f"{source}:{_line_of(text, key) or '?'}: {where}.{key} must be a number, got {v!r}")
    return float(v)


def config_from_dict(doc: Mapping[str, Any], text: str = "", source: str = "<config>") -> EconomyConfig:
    if not isinstance(doc, Mapping):
        raise ConfigError(f"{source}: top level must be an object")
    _unknown(doc, TOP_KEYS, "top level", text, source)
    sectors = doc.get("sectors")
    if not isinstance(sectors, list) or not sectors:
        raise ConfigError(f"{source}: 'sectors' must be a non-empty array")
    names = []
    for i, sec in enumerate(sectors):
        if not isinstance(sec, Mapping):
            raise ConfigError(f"{source}: sectors[{i}] must be an object")
        _unknown(sec, SECTOR_KEYS, f"sectors[{i}]", text, source)
        if not isinstance(sec.get("name"), str):
            raise ConfigError(f"{source}: sectors[{i}].name must be a string")
        names.append(sec["name"])
    if len(set(names)) != len(names):
        raise ConfigError(f"{source}: duplicate sector names")
    m = len(names)
    lam = np.zeros((m, m))
    prod, dep, sig = np.empty(m), np.empty(m), np.empty(m)
    for a, sec in enumerate(sectors):
        where = f"sectors[{a}]"
        prod[a] = _number(sec, "productivity", where, text, source)
        dep[a] = _number(sec, "depreciation", where, text, source)
        sig[a] = _number(sec, "utility_weight", where, text, source)
        exps = sec.get("capital_exponents")
        if not isinstance(exps, Mapping):
            raise ConfigError(f"{source}: {where}.capital_exponents must be an object (good -> exponent)")
        for good, value in exps.items():
            if good not in names:
                raise ConfigError(
                    f"{source}:{_line_of(text, good) or '?'}: {where}.capital_exponents references "
                    f"undeclared good {good!r}"
                )
            lam[a, names.index(good)] = _number(exps, good, f"{where}.capital_exponents", text, source)
    total_labor = _number(doc, "total_labor", "top level", text, source)
    wage = _number(doc, "wage", "top level", text, source, required=False)
    rate = _number(doc, "rate_of_return", "top level", text, source, required=False)
    target = _number(doc, "target_aggregate_capital", "top level", text, source, required=False)
    if (rate is None) == (target is None):
        raise ConfigError(f"{source}: give exactly one of 'rate_of_return' or 'target_aggregate_capital'")
    growth = doc.get("growth")
    if growth is not None:
        if not isinstance(growth, Mapping):
            raise ConfigError(f"{source}: 'growth' must map sector name -> rate")
        for k in growth:
            if k not in names:
                raise ConfigError(f"{source}:{_line_of(text, k) or '?'}: growth references undeclared sector {k!r}")
        growth = {k: _number(growth, k, "growth", text, source) for k in growth}
    horizon = doc.get("horizon")
    if horizon is not None and (isinstance(horizon, bool) or not isinstance(horizon, int) or horizon < 1):
        raise ConfigError(f"{source}: 'horizon' must be a positive integer")
    cfg = EconomyConfig(
        sector_names=tuple(names),
        capital_exponents=lam,
        productivity=prod,
        depreciation=dep,
        utility_weights=sig,
        total_labor=total_labor,
        wage=1.0 if wage is None else wage,
        rate_of_return=rate,
        target_aggregate_capital=target,
        growth=growth,
        horizon=horizon,
        source=source,
    )
    probe = cfg.economy_at(rate if rate is not None else 1.0)
    report = validate_economy(probe)
    if rate is None:
        # R_c is unknown yet; only structural invariants can be checked
        violations = [v for v in report.violations if not v.message.startswith("R_c + delta")]
    else:
        violations = list(report.violations)
    if violations:
        parts = []
        for v in violations:
            where = f"sectors[{v.sector}]" if v.sector is not None else "top level"
            parts.append(f"{where}: {v.message}")
        raise ValidationError(f"{source}: " + "; ".join(parts))
    if target is not None and not target > 0:
        raise ValidationError(f"{source}: target_aggregate_capital must be positive")
    return cfg


def parse_config(path: str | os.PathLike) -> EconomyConfig:
    """Read, parse and validate an economy config file."""
    path = Path(path)
    try:
        text = path.read_text()
    except OSError as exc:
        raise ConfigError(f"{path}: cannot read ({exc.strerror})") from exc
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"{path}:{exc.lineno}:{exc.colno}: {exc.msg}") from exc
    return config_from_dict(doc, text, str(path))


def economy_to_dict(spec: EconomySpec) -> dict[str, Any]:
    """Canonical config document for ``spec`` (round-trips through :func:`config_from_dict`)."""
    names = spec.sector_names
    sectors = []
    for a, name in enumerate(names):
        exps = {names[b]: float(x) for b, x in enumerate(spec.capital_exponents[a]) if x != 0.0}
        sectors.append(
            {
                "name": name,
                "productivity": float(spec.productivity[a]),
                "depreciation": float(spec.depreciation[a]),
                "utility_weight": float(spec.utility_weights[a]),
                "capital_exponents": exps,
            }
        )
    return {
        "sectors": sectors,
        "total_labor": spec.total_labor,
        "wage": spec.wage,
        "rate_of_return": spec.rate_of_return,
    }


def atomic_write(path: Path, data: str) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.", suffix=".tmp")
    try:
        with os.fdopen(fd, "w", newline="") as fh:
            fh.write(data)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def csv_text(header: list[str], rows: Iterable[list[Any]]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for row in rows:
        w.writerow([fmt(x) if isinstance(x, (float, np.floating)) else x for x in row])
    return buf.getvalue()


def aggregates_row(agg: AggregateReport) -> tuple[list[str], list[float]]:
    header = [
        "aggregate_capital",
        "nominal_gdp",
        "labor_income",
        "capital_income",
        "labor_share",
        "implied_aggregate_lambda",
    ]
    values = [
        agg.aggregate_capital,
        agg.nominal_gdp,
        agg.labor_income,
        agg.capital_income,
        agg.labor_share,
        agg.implied_aggregate_lambda,
    ]
    return header, [float(v) for v in values]


def residual_rows(spec: EconomySpec, report) -> list[list[Any]]:
    names = spec.sector_names
    rows: list[list[Any]] = []
    for a, r in enumerate(report.wage_residuals):
        rows.append(["wage", names[a], "", float(r)])
    for (a, b), r in sorted(report.capital_residuals.items()):
        rows.append(["capital", names[a], names[b], float(r)])
    rows.append(["walras", "", "", float(report.walras_residual)])
    rows.append(["accounting", "", "", float(report.accounting_residual)])
    return rows


def summary_text(sol: EquilibriumSolution, report=None) -> str:
    spec = sol.spec
    agg = sol.aggregates
    lines = [
        f"Long-run equilibrium: {spec.n_sectors} sectors, W={spec.wage:g}, R_c={spec.rate_of_return:.10g}, "
        f"L_t={spec.total_labor:g}",
        "",
        f"{'sector':<16}{'price':>16}{'labor':>16}{'output':>16}",
    ]
    for a, name in enumerate(spec.sector_names):
        lines.append(f"{name:<16}{sol.prices[a]:>16.8g}{sol.labor[a]:>16.8g}{sol.outputs[a]:>16.8g}")
    lines += [
        "",
        f"aggregate capital K_t : {agg.aggregate_capital:.10g}",
        f"nominal GDP           : {agg.nominal_gdp:.10g}",
        f"labor income          : {agg.labor_income:.10g}",
        f"capital income        : {agg.capital_income:.10g}",
        f"labor share           : {agg.labor_share:.10g}",
    ]
    if report is not None:
        lines.append(f"max oracle residual   : {report.max_abs_residual:.3e} ({'pass' if report.passed else 'FAIL'})")
    return "\n".join(lines) + "\n"


def write_report(sol: EquilibriumSolution, out_dir: str | os.PathLike, report=None) -> Path:
    """Write the CSV tables, ``summary.txt`` and ``manifest.json`` for ``sol``."""
    from .oracle import FD_STEP, FD_TOL, IDENTITY_TOL, LAGRANGE_TOL, check_marginal_conditions

    out = Path(out_dir)
    spec = sol.spec
    names = spec.sector_names
    if report is None:
        report = check_marginal_conditions(spec, sol)
    atomic_write(out / "prices.csv", csv_text(["sector", "price"], ([n, sol.prices[a]] for a, n in enumerate(names))))
    atomic_write(
        out / "intensities.csv",
        csv_text(["sector", *names], ([n, *map(float, sol.capital_intensity[a])] for a, n in enumerate(names))),
    )
    atomic_write(
        out / "labor.csv",
        csv_text(
            ["sector", "labor", "output_per_labor", "output", "consumption"],
            (
                [n, sol.labor[a], sol.output_per_labor[a], sol.outputs[a], sol.consumption[a]]
                for a, n in enumerate(names)
            ),
        ),
    )
    header, values = aggregates_row(sol.aggregates)
    atomic_write(out / "aggregates.csv", csv_text(header, [values]))
    atomic_write(out / "residuals.csv", csv_text(["kind", "sector", "good", "residual"], residual_rows(spec, report)))
    atomic_write(out / "summary.txt", summary_text(sol, report))
    manifest = {
        "software": "firmsoup",
        "version": __version__,
        "files": list(REPORT_FILES) + ["summary.txt"],
        "float_format": "%.16e",
        "tolerances": {
            "finite_difference_step": FD_STEP,
            "marginal_residual": FD_TOL,
            "identity_residual": IDENTITY_TOL,
            "lagrange_residual": LAGRANGE_TOL,
        },
        "economy": economy_to_dict(spec),
    }
    atomic_write(out / "manifest.json", json.dumps(manifest, indent=2) + "\n")
    return out


def _read_table(path: Path) -> list[dict[str, str]]:
    with path.open(newline="") as fh:
        return list(csv.DictReader(fh))


def read_report(report_dir: str | os.PathLike) -> EquilibriumSolution:
    """Rebuild an :class:`EquilibriumSolution` from a report directory.

    Aggregates are recomputed from the stored prices, labor and intensities so
    that any edit to those tables shows up in the oracle residuals.
    """
    d = Path(report_dir)
    try:
        manifest = json.loads((d / "manifest.json").read_text())
    except (OSError, json.JSONDecodeError) as exc:
        raise ConfigError(f"{d}: unreadable manifest ({exc})") from exc
    spec = config_from_dict(manifest["economy"], source=str(d / "manifest.json")).economy
    names = spec.sector_names
    try:
        prices = {r["sector"]: float(r["price"]) for r in _read_table(d / "prices.csv")}
        labor_rows = {r["sector"]: r for r in _read_table(d / "labor.csv")}
        n_rows = {r["sector"]: r for r in _read_table(d / "intensities.csv")}
        p = np.array([prices[n] for n in names])
        labor = np.array([float(labor_rows[n]["labor"]) for n in names])
        y = np.array([float(labor_rows[n]["output_per_labor"]) for n in names])
        n = np.array([[float(n_rows[a][b]) for b in names] for a in names])
    except (OSError, KeyError, ValueError) as exc:
        raise ConfigError(f"{d}: malformed report table ({exc})") from exc
    stocks = n * labor[:, None]
    return EquilibriumSolution(
        spec=spec,
        prices=p,
        capital_intensity=n,
        labor=labor,
        output_per_labor=y,
        capital_stocks=stocks,
        aggregates=aggregate(spec, p, labor, y, stocks),
    )
