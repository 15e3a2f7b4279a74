from __future__ import annotations

from pathlib import Path

import numpy as np
import pytest

from firmsoup.closed_form import BisectorEconomy, ToyEconomy
from firmsoup.core import EconomySpec

SAMPLES = Path(__file__).resolve().parents[1] / "src" / "firmsoup" / "samples"


def random_toy(rng: np.random.Generator, m: int | None = None, lam_low: float = 0.1) -> ToyEconomy:
    m = m or int(rng.integers(1, 6))
    lam = rng.uniform(lam_low, 1.0, m)
    lam[rng.random(m) < 0.1] = 1.0
    return ToyEconomy(
        labor_exponents=lam,
        productivity=rng.uniform(0.1, 10.0, m),
        depreciation=rng.uniform(0.0, 0.2, m),
        utility_weights=rng.uniform(0.2, 5.0, m),
        rate_of_return=rng.uniform(0.005, 0.2),
        total_labor=rng.uniform(1.0, 1000.0),
        wage=rng.uniform(0.5, 3.0),
    )


def random_bisector(rng: np.random.Generator) -> BisectorEconomy:
    def row():
        total = rng.uniform(0.0, 0.95)
        split = rng.uniform()
        r = [total * split, total * (1 - split)]
        if rng.random() < 0.15:
            r[int(rng.integers(2))] = 0.0
        return r

    (aa, ab), (ba, bb) = row(), row()
    return BisectorEconomy(
        lam_AA=aa,
        lam_AB=ab,
        lam_BA=ba,
        lam_BB=bb,
        T_A=rng.uniform(0.1, 10.0),
        T_B=rng.uniform(0.1, 10.0),
        depreciation=rng.uniform(0.0, 0.2),
        rate_of_return=rng.uniform(0.005, 0.2),
        wage=rng.uniform(0.5, 3.0),
    )


def random_economy(rng: np.random.Generator, m: int | None = None, density: float = 0.6) -> EconomySpec:
    m = m or int(rng.integers(1, 7))
    lam = rng.uniform(0.0, 1.0, (m, m)) * (rng.random((m, m)) < density)
    row_cap = rng.uniform(0.0, 0.9, m)
    sums = lam.sum(axis=1)
    lam = np.where(sums[:, None] > 0, lam * (row_cap / np.where(sums > 0, sums, 1.0))[:, None], 0.0)
    return EconomySpec(
        sector_names=[f"g{i}" for i in range(m)],
        capital_exponents=lam,
        productivity=rng.uniform(0.1, 10.0, m),
        depreciation=rng.uniform(0.0, 0.2, m),
        utility_weights=rng.uniform(0.2, 5.0, m),
        total_labor=rng.uniform(1.0, 1000.0),
        rate_of_return=rng.uniform(0.005, 0.2),
        wage=rng.uniform(0.5, 3.0),
    )


def one_sector(lam_capital: float = 1 / 3, rate: float = 1 / 3, **kw) -> EconomySpec:
    args = dict(
        sector_names=["good"],
        capital_exponents=[[lam_capital]],
        productivity=[1.0],
        depreciation=[0.0],
        utility_weights=[1.0],
        total_labor=100.0,
        rate_of_return=rate,
        wage=1.0,
    )
    args.update(kw)
    return EconomySpec(**args)


def wheat_economy() -> EconomySpec:
    from firmsoup.io import parse_config

    return parse_config(SAMPLES / "wheat_tractor_power_cnc.json").economy


@pytest.fixture
def rng():
    return np.random.default_rng(20261018)


def rel(a, b):
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    return float(np.max(np.abs(a - b) / np.maximum(np.abs(b), 1e-300), initial=0.0))
