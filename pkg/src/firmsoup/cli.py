"""Command-line interface.

Exit codes: 0 success, 1 validation/config error, 2 solver error,
3 oracle failure. Errors go to stderr as ``firmsoup:error:<kind>: <message>``.
"""

from __future__ import annotations

import argparse
import logging
import sys
from pathlib import Path
from typing import Sequence

import firmsoup

from .closed_form import (
    bisector_capital_allocation,
    bisector_price_A,
    bisector_price_B,
    toy_aggregates,
    toy_capital_intensities,
    toy_labor_distribution,
    toy_prices,
)
from .dynamics import TrajectorySpec, baumol_trajectory, cost_disease_report, simulate_relaxation
from .errors import ConfigError, EconomyError, NonConvergenceError, OracleFailure, ValidationError
from .io import (
    EconomyConfig,
    aggregates_row,
    atomic_write,
    csv_text,
    fmt,
    parse_config,
    read_report,
    residual_rows,
    write_report,
)
from .oracle import brute_force_labor_check, check_marginal_conditions
from .solver import assemble_solution, calibrate_rate_of_return

EXIT_OK, EXIT_VALIDATION, EXIT_SOLVER, EXIT_ORACLE = 0, 1, 2, 3


def _emit(text: str, out: str | None, name: str) -> None:
    if out is None:
        sys.stdout.write(text)
    else:
        atomic_write(Path(out) / name, text)


def _resolved_economy(cfg: EconomyConfig):
    if cfg.rate_of_return is not None:
        return cfg.economy
    rate = calibrate_rate_of_return(cfg.economy_at(1.0), cfg.target_aggregate_capital)
    return cfg.economy_at(rate)


def cmd_solve(args) -> int:
    cfg = parse_config(args.economy)
    spec = _resolved_economy(cfg)
    sol = assemble_solution(spec, strict=not args.no_strict)
    report = check_marginal_conditions(spec, sol)
    if args.out:
        write_report(sol, args.out, report)
    else:
        header, values = aggregates_row(sol.aggregates)
        sys.stdout.write(csv_text(header, [values]))
    return EXIT_OK if report.passed else EXIT_ORACLE


def cmd_check(args) -> int:
    sol = read_report(args.report)
    spec = sol.spec
    report = check_marginal_conditions(spec, sol)
    verdict = brute_force_labor_check(spec, sol)
    sys.stdout.write(csv_text(["kind", "sector", "good", "residual"], residual_rows(spec, report)))
    status = "pass" if report.passed and verdict.passed else "fail"
    sys.stdout.write(
        f"# max_abs_residual={fmt(report.max_abs_residual)} lagrange_spread={fmt(verdict.ratio_spread)} "
        f"share_error={fmt(verdict.share_error)} status={status}\n"
    )
    if status != "pass":
        raise OracleFailure(f"report {args.report} fails the equilibrium checks")
    return EXIT_OK


def cmd_toy(args) -> int:
    cfg = parse_config(args.economy)
    toy = cfg.toy()
    if toy is None:
        raise ValidationError(f"{args.economy}: not a toy economy (cross-sector capital or no rate_of_return)")
    from .oracle import adjudicate_labor_share

    prices = toy_prices(toy)
    n = toy_capital_intensities(toy)
    labor = toy_labor_distribution(toy)
    rows = [[name, prices[a], n[a], labor[a]] for a, name in enumerate(toy.sector_names)]
    _emit(csv_text(["sector", "price", "capital_per_labor", "labor"], rows), args.out, "toy_sectors.csv")
    agg = toy_aggregates(toy)
    cmp_ = adjudicate_labor_share(toy)
    header, values = aggregates_row(agg)
    header += ["formula_labor_share", "printed_labor_share"]
    values += [agg.formula_labor_share, agg.printed_labor_share]
    _emit(csv_text(header, [values]), args.out, "toy_aggregates.csv")
    if not cmp_.passed:
        raise OracleFailure("labor-share adjudication failed")
    return EXIT_OK


def cmd_bisector(args) -> int:
    cfg = parse_config(args.economy)
    b = cfg.bisector()
    if b is None:
        raise ValidationError(f"{args.economy}: not a bisector economy (need 2 sectors, common depreciation)")
    p_a, p_b = bisector_price_A(b), bisector_price_B(b)
    n_aa, n_ab = bisector_capital_allocation(b, args.labor_a)
    n_bb, n_ba = bisector_capital_allocation(b.swapped(), args.labor_b)
    a, bname = cfg.sector_names
    rows = [[a, p_a, n_aa, n_ab], [bname, p_b, n_ba, n_bb]]
    header = ["sector", "price", f"capital_{a}", f"capital_{bname}"]
    _emit(csv_text(header, rows), args.out, "bisector.csv")
    return EXIT_OK


def cmd_relax(args) -> int:
    cfg = parse_config(args.economy)
    spec = _resolved_economy(cfg)
    try:
        trace = simulate_relaxation(spec, args.perturb, eta=args.eta, max_steps=args.steps, tol=args.tol)
        code = EXIT_OK
        err = None
    except NonConvergenceError as exc:
        trace, code, err = exc.trace, EXIT_SOLVER, exc
    names = spec.sector_names
    rows = ([t, disp, var, *map(float, lab)] for t, lab, disp, var in trace.rows())
    _emit(csv_text(["step", "dispersion", "wage_variance", *names], rows), args.out, "relaxation.csv")
    if err is not None:
        raise err
    return code


def cmd_baumol(args) -> int:
    cfg = parse_config(args.economy)
    spec = _resolved_economy(cfg)
    horizon = args.horizon if args.horizon is not None else cfg.horizon
    if horizon is None:
        raise ConfigError(f"{args.economy}: trajectory needs a horizon (config 'horizon' or --horizon)")
    traj = TrajectorySpec.from_mapping(spec, cfg.growth or {}, horizon)
    rep = baumol_trajectory(traj)
    names = spec.sector_names
    header = ["period"]
    for n in names:
        header += [f"productivity_{n}", f"price_{n}", f"relative_price_{n}", f"output_{n}",
                   f"expenditure_share_{n}", f"labor_{n}"]
    rel = rep.relative_prices
    rows = []
    for t in range(traj.horizon + 1):
        row: list = [t]
        for a in range(len(names)):
            row += [rep.productivity[t, a], rep.prices[t, a], rel[t, a], rep.outputs[t, a],
                    rep.expenditure_shares[t, a], rep.labor[t, a]]
        rows.append(row)
    _emit(csv_text(header, rows), args.out, "trajectory.csv")
    summary = cost_disease_report(rep)
    dev = rep.invariance_deviation
    srows = [
        [n, traj.labels[a], float(traj.growth[a]), summary.growth_factors.get(n, 1.0), float(dev[a])]
        for a, n in enumerate(names)
    ]
    _emit(
        csv_text(["sector", "label", "growth", "relative_price_growth", "price_productivity_deviation"], srows),
        args.out,
        "cost_disease.csv",
    )
    if not summary.consistent:
        raise OracleFailure(f"stagnant sectors without rising relative price: {list(summary.inconsistent)}")
    return EXIT_OK


def cmd_calibrate(args) -> int:
    cfg = parse_config(args.economy)
    target = args.target_capital if args.target_capital is not None else cfg.target_aggregate_capital
    if target is None:
        raise ConfigError(f"{args.economy}: no target capital (use --target-capital)")
    rate = calibrate_rate_of_return(cfg.economy_at(1.0), target)
    sol = assemble_solution(cfg.economy_at(rate))
    rows = [[rate, target, sol.aggregates.aggregate_capital]]
    _emit(csv_text(["rate_of_return", "target_aggregate_capital", "aggregate_capital"], rows), args.out,
          "calibration.csv")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="firmsoup", description=firmsoup.__doc__)
    p.add_argument("-v", "--verbose", action="store_true")
    sub = p.add_subparsers(dest="command", required=True)

    s = sub.add_parser("solve", help="solve the long-run equilibrium and write a report")
    s.add_argument("--economy", required=True)
    s.add_argument("--out")
    s.add_argument("--no-strict", action="store_true", help="skip the oracle stage inside the solver")
    s.set_defaults(func=cmd_solve)

    s = sub.add_parser("toy", help="closed-form evaluation of a diagonal economy")
    s.add_argument("--economy", required=True)
    s.add_argument("--out")
    s.set_defaults(func=cmd_toy)

    s = sub.add_parser("bisector", help="closed-form prices of a two-sector economy")
    s.add_argument("--economy", required=True)
    s.add_argument("--labor-a", type=float, default=1.0)
    s.add_argument("--labor-b", type=float, default=1.0)
    s.add_argument("--out")
    s.set_defaults(func=cmd_bisector)

    s = sub.add_parser("check", help="re-run the oracles on a stored report")
    s.add_argument("--report", required=True)
    s.set_defaults(func=cmd_check)

    s = sub.add_parser("relax", help="relax a perturbed labor allocation toward equal wages")
    s.add_argument("--economy", required=True)
    s.add_argument("--eta", type=float, default=0.1)
    s.add_argument("--perturb", type=float, default=0.1)
    s.add_argument("--steps", type=int, default=10_000)
    s.add_argument("--tol", type=float, default=1e-6)
    s.add_argument("--out")
    s.set_defaults(func=cmd_relax)

    s = sub.add_parser("baumol", help="relative prices under productivity growth")
    s.add_argument("--economy", required=True)
    s.add_argument("--horizon", type=int)
    s.add_argument("--out")
    s.set_defaults(func=cmd_baumol)

    s = sub.add_parser("calibrate", help="find the rate of return matching a target aggregate capital")
    s.add_argument("--economy", required=True)
    s.add_argument("--target-capital", type=float)
    s.add_argument("--out")
    s.set_defaults(func=cmd_calibrate)
    return p


def run_cli(argv: Sequence[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING)
    try:
        return args.func(args)
    except EconomyError as exc:
        if isinstance(exc, OracleFailure):
            code = EXIT_ORACLE
        elif isinstance(exc, ValidationError):
            code = EXIT_VALIDATION
        else:
            code = EXIT_SOLVER
        print(f"firmsoup:error:{exc.kind}: {exc}", file=sys.stderr)
        return code


def main() -> None:
    sys.exit(run_cli())
