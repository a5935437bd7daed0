"""Command-line front end.

Subcommands
-----------
calibrate   fit one date of an OIS-style rate sheet
roll        fit a multi-date sheet with cross-day warm starts
eval        sample a fitted curve on a tenor grid (plot data)
fit-bonds   fit a bond sheet's yields as of a trade date

Reports are JSON on stdout (or --out); tables and curve samples are
CSV. Exit codes: 0 success, 1 input/parse error, 2 configuration
error. Identical commands with the same --seed reproduce reports
byte-for-byte except for the wall-time fields.
"""

from __future__ import annotations

import argparse
import dataclasses
import datetime as dt
import json
import sys
import time

import numpy as np

from . import __version__
from .calibration import (
    BOUNDS_PRESETS,
    CalibrationResult,
    RollingPlan,
    calibrate,
    calibrate_series,
)
from .curves import CurveParams, ModelKind, forward_rate, spot_rate
from .data_ingest import bonds_to_term_structure, ois_to_term_structures, parse_bonds_csv, parse_ois_csv
from .errors import ConfigError, InputError
from .ga import Bounds, GaConfig
from .objectives import TermStructure, residuals


def _read_file(path: str) -> str:
    try:
        with open(path, "r", encoding="utf-8") as fh:
            return fh.read()
    except OSError as exc:
        raise InputError(f"cannot read {path}: {exc}") from exc


def _parse_date(text: str) -> dt.date:
    try:
        return dt.date.fromisoformat(text)
    except ValueError as exc:
        raise ConfigError(f"bad date {text!r}: expected ISO format") from exc


def _resolve_bounds(spec: str, kind: ModelKind) -> Bounds:
    if spec in BOUNDS_PRESETS:
        return BOUNDS_PRESETS[spec]()
    try:
        with open(spec, "r", encoding="utf-8") as fh:
            pairs = json.load(fh)
    except OSError as exc:
        raise ConfigError(f"--bounds {spec!r} is neither a preset {sorted(BOUNDS_PRESETS)} nor a readable file") from exc
    except json.JSONDecodeError as exc:
        raise ConfigError(f"bounds file {spec}: invalid JSON ({exc})") from exc
    bounds = Bounds.from_pairs(pairs)
    if bounds.dim != kind.n_params:
        raise ConfigError(f"bounds file has {bounds.dim} rows, model {kind.value} needs {kind.n_params}")
    return bounds


def _ga_config(args, generations: int) -> GaConfig:
    return GaConfig(
        population_size=args.pop,
        max_generations=generations,
        elite_count=args.elite,
        tournament_size=args.tournament,
        mutation_rate_min=args.mut_min,
        mutation_rate_max=args.mut_max,
        returning_genes=args.returning,
        rng_seed=args.seed,
        stagnation_window=args.window,
    )


def _config_echo(args, kind: ModelKind, bounds: Bounds, config: GaConfig, **extra) -> dict:
    echo = {
        "input": args.input,
        "model": kind.value,
        "bounds": {"lower": bounds.lower.tolist(), "upper": bounds.upper.tolist()},
        "population_size": config.population_size,
        "elite_count": config.elite_count,
        "tournament_size": config.tournament_size,
        "mutation_rate_min": config.mutation_rate_min,
        "mutation_rate_max": config.mutation_rate_max,
        "returning_genes": config.returning_genes,
        "stagnation_window": config.stagnation_window,
        "blend_alpha": config.blend_alpha,
        "line_blend_fraction": config.line_blend_fraction,
        "improvement_rtol": config.improvement_rtol,
        "threads": args.threads,
    }
    echo.update(extra)
    return echo


def _params_dict(params: CurveParams) -> dict:
    out = {"beta0": params.beta0, "beta1": params.beta1, "beta2": params.beta2}
    if params.kind is ModelKind.NSS:
        out["beta3"] = params.beta3
    out["lambda"] = params.lam
    if params.kind is ModelKind.NSS:
        out["kappa"] = params.kappa
    return out


def _record(result: CalibrationResult, kind: ModelKind, wall_ms: float) -> dict:
    return {
        "date": result.date.isoformat(),
        "model": kind.value,
        "params": _params_dict(result.params),
        "l2": result.errors.l2,
        "linf": result.errors.linf,
        "generations": result.generations,
        "wall_time_ms": round(wall_ms, 3),
    }


def _report(command: str, args, records: list[dict], config_echo: dict) -> dict:
    return {
        "tool": "gacurve",
        "version": __version__,
        "command": command,
        "rng_seed": args.seed,
        "config": config_echo,
        "records": records,
    }


def _emit(text: str, out_path: str | None) -> None:
    if out_path:
        with open(out_path, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
        if not text.endswith("\n"):
            sys.stdout.write("\n")


def _pick_structure(structures: list[TermStructure], date_arg: str | None, path: str) -> TermStructure:
    if date_arg is None:
        if len(structures) == 1:
            return structures[0]
        raise ConfigError(f"{path} has {len(structures)} dates; pick one with --date")
    wanted = _parse_date(date_arg)
    for structure in structures:
        if structure.as_of == wanted:
            return structure
    raise InputError(f"{path} has no column for {wanted.isoformat()}")


def cmd_calibrate(args) -> int:
    kind = ModelKind(args.model)
    bounds = _resolve_bounds(args.bounds, kind)
    config = _ga_config(args, args.gens)
    structures = ois_to_term_structures(parse_ois_csv(_read_file(args.input)))
    market = _pick_structure(structures, args.date, args.input)
    t0 = time.perf_counter()
    result = calibrate(market, kind, bounds, config)
    wall = (time.perf_counter() - t0) * 1e3
    echo = _config_echo(args, kind, bounds, config, generations=args.gens,
                        dates=[market.as_of.isoformat()])
    report = _report("calibrate", args, [_record(result, kind, wall)], echo)
    _emit(json.dumps(report, indent=2), args.out)
    return 0


def cmd_roll(args) -> int:
    kind = ModelKind(args.model)
    bounds = _resolve_bounds(args.bounds, kind)
    plan = RollingPlan(first_day_generations=args.gens_first,
                       subsequent_day_generations=args.gens_next,
                       carry_count=args.carry)
    config = _ga_config(args, args.gens_first)
    if args.carry > args.returning:
        raise ConfigError(f"--carry {args.carry} exceeds --returning {args.returning}")
    structures = ois_to_term_structures(parse_ois_csv(_read_file(args.input)))
    records = []
    results = []
    t0 = time.perf_counter()
    day_results = calibrate_series(structures, kind, bounds, config, plan)
    total_ms = (time.perf_counter() - t0) * 1e3
    for result in day_results:
        records.append(_record(result, kind, total_ms / len(day_results)))
        results.append(result)
    echo = _config_echo(args, kind, bounds, config,
                        plan={"first_day_generations": plan.first_day_generations,
                              "subsequent_day_generations": plan.subsequent_day_generations,
                              "carry_count": args.carry},
                        dates=[r.date.isoformat() for r in results])
    report = _report("roll", args, records, echo)
    _emit(json.dumps(report, indent=2), args.out)
    if args.table:
        _write_roll_table(results, args.table)
    return 0


def _write_roll_table(results: list[CalibrationResult], path: str) -> None:
    lines = ["date,beta0,beta1,beta2,beta3,lambda,kappa,l2,linf"]
    for r in results:
        p = r.params
        lines.append(",".join([r.date.isoformat()] + [
            repr(float(x)) for x in (p.beta0, p.beta1, p.beta2, p.beta3, p.lam, p.kappa,
                                     r.errors.l2, r.errors.linf)
        ]))
    with open(path, "w", encoding="utf-8") as fh:
        fh.write("\n".join(lines) + "\n")


def _params_from_args(args) -> CurveParams:
    if args.report:
        with open(args.report, "r", encoding="utf-8") as fh:
            report = json.load(fh)
        try:
            record = report["records"][args.index]
            kind = ModelKind(record["model"])
            p = record["params"]
            if kind is ModelKind.NS:
                return CurveParams(kind, beta0=p["beta0"], beta1=p["beta1"], beta2=p["beta2"],
                                   lam=p["lambda"])
            return CurveParams(kind, beta0=p["beta0"], beta1=p["beta1"], beta2=p["beta2"],
                               beta3=p["beta3"], lam=p["lambda"], kappa=p["kappa"])
        except (KeyError, IndexError, TypeError) as exc:
            raise InputError(f"report {args.report} has no usable record {args.index}: {exc}") from exc
    kind = ModelKind(args.model)
    values = [float(x) for x in args.params.split(",")]
    if len(values) != kind.n_params:
        raise ConfigError(f"--params needs {kind.n_params} comma-separated values for {kind.value}")
    try:
        return CurveParams.from_array(kind, values)
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc


def _grid_from_args(args) -> np.ndarray:
    if args.grid:
        try:
            start, stop, step = (float(x) for x in args.grid.split(":"))
        except ValueError as exc:
            raise ConfigError(f"--grid must be start:stop:step, got {args.grid!r}") from exc
        if step <= 0 or stop < start:
            raise ConfigError("--grid needs step > 0 and stop >= start")
        return np.arange(start, stop + step / 2, step)
    if args.tenors:
        return np.array([float(x) for x in args.tenors.split(",")])
    table = parse_ois_csv(_read_file(args.grid_csv))
    return table.terms_days / 365.0


def cmd_eval(args) -> int:
    try:
        params = _params_from_args(args)
        grid = _grid_from_args(args)
        if np.any(grid < 0):
            raise ConfigError("tenors must be >= 0")
        spots = np.atleast_1d(spot_rate(params, grid))
        forwards = np.atleast_1d(forward_rate(params, grid))
    except ValueError as exc:
        if isinstance(exc, (InputError, ConfigError)):
            raise
        raise ConfigError(str(exc)) from exc
    lines = ["tenor_years,spot_rate,forward_rate"]
    for t, s, f in zip(np.atleast_1d(grid), spots, forwards):
        lines.append(f"{repr(float(t))},{repr(float(s))},{repr(float(f))}")
    _emit("\n".join(lines) + "\n", args.out)
    return 0


def cmd_fit_bonds(args) -> int:
    kind = ModelKind.NSS
    bounds = _resolve_bounds(args.bounds, kind)
    config = _ga_config(args, args.gens)
    as_of = _parse_date(args.as_of)
    bonds = parse_bonds_csv(_read_file(args.input))
    market = bonds_to_term_structure(bonds, as_of, use_mid=(args.yield_source == "mid"))
    t0 = time.perf_counter()
    result = calibrate(market, kind, bounds, config)
    wall = (time.perf_counter() - t0) * 1e3
    record = _record(result, kind, wall)
    res = residuals(result.params, market)
    order = np.argsort([(b.maturity - as_of).days for b in bonds], kind="stable")
    record["residuals"] = [
        {
            "cusip": bonds[i].cusip,
            "tenor_years": float(market.tenors[j]),
            "market": float(market.rates[j]),
            "model": float(market.rates[j] + res[j]),
            "residual": float(res[j]),
        }
        for j, i in enumerate(order)
    ]
    echo = _config_echo(args, kind, bounds, config, generations=args.gens,
                        as_of=as_of.isoformat(), yield_source=args.yield_source)
    report = _report("fit-bonds", args, [record], echo)
    _emit(json.dumps(report, indent=2), args.out)
    return 0


def _add_ga_flags(parser: argparse.ArgumentParser, default_pop: int = 512) -> None:
    parser.add_argument("--pop", type=int, default=default_pop, help="population size (multiple of 4)")
    parser.add_argument("--seed", type=int, default=0, help="RNG seed (default 0)")
    parser.add_argument("--elite", type=int, default=3, help="elite gene count")
    parser.add_argument("--tournament", type=int, default=3, help="tournament size")
    parser.add_argument("--mut-min", type=float, default=0.2, help="minimum mutation rate")
    parser.add_argument("--mut-max", type=float, default=0.5, help="maximum mutation rate")
    parser.add_argument("--returning", type=int, default=64, help="returning genes kept per run")
    parser.add_argument("--window", type=int, default=50, help="stagnation window (generations)")
    parser.add_argument("--threads", type=int, default=1,
                        help="cap on parallel fitness evaluation; results do not depend on it")
    parser.add_argument("--out", help="write the report here instead of stdout")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="gacurve",
                                     description="GA-based Nelson-Siegel(-Svensson) curve calibration")
    parser.add_argument("--version", action="version", version=f"gacurve {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("calibrate", help="fit one date of an OIS-style rate sheet")
    p.add_argument("--input", required=True, help="OIS csv (Term column + per-date percent rates)")
    p.add_argument("--date", help="quote date column to fit (default: the only column)")
    p.add_argument("--model", choices=["ns", "nss"], default="nss")
    p.add_argument("--bounds", default="ois", help="preset (ois, ois-ns, usd) or JSON file of [lo, hi] rows")
    p.add_argument("--gens", type=int, default=5000, help="generations to run")
    _add_ga_flags(p)
    p.set_defaults(func=cmd_calibrate)

    p = sub.add_parser("roll", help="rolling multi-date fit with warm starts")
    p.add_argument("--input", required=True)
    p.add_argument("--model", choices=["ns", "nss"], default="nss")
    p.add_argument("--bounds", default="ois")
    p.add_argument("--gens-first", type=int, default=10_000, help="generations for the first date")
    p.add_argument("--gens-next", type=int, default=1_000, help="generations for later dates")
    p.add_argument("--carry", type=int, default=64, help="winners injected into the next date")
    p.add_argument("--table", help="also write a per-date parameter/error CSV here")
    _add_ga_flags(p, default_pop=1024)
    p.set_defaults(func=cmd_roll)

    p = sub.add_parser("eval", help="sample spot and forward curves on a tenor grid")
    src = p.add_mutually_exclusive_group(required=True)
    src.add_argument("--params", help="comma-separated values: b0,b1,b2[,b3],lambda[,kappa]")
    src.add_argument("--report", help="JSON report to take parameters from")
    p.add_argument("--index", type=int, default=0, help="record index within --report")
    p.add_argument("--model", choices=["ns", "nss"], default="nss", help="model for --params")
    grid = p.add_mutually_exclusive_group(required=True)
    grid.add_argument("--grid", help="tenor grid start:stop:step in years (inclusive)")
    grid.add_argument("--tenors", help="comma-separated tenors in years")
    grid.add_argument("--grid-csv", help="take the tenor grid from an OIS csv's Term column")
    p.add_argument("--out", help="write the CSV here instead of stdout")
    p.set_defaults(func=cmd_eval)

    p = sub.add_parser("fit-bonds", help="fit bond mid/bid yields as of a trade date")
    p.add_argument("--input", required=True, help="bond csv (Cusip,Coupon,MaturityDate,BidYield,MidYield,IssueDate)")
    p.add_argument("--as-of", required=True, help="trade date (ISO)")
    p.add_argument("--bounds", default="usd")
    p.add_argument("--gens", type=int, default=5000)
    p.add_argument("--yield", dest="yield_source", choices=["mid", "bid"], default="mid")
    _add_ga_flags(p, default_pop=1024)
    p.set_defaults(func=cmd_fit_bonds)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.command != "eval" and args.threads < 1:
        print("error: --threads must be >= 1", file=sys.stderr)
        return 2
    try:
        return args.func(args)
    except InputError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
