"""Single-date and rolling multi-date curve calibration.

A single calibration wires a market term structure into the GA engine
and decodes the best gene into curve parameters. The rolling protocol
stabilizes parameters across a time series: the first date gets a long
run from scratch, every later date gets a short run whose initial
population is skewed with the previous date's best genes, so the search
starts next to yesterday's solution instead of jumping basins.
"""

from __future__ import annotations

import dataclasses
import datetime as dt
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from . import objectives
from .curves import CurveParams, ModelKind, spot_design_matrix
from .errors import ConfigError, InputError
from .ga import Bounds, GaConfig, Gene, evolve
from .objectives import FitErrors, TermStructure


def ois_nss_bounds() -> Bounds:
    """Default NSS search box for smoothed (OIS-style) curves."""
    return Bounds.from_pairs([
        (0.0, 0.10),    # beta0: long-run level stays nonnegative
        (-0.10, 1.0),   # beta1: slope
        (-2.0, 2.0),    # beta2: first hump
        (0.0, 2.0),     # beta3: second hump
        (0.0, 4.0),     # lam
        (4.0, 30.0),    # kappa
    ])


def ois_ns_bounds() -> Bounds:
    """NS search box: same betas, lam free over the union of both hump ranges."""
    return Bounds.from_pairs([
        (0.0, 0.10),
        (-0.10, 1.0),
        (-2.0, 2.0),
        (0.0, 30.0),    # lam: union of the NSS lam and kappa ranges
    ])


def usd_nss_bounds() -> Bounds:
    """Wider NSS search box for raw (unsmoothed) bond-yield curves."""
    return Bounds.from_pairs([
        (0.0, 0.10),
        (-1.0, 4.0),
        (-2.0, 4.0),
        (-2.0, 8.0),
        (0.0, 6.0),
        (6.0, 30.0),
    ])


BOUNDS_PRESETS = {
    "ois": ois_nss_bounds,
    "ois-ns": ois_ns_bounds,
    "usd": usd_nss_bounds,
}


@dataclass
class CalibrationResult:
    """Fitted parameters for one date plus the genes worth carrying on."""

    date: dt.date
    params: CurveParams
    errors: FitErrors
    generations: int
    winners: list[Gene] = field(default_factory=list)


@dataclass(frozen=True)
class RollingPlan:
    """Generation budget for a rolling calibration over many dates."""

    first_day_generations: int = 10_000
    subsequent_day_generations: int = 1_000
    carry_count: int | None = None

    def __post_init__(self):
        if not self.first_day_generations >= self.subsequent_day_generations >= 1:
            raise ConfigError("need first_day_generations >= subsequent_day_generations >= 1")
        if self.carry_count is not None and self.carry_count < 0:
            raise ConfigError("carry_count must be >= 0")


def _check_bounds_kind(bounds: Bounds, kind: ModelKind) -> None:
    if bounds.dim != kind.n_params:
        raise ConfigError(f"{kind.value} needs {kind.n_params}-dimensional bounds, got {bounds.dim}")
    shape_lows = bounds.lower[3:] if kind is ModelKind.NS else bounds.lower[4:]
    if np.any(shape_lows < 0):
        raise ConfigError("shape-parameter bounds must be nonnegative")


def _distinct_top(genes: Sequence[Gene], count: int) -> list[Gene]:
    seen = set()
    out = []
    for g in genes:
        key = g.values.tobytes()
        if key not in seen:
            seen.add(key)
            out.append(g)
        if len(out) == count:
            break
    return out


def calibrate(market: TermStructure, kind: ModelKind, bounds: Bounds, config: GaConfig,
              injected: Sequence = ()) -> CalibrationResult:
    """Fit one term structure, optionally warm-started with injected genes."""
    _check_bounds_kind(bounds, kind)
    objective = objectives.make_least_squares_objective(market, kind)
    result = evolve(config, bounds, objective, injected)
    params = CurveParams.from_array(kind, result.best.values)
    errors = objectives.fit_errors(params, market)
    winners = _distinct_top(result.winners, config.returning_genes)
    return CalibrationResult(
        date=market.as_of,
        params=params,
        errors=errors,
        generations=result.generations_run,
        winners=winners,
    )


def calibrate_series(markets: Sequence[TermStructure], kind: ModelKind, bounds: Bounds,
                     config: GaConfig, plan: RollingPlan) -> list[CalibrationResult]:
    """Roll the calibration across dates with warm-start gene injection.

    Day one runs plan.first_day_generations from a cold Sobol start;
    each later day runs plan.subsequent_day_generations with the
    previous day's distinct top winners injected into the initial
    population. Day k uses rng_seed + k so runs stay deterministic
    without repeating the exact random stream day over day.
    """
    markets = list(markets)
    if not markets:
        raise InputError("calibrate_series needs at least one term structure")
    dates = [m.as_of for m in markets]
    if any(b <= a for a, b in zip(dates, dates[1:])):
        raise InputError("term structures must be in strictly ascending date order")
    carry = plan.carry_count if plan.carry_count is not None else config.returning_genes
    if carry > config.returning_genes:
        raise ConfigError(f"carry_count {carry} exceeds returning_genes {config.returning_genes}")

    results: list[CalibrationResult] = []
    injected: list[Gene] = []
    for day, market in enumerate(markets):
        gens = plan.first_day_generations if day == 0 else plan.subsequent_day_generations
        day_config = dataclasses.replace(config, max_generations=gens, rng_seed=config.rng_seed + day)
        result = calibrate(market, kind, bounds, day_config, injected=injected)
        results.append(result)
        injected = result.winners[:carry]
    return results


def reuse_shape_params(base: CalibrationResult, markets: Sequence[TermStructure],
                       bounds: Bounds | None = None, config: GaConfig | None = None) -> list[CalibrationResult]:
    """Refit only the betas of many markets, reusing the base hump positions.

    With lam and kappa frozen at the base values the model is linear in
    the betas, so each market reduces to an unconstrained least-squares
    solve. When bounds are supplied and the solution leaves the beta
    box, the solve falls back to a GA run over the betas alone.
    """
    if base.params.kind is not ModelKind.NSS:
        raise ConfigError("shape reuse needs an NSS base result")
    lam, kappa = base.params.lam, base.params.kappa
    results = []
    for market in markets:
        design = spot_design_matrix(market.tenors, lam, kappa)
        betas, *_ = np.linalg.lstsq(design, market.rates, rcond=None)
        if bounds is not None and not _betas_in_bounds(betas, bounds):
            betas, generations = _refit_betas_ga(design, market, bounds, config)
        else:
            generations = 0
        params = CurveParams(ModelKind.NSS, beta0=betas[0], beta1=betas[1], beta2=betas[2],
                             beta3=betas[3], lam=lam, kappa=kappa)
        results.append(CalibrationResult(
            date=market.as_of,
            params=params,
            errors=objectives.fit_errors(params, market),
            generations=generations,
            winners=[],
        ))
    return results


def _betas_in_bounds(betas: np.ndarray, bounds: Bounds) -> bool:
    return bool(np.all(betas >= bounds.lower[:4]) and np.all(betas <= bounds.upper[:4]))


def _refit_betas_ga(design: np.ndarray, market: TermStructure, bounds: Bounds,
                    config: GaConfig | None):
    beta_bounds = Bounds(lower=bounds.lower[:4], upper=bounds.upper[:4])
    if config is None:
        config = GaConfig(population_size=256, max_generations=2_000)

    def objective(values: np.ndarray) -> np.ndarray:
        r = values @ design.T - market.rates[None, :]
        return -np.einsum("ij,ij->i", r, r)

    result = evolve(config, beta_bounds, objective)
    return result.best.values, result.generations_run
