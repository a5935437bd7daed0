"""Fitting target: market term structures, residuals, and fitness.

Fitness is the negative sum of squared residuals between model and
market spot rates, so maximizing fitness minimizes the Euclidean
tracking error. Reported errors are the unnormalized Euclidean norm
(l2) and the maximum absolute residual (linf), both in decimal rate
units (0.0001 = 1bp).
"""

from __future__ import annotations

import datetime as dt
from dataclasses import dataclass, field

import numpy as np

from .curves import CurveParams, ModelKind, spot_rate, spot_rate_batch
from .errors import InputError


@dataclass(frozen=True)
class TermStructure:
    """A dated set of (tenor, rate) observations, tenors in years.

    Tenors must be positive and non-decreasing; equal tenors are allowed
    (two quotes for the same maturity both enter the fit).
    """

    as_of: dt.date
    tenors: np.ndarray
    rates: np.ndarray

    def __post_init__(self):
        tenors = np.asarray(self.tenors, dtype=float)
        rates = np.asarray(self.rates, dtype=float)
        object.__setattr__(self, "tenors", tenors)
        object.__setattr__(self, "rates", rates)
        if tenors.ndim != 1 or tenors.size == 0:
            raise InputError("term structure needs at least one (tenor, rate) point")
        if rates.shape != tenors.shape:
            raise InputError(f"{tenors.size} tenors but {rates.size} rates")
        if np.any(tenors <= 0):
            raise InputError("tenors must be positive")
        if np.any(np.diff(tenors) < 0):
            raise InputError("tenors must be non-decreasing")
        if not np.all(np.isfinite(rates)):
            raise InputError("rates must be finite")

    def __len__(self) -> int:
        return int(self.tenors.size)


@dataclass(frozen=True)
class FitErrors:
    """Euclidean (l2) and maximum-absolute (linf) residual norms."""

    l2: float
    linf: float


def residuals(params: CurveParams, market: TermStructure) -> np.ndarray:
    """Model-minus-market residual vector, in market point order."""
    return spot_rate(params, market.tenors) - market.rates


def fit_errors(params: CurveParams, market: TermStructure) -> FitErrors:
    """Tracking error norms of the residual vector."""
    r = residuals(params, market)
    return FitErrors(l2=float(np.sqrt(np.sum(r * r))), linf=float(np.max(np.abs(r))))


def fitness(params: CurveParams, market: TermStructure) -> float:
    """Negative sum of squared residuals; 0 is a perfect fit."""
    r = residuals(params, market)
    return float(-np.sum(r * r))


def make_least_squares_objective(market: TermStructure, kind: ModelKind):
    """Batch fitness function for the GA engine.

    Returns a callable mapping an (n, dim) array of parameter vectors to
    an (n,) array of fitness values (negative SSE against the market).
    """
    taus = market.tenors
    rates = market.rates

    def objective(values: np.ndarray) -> np.ndarray:
        r = spot_rate_batch(values, kind, taus) - rates[None, :]
        return -np.einsum("ij,ij->i", r, r)

    return objective
