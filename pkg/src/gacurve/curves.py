"""Nelson-Siegel and Svensson term-structure models.

The spot curve is a linear combination of decaying basis functions

    R(tau) = b0*F0(tau) + b1*F1(tau) + b2*F2(tau) [+ b3*F3(tau)]

with F0 = 1, F1 = (1 - exp(-x))/x, F2 = F1 - exp(-x) for x = tau/lam,
and F3 the F2 shape evaluated at x = tau/kappa. The instantaneous
forward curve uses f0 = 1, f1 = exp(-x), f2 = x*exp(-x) and satisfies
R(tau) = (1/tau) * integral of f over [0, tau].

All evaluators are pure functions; tau may be a scalar or an ndarray.
The tau = 0 singularity is resolved by the analytic limits F1 -> 1,
F2 -> 0 rather than by epsilon substitution.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum

import numpy as np


class ModelKind(Enum):
    """Curve family: 4-parameter single-hump or 6-parameter double-hump."""

    NS = "ns"
    NSS = "nss"

    @property
    def n_params(self) -> int:
        return 4 if self is ModelKind.NS else 6

    @property
    def param_names(self) -> tuple[str, ...]:
        if self is ModelKind.NS:
            return ("beta0", "beta1", "beta2", "lambda")
        return ("beta0", "beta1", "beta2", "beta3", "lambda", "kappa")


@dataclass(frozen=True)
class CurveParams:
    """One calibrated coefficient set.

    beta0: long-run level; beta1: slope; beta2: first hump/trough;
    beta3: second hump/trough (NSS only). lam and kappa position the
    humps, in years. For NS genes the vector layout is
    (beta0, beta1, beta2, lam); for NSS (beta0..beta3, lam, kappa).
    """

    kind: ModelKind
    beta0: float
    beta1: float
    beta2: float
    lam: float
    beta3: float | None = None
    kappa: float | None = None

    def __post_init__(self):
        if self.lam <= 0:
            raise ValueError(f"lam must be > 0, got {self.lam}")
        if self.kind is ModelKind.NSS:
            if self.beta3 is None or self.kappa is None:
                raise ValueError("NSS parameters require beta3 and kappa")
            if self.kappa <= 0:
                raise ValueError(f"kappa must be > 0, got {self.kappa}")
        else:
            if self.beta3 is not None or self.kappa is not None:
                raise ValueError("NS parameters must not carry beta3 or kappa")

    def to_array(self) -> np.ndarray:
        if self.kind is ModelKind.NS:
            return np.array([self.beta0, self.beta1, self.beta2, self.lam])
        return np.array([self.beta0, self.beta1, self.beta2, self.beta3, self.lam, self.kappa])

    @classmethod
    def from_array(cls, kind: ModelKind, values) -> "CurveParams":
        v = np.asarray(values, dtype=float)
        if v.shape != (kind.n_params,):
            raise ValueError(f"expected {kind.n_params} values for {kind.value}, got shape {v.shape}")
        if kind is ModelKind.NS:
            return cls(kind, beta0=float(v[0]), beta1=float(v[1]), beta2=float(v[2]), lam=float(v[3]))
        return cls(kind, beta0=float(v[0]), beta1=float(v[1]), beta2=float(v[2]),
                   beta3=float(v[3]), lam=float(v[4]), kappa=float(v[5]))


def _decay_basis(x):
    """(F1, F2) for nonnegative x = tau/shape, with the x = 0 limits."""
    x = np.asarray(x, dtype=float)
    e = np.exp(-x)
    with np.errstate(divide="ignore", invalid="ignore"):
        f1 = -np.expm1(-x) / x
    f1 = np.where(x == 0.0, 1.0, f1)
    return f1, f1 - e


def ns_spot_basis(tau, lam: float):
    """Spot basis values (F0, F1, F2) at tenor tau for shape parameter lam.

    tau may be a scalar or array of nonnegative year fractions. At
    tau = 0 the analytic limits (1, 1, 0) are returned.
    """
    if lam <= 0:
        raise ValueError(f"lam must be > 0, got {lam}")
    tau = np.asarray(tau, dtype=float)
    if np.any(tau < 0):
        raise ValueError("tau must be >= 0")
    f1, f2 = _decay_basis(tau / lam)
    f0 = np.ones_like(f1)
    if f1.ndim == 0:
        return float(f0), float(f1), float(f2)
    return f0, f1, f2


def spot_rate(params: CurveParams, tau):
    """Continuously averaged spot rate R(tau) for one parameter set."""
    _, f1, f2 = ns_spot_basis(tau, params.lam)
    rate = params.beta0 + params.beta1 * f1 + params.beta2 * f2
    if params.kind is ModelKind.NSS:
        _, _, f3 = ns_spot_basis(tau, params.kappa)
        rate = rate + params.beta3 * f3
    return rate


def forward_rate(params: CurveParams, tau):
    """Instantaneous forward rate f(tau) for one parameter set."""
    tau = np.asarray(tau, dtype=float)
    if np.any(tau < 0):
        raise ValueError("tau must be >= 0")
    x = tau / params.lam
    e = np.exp(-x)
    rate = params.beta0 + params.beta1 * e + params.beta2 * x * e
    if params.kind is ModelKind.NSS:
        xk = tau / params.kappa
        rate = rate + params.beta3 * xk * np.exp(-xk)
    if rate.ndim == 0:
        return float(rate)
    return rate


def spot_design_matrix(taus, lam: float, kappa: float | None = None) -> np.ndarray:
    """Design matrix of spot basis columns at fixed shape parameters.

    Returns shape (len(taus), 3) for NS or (len(taus), 4) when kappa is
    given. The curve is linear in the betas against these columns, which
    is what lets shape parameters be reused across many fits.
    """
    taus = np.asarray(taus, dtype=float)
    _, f1, f2 = ns_spot_basis(taus, lam)
    cols = [np.ones_like(f1), f1, f2]
    if kappa is not None:
        _, _, f3 = ns_spot_basis(taus, kappa)
        cols.append(f3)
    return np.column_stack(cols)


def spot_rate_batch(values: np.ndarray, kind: ModelKind, taus: np.ndarray) -> np.ndarray:
    """Spot rates for many parameter vectors at once.

    values has one row per parameter set in the gene layout of `kind`;
    the result has shape (n_sets, n_taus). Shape parameters equal to
    zero evaluate to the continuous limit (F1 = F2 = 0 for tau > 0),
    which keeps closed lower bounds of 0 on lam usable.
    """
    values = np.atleast_2d(np.asarray(values, dtype=float))
    taus = np.asarray(taus, dtype=float)
    lam_col = 3 if kind is ModelKind.NS else 4
    with np.errstate(divide="ignore"):
        x1 = taus[None, :] / values[:, lam_col][:, None]
    e1 = np.exp(-x1)
    with np.errstate(invalid="ignore"):
        f1 = -np.expm1(-x1) / x1
    f1 = np.where(x1 == 0.0, 1.0, f1)
    f2 = f1 - e1
    rates = values[:, 0][:, None] + values[:, 1][:, None] * f1 + values[:, 2][:, None] * f2
    if kind is ModelKind.NSS:
        with np.errstate(divide="ignore"):
            x2 = taus[None, :] / values[:, 5][:, None]
        e2 = np.exp(-x2)
        with np.errstate(invalid="ignore"):
            f3 = -np.expm1(-x2) / x2
        f3 = np.where(x2 == 0.0, 1.0, f3) - e2
        rates = rates + values[:, 3][:, None] * f3
    return rates
