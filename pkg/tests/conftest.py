"""Shared fixtures: bundled market data and a reference fit."""

import numpy as np
import pytest

from gacurve import (
    CurveParams,
    ModelKind,
    load_bundled_bonds,
    load_bundled_ois,
    ois_to_term_structures,
)

# Known good NSS fit of the bundled EUR OIS curve for 2011-09-22
# (l2 tracking error 0.001950, worst point 0.000942).
REFERENCE_NSS = dict(beta0=0.020780, beta1=-0.011995, beta2=-0.034771,
                     beta3=0.023232, lam=1.484620, kappa=9.050420)


@pytest.fixture(scope="session")
def ois_table():
    return load_bundled_ois()


@pytest.fixture(scope="session")
def ois_markets(ois_table):
    return ois_to_term_structures(ois_table)


@pytest.fixture(scope="session")
def sep22(ois_markets):
    return ois_markets[0]


@pytest.fixture(scope="session")
def bonds():
    return load_bundled_bonds()


@pytest.fixture(scope="session")
def reference_params():
    return CurveParams(ModelKind.NSS, **REFERENCE_NSS)


def synthesize_market(params, tenors, as_of):
    """Exact model curve as a TermStructure (round-trip test helper)."""
    from gacurve import TermStructure, spot_rate

    return TermStructure(as_of=as_of, tenors=np.asarray(tenors, dtype=float),
                         rates=spot_rate(params, np.asarray(tenors, dtype=float)))
