"""CSV ingestion for market data, with unit conversion.

Two formats are supported. An OIS-style rate sheet has a `Term` column
of day counts followed by one column of percent rates per quote date:

    Term,2011-09-22,2011-09-23,...
    30,0.9231,0.8910,...

A bond sheet carries one row per instrument:

    Cusip,Coupon,MaturityDate,BidYield,MidYield,IssueDate

Terms convert to year fractions at ACT/365 and percent rates to
decimals (0.9231 -> 0.009231). Converted rates outside (-5%, +20%)
abort loudly: that pattern almost always means a percent/decimal
mix-up upstream, not a real curve.

Two samples are bundled: a EUR OIS curve for the seven trading days of
2011-09-22..30 (45 terms) and 31 USD bonds quoted 2020-07-28.
"""

from __future__ import annotations

import csv
import datetime as dt
import io
from dataclasses import dataclass
from importlib import resources

import numpy as np

from .errors import InputError
from .objectives import TermStructure

DAYS_PER_YEAR = 365.0
_RATE_SANITY = (-0.05, 0.20)

BUNDLED_OIS = "eur_ois_2011-09.csv"
BUNDLED_BONDS = "usd_bonds_2020-07-28.csv"


@dataclass(frozen=True)
class OisTable:
    """Parsed OIS rate sheet: terms in days, rates in percent per date."""

    dates: tuple[dt.date, ...]
    terms_days: np.ndarray
    rates_percent: np.ndarray  # shape (n_terms, n_dates)

    def __post_init__(self):
        object.__setattr__(self, "terms_days", np.asarray(self.terms_days, dtype=int))
        object.__setattr__(self, "rates_percent", np.asarray(self.rates_percent, dtype=float))
        if self.rates_percent.shape != (self.terms_days.size, len(self.dates)):
            raise InputError("rate matrix shape does not match terms and dates")
        if np.any(np.diff(self.terms_days) <= 0):
            raise InputError("terms must be strictly increasing")
        if not np.all(np.isfinite(self.rates_percent)):
            raise InputError("rates must be finite")


def _as_text(data) -> str:
    if isinstance(data, bytes):
        return data.decode("utf-8")
    return data


def parse_ois_csv(data) -> OisTable:
    """Parse an OIS rate sheet from CSV text or bytes."""
    rows = list(csv.reader(io.StringIO(_as_text(data))))
    rows = [row for row in rows if row and any(cell.strip() for cell in row)]
    if not rows:
        raise InputError("empty OIS csv")
    header = [c.strip() for c in rows[0]]
    if len(header) < 2 or header[0].lower() != "term":
        raise InputError("OIS csv must start with a 'Term' column followed by date columns")
    try:
        dates = tuple(dt.date.fromisoformat(c) for c in header[1:])
    except ValueError as exc:
        raise InputError(f"bad date in OIS header: {exc}") from exc

    terms = []
    rates = []
    for r, row in enumerate(rows[1:], start=2):
        if len(row) != len(header):
            raise InputError(f"row {r}: expected {len(header)} cells, got {len(row)}")
        cell = row[0].strip().replace(",", "")
        try:
            term = int(cell)
        except ValueError as exc:
            raise InputError(f"row {r}, column 1: bad term {row[0]!r}") from exc
        if term <= 0:
            raise InputError(f"row {r}: terms must be positive, got {term}")
        if terms and term <= terms[-1]:
            raise InputError(f"row {r}: terms must be strictly increasing")
        line = []
        for c, cell in enumerate(row[1:], start=2):
            try:
                line.append(float(cell))
            except ValueError as exc:
                raise InputError(f"row {r}, column {c}: bad rate {cell!r}") from exc
        terms.append(term)
        rates.append(line)
    return OisTable(dates=dates, terms_days=np.array(terms), rates_percent=np.array(rates))


def format_ois_csv(table: OisTable) -> str:
    """Serialize an OisTable back to CSV (round-trips with parse_ois_csv)."""
    out = io.StringIO()
    writer = csv.writer(out, lineterminator="\n")
    writer.writerow(["Term"] + [d.isoformat() for d in table.dates])
    for term, row in zip(table.terms_days, table.rates_percent):
        writer.writerow([int(term)] + [repr(float(x)) for x in row])
    return out.getvalue()


def _check_rate_sanity(rates: np.ndarray, what: str) -> None:
    lo, hi = _RATE_SANITY
    bad = (rates <= lo) | (rates >= hi)
    if bad.any():
        raise InputError(
            f"{what}: converted rate {rates[bad][0]} outside ({lo}, {hi}); check percent/decimal units"
        )


def ois_to_term_structures(table: OisTable) -> list[TermStructure]:
    """One decimal-rate TermStructure per date column (ACT/365 tenors)."""
    tenors = table.terms_days / DAYS_PER_YEAR
    structures = []
    for j, date in enumerate(table.dates):
        rates = table.rates_percent[:, j] / 100.0
        _check_rate_sanity(rates, f"OIS column {date.isoformat()}")
        structures.append(TermStructure(as_of=date, tenors=tenors, rates=rates))
    return structures


@dataclass(frozen=True)
class BondRecord:
    """One bond quote row; coupon and yields in percent."""

    cusip: str
    coupon_percent: float
    maturity: dt.date
    bid_yield_percent: float
    mid_yield_percent: float
    issue: dt.date

    def __post_init__(self):
        if self.maturity <= self.issue:
            raise InputError(f"bond {self.cusip}: maturity {self.maturity} not after issue {self.issue}")
        if not np.isfinite(self.bid_yield_percent) or not np.isfinite(self.mid_yield_percent):
            raise InputError(f"bond {self.cusip}: yields must be finite")


_BOND_HEADER = ["Cusip", "Coupon", "MaturityDate", "BidYield", "MidYield", "IssueDate"]


def parse_bonds_csv(data) -> list[BondRecord]:
    """Parse a bond sheet from CSV text or bytes."""
    rows = list(csv.reader(io.StringIO(_as_text(data))))
    rows = [row for row in rows if row and any(cell.strip() for cell in row)]
    if not rows:
        raise InputError("empty bond csv")
    header = [c.strip() for c in rows[0]]
    if header != _BOND_HEADER:
        raise InputError(f"bond csv header must be {','.join(_BOND_HEADER)}")
    records = []
    for r, row in enumerate(rows[1:], start=2):
        if len(row) != 6:
            raise InputError(f"row {r}: expected 6 cells, got {len(row)}")
        try:
            records.append(BondRecord(
                cusip=row[0].strip(),
                coupon_percent=float(row[1]),
                maturity=dt.date.fromisoformat(row[2].strip()),
                bid_yield_percent=float(row[3]),
                mid_yield_percent=float(row[4]),
                issue=dt.date.fromisoformat(row[5].strip()),
            ))
        except (ValueError, InputError) as exc:
            if isinstance(exc, InputError):
                raise
            raise InputError(f"row {r}: {exc}") from exc
    return records


def bonds_to_term_structure(bonds: list[BondRecord], as_of: dt.date, use_mid: bool = True) -> TermStructure:
    """Yield curve observations from bond quotes as of a trade date.

    Tenor is the actual day count to maturity over 365; the rate is the
    mid (or bid) yield as a decimal. Bonds sharing a maturity both stay
    in the curve. Matured bonds are refused by cusip.
    """
    if not bonds:
        raise InputError("no bonds to build a term structure from")
    for bond in bonds:
        if bond.maturity <= as_of:
            raise InputError(f"bond {bond.cusip} matured on {bond.maturity}, not after as-of {as_of}")
    tenors = np.array([(b.maturity - as_of).days / DAYS_PER_YEAR for b in bonds])
    yields = np.array([b.mid_yield_percent if use_mid else b.bid_yield_percent for b in bonds]) / 100.0
    _check_rate_sanity(yields, f"bond yields as of {as_of.isoformat()}")
    order = np.argsort(tenors, kind="stable")
    return TermStructure(as_of=as_of, tenors=tenors[order], rates=yields[order])


def load_bundled_ois() -> OisTable:
    """The packaged EUR OIS curve sample (2011-09-22..30, 45 terms)."""
    text = (resources.files("gacurve") / "data" / BUNDLED_OIS).read_text()
    return parse_ois_csv(text)


def load_bundled_bonds() -> list[BondRecord]:
    """The packaged USD bond sample (31 bonds quoted 2020-07-28)."""
    text = (resources.files("gacurve") / "data" / BUNDLED_BONDS).read_text()
    return parse_bonds_csv(text)
