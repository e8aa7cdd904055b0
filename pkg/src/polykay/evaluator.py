"""Apply generated estimators to numeric samples.

CSV cells are parsed as exact rationals, so exact mode produces exact
fractions; float mode is an opt-in fast path.  A sample too small for an
estimator (a vanishing falling-factorial denominator) is a domain error, not
a division by zero.
"""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass
from decimal import Decimal, InvalidOperation
from fractions import Fraction
from typing import Iterable

from .errors import DataParseError, DimensionError, SampleSizeError, UsageError
from .estimators import EstimatorExpr
from .polyring import POWER_SUM

__all__ = ["Dataset", "ingest", "ingest_text", "compute_power_sums", "evaluate"]


@dataclass(frozen=True)
class Dataset:
    """A rectangular numeric sample: n rows of d exact rational values."""

    rows: tuple[tuple[Fraction, ...], ...]
    columns: tuple[str, ...] | None = None

    @property
    def n(self) -> int:
        return len(self.rows)

    @property
    def d(self) -> int:
        return len(self.rows[0]) if self.rows else 0


def _parse_cell(text: str, line: int) -> Fraction:
    text = text.strip()
    try:
        if "/" in text:
            return Fraction(text)
        return Fraction(Decimal(text))
    except (InvalidOperation, ValueError, ZeroDivisionError):
        raise DataParseError(f"line {line}: cannot parse {text!r} as a number") from None


def ingest(source, has_header: bool = False) -> Dataset:
    """Read CSV from a file path or an open file object.

    Rows must be rectangular and fully numeric; violations raise a parse
    error naming the offending line.
    """
    if isinstance(source, str):
        with open(source, newline="") as fh:
            return ingest(fh, has_header)
    reader = csv.reader(source)
    columns: tuple[str, ...] | None = None
    rows: list[tuple[Fraction, ...]] = []
    width: int | None = None
    for line_no, record in enumerate(reader, start=1):
        if not record or all(not cell.strip() for cell in record):
            continue
        if has_header and columns is None:
            columns = tuple(cell.strip() for cell in record)
            continue
        values = tuple(_parse_cell(cell, line_no) for cell in record)
        if width is None:
            width = len(values)
        elif len(values) != width:
            raise DataParseError(
                f"line {line_no}: expected {width} columns, found {len(values)}"
            )
        rows.append(values)
    if not rows:
        raise DataParseError("no data rows found")
    if columns is not None and len(columns) != len(rows[0]):
        raise DataParseError("header width does not match the data rows")
    return Dataset(tuple(rows), columns)


def ingest_text(text: str, has_header: bool = False) -> Dataset:
    """Read CSV provided directly as a string."""
    return ingest(io.StringIO(text), has_header)


def compute_power_sums(
    ds: Dataset, needed: Iterable[tuple[int, ...]], mode: str = "exact"
) -> dict[tuple[int, ...], Fraction | float]:
    """Power sums S[r] = sum_i prod_j x_ij^r_j for every requested index.

    One pass over the data; only the requested indices are computed.
    """
    if mode not in ("exact", "float"):
        raise UsageError(f"unknown evaluation mode {mode!r}")
    indices = [tuple(index) for index in needed]
    for index in indices:
        if len(index) != ds.d:
            raise DimensionError(
                f"power-sum index has {len(index)} entries but the data has {ds.d} columns"
            )
    exact = mode == "exact"
    zero = Fraction(0) if exact else 0.0
    one = Fraction(1) if exact else 1.0
    table = {index: zero for index in indices}
    rows = ds.rows if exact else [tuple(map(float, row)) for row in ds.rows]
    for row in rows:
        for index in indices:
            term = one
            for x, r in zip(row, index):
                if r:
                    term *= x**r
            table[index] += term
    return table


def evaluate(e: EstimatorExpr, ds: Dataset, mode: str = "exact"):
    """Value of an estimator on a dataset; exact Fraction or float per mode."""
    if mode not in ("exact", "float"):
        raise UsageError(f"unknown evaluation mode {mode!r}")
    if e.spec.dimension != ds.d:
        raise DimensionError(
            f"estimator is {e.spec.dimension}-variable but the data has {ds.d} columns"
        )
    depth = max((c.den_falling for c in e.body.terms.values()), default=0)
    if ds.n < depth:
        raise SampleSizeError(
            f"insufficient sample size: n={ds.n} but the estimator needs n >= {depth}"
        )
    needed = {sym.index for mono in e.body.terms for sym, _ in mono if sym.kind == POWER_SUM}
    table = compute_power_sums(ds, needed, mode)
    if mode == "exact":
        total = Fraction(0)
        for mono, coeff in e.body.terms.items():
            term = coeff.evaluate(ds.n)
            for sym, exp in mono:
                term *= table[sym.index] ** exp
            total += term
        return total
    total = 0.0
    for mono, coeff in e.body.terms.items():
        term = float(coeff.evaluate(ds.n))
        for sym, exp in mono:
            term *= table[sym.index] ** exp
        total += term
    return total
