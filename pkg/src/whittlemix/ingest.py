"""CSV ingestion for observed series and exogenous drivers.

Files are comma-separated with a mandatory header row and exactly two
columns: a time stamp and a value.  Time stamps are either ISO-8601
months (``1960-01``) or plain integer indices — the format is
auto-detected from the first data row and must be consistent
throughout.  Stamps must advance in steps of exactly one month (or one
index): a missing *value* is an empty cell in an existing row, never a
skipped row, so irregular stamps are rejected with the offending row
numbers.  Decimal values use a dot.  Empty value cells are allowed in
the response file only; exogenous drivers must be complete, and no
value is ever imputed here.

Exogenous drivers may (and for lagged designs must) start earlier and
end later than the response: :func:`align_exogenous` cuts the window
the model needs — ``window - 1`` steps of lag history before the first
response time through ``horizon`` steps past the last — and refuses
files that do not cover it.  Optional per-calendar-month deseasonal-
ization subtracts each month's mean across all years.
"""

from __future__ import annotations

import csv
import re
from dataclasses import dataclass

import numpy as np

from .errors import IngestError
from .series import ObservedSeries

AXIS_MONTH = "month"
AXIS_INDEX = "index"

_MONTH_PATTERN = re.compile(r"^(\d{4})-(\d{2})$")
_INDEX_PATTERN = re.compile(r"^[+-]?\d+$")


@dataclass(frozen=True)
class TimeAxis:
    """Regular unit-step time stamps: a format, a start, and a length.

    ``start`` is an integer code: for ``month`` axes the month count
    ``year * 12 + (month - 1)``, for ``index`` axes the index itself.
    Row ``i`` (0-based) has code ``start + i``.
    """

    kind: str
    start: int
    n: int

    def __post_init__(self) -> None:
        if self.kind not in (AXIS_MONTH, AXIS_INDEX):
            raise IngestError(f"unknown time axis kind {self.kind!r}")
        if self.n < 1:
            raise IngestError(f"a time axis needs n >= 1, got {self.n}")

    def code(self, i: int) -> int:
        return self.start + i

    def label(self, i: int) -> str:
        """Render row ``i`` (0-based, may exceed n-1) as a time stamp."""
        code = self.code(i)
        if self.kind == AXIS_INDEX:
            return str(code)
        return f"{code // 12:04d}-{code % 12 + 1:02d}"

    def month_number(self, i: int) -> int:
        """Calendar month 1..12 of row ``i``.

        Index axes are treated as monthly with index 1 falling in
        month 1, so purely index-stamped data can still be
        deseasonalised.
        """
        code = self.code(i)
        if self.kind == AXIS_MONTH:
            return code % 12 + 1
        return (code - 1) % 12 + 1


def _parse_stamp(token: str) -> tuple[str, int] | None:
    token = token.strip()
    match = _MONTH_PATTERN.match(token)
    if match:
        year, month = int(match.group(1)), int(match.group(2))
        if not 1 <= month <= 12:
            return None
        return AXIS_MONTH, year * 12 + (month - 1)
    if _INDEX_PATTERN.match(token):
        return AXIS_INDEX, int(token)
    return None


def _read_two_columns(path) -> list[tuple[int, str, str]]:
    """Rows of (line number, stamp cell, value cell), header stripped."""
    try:
        with open(path, newline="") as handle:
            raw = [(number, row) for number, row
                   in enumerate(csv.reader(handle), start=1) if row]
    except OSError as exc:
        raise IngestError(f"cannot read {path}: {exc}") from exc
    if not raw:
        raise IngestError(f"{path} is empty; expected a header row and data")
    header_number, header = raw[0]
    if len(header) != 2:
        raise IngestError(
            f"{path} line {header_number}: expected exactly two columns "
            f"(time, value), got {len(header)}")
    if _parse_stamp(header[0]) is not None:
        raise IngestError(
            f"{path} line {header_number}: a header row is required, but "
            f"the first row already looks like data")
    rows = []
    bad_width = []
    for number, row in raw[1:]:
        if len(row) != 2:
            bad_width.append(number)
            continue
        rows.append((number, row[0], row[1]))
    if bad_width:
        raise IngestError(
            f"{path}: expected exactly two columns (time, value); "
            f"wrong column count at rows {bad_width}")
    if not rows:
        raise IngestError(f"{path} has a header but no data rows")
    return rows


def _parse_axis(path, rows) -> TimeAxis:
    """Validate the stamp column: one format, unit steps, no repeats."""
    kind = None
    codes = []
    unparsable = []
    mixed = []
    for number, stamp, _ in rows:
        parsed = _parse_stamp(stamp)
        if parsed is None:
            unparsable.append(number)
            continue
        row_kind, code = parsed
        if kind is None:
            kind = row_kind
        elif row_kind != kind:
            mixed.append(number)
            continue
        codes.append(code)
    if unparsable:
        raise IngestError(
            f"{path}: time stamps must be ISO-8601 months (like 1960-01) "
            f"or plain integers; unreadable at rows {unparsable}")
    if mixed:
        raise IngestError(
            f"{path}: time stamps mix formats; the file starts with "
            f"{kind} stamps but differs at rows {mixed}")
    irregular = [rows[i][0] for i in range(1, len(codes))
                 if codes[i] - codes[i - 1] != 1]
    if irregular:
        raise IngestError(
            f"{path}: time stamps must advance by exactly one step "
            f"(a missing value is an empty cell, not a missing row); "
            f"skipped or repeated stamps at rows {irregular}")
    return TimeAxis(kind, codes[0], len(codes))


def _parse_values(path, rows, *, allow_missing: bool
                  ) -> tuple[np.ndarray, np.ndarray]:
    values = np.zeros(len(rows))
    mask = np.ones(len(rows), dtype=bool)
    empty = []
    unreadable = []
    for i, (number, _, cell) in enumerate(rows):
        cell = cell.strip()
        if not cell:
            mask[i] = False
            empty.append(number)
            continue
        try:
            value = float(cell)
        except ValueError:
            unreadable.append(number)
            continue
        if not np.isfinite(value):
            unreadable.append(number)
            continue
        values[i] = value
    if unreadable:
        raise IngestError(
            f"{path}: values must be finite decimal numbers with a dot "
            f"(or an empty cell for a missing response); unreadable at "
            f"rows {unreadable}")
    if empty and not allow_missing:
        raise IngestError(
            f"{path}: the exogenous series must be complete and is never "
            f"imputed; empty value cells at rows {empty}")
    return values, mask


def read_series_csv(path) -> tuple[TimeAxis, ObservedSeries]:
    """Parse a response file; empty value cells become unobserved times."""
    rows = _read_two_columns(path)
    axis = _parse_axis(path, rows)
    values, mask = _parse_values(path, rows, allow_missing=True)
    if not mask.any():
        raise IngestError(f"{path}: every value cell is empty")
    return axis, ObservedSeries(values, mask)


def read_exogenous_csv(path) -> tuple[TimeAxis, np.ndarray]:
    """Parse an exogenous driver file; it must be complete."""
    rows = _read_two_columns(path)
    axis = _parse_axis(path, rows)
    values, _ = _parse_values(path, rows, allow_missing=False)
    return axis, values


def deseasonalise_monthly(values: np.ndarray, axis: TimeAxis) -> np.ndarray:
    """Subtract each calendar month's mean across all years."""
    values = np.asarray(values, dtype=float)
    if values.shape != (axis.n,):
        raise IngestError(
            f"values of length {values.size} do not match a time axis "
            f"of {axis.n} rows")
    months = np.array([axis.month_number(i) for i in range(axis.n)])
    out = values.copy()
    for month in np.unique(months):
        group = months == month
        out[group] -= values[group].mean()
    return out


def align_exogenous(exog_axis: TimeAxis, values: np.ndarray,
                    series_axis: TimeAxis, *, window: int = 1,
                    horizon: int = 0) -> np.ndarray:
    """Cut the exogenous stretch a lagged design needs.

    The returned vector has ``(n + horizon) + window - 1`` entries whose
    last entry falls ``horizon`` steps after the response's last time:
    ``window - 1`` steps of lag history, then every response time, then
    the forecast stretch.  Files that do not cover this range are
    rejected rather than padded.
    """
    values = np.asarray(values, dtype=float)
    if values.shape != (exog_axis.n,):
        raise IngestError(
            f"exogenous values of length {values.size} do not match a "
            f"time axis of {exog_axis.n} rows")
    if window < 1:
        raise IngestError(f"lag window must be >= 1, got {window}")
    if horizon < 0:
        raise IngestError(f"horizon must be >= 0, got {horizon}")
    if exog_axis.kind != series_axis.kind:
        raise IngestError(
            f"the response is stamped with {series_axis.kind} times but "
            f"the exogenous file with {exog_axis.kind} times; the two "
            f"cannot be aligned")
    lo = series_axis.start - (window - 1)
    hi = series_axis.start + series_axis.n - 1 + horizon
    first, last = exog_axis.start, exog_axis.start + exog_axis.n - 1
    if lo < first or hi > last:
        need_lo = series_axis.label(-(window - 1))
        need_hi = series_axis.label(series_axis.n - 1 + horizon)
        raise IngestError(
            f"the exogenous series must cover {need_lo} through {need_hi} "
            f"({window - 1} steps of lag history before the response "
            f"plus {horizon} forecast steps) but covers "
            f"{exog_axis.label(0)} through {exog_axis.label(exog_axis.n - 1)}")
    offset = lo - first
    return values[offset:offset + (hi - lo + 1)]
