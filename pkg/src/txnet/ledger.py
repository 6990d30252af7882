"""Edge lists, nested time windows and the edge CSV format.

CSV layout (UTF-8, LF)::

    source,target,amount_btc,timestamp_ms
    1A1zP1...,bc1q...,0.30000000,1496275200000
"""
from __future__ import annotations

import csv
import io
import os
from dataclasses import dataclass, field
from decimal import Decimal, InvalidOperation
from typing import Iterable, Sequence

from .errors import CsvFormatError
from .ingest import Edge

HEADER = ("source", "target", "amount_btc", "timestamp_ms")
_EIGHT_PLACES = Decimal("0.00000001")


@dataclass
class EdgeList:
    edges: list[Edge] = field(default_factory=list)
    t0: int = 0
    duration_ms: int = 0

    def __len__(self) -> int:
        return len(self.edges)

    def __iter__(self):
        return iter(self.edges)

    @classmethod
    def spanning(cls, edges: Sequence[Edge]) -> "EdgeList":
        """Wrap ``edges`` in the tightest window that contains them."""
        edges = list(edges)
        if not edges:
            return cls([], 0, 0)
        lo = min(e.timestamp_ms for e in edges)
        hi = max(e.timestamp_ms for e in edges)
        return cls(edges, lo, hi - lo + 1)


def window(edges: EdgeList | Sequence[Edge], t0: int, duration: int) -> EdgeList:
    """Edges with ``t0 <= timestamp < t0 + duration``, order preserved."""
    if duration <= 0:
        raise ValueError("window duration must be positive")
    items = edges.edges if isinstance(edges, EdgeList) else edges
    end = t0 + duration
    return EdgeList([e for e in items if t0 <= e.timestamp_ms < end], t0, duration)


def format_amount(amount: Decimal) -> str:
    return f"{amount.quantize(_EIGHT_PLACES):f}"


def write_csv(edges: EdgeList | Iterable[Edge], path: str | os.PathLike | io.TextIOBase) -> int:
    """Write the edge CSV; returns the number of records."""
    if isinstance(path, io.TextIOBase):
        return _write(edges, path)
    with open(path, "w", encoding="utf-8", newline="") as fh:
        return _write(edges, fh)


def _write(edges, fh) -> int:
    w = csv.writer(fh, lineterminator="\n")
    w.writerow(HEADER)
    n = 0
    for e in edges:
        w.writerow((e.source, e.target, format_amount(e.amount_btc), e.timestamp_ms))
        n += 1
    return n


def _parse_row(row: list[str], lineno: int) -> Edge:
    if len(row) != 4:
        raise CsvFormatError(lineno, f"expected 4 fields, got {len(row)}")
    source, target, amount, ts = row
    if not source or not target:
        raise CsvFormatError(lineno, "empty address")
    try:
        value = Decimal(amount)
    except InvalidOperation:
        raise CsvFormatError(lineno, f"bad amount {amount!r}") from None
    if not value.is_finite() or value < 0:
        raise CsvFormatError(lineno, f"bad amount {amount!r}")
    try:
        timestamp = int(ts)
    except ValueError:
        raise CsvFormatError(lineno, f"bad timestamp {ts!r}") from None
    return Edge(source, target, value.quantize(_EIGHT_PLACES), timestamp)


def read_csv(path: str | os.PathLike) -> EdgeList:
    """Read an edge CSV. The result spans exactly the rows it contains."""
    with open(path, "r", encoding="utf-8", newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header is None or tuple(header) != HEADER:
            raise CsvFormatError(1, "missing or unexpected header")
        edges = [_parse_row(row, reader.line_num) for row in reader]
    return EdgeList.spanning(edges)
