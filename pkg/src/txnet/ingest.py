"""Live unconfirmed-transaction feed: parsing, edge extraction, capture, replay.

Feed frames look like::

    {"op": "utx", "x": {"hash": ..., "time": ...,
                        "inputs": [{"prev_out": {"addr": ..., "value": ...}}, ...],
                        "out": [{"addr": ..., "value": ...}, ...]}}

Every received ``utx`` frame is appended to a JSON-lines capture log as
``{"received_at_ms": int, "raw": <frame>}`` so a capture can be replayed
deterministically later.
"""
from __future__ import annotations

import json
import logging
import os
import time
from dataclasses import asdict, dataclass
from decimal import Decimal
from pathlib import Path
from typing import Callable, Iterable, Sequence, Union

from .errors import ConnectFailed, CorruptLog, MalformedMessage, ZeroInputValue

log = logging.getLogger(__name__)

SATOSHI_PER_BTC = 100_000_000
SUBSCRIBE_MESSAGE = '{"op":"unconfirmed_sub"}'
ENDPOINT_ENV = "TXNET_ENDPOINT"
DEFAULT_ENDPOINT = "wss://ws.blockchain.info/inv"

_EIGHT_PLACES = Decimal("0.00000001")


@dataclass(frozen=True)
class Transaction:
    tx_id: str
    received_at: int
    inputs: tuple[tuple[str, int], ...]
    outputs: tuple[tuple[str, int], ...]


@dataclass(frozen=True)
class Ignored:
    """A well-formed frame of a kind other than ``utx``."""
    op: str


@dataclass(frozen=True)
class Edge:
    source: str
    target: str
    amount_btc: Decimal
    timestamp_ms: int


@dataclass
class CaptureSummary:
    transactions: int = 0
    edges: int = 0
    ignored: int = 0
    malformed: int = 0
    zero_input: int = 0
    duplicates: int = 0
    truncated: bool = False

    def to_dict(self) -> dict:
        return asdict(self)


EdgeSink = Callable[[Edge], None]


def satoshi_to_btc(value_satoshi: int) -> Decimal:
    if value_satoshi < 0:
        raise ValueError("negative satoshi value")
    return (Decimal(value_satoshi) / SATOSHI_PER_BTC).quantize(_EIGHT_PLACES)


def btc_to_satoshi(amount: Decimal) -> int:
    return int((amount * SATOSHI_PER_BTC).to_integral_exact())


def now_ms() -> int:
    return time.time_ns() // 1_000_000


def _entry(item, path: str, key: str) -> tuple[str, int]:
    if not isinstance(item, dict):
        raise MalformedMessage(f"{path} entry is not an object")
    if key:
        item = item.get(key)
        if not isinstance(item, dict):
            raise MalformedMessage(f"{path} entry lacks {key}")
    addr = item.get("addr")
    value = item.get("value")
    if not isinstance(addr, str) or not addr:
        raise MalformedMessage(f"{path} entry lacks an address")
    if isinstance(value, bool) or not isinstance(value, int) or value < 0:
        raise MalformedMessage(f"{path} entry has an invalid value")
    return addr, value


def transaction_from_frame(frame, received_at: int) -> Transaction | Ignored:
    """Classify an already-decoded frame object."""
    if not isinstance(frame, dict) or not isinstance(frame.get("op"), str):
        raise MalformedMessage("frame is not an object with an 'op' field")
    op = frame["op"]
    if op != "utx":
        return Ignored(op)
    x = frame.get("x")
    if not isinstance(x, dict):
        raise MalformedMessage("utx frame lacks its payload")
    inputs, outputs = x.get("inputs"), x.get("out")
    if not isinstance(inputs, list) or not inputs:
        raise MalformedMessage("utx payload lacks inputs")
    if not isinstance(outputs, list) or not outputs:
        raise MalformedMessage("utx payload lacks outputs")
    tx_id = x.get("hash")
    return Transaction(
        tx_id="" if tx_id is None else str(tx_id),
        received_at=received_at,
        inputs=tuple(_entry(i, "input", "prev_out") for i in inputs),
        outputs=tuple(_entry(o, "output", "") for o in outputs),
    )


def parse_feed_message(raw: Union[bytes, str], received_at: int | None = None) -> Transaction | Ignored:
    """Parse one text frame into a :class:`Transaction` or :class:`Ignored`.

    ``received_at`` defaults to the local clock. Raises
    :class:`MalformedMessage` for invalid JSON or an incomplete ``utx`` payload.
    """
    try:
        frame = json.loads(raw)
    except (ValueError, UnicodeDecodeError) as exc:
        raise MalformedMessage(f"invalid JSON: {exc}") from None
    return transaction_from_frame(frame, now_ms() if received_at is None else received_at)


def _split(total: int, weights: Sequence[int]) -> list[int]:
    """Split ``total`` proportionally to ``weights`` by largest remainder.

    Leftover units go to the largest fractional parts, lowest index first
    among equals, so the parts always sum to ``total``.
    """
    wsum = sum(weights)
    parts, rems = [], []
    for w in weights:
        q, r = divmod(total * w, wsum)
        parts.append(q)
        rems.append(r)
    leftover = total - sum(parts)
    for i in sorted(range(len(weights)), key=lambda i: (-rems[i], i))[:leftover]:
        parts[i] += 1
    return parts


def extract_edges(tx: Transaction) -> list[Edge]:
    """Input x output edges with each output's value attributed by input share.

    Pairs whose two addresses coincide (change back to a sender) are dropped.
    Raises :class:`ZeroInputValue` when the inputs carry no value.
    """
    weights = [v for _, v in tx.inputs]
    if sum(weights) == 0:
        raise ZeroInputValue(f"transaction {tx.tx_id!r} has zero total input value")
    shares = [_split(value, weights) for _, value in tx.outputs]
    edges = []
    for i, (src, _) in enumerate(tx.inputs):
        for o, (dst, _) in enumerate(tx.outputs):
            if src == dst:
                continue
            edges.append(Edge(src, dst, satoshi_to_btc(shares[o][i]), tx.received_at))
    return edges


class _Processor:
    """Shared bookkeeping for capture and replay."""

    def __init__(self, sink: EdgeSink | None):
        self.sink = sink
        self.summary = CaptureSummary()
        self._seen: set[str] = set()

    def transaction(self, tx: Transaction) -> None:
        s = self.summary
        s.transactions += 1
        if tx.tx_id in self._seen:
            s.duplicates += 1
        else:
            self._seen.add(tx.tx_id)
        try:
            edges = extract_edges(tx)
        except ZeroInputValue:
            s.zero_input += 1
            return
        for e in edges:
            s.edges += 1
            if self.sink is not None:
                self.sink(e)


def _log_line(received_at: int, frame) -> str:
    return json.dumps({"received_at_ms": received_at, "raw": frame},
                      separators=(",", ":"), ensure_ascii=False) + "\n"


def capture(endpoint: str, duration: float, sink: EdgeSink | None = None,
            log_path: str | os.PathLike | None = None,
            open_timeout: float = 10.0) -> CaptureSummary:
    """Subscribe to ``endpoint`` for ``duration`` seconds.

    Every extracted edge goes to ``sink`` in arrival order and every ``utx``
    frame is appended to ``log_path`` (when given). If the peer closes early
    the summary comes back with ``truncated=True``.
    """
    from websockets.exceptions import ConnectionClosed, WebSocketException
    from websockets.sync.client import connect

    if duration <= 0:
        raise ValueError("duration must be positive")
    try:
        ws = connect(endpoint, open_timeout=open_timeout, max_size=None)
    except (OSError, TimeoutError, WebSocketException, ValueError) as exc:
        raise ConnectFailed(f"cannot connect to {endpoint}: {exc}") from exc

    proc = _Processor(sink)
    summary = proc.summary
    out = open(log_path, "w", encoding="utf-8", newline="\n") if log_path else None
    try:
        with ws:
            ws.send(SUBSCRIBE_MESSAGE)
            deadline = time.monotonic() + duration
            while True:
                remaining = deadline - time.monotonic()
                if remaining <= 0:
                    break
                try:
                    raw = ws.recv(timeout=remaining)
                except TimeoutError:
                    break
                except ConnectionClosed:
                    summary.truncated = True
                    log.warning("feed closed by peer before the capture window ended")
                    break
                received_at = now_ms()
                try:
                    frame = json.loads(raw)
                    item = transaction_from_frame(frame, received_at)
                except (ValueError, MalformedMessage):
                    summary.malformed += 1
                    continue
                if isinstance(item, Ignored):
                    summary.ignored += 1
                    continue
                if out is not None:
                    out.write(_log_line(received_at, frame))
                proc.transaction(item)
    finally:
        if out is not None:
            out.close()
    return summary


def iter_log(path: str | os.PathLike) -> Iterable[Transaction]:
    """Yield the transactions of a capture log in recorded order."""
    with open(path, "r", encoding="utf-8", newline="\n") as fh:
        for lineno, line in enumerate(fh, 1):
            try:
                rec = json.loads(line)
                received_at = rec["received_at_ms"]
                raw = rec["raw"]
                if isinstance(received_at, bool) or not isinstance(received_at, int):
                    raise ValueError("received_at_ms is not an integer")
                # bare "x" payloads are accepted as well as whole frames
                if isinstance(raw, dict) and "op" not in raw:
                    raw = {"op": "utx", "x": raw}
                item = transaction_from_frame(raw, received_at)
            except (ValueError, KeyError, TypeError, MalformedMessage) as exc:
                raise CorruptLog(lineno, str(exc)) from None
            if isinstance(item, Ignored):
                raise CorruptLog(lineno, f"non-transaction record {item.op!r}")
            yield item


def replay(log_path: str | os.PathLike, sink: EdgeSink | None = None) -> CaptureSummary:
    """Re-run edge extraction over a capture log, in recorded order."""
    proc = _Processor(sink)
    for tx in iter_log(log_path):
        proc.transaction(tx)
    return proc.summary


def replay_edges(log_path: str | os.PathLike) -> tuple[list[Edge], CaptureSummary]:
    edges: list[Edge] = []
    summary = replay(log_path, edges.append)
    return edges, summary


def write_log(records: Iterable[tuple[int, dict]], path: str | os.PathLike) -> int:
    """Write ``(received_at_ms, frame)`` pairs as a capture log."""
    n = 0
    with open(Path(path), "w", encoding="utf-8", newline="\n") as fh:
        for received_at, frame in records:
            fh.write(_log_line(received_at, frame))
            n += 1
    return n
