"""Synthetic graphs, exact power-law samples, and a synthetic transaction feed.

All randomness comes from numpy's PCG64 bit generator
(``numpy.random.default_rng(seed)``), which is specified and
platform-independent, so a given seed always reproduces the same output.
"""
from __future__ import annotations

import hashlib
import math
from dataclasses import dataclass, field
from typing import Iterator

import numpy as np
from scipy.special import zeta

from .errors import InvalidSpec
from .graph import TxGraph

SATOSHI_PER_BTC = 100_000_000

# Power-law draws are clipped at this value. The probability mass beyond it,
# zeta(alpha, CAP) / zeta(alpha, xmin), is below 1e-12 for every alpha >= 1.8.
POWER_LAW_CAP = 2**53
_TABLE_SIZE = 1 << 14


@dataclass
class GenSpec:
    kind: str
    n: int
    params: dict = field(default_factory=dict)
    seed: int = 0

    def generate(self):
        p = self.params
        if self.kind == "preferential_attachment":
            return generate_pa(self.n, p.get("m", 1), self.seed)
        if self.kind == "uniform_random":
            return generate_uniform(self.n, p.get("p", 0.0), self.seed)
        if self.kind == "power_law_sample":
            return sample_power_law(p.get("alpha", 2.5), p.get("xmin", 1), self.n, self.seed)
        raise InvalidSpec(f"unknown generator kind {self.kind!r}")


def _rng(seed) -> np.random.Generator:
    if isinstance(seed, np.random.Generator):
        return seed
    return np.random.default_rng(seed)


def _node_graph(n: int, src: list[int], dst: list[int]) -> TxGraph:
    m = len(src)
    return TxGraph(
        tuple(f"n{i}" for i in range(n)), src, dst,
        [SATOSHI_PER_BTC] * m, [1000 * k for k in range(m)], True,
    )


def generate_pa(n: int, m: int, seed) -> TxGraph:
    """Barabasi-Albert growth from a seed clique of ``m + 1`` nodes.

    Each newcomer sends ``m`` arcs to distinct existing nodes drawn with
    probability proportional to their current degree (a draw that repeats an
    already chosen target is redrawn).
    """
    if not (isinstance(n, int) and isinstance(m, int)) or m < 1 or n <= m:
        raise InvalidSpec(f"preferential attachment needs n > m >= 1 (n={n}, m={m})")
    rng = _rng(seed)
    src: list[int] = []
    dst: list[int] = []
    pool: list[int] = []
    for j in range(1, m + 1):
        for i in range(j):
            src.append(j)
            dst.append(i)
            pool += (i, j)
    for v in range(m + 1, n):
        chosen: list[int] = []
        while len(chosen) < m:
            t = pool[int(rng.integers(len(pool)))]
            if t not in chosen:
                chosen.append(t)
        for t in chosen:
            src.append(v)
            dst.append(t)
            pool += (v, t)
    return _node_graph(n, src, dst)


def generate_uniform(n: int, p: float, seed) -> TxGraph:
    """Each unordered pair ``i < j`` present independently with probability ``p``."""
    if not isinstance(n, int) or n < 1 or not (0.0 <= p <= 1.0):
        raise InvalidSpec(f"uniform graph needs n >= 1 and 0 <= p <= 1 (n={n}, p={p})")
    rng = _rng(seed)
    src: list[int] = []
    dst: list[int] = []
    for i in range(n - 1):
        hits = np.flatnonzero(rng.random(n - i - 1) < p) + i + 1
        src.extend([i] * len(hits))
        dst.extend(hits.tolist())
    return _node_graph(n, src, dst)


def power_law_sf(alpha: float, xmin: int, x) -> np.ndarray:
    """P(X >= x) for the discrete power law on ``x >= xmin``."""
    return zeta(alpha, np.asarray(x, dtype=np.float64)) / zeta(alpha, xmin)


def sample_power_law(alpha: float, xmin: int, n: int, seed) -> np.ndarray:
    """``n`` draws from P(X = x) = x**-alpha / zeta(alpha, xmin), x >= xmin.

    Exact inverse-CDF sampling: a uniform ``v`` in (0, 1] maps to the largest
    ``x`` whose survival probability is still >= ``v``. A lookup table covers
    the bulk; rarer draws are resolved by bisection on the Hurwitz zeta
    survival function, up to ``POWER_LAW_CAP``.
    """
    if not alpha > 1 or int(xmin) != xmin or xmin < 1 or int(n) != n or n < 1:
        raise InvalidSpec(f"power law needs alpha > 1, xmin >= 1, n >= 1 "
                          f"(alpha={alpha}, xmin={xmin}, n={n})")
    xmin, n = int(xmin), int(n)
    rng = _rng(seed)
    v = 1.0 - rng.random(n)
    table = power_law_sf(alpha, xmin, np.arange(xmin, xmin + _TABLE_SIZE))
    # table is decreasing; count entries >= v
    k = np.searchsorted(-table, -v, side="right")
    out = (xmin + k - 1).astype(np.int64)
    far = k == _TABLE_SIZE
    if far.any():
        out[far] = _bisect_far(alpha, xmin, v[far], xmin + _TABLE_SIZE - 1)
    return out


def _bisect_far(alpha: float, xmin: int, v: np.ndarray, lo0: int) -> np.ndarray:
    lo = np.full(len(v), float(lo0))
    hi = np.full(len(v), float(POWER_LAW_CAP))
    beyond = power_law_sf(alpha, xmin, hi) >= v
    # invariant: sf(lo) >= v > sf(hi)
    while True:
        active = (hi - lo > 1) & ~beyond
        if not active.any():
            break
        mid = np.floor((lo + hi) / 2)
        ok = power_law_sf(alpha, xmin, mid) >= v
        lo = np.where(active & ok, mid, lo)
        hi = np.where(active & ~ok, mid, hi)
    return np.where(beyond, hi, lo).astype(np.int64)


# ---------------------------------------------------------------------------
# synthetic unconfirmed-transaction feed

_B58 = "123456789ABCDEFGHJKLMNPQRSTUVWXYZabcdefghijkmnopqrstuvwxyz"


def _b58(data: bytes) -> str:
    num = int.from_bytes(data, "big")
    chars = []
    while num:
        num, r = divmod(num, 58)
        chars.append(_B58[r])
    pad = len(data) - len(data.lstrip(b"\0"))
    return "1" * pad + "".join(reversed(chars))


def fake_address(seed: int, k: int) -> str:
    """A base58check-shaped P2PKH address, unique per ``(seed, k)``."""
    payload = b"\0" + hashlib.sha256(f"addr:{seed}:{k}".encode()).digest()[:20]
    check = hashlib.sha256(hashlib.sha256(payload).digest()).digest()[:4]
    return _b58(payload + check)


def generate_feed(seed: int, duration_ms: int = 6 * 3600 * 1000, n_tx: int = 2000,
                  start_ms: int = 1_496_275_200_000, tau_s: float = 300.0,
                  reuse: float = 0.12) -> Iterator[tuple[int, dict]]:
    """Yield ``(received_at_ms, utx frame)`` pairs of a synthetic capture.

    Arrivals follow a Poisson process with rate proportional to
    ``1 / (t + tau_s)``, so about ``n_tx`` transactions arrive in the window
    and cumulative counts grow logarithmically. Addresses are reused with
    probability ``reuse``, picked proportionally to past use (preferential
    attachment). A few transactions pay back an earlier sender, send change
    to an input address, or are announced twice.
    """
    rng = np.random.default_rng(seed)
    horizon = duration_ms / 1000.0
    rate = n_tx / math.log1p(horizon / tau_s)
    pool: list[str] = []
    n_addr = 0
    recent: list[tuple[list[str], list[str]]] = []
    last_frame = None

    def address(exclude) -> str:
        nonlocal n_addr
        if pool and rng.random() < reuse:
            for _ in range(8):
                a = pool[int(rng.integers(len(pool)))]
                if a not in exclude:
                    return a
        n_addr += 1
        return fake_address(seed, n_addr)

    clock = 0.0
    k = 0
    while True:
        clock += rng.exponential(1.0)
        t = tau_s * math.expm1(clock / rate)
        if t >= horizon:
            break
        received = start_ms + int(t * 1000)
        if last_frame is not None and rng.random() < 0.003:
            yield received, last_frame
            continue
        k += 1
        if recent and rng.random() < 0.02:
            ins, outs = recent[int(rng.integers(len(recent)))]
            inputs, outputs = [outs[0]], [ins[0]]
        else:
            inputs, outputs = [], []
            for _ in range(int(rng.choice([1, 1, 1, 1, 1, 1, 2, 2, 3]))):
                inputs.append(address(inputs))
            for _ in range(int(rng.choice([1, 2, 2, 2, 2, 2, 3]))):
                outputs.append(address(inputs + outputs))
            if len(outputs) > 1 and rng.random() < 0.25:
                outputs[-1] = inputs[0]
        in_values = [int(rng.lognormal(16.5, 2.0)) + 1000 for _ in inputs]
        fee = min(int(rng.integers(1000, 50000)), sum(in_values) // 10)
        weights = rng.dirichlet(np.ones(len(outputs)))
        spend = sum(in_values) - fee
        out_values = [int(spend * w) for w in weights]
        for a in inputs + outputs:
            pool.append(a)
        recent.append((inputs, outputs))
        recent = recent[-50:]
        frame = {
            "op": "utx",
            "x": {
                "hash": hashlib.sha256(f"tx:{seed}:{k}".encode()).hexdigest(),
                "time": received // 1000,
                "size": 200 + 150 * len(inputs) + 34 * len(outputs),
                "inputs": [{"sequence": 4294967295,
                            "prev_out": {"addr": a, "value": v, "type": 0}}
                           for a, v in zip(inputs, in_values)],
                "out": [{"addr": a, "value": v, "n": i, "type": 0}
                        for i, (a, v) in enumerate(zip(outputs, out_values))],
            },
        }
        last_frame = frame
        yield received, frame
