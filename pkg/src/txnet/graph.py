"""Directed transaction multigraph, its simple projections, and GraphML I/O."""
from __future__ import annotations

import os
from dataclasses import dataclass
from decimal import Decimal
from functools import cached_property
from typing import Iterable, Sequence
from xml.etree import ElementTree as ET

import numpy as np

from . import _kernels
from .errors import EmptyGraph, SelfLoopPresent
from .ingest import Edge, btc_to_satoshi, satoshi_to_btc
from .ledger import EdgeList, format_amount

GRAPHML_NS = "http://graphml.graphdrawing.org/xmlns"


@dataclass(frozen=True, eq=False)
class TxGraph:
    """Arcs over densely numbered addresses.

    Amounts are kept as integer satoshi (``amount_sat``) so nothing drifts;
    :meth:`amount_btc` converts back. Parallel arcs are allowed. When
    ``directed`` is false every arc is stored with ``src < dst``.
    """

    addresses: tuple[str, ...]
    src: np.ndarray
    dst: np.ndarray
    amount_sat: np.ndarray
    timestamp_ms: np.ndarray
    directed: bool = True

    def __post_init__(self):
        for name in ("src", "dst", "amount_sat", "timestamp_ms"):
            arr = np.array(getattr(self, name), dtype=np.int64)
            arr.setflags(write=False)
            object.__setattr__(self, name, arr)
        m = len(self.src)
        if not (len(self.dst) == len(self.amount_sat) == len(self.timestamp_ms) == m):
            raise ValueError("arc arrays differ in length")
        if m and (self.src.min() < 0 or self.dst.min() < 0
                  or max(self.src.max(), self.dst.max()) >= len(self.addresses)):
            raise ValueError("arc endpoint outside the node table")

    @property
    def n_nodes(self) -> int:
        return len(self.addresses)

    @property
    def n_arcs(self) -> int:
        return len(self.src)

    @cached_property
    def index(self) -> dict[str, int]:
        return {a: i for i, a in enumerate(self.addresses)}

    def amount_btc(self, k: int) -> Decimal:
        return satoshi_to_btc(int(self.amount_sat[k]))

    def arcs(self) -> Iterable[tuple[int, int]]:
        return zip(self.src.tolist(), self.dst.tolist())

    def to_edges(self) -> list[Edge]:
        a = self.addresses
        return [Edge(a[s], a[t], satoshi_to_btc(v), ts)
                for s, t, v, ts in zip(self.src.tolist(), self.dst.tolist(),
                                       self.amount_sat.tolist(), self.timestamp_ms.tolist())]

    def csr(self, symmetric: bool | None = None) -> tuple[np.ndarray, np.ndarray]:
        """Sorted, duplicate-free adjacency as ``(indptr, indices)``.

        ``symmetric`` defaults to ``not self.directed``.
        """
        if symmetric is None:
            symmetric = not self.directed
        src, dst = self.src, self.dst
        if symmetric:
            src, dst = np.concatenate([src, dst]), np.concatenate([dst, src])
        return _csr(self.n_nodes, src, dst)


def _csr(n: int, src: np.ndarray, dst: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    if len(src):
        keys = np.unique(src.astype(np.int64) * n + dst)
        src, dst = keys // n, keys % n
    indptr = np.zeros(n + 1, dtype=np.int64)
    np.cumsum(np.bincount(src, minlength=n), out=indptr[1:])
    return indptr, np.asarray(dst, dtype=np.int64)


def empty_graph(directed: bool = True) -> TxGraph:
    z = np.zeros(0, dtype=np.int64)
    return TxGraph((), z, z, z, z, directed)


def build_graph(edges: EdgeList | Iterable[Edge]) -> TxGraph:
    """Intern addresses in order of first appearance and keep every edge."""
    index: dict[str, int] = {}
    src, dst, amt, ts = [], [], [], []
    for e in edges:
        if e.source == e.target:
            raise SelfLoopPresent(f"edge {e.source} -> {e.target} is a self-loop")
        s = index.setdefault(e.source, len(index))
        t = index.setdefault(e.target, len(index))
        src.append(s)
        dst.append(t)
        amt.append(btc_to_satoshi(e.amount_btc))
        ts.append(e.timestamp_ms)
    return TxGraph(tuple(index), src, dst, amt, ts, True)


def simple_projection(g: TxGraph, mode: str = "directed") -> TxGraph:
    """Collapse parallel arcs; ``mode="undirected"`` also merges u->v with v->u.

    A merged arc carries the summed amount and the earliest timestamp, and
    sits at the position of its first occurrence.
    """
    if mode not in ("directed", "undirected"):
        raise ValueError(f"unknown projection mode {mode!r}")
    src, dst = g.src, g.dst
    directed = g.directed and mode == "directed"
    if not directed:
        src, dst = np.minimum(src, dst), np.maximum(src, dst)
    n = max(g.n_nodes, 1)
    keys = src * n + dst
    uniq, first, inverse = np.unique(keys, return_index=True, return_inverse=True)
    amount = np.zeros(len(uniq), dtype=np.int64)
    np.add.at(amount, inverse, g.amount_sat)
    earliest = np.full(len(uniq), np.iinfo(np.int64).max, dtype=np.int64)
    np.minimum.at(earliest, inverse, g.timestamp_ms)
    order = np.argsort(first, kind="stable")
    pick = first[order]
    return TxGraph(g.addresses, src[pick], dst[pick], amount[order], earliest[order], directed)


def components(g: TxGraph) -> np.ndarray:
    """Weak-component label (smallest member id) of every node."""
    return _kernels.weak_components(g.n_nodes, g.src, g.dst)


def induced_subgraph(g: TxGraph, keep: np.ndarray) -> TxGraph:
    """Subgraph on the boolean node mask ``keep``; ids renumbered in order."""
    keep = np.asarray(keep, dtype=bool)
    new_id = np.cumsum(keep) - 1
    arcs = keep[g.src] & keep[g.dst]
    addresses = tuple(a for a, k in zip(g.addresses, keep.tolist()) if k)
    return TxGraph(addresses, new_id[g.src[arcs]], new_id[g.dst[arcs]],
                   g.amount_sat[arcs], g.timestamp_ms[arcs], g.directed)


def giant_component(g: TxGraph) -> TxGraph:
    """Largest weakly connected component, all of its arcs retained.

    Equal-sized components are ranked by their smallest node id.
    """
    if g.n_nodes == 0:
        raise EmptyGraph("giant component of an empty graph")
    labels = components(g)
    sizes = np.bincount(labels, minlength=g.n_nodes)
    # argmax returns the first maximum, i.e. the smallest label
    best = int(np.argmax(sizes))
    return induced_subgraph(g, labels == best)


def export_graphml(g: TxGraph, path: str | os.PathLike) -> None:
    root = ET.Element("graphml", xmlns=GRAPHML_NS)
    ET.SubElement(root, "key", id="d0", attrib={"for": "node", "attr.name": "address",
                                               "attr.type": "string"})
    ET.SubElement(root, "key", id="d1", attrib={"for": "edge", "attr.name": "amount_btc",
                                               "attr.type": "double"})
    ET.SubElement(root, "key", id="d2", attrib={"for": "edge", "attr.name": "timestamp_ms",
                                               "attr.type": "long"})
    graph = ET.SubElement(root, "graph", id="G",
                          edgedefault="directed" if g.directed else "undirected")
    for i, addr in enumerate(g.addresses):
        node = ET.SubElement(graph, "node", id=f"n{i}")
        ET.SubElement(node, "data", key="d0").text = addr
    for k, (s, t) in enumerate(g.arcs()):
        edge = ET.SubElement(graph, "edge", id=f"e{k}", source=f"n{s}", target=f"n{t}")
        ET.SubElement(edge, "data", key="d1").text = format_amount(g.amount_btc(k))
        ET.SubElement(edge, "data", key="d2").text = str(int(g.timestamp_ms[k]))
    ET.indent(root)
    ET.ElementTree(root).write(path, encoding="UTF-8", xml_declaration=True)


def read_graphml(path: str | os.PathLike) -> TxGraph:
    """Read back a file written by :func:`export_graphml`."""
    ns = {"g": GRAPHML_NS}
    root = ET.parse(path).getroot()
    keys = {k.get("id"): k.get("attr.name") for k in root.findall("g:key", ns)}
    graph = root.find("g:graph", ns)

    def data(el) -> dict[str, str]:
        return {keys.get(d.get("key")): (d.text or "") for d in el.findall("g:data", ns)}

    ids: dict[str, int] = {}
    addresses = []
    for node in graph.findall("g:node", ns):
        ids[node.get("id")] = len(ids)
        addresses.append(data(node).get("address", node.get("id")))
    src, dst, amt, ts = [], [], [], []
    for edge in graph.findall("g:edge", ns):
        d = data(edge)
        src.append(ids[edge.get("source")])
        dst.append(ids[edge.get("target")])
        amt.append(btc_to_satoshi(Decimal(d.get("amount_btc", "0"))))
        ts.append(int(d.get("timestamp_ms", "0")))
    return TxGraph(tuple(addresses), src, dst, amt, ts,
                   graph.get("edgedefault", "directed") == "directed")


def graph_from_pairs(pairs: Sequence[tuple], n_nodes: int | None = None,
                     directed: bool = True) -> TxGraph:
    """Small-graph helper: integer or string endpoint pairs, zero amounts."""
    labels: dict = {}
    if n_nodes is not None:
        for i in range(n_nodes):
            labels[i] = i
    src, dst = [], []
    for u, v in pairs:
        s, t = labels.setdefault(u, len(labels)), labels.setdefault(v, len(labels))
        if not directed and s > t:
            s, t = t, s
        src.append(s)
        dst.append(t)
    z = [0] * len(src)
    return TxGraph(tuple(str(k) for k in labels), src, dst, z, z, directed)
