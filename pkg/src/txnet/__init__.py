"""Capture and analysis of cryptocurrency transaction networks."""

__version__ = "0.1.0"

from .errors import *  # noqa: F401,F403
from .ingest import CaptureSummary, Edge, Transaction, extract_edges, parse_feed_message, satoshi_to_btc  # noqa: E402
from .ledger import EdgeList, read_csv, window, write_csv  # noqa: E402
from .graph import TxGraph, build_graph, giant_component, simple_projection  # noqa: E402
