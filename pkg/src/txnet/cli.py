"""``txnet`` command line.

Every command prints a one-line JSON summary on stdout and writes its output
files atomically. Exit codes: 0 success, 1 usage error, 2 data error,
3 I/O or connection error.
"""
from __future__ import annotations

import argparse
import hashlib
import json
import logging
import os
import re
import sys
import tempfile
from pathlib import Path
from typing import Callable

from . import __version__, distfit, graph, ingest, ledger, linkcomm, metrics, synth
from .errors import ConnectFailed, DataError

EXIT_OK, EXIT_USAGE, EXIT_DATA, EXIT_IO = 0, 1, 2, 3

_UNITS_MS = {"ms": 1, "s": 1000, "m": 60_000, "h": 3_600_000}


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def parse_duration_ms(text: str) -> int:
    """``"90"``, ``"90s"``, ``"15m"``, ``"1h"``, ``"250ms"``; bare numbers are seconds."""
    m = re.fullmatch(r"\s*(\d+(?:\.\d+)?)\s*(ms|s|m|h)?\s*", str(text))
    if not m:
        raise argparse.ArgumentTypeError(f"invalid duration {text!r}")
    return int(round(float(m.group(1)) * _UNITS_MS[m.group(2) or "s"]))


def _xmin(text: str):
    if text == "auto":
        return "auto"
    try:
        value = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"xmin must be a positive integer or 'auto'") from None
    if value < 1:
        raise argparse.ArgumentTypeError("xmin must be >= 1")
    return value


def sha256_file(path) -> str:
    h = hashlib.sha256()
    with open(path, "rb") as fh:
        for chunk in iter(lambda: fh.read(1 << 20), b""):
            h.update(chunk)
    return h.hexdigest()


def atomic_write(path, write: Callable[[str], None]) -> None:
    """Call ``write(tmp_path)`` then rename onto ``path``; no partial files."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(prefix=f".{path.name}.", suffix=".tmp", dir=path.parent)
    os.close(fd)
    umask = os.umask(0)
    os.umask(umask)
    os.chmod(tmp, 0o666 & ~umask)
    try:
        write(tmp)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def atomic_text(path, text: str) -> None:
    def write(tmp):
        with open(tmp, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
    atomic_write(path, write)


def _dumps(doc) -> str:
    return json.dumps(doc, indent=2) + "\n"


def _load_edges(path) -> ledger.EdgeList:
    """Edge CSV, or a capture log (replayed) when the file is not CSV."""
    with open(path, "r", encoding="utf-8") as fh:
        head = fh.readline()
    if head.rstrip("\r\n") == ",".join(ledger.HEADER):
        return ledger.read_csv(path)
    edges, _ = ingest.replay_edges(path)
    return ledger.EdgeList.spanning(edges)


def _label(args) -> str:
    return args.label or Path(args.inp).stem


def _data_time(edges: ledger.EdgeList) -> int:
    return max((e.timestamp_ms for e in edges), default=0)


def _graph_in(args):
    edges = _load_edges(args.inp)
    return edges, graph.build_graph(edges)


# ---------------------------------------------------------------------------
# commands; each returns the fields of its stdout summary

def cmd_capture(args):
    def write(tmp):
        summary = ingest.capture(args.endpoint, args.duration / 1000.0, None, tmp)
        write.summary = summary
    atomic_write(args.out, write)
    return write.summary.to_dict()


def cmd_replay(args):
    edges, summary = ingest.replay_edges(args.inp)
    if args.out:
        atomic_write(args.out, lambda tmp: ledger.write_csv(edges, tmp))
    return summary.to_dict()


def cmd_snapshot(args):
    edges = _load_edges(args.inp)
    start = edges.edges[0].timestamp_ms if edges.edges else 0
    snap = ledger.window(edges, start + args.t0, args.duration)
    atomic_write(args.out, lambda tmp: ledger.write_csv(snap, tmp))
    return {"edges": len(snap), "t0": snap.t0, "duration_ms": snap.duration_ms}


def cmd_metrics(args):
    edges, g = _graph_in(args)
    report = metrics.snapshot_report(g, directed_distances=args.directed)
    atomic_text(args.out, report.to_json(_label(args), _data_time(edges)))
    return {"nodes": report.nodes, "edges": report.edges}


def cmd_giant(args):
    _, g = _graph_in(args)
    gc = graph.giant_component(g)
    atomic_write(args.out, lambda tmp: ledger.write_csv(gc.to_edges(), tmp))
    return {"nodes": gc.n_nodes, "edges": gc.n_arcs}


def cmd_fit(args):
    _, g = _graph_in(args)
    degrees = metrics.degree_sequence(g, args.mode)
    positive = degrees[degrees > 0]
    if args.family == "all":
        fits = distfit.fit_all(positive, args.xmin)
    elif args.family == "power_law":
        fits = [distfit.fit_power_law(positive, args.xmin)]
    else:
        xmin = args.xmin
        if xmin == "auto":
            xmin = distfit.fit_power_law(positive, "auto").xmin
        fits = [distfit.fit_alternative(positive, args.family, xmin)]
    doc = {"mode": args.mode, "fits": [f.to_dict() for f in fits]}
    if args.replicates > 0:
        doc["gof"] = distfit.gof_bootstrap(positive, fits[0], args.replicates, args.seed).to_dict()
    series = distfit.ccdf_series(positive) if len(positive) else []
    doc["ccdf"] = [list(p) for p in series]
    atomic_text(args.out, _dumps(doc))
    if args.csv:
        atomic_text(args.csv, "degree,ccdf\n" + "".join(f"{d},{p!r}\n" for d, p in series))
    out = {"fits": len(fits), "xmin": fits[0].xmin, "ks_stat": fits[0].ks_stat}
    if "gof" in doc:
        out["p_value"] = doc["gof"]["p_value"]
    return out


def cmd_growth(args):
    edges = _load_edges(args.inp)
    series = distfit.growth_series(edges, args.bin / 1000.0)
    doc = {"bin_s": args.bin / 1000.0, "series": [list(p) for p in series]}
    if len(series) >= 3:
        doc["nodes_fit"] = distfit.fit_log_growth([(t, n) for t, n, _ in series]).to_dict()
        doc["edges_fit"] = distfit.fit_log_growth([(t, m) for t, _, m in series]).to_dict()
    atomic_text(args.out, _dumps(doc))
    if args.csv:
        atomic_text(args.csv, "t_s,nodes,edges\n" + "".join(f"{t!r},{n},{m}\n" for t, n, m in series))
    return {"points": len(series),
            "r_squared_nodes": doc.get("nodes_fit", {}).get("r_squared"),
            "r_squared_edges": doc.get("edges_fit", {}).get("r_squared")}


def cmd_communities(args):
    _, g = _graph_in(args)
    part = linkcomm.detect_link_communities(g)
    atomic_text(args.out, linkcomm.partition_to_json(g, part))
    return {"communities": len(part.communities), "partition_density": part.partition_density}


def cmd_synth(args):
    kind = args.kind
    if kind in ("pa", "uniform"):
        g = (synth.generate_pa(args.n, args.m, args.seed) if kind == "pa"
             else synth.generate_uniform(args.n, args.p, args.seed))
        atomic_write(args.out, lambda tmp: ledger.write_csv(g.to_edges(), tmp))
        return {"nodes": g.n_nodes, "edges": g.n_arcs}
    if kind == "power_law":
        xs = synth.sample_power_law(args.alpha, args.xmin, args.n, args.seed)
        atomic_text(args.out, "value\n" + "".join(f"{v}\n" for v in xs.tolist()))
        return {"samples": len(xs)}
    # feed: a synthetic capture log
    records = list(synth.generate_feed(args.seed, args.duration, n_tx=args.n))
    atomic_write(args.out, lambda tmp: ingest.write_log(records, tmp))
    return {"records": len(records)}


def cmd_export_graphml(args):
    _, g = _graph_in(args)
    atomic_write(args.out, lambda tmp: graph.export_graphml(g, tmp))
    return {"nodes": g.n_nodes, "edges": g.n_arcs}


def cmd_report(args):
    labels, full, giant = [], [], []
    for path in args.inp:
        edges = _load_edges(path)
        g = graph.build_graph(edges)
        labels.append(Path(path).stem)
        full.append(metrics.snapshot_report(g, args.directed))
        giant.append(metrics.snapshot_report(graph.giant_component(g), args.directed)
                     if g.n_nodes else metrics.snapshot_report(g, args.directed))
    fields = list(vars(full[0])) if full else []
    doc = {
        "snapshots": labels,
        "full_graph": {f: [getattr(r, f) for r in full] for f in fields},
        "giant_component": {f: [getattr(r, f) for r in giant] for f in fields},
    }
    atomic_text(args.out, _dumps(doc))
    return {"snapshots": len(labels)}


COMMANDS = {
    "capture": cmd_capture,
    "replay": cmd_replay,
    "snapshot": cmd_snapshot,
    "metrics": cmd_metrics,
    "giant": cmd_giant,
    "fit": cmd_fit,
    "growth": cmd_growth,
    "communities": cmd_communities,
    "synth": cmd_synth,
    "export-graphml": cmd_export_graphml,
    "report": cmd_report,
}


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="txnet", description=__doc__.splitlines()[0])
    p.add_argument("--version", action="version", version=__version__)
    p.add_argument("-v", "--verbose", action="store_true")
    sub = p.add_subparsers(dest="command", required=True, metavar="COMMAND")

    def add(name, help_text, inp=True, out=True):
        sp = sub.add_parser(name, help=help_text, description=help_text)
        if inp:
            sp.add_argument("--in", dest="inp", required=True, metavar="PATH")
        if out:
            sp.add_argument("--out", required=True, metavar="PATH")
        return sp

    def directedness(sp):
        g = sp.add_mutually_exclusive_group()
        g.add_argument("--directed", dest="directed", action="store_true", default=True,
                       help="directed shortest paths (default)")
        g.add_argument("--undirected", dest="directed", action="store_false")

    sp = add("capture", "record the live feed into a capture log", inp=False)
    sp.add_argument("--endpoint", default=os.environ.get(ingest.ENDPOINT_ENV, ingest.DEFAULT_ENDPOINT))
    sp.add_argument("--duration", type=parse_duration_ms, required=True)

    sp = add("replay", "replay a capture log into an edge CSV", out=False)
    sp.add_argument("--out", metavar="PATH")

    sp = add("snapshot", "cut the window [start+t0, start+t0+duration) from a log or CSV")
    sp.add_argument("--t0", type=parse_duration_ms, default=0,
                    help="offset from the first edge (default 0)")
    sp.add_argument("--duration", type=parse_duration_ms, required=True)

    sp = add("metrics", "compute the metric report of an edge CSV")
    sp.add_argument("--label")
    directedness(sp)

    add("giant", "extract the largest weakly connected component")

    sp = add("fit", "fit degree-distribution models")
    sp.add_argument("--xmin", type=_xmin, default="auto")
    sp.add_argument("--family", default="all", choices=("all",) + distfit.FAMILIES)
    sp.add_argument("--replicates", type=int, default=100)
    sp.add_argument("--seed", type=int, default=0)
    sp.add_argument("--mode", default="total", choices=("in", "out", "total"))
    sp.add_argument("--csv", metavar="PATH", help="also write the CCDF series as CSV")

    sp = add("growth", "cumulative node/edge growth and logarithmic fits")
    sp.add_argument("--bin", type=parse_duration_ms, default=60_000)
    sp.add_argument("--csv", metavar="PATH", help="also write the series as CSV")

    add("communities", "detect link communities")

    sp = add("synth", "generate synthetic graphs, samples or feeds", inp=False)
    sp.add_argument("--kind", required=True, choices=("pa", "uniform", "power_law", "feed"))
    sp.add_argument("--n", type=int, default=1000)
    sp.add_argument("--m", type=int, default=1)
    sp.add_argument("--p", type=float, default=0.01)
    sp.add_argument("--alpha", type=float, default=2.5)
    sp.add_argument("--xmin", type=int, default=1)
    sp.add_argument("--seed", type=int, default=0)
    sp.add_argument("--duration", type=parse_duration_ms, default=6 * 3_600_000)

    add("export-graphml", "write the transaction graph as GraphML")

    sp = sub.add_parser("report", help="side-by-side metrics of several snapshots")
    sp.add_argument("--in", dest="inp", required=True, nargs="+", metavar="PATH")
    sp.add_argument("--out", required=True, metavar="PATH")
    directedness(sp)
    return p


def _manifest(args) -> dict:
    flags = {k: v for k, v in sorted(vars(args).items()) if k not in ("verbose",)}
    inputs = args.inp if isinstance(getattr(args, "inp", None), list) else [getattr(args, "inp", None)]
    digests = {str(p): sha256_file(p) for p in inputs if p and os.path.isfile(p)}
    seeds = {k: flags[k] for k in ("seed",) if k in flags}
    return {"command": args.command, "flags": flags, "inputs": digests,
            "version": __version__, "seeds": seeds}


def run(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        manifest = _manifest(args)
        result = COMMANDS[args.command](args)
    except DataError as exc:
        print(f"txnet: data error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_DATA
    except (ConnectFailed, OSError) as exc:
        print(f"txnet: I/O error: {exc}", file=sys.stderr)
        return EXIT_IO
    except ValueError as exc:
        print(f"txnet: data error: {exc}", file=sys.stderr)
        return EXIT_DATA
    summary = {"command": args.command, "status": "ok", **result, "manifest": manifest}
    print(json.dumps(summary, separators=(",", ":"), default=str))
    return EXIT_OK


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
