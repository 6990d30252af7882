"""Time the compiled kernels against the pure-Python fallback.

    python3 benchmarks/bench_kernels.py [--n 5000] [--m 2] [--repeat 3]

Both backends run on the same preferential-attachment graph; outputs are
compared before any timing is reported.
"""
import argparse
import time

import numpy as np

from txnet._kernels import _pykernels
from txnet.graph import simple_projection
from txnet.linkcomm import _undirected_edges
from txnet.synth import generate_pa

try:
    from txnet._kernels import _ckernels
except ImportError:
    _ckernels = None


def inputs(n, m, seed):
    g = generate_pa(n, m, seed)
    d_indptr, d_indices = simple_projection(g, "directed").csr(symmetric=False)
    u_indptr, u_indices = simple_projection(g, "undirected").csr(symmetric=True)
    edges = _undirected_edges(g)
    rows = np.array([u for u, v in edges] + [v for u, v in edges], dtype=np.int64)
    cols = np.array([v for u, v in edges] + [u for u, v in edges], dtype=np.int64)
    eid = np.concatenate([np.arange(len(edges)), np.arange(len(edges))]).astype(np.int64)
    order = np.lexsort((cols, rows))
    return {
        "bfs_distance_stats": (d_indptr, d_indices),
        "triangles_per_node": (u_indptr, u_indices),
        "edge_pair_similarities": (u_indptr, cols[order], eid[order]),
        "weak_components": (g.n_nodes, g.src, g.dst),
    }


def best_of(fn, args, repeat):
    best, out = float("inf"), None
    for _ in range(repeat):
        t = time.perf_counter()
        out = fn(*args)
        best = min(best, time.perf_counter() - t)
    return best, out


def same(a, b):
    if isinstance(a, tuple):
        return all(same(x, y) for x, y in zip(a, b))
    return np.array_equal(np.asarray(a), np.asarray(b))


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--n", type=int, default=5000)
    ap.add_argument("--m", type=int, default=2)
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--repeat", type=int, default=3)
    args = ap.parse_args(argv)
    if _ckernels is None:
        raise SystemExit("compiled kernels are not built; run `pip install -e .` first")
    print(f"preferential attachment graph, n={args.n}, m={args.m}")
    print(f"{'kernel':<24}{'python s':>12}{'cython s':>12}{'speedup':>10}")
    for name, kargs in inputs(args.n, args.m, args.seed).items():
        tp, op = best_of(getattr(_pykernels, name), kargs, args.repeat)
        tc, oc = best_of(getattr(_ckernels, name), kargs, args.repeat)
        if not same(op, oc):
            raise SystemExit(f"{name}: backends disagree")
        print(f"{name:<24}{tp:>12.4f}{tc:>12.4f}{tp / tc:>9.1f}x")


if __name__ == "__main__":
    main()
