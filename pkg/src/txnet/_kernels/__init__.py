"""Hot graph kernels.

The Cython build (``_ckernels``) is used when it imports; otherwise, or when
``TXNET_PURE_PYTHON=1`` is set, the pure-Python module is used. ``BACKEND``
names the active one.
"""
import os

import numpy as np

from . import _pykernels

_impl = _pykernels
BACKEND = "python"

if os.environ.get("TXNET_PURE_PYTHON", "") not in ("1", "true", "yes"):
    try:
        from . import _ckernels
    except ImportError:  # extension not built
        pass
    else:
        _impl = _ckernels
        BACKEND = "cython"


def _i64(a):
    return np.ascontiguousarray(a, dtype=np.int64)


def bfs_distance_stats(indptr, indices):
    return _impl.bfs_distance_stats(_i64(indptr), _i64(indices))


def triangles_per_node(indptr, indices):
    return _impl.triangles_per_node(_i64(indptr), _i64(indices))


def edge_pair_similarities(indptr, indices, edge_of):
    return _impl.edge_pair_similarities(_i64(indptr), _i64(indices), _i64(edge_of))


def weak_components(n, src, dst):
    return _impl.weak_components(int(n), _i64(src), _i64(dst))


__all__ = ["BACKEND", "bfs_distance_stats", "triangles_per_node",
           "edge_pair_similarities", "weak_components"]
