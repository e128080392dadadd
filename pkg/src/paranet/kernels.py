"""Kernel backend selection.

The compiled extension is used when it was built; otherwise the pure-Python
module takes over. Set ``PARANET_PURE_PYTHON=1`` to force the fallback.
"""
import os

from . import _kernels_py

BACKEND = "python"
_impl = _kernels_py

if os.environ.get("PARANET_PURE_PYTHON", "") not in ("1", "true", "yes"):
    try:
        from . import _kernels as _compiled
    except ImportError:  # extension not built
        pass
    else:
        _impl = _compiled
        BACKEND = "compiled"

bfs_distances = _impl.bfs_distances
betweenness = _impl.betweenness
symmetry = _impl.symmetry
louvain_move = _impl.louvain_move


def available_backends() -> dict:
    """Map backend name to kernel module for every backend importable here."""
    out = {"python": _kernels_py}
    try:
        from . import _kernels
    except ImportError:
        pass
    else:
        out["compiled"] = _kernels
    return out


def use(name: str) -> str:
    """Switch every kernel to backend ``name``; returns the previous backend name."""
    global BACKEND, bfs_distances, betweenness, symmetry, louvain_move
    impl = available_backends()[name]
    previous = BACKEND
    bfs_distances = impl.bfs_distances
    betweenness = impl.betweenness
    symmetry = impl.symmetry
    louvain_move = impl.louvain_move
    BACKEND = name
    return previous
