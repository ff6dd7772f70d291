"""Betweenness kernel dispatch.

Imports the compiled extension when it was built, otherwise the pure-Python
twin.  Set TEAMNET_PURE=1 in the environment to force the pure backend (used
by the benchmark and the backend-parity tests).
"""

from __future__ import annotations

import os

import numpy as np

from . import _brandes_py

if os.environ.get("TEAMNET_PURE"):
    _impl = _brandes_py
    BACKEND = "python"
else:
    try:
        from . import _brandes as _impl  # type: ignore[no-redef]

        BACKEND = "compiled"
    except ImportError:
        _impl = _brandes_py
        BACKEND = "python"


def betweenness_counts(n: int, indptr, indices, rindptr, rindices) -> np.ndarray:
    """Run the active backend on CSR adjacency; returns float64 array of size n."""
    out = _impl.betweenness_counts(n, indptr, indices, rindptr, rindices)
    return np.asarray(out, dtype=np.float64)


def csr_adjacency(n: int, pairs) -> tuple[np.ndarray, np.ndarray]:
    """Build (indptr, indices) int32 CSR arrays from (src, dst) index pairs.

    Pairs must be deduplicated; they are sorted here so the adjacency (and
    therefore the kernel's float accumulation order) is deterministic.
    """
    pairs = sorted(pairs)
    indptr = np.zeros(n + 1, dtype=np.int32)
    indices = np.empty(len(pairs), dtype=np.int32)
    for k, (u, v) in enumerate(pairs):
        indptr[u + 1] += 1
        indices[k] = v
    np.cumsum(indptr, out=indptr)
    return indptr, indices


def backends() -> dict[str, object]:
    """All importable kernel implementations, keyed by backend name."""
    found: dict[str, object] = {"python": _brandes_py}
    try:
        from . import _brandes

        found["compiled"] = _brandes
    except ImportError:
        pass
    return found
