"""Integer-array kernels with a numba path and a pure-numpy path.

The numba path is used when numba imports and ``WDSUB_DISABLE_NUMBA`` is
unset (or ``0``). Every public kernel accepts ``backend="numba"|"numpy"``
to force one path; both must return identical arrays.
"""

from __future__ import annotations

import os

import numpy as np

try:
    from numba import njit

    HAVE_NUMBA = True
except ImportError:  # pragma: no cover
    HAVE_NUMBA = False

_DISABLED = os.environ.get("WDSUB_DISABLE_NUMBA", "0").lower() not in ("", "0", "false", "no")
DEFAULT_BACKEND = "numba" if HAVE_NUMBA and not _DISABLED else "numpy"

_GOLDEN = np.uint64(0x9E3779B97F4A7C15)
_MIX1 = np.uint64(0xBF58476D1CE4E5B9)
_MIX2 = np.uint64(0x94D049BB133111EB)


def _pick(backend: str | None) -> str:
    backend = backend or DEFAULT_BACKEND
    if backend not in ("numba", "numpy"):
        raise ValueError(f"unknown backend {backend!r}")
    if backend == "numba" and not HAVE_NUMBA:
        raise RuntimeError("numba backend requested but numba is not installed")
    return backend


# --- reachability over a CSR adjacency -------------------------------------

def _reach_numpy(indptr, indices, start):
    n = indptr.size - 1
    seen = np.zeros(n, dtype=np.bool_)
    seen[start] = True
    frontier = np.array([start], dtype=np.int64)
    while frontier.size:
        lo = indptr[frontier]
        lens = indptr[frontier + 1] - lo
        total = int(lens.sum())
        if total == 0:
            break
        base = np.repeat(lo - (np.cumsum(lens) - lens), lens)
        nbrs = indices[base + np.arange(total)]
        nbrs = np.unique(nbrs[~seen[nbrs]])
        seen[nbrs] = True
        frontier = nbrs
    return seen


# --- sorted-set membership -----------------------------------------------

def _member_numpy(values, sorted_set):
    if sorted_set.size == 0:
        return np.zeros(values.shape, dtype=np.bool_)
    pos = np.searchsorted(sorted_set, values)
    pos[pos == sorted_set.size] = 0
    return sorted_set[pos] == values


# --- undirected incidence degree ---------------------------------------------

def _degree_numpy(heads, tails, n):
    return np.bincount(heads, minlength=n) + np.bincount(tails, minlength=n)


# --- SplitMix64 stream ------------------------------------------------------

def _splitmix_numpy(seed, n):
    with np.errstate(over="ignore"):
        z = np.uint64(seed) + _GOLDEN * np.arange(1, n + 1, dtype=np.uint64)
        z = (z ^ (z >> np.uint64(30))) * _MIX1
        z = (z ^ (z >> np.uint64(27))) * _MIX2
        return z ^ (z >> np.uint64(31))


if HAVE_NUMBA:

    @njit(cache=True)
    def _reach_numba(indptr, indices, start):
        n = indptr.size - 1
        seen = np.zeros(n, dtype=np.bool_)
        queue = np.empty(n, dtype=np.int64)
        seen[start] = True
        queue[0] = start
        head = 0
        tail = 1
        while head < tail:
            v = queue[head]
            head += 1
            for k in range(indptr[v], indptr[v + 1]):
                w = indices[k]
                if not seen[w]:
                    seen[w] = True
                    queue[tail] = w
                    tail += 1
        return seen

    @njit(cache=True)
    def _member_numba(values, sorted_set):
        out = np.zeros(values.size, dtype=np.bool_)
        m = sorted_set.size
        for i in range(values.size):
            x = values[i]
            lo = 0
            hi = m
            while lo < hi:
                mid = (lo + hi) >> 1
                if sorted_set[mid] < x:
                    lo = mid + 1
                else:
                    hi = mid
            out[i] = lo < m and sorted_set[lo] == x
        return out

    @njit(cache=True)
    def _degree_numba(heads, tails, n):
        deg = np.zeros(n, dtype=np.int64)
        for i in range(heads.size):
            deg[heads[i]] += 1
            deg[tails[i]] += 1
        return deg

    @njit(cache=True)
    def _splitmix_numba(seed, n):
        out = np.empty(n, dtype=np.uint64)
        state = np.uint64(seed)
        golden = np.uint64(0x9E3779B97F4A7C15)
        m1 = np.uint64(0xBF58476D1CE4E5B9)
        m2 = np.uint64(0x94D049BB133111EB)
        for i in range(n):
            state = state + golden
            z = state
            z = (z ^ (z >> np.uint64(30))) * m1
            z = (z ^ (z >> np.uint64(27))) * m2
            out[i] = z ^ (z >> np.uint64(31))
        return out


def reachable(indptr: np.ndarray, indices: np.ndarray, start: int, backend: str | None = None) -> np.ndarray:
    """Boolean mask of vertices reachable from ``start`` in a CSR graph."""
    indptr = np.ascontiguousarray(indptr, dtype=np.int64)
    indices = np.ascontiguousarray(indices, dtype=np.int64)
    if _pick(backend) == "numba":
        return _reach_numba(indptr, indices, np.int64(start))
    return _reach_numpy(indptr, indices, int(start))


def member_mask(values: np.ndarray, sorted_set: np.ndarray, backend: str | None = None) -> np.ndarray:
    """``values[i] in sorted_set`` for every i; ``sorted_set`` must be ascending."""
    values = np.ascontiguousarray(values, dtype=np.int64)
    sorted_set = np.ascontiguousarray(sorted_set, dtype=np.int64)
    if _pick(backend) == "numba":
        return _member_numba(values.ravel(), sorted_set).reshape(values.shape)
    return _member_numpy(values, sorted_set)


def incidence_degree(heads: np.ndarray, tails: np.ndarray, n: int, backend: str | None = None) -> np.ndarray:
    heads = np.ascontiguousarray(heads, dtype=np.int64)
    tails = np.ascontiguousarray(tails, dtype=np.int64)
    if _pick(backend) == "numba":
        return _degree_numba(heads, tails, np.int64(n))
    return _degree_numpy(heads, tails, n).astype(np.int64)


def unique_rows(rows: np.ndarray) -> np.ndarray:
    """Sorted, duplicate-free copy of an ``(n, k)`` integer array (lexicographic)."""
    rows = np.asarray(rows, dtype=np.int64)
    if rows.ndim != 2:
        raise ValueError("expected a 2-d array")
    if rows.shape[0] == 0:
        return rows.reshape(0, rows.shape[1]).copy()
    order = np.lexsort(rows.T[::-1])
    rows = rows[order]
    keep = np.ones(rows.shape[0], dtype=np.bool_)
    keep[1:] = np.any(rows[1:] != rows[:-1], axis=1)
    return np.ascontiguousarray(rows[keep])


def splitmix64(seed: int, n: int, backend: str | None = None) -> np.ndarray:
    """First ``n`` outputs of the SplitMix64 generator started at ``seed``."""
    seed = int(seed) & 0xFFFFFFFFFFFFFFFF
    if _pick(backend) == "numba":
        return _splitmix_numba(np.uint64(seed), np.int64(n))
    return _splitmix_numpy(seed, n)
