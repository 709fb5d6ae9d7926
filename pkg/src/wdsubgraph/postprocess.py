"""Low-degree filtering and seeded train/test splitting of edge lists.

Edge rows use the ``edges.txt`` column order: ``(head, tail, relation)``.

Split algorithm ``splitmix64-argsort-v1``:

1. sort the rows ascending by (head, relation, tail);
2. draw ``k_i``, the i-th output (i = 0..n-1) of SplitMix64 started at
   ``seed`` (state += 0x9E3779B97F4A7C15, then the standard 30/27/31 mix);
3. stable-argsort the ``k_i``; the first ``floor(f*n + 1/2)`` positions go to
   train, the rest to test;
4. each side is emitted in the canonical order of step 1.
"""

from __future__ import annotations

import hashlib
import json
import os
from dataclasses import dataclass
from fractions import Fraction
from pathlib import Path

import numpy as np

from . import _kernels
from .dataset import FACT_HEADER

SPLIT_ALGORITHM = "splitmix64-argsort-v1"
DEGREE_MODES = ("incidences", "distinct-neighbors")


class EmptyInput(ValueError):
    pass


@dataclass(frozen=True)
class SplitSpec:
    train_fraction: Fraction = Fraction(4, 5)
    seed: int = 0

    def __post_init__(self):
        f = self.train_fraction
        if not isinstance(f, Fraction):
            f = Fraction(str(f)) if isinstance(f, float) else Fraction(f)
            object.__setattr__(self, "train_fraction", f)
        if not 0 < f < 1:
            raise ValueError(f"train_fraction must lie strictly between 0 and 1, got {f}")
        if not 0 <= self.seed < 1 << 64:
            raise ValueError("seed must be an unsigned 64-bit integer")

    def train_size(self, n: int) -> int:
        # round half up, exact
        return int((self.train_fraction * n + Fraction(1, 2)) // 1)


def as_rows(edges) -> np.ndarray:
    rows = np.asarray(edges, dtype=np.int64)
    if rows.size == 0:
        return np.empty((0, 3), dtype=np.int64)
    if rows.ndim != 2 or rows.shape[1] != 3:
        raise ValueError("edges must be (head, tail, relation) rows")
    return rows


def node_degrees(rows: np.ndarray, mode: str = "incidences", backend: str | None = None):
    """(node ids, degree per node) over the undirected view of ``rows``.

    ``incidences`` counts every head and tail occurrence, so parallel edges
    count multiply and a self-loop adds two. ``distinct-neighbors`` counts the
    other endpoints a node is linked to, ignoring self-loops.
    """
    if mode not in DEGREE_MODES:
        raise ValueError(f"degree mode must be one of {DEGREE_MODES}")
    ends = rows[:, :2]
    ids, inv = np.unique(ends, return_inverse=True)
    inv = inv.reshape(-1, 2)
    if mode == "incidences":
        return ids, _kernels.incidence_degree(inv[:, 0], inv[:, 1], ids.size, backend)
    pairs = np.sort(inv, axis=1)
    pairs = pairs[pairs[:, 0] != pairs[:, 1]]
    pairs = np.unique(pairs, axis=0) if pairs.size else pairs.reshape(0, 2)
    return ids, _kernels.incidence_degree(pairs[:, 0], pairs[:, 1], ids.size, backend)


def filter_min_degree(edges, min_degree: int, mode: str = "incidences", backend: str | None = None) -> np.ndarray:
    """Drop nodes whose degree is below ``min_degree``, once, and the edges touching them.

    Degrees are computed a single time on the input; the result is not
    iterated to a fixed point.
    """
    if min_degree < 0:
        raise ValueError("min_degree must be >= 0")
    rows = as_rows(edges)
    if min_degree == 0 or rows.shape[0] == 0:
        return rows.copy()
    ids, deg = node_degrees(rows, mode, backend)
    keep_ids = ids[deg >= min_degree]
    keep = _kernels.member_mask(rows[:, 0], keep_ids, backend) & _kernels.member_mask(rows[:, 1], keep_ids, backend)
    return rows[keep]


def canonical_order(rows: np.ndarray) -> np.ndarray:
    return rows[np.lexsort((rows[:, 1], rows[:, 2], rows[:, 0]))]


def split_edges(edges, spec: SplitSpec, backend: str | None = None) -> tuple[np.ndarray, np.ndarray]:
    rows = as_rows(edges)
    n = rows.shape[0]
    if n == 0:
        raise EmptyInput("cannot split an empty edge list")
    rows = canonical_order(rows)
    keys = _kernels.splitmix64(spec.seed, n, backend)
    perm = np.argsort(keys, kind="stable")
    cut = spec.train_size(n)
    train_idx = np.sort(perm[:cut])
    test_idx = np.sort(perm[cut:])
    return rows[train_idx], rows[test_idx]


def rows_digest(rows: np.ndarray) -> str:
    """sha256 of the rows rendered in the ``edges.txt`` format."""
    h = hashlib.sha256()
    h.update((FACT_HEADER + "\n").encode())
    for start in range(0, rows.shape[0], 200_000):
        block = rows[start:start + 200_000].tolist()
        h.update("".join(f"{a}\t{b}\t{c}\n" for a, b, c in block).encode())
    return h.hexdigest()


def write_split(
    train: np.ndarray,
    test: np.ndarray,
    spec: SplitSpec,
    out_dir: str | os.PathLike,
    input_digest: str,
    extra: dict | None = None,
) -> None:
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    for name, rows in (("train.txt", train), ("test.txt", test)):
        with open(out / name, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(FACT_HEADER + "\n")
            fh.write("".join(f"{a}\t{b}\t{c}\n" for a, b, c in rows.tolist()))
    manifest = {
        "algorithm": SPLIT_ALGORITHM,
        "seed": spec.seed,
        "train_fraction": str(spec.train_fraction),
        "input_sha256": input_digest,
        "train_size": int(train.shape[0]),
        "test_size": int(test.shape[0]),
    }
    manifest.update(extra or {})
    with open(out / "split.json", "w", encoding="utf-8", newline="\n") as fh:
        json.dump(manifest, fh, indent=2, sort_keys=True)
        fh.write("\n")
