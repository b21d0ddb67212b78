"""Visual memory store and novelty evaluation.

Novelty of an input is its minimum dissimilarity to any stored item: Hamming
distance between bit-packed hashes, or Euclidean distance between raw
grayscale vectors. The store is a plain append-only list scanned linearly;
with tens of items per run an index structure would only obscure the exact
minimum semantics.
"""

from __future__ import annotations

import math
import struct
from dataclasses import dataclass

import numpy as np

from .encoders import Encoder, EncoderConfig, HashVector, Model, OpCounters, _popcount_bytes
from .errors import ConfigError, StateError

HAMMING = "hamming"
EUCLIDEAN = "euclidean"


@dataclass(frozen=True)
class NoveltyResult:
    d: float
    argmin_index: int


class MemoryStore:
    """Ordered collection of encoded memory items with a fixed metric.

    Hamming stores expect :class:`HashVector` items; Euclidean stores expect
    uint8 vectors. ``freeze()`` marks the end of training, after which the
    store is read-only and safe for concurrent novelty queries.
    """

    def __init__(self, metric: str, item_dim: int):
        if metric not in (HAMMING, EUCLIDEAN):
            raise ConfigError(f"unknown metric {metric!r}")
        if item_dim < 1:
            raise ConfigError("item_dim must be >= 1")
        self.metric = metric
        self.item_dim = item_dim
        self._rows: list[np.ndarray] = []
        self._matrix: np.ndarray | None = None
        self._frozen = False

    def __len__(self) -> int:
        return len(self._rows)

    @property
    def frozen(self) -> bool:
        return self._frozen

    def freeze(self):
        self._frozen = True

    def items_matrix(self) -> np.ndarray:
        """All items stacked row-wise (packed bytes or raw bytes)."""
        if self._matrix is None or self._matrix.shape[0] != len(self._rows):
            self._matrix = np.vstack(self._rows) if self._rows else np.empty((0, 0), np.uint8)
        return self._matrix

    def item(self, i: int):
        row = self._rows[i]
        if self.metric == HAMMING:
            return HashVector(n_bits=self.item_dim, packed=row)
        return row

    def _check_item(self, y) -> np.ndarray:
        if self.metric == HAMMING:
            if not isinstance(y, HashVector):
                raise ValueError("Hamming store expects HashVector items")
            if y.n_bits != self.item_dim:
                raise ValueError(f"item has {y.n_bits} bits, store holds {self.item_dim}")
            return y.packed
        y = np.asarray(y)
        if y.ndim != 1 or y.size != self.item_dim:
            raise ValueError(f"item must be a vector of length {self.item_dim}")
        return y.astype(np.uint8)


def store_for(cfg: EncoderConfig) -> MemoryStore:
    """Empty store matching an encoder: Hamming for hashes, Euclidean for bytes."""
    if cfg.model is Model.PERFECT_MEMORY:
        return MemoryStore(EUCLIDEAN, cfg.n_pn)
    return MemoryStore(HAMMING, cfg.n_kc)


def store_item(store: MemoryStore, y) -> MemoryStore:
    """Append one encoded item; prior items are untouched."""
    if store.frozen:
        raise StateError("store is frozen; items can only be added during training")
    store._rows.append(store._check_item(y))
    return store


def dissimilarity(a, b, metric: str) -> float:
    """Distance between two items under the given metric.

    Hamming counts differing bits (exact integer, widened to float); Euclidean
    takes one square root of the exact integer sum of squared byte differences.
    """
    if metric == HAMMING:
        if not (isinstance(a, HashVector) and isinstance(b, HashVector)):
            raise ValueError("Hamming metric expects HashVector operands")
        if a.n_bits != b.n_bits:
            raise ValueError(f"dimension mismatch: {a.n_bits} vs {b.n_bits}")
        return float(_popcount_bytes(a.packed ^ b.packed).sum())
    if metric == EUCLIDEAN:
        a = np.asarray(a, dtype=np.int64)
        b = np.asarray(b, dtype=np.int64)
        if a.shape != b.shape:
            raise ValueError(f"dimension mismatch: {a.shape} vs {b.shape}")
        return math.sqrt(int(((a - b) ** 2).sum()))
    raise ConfigError(f"unknown metric {metric!r}")


def _scan(store: MemoryStore, query: np.ndarray, counters: OpCounters | None):
    items = store.items_matrix()
    if store.metric == HAMMING:
        xors = items ^ query[None, :]
        dists = _popcount_bytes(xors).sum(axis=1, dtype=np.int64)
        if counters is not None:
            counters.eval_xor += store.item_dim * len(store)
            counters.eval_adds += int(dists.sum())
        idx = int(np.argmin(dists))
        return float(dists[idx]), idx
    diffs = items.astype(np.int64) - query.astype(np.int64)
    sq = (diffs * diffs).sum(axis=1)
    if counters is not None:
        counters.eval_square_mults += (store.item_dim + 1) * len(store)
        counters.eval_adds += (2 * store.item_dim - 1) * len(store)
    idx = int(np.argmin(sq))
    return math.sqrt(int(sq[idx])), idx


def evaluate_novelty(store: MemoryStore, x, encoder: Encoder) -> NoveltyResult:
    """Encode ``x`` once and return its minimum distance over all stored items.

    Ties report the first (earliest-stored) index. Undefined on an empty store.
    """
    if len(store) == 0:
        raise StateError("novelty is undefined on an empty store")
    y = encoder.encode(x)
    query = store._check_item(y)
    d, idx = _scan(store, query, encoder.counters)
    return NoveltyResult(d=d, argmin_index=idx)


_STORE_MAGIC = b"SNMS"
_METRIC_TAGS = {HAMMING: 0, EUCLIDEAN: 1}
_TAG_METRICS = {v: k for k, v in _METRIC_TAGS.items()}


def save_store(store: MemoryStore, path):
    """Store container: magic ``SNMS``, version u8, metric u8, item_dim u32,
    n_items u32, then items row-major (packed hash bytes or raw bytes)."""
    items = store.items_matrix()
    with open(path, "wb") as fh:
        fh.write(_STORE_MAGIC)
        fh.write(struct.pack("<BBII", 1, _METRIC_TAGS[store.metric],
                             store.item_dim, len(store)))
        fh.write(items.astype(np.uint8).tobytes())


def load_store(path) -> MemoryStore:
    with open(path, "rb") as fh:
        if fh.read(4) != _STORE_MAGIC:
            raise ConfigError(f"{path}: not a memory-store container")
        version, tag, item_dim, n_items = struct.unpack("<BBII", fh.read(10))
        if version != 1:
            raise ConfigError(f"{path}: unsupported container version {version}")
        metric = _TAG_METRICS[tag]
        row_bytes = (item_dim + 7) // 8 if metric == HAMMING else item_dim
        body = np.frombuffer(fh.read(row_bytes * n_items), dtype=np.uint8)
    store = MemoryStore(metric, item_dim)
    for row in body.reshape(n_items, row_bytes):
        store._rows.append(row.copy())
    return store
