"""Visual-memory encoders.

Three single-layer encoders share the form ``y = f(W @ x)``:

* expansion hash ("flyhash"): sparse binary W, k-winners-take-all output;
* sign-projection hash ("conv_lsh"): dense Gaussian W, sign threshold;
* raw-image memory ("perfect_memory"): identity, stores the bytes as-is.

The projection matrix is drawn once from a seeded generator and is immutable
afterwards, so encoding is a pure function of (matrix, input).
"""

from __future__ import annotations

import struct
from dataclasses import dataclass, field, replace
from enum import Enum

import numpy as np

from .errors import ConfigError, StateError

SPARSE_BINARY = "sparse_binary"
DENSE_REAL = "dense_real"
IDENTITY = "identity"

# Rows drawn per block while sampling sparse weights. Part of the stream
# layout: changing it changes which matrix a given seed produces.
_SPARSE_BLOCK_ROWS = 4096

_POPCOUNT8 = np.array([bin(i).count("1") for i in range(256)], dtype=np.uint16)

if hasattr(np, "bitwise_count"):
    def _popcount_bytes(a: np.ndarray) -> np.ndarray:
        return np.bitwise_count(a)
else:  # numpy < 2.0
    def _popcount_bytes(a: np.ndarray) -> np.ndarray:
        return _POPCOUNT8[a]


class Model(str, Enum):
    FLYHASH = "flyhash"
    CONV_LSH = "conv_lsh"
    PERFECT_MEMORY = "perfect_memory"


@dataclass(frozen=True)
class EncoderConfig:
    """Static parameters of one encoder.

    ``kappa`` (output sparsity) and ``theta`` (connection density) only apply
    to the expansion hash; ``theta`` defaults to 10 / n_pn so each output unit
    connects to 10 inputs on average. ``fixed_fanout`` samples exactly
    round(theta * n_pn) distinct connections per row instead of Bernoulli
    draws, which makes the addition count per encode exact.
    """

    model: Model
    n_pn: int = 726
    n_kc: int = 4000
    kappa: float = 0.1
    theta: float | None = None
    seed: int = 0
    fixed_fanout: bool = False

    def __post_init__(self):
        object.__setattr__(self, "model", Model(self.model))
        if self.n_pn < 1:
            raise ConfigError(f"n_pn must be >= 1, got {self.n_pn}")
        if self.model is Model.PERFECT_MEMORY:
            return
        if self.n_kc < 1:
            raise ConfigError(f"n_kc must be >= 1, got {self.n_kc}")
        if self.model is Model.FLYHASH:
            if not 0.0 < self.kappa < 1.0:
                raise ConfigError(f"kappa must lie in (0, 1), got {self.kappa}")
            theta = self.theta if self.theta is not None else 10.0 / self.n_pn
            object.__setattr__(self, "theta", theta)
            if not 0.0 < theta < 1.0:
                raise ConfigError(f"theta must lie in (0, 1), got {theta}")
            if self.k < 1:
                raise ConfigError("kappa * n_kc rounds to zero winners")

    @property
    def k(self) -> int:
        """Number of winners per hash: round(kappa * n_kc), at least 1."""
        return max(1, int(np.floor(self.kappa * self.n_kc + 0.5)))

    @property
    def fanout(self) -> int:
        return max(1, int(np.floor(self.theta * self.n_pn + 0.5)))

    @property
    def out_dim(self) -> int:
        """Length of the encoded item: n_kc bits, or n_pn bytes for identity."""
        return self.n_pn if self.model is Model.PERFECT_MEMORY else self.n_kc


@dataclass(frozen=True)
class ProjectionMatrix:
    """Immutable connection matrix in sparse-binary, dense-real or identity layout.

    Sparse rows are stored CSR-style: ``indices[indptr[i]:indptr[i+1]]`` holds
    the sorted, duplicate-free input indices of row ``i``.
    """

    layout: str
    rows: int
    n_pn: int
    seed: int = 0
    indptr: np.ndarray | None = None
    indices: np.ndarray | None = None
    weights: np.ndarray | None = None

    def __post_init__(self):
        for arr in (self.indptr, self.indices, self.weights):
            if arr is not None:
                arr.setflags(write=False)

    def row_indices(self, i: int) -> np.ndarray:
        if self.layout != SPARSE_BINARY:
            raise StateError("row_indices is only defined for sparse layout")
        return self.indices[self.indptr[i] : self.indptr[i + 1]]

    def densify(self) -> np.ndarray:
        """Dense float array equal to this matrix; for small oracle checks."""
        if self.layout == DENSE_REAL:
            return np.array(self.weights, dtype=np.float64)
        if self.layout == IDENTITY:
            return np.eye(self.rows, self.n_pn)
        dense = np.zeros((self.rows, self.n_pn))
        for i in range(self.rows):
            dense[i, self.row_indices(i)] = 1.0
        return dense


@dataclass(frozen=True, eq=False)
class HashVector:
    """Bit-packed binary code. Bit j lives at byte j // 8, bit position j % 8."""

    n_bits: int
    packed: np.ndarray

    def __post_init__(self):
        self.packed.setflags(write=False)

    @classmethod
    def from_bits(cls, bits: np.ndarray) -> "HashVector":
        bits = np.asarray(bits, dtype=np.uint8)
        return cls(n_bits=bits.size, packed=np.packbits(bits, bitorder="little"))

    def to_bits(self) -> np.ndarray:
        return np.unpackbits(self.packed, count=self.n_bits, bitorder="little")

    def popcount(self) -> int:
        return int(_popcount_bytes(self.packed).sum())

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, HashVector)
            and self.n_bits == other.n_bits
            and np.array_equal(self.packed, other.packed)
        )


@dataclass
class OpCounters:
    """Live operation counters, updated by encode and novelty evaluation."""

    encode_mults: int = 0
    encode_adds: int = 0
    encode_kwta: int = 0
    eval_xor: int = 0
    eval_square_mults: int = 0
    eval_adds: int = 0

    def reset(self):
        for name in self.__dataclass_fields__:
            setattr(self, name, 0)


def init_flyhash_weights(cfg: EncoderConfig) -> ProjectionMatrix:
    """Sample the sparse binary projection for the expansion hash.

    Default mode draws every entry independently as 1 with probability
    ``cfg.theta``; fixed-fanout mode instead picks exactly ``cfg.fanout``
    distinct inputs per row. Both are deterministic given ``cfg.seed``.
    """
    if cfg.model is not Model.FLYHASH:
        raise ConfigError(f"expected flyhash config, got {cfg.model.value}")
    rng = np.random.default_rng(cfg.seed)
    rows, cols = cfg.n_kc, cfg.n_pn
    if cfg.fixed_fanout:
        fanout = cfg.fanout
        chunks = []
        for start in range(0, rows, _SPARSE_BLOCK_ROWS):
            n = min(_SPARSE_BLOCK_ROWS, rows - start)
            keys = rng.random((n, cols))
            picked = np.argpartition(keys, fanout - 1, axis=1)[:, :fanout]
            chunks.append(np.sort(picked, axis=1).astype(np.int32).ravel())
        indices = np.concatenate(chunks)
        indptr = np.arange(rows + 1, dtype=np.int64) * fanout
    else:
        index_chunks = []
        counts = np.empty(rows, dtype=np.int64)
        for start in range(0, rows, _SPARSE_BLOCK_ROWS):
            n = min(_SPARSE_BLOCK_ROWS, rows - start)
            mask = rng.random((n, cols)) < cfg.theta
            counts[start : start + n] = mask.sum(axis=1)
            index_chunks.append(np.nonzero(mask)[1].astype(np.int32))
        indices = np.concatenate(index_chunks)
        indptr = np.zeros(rows + 1, dtype=np.int64)
        np.cumsum(counts, out=indptr[1:])
    return ProjectionMatrix(
        layout=SPARSE_BINARY, rows=rows, n_pn=cols, seed=cfg.seed,
        indptr=indptr, indices=indices,
    )


def init_lsh_weights(cfg: EncoderConfig) -> ProjectionMatrix:
    """Sample the dense standard-normal projection for the sign hash."""
    if cfg.model is not Model.CONV_LSH:
        raise ConfigError(f"expected conv_lsh config, got {cfg.model.value}")
    rng = np.random.default_rng(cfg.seed)
    weights = rng.standard_normal((cfg.n_kc, cfg.n_pn))
    return ProjectionMatrix(
        layout=DENSE_REAL, rows=cfg.n_kc, n_pn=cfg.n_pn, seed=cfg.seed,
        weights=weights,
    )


def build_matrix(cfg: EncoderConfig) -> ProjectionMatrix:
    if cfg.model is Model.FLYHASH:
        return init_flyhash_weights(cfg)
    if cfg.model is Model.CONV_LSH:
        return init_lsh_weights(cfg)
    return ProjectionMatrix(layout=IDENTITY, rows=cfg.n_pn, n_pn=cfg.n_pn, seed=cfg.seed)


def k_wta(pre_activations, k: int) -> np.ndarray:
    """k-winners-take-all: 0/1 vector with exactly the k largest entries set.

    Ties at the k-th value are broken in favour of the lowest index, so the
    result is deterministic for any input.
    """
    v = np.asarray(pre_activations)
    n = v.size
    if not 1 <= k <= n:
        raise ValueError(f"k must lie in [1, {n}], got {k}")
    kth = np.partition(v, n - k)[n - k]
    winners = v > kth
    short = k - int(winners.sum())
    if short:
        winners[np.flatnonzero(v == kth)[:short]] = True
    return winners.astype(np.uint8)


def _padded_rows(matrix: ProjectionMatrix) -> np.ndarray:
    # Cached (rows, max_fanout) index table, short rows padded with the
    # sentinel index n_pn, which points at a zero appended to the input.
    cached = getattr(matrix, "_padded", None)
    if cached is None:
        counts = np.diff(matrix.indptr)
        width = max(1, int(counts.max(initial=0)))
        cached = np.full((matrix.rows, width), matrix.n_pn, dtype=np.int64)
        mask = np.arange(width)[None, :] < counts[:, None]
        cached[mask] = matrix.indices
        cached.setflags(write=False)
        object.__setattr__(matrix, "_padded", cached)
    return cached


def _sparse_matvec(matrix: ProjectionMatrix, x: np.ndarray) -> np.ndarray:
    # Gather-and-sum per row; rows that drew no connections (possible under
    # Bernoulli sampling) come out as exactly zero via the sentinel.
    padded = np.concatenate([x, np.zeros(1, dtype=x.dtype)])[_padded_rows(matrix)]
    return padded.sum(axis=1)


def encode(matrix: ProjectionMatrix, x, cfg: EncoderConfig, counters: OpCounters | None = None):
    """Encode one input vector.

    Returns a :class:`HashVector` for the two hash models, or the raw uint8
    byte vector for the identity model. Integer inputs to the expansion hash
    are accumulated in int64 (sums of uint8 pixels stay exact).
    """
    x = np.asarray(x)
    if x.ndim != 1 or x.size != cfg.n_pn:
        raise ValueError(f"input must be a vector of length {cfg.n_pn}, got shape {x.shape}")

    if cfg.model is Model.PERFECT_MEMORY:
        if not np.issubdtype(x.dtype, np.integer):
            raise ValueError("identity model stores raw bytes; input must be integer-valued")
        if x.min() < 0 or x.max() > 255:
            raise ValueError("grayscale values must lie in [0, 255]")
        return x.astype(np.uint8)

    if cfg.model is Model.FLYHASH:
        acc = x.astype(np.int64) if np.issubdtype(x.dtype, np.integer) else x.astype(np.float64)
        sums = _sparse_matvec(matrix, acc)
        if counters is not None:
            nnz = int(matrix.indptr[-1])
            nonempty = int((matrix.indptr[1:] > matrix.indptr[:-1]).sum())
            counters.encode_adds += nnz - nonempty
            counters.encode_kwta += 1
        return HashVector.from_bits(k_wta(sums, cfg.k))

    proj = matrix.weights @ x.astype(np.float64)
    if counters is not None:
        counters.encode_mults += cfg.n_pn * cfg.n_kc
        counters.encode_adds += (cfg.n_pn - 1) * cfg.n_kc
    return HashVector.from_bits((proj > 0).astype(np.uint8))


class Encoder:
    """A config paired with its realized projection matrix.

    The matrix is immutable and ``encode`` has no shared mutable state, so one
    Encoder may serve concurrent trials (attach per-trial counters instead of
    sharing one).
    """

    def __init__(self, cfg: EncoderConfig, matrix: ProjectionMatrix | None = None):
        self.cfg = cfg
        self.matrix = matrix if matrix is not None else build_matrix(cfg)
        self.counters: OpCounters | None = None

    def enable_counters(self) -> OpCounters:
        self.counters = OpCounters()
        return self.counters

    def encode(self, x):
        return encode(self.matrix, x, self.cfg, self.counters)

    @property
    def item_dim(self) -> int:
        return self.cfg.out_dim


_MATRIX_MAGIC = b"SNWM"
_LAYOUT_TAGS = {SPARSE_BINARY: 0, DENSE_REAL: 1, IDENTITY: 2}
_TAG_LAYOUTS = {v: k for k, v in _LAYOUT_TAGS.items()}


def save_matrix(matrix: ProjectionMatrix, path):
    """Write the matrix container.

    Layout (little-endian): magic ``SNWM``, version u8, layout tag u8
    (0 sparse, 1 dense, 2 identity), rows u32, n_pn u32, seed i64; sparse body
    is the int64 indptr followed by int32 indices, dense body is row-major
    float64, identity has no body.
    """
    with open(path, "wb") as fh:
        fh.write(_MATRIX_MAGIC)
        fh.write(struct.pack("<BBIIq", 1, _LAYOUT_TAGS[matrix.layout],
                             matrix.rows, matrix.n_pn, matrix.seed))
        if matrix.layout == SPARSE_BINARY:
            fh.write(struct.pack("<Q", matrix.indices.size))
            fh.write(matrix.indptr.astype("<i8").tobytes())
            fh.write(matrix.indices.astype("<i4").tobytes())
        elif matrix.layout == DENSE_REAL:
            fh.write(matrix.weights.astype("<f8").tobytes())


def load_matrix(path) -> ProjectionMatrix:
    with open(path, "rb") as fh:
        if fh.read(4) != _MATRIX_MAGIC:
            raise ConfigError(f"{path}: not a projection-matrix container")
        version, tag, rows, n_pn, seed = struct.unpack("<BBIIq", fh.read(18))
        if version != 1:
            raise ConfigError(f"{path}: unsupported container version {version}")
        layout = _TAG_LAYOUTS[tag]
        if layout == SPARSE_BINARY:
            (nnz,) = struct.unpack("<Q", fh.read(8))
            indptr = np.frombuffer(fh.read(8 * (rows + 1)), dtype="<i8").astype(np.int64)
            indices = np.frombuffer(fh.read(4 * nnz), dtype="<i4").astype(np.int32)
            return ProjectionMatrix(layout, rows, n_pn, seed, indptr=indptr, indices=indices)
        if layout == DENSE_REAL:
            weights = np.frombuffer(fh.read(8 * rows * n_pn), dtype="<f8")
            return ProjectionMatrix(layout, rows, n_pn, seed,
                                    weights=weights.reshape(rows, n_pn).copy())
        return ProjectionMatrix(layout, rows, n_pn, seed)
