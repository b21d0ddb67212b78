"""Efficiency accounting: entropy bounds, memory capacity, storage and op counts.

All storage figures assume 1 bit per binary element, 8 bits per grayscale
value and 64 bits per real number. Operation counts are per encode and per
single stored-item comparison.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .encoders import Encoder, EncoderConfig, Model
from .errors import StateError
from .memory import MemoryStore, evaluate_novelty, store_for, store_item


def bernoulli_entropy(kappa: float) -> float:
    """Entropy in bits of a Bernoulli(kappa) symbol, with 0*log(0) = 0."""
    if not 0.0 <= kappa <= 1.0:
        raise ValueError(f"kappa must lie in [0, 1], got {kappa}")
    if kappa in (0.0, 1.0):
        return 0.0
    return -kappa * math.log2(kappa) - (1.0 - kappa) * math.log2(1.0 - kappa)


def compression_lower_bound(n_kc: int, kappa: float) -> float:
    """Shannon bound: fewest bits a length-n_kc sparsity-kappa code can take."""
    if n_kc < 1:
        raise ValueError(f"n_kc must be >= 1, got {n_kc}")
    return n_kc * bernoulli_entropy(kappa)


def csr_hash_bits(n_kc: int, kappa: float, index_bits: int = 16) -> float:
    """Bits to store one sparse hash as an index list (practical format)."""
    if n_kc < 1:
        raise ValueError(f"n_kc must be >= 1, got {n_kc}")
    return index_bits * kappa * n_kc


def memory_capacity(n_kc: int, kappa: float, p_error: float) -> float:
    """Number of items a plastic readout of n_kc units could separate at the
    given confusion probability: (log(1 - p^(1/n)) - log(kappa)) / log(1 - kappa)."""
    if n_kc < 1:
        raise ValueError(f"n_kc must be >= 1, got {n_kc}")
    if not 0.0 < kappa < 1.0:
        raise ValueError(f"kappa must lie in (0, 1), got {kappa}")
    if not 0.0 < p_error < 1.0:
        raise ValueError(f"p_error must lie in (0, 1), got {p_error}")
    inner = 1.0 - p_error ** (1.0 / n_kc)
    return (math.log(inner) - math.log(kappa)) / math.log(1.0 - kappa)


@dataclass(frozen=True)
class StorageReport:
    model: Model
    w_bits: int
    y_bits: int
    total_bits_for_n_items: int


@dataclass(frozen=True)
class OpCountReport:
    model: Model
    encode_mults: int
    encode_adds: int
    encode_kwta: int
    eval_xor: int
    eval_square_mults: int
    eval_adds: int  # upper bound for the two hash models


def storage_size(model, n_pn: int, n_kc: int, n_items: int = 1) -> StorageReport:
    """Bit cost of the weights plus n_items stored codes for one model."""
    model = Model(model)
    if n_pn < 1 or n_kc < 1 or n_items < 0:
        raise ValueError("dimensions must be positive (n_items nonnegative)")
    if model is Model.FLYHASH:
        w_bits, y_bits = n_pn * n_kc, n_kc
    elif model is Model.CONV_LSH:
        w_bits, y_bits = 64 * n_pn * n_kc, n_kc
    else:
        w_bits, y_bits = 0, 8 * n_pn
    return StorageReport(model, w_bits, y_bits, w_bits + n_items * y_bits)


def op_counts(model, n_pn: int, n_kc: int, kappa: float = 0.1) -> OpCountReport:
    """Run-time operations for one encode and one stored-item comparison.

    The expansion-hash addition count assumes 10 connections per output unit
    (exact in fixed-fanout mode, the mean otherwise); its comparison-addition
    figure is the bound 2*kappa*n_kc, since two k-sparse codes differ in at
    most 2k bits.
    """
    model = Model(model)
    if n_pn < 1 or n_kc < 1:
        raise ValueError("dimensions must be positive")
    if model is Model.FLYHASH:
        return OpCountReport(model, 0, 9 * n_kc, 1, n_kc, 0,
                             int(round(2 * kappa * n_kc)))
    if model is Model.CONV_LSH:
        return OpCountReport(model, n_pn * n_kc, (n_pn - 1) * n_kc, 0, n_kc, 0, n_kc)
    return OpCountReport(model, 0, 0, 0, 0, n_pn + 1, 2 * n_pn - 1)


def instrumented_counts(encoder: Encoder, x, stored_x) -> OpCountReport:
    """Measure live counters over one encode plus one single-item novelty scan.

    The encoder must have counters enabled; the expansion hash must be built
    in fixed-fanout mode, otherwise its addition count is only correct in
    expectation and the exact-match contract would be a lie.
    """
    if encoder.counters is None:
        raise StateError("operation counters are disabled on this encoder")
    cfg = encoder.cfg
    if cfg.model is Model.FLYHASH and not cfg.fixed_fanout:
        raise StateError("instrumented counts require a fixed-fanout expansion hash")
    store = store_for(cfg)
    saved, encoder.counters = encoder.counters, None
    try:
        store_item(store, encoder.encode(stored_x))
    finally:
        encoder.counters = saved
    encoder.counters.reset()
    evaluate_novelty(store, x, encoder)
    c = encoder.counters
    return OpCountReport(cfg.model, c.encode_mults, c.encode_adds, c.encode_kwta,
                         c.eval_xor, c.eval_square_mults, c.eval_adds)
