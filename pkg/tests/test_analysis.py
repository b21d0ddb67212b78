from decimal import Decimal, getcontext

import numpy as np
import pytest

from sparsenav.analysis import (
    bernoulli_entropy,
    compression_lower_bound,
    csr_hash_bits,
    instrumented_counts,
    memory_capacity,
    op_counts,
    storage_size,
)
from sparsenav.encoders import Encoder, EncoderConfig, Model
from sparsenav.errors import StateError


def entropy_oracle(kappa: str) -> float:
    """Bernoulli entropy at 40-digit precision, independent of the library."""
    getcontext().prec = 40
    k = Decimal(kappa)
    ln2 = Decimal(2).ln()
    h = -(k * k.ln() + (1 - k) * (1 - k).ln()) / ln2
    return float(h)


class TestEntropy:
    def test_value_at_tenth(self):
        assert bernoulli_entropy(0.1) == pytest.approx(0.4690, abs=1e-4)

    def test_value_at_twentieth(self):
        assert bernoulli_entropy(0.05) == pytest.approx(0.2864, abs=1e-4)

    def test_half_is_exactly_one(self):
        assert bernoulli_entropy(0.5) == 1.0

    def test_matches_high_precision_oracle(self):
        for kappa in ("0.05", "0.1", "0.2", "0.5", "0.9"):
            assert bernoulli_entropy(float(kappa)) == pytest.approx(
                entropy_oracle(kappa), abs=1e-12)

    def test_degenerate_endpoints_are_zero(self):
        assert bernoulli_entropy(0.0) == 0.0
        assert bernoulli_entropy(1.0) == 0.0

    def test_symmetry_and_maximum(self):
        for kappa in np.linspace(0.01, 0.49, 25):
            assert bernoulli_entropy(kappa) == pytest.approx(bernoulli_entropy(1 - kappa))
            assert bernoulli_entropy(kappa) < 1.0

    @pytest.mark.parametrize("bad", [-0.1, 1.1])
    def test_domain_checked(self, bad):
        with pytest.raises(ValueError):
            bernoulli_entropy(bad)


class TestCompressionBound:
    def test_reference_value(self):
        # 32000 * H(0.05), computed independently at high precision
        expected = 32000 * entropy_oracle("0.05")
        got = compression_lower_bound(32000, 0.05)
        assert got == pytest.approx(expected, abs=1e-6)
        assert got == pytest.approx(9164.8, abs=4)

    def test_dense_code_cannot_compress(self):
        assert compression_lower_bound(32000, 0.5) == 32000.0

    def test_never_exceeds_raw_length(self):
        for kappa in np.linspace(0.01, 0.99, 33):
            assert compression_lower_bound(1000, kappa) <= 1000.0 + 1e-9

    def test_index_list_format_sits_above_bound(self):
        bound = compression_lower_bound(32000, 0.05)
        csr = csr_hash_bits(32000, 0.05)
        assert csr == 0.8 * 32000 == 25600.0
        assert bound < csr < 32000


class TestMemoryCapacity:
    def test_reference_point(self):
        assert 24.5 <= memory_capacity(330, 0.05, 0.01) <= 25.5

    def test_monotone_in_sparsity(self):
        m = [memory_capacity(330, kappa, 0.01) for kappa in (0.2, 0.1, 0.05)]
        assert m[0] < m[1] < m[2]

    def test_monotone_in_units(self):
        m = [memory_capacity(n, 0.05, 0.01) for n in (100, 330, 1000, 5000)]
        assert all(a < b for a, b in zip(m, m[1:]))

    def test_grows_without_bound_near_one(self):
        assert memory_capacity(330, 0.05, 0.999) > memory_capacity(330, 0.05, 0.9) \
            > memory_capacity(330, 0.05, 0.5)

    @pytest.mark.parametrize("p", [0.0, 1.0, -0.5, 2.0])
    def test_error_probability_domain(self, p):
        with pytest.raises(ValueError):
            memory_capacity(330, 0.05, p)

    @pytest.mark.parametrize("kappa", [0.0, 1.0])
    def test_sparsity_domain(self, kappa):
        with pytest.raises(ValueError):
            memory_capacity(330, kappa, 0.01)


class TestStorageSize:
    def test_raw_image_item_bits(self):
        rep = storage_size(Model.PERFECT_MEMORY, n_pn=726, n_kc=1)
        assert rep.y_bits == 5808
        assert rep.w_bits == 0

    def test_expansion_hash_item_bits(self):
        rep = storage_size(Model.FLYHASH, n_pn=726, n_kc=32000)
        assert rep.y_bits == 32000
        assert rep.w_bits == 726 * 32000

    def test_dense_projection_weight_bits(self):
        rep = storage_size(Model.CONV_LSH, n_pn=726, n_kc=4000)
        assert rep.w_bits == 64 * 726 * 4000 == 185_856_000
        assert rep.y_bits == 4000

    def test_total_accumulates_items(self):
        rep = storage_size(Model.FLYHASH, n_pn=10, n_kc=100, n_items=25)
        assert rep.total_bits_for_n_items == 10 * 100 + 25 * 100

    @pytest.mark.parametrize("model", list(Model))
    def test_symbolic_formulas_over_grid(self, model):
        for n_pn in (10, 726):
            for n_kc in (1, 500, 32000):
                rep = storage_size(model, n_pn, n_kc, n_items=3)
                if model is Model.FLYHASH:
                    assert (rep.w_bits, rep.y_bits) == (n_pn * n_kc, n_kc)
                elif model is Model.CONV_LSH:
                    assert (rep.w_bits, rep.y_bits) == (64 * n_pn * n_kc, n_kc)
                else:
                    assert (rep.w_bits, rep.y_bits) == (0, 8 * n_pn)
                assert rep.total_bits_for_n_items == rep.w_bits + 3 * rep.y_bits


class TestOpCounts:
    def test_expansion_hash_additions(self):
        assert op_counts(Model.FLYHASH, 726, 8000).encode_adds == 72000

    def test_raw_image_eval_additions(self):
        assert op_counts(Model.PERFECT_MEMORY, 726, 1).eval_adds == 1451

    def test_dense_projection_multiplications(self):
        assert op_counts(Model.CONV_LSH, 726, 1000).encode_mults == 726_000

    def test_symbolic_formulas_over_grid(self):
        for n_pn in (10, 726):
            for n_kc in (64, 8000):
                for kappa in (0.05, 0.1, 0.5):
                    fh = op_counts(Model.FLYHASH, n_pn, n_kc, kappa)
                    assert (fh.encode_mults, fh.encode_adds, fh.encode_kwta) == (0, 9 * n_kc, 1)
                    assert (fh.eval_xor, fh.eval_adds) == (n_kc, round(2 * kappa * n_kc))
                    lsh = op_counts(Model.CONV_LSH, n_pn, n_kc, kappa)
                    assert (lsh.encode_mults, lsh.encode_adds) == (n_pn * n_kc, (n_pn - 1) * n_kc)
                    assert (lsh.eval_xor, lsh.eval_adds) == (n_kc, n_kc)
                    pm = op_counts(Model.PERFECT_MEMORY, n_pn, n_kc, kappa)
                    assert (pm.encode_mults, pm.encode_adds, pm.encode_kwta) == (0, 0, 0)
                    assert (pm.eval_square_mults, pm.eval_adds) == (n_pn + 1, 2 * n_pn - 1)


class TestInstrumentedCounts:
    def setup_method(self):
        rng = np.random.default_rng(20)
        self.x = rng.integers(0, 256, 726).astype(np.uint8)
        self.stored = rng.integers(0, 256, 726).astype(np.uint8)

    def test_expansion_hash_matches_formulas_exactly(self):
        cfg = EncoderConfig(model=Model.FLYHASH, n_kc=2000, kappa=0.05,
                            fixed_fanout=True, seed=6)
        enc = Encoder(cfg)
        enc.enable_counters()
        got = instrumented_counts(enc, self.x, self.stored)
        want = op_counts(Model.FLYHASH, 726, 2000, 0.05)
        assert got.encode_mults == want.encode_mults == 0
        assert got.encode_adds == want.encode_adds == 18000
        assert got.encode_kwta == want.encode_kwta == 1
        assert got.eval_xor == want.eval_xor == 2000
        assert got.eval_adds <= want.eval_adds == 200  # popcount bound: 2 kappa n_kc

    def test_dense_projection_matches_formulas_exactly(self):
        cfg = EncoderConfig(model=Model.CONV_LSH, n_kc=500, seed=7)
        enc = Encoder(cfg)
        enc.enable_counters()
        got = instrumented_counts(enc, self.x, self.stored)
        want = op_counts(Model.CONV_LSH, 726, 500)
        assert got.encode_mults == want.encode_mults == 726 * 500
        assert got.encode_adds == want.encode_adds == 725 * 500
        assert got.eval_xor == want.eval_xor == 500
        assert got.eval_adds <= want.eval_adds == 500

    def test_raw_image_matches_formulas_exactly(self):
        cfg = EncoderConfig(model=Model.PERFECT_MEMORY)
        enc = Encoder(cfg)
        enc.enable_counters()
        got = instrumented_counts(enc, self.x, self.stored)
        want = op_counts(Model.PERFECT_MEMORY, 726, 1)
        assert got.eval_square_mults == want.eval_square_mults == 727
        assert got.eval_adds == want.eval_adds == 1451

    def test_counters_disabled_rejected(self):
        enc = Encoder(EncoderConfig(model=Model.PERFECT_MEMORY))
        with pytest.raises(StateError):
            instrumented_counts(enc, self.x, self.stored)

    def test_bernoulli_mode_rejected(self):
        enc = Encoder(EncoderConfig(model=Model.FLYHASH, n_kc=200, seed=1))
        enc.enable_counters()
        with pytest.raises(StateError):
            instrumented_counts(enc, self.x, self.stored)

    def test_sparse_hash_comparison_bounded_by_2k(self):
        cfg = EncoderConfig(model=Model.FLYHASH, n_kc=2000, kappa=0.05,
                            fixed_fanout=True, seed=8)
        enc = Encoder(cfg)
        rng = np.random.default_rng(9)
        from sparsenav.memory import HAMMING, dissimilarity

        for _ in range(50):
            a = enc.encode(rng.integers(0, 256, 726).astype(np.uint8))
            b = enc.encode(rng.integers(0, 256, 726).astype(np.uint8))
            assert dissimilarity(a, b, HAMMING) <= 2 * cfg.k
