import numpy as np
import pytest

from sparsenav.encoders import Encoder, EncoderConfig, HashVector, Model
from sparsenav.errors import ConfigError, StateError
from sparsenav.memory import (
    EUCLIDEAN,
    HAMMING,
    MemoryStore,
    dissimilarity,
    evaluate_novelty,
    load_store,
    save_store,
    store_for,
    store_item,
)


def random_hash(rng, n_bits=64, density=0.3):
    return HashVector.from_bits((rng.random(n_bits) < density).astype(np.uint8))


class TestStoreItem:
    def test_append_grows_by_one(self):
        store = MemoryStore(HAMMING, 64)
        store_item(store, random_hash(np.random.default_rng(0)))
        assert len(store) == 1

    def test_twenty_five_snapshots(self):
        store = MemoryStore(HAMMING, 64)
        rng = np.random.default_rng(1)
        for _ in range(25):
            store_item(store, random_hash(rng))
        assert len(store) == 25

    def test_prior_items_unchanged(self):
        store = MemoryStore(EUCLIDEAN, 8)
        first = np.arange(8, dtype=np.uint8)
        store_item(store, first)
        store_item(store, np.full(8, 9, dtype=np.uint8))
        assert np.array_equal(store.item(0), first)

    def test_dimension_mismatch_rejected(self):
        store = MemoryStore(HAMMING, 64)
        with pytest.raises(ValueError):
            store_item(store, random_hash(np.random.default_rng(0), n_bits=32))

    def test_frozen_store_rejects_appends(self):
        store = MemoryStore(HAMMING, 64)
        store_item(store, random_hash(np.random.default_rng(0)))
        store.freeze()
        with pytest.raises(StateError):
            store_item(store, random_hash(np.random.default_rng(1)))

    def test_store_for_picks_metric(self):
        assert store_for(EncoderConfig(model=Model.PERFECT_MEMORY)).metric == EUCLIDEAN
        assert store_for(EncoderConfig(model=Model.FLYHASH)).metric == HAMMING


class TestDissimilarity:
    def test_identity_of_indiscernibles(self):
        hv = random_hash(np.random.default_rng(2))
        assert dissimilarity(hv, hv, HAMMING) == 0.0
        v = np.random.default_rng(3).integers(0, 256, 10).astype(np.uint8)
        assert dissimilarity(v, v, EUCLIDEAN) == 0.0

    def test_hamming_counts_differing_bits(self):
        a = HashVector.from_bits([1, 1, 0, 0])
        b = HashVector.from_bits([1, 0, 1, 0])
        assert dissimilarity(a, b, HAMMING) == 2.0

    def test_euclidean_3_4_5(self):
        assert dissimilarity([0, 0], [3, 4], EUCLIDEAN) == 5.0

    def test_symmetry_nonnegativity_triangle(self):
        rng = np.random.default_rng(4)
        for _ in range(200):
            a, b, c = (random_hash(rng) for _ in range(3))
            dab = dissimilarity(a, b, HAMMING)
            assert dab >= 0
            assert dab == dissimilarity(b, a, HAMMING)
            assert dab <= dissimilarity(a, c, HAMMING) + dissimilarity(c, b, HAMMING)
        for _ in range(200):
            a, b, c = (rng.integers(0, 256, 16).astype(np.uint8) for _ in range(3))
            dab = dissimilarity(a, b, EUCLIDEAN)
            assert dab >= 0
            assert dab == dissimilarity(b, a, EUCLIDEAN)
            assert dab <= dissimilarity(a, c, EUCLIDEAN) + dissimilarity(c, b, EUCLIDEAN) + 1e-9

    def test_dim_mismatch_rejected(self):
        with pytest.raises(ValueError):
            dissimilarity([0, 0], [1, 2, 3], EUCLIDEAN)


class TestEvaluateNovelty:
    def test_stored_hash_has_zero_novelty(self, rendered_views):
        _, crops = rendered_views
        enc = Encoder(EncoderConfig(model=Model.FLYHASH, n_kc=500, seed=5))
        store = store_for(enc.cfg)
        store_item(store, enc.encode(crops[0]))
        result = evaluate_novelty(store, crops[0], enc)
        assert result.d == 0.0 and result.argmin_index == 0

    def test_matches_exhaustive_scan(self):
        rng = np.random.default_rng(6)
        enc = Encoder(EncoderConfig(model=Model.FLYHASH, n_pn=50, n_kc=300, seed=7))
        store = store_for(enc.cfg)
        inputs = rng.integers(0, 256, (25, 50)).astype(np.uint8)
        hashes = [enc.encode(x) for x in inputs]
        for h in hashes:
            store_item(store, h)
        for _ in range(20):
            q = rng.integers(0, 256, 50).astype(np.uint8)
            got = evaluate_novelty(store, q, enc)
            qh = enc.encode(q)
            brute = [dissimilarity(qh, h, HAMMING) for h in hashes]
            assert got.d == min(brute)
            assert got.argmin_index == int(np.argmin(brute))

    def test_euclidean_matches_exhaustive_scan(self):
        rng = np.random.default_rng(8)
        enc = Encoder(EncoderConfig(model=Model.PERFECT_MEMORY, n_pn=30))
        store = store_for(enc.cfg)
        items = rng.integers(0, 256, (25, 30)).astype(np.uint8)
        for it in items:
            store_item(store, it)
        q = rng.integers(0, 256, 30).astype(np.uint8)
        got = evaluate_novelty(store, q, enc)
        brute = [dissimilarity(q, it, EUCLIDEAN) for it in items]
        assert got.d == min(brute)
        assert got.argmin_index == int(np.argmin(brute))

    def test_empty_store_rejected(self):
        enc = Encoder(EncoderConfig(model=Model.FLYHASH, n_pn=50, n_kc=100))
        with pytest.raises(StateError):
            evaluate_novelty(store_for(enc.cfg), np.zeros(50, dtype=np.uint8), enc)

    def test_adding_items_never_increases_novelty(self):
        rng = np.random.default_rng(9)
        enc = Encoder(EncoderConfig(model=Model.FLYHASH, n_pn=50, n_kc=200, seed=10))
        store = store_for(enc.cfg)
        q = rng.integers(0, 256, 50).astype(np.uint8)
        store_item(store, enc.encode(rng.integers(0, 256, 50).astype(np.uint8)))
        prev = evaluate_novelty(store, q, enc).d
        for _ in range(24):
            store_item(store, enc.encode(rng.integers(0, 256, 50).astype(np.uint8)))
            d = evaluate_novelty(store, q, enc).d
            assert d <= prev
            prev = d

    def test_argmin_tie_reports_first_index(self):
        enc = Encoder(EncoderConfig(model=Model.PERFECT_MEMORY, n_pn=4))
        store = store_for(enc.cfg)
        same = np.array([1, 2, 3, 4], dtype=np.uint8)
        store_item(store, same.copy())
        store_item(store, same.copy())
        assert evaluate_novelty(store, same, enc).argmin_index == 0


class TestStoreContainer:
    @pytest.mark.parametrize("metric", [HAMMING, EUCLIDEAN])
    def test_round_trip(self, metric, tmp_path):
        rng = np.random.default_rng(11)
        store = MemoryStore(metric, 64)
        for _ in range(7):
            if metric == HAMMING:
                store_item(store, random_hash(rng))
            else:
                store_item(store, rng.integers(0, 256, 64).astype(np.uint8))
        path = tmp_path / "store.bin"
        save_store(store, path)
        loaded = load_store(path)
        assert loaded.metric == metric and loaded.item_dim == 64 and len(loaded) == 7
        assert np.array_equal(loaded.items_matrix(), store.items_matrix())

    def test_unknown_metric_rejected(self):
        with pytest.raises(ConfigError):
            MemoryStore("cosine", 8)
