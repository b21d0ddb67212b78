"""Storage, compression and run-time cost of the three encoders.

Prints the bit-cost and operation-count tables, the Shannon lower bound on
compressing sparse hashes (with the practical index-list format for
comparison), and the capacity estimate for a plastic readout layer.

Run: python3 demos/03_efficiency_accounting.py
"""

from sparsenav import (
    Model,
    bernoulli_entropy,
    compression_lower_bound,
    csr_hash_bits,
    memory_capacity,
    op_counts,
    storage_size,
)

N_PN, N_KC, N_ITEMS = 726, 32000, 25

print(f"=== storage for {N_ITEMS} stored items (n_pn={N_PN}, n_kc={N_KC}) ===")
print(f"{'model':>16} {'W bits':>14} {'item bits':>10} {'total bits':>14}")
for model in Model:
    rep = storage_size(model, N_PN, N_KC, n_items=N_ITEMS)
    print(f"{model.value:>16} {rep.w_bits:>14,} {rep.y_bits:>10,} "
          f"{rep.total_bits_for_n_items:>14,}")
print()

print("=== lossless compression of one hash ===")
for kappa in (0.05, 0.1, 0.5):
    h = bernoulli_entropy(kappa)
    bound = compression_lower_bound(N_KC, kappa)
    print(f"kappa={kappa:<5} H={h:.4f} bits/bit -> bound {bound:>8.0f} bits"
          f"   (index list: {csr_hash_bits(N_KC, kappa):>7.0f} bits, raw: {N_KC})")
print()

print("=== run-time operations (one encode / one stored-item comparison) ===")
print(f"{'model':>16} {'enc mult':>12} {'enc add':>12} {'k-WTA':>6} "
      f"{'XOR':>8} {'sq mult':>8} {'adds':>8}")
for model in Model:
    rep = op_counts(model, N_PN, N_KC, kappa=0.05)
    print(f"{model.value:>16} {rep.encode_mults:>12,} {rep.encode_adds:>12,} "
          f"{rep.encode_kwta:>6} {rep.eval_xor:>8,} {rep.eval_square_mults:>8,} "
          f"{rep.eval_adds:>8,}")
print()

print("=== capacity of a plastic readout over the hash layer ===")
print("units needed so 25 learned views stay separable at 1% confusion:")
for kappa in (0.2, 0.1, 0.05):
    m330 = memory_capacity(330, kappa, 0.01)
    print(f"kappa={kappa:<5} -> 330 units hold ~{m330:.1f} items")
print("\nsparser codes store more per unit: with kappa=0.05, 330 units ~ 25 items.")
