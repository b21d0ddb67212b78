"""Tour of the three visual-memory encoders.

Builds an expansion hash (sparse binary projection + k-winners-take-all), a
sign-projection hash (dense Gaussian projection + threshold) and the identity
raw-image baseline, then shows what each preserves: output sparsity, sign
structure, and the locality property that makes Hamming distance a usable
stand-in for image distance.

Run: python3 demos/01_hash_encoders.py
"""

import numpy as np
from scipy import stats

from sparsenav import (
    EUCLIDEAN,
    HAMMING,
    Encoder,
    EncoderConfig,
    Model,
    Pose,
    check_collision,
    dissimilarity,
    preprocess,
    reference_arena,
    render,
)

rng = np.random.default_rng(0)
arena = reference_arena()

print("=== rendering a small view corpus ===")
xmin, ymin, xmax, ymax = arena.bounds
crops = []
while len(crops) < 80:
    pose = Pose(rng.uniform(xmin + 0.45, xmax - 0.45),
                rng.uniform(ymin + 0.45, ymax - 0.45),
                rng.uniform(-np.pi, np.pi))
    if check_collision(arena, pose, 0.25):
        continue
    crops.append(preprocess(render(arena, pose)).middle)
crops = np.array(crops)
print(f"{len(crops)} views, each a {crops.shape[1]}-byte grayscale vector\n")

print("=== encoder outputs ===")
encoders = {
    "expansion hash": Encoder(EncoderConfig(model=Model.FLYHASH, n_kc=4000, kappa=0.1, seed=1)),
    "sign hash": Encoder(EncoderConfig(model=Model.CONV_LSH, n_kc=4000, seed=1)),
    "raw image": Encoder(EncoderConfig(model=Model.PERFECT_MEMORY)),
}
for name, enc in encoders.items():
    y = enc.encode(crops[0])
    if enc.cfg.model is Model.PERFECT_MEMORY:
        print(f"{name:>16}: {y.size} bytes, unchanged input")
    else:
        print(f"{name:>16}: {y.n_bits} bits, {y.popcount()} set "
              f"(density {y.popcount() / y.n_bits:.3f})")
print()

print("=== locality: does hash distance track image distance? ===")
pairs = [(a, b) for a, b in rng.integers(0, len(crops), (300, 2)) if a != b]
d_img = [dissimilarity(crops[a], crops[b], EUCLIDEAN) for a, b in pairs]
for name in ("expansion hash", "sign hash"):
    enc = encoders[name]
    hashes = [enc.encode(v) for v in crops]
    d_hash = [dissimilarity(hashes[a], hashes[b], HAMMING) for a, b in pairs]
    rho = stats.spearmanr(d_img, d_hash).statistic
    print(f"{name:>16}: Spearman rho = {rho:.3f} over {len(pairs)} pairs")
print()

print("=== k-winners-take-all is exact ===")
enc = encoders["expansion hash"]
pops = {enc.encode(v).popcount() for v in crops}
print(f"popcount over all {len(crops)} encodes: {pops} (k = {enc.cfg.k})")
