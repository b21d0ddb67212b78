"""Sweep hash length against route-following success.

Runs a handful of independent trials per hash size (fresh random projection
each trial) and tabulates success rate and mean final distance, the product
efficiency question: how many hash bits does reliable following need?

Run: python3 demos/04_hash_size_sweep.py [n_trials]
With the default 5 trials per size this takes a couple of minutes; the
acceptance suite runs the full 20-trial version.
"""

import sys

from sparsenav import (
    EncoderConfig,
    Model,
    TrialConfig,
    compression_lower_bound,
    reference_arena,
    reference_route,
    run_sweep,
)

n_trials = int(sys.argv[1]) if len(sys.argv) > 1 else 5
arena = reference_arena()
route = reference_route()

base = TrialConfig(encoder=EncoderConfig(model=Model.FLYHASH))
grid = [EncoderConfig(model=Model.FLYHASH, n_kc=n, kappa=0.1)
        for n in (500, 2000, 8000, 32000)]

print(f"{n_trials} trials per size, fresh projection per trial\n")
rows = run_sweep(arena, route, base, grid, n_trials=n_trials, seed=7)
print(f"{'hash bits':>10} {'success':>8} {'mean final (m)':>15} {'compressed bits/item':>21}")
for row in rows:
    bound = compression_lower_bound(row.encoder.n_kc, row.encoder.kappa)
    print(f"{row.encoder.n_kc:>10} {row.success_rate:>8.2f} "
          f"{row.mean_final_distance:>15.3f} {bound:>21.0f}")
