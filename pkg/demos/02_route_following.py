"""One full route-following trial per encoder, with trajectory plots.

Each trial trains by driving the bundled 12.5 s route and storing the middle
visual field every 0.5 s (25 snapshots), then releases the robot under
lateralised novelty steering. A trial counts as a success when the test run
ends within 2 m of where training ended.

Run: python3 demos/02_route_following.py
Writes route_following.png next to this script if matplotlib is available.
"""

from pathlib import Path

from sparsenav import (
    EncoderConfig,
    Model,
    TrialConfig,
    reference_arena,
    reference_route,
    run_trial,
)

arena = reference_arena()
route = reference_route()

configs = {
    "raw image": EncoderConfig(model=Model.PERFECT_MEMORY),
    "expansion hash (32000 bits)": EncoderConfig(model=Model.FLYHASH, n_kc=32000,
                                                 kappa=0.1, seed=3),
    "expansion hash (500 bits)": EncoderConfig(model=Model.FLYHASH, n_kc=500,
                                               kappa=0.1, seed=3),
    "sign hash (4000 bits)": EncoderConfig(model=Model.CONV_LSH, n_kc=4000, seed=3),
}

records = {}
for name, enc_cfg in configs.items():
    record = run_trial(arena, route, TrialConfig(encoder=enc_cfg))
    records[name] = record
    status = "success" if record.success else "FAILURE"
    print(f"{name:>28}: final distance {record.final_distance:.3f} m -> {status}"
          f"{'  (collided)' if record.collided else ''}")

try:
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt
except ImportError:
    print("\nmatplotlib not installed; skipping the plot")
    raise SystemExit(0)

fig, axes = plt.subplots(2, 2, figsize=(11, 8), sharex=True, sharey=True)
for ax, (name, record) in zip(axes.ravel(), records.items()):
    for wall in arena.walls:
        ax.plot([wall.x1, wall.x2], [wall.y1, wall.y2], color="k", lw=2)
    train = record.train_trajectory
    test = record.test_trajectory
    ax.plot(train[:, 1], train[:, 2], color="k", lw=1.5, label="training route")
    ax.plot(test[:, 1], test[:, 2], color="tab:red", lw=1.0, label="autonomous test")
    ax.plot(*train[-1, 1:3], marker="*", ms=12, color="k")
    ax.plot(*test[-1, 1:3], marker="o", ms=7, color="tab:red")
    ax.set_title(f"{name}\nfinal distance {record.final_distance:.2f} m")
    ax.set_aspect("equal")
axes[0, 0].legend(loc="upper right", fontsize=8)
fig.tight_layout()
out = Path(__file__).parent / "route_following.png"
fig.savefig(out, dpi=130)
print(f"\nwrote {out}")
