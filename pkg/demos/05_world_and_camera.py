"""A look through the robot's camera and at the image pipeline.

Renders raw 99x99 frames around the arena, walks them through the pipeline
(3x3 block-mean downsample to 33x33, 7x7 box blur, 22-column crops) and
saves a contact sheet if matplotlib is available.

Run: python3 demos/05_world_and_camera.py
"""

from pathlib import Path

import numpy as np

from sparsenav import Pose, preprocess, reference_arena, reference_route, render

arena = reference_arena()
route = reference_route()

poses = [
    route.start,
    Pose(2.4, 1.2, 1.1),
    Pose(3.2, 2.4, -2.4),
    Pose(1.2, 2.6, -0.6),
]

frames = [render(arena, p) for p in poses]
views = [preprocess(f) for f in frames]

for pose, frame, view in zip(poses, frames, views):
    print(f"pose ({pose.x:.2f}, {pose.y:.2f}, {pose.heading:+.2f}): "
          f"raw {frame.shape} in [{frame.min()}, {frame.max()}], "
          f"processed {view.full.shape}, crops {view.left.size} bytes each")

mid = views[0].middle.reshape(33, 22)
print("\nmiddle-crop intensity profile along the center row:")
print(" ".join(f"{v:3d}" for v in mid[16]))

try:
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt
except ImportError:
    print("\nmatplotlib not installed; skipping the contact sheet")
    raise SystemExit(0)

fig, axes = plt.subplots(len(poses), 5, figsize=(12, 2.6 * len(poses)))
titles = ["raw 99x99", "processed 33x33", "left", "middle", "right"]
for r, view in enumerate(views):
    panels = [frames[r], view.full, view.left.reshape(33, 22),
              view.middle.reshape(33, 22), view.right.reshape(33, 22)]
    for c, (panel, title) in enumerate(zip(panels, titles)):
        axes[r, c].imshow(panel, cmap="gray", vmin=0, vmax=255)
        axes[r, c].set_xticks([])
        axes[r, c].set_yticks([])
        if r == 0:
            axes[r, c].set_title(title, fontsize=9)
fig.tight_layout()
out = Path(__file__).parent / "camera_views.png"
fig.savefig(out, dpi=130)
print(f"\nwrote {out}")
