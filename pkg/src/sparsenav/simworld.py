"""Desk-scale 2D world: polygonal arena, raycast grayscale camera, unicycle robot.

The camera renders a 99x99 frame over a 120 degree horizontal field of view by
casting one ray per column. Column 0 is the clockwise-most ray (heading -
FOV/2) and column 98 the counter-clockwise-most; with the left image crop fed
to the left novelty channel this orientation makes the lateralised turn
command corrective, which the offset-recovery test pins down behaviourally.

The image pipeline is integer-exact: 3x3 block-mean downsample to 33x33, then
a sliding 7x7 box blur with clamped edges, both rounding half up.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass

import numpy as np

from .errors import ConfigError, StateError
from .steering import SteeringCommand

RAW_SIZE = 99
PROC_SIZE = 33
FOV = 2.0 * math.pi / 3.0
CROP_COLS = 22
CROP_OFFSETS = {"left": 0, "middle": 5, "right": 11}
N_CROP_PIXELS = PROC_SIZE * CROP_COLS

# One speed unit equals one wheel revolution per second (2*pi*0.0613 m).
SPEED_UNIT_MPS = 0.3852

_FOCAL = (RAW_SIZE / 2.0) / math.tan(FOV / 2.0)
_WALL_HALF_HEIGHT = 0.5
_CEILING_SHADE = 234
_FLOOR_SHADE = 52

# Per-texture-id stripe frequencies (cycles per meter along the wall) and
# base phases; ids index modulo the table length.
_TEX_F1 = np.array([0.80, 1.35, 0.55, 1.90, 1.10, 2.60, 0.70, 1.60])
_TEX_F2 = np.array([2.30, 3.10, 1.70, 4.30, 2.90, 5.20, 3.70, 2.10])
_TEX_P0 = np.array([0.00, 1.30, 2.60, 0.70, 4.00, 2.20, 5.10, 3.30])


def wrap_angle(theta: float) -> float:
    """Normalize an angle to (-pi, pi]."""
    return math.pi - (math.pi - theta) % (2.0 * math.pi)


@dataclass(frozen=True)
class Pose:
    x: float
    y: float
    heading: float


@dataclass(frozen=True)
class Wall:
    x1: float
    y1: float
    x2: float
    y2: float
    texture: int = 0
    phase: float = 0.0


class Arena:
    """Immutable set of textured wall segments plus cached geometry arrays."""

    def __init__(self, walls):
        if not walls:
            raise ConfigError("arena needs at least one wall")
        self.walls = tuple(walls)
        self._p1 = np.array([[w.x1, w.y1] for w in self.walls])
        d = np.array([[w.x2 - w.x1, w.y2 - w.y1] for w in self.walls])
        self._d = d
        self._len = np.hypot(d[:, 0], d[:, 1])
        if np.any(self._len <= 0):
            raise ConfigError("degenerate wall segment of zero length")
        self._tex = np.array([w.texture for w in self.walls], dtype=np.int64)
        self._phase = np.array([w.phase for w in self.walls])
        xs = np.concatenate([self._p1[:, 0], self._p1[:, 0] + d[:, 0]])
        ys = np.concatenate([self._p1[:, 1], self._p1[:, 1] + d[:, 1]])
        self.bounds = (xs.min(), ys.min(), xs.max(), ys.max())

    def contains(self, x: float, y: float) -> bool:
        xmin, ymin, xmax, ymax = self.bounds
        return xmin < x < xmax and ymin < y < ymax


def _texture_values(tex_ids: np.ndarray, u: np.ndarray, phase: np.ndarray) -> np.ndarray:
    i = tex_ids % _TEX_F1.size
    v = (
        128.0
        + 72.0 * np.sin(2.0 * math.pi * _TEX_F1[i] * u + _TEX_P0[i] + phase)
        + 38.0 * np.sin(2.0 * math.pi * _TEX_F2[i] * u + 0.9 + 1.7 * phase)
    )
    return np.clip(v, 2.0, 253.0)


def render(arena: Arena, pose: Pose) -> np.ndarray:
    """Raycast one 99x99 grayscale frame from the given pose.

    Each column shows the nearest wall its ray hits: a vertical wall band whose
    height falls off with distance, sampling the wall's 1D stripe texture
    shaded by 1/(1+distance), with ceiling above and floor below.
    """
    if not arena.contains(pose.x, pose.y):
        raise StateError(f"camera pose ({pose.x:.3f}, {pose.y:.3f}) is outside the arena")
    cols = np.arange(RAW_SIZE)
    angles = pose.heading - FOV / 2.0 + (cols + 0.5) * (FOV / RAW_SIZE)
    dirs = np.stack([np.cos(angles), np.sin(angles)], axis=1)

    rel = arena._p1 - np.array([pose.x, pose.y])
    wd = arena._d
    denom = dirs[:, 0, None] * wd[None, :, 1] - dirs[:, 1, None] * wd[None, :, 0]
    cross_rw = rel[:, 0] * wd[:, 1] - rel[:, 1] * wd[:, 0]
    cross_rd = dirs[:, 0, None] * rel[None, :, 1] - dirs[:, 1, None] * rel[None, :, 0]
    with np.errstate(divide="ignore", invalid="ignore"):
        t = cross_rw[None, :] / denom
        s = -cross_rd / denom
    valid = (np.abs(denom) > 1e-12) & (t > 1e-9) & (s >= 0.0) & (s <= 1.0)
    t = np.where(valid, t, np.inf)
    hit = np.argmin(t, axis=1)
    dist = t[cols, hit]
    s_hit = s[cols, hit]

    u = s_hit * arena._len[hit]
    tex = _texture_values(arena._tex[hit], u, arena._phase[hit])
    shade = 1.0 / (1.0 + dist)
    wall_pix = np.clip(np.rint(tex * shade), 0, 255).astype(np.uint8)

    with np.errstate(divide="ignore"):
        half_h = np.where(np.isfinite(dist), _FOCAL * _WALL_HALF_HEIGHT / dist, 0.0)
    rows = np.arange(RAW_SIZE)[:, None]
    center = (RAW_SIZE - 1) / 2.0
    band = np.abs(rows - center) <= half_h[None, :]
    background = np.where(rows < center, _CEILING_SHADE, _FLOOR_SHADE).astype(np.uint8)
    return np.where(band, wall_pix[None, :], background)


@dataclass(frozen=True)
class ProcessedView:
    full: np.ndarray
    left: np.ndarray
    middle: np.ndarray
    right: np.ndarray


def _box_blur(img: np.ndarray, radius: int = 3) -> np.ndarray:
    # Sliding (2r+1)^2 mean with edge clamping, integer round-half-up.
    padded = np.pad(img.astype(np.int64), radius, mode="edge")
    csum = np.zeros((padded.shape[0] + 1, padded.shape[1] + 1), dtype=np.int64)
    csum[1:, 1:] = padded.cumsum(0).cumsum(1)
    w = 2 * radius + 1
    n = img.shape[0]
    sums = (csum[w : w + n, w : w + n] - csum[:n, w : w + n]
            - csum[w : w + n, :n] + csum[:n, :n])
    return ((2 * sums + w * w) // (2 * w * w)).astype(np.uint8)


def _tile_blur(img: np.ndarray, size: int = 7) -> np.ndarray:
    out = np.empty_like(img)
    n = img.shape[0]
    for r0 in range(0, n, size):
        for c0 in range(0, n, size):
            tile = img[r0 : r0 + size, c0 : c0 + size].astype(np.int64)
            m = tile.size
            out[r0 : r0 + size, c0 : c0 + size] = (2 * tile.sum() + m) // (2 * m)
    return out


def preprocess(raw: np.ndarray, blur: str = "sliding") -> ProcessedView:
    """Downsample, blur and crop one raw frame.

    3x3 block means reduce 99x99 to 33x33; a 7x7 box blur follows ("sliding"
    window with clamped edges by default, "tiled" averages disjoint boxes);
    the left/middle/right crops are 22-column windows at offsets 0/5/11,
    flattened row-major to 726 bytes each.
    """
    raw = np.asarray(raw)
    if raw.shape != (RAW_SIZE, RAW_SIZE):
        raise ValueError(f"raw frame must be {RAW_SIZE}x{RAW_SIZE}, got {raw.shape}")
    blocks = raw.astype(np.int64).reshape(PROC_SIZE, 3, PROC_SIZE, 3).sum(axis=(1, 3))
    small = ((2 * blocks + 9) // 18).astype(np.uint8)
    if blur == "sliding":
        full = _box_blur(small)
    elif blur == "tiled":
        full = _tile_blur(small)
    else:
        raise ValueError(f"unknown blur mode {blur!r}")
    crops = {
        name: full[:, off : off + CROP_COLS].reshape(-1).copy()
        for name, off in CROP_OFFSETS.items()
    }
    return ProcessedView(full=full, **crops)


def step(pose: Pose, cmd: SteeringCommand, dt: float) -> Pose:
    """One Euler update of the unicycle: rotate first, then translate.

    Speeds are given in robot speed units and converted to meters per second
    here (one unit = 0.3852 m/s), so configs carry the plain unit numbers.
    """
    if not dt > 0:
        raise ValueError(f"dt must be positive, got {dt}")
    heading = wrap_angle(pose.heading + cmd.omega * dt)
    v = cmd.v * SPEED_UNIT_MPS
    return Pose(
        x=pose.x + v * math.cos(heading) * dt,
        y=pose.y + v * math.sin(heading) * dt,
        heading=heading,
    )


def point_segment_distance(px, py, x1, y1, x2, y2) -> float:
    dx, dy = x2 - x1, y2 - y1
    t = ((px - x1) * dx + (py - y1) * dy) / (dx * dx + dy * dy)
    t = min(1.0, max(0.0, t))
    return math.hypot(px - (x1 + t * dx), py - (y1 + t * dy))


def check_collision(arena: Arena, pose: Pose, radius: float) -> bool:
    """True iff the robot disc touches any wall (closed: contact counts)."""
    if not radius > 0:
        raise ValueError(f"radius must be positive, got {radius}")
    for w in arena.walls:
        if point_segment_distance(pose.x, pose.y, w.x1, w.y1, w.x2, w.y2) <= radius:
            return True
    return False


def save_arena(arena: Arena, path):
    doc = {"walls": [
        {"x1": w.x1, "y1": w.y1, "x2": w.x2, "y2": w.y2,
         "texture": w.texture, "phase": w.phase}
        for w in arena.walls
    ]}
    with open(path, "w") as fh:
        json.dump(doc, fh, indent=2)
        fh.write("\n")


def load_arena(path) -> Arena:
    try:
        with open(path) as fh:
            doc = json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise ConfigError(f"cannot read arena file {path}: {exc}") from exc
    try:
        walls = [Wall(float(w["x1"]), float(w["y1"]), float(w["x2"]), float(w["y2"]),
                      int(w.get("texture", 0)), float(w.get("phase", 0.0)))
                 for w in doc["walls"]]
    except (KeyError, TypeError, ValueError) as exc:
        raise ConfigError(f"malformed arena file {path}: {exc}") from exc
    return Arena(walls)


def reference_arena() -> Arena:
    """The bundled arena: a rectangular room with one interior obstacle wall
    blocking the straight line between the reference route's start and end."""
    from importlib.resources import files

    with files("sparsenav.data").joinpath("reference_arena.json").open() as fh:
        doc = json.load(fh)
    return Arena([Wall(w["x1"], w["y1"], w["x2"], w["y2"], w["texture"], w["phase"])
                  for w in doc["walls"]])
