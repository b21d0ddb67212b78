"""Trial protocol: scripted training, autonomous test, scoring, sweeps.

A trial trains by replaying a fixed route script and storing the encoded
middle visual field every snapshot period, then hands control to the model:
at every tick the left and right fields are scored for novelty and the
normalised difference sets the angular speed. A trial succeeds when the test
trajectory ends within ``success_radius`` meters of where training ended.
"""

from __future__ import annotations

import json
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, replace

import numpy as np

from .encoders import Encoder, EncoderConfig
from .errors import ConfigError, StateError, TrainingCollisionError
from .memory import MemoryStore, evaluate_novelty, store_for, store_item
from .simworld import (
    Arena,
    Pose,
    check_collision,
    point_segment_distance,
    preprocess,
    render,
    step,
)
from .steering import SteeringCommand, SteeringParams, compute_turn


@dataclass(frozen=True)
class Segment:
    """One scripted command: hold (v, omega) for ``duration`` seconds.

    ``v=None`` means drive at the trial's training speed.
    """

    duration: float
    omega: float = 0.0
    v: float | None = None


@dataclass(frozen=True)
class RouteScript:
    start: Pose
    segments: tuple

    def __post_init__(self):
        if len(self.segments) == 0:
            raise ConfigError("route script has no segments")
        for seg in self.segments:
            if not seg.duration > 0:
                raise ConfigError(f"segment duration must be positive, got {seg.duration}")

    @property
    def duration(self) -> float:
        return float(sum(seg.duration for seg in self.segments))


@dataclass(frozen=True)
class TrialConfig:
    encoder: EncoderConfig
    steering: SteeringParams = SteeringParams()
    v_train: float = 0.5
    snapshot_period: float = 0.5
    n_snapshots: int = 25
    success_radius: float = 2.0
    max_test_time: float | None = None
    control_dt: float = 0.05
    robot_radius: float = 0.2

    def __post_init__(self):
        if self.n_snapshots < 1:
            raise ConfigError("n_snapshots must be >= 1")
        if not self.control_dt > 0:
            raise ConfigError("control_dt must be positive")
        ticks = self.snapshot_period / self.control_dt
        if abs(ticks - round(ticks)) > 1e-9 or round(ticks) < 1:
            raise ConfigError("snapshot_period must be a whole number of control ticks")

    @property
    def snapshot_ticks(self) -> int:
        return int(round(self.snapshot_period / self.control_dt))

    def test_duration(self, script: RouteScript) -> float:
        if self.max_test_time is not None:
            return self.max_test_time
        return script.duration * (self.v_train / self.steering.v_test) * 1.5


@dataclass
class TrialRecord:
    """Everything one train+test run produced.

    Trajectories are (t, x, y, heading) rows; the novelty trace holds
    (t, d_left, d_right, omega) per control tick of the test session.
    """

    encoder: EncoderConfig
    train_trajectory: np.ndarray
    test_trajectory: np.ndarray
    novelty_trace: np.ndarray
    final_distance: float
    success: bool
    collided: bool

    def to_dict(self) -> dict:
        return {
            "model": self.encoder.model.value,
            "n_pn": self.encoder.n_pn,
            "n_kc": self.encoder.n_kc,
            "kappa": self.encoder.kappa,
            "theta": self.encoder.theta,
            "seed": self.encoder.seed,
            "fixed_fanout": self.encoder.fixed_fanout,
            "final_distance": self.final_distance,
            "success": self.success,
            "collided": self.collided,
            "n_train_poses": int(self.train_trajectory.shape[0]),
            "n_test_poses": int(self.test_trajectory.shape[0]),
            "train_end": [float(self.train_trajectory[-1, 1]), float(self.train_trajectory[-1, 2])],
            "test_end": [float(self.test_trajectory[-1, 1]), float(self.test_trajectory[-1, 2])],
        }


def _segment_ticks(script: RouteScript, dt: float):
    for seg in script.segments:
        n = int(round(seg.duration / dt))
        if n < 1 or abs(n * dt - seg.duration) > 1e-9:
            raise ConfigError(
                f"segment duration {seg.duration} is not a whole number of {dt}s ticks")
        yield seg, n


def run_training(arena: Arena, script: RouteScript, cfg: TrialConfig, encoder: Encoder):
    """Replay the script and store the encoded middle field every snapshot tick.

    Returns (store, train_trajectory). Training must be collision-free; a hit
    raises TrainingCollisionError because the route, not the model, is at fault.
    """
    store = store_for(encoder.cfg)
    pose = script.start
    rows = [(0.0, pose.x, pose.y, pose.heading)]
    tick = 0
    for seg, n in _segment_ticks(script, cfg.control_dt):
        v = cfg.v_train if seg.v is None else seg.v
        cmd = SteeringCommand(v=v, omega=seg.omega)
        for _ in range(n):
            pose = step(pose, cmd, cfg.control_dt)
            tick += 1
            t = tick * cfg.control_dt
            rows.append((t, pose.x, pose.y, pose.heading))
            if check_collision(arena, pose, cfg.robot_radius):
                raise TrainingCollisionError(
                    f"training drive hit a wall at t={t:.2f}s ({pose.x:.2f}, {pose.y:.2f})")
            if tick % cfg.snapshot_ticks == 0 and len(store) < cfg.n_snapshots:
                view = preprocess(render(arena, pose))
                store_item(store, encoder.encode(view.middle))
    if len(store) != cfg.n_snapshots:
        raise ConfigError(
            f"route yields {len(store)} snapshots, config wants {cfg.n_snapshots}")
    return store, np.array(rows)


def run_test(arena: Arena, script: RouteScript, store: MemoryStore, cfg: TrialConfig,
             encoder: Encoder, train_trajectory: np.ndarray,
             start_pose: Pose | None = None) -> TrialRecord:
    """Run the autonomous session and score it against the training endpoint.

    Ends at the test-time cap or at the first collision, which freezes the
    final position where contact happened. ``start_pose`` overrides the
    script's start (used by the offset-recovery check).
    """
    if len(store) == 0:
        raise StateError("cannot run a test session with an empty memory store")
    store.freeze()
    pose = script.start if start_pose is None else start_pose
    dt = cfg.control_dt
    n_ticks = int(cfg.test_duration(script) / dt)
    traj = [(0.0, pose.x, pose.y, pose.heading)]
    trace = []
    collided = False
    for tick in range(n_ticks):
        view = preprocess(render(arena, pose))
        d_left = evaluate_novelty(store, view.left, encoder).d
        d_right = evaluate_novelty(store, view.right, encoder).d
        cmd = compute_turn(d_left, d_right, cfg.steering)
        trace.append((tick * dt, d_left, d_right, cmd.omega))
        pose = step(pose, cmd, dt)
        traj.append(((tick + 1) * dt, pose.x, pose.y, pose.heading))
        if check_collision(arena, pose, cfg.robot_radius):
            collided = True
            break
    test_traj = np.array(traj)
    end_train = train_trajectory[-1, 1:3]
    end_test = test_traj[-1, 1:3]
    final = float(np.hypot(*(end_train - end_test)))
    return TrialRecord(
        encoder=encoder.cfg,
        train_trajectory=train_trajectory,
        test_trajectory=test_traj,
        novelty_trace=np.array(trace),
        final_distance=final,
        success=final < cfg.success_radius,
        collided=collided,
    )


def run_trial(arena: Arena, script: RouteScript, cfg: TrialConfig,
              encoder: Encoder | None = None) -> TrialRecord:
    """Train then test with a fresh store; the standard one-trial entry point."""
    if encoder is None:
        encoder = Encoder(cfg.encoder)
    store, train_traj = run_training(arena, script, cfg, encoder)
    return run_test(arena, script, store, cfg, encoder, train_traj)


def trial_seed(base_seed: int, config_index: int, trial_index: int) -> int:
    """Independent per-trial seed; a pure function of position, not run order."""
    ss = np.random.SeedSequence([int(base_seed), int(config_index), int(trial_index)])
    return int(ss.generate_state(1, np.uint64)[0])


@dataclass
class SweepRow:
    encoder: EncoderConfig
    n_trials: int
    success_rate: float
    mean_final_distance: float
    records: list = field(default_factory=list)


def _sweep_task(args):
    arena, script, cfg = args
    return run_trial(arena, script, cfg)


def run_sweep(arena: Arena, script: RouteScript, base_cfg: TrialConfig,
              grid, n_trials: int, seed: int = 0, jobs: int = 1) -> list:
    """Run ``n_trials`` independent trials per encoder config.

    Every trial draws a fresh projection matrix from a seed derived from
    (seed, config index, trial index), so results are independent of
    execution order and of the worker count.
    """
    grid = list(grid)
    if not grid:
        raise ValueError("sweep grid is empty")
    if n_trials < 1:
        raise ValueError(f"n_trials must be >= 1, got {n_trials}")
    tasks = []
    for ci, enc_cfg in enumerate(grid):
        for ti in range(n_trials):
            cfg = replace(base_cfg, encoder=replace(enc_cfg, seed=trial_seed(seed, ci, ti)))
            tasks.append((arena, script, cfg))
    if jobs > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            records = list(pool.map(_sweep_task, tasks, chunksize=1))
    else:
        records = [_sweep_task(t) for t in tasks]
    rows = []
    for ci, enc_cfg in enumerate(grid):
        recs = records[ci * n_trials : (ci + 1) * n_trials]
        rows.append(SweepRow(
            encoder=enc_cfg,
            n_trials=n_trials,
            success_rate=sum(r.success for r in recs) / n_trials,
            mean_final_distance=float(np.mean([r.final_distance for r in recs])),
            records=recs,
        ))
    return rows


def distance_to_trajectory(x: float, y: float, trajectory: np.ndarray) -> float:
    """Distance from a point to the polyline through a trajectory's positions."""
    pts = trajectory[:, 1:3]
    best = math.inf
    for (x1, y1), (x2, y2) in zip(pts[:-1], pts[1:]):
        best = min(best, point_segment_distance(x, y, x1, y1, x2, y2))
    return best


def save_route(script: RouteScript, path):
    doc = {
        "start": {"x": script.start.x, "y": script.start.y, "heading": script.start.heading},
        "segments": [
            {"duration": s.duration, "omega": s.omega, "v": s.v} for s in script.segments
        ],
    }
    with open(path, "w") as fh:
        json.dump(doc, fh, indent=2)
        fh.write("\n")


def load_route(path) -> RouteScript:
    try:
        with open(path) as fh:
            doc = json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise ConfigError(f"cannot read route file {path}: {exc}") from exc
    try:
        start = Pose(float(doc["start"]["x"]), float(doc["start"]["y"]),
                     float(doc["start"]["heading"]))
        segments = tuple(
            Segment(duration=float(s["duration"]), omega=float(s.get("omega", 0.0)),
                    v=None if s.get("v") is None else float(s["v"]))
            for s in doc["segments"]
        )
    except (KeyError, TypeError, ValueError) as exc:
        raise ConfigError(f"malformed route file {path}: {exc}") from exc
    return RouteScript(start=start, segments=segments)


def reference_route() -> RouteScript:
    """The bundled 12.5 s training drive: straight, left arc, straight, right arc."""
    from importlib.resources import files

    with files("sparsenav.data").joinpath("reference_route.json").open() as fh:
        doc = json.load(fh)
    start = Pose(doc["start"]["x"], doc["start"]["y"], doc["start"]["heading"])
    segments = tuple(
        Segment(duration=s["duration"], omega=s["omega"],
                v=None if s.get("v") is None else s["v"])
        for s in doc["segments"]
    )
    return RouteScript(start=start, segments=segments)
