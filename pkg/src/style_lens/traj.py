"""Trajectory and scene data model, interchange I/O, resampling, derivatives."""

from __future__ import annotations

import csv
import json
import math
from dataclasses import dataclass, field, replace
from typing import Optional, Sequence

import numpy as np

VALID_SPLITS = ("train", "val", "test")


class TrajectoryError(ValueError):
    """Raised for malformed trajectory or scene data."""


@dataclass(frozen=True)
class TrajectorySample:
    """Timestamped 2-D track of a single agent.

    Timestamps are seconds, strictly increasing; positions are meters.
    Heading (radians) is optional and carried through resampling.
    """

    agent_id: str
    timestamps: np.ndarray
    positions: np.ndarray
    heading: Optional[np.ndarray] = None

    def __post_init__(self):
        t = np.asarray(self.timestamps, dtype=float)
        p = np.asarray(self.positions, dtype=float)
        object.__setattr__(self, "timestamps", t)
        object.__setattr__(self, "positions", p)
        if p.ndim != 2 or p.shape[1] != 2:
            raise TrajectoryError(f"agent {self.agent_id!r}: positions must be (n, 2)")
        if t.ndim != 1 or len(t) != len(p):
            raise TrajectoryError(
                f"agent {self.agent_id!r}: timestamps and positions length mismatch"
            )
        if len(t) >= 2 and not np.all(np.diff(t) > 0):
            raise TrajectoryError(
                f"agent {self.agent_id!r}: timestamps not strictly increasing"
            )
        if not (np.all(np.isfinite(t)) and np.all(np.isfinite(p))):
            raise TrajectoryError(f"agent {self.agent_id!r}: non-finite coordinates")
        if self.heading is not None:
            h = np.asarray(self.heading, dtype=float)
            object.__setattr__(self, "heading", h)
            if len(h) != len(t):
                raise TrajectoryError(f"agent {self.agent_id!r}: heading length mismatch")

    def __len__(self) -> int:
        return len(self.timestamps)

    @property
    def dt(self) -> float:
        """Inter-sample spacing; raises if not uniform to 1e-9 s."""
        steps = np.diff(self.timestamps)
        if len(steps) == 0:
            raise TrajectoryError("trajectory has a single sample")
        if np.ptp(steps) > 1e-9:
            raise TrajectoryError(f"non-uniform sampling (spread {np.ptp(steps):.3e} s)")
        return float(steps[0])


@dataclass(frozen=True)
class Scene:
    """One traffic scene: a focal agent plus any neighbors, with metadata."""

    scene_id: str
    focal_agent_id: str
    agents: tuple
    split: str = "train"
    highway: Optional[bool] = None
    mdsi_label: Optional[str] = None

    def __post_init__(self):
        object.__setattr__(self, "agents", tuple(self.agents))
        if self.split not in VALID_SPLITS:
            raise TrajectoryError(f"scene {self.scene_id!r}: bad split {self.split!r}")
        ids = [a.agent_id for a in self.agents]
        if len(set(ids)) != len(ids):
            raise TrajectoryError(f"scene {self.scene_id!r}: duplicate agent_id")
        if sum(1 for a in self.agents if a.agent_id == self.focal_agent_id) != 1:
            raise TrajectoryError(
                f"scene {self.scene_id!r}: focal agent {self.focal_agent_id!r} "
                "not present exactly once"
            )

    @property
    def focal(self) -> TrajectorySample:
        for a in self.agents:
            if a.agent_id == self.focal_agent_id:
                return a
        raise TrajectoryError("focal agent missing")  # unreachable after validation

    @property
    def neighbors(self) -> list:
        return [a for a in self.agents if a.agent_id != self.focal_agent_id]


def _agent_from_record(rec: dict) -> TrajectorySample:
    heading = rec.get("heading")
    return TrajectorySample(
        agent_id=rec["agent_id"],
        timestamps=np.asarray(rec["t"], dtype=float),
        positions=np.column_stack([
            np.asarray(rec["x"], dtype=float),
            np.asarray(rec["y"], dtype=float),
        ]) if rec["x"] else np.zeros((0, 2)),
        heading=None if heading is None else np.asarray(heading, dtype=float),
    )


def scene_to_record(scene: Scene) -> dict:
    return {
        "scene_id": scene.scene_id,
        "focal_agent_id": scene.focal_agent_id,
        "split": scene.split,
        "highway": scene.highway,
        "mdsi_label": scene.mdsi_label,
        "agents": [
            {
                "agent_id": a.agent_id,
                "t": [float(v) for v in a.timestamps],
                "x": [float(v) for v in a.positions[:, 0]],
                "y": [float(v) for v in a.positions[:, 1]],
                "heading": None if a.heading is None else [float(v) for v in a.heading],
            }
            for a in scene.agents
        ],
    }


def scene_from_record(rec: dict) -> Scene:
    return Scene(
        scene_id=rec["scene_id"],
        focal_agent_id=rec["focal_agent_id"],
        agents=tuple(_agent_from_record(a) for a in rec["agents"]),
        split=rec.get("split", "train"),
        highway=rec.get("highway"),
        mdsi_label=rec.get("mdsi_label"),
    )


def load_scenes(path, format: str = "jsonl") -> list:
    """Load scenes from the interchange format; see save_scenes for the schema.

    Malformed records raise TrajectoryError naming the offending line.
    """
    if format == "jsonl":
        return _load_jsonl(path)
    if format == "csv":
        return _load_csv(path)
    raise ValueError(f"unknown format {format!r}")


def _load_jsonl(path) -> list:
    scenes = []
    with open(path, "r", encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            if not line.strip():
                continue
            try:
                rec = json.loads(line)
                scenes.append(scene_from_record(rec))
            except (KeyError, TypeError, json.JSONDecodeError, TrajectoryError) as exc:
                raise TrajectoryError(f"{path}, line {lineno}: {exc}") from exc
    return scenes


def _load_csv(path, meta_path=None) -> list:
    """Long-format CSV: scene_id,agent_id,t,x,y plus an optional sidecar
    metadata CSV (<path>.meta.csv) with scene_id,focal_agent_id,split,highway,mdsi_label."""
    rows = {}
    order = []
    with open(path, "r", encoding="utf-8", newline="") as fh:
        reader = csv.DictReader(fh)
        for lineno, rec in enumerate(reader, start=2):
            try:
                sid, aid = rec["scene_id"], rec["agent_id"]
                t, x, y = float(rec["t"]), float(rec["x"]), float(rec["y"])
            except (KeyError, TypeError, ValueError) as exc:
                raise TrajectoryError(f"{path}, line {lineno}: {exc}") from exc
            key = (sid, aid)
            if key not in rows:
                order.append(key)
            rows.setdefault(key, []).append((t, x, y))

    meta = {}
    mp = meta_path or (str(path) + ".meta.csv")
    try:
        with open(mp, "r", encoding="utf-8", newline="") as fh:
            for rec in csv.DictReader(fh):
                meta[rec["scene_id"]] = rec
    except FileNotFoundError:
        pass

    scene_ids = []
    per_scene = {}
    for (sid, aid) in order:
        if sid not in per_scene:
            per_scene[sid] = []
            scene_ids.append(sid)
        samples = sorted(rows[(sid, aid)])
        arr = np.asarray(samples, dtype=float)
        per_scene[sid].append(
            TrajectorySample(agent_id=aid, timestamps=arr[:, 0], positions=arr[:, 1:3])
        )

    scenes = []
    for sid in scene_ids:
        m = meta.get(sid, {})
        highway = m.get("highway")
        if highway in ("", None):
            highway = None
        else:
            highway = highway in ("true", "True", "1")
        mdsi = m.get("mdsi_label") or None
        scenes.append(
            Scene(
                scene_id=sid,
                focal_agent_id=m.get("focal_agent_id", per_scene[sid][0].agent_id),
                agents=tuple(per_scene[sid]),
                split=m.get("split", "train"),
                highway=highway,
                mdsi_label=mdsi,
            )
        )
    return scenes


def save_scenes(scenes: Sequence[Scene], path) -> None:
    """Write scenes as interchange JSONL, one scene per line."""
    with open(path, "w", encoding="utf-8") as fh:
        for scene in scenes:
            fh.write(json.dumps(scene_to_record(scene)) + "\n")


def resample_uniform(traj: TrajectorySample, dt: float) -> TrajectorySample:
    """Linearly resample to a uniform grid t0, t0+dt, ... up to the last timestamp."""
    if dt <= 0:
        raise TrajectoryError(f"dt must be positive, got {dt}")
    if len(traj) < 2:
        raise TrajectoryError("need at least 2 samples to resample")
    t = traj.timestamps
    # identity short-circuit keeps already-uniform inputs bit-identical
    if len(t) >= 2:
        steps = np.diff(t)
        if abs(np.ptp(steps)) <= 1e-12 and abs(steps[0] - dt) <= 1e-12:
            return traj
    n = int(math.floor((t[-1] - t[0]) / dt + 1e-9)) + 1
    new_t = t[0] + dt * np.arange(n)
    x = np.interp(new_t, t, traj.positions[:, 0])
    y = np.interp(new_t, t, traj.positions[:, 1])
    heading = None
    if traj.heading is not None:
        heading = np.interp(new_t, t, traj.heading)
    return TrajectorySample(
        agent_id=traj.agent_id,
        timestamps=new_t,
        positions=np.column_stack([x, y]),
        heading=heading,
    )


def derivatives(traj: TrajectorySample):
    """Speed / acceleration / jerk signals via central differences.

    Speed is the norm of the centrally-differenced velocity; accel and jerk
    are successive central differences of the scalar speed (longitudinal).
    Endpoints use one-sided first-order differences so all three outputs
    have the same length as the trajectory.
    """
    if len(traj) < 4:
        raise TrajectoryError(f"need >= 4 samples for derivatives, got {len(traj)}")
    dt = traj.dt  # raises on non-uniform spacing
    vel = _central_diff_vec(traj.positions, dt)
    speed = np.hypot(vel[:, 0], vel[:, 1])
    accel = _central_diff(speed, dt)
    jerk = _central_diff(accel, dt)
    return speed, accel, jerk


def _central_diff(y: np.ndarray, dt: float) -> np.ndarray:
    out = np.empty_like(y)
    out[1:-1] = (y[2:] - y[:-2]) / (2.0 * dt)
    out[0] = (y[1] - y[0]) / dt
    out[-1] = (y[-1] - y[-2]) / dt
    return out


def _central_diff_vec(y: np.ndarray, dt: float) -> np.ndarray:
    out = np.empty_like(y)
    out[1:-1] = (y[2:] - y[:-2]) / (2.0 * dt)
    out[0] = (y[1] - y[0]) / dt
    out[-1] = (y[-1] - y[-2]) / dt
    return out
