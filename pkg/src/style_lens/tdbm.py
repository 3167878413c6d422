"""Trajectory-to-driver-behavior scoring: neighbor-relative feature
construction, the fixed 6x6 linear map, and ordinal classification with the
no-neighbor override."""

from __future__ import annotations

import enum
import json
from dataclasses import dataclass, asdict

import numpy as np

from .traj import Scene, TrajectorySample, TrajectoryError, derivatives, resample_uniform

# Fixed mapping matrix: rows are style classes (aggressive ... timid),
# columns are (s_center, v_nei, s_front, v_avg, j_l, bias).
B_MATRIX = np.array(
    [
        [1.63, 4.04, -0.46, -0.82, 0.88, -2.58],
        [1.58, 3.08, -0.45, 0.02, -0.10, -1.67],
        [1.35, 4.08, -0.58, -0.43, -0.28, -1.99],
        [-1.51, -3.17, 1.06, 0.51, -0.51, 1.39],
        [-2.47, -2.60, 1.43, 0.98, -0.82, 1.27],
        [-3.59, -2.19, 1.75, 1.73, -0.30, 0.61],
    ]
)


class StyleClass(enum.IntEnum):
    """Six ordinal style bins, most to least aggressive."""

    AGGRESSIVE = 0
    RECKLESS = 1
    THREATENING = 2
    CAREFUL = 3
    CAUTIOUS = 4
    TIMID = 5

    @property
    def label(self) -> str:
        return self.name.lower()


STYLE_LABELS = tuple(c.label for c in StyleClass)


@dataclass(frozen=True)
class TdbmConfig:
    """Normalization constants and geometry for TDBM feature construction.

    The reference values make the five features dimensionless; they are
    echoed into report headers so classifications are reproducible.
    """

    v_ref: float = 15.0        # m/s
    d_ref: float = 50.0        # m, front-gap normalizer
    w_ref: float = 1.5         # m, lateral-deviation normalizer
    j_ref: float = 2.0         # m/s^3
    neighbor_radius: float = 30.0   # m
    cone_half_angle: float = np.pi / 6.0  # rad, leading-vehicle cone
    smooth_window: float = 2.0      # s, moving-average window for path smoothing
    resample_dt: float = 0.1        # s, used only when input sampling is non-uniform

    def to_dict(self) -> dict:
        return asdict(self)

    @classmethod
    def from_dict(cls, d: dict) -> "TdbmConfig":
        return cls(**d)

    @classmethod
    def load(cls, path) -> "TdbmConfig":
        with open(path, "r", encoding="utf-8") as fh:
            return cls.from_dict(json.load(fh))


@dataclass(frozen=True)
class TdbmFeatureVector:
    s_center: float
    v_nei: float
    s_front: float
    v_avg: float
    j_l: float
    had_neighbors: bool

    def as_array(self) -> np.ndarray:
        """Feature column including the trailing bias 1."""
        return np.array(
            [self.s_center, self.v_nei, self.s_front, self.v_avg, self.j_l, 1.0]
        )


@dataclass(frozen=True)
class StyleScores:
    scores: np.ndarray  # length 6, ordered aggressive ... timid

    def __post_init__(self):
        s = np.asarray(self.scores, dtype=float)
        object.__setattr__(self, "scores", s)
        if s.shape != (6,):
            raise ValueError(f"expected 6 scores, got shape {s.shape}")
        if not np.all(np.isfinite(s)):
            raise ValueError("non-finite scores")


def _uniformize(traj: TrajectorySample, dt: float) -> TrajectorySample:
    steps = np.diff(traj.timestamps)
    if len(steps) and np.ptp(steps) <= 1e-9:
        return traj
    return resample_uniform(traj, dt)


def _speed_on_grid(positions: np.ndarray, dt: float) -> np.ndarray:
    vel = np.empty_like(positions)
    vel[1:-1] = (positions[2:] - positions[:-2]) / (2.0 * dt)
    vel[0] = (positions[1] - positions[0]) / dt
    vel[-1] = (positions[-1] - positions[-2]) / dt
    return np.hypot(vel[:, 0], vel[:, 1])


def _headings(focal: TrajectorySample, dt: float) -> np.ndarray:
    if focal.heading is not None:
        return np.asarray(focal.heading, dtype=float)
    vel = np.empty_like(focal.positions)
    vel[1:-1] = (focal.positions[2:] - focal.positions[:-2]) / (2.0 * dt)
    vel[0] = (focal.positions[1] - focal.positions[0]) / dt
    vel[-1] = (focal.positions[-1] - focal.positions[-2]) / dt
    h = np.arctan2(vel[:, 1], vel[:, 0])
    # hold the previous heading through near-zero-speed samples
    speed = np.hypot(vel[:, 0], vel[:, 1])
    for i in range(1, len(h)):
        if speed[i] < 1e-6:
            h[i] = h[i - 1]
    return h


def _smooth_path(positions: np.ndarray, window: int) -> np.ndarray:
    """Centered moving average with shrinking windows near the ends."""
    n = len(positions)
    half = window // 2
    out = np.empty_like(positions)
    for i in range(n):
        lo, hi = max(0, i - half), min(n, i + half + 1)
        out[i] = positions[lo:hi].mean(axis=0)
    return out


def build_tdbm_features(scene: Scene, config: TdbmConfig = TdbmConfig()) -> TdbmFeatureVector:
    """Construct the five normalized kinematic features for the focal agent."""
    focal = _uniformize(scene.focal, config.resample_dt)
    if len(focal) < 4:
        raise TrajectoryError(
            f"scene {scene.scene_id!r}: focal agent needs >= 4 samples, has {len(focal)}"
        )
    dt = focal.dt
    t = focal.timestamps
    n = len(t)
    speed, _, jerk = derivatives(focal)

    # align neighbors onto the focal grid; absent outside their own span
    nbr_pos = []
    nbr_speed = []
    nbr_valid = []
    for nbr in scene.neighbors:
        if len(nbr) < 2:
            continue
        px = np.interp(t, nbr.timestamps, nbr.positions[:, 0])
        py = np.interp(t, nbr.timestamps, nbr.positions[:, 1])
        pos = np.column_stack([px, py])
        nbr_pos.append(pos)
        nbr_speed.append(_speed_on_grid(pos, dt))
        nbr_valid.append((t >= nbr.timestamps[0] - 1e-9) & (t <= nbr.timestamps[-1] + 1e-9))

    headings = _headings(focal, dt)
    rel_speed_terms = np.zeros(n)
    gap_terms = np.ones(n)
    had_neighbors = False
    for i in range(n):
        in_range_speeds = []
        best_gap = None
        for pos, spd, valid in zip(nbr_pos, nbr_speed, nbr_valid):
            if not valid[i]:
                continue
            delta = pos[i] - focal.positions[i]
            dist = float(np.hypot(delta[0], delta[1]))
            if dist <= config.neighbor_radius:
                in_range_speeds.append(spd[i])
                had_neighbors = True
            if dist > 1e-9:
                bearing = np.arctan2(delta[1], delta[0])
                angle = abs((bearing - headings[i] + np.pi) % (2 * np.pi) - np.pi)
                if angle <= config.cone_half_angle:
                    if best_gap is None or dist < best_gap:
                        best_gap = dist
        if in_range_speeds:
            rel_speed_terms[i] = (speed[i] - float(np.mean(in_range_speeds))) / config.v_ref
        if best_gap is not None:
            gap_terms[i] = min(max(best_gap / config.d_ref, 0.0), 1.0)

    window = max(1, int(round(config.smooth_window / dt)))
    if window % 2 == 0:
        window += 1
    smoothed = _smooth_path(focal.positions, window)
    dev = np.hypot(*(focal.positions - smoothed).T)
    # only samples with a full smoothing window count; the shrinking edge
    # windows lag the path and would charge straight motion for its speed
    half = window // 2
    core = dev[half : n - half] if n > 2 * half else dev
    s_center = float(np.sqrt(np.mean(core * core))) / config.w_ref

    v_nei = float(np.mean(rel_speed_terms)) if had_neighbors else 0.0
    s_front = float(np.mean(gap_terms)) if had_neighbors else 1.0
    return TdbmFeatureVector(
        s_center=s_center,
        v_nei=v_nei,
        s_front=s_front,
        v_avg=float(np.mean(speed)) / config.v_ref,
        j_l=float(np.mean(np.abs(jerk[1:-1]))) / config.j_ref,
        had_neighbors=had_neighbors,
    )


def tdbm_score(x: TdbmFeatureVector) -> StyleScores:
    """Score the six style classes: s = B . (features, 1)."""
    col = x.as_array()
    if not np.all(np.isfinite(col)):
        raise ValueError("non-finite feature vector")
    return StyleScores(scores=B_MATRIX @ col)


def tdbm_classify(scores: StyleScores, had_neighbors: bool) -> StyleClass:
    """Argmax style class, ties toward the more aggressive (lower ordinal).

    Without neighbors the relative-speed features are meaningless and the
    class is overridden to THREATENING.
    """
    if not had_neighbors:
        return StyleClass.THREATENING
    return StyleClass(int(np.argmax(scores.scores)))
