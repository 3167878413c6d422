import numpy as np
import pytest

from style_lens import Scene, TrajectorySample


def make_traj(agent_id, xs, ys=None, dt=1.0, t0=0.0, heading=None):
    xs = np.asarray(xs, dtype=float)
    ys = np.zeros_like(xs) if ys is None else np.asarray(ys, dtype=float)
    t = t0 + dt * np.arange(len(xs))
    return TrajectorySample(
        agent_id=agent_id,
        timestamps=t,
        positions=np.column_stack([xs, ys]),
        heading=heading,
    )


def make_scene(scene_id, focal, neighbors=(), **kwargs):
    return Scene(
        scene_id=scene_id,
        focal_agent_id=focal.agent_id,
        agents=(focal, *neighbors),
        **kwargs,
    )


@pytest.fixture
def straight_scene():
    """Single agent moving at 5 m/s along x."""
    return make_scene("s0", make_traj("focal", 5.0 * np.arange(10), dt=1.0))
