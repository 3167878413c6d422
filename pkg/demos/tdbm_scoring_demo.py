"""Walk through TDBM scoring on two hand-built scenes.

A weaving speeder and a relaxed follower get scored against the fixed 6x6
style matrix; a third, neighbor-free scene shows the Threatening override.
"""

import numpy as np

from style_lens import (
    Scene,
    TrajectorySample,
    build_tdbm_features,
    tdbm_classify,
    tdbm_score,
)
from style_lens.tdbm import STYLE_LABELS


def make_scene(scene_id, focal_x, focal_y, nbr_x=None):
    t = 0.1 * np.arange(len(focal_x))
    agents = [TrajectorySample("focal", t, np.column_stack([focal_x, focal_y]))]
    if nbr_x is not None:
        agents.append(
            TrajectorySample("lead", t, np.column_stack([nbr_x, np.zeros_like(nbr_x)]))
        )
    return Scene(scene_id=scene_id, focal_agent_id="focal", agents=tuple(agents))


def describe(scene):
    x = build_tdbm_features(scene)
    scores = tdbm_score(x)
    cls = tdbm_classify(scores, x.had_neighbors)
    print(f"\n--- {scene.scene_id} ---")
    print(f"  s_center={x.s_center:.3f}  v_nei={x.v_nei:.3f}  "
          f"s_front={x.s_front:.3f}  v_avg={x.v_avg:.3f}  j_l={x.j_l:.3f}  "
          f"neighbors={x.had_neighbors}")
    for label, s in zip(STYLE_LABELS, scores.scores):
        marker = " <-- argmax" if label == cls.label else ""
        print(f"  {label:>11}: {s:+.3f}{marker}")
    print(f"  class: {cls.label}")


def main():
    n = 40
    t = 0.1 * np.arange(n)

    # weaving speeder: 10 m/s faster than crawling traffic, oscillating
    # laterally while closing the gap
    weave = 0.8 * np.sin(2.5 * t)
    speeder = make_scene(
        "weaving-speeder", 14.0 * t, weave, nbr_x=4.0 * t + 27.0
    )

    # relaxed follower: matches the lead's speed at a comfortable gap
    follower = make_scene(
        "relaxed-follower", 14.0 * t, np.zeros(n), nbr_x=14.0 * t + 25.0
    )

    # empty road: no neighbor in range, relative features are meaningless
    loner = make_scene("empty-road", 14.0 * t, np.zeros(n))

    for scene in (speeder, follower, loner):
        describe(scene)


if __name__ == "__main__":
    main()
