from dataclasses import replace

import numpy as np
import pytest

from style_lens import derivatives, gen_cruise, gen_yellow_light
from style_lens.kinematics import extract_features
from style_lens.stats import welch_t_test
from style_lens.synth import DEFAULT_PARAMS, DT, StyleParams


def quiet_params():
    return {name: replace(p, noise_sigma=0.0) for name, p in DEFAULT_PARAMS.items()}


class TestDeterminism:
    @pytest.mark.parametrize("gen", [gen_yellow_light, gen_cruise])
    def test_same_seed_bit_identical(self, gen):
        a = gen(30, seed=5)
        b = gen(30, seed=5)
        assert [lab for _, lab in a] == [lab for _, lab in b]
        for (sa, _), (sb, _) in zip(a, b):
            assert sa.scene_id == sb.scene_id
            assert sa.split == sb.split
            for ta, tb in zip(sa.agents, sb.agents):
                np.testing.assert_array_equal(ta.positions, tb.positions)

    def test_different_seeds_differ(self):
        a = gen_yellow_light(5, seed=0)
        b = gen_yellow_light(5, seed=1)
        assert not np.array_equal(a[0][0].focal.positions, b[0][0].focal.positions)


class TestYellowLight:
    def test_timid_stop_scenes_stop_short(self):
        pairs = gen_yellow_light(100, mix={"timid": 1.0}, params=quiet_params(), seed=3)
        stops = 0
        for scene, label in pairs:
            assert label == "timid"
            x = scene.focal.positions[:, 0]
            v_end = (x[-1] - x[-2]) / DT
            if v_end < 5.0:
                # braking branch; may still be rolling out at the 6 s cutoff
                # but must not have reached the line
                stops += 1
                assert x[-1] < 0.0
            else:
                assert v_end >= 10.0  # go branch never slows below v0
        assert stops > 20  # the corpus actually exercises the stop branch

    def test_aggressive_crosses_the_line(self):
        pairs = gen_yellow_light(100, mix={"aggressive": 1.0},
                                 params=quiet_params(), seed=4)
        for scene, _ in pairs:
            assert scene.focal.positions[-1, 0] > 0.0

    def test_kinematics_stay_inside_envelope(self):
        pairs = gen_yellow_light(50, params=quiet_params(), seed=6)
        for scene, label in pairs:
            p = DEFAULT_PARAMS[label]
            _, accel, _ = derivatives(scene.focal)
            # discrete differencing overshoots a little around the jerk ramps
            assert np.max(accel) <= p.a_max * 1.2 + 0.1
            assert np.min(accel) >= -p.b_max * 1.2 - 0.1

    def test_splits_cover_train_and_test(self):
        pairs = gen_yellow_light(200, seed=0)
        splits = {s.split for s, _ in pairs}
        assert splits == {"train", "test"}
        frac_train = np.mean([s.split == "train" for s, _ in pairs])
        assert 0.7 < frac_train < 0.9


class TestCruise:
    def test_normal_quieter_than_aggressive(self):
        pairs = gen_cruise(60, params=quiet_params(), seed=7)
        by_label = {"aggressive": [], "normal": []}
        for scene, label in pairs:
            by_label[label].append(extract_features(scene.focal).var_accel)
        assert max(by_label["normal"]) < min(by_label["aggressive"])

    def test_ground_truth_styles_separate_in_accel(self):
        pairs = gen_cruise(200, seed=8)
        acc = {"aggressive": [], "normal": []}
        for scene, label in pairs:
            acc[label].append(extract_features(scene.focal).max_abs_accel)
        res = welch_t_test(acc["aggressive"], acc["normal"])
        assert res.p_value < 0.01

    def test_lead_vehicle_present_ahead(self):
        pairs = gen_cruise(10, seed=9)
        for scene, _ in pairs:
            lead = [a for a in scene.agents if a.agent_id == "lead"][0]
            gaps = lead.positions[:, 0] - scene.focal.positions[:, 0]
            assert np.all(gaps > 5.0)

    def test_mdsi_labels_controlled_by_confusion(self):
        clean = gen_cruise(80, seed=10, mdsi_confusion=0.0)
        for scene, label in clean:
            expect = {"aggressive": "risky", "normal": "careful"}[label]
            assert scene.mdsi_label == expect
        none = gen_cruise(5, seed=10, mdsi_confusion=None)
        assert all(s.mdsi_label is None for s, _ in none)


class TestEdgeCases:
    def test_empty_corpus(self):
        assert gen_yellow_light(0) == []
        assert gen_cruise(0) == []

    def test_pure_mix(self):
        pairs = gen_cruise(20, mix={"aggressive": 1.0}, seed=1)
        assert all(label == "aggressive" for _, label in pairs)

    def test_bad_mix_rejected(self):
        with pytest.raises(ValueError):
            gen_yellow_light(5, mix={"aggressive": 0.7, "timid": 0.7})
        with pytest.raises(ValueError):
            gen_cruise(5, mix={})

    def test_negative_n_rejected(self):
        with pytest.raises(ValueError):
            gen_yellow_light(-1)

    def test_bad_style_params_rejected(self):
        with pytest.raises(ValueError):
            StyleParams("x", go_bias=0.5, a_max=-1.0, b_max=1.0, j_max=1.0,
                        noise_sigma=0.0)
