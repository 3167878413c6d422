import numpy as np
import pytest

from style_lens import DEFAULT_SUBSET, ClusterModel, assign, fit_kdsc, label_clusters
from style_lens.kdsc import ClusteringError, cut_partition, ward_linkage
from style_lens.kinematics import KinematicFeatures


def feat(**kw):
    vals = {n: 0.0 for n in KinematicFeatures.field_names()}
    vals.update(kw)
    return KinematicFeatures(**vals)


def feats_from_matrix(mat, names=DEFAULT_SUBSET):
    return [feat(**dict(zip(names, row))) for row in np.atleast_2d(mat)]


# ---------------------------------------------------------------------------
# Brute-force Ward oracle: greedy merging that recomputes every pairwise
# merge cost from cluster centroids at each step, no Lance-Williams updates.

def brute_force_ward(points):
    points = np.asarray(points, dtype=float)
    n = len(points)
    clusters = {i: [i] for i in range(n)}
    next_id = n
    history = []
    for _ in range(n - 1):
        best = None
        for a in sorted(clusters):
            for b in sorted(clusters):
                if a >= b:
                    continue
                ma, mb = clusters[a], clusters[b]
                ca = points[ma].mean(axis=0)
                cb = points[mb].mean(axis=0)
                # squared Ward distance: 2|A||B|/(|A|+|B|) * ||cA - cB||^2
                cost = (2.0 * len(ma) * len(mb) / (len(ma) + len(mb))
                        * float(np.sum((ca - cb) ** 2)))
                if best is None or cost < best[0]:
                    best = (cost, a, b)
        cost, a, b = best
        history.append((a, b, np.sqrt(cost)))
        clusters[next_id] = clusters.pop(a) + clusters.pop(b)
        next_id += 1
    return history


def partition_sets(labels):
    groups = {}
    for i, lab in enumerate(labels):
        groups.setdefault(lab, set()).add(i)
    return {frozenset(g) for g in groups.values()}


class TestWardLinkage:
    def test_well_separated_blobs(self):
        pts = np.array([0.0, 0.1, 0.2, 10.0, 10.1, 10.2])[:, None]
        history, _ = ward_linkage(pts)
        labels = cut_partition(history, None, 6, 2)
        assert partition_sets(labels) == {frozenset({0, 1, 2}), frozenset({3, 4, 5})}

    @pytest.mark.parametrize("n", [2, 3, 4, 5, 6, 7, 8])
    def test_matches_brute_force_oracle(self, n):
        rng = np.random.default_rng(100 + n)
        for trial in range(15):
            pts = rng.normal(size=(n, 2))
            history, _ = ward_linkage(pts)
            oracle = brute_force_ward(pts)
            assert len(history) == len(oracle) == n - 1
            for (a, b, d), (oa, ob, od) in zip(history, oracle):
                assert (a, b) == (oa, ob)
                assert d == pytest.approx(od, rel=1e-9)
            if n >= 2:
                got = cut_partition(history, None, n, 2)
                want = cut_partition(oracle, None, n, 2)
                assert partition_sets(got) == partition_sets(want)

    def test_merge_distances_monotone(self):
        rng = np.random.default_rng(9)
        pts = rng.normal(size=(30, 3))
        history, _ = ward_linkage(pts)
        dists = [d for _, _, d in history]
        assert all(d2 >= d1 - 1e-12 for d1, d2 in zip(dists, dists[1:]))

    def test_permutation_invariant_partition(self):
        rng = np.random.default_rng(4)
        pts = rng.normal(size=(12, 2))
        perm = rng.permutation(12)
        h1, _ = ward_linkage(pts)
        h2, _ = ward_linkage(pts[perm])
        p1 = partition_sets(cut_partition(h1, None, 12, 3))
        labels2 = cut_partition(h2, None, 12, 3)
        # map the permuted labels back to original indices
        p2 = partition_sets([labels2[np.where(perm == i)[0][0]] for i in range(12)])
        assert p1 == p2

    def test_cut_k_equals_n(self):
        pts = np.random.default_rng(1).normal(size=(5, 2))
        history, _ = ward_linkage(pts)
        labels = cut_partition(history, None, 5, 5)
        assert sorted(labels) == [0, 1, 2, 3, 4]

    def test_cut_bad_k(self):
        with pytest.raises(ClusteringError):
            cut_partition([], None, 3, 0)


class TestFitKdsc:
    def test_blob_recovery_and_centroids(self):
        rng = np.random.default_rng(0)
        lo = rng.normal(0.0, 0.05, size=(20, 4))
        hi = rng.normal(3.0, 0.05, size=(20, 4))
        feats = feats_from_matrix(np.vstack([lo, hi]))
        model = fit_kdsc(feats, k=2)
        assert partition_sets(model.train_assignments) == {
            frozenset(range(20)), frozenset(range(20, 40))
        }
        assert model.centroids.shape == (2, 4)

    def test_affine_feature_rescaling_invariant(self):
        rng = np.random.default_rng(3)
        raw = rng.normal(size=(25, 4))
        scale = np.array([100.0, 0.01, 3.0, 7.0])
        shift = np.array([5.0, -2.0, 0.0, 44.0])
        m1 = fit_kdsc(feats_from_matrix(raw), k=3)
        m2 = fit_kdsc(feats_from_matrix(raw * scale + shift), k=3)
        np.testing.assert_array_equal(m1.train_assignments, m2.train_assignments)

    def test_too_few_points(self):
        with pytest.raises(ClusteringError):
            fit_kdsc(feats_from_matrix(np.zeros((1, 4))), k=2)

    def test_constant_feature_noted(self):
        rng = np.random.default_rng(5)
        mat = rng.normal(size=(10, 4))
        mat[:, 2] = 7.0
        model = fit_kdsc(feats_from_matrix(mat), k=2)
        assert model.metadata["constant_features"] == [DEFAULT_SUBSET[2]]

    def test_non_finite_rejected(self):
        mat = np.zeros((4, 4))
        mat[1, 1] = np.inf
        with pytest.raises(ClusteringError):
            fit_kdsc(feats_from_matrix(mat), k=2)

    def test_model_round_trip(self, tmp_path):
        rng = np.random.default_rng(8)
        feats = feats_from_matrix(rng.normal(size=(12, 4)))
        model = label_clusters(fit_kdsc(feats, k=2), feats)
        path = tmp_path / "model.json"
        model.save(path)
        back = ClusterModel.load(path)
        assert back.feature_names == model.feature_names
        assert back.labels == model.labels
        assert back.merge_history == model.merge_history
        np.testing.assert_array_equal(back.centroids, model.centroids)
        np.testing.assert_array_equal(back.train_assignments, model.train_assignments)


class TestLabeling:
    def _two_blob_model(self, accel_scale_hi=3.0):
        rng = np.random.default_rng(2)
        lo = np.abs(rng.normal(1.0, 0.05, size=(10, 4)))
        hi = np.abs(rng.normal(1.0, 0.05, size=(10, 4)))
        hi[:, 0] *= accel_scale_hi  # max_abs_accel is the first subset feature
        hi[:, 1] += 5.0
        feats = feats_from_matrix(np.vstack([lo, hi]))
        return fit_kdsc(feats, k=2), feats

    def test_high_accel_blob_labeled_aggressive(self):
        model, feats = self._two_blob_model()
        labeled = label_clusters(model, feats)
        acc = np.array([f.max_abs_accel for f in feats])
        agg_id = next(c for c, lab in labeled.labels.items() if lab == "aggressive")
        nrm_id = 1 - agg_id
        assert (acc[labeled.train_assignments == agg_id].mean()
                > acc[labeled.train_assignments == nrm_id].mean())
        assert set(labeled.labels.values()) == {"aggressive", "normal"}

    def test_exact_tie_goes_to_cluster_zero(self):
        # same max_abs_accel everywhere, clusters split on var_accel
        mat = np.zeros((6, 4))
        mat[:, 0] = 1.0
        mat[3:, 1] = 9.0
        feats = feats_from_matrix(mat)
        labeled = label_clusters(fit_kdsc(feats, k=2), feats)
        assert labeled.labels[0] == "aggressive"
        assert labeled.metadata.get("label_tie") is True

    def test_k3_model_rejected(self):
        rng = np.random.default_rng(6)
        feats = feats_from_matrix(rng.normal(size=(9, 4)))
        with pytest.raises(ClusteringError):
            label_clusters(fit_kdsc(feats, k=3), feats)


class TestAssign:
    def test_unstandardized_centroid_maps_to_itself(self):
        rng = np.random.default_rng(7)
        feats = feats_from_matrix(rng.normal(size=(10, 4)))
        model = fit_kdsc(feats, k=2)
        for cid in range(2):
            raw = model.centroids[cid] * model.std + model.mean
            assert assign(model, feats_from_matrix(raw)[0]) == cid

    def test_equidistant_tie_lower_index(self):
        model = ClusterModel(
            feature_names=("max_abs_accel",),
            mean=np.zeros(1),
            std=np.ones(1),
            merge_history=(),
            k=2,
            centroids=np.array([[-1.0], [1.0]]),
        )
        assert assign(model, feat(max_abs_accel=0.0)) == 0

    def test_self_consistency_on_separated_blobs(self):
        rng = np.random.default_rng(12)
        lo = rng.normal(0.0, 0.1, size=(40, 4))
        hi = rng.normal(4.0, 0.1, size=(40, 4))
        feats = feats_from_matrix(np.vstack([lo, hi]))
        model = fit_kdsc(feats, k=2)
        agree = np.mean([
            assign(model, f) == model.train_assignments[i]
            for i, f in enumerate(feats)
        ])
        assert agree >= 0.95
