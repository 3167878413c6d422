"""Kinematic-based driving style clustering: z-scoring, Ward agglomeration
via Lance-Williams updates, cluster labeling, and nearest-centroid assignment."""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

from .kinematics import KinematicFeatures

DEFAULT_SUBSET = ("max_abs_accel", "var_accel", "var_speed", "gamma")
STD_FLOOR = 1e-12


class ClusteringError(ValueError):
    pass


@dataclass(frozen=True)
class ClusterModel:
    feature_names: tuple
    mean: np.ndarray          # per-feature standardization mean
    std: np.ndarray           # per-feature standardization std (floored)
    merge_history: tuple      # (cluster_a, cluster_b, linkage_distance), scipy-style ids
    k: int
    centroids: np.ndarray     # k x d, standardized space
    labels: dict = field(default_factory=dict)   # cluster id -> semantic label
    train_assignments: Optional[np.ndarray] = None
    metadata: dict = field(default_factory=dict)

    def standardize(self, x: np.ndarray) -> np.ndarray:
        return (np.asarray(x, dtype=float) - self.mean) / self.std

    def to_dict(self) -> dict:
        return {
            "feature_names": list(self.feature_names),
            "mean": self.mean.tolist(),
            "std": self.std.tolist(),
            "merge_history": [[int(a), int(b), float(d)] for a, b, d in self.merge_history],
            "k": self.k,
            "centroids": self.centroids.tolist(),
            "labels": {str(cid): lab for cid, lab in self.labels.items()},
            "train_assignments": None
            if self.train_assignments is None
            else self.train_assignments.tolist(),
            "metadata": self.metadata,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "ClusterModel":
        return cls(
            feature_names=tuple(d["feature_names"]),
            mean=np.asarray(d["mean"], dtype=float),
            std=np.asarray(d["std"], dtype=float),
            merge_history=tuple((int(a), int(b), float(x)) for a, b, x in d["merge_history"]),
            k=int(d["k"]),
            centroids=np.asarray(d["centroids"], dtype=float),
            labels={int(cid): lab for cid, lab in d.get("labels", {}).items()},
            train_assignments=None
            if d.get("train_assignments") is None
            else np.asarray(d["train_assignments"], dtype=int),
            metadata=d.get("metadata", {}),
        )

    def save(self, path) -> None:
        with open(path, "w", encoding="utf-8") as fh:
            json.dump(self.to_dict(), fh, indent=1, sort_keys=True)
            fh.write("\n")

    @classmethod
    def load(cls, path) -> "ClusterModel":
        with open(path, "r", encoding="utf-8") as fh:
            return cls.from_dict(json.load(fh))


def _feature_matrix(features: Sequence[KinematicFeatures], names) -> np.ndarray:
    return np.array([[getattr(f, n) for n in names] for f in features], dtype=float)


def ward_linkage(points: np.ndarray):
    """Full Ward dendrogram over the rows of `points`.

    Returns (merge_history, leaders) where merge_history is a list of
    (id_a, id_b, distance) with scipy-style cluster ids (new cluster i gets
    id n + i) and leaders maps each merge step to member leaf sets.
    Ties are broken toward the smallest (id_a, id_b) pair, so the
    dendrogram is deterministic.
    """
    n = len(points)
    # symmetric squared Ward distances, Lance-Williams updated in place
    diff = points[:, None, :] - points[None, :, :]
    d2 = np.einsum("ijk,ijk->ij", diff, diff)
    np.fill_diagonal(d2, np.inf)

    size = np.ones(n, dtype=float)
    cluster_id = np.arange(n)     # slot -> current cluster id
    active = np.ones(n, dtype=bool)
    members = {i: frozenset([i]) for i in range(n)}
    history = []
    next_id = n

    for _step in range(n - 1):
        dmin = d2.min()
        # ties (exact equality) resolved toward the smallest cluster-id pair
        ti, tj = np.nonzero(d2 == dmin)
        pairs = sorted(
            (tuple(sorted((cluster_id[a], cluster_id[b]))), (a, b))
            for a, b in zip(ti, tj)
            if a < b
        )
        (ida, idb), (i, j) = pairs[0]
        dij = d2[i, j]
        history.append((int(ida), int(idb), float(np.sqrt(dij))))

        ni, nj = size[i], size[j]
        other = active.copy()
        other[[i, j]] = False
        nm = size[other]
        new = ((ni + nm) * d2[i, other] + (nj + nm) * d2[j, other] - nm * dij) / (
            ni + nj + nm
        )
        d2[i, other] = new
        d2[other, i] = new

        members[next_id] = members[cluster_id[i]] | members[cluster_id[j]]
        size[i] = ni + nj
        cluster_id[i] = next_id
        active[j] = False
        d2[j, :] = np.inf
        d2[:, j] = np.inf
        next_id += 1

    return history, members


def cut_partition(history, members, n: int, k: int) -> np.ndarray:
    """Flat labels (0..k-1) after the first n-k merges, clusters numbered by
    smallest member index."""
    if not 1 <= k <= n:
        raise ClusteringError(f"k={k} out of range for n={n}")
    parent = list(range(n))
    groups = {i: {i} for i in range(n)}
    id_to_group = {i: i for i in range(n)}
    next_id = n
    for (a, b, _dist) in history[: n - k]:
        ga, gb = id_to_group.pop(a), id_to_group.pop(b)
        groups[ga] |= groups.pop(gb)
        id_to_group[next_id] = ga
        next_id += 1
    # stable cluster numbering: sort groups by smallest member
    final = sorted(groups.values(), key=min)
    labels = np.empty(n, dtype=int)
    for cid, grp in enumerate(final):
        for m in grp:
            labels[m] = cid
    return labels


def fit_kdsc(
    features: Sequence[KinematicFeatures],
    k: int = 2,
    feature_subset=DEFAULT_SUBSET,
) -> ClusterModel:
    """Fit the style-clustering model: z-score, Ward-agglomerate, cut at k."""
    n = len(features)
    if n < k:
        raise ClusteringError(f"need at least k={k} points, got {n}")
    names = tuple(feature_subset)
    raw = _feature_matrix(features, names)
    if not np.all(np.isfinite(raw)):
        raise ClusteringError("non-finite feature values")

    mean = raw.mean(axis=0)
    std = raw.std(axis=0)
    metadata = {}
    constant = [names[i] for i in range(len(names)) if std[i] < STD_FLOOR]
    if constant:
        metadata["constant_features"] = constant
    std = np.maximum(std, STD_FLOOR)
    z = (raw - mean) / std

    history, _members = ward_linkage(z)
    assignments = cut_partition(history, None, n, k)
    centroids = np.array([z[assignments == c].mean(axis=0) for c in range(k)])

    return ClusterModel(
        feature_names=names,
        mean=mean,
        std=std,
        merge_history=tuple(history),
        k=k,
        centroids=centroids,
        labels={},
        train_assignments=assignments,
        metadata=metadata,
    )


def label_clusters(model: ClusterModel, features: Sequence[KinematicFeatures]) -> ClusterModel:
    """Label the k=2 clusters aggressive/normal by mean max_abs_accel."""
    if model.k != 2:
        raise ClusteringError(f"semantic labels defined only for k=2, model has k={model.k}")
    if model.train_assignments is None or len(features) != len(model.train_assignments):
        raise ClusteringError("features must match the fitted corpus")
    acc = np.array([f.max_abs_accel for f in features], dtype=float)
    means = [acc[model.train_assignments == c].mean() for c in (0, 1)]
    metadata = dict(model.metadata)
    if means[0] == means[1]:
        aggressive = 0
        metadata["label_tie"] = True
    else:
        aggressive = int(np.argmax(means))
    labels = {aggressive: "aggressive", 1 - aggressive: "normal"}
    return ClusterModel(
        feature_names=model.feature_names,
        mean=model.mean,
        std=model.std,
        merge_history=model.merge_history,
        k=model.k,
        centroids=model.centroids,
        labels=labels,
        train_assignments=model.train_assignments,
        metadata=metadata,
    )


def assign(model: ClusterModel, f: KinematicFeatures) -> int:
    """Nearest-centroid cluster id for a new point; ties to the lower index."""
    x = np.array([getattr(f, n) for n in model.feature_names], dtype=float)
    if not np.all(np.isfinite(x)):
        raise ClusteringError("non-finite feature values")
    z = model.standardize(x)
    dist = np.linalg.norm(model.centroids - z, axis=1)
    return int(np.argmin(dist))
