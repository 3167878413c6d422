"""Factorized style-context embedding bank.

Each style owns two factor matrices: per-cluster rows e_k (K x D) and
per-context rows e_c (2 x D). The scalar table E = e_k . e_c^T indexes a
(cluster, context) pair; the conditioning vector handed to the forecaster is
the elementwise factor interaction, whose sum is exactly the table entry.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .kdsc import ClusterModel, assign
from .kinematics import extract_features
from .tdbm import TdbmConfig, _uniformize, build_tdbm_features, tdbm_classify, tdbm_score

NON_HIGHWAY, HIGHWAY = 0, 1
DEFAULT_V_HIGHWAY = 16.7  # m/s, ~60 km/h


@dataclass(frozen=True)
class StyleIndex:
    z: int  # style class id
    k: int  # intra-style cluster id
    c: int  # 0 = non-highway, 1 = highway


@dataclass
class EmbeddingBank:
    num_styles: int = 6
    K: int = 3
    D: int = 16
    seed: int = 0
    e_k: list = field(default_factory=list)  # per style: K x D
    e_c: list = field(default_factory=list)  # per style: 2 x D

    @classmethod
    def init(cls, num_styles: int = 6, K: int = 3, D: int = 16, seed: int = 0) -> "EmbeddingBank":
        rng = np.random.default_rng(seed)
        e_k = [rng.uniform(-0.1, 0.1, size=(K, D)) for _ in range(num_styles)]
        e_c = [rng.uniform(-0.1, 0.1, size=(2, D)) for _ in range(num_styles)]
        return cls(num_styles=num_styles, K=K, D=D, seed=seed, e_k=e_k, e_c=e_c)

    def table(self, z: int) -> np.ndarray:
        """Materialized K x 2 scalar table for style z."""
        return self.e_k[z] @ self.e_c[z].T

    def validate_index(self, idx: StyleIndex) -> None:
        if not (0 <= idx.z < self.num_styles and 0 <= idx.k < self.K and idx.c in (0, 1)):
            raise IndexError(f"index {idx} out of range for bank "
                             f"(|Z|={self.num_styles}, K={self.K})")

    def to_dict(self) -> dict:
        return {
            "num_styles": self.num_styles,
            "K": self.K,
            "D": self.D,
            "seed": self.seed,
            "styles": [
                {"e_k": ek.tolist(), "e_c": ec.tolist()}
                for ek, ec in zip(self.e_k, self.e_c)
            ],
        }

    @classmethod
    def from_dict(cls, d: dict) -> "EmbeddingBank":
        return cls(
            num_styles=int(d["num_styles"]),
            K=int(d["K"]),
            D=int(d["D"]),
            seed=int(d.get("seed", 0)),
            e_k=[np.asarray(s["e_k"], dtype=float) for s in d["styles"]],
            e_c=[np.asarray(s["e_c"], dtype=float) for s in d["styles"]],
        )

    def save(self, path) -> None:
        with open(path, "w", encoding="utf-8") as fh:
            json.dump(self.to_dict(), fh)
            fh.write("\n")

    @classmethod
    def load(cls, path) -> "EmbeddingBank":
        with open(path, "r", encoding="utf-8") as fh:
            return cls.from_dict(json.load(fh))


def lookup(bank: EmbeddingBank, idx: StyleIndex):
    """Conditioning vector (factor interaction) and its scalar table entry."""
    bank.validate_index(idx)
    vector = bank.e_k[idx.z][idx.k] * bank.e_c[idx.z][idx.c]
    return vector, float(vector.sum())


def bank_gradients(bank: EmbeddingBank, idx: StyleIndex, upstream: np.ndarray):
    """Gradients of the lookup vector wrt the two touched factor rows.

    Returns (grad_e_k_row, grad_e_c_row); all untouched rows have zero
    gradient by construction.
    """
    bank.validate_index(idx)
    upstream = np.asarray(upstream, dtype=float)
    grad_ek = upstream * bank.e_c[idx.z][idx.c]
    grad_ec = upstream * bank.e_k[idx.z][idx.k]
    return grad_ek, grad_ec


def context_classify(scene, v_highway: float = DEFAULT_V_HIGHWAY) -> int:
    """Highway flag wins; otherwise threshold the mean focal speed."""
    if scene.highway is not None:
        return HIGHWAY if scene.highway else NON_HIGHWAY
    focal = scene.focal
    span = focal.timestamps[-1] - focal.timestamps[0]
    if span <= 0:
        return NON_HIGHWAY
    dist = np.sum(np.hypot(*np.diff(focal.positions, axis=0).T))
    return HIGHWAY if dist / span >= v_highway else NON_HIGHWAY


def style_index(
    scene,
    tdbm_config: TdbmConfig,
    cluster_models: dict,
    fallback_model: Optional[ClusterModel] = None,
    v_highway: float = DEFAULT_V_HIGHWAY,
) -> StyleIndex:
    """Compose the three non-differentiable classifiers into a bank index.

    cluster_models maps style class id -> fitted ClusterModel; styles absent
    from the map use the shared fallback model (k stays 0 if none exists).
    """
    x = build_tdbm_features(scene, tdbm_config)
    z = int(tdbm_classify(tdbm_score(x), x.had_neighbors))
    model = cluster_models.get(z, fallback_model)
    if model is None:
        k = 0
    else:
        focal = _uniformize(scene.focal, tdbm_config.resample_dt)
        k = assign(model, extract_features(focal))
    c = context_classify(scene, v_highway)
    return StyleIndex(z=z, k=k, c=c)
