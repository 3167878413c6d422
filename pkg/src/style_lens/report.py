"""Deterministic analysis reports: style histograms, per-style kinematics
boxplot statistics, MDSI-vs-TDBM contingency counts, and per-cluster speed
distributions, emitted as CSV (plus optional simple SVG renderings)."""

from __future__ import annotations

import os
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from . import svg as svg_mod
from .kdsc import ClusterModel, assign
from .kinematics import FEATURE_NAMES, extract_features
from .stats import WelchResult, quantile_inclusive, welch_t_test
from .tdbm import (
    STYLE_LABELS,
    StyleClass,
    TdbmConfig,
    _uniformize,
    build_tdbm_features,
    tdbm_classify,
    tdbm_score,
)

GAMMA_DEFINITION_TAG = "rms-jerk-of-speed/v_peak"  # echoed in every header


class ReportError(ValueError):
    pass


@dataclass(frozen=True)
class BoxplotStats:
    metric: str
    style: str
    min: float
    q1: float
    median: float
    q3: float
    max: float
    n: int


def classify_scenes_tdbm(scenes, config: TdbmConfig):
    """TDBM class label per scene."""
    out = []
    for scene in scenes:
        x = build_tdbm_features(scene, config)
        out.append(tdbm_classify(tdbm_score(x), x.had_neighbors).label)
    return out


def scene_features(scene, config: TdbmConfig):
    return extract_features(_uniformize(scene.focal, config.resample_dt))


def style_histogram(
    scenes,
    classifier: str = "tdbm",
    tdbm_config: Optional[TdbmConfig] = None,
    kdsc_model: Optional[ClusterModel] = None,
):
    """Counts per style class; zero-count classes stay visible."""
    if not scenes:
        raise ReportError("cannot build a histogram from zero scenes")
    tdbm_config = tdbm_config or TdbmConfig()
    if classifier == "tdbm":
        counts = {label: 0 for label in STYLE_LABELS}
        for label in classify_scenes_tdbm(scenes, tdbm_config):
            counts[label] += 1
        return counts
    if classifier == "kdsc":
        if kdsc_model is None:
            raise ReportError("kdsc classifier requires a fitted model")
        labels = [kdsc_model.labels.get(c, f"cluster_{c}") for c in range(kdsc_model.k)]
        counts = {label: 0 for label in labels}
        for scene in scenes:
            cid = assign(kdsc_model, scene_features(scene, tdbm_config))
            counts[labels[cid]] += 1
        return counts
    raise ReportError(f"unknown classifier {classifier!r}")


def kinematics_by_style(scenes, styles: Sequence[str], n_min: int = 5,
                        tdbm_config: Optional[TdbmConfig] = None):
    """Five-number summaries of the 9 kinematic features, per style.

    Styles with fewer than n_min scenes are omitted; returns (rows, omitted).
    """
    tdbm_config = tdbm_config or TdbmConfig()
    by_style = {}
    for scene, style in zip(scenes, styles):
        by_style.setdefault(style, []).append(scene_features(scene, tdbm_config))
    order = [s for s in STYLE_LABELS if s in by_style]
    order += sorted(s for s in by_style if s not in STYLE_LABELS)
    rows, omitted = [], []
    for style in order:
        feats = by_style[style]
        if len(feats) < n_min:
            omitted.append((style, len(feats)))
            continue
        for metric in FEATURE_NAMES:
            vals = [getattr(f, metric) for f in feats]
            rows.append(
                BoxplotStats(
                    metric=metric,
                    style=style,
                    min=float(np.min(vals)),
                    q1=quantile_inclusive(vals, 0.25),
                    median=quantile_inclusive(vals, 0.5),
                    q3=quantile_inclusive(vals, 0.75),
                    max=float(np.max(vals)),
                    n=len(vals),
                )
            )
    return rows, omitted


def mdsi_tdbm_heatmap(scenes, classifications: Sequence[str]):
    """Contingency counts of MDSI label (rows, lexical) x TDBM class (columns,
    ordinal). Returns (matrix, row_labels, col_labels, n_unlabeled)."""
    pairs = [
        (scene.mdsi_label, cls)
        for scene, cls in zip(scenes, classifications)
        if scene.mdsi_label is not None
    ]
    n_unlabeled = len(scenes) - len(pairs)
    if not pairs:
        raise ReportError("no scenes carry an MDSI label")
    row_labels = sorted({m for m, _ in pairs})
    col_labels = list(STYLE_LABELS)
    matrix = np.zeros((len(row_labels), len(col_labels)), dtype=int)
    row_index = {m: i for i, m in enumerate(row_labels)}
    col_index = {c: i for i, c in enumerate(col_labels)}
    for mdsi, cls in pairs:
        matrix[row_index[mdsi], col_index[cls]] += 1
    return matrix, row_labels, col_labels, n_unlabeled


def cluster_speed_distribution(
    scenes,
    model: ClusterModel,
    splits=("train", "test"),
    bin_width: float = 0.5,
    speed_range=(0.0, 40.0),
    tdbm_config: Optional[TdbmConfig] = None,
):
    """Per-cluster mean_speed histograms by split, plus a Welch t-test
    between the two clusters' mean speeds (pooled over the given splits)."""
    if not model.labels:
        raise ReportError("cluster model must be labeled (aggressive/normal)")
    tdbm_config = tdbm_config or TdbmConfig()
    edges = np.arange(speed_range[0], speed_range[1] + bin_width / 2, bin_width)
    # seed every (cluster label, split) cell so empty clusters emit zero rows
    speeds = {
        (lab, split): [] for lab in sorted(model.labels.values()) for split in splits
    }
    for split in splits:
        subset = [s for s in scenes if s.split == split]
        if not subset:
            raise ReportError(f"no scenes in split {split!r}")
        for scene in subset:
            f = scene_features(scene, tdbm_config)
            label = model.labels[assign(model, f)]
            speeds.setdefault((label, split), []).append(f.mean_speed)
    hists = {
        key: np.histogram(vals, bins=edges)[0] for key, vals in speeds.items()
    }
    cluster_labels = sorted(model.labels.values())
    pooled = {
        lab: [v for (l, _s), vals in speeds.items() if l == lab for v in vals]
        for lab in cluster_labels
    }
    welch = None
    if len(cluster_labels) == 2 and all(len(pooled[l]) >= 2 for l in cluster_labels):
        welch = welch_t_test(pooled[cluster_labels[0]], pooled[cluster_labels[1]])
    return {"edges": edges, "hists": hists, "welch": welch, "splits": tuple(splits)}


# ---------------------------------------------------------------------------
# CSV / SVG emission


def _header_lines(config: TdbmConfig, extra: Optional[dict] = None):
    cfg = dict(config.to_dict())
    cfg["gamma_definition"] = GAMMA_DEFINITION_TAG
    cfg["quantile_method"] = "inclusive-linear"
    cfg["whiskers"] = "min-max"
    if extra:
        cfg.update(extra)
    return [f"# {k}={cfg[k]}" for k in sorted(cfg)]


def _write_csv(path, header_lines, columns, rows):
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        for line in header_lines:
            fh.write(line + "\n")
        fh.write(",".join(columns) + "\n")
        for row in rows:
            fh.write(",".join(str(v) for v in row) + "\n")


def run_report(
    scenes,
    out_dir,
    tdbm_config: Optional[TdbmConfig] = None,
    kdsc_model: Optional[ClusterModel] = None,
    n_min: int = 5,
    svg: bool = False,
):
    """Emit the four report CSVs (and optional SVG twins) into out_dir."""
    tdbm_config = tdbm_config or TdbmConfig()
    os.makedirs(out_dir, exist_ok=True)
    written = []

    classifications = classify_scenes_tdbm(scenes, tdbm_config)

    counts = style_histogram(scenes, "tdbm", tdbm_config)
    path = os.path.join(out_dir, "style_histogram.csv")
    _write_csv(
        path,
        _header_lines(tdbm_config, {"classifier": "tdbm"}),
        ["style", "count"],
        [(label, counts[label]) for label in STYLE_LABELS],
    )
    written.append(path)
    if svg:
        p = os.path.join(out_dir, "style_histogram.svg")
        svg_mod.write_bar_chart(p, list(STYLE_LABELS), [counts[l] for l in STYLE_LABELS],
                                title="TDBM style distribution")
        written.append(p)

    rows, omitted = kinematics_by_style(scenes, classifications, n_min, tdbm_config)
    path = os.path.join(out_dir, "kinematics_boxplots.csv")
    _write_csv(
        path,
        _header_lines(tdbm_config, {
            "n_min": n_min,
            "omitted": ";".join(f"{s}:{n}" for s, n in omitted) or "none",
        }),
        ["metric", "style", "min", "q1", "median", "q3", "max", "n"],
        [(r.metric, r.style, repr(r.min), repr(r.q1), repr(r.median),
          repr(r.q3), repr(r.max), r.n) for r in rows],
    )
    written.append(path)
    if svg:
        p = os.path.join(out_dir, "kinematics_boxplots.svg")
        svg_mod.write_boxplots(p, rows, title="Kinematics by TDBM style")
        written.append(p)

    if any(s.mdsi_label is not None for s in scenes):
        matrix, row_labels, col_labels, n_unl = mdsi_tdbm_heatmap(
            scenes, classifications
        )
        path = os.path.join(out_dir, "mdsi_tdbm_heatmap.csv")
        _write_csv(
            path,
            _header_lines(tdbm_config, {"unlabeled_scenes": n_unl}),
            ["mdsi_label"] + list(col_labels),
            [[row_labels[i]] + [int(v) for v in matrix[i]] for i in range(len(row_labels))],
        )
        written.append(path)
        if svg:
            p = os.path.join(out_dir, "mdsi_tdbm_heatmap.svg")
            svg_mod.write_heatmap(p, matrix, row_labels, col_labels,
                                  title="MDSI vs TDBM")
            written.append(p)

    if kdsc_model is not None and kdsc_model.labels:
        splits = tuple(sorted({s.split for s in scenes}))
        dist = cluster_speed_distribution(
            scenes, kdsc_model, splits=splits, tdbm_config=tdbm_config
        )
        welch = dist["welch"]
        extra = {"bin_width": 0.5, "speed_range": "0-40"}
        if welch is not None:
            extra.update({
                "welch_t": repr(welch.statistic),
                "welch_df": repr(welch.df),
                "welch_p": repr(welch.p_value),
            })
        path = os.path.join(out_dir, "cluster_speed_hist.csv")
        edges = dist["edges"]
        rows_out = []
        for (label, split) in sorted(dist["hists"]):
            hist = dist["hists"][(label, split)]
            for b, count in enumerate(hist):
                rows_out.append((label, split, repr(float(edges[b])),
                                 repr(float(edges[b + 1])), int(count)))
        _write_csv(
            path,
            _header_lines(tdbm_config, extra),
            ["cluster", "split", "bin_lo", "bin_hi", "count"],
            rows_out,
        )
        written.append(path)
        if svg:
            p = os.path.join(out_dir, "cluster_speed_hist.svg")
            svg_mod.write_split_histograms(p, dist, title="Cluster mean-speed distribution")
            written.append(p)

    return written
