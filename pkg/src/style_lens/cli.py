"""style-lens command line interface.

Subcommands: synth, features, tdbm, kdsc, train-embed, eval, report.
All outputs are byte-identical across runs given identical inputs and seeds.
"""

from __future__ import annotations

import argparse
import csv
import sys

import numpy as np

from .embed import EmbeddingBank, StyleIndex, context_classify
from .forecast import ForecastModel, evaluate, examples_from_scenes, train
from .kdsc import DEFAULT_SUBSET, ClusterModel, assign, fit_kdsc, label_clusters
from .kinematics import FEATURE_NAMES, KinematicFeatures
from .report import classify_scenes_tdbm, run_report, scene_features
from .synth import DEFAULT_PARAMS, gen_cruise, gen_yellow_light
from .tdbm import STYLE_LABELS, TdbmConfig, build_tdbm_features, tdbm_classify, tdbm_score
from .traj import load_scenes, save_scenes


def _parse_mix(text):
    mix = {}
    for part in text.split(","):
        name, _, frac = part.partition("=")
        mix[name.strip()] = float(frac)
    return mix


def _load_label_map(path):
    out = {}
    with open(path, "r", encoding="utf-8", newline="") as fh:
        for rec in csv.DictReader(fh):
            out[rec["scene_id"]] = rec["label"]
    return out


def cmd_synth(args):
    gen = {"yellow-light": gen_yellow_light, "cruise": gen_cruise}[args.kind]
    mix = _parse_mix(args.mix) if args.mix else None
    pairs = gen(args.n, mix=mix, seed=args.seed)
    save_scenes([scene for scene, _ in pairs], args.out)
    if args.labels:
        with open(args.labels, "w", encoding="utf-8", newline="\n") as fh:
            fh.write("scene_id,label\n")
            for scene, label in pairs:
                fh.write(f"{scene.scene_id},{label}\n")
    print(f"wrote {len(pairs)} scenes to {args.out}")


def cmd_features(args):
    scenes = load_scenes(args.infile, args.format)
    config = TdbmConfig.load(args.config) if args.config else TdbmConfig()
    with open(args.out, "w", encoding="utf-8", newline="\n") as fh:
        fh.write("scene_id,agent_id," + ",".join(FEATURE_NAMES) + "\n")
        for scene in scenes:
            f = scene_features(scene, config)
            vals = ",".join(repr(getattr(f, n)) for n in FEATURE_NAMES)
            fh.write(f"{scene.scene_id},{scene.focal_agent_id},{vals}\n")
    print(f"wrote features for {len(scenes)} scenes to {args.out}")


def cmd_tdbm(args):
    scenes = load_scenes(args.infile, args.format)
    config = TdbmConfig.load(args.config) if args.config else TdbmConfig()
    score_cols = ",".join(f"score_{label}" for label in STYLE_LABELS)
    with open(args.out, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(
            "scene_id,agent_id,s_center,v_nei,s_front,v_avg,j_l,had_neighbors,"
            + score_cols + ",class\n"
        )
        for scene in scenes:
            x = build_tdbm_features(scene, config)
            s = tdbm_score(x)
            cls = tdbm_classify(s, x.had_neighbors)
            fh.write(
                f"{scene.scene_id},{scene.focal_agent_id},"
                f"{x.s_center!r},{x.v_nei!r},{x.s_front!r},{x.v_avg!r},{x.j_l!r},"
                f"{str(x.had_neighbors).lower()},"
                + ",".join(repr(float(v)) for v in s.scores)
                + f",{cls.label}\n"
            )
    print(f"classified {len(scenes)} scenes to {args.out}")


def _read_features_csv(path):
    ids, feats = [], []
    with open(path, "r", encoding="utf-8", newline="") as fh:
        for rec in csv.DictReader(fh):
            ids.append((rec["scene_id"], rec["agent_id"]))
            feats.append(KinematicFeatures(**{n: float(rec[n]) for n in FEATURE_NAMES}))
    return ids, feats


def cmd_kdsc(args):
    ids, feats = _read_features_csv(args.features)
    subset = tuple(args.subset.split(",")) if args.subset else DEFAULT_SUBSET
    model = fit_kdsc(feats, k=args.k, feature_subset=subset)
    if args.k == 2:
        model = label_clusters(model, feats)
    model.save(args.out)
    if args.assignments:
        with open(args.assignments, "w", encoding="utf-8", newline="\n") as fh:
            fh.write("scene_id,agent_id,cluster,label\n")
            for (sid, aid), f in zip(ids, feats):
                cid = assign(model, f)
                fh.write(f"{sid},{aid},{cid},{model.labels.get(cid, '')}\n")
    print(f"fitted k={args.k} model on {len(feats)} points, saved to {args.out}")


def _style_indices(scenes, label_map, tdbm_config):
    """Bank indices per scene: ground-truth labels when provided, else TDBM.

    Returns (indices, style names per scene, number of styles)."""
    if label_map is not None:
        names = sorted(set(label_map.values()))
        name_to_z = {n: i for i, n in enumerate(names)}
        styles = [label_map[s.scene_id] for s in scenes]
        indices = [
            StyleIndex(z=name_to_z[label_map[s.scene_id]], k=0, c=context_classify(s))
            for s in scenes
        ]
        return indices, styles, len(names)
    styles = classify_scenes_tdbm(scenes, tdbm_config)
    label_to_z = {label: z for z, label in enumerate(STYLE_LABELS)}
    indices = [
        StyleIndex(z=label_to_z[style], k=0, c=context_classify(scene))
        for scene, style in zip(scenes, styles)
    ]
    return indices, styles, len(STYLE_LABELS)


def cmd_train_embed(args):
    scenes = load_scenes(args.infile, args.format)
    tdbm_config = TdbmConfig.load(args.tdbm_config) if args.tdbm_config else TdbmConfig()
    label_map = _load_label_map(args.labels) if args.labels else None
    indices, _styles, num_styles = _style_indices(scenes, label_map, tdbm_config)
    bank = EmbeddingBank.init(num_styles=num_styles, K=1 if label_map else args.clusters,
                              D=args.dim, seed=args.seed)
    model = ForecastModel.init(
        H=args.history, T=args.horizon, M=args.modes, hidden=args.hidden,
        D=args.dim, fusion=args.fusion, seed=args.seed,
    )
    examples, skipped = examples_from_scenes(scenes, model.H, model.T, indices)
    if skipped:
        print(f"skipped {skipped} scenes shorter than H+T", file=sys.stderr)
    model, bank, losses = train(
        examples, model, bank if args.fusion != "none" else None,
        epochs=args.epochs, lr=args.lr, seed=args.seed,
    )
    model.save(args.model)
    if args.bank:
        bank.save(args.bank)
    print(f"trained fusion={args.fusion} for {args.epochs} epochs, "
          f"final loss {losses[-1]:.6f}")


def cmd_eval(args):
    scenes = load_scenes(args.infile, args.format)
    tdbm_config = TdbmConfig.load(args.tdbm_config) if args.tdbm_config else TdbmConfig()
    model = ForecastModel.load(args.model)
    bank = EmbeddingBank.load(args.bank) if args.bank else None
    label_map = _load_label_map(args.labels) if args.labels else None
    indices, styles, _num = _style_indices(scenes, label_map, tdbm_config)
    examples, skipped = examples_from_scenes(scenes, model.H, model.T, indices, styles)
    if skipped:
        print(f"skipped {skipped} scenes shorter than H+T", file=sys.stderr)
    rows = evaluate(examples, model, bank, miss_threshold=args.miss_threshold)
    with open(args.out, "w", encoding="utf-8", newline="\n") as fh:
        fh.write("style,model,brierFDE,minADE,minFDE,MissRate,n\n")
        for r in rows:
            fh.write(
                f"{r.style},{model.fusion},{r.brierFDE!r},{r.minADE!r},"
                f"{r.minFDE!r},{r.MissRate!r},{r.n}\n"
            )
    print(f"wrote metrics for {len(examples)} scenes to {args.out}")


def cmd_report(args):
    scenes = load_scenes(args.infile, args.format)
    tdbm_config = TdbmConfig.load(args.tdbm_config) if args.tdbm_config else TdbmConfig()
    kdsc_model = ClusterModel.load(args.kdsc_model) if args.kdsc_model else None
    written = run_report(
        scenes, args.out_dir, tdbm_config, kdsc_model, n_min=args.n_min, svg=args.svg
    )
    for path in written:
        print(f"wrote {path}")


def build_parser():
    parser = argparse.ArgumentParser(
        prog="style-lens",
        description="Driving-style analytics: TDBM scoring, KDSC clustering, "
        "style-conditioned forecasting, synthetic corpora, reports.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("synth", help="generate a synthetic scene corpus")
    p.add_argument("--kind", choices=["yellow-light", "cruise"], required=True)
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--mix", default=None, help="e.g. aggressive=0.5,timid=0.5")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", required=True)
    p.add_argument("--labels", default=None, help="optional ground-truth label CSV")
    p.set_defaults(func=cmd_synth)

    def add_io(p, config_flag="--config"):
        p.add_argument("--in", dest="infile", required=True)
        p.add_argument("--format", choices=["jsonl", "csv"], default="jsonl")

    p = sub.add_parser("features", help="extract kinematic features per scene")
    add_io(p)
    p.add_argument("--config", default=None, help="TDBM/feature config JSON")
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_features)

    p = sub.add_parser("tdbm", help="TDBM feature construction, scores and classes")
    add_io(p)
    p.add_argument("--config", default=None)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_tdbm)

    p = sub.add_parser("kdsc", help="fit the kinematic style clustering model")
    p.add_argument("--features", required=True, help="features CSV from `features`")
    p.add_argument("--k", type=int, default=2)
    p.add_argument("--subset", default=None,
                   help="comma-separated feature names (default 4-feature subset)")
    p.add_argument("--out", required=True, help="model JSON path")
    p.add_argument("--assignments", default=None, help="optional assignments CSV")
    p.set_defaults(func=cmd_kdsc)

    p = sub.add_parser("train-embed", help="train the forecaster and embedding bank")
    add_io(p)
    p.add_argument("--fusion", choices=["none", "early", "late"], default="early")
    p.add_argument("--bank", default=None, help="output bank JSON")
    p.add_argument("--model", required=True, help="output model JSON")
    p.add_argument("--labels", default=None, help="ground-truth style labels CSV")
    p.add_argument("--tdbm-config", default=None)
    p.add_argument("--epochs", type=int, default=100)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--lr", type=float, default=1e-2)
    p.add_argument("--history", type=int, default=8)
    p.add_argument("--horizon", type=int, default=12)
    p.add_argument("--modes", type=int, default=6)
    p.add_argument("--hidden", type=int, default=64)
    p.add_argument("--dim", type=int, default=16)
    p.add_argument("--clusters", type=int, default=3)
    p.set_defaults(func=cmd_train_embed)

    p = sub.add_parser("eval", help="evaluate a trained model, metrics by style")
    add_io(p)
    p.add_argument("--model", required=True)
    p.add_argument("--bank", default=None)
    p.add_argument("--labels", default=None)
    p.add_argument("--tdbm-config", default=None)
    p.add_argument("--miss-threshold", type=float, default=2.0)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_eval)

    p = sub.add_parser("report", help="emit the analysis report CSVs")
    add_io(p)
    p.add_argument("--tdbm-config", default=None)
    p.add_argument("--kdsc-model", default=None)
    p.add_argument("--out-dir", required=True)
    p.add_argument("--n-min", type=int, default=5)
    p.add_argument("--svg", action="store_true")
    p.set_defaults(func=cmd_report)

    return parser


def main(argv=None):
    args = build_parser().parse_args(argv)
    args.func(args)


if __name__ == "__main__":
    main()
