"""Style-conditioned forecasting on the yellow-light dilemma.

Near-identical approach histories split into stop and go futures depending
on driver style, so a style-blind forecaster averages the two outcomes.
Conditioning on a style embedding (early or late fusion) resolves the
ambiguity; this script trains all three variants and prints the metrics.

Runs in about half a minute single-threaded.
"""

from style_lens import (
    EmbeddingBank,
    ForecastModel,
    StyleIndex,
    context_classify,
    evaluate,
    examples_from_scenes,
    gen_yellow_light,
    train,
)

N_SCENES = 600
EPOCHS = 200


def main():
    pairs = gen_yellow_light(N_SCENES, seed=7)
    scenes = [s for s, _ in pairs]
    labels = [lab for _, lab in pairs]
    names = sorted(set(labels))
    indices = [
        StyleIndex(z=names.index(lab), k=0, c=context_classify(s))
        for s, lab in zip(scenes, labels)
    ]
    examples, _ = examples_from_scenes(scenes, 8, 12, indices, labels)
    print(f"{len(examples)} examples, styles {names}")

    for fusion in ("none", "early", "late"):
        model = ForecastModel.init(H=8, T=12, M=1, hidden=64, D=16,
                                   fusion=fusion, seed=0)
        bank = None
        if fusion != "none":
            bank = EmbeddingBank.init(num_styles=len(names), K=1, D=16, seed=0)
        model, bank, losses = train(examples, model, bank,
                                    epochs=EPOCHS, lr=0.02, seed=0)
        rows = evaluate(examples, model, bank)
        overall = rows[-1]
        print(f"\nfusion={fusion}: final training loss {losses[-1]:.4f}")
        for r in rows:
            print(f"  {r.style:>10}: minADE={r.minADE:.3f} minFDE={r.minFDE:.3f} "
                  f"brierFDE={r.brierFDE:.3f} MissRate={r.MissRate:.2f} (n={r.n})")
    print("\nstyle conditioning should cut minFDE roughly in half versus "
          "the unconditioned baseline, with early fusion ahead of late.")


if __name__ == "__main__":
    main()
