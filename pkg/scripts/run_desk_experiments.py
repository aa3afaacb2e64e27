#!/usr/bin/env python3
"""Run the full desk-scale experiment suite on synthetic data.

Covers, with planted-topic corpora small enough for a laptop:
  1. topic-level re-estimation: how well narrow-reference cnpmi and the
     trained estimator track broad-reference cnpmi on a held-out language
  2. cardinality sweep: cnpmi vs (normalized and raw) mta as topics deepen
  3. document-link sweep: mean cnpmi as the linked fraction grows
  4. reference-size sweep: score stability under reference subsampling
  5. model-level agreement: correlation between mean cnpmi and
     crosslingual classification F1 across models

Usage:
    python scripts/run_desk_experiments.py [--seed 0] [--fast]
"""

import argparse
import time

import numpy as np

from polytopic import synthetic
from polytopic.cooccur import build_index
from polytopic.downstream import build_theta_set, evaluate_f1, select_labels, train_classifier
from polytopic.estimator import cross_validate, extract_features, fit, predict
from polytopic.metrics import cnpmi, pearson
from polytopic.plm import PlmConfig, train
from polytopic.sweeps import (
    run_cardinality_sweep,
    run_link_sweep,
    run_reference_size_sweep,
)


def banner(title):
    print(f"\n=== {title} " + "=" * max(0, 60 - len(title)))


def pack_features(pack):
    words_a = {w for t in pack.topics for w in t.words_a}
    words_b = {w for t in pack.topics for w in t.words_b}
    index = build_index(pack.narrow, restrict_a=words_a, restrict_b=words_b)
    return [
        extract_features(t, index, pack.dictionary, pack.era, pack.narrow, pack.broad)
        for t in pack.topics
    ]


def topic_level_estimation(seed, n_topics):
    banner("topic-level re-estimation (narrow reference vs estimator)")
    packs = {
        lang: synthetic.build_language_pack(lang, seed=seed + 17 * i, n_topics=n_topics)
        for i, lang in enumerate(("ro", "tl", "tr", "am"))
    }
    train_langs = ("ro", "tl", "tr")
    pool = {lang: (pack_features(packs[lang]), packs[lang].targets) for lang in train_langs}
    chosen = cross_validate(pool, seed=seed)
    print(f"cross-validation pick: learning rate {chosen.learning_rate}, loss {chosen.loss}")
    features = [f for lang in train_langs for f in pool[lang][0]]
    targets = [t for lang in train_langs for t in pool[lang][1]]
    model = fit(features, targets, loss=chosen.loss, learning_rate=chosen.learning_rate)
    held = packs["am"]
    held_features = pack_features(held)
    estimated = predict(model, held_features)
    r_raw = pearson([f.cnpmi_ref for f in held_features], held.targets)
    r_est = pearson(estimated, held.targets)
    print(f"held-out language: am ({len(held.topics)} topics)")
    print(f"  narrow-reference cnpmi vs broad:  r = {r_raw:+.3f}")
    print(f"  estimated coherence vs broad:     r = {r_est:+.3f}")


def cardinality_experiment(seed):
    banner("cardinality sweep (coherent head, reference-absent tail)")
    world = synthetic.make_world(seed=seed)
    ref = synthetic.make_reference_corpus(world, 800, seed=seed + 1)
    rng = np.random.default_rng(seed)
    topics = []
    for theme_id in range(len(world.themes)):
        topic = synthetic.make_topic(world, theme_id, 1.0, 10, rng)
        topics.append(
            type(topic)(
                topic.words_a + tuple(f"pad.a{theme_id}.{i}" for i in range(40)),
                topic.words_b + tuple(f"pad.b{theme_id}.{i}" for i in range(40)),
                topic.language_a,
                topic.language_b,
            )
        )
    dictionary = synthetic.make_dictionary(world, seed=seed)
    rows = run_cardinality_sweep(build_index(ref), topics, dictionary, include_raw_mta=True)
    print("cardinality  metric    mean")
    for c, metric, value in rows:
        print(f"{c:>11}  {metric:<8}  {value:+.4f}")


def link_experiment(seed, iterations):
    banner("document-link sweep (mean cnpmi per linked fraction)")
    world = synthetic.make_world(n_themes=12, n_modern=6, seed=seed)
    train_corpus = synthetic.make_training_corpus(world, 500, doc_length=10, noise=0.3, seed=seed)
    ref = synthetic.make_reference_corpus(world, 1500, doc_length=10, seed=seed + 50)
    config = PlmConfig(
        n_topics=12, iterations=iterations, chains=2, optimize_interval=0, seed=seed
    )
    rows = run_link_sweep(train_corpus, ref, config, cardinality=10)
    print("fraction  mean cnpmi")
    for fraction, value in rows:
        print(f"{fraction:>8.1f}  {value:+.4f}")


def reference_size_experiment(seed):
    banner("reference-size sweep (5000-document reference)")
    world = synthetic.make_world(n_themes=6, n_modern=3, words_per_theme=14, seed=seed)
    topics, _, _ = synthetic.make_topic_set(world, 12, cardinality=10, seed=seed + 1)
    ref = synthetic.make_reference_corpus(world, 5000, noise=0.25, seed=seed + 2)
    rows = run_reference_size_sweep(ref, topics, seed=seed)
    print("fraction  documents  mean cnpmi")
    for fraction, value, size in rows:
        print(f"{fraction:>8.1f}  {size:>9}  {value:+.4f}")


def model_level_experiment(seed, iterations):
    banner("model-level agreement (cnpmi vs crosslingual classification F1)")
    world = synthetic.make_world(n_themes=8, n_modern=4, seed=seed)
    corpus, labels = synthetic.make_labeled_corpus(world, 400, noise=0.3, seed=seed)
    ref = synthetic.make_reference_corpus(world, 1200, seed=seed + 9)
    raw_labels = [frozenset({label}) for label in labels]
    universe = select_labels(raw_labels, 7)
    rng = np.random.default_rng(seed)
    order = rng.permutation(corpus.doc_count)
    test_idx, train_idx = order[:150], order[150:]
    print("fraction  mean cnpmi  F1(a->b)")
    scores, f1s = [], []
    for fraction in (0.0, 0.25, 0.5, 0.75, 1.0):
        config = PlmConfig(
            n_topics=8, iterations=iterations, chains=1, optimize_interval=0,
            link_fraction=fraction, seed=seed,
        )
        output = train(corpus, config)
        from polytopic.plm import topics_from_output

        topics = topics_from_output(output, 10)
        words_a = {w for t in topics for w in t.words_a}
        words_b = {w for t in topics for w in t.words_b}
        index = build_index(ref, restrict_a=words_a, restrict_b=words_b)
        mean_score = float(np.mean([cnpmi(index, t) for t in topics]))
        train_set = build_theta_set(
            output.theta[train_idx, 0], [raw_labels[i] for i in train_idx], universe
        )
        test_set = build_theta_set(
            output.theta[test_idx, 1], [raw_labels[i] for i in test_idx], universe
        )
        f1 = evaluate_f1(train_classifier(train_set), test_set)
        scores.append(mean_score)
        f1s.append(f1)
        print(f"{fraction:>8.2f}  {mean_score:+.4f}     {f1:.4f}")
    print(f"Pearson correlation between mean cnpmi and F1: {pearson(scores, f1s):+.3f}")


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--seed", type=int, default=0)
    parser.add_argument("--fast", action="store_true", help="fewer topics and sweeps")
    args = parser.parse_args()
    started = time.time()
    n_topics = 24 if args.fast else 48
    iterations = 50 if args.fast else 100
    topic_level_estimation(args.seed, n_topics)
    cardinality_experiment(args.seed)
    link_experiment(args.seed, iterations)
    reference_size_experiment(args.seed)
    model_level_experiment(args.seed, iterations)
    print(f"\nfinished in {time.time() - started:.1f}s")


if __name__ == "__main__":
    main()
