#!/usr/bin/env python3
"""Generate a synthetic demo dataset for exercising the CLI.

Writes, under the output directory:
  train_a.txt / train_b.txt      parallel training corpus
  ref_a.txt / ref_b.txt          broad reference corpus
  narrow_a.txt / narrow_b.txt    narrow (old themes only) reference corpus
  dictionary.tsv, era.tsv        lexicons
  topics.json                    planted topics of mixed quality (10 words/side)
  deep_topics.json               topics 50 words deep, for the cardinality sweep
  labels.tsv                     per-document theme labels for `classify`
  estimator/<lang>/...           three training language packs
  estimator/heldout/...          a held-out language pack (no targets)

Usage:
    python scripts/make_demo_data.py [--out demo_data] [--seed 0]
"""

import argparse
from pathlib import Path

from polytopic import synthetic
from polytopic.corpus import write_parallel_corpus, write_topics


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--out", default="demo_data")
    parser.add_argument("--seed", type=int, default=0)
    args = parser.parse_args()
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)

    world = synthetic.make_world(language_b="sv", seed=args.seed)
    train, labels = synthetic.make_labeled_corpus(world, 400, seed=args.seed)
    ref = synthetic.make_reference_corpus(world, 1200, seed=args.seed + 1)
    narrow = synthetic.make_reference_corpus(
        world, 400, theme_ids=world.old_theme_ids, seed=args.seed + 2
    )
    topics, _, _ = synthetic.make_topic_set(world, 24, cardinality=10, seed=args.seed + 3)
    deep_topics, _, _ = synthetic.make_topic_set(world, 8, cardinality=50, seed=args.seed + 4)

    write_parallel_corpus(train, out / "train_a.txt", out / "train_b.txt")
    write_parallel_corpus(ref, out / "ref_a.txt", out / "ref_b.txt")
    write_parallel_corpus(narrow, out / "narrow_a.txt", out / "narrow_b.txt")
    synthetic.write_dictionary_tsv(
        synthetic.make_dictionary(world, seed=args.seed), out / "dictionary.tsv"
    )
    synthetic.write_era_tsv(
        synthetic.make_era_lexicon(world, seed=args.seed), out / "era.tsv"
    )
    write_topics(topics, out / "topics.json")
    write_topics(deep_topics, out / "deep_topics.json")
    (out / "labels.tsv").write_text(
        "\n".join(f"{i}\t{label}" for i, label in enumerate(labels)) + "\n",
        encoding="utf-8",
    )

    estimator_dir = out / "estimator"
    for i, lang in enumerate(("ro", "tl", "tr")):
        pack = synthetic.build_language_pack(lang, seed=args.seed + 100 + 17 * i)
        synthetic.write_language_dir(pack, estimator_dir / lang)
    heldout = synthetic.build_language_pack("am", seed=args.seed + 200)
    synthetic.write_language_dir(heldout, estimator_dir / "heldout", include_targets=False)

    print(f"demo dataset written to {out}/")


if __name__ == "__main__":
    main()
