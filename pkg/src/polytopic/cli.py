"""Command-line orchestration.

Subcommands: index, score, train-plm, train-estimator, estimate, classify,
sweep-cardinality, sweep-links, sweep-refsize. Flags are long-form only; a
`--config` file of key=value lines supplies flag defaults (explicit flags
win). All randomness flows from the single --seed flag, and reports carry a
header (tool version, seed, config hash, documented deviations) so equal
invocations produce byte-identical files. Reports are written next to a
`.partial` file that is renamed only on success.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import os
import sys
from dataclasses import dataclass, field
from pathlib import Path
from typing import Sequence

import numpy as np

from . import __version__
from .cooccur import build_index, load_index_cache, save_index_cache
from .corpus import (
    CorpusPair,
    load_dictionary,
    load_era_lexicon,
    load_parallel_corpus,
    load_topics,
)
from .downstream import (
    build_theta_set,
    evaluate_f1,
    read_labels_tsv,
    select_labels,
    train_classifier,
)
from .errors import PolytopicError, UsageError
from .estimator import (
    EstimatorModel,
    cross_validate,
    extract_features,
    fit,
    predict,
    write_feature_matrix,
)
from .metrics import score_topics, write_scores_json
from .plm import (
    PlmConfig,
    export_topics,
    save_phi_cache,
    train,
    write_theta_tsv,
)
from .sweeps import (
    CARDINALITY_GRID,
    LINK_FRACTION_GRID,
    REFERENCE_FRACTION_GRID,
    SMALL_REFERENCE_DOCS,
    run_cardinality_sweep,
    run_link_sweep,
    run_reference_size_sweep,
)

WORKERS_ENV_VAR = "POLYTOPIC_WORKERS"
PLM_DEVIATIONS = "hyperparameter-optimization=dirichlet-fixed-point;chain-selection=max-joint-likelihood"

KINDS = (
    "index",
    "score",
    "train-plm",
    "train-estimator",
    "estimate",
    "classify",
    "sweep-cardinality",
    "sweep-links",
    "sweep-refsize",
)


@dataclass
class ExperimentSpec:
    """One validated CLI invocation: what to run, on which files, with which knobs."""

    kind: str
    inputs: dict[str, str] = field(default_factory=dict)
    parameters: dict = field(default_factory=dict)
    seed: int = 0

    def validate(self) -> None:
        if self.kind not in KINDS:
            raise UsageError(f"unknown command kind {self.kind!r}")
        for name, path in self.inputs.items():
            if path is not None and not Path(path).exists():
                raise UsageError(f"input {name} does not exist: {path}")

    def config_hash(self) -> str:
        blob = json.dumps(
            {
                "kind": self.kind,
                "inputs": self.inputs,
                "parameters": {k: repr(v) for k, v in sorted(self.parameters.items())},
                "seed": self.seed,
            },
            sort_keys=True,
        )
        return hashlib.sha256(blob.encode("utf-8")).hexdigest()[:16]


def _header_lines(spec: ExperimentSpec, deviations: str = "none") -> list[str]:
    return [
        f"# tool: polytopic {__version__}",
        f"# kind: {spec.kind}",
        f"# seed: {spec.seed}",
        f"# config-hash: {spec.config_hash()}",
        f"# deviations: {deviations}",
    ]


def write_report(path, header_lines: Sequence[str], columns: Sequence[str], rows) -> Path:
    """Stream a TSV report through a .partial file, renamed on completion."""
    path = Path(path)
    partial = path.with_name(path.name + ".partial")
    with open(partial, "w", encoding="utf-8") as handle:
        for line in header_lines:
            handle.write(line + "\n")
        handle.write("\t".join(columns) + "\n")
        for row in rows:
            handle.write("\t".join(_format_cell(v) for v in row) + "\n")
    os.replace(partial, path)
    return path


def _format_cell(value) -> str:
    if isinstance(value, float):
        return f"{value:.10g}"
    return str(value)


def _parse_floats(text: str) -> list[float]:
    try:
        return [float(x) for x in text.split(",") if x != ""]
    except ValueError:
        raise UsageError(f"expected comma-separated numbers, got {text!r}") from None


def _parse_ints(text: str) -> list[int]:
    try:
        return [int(x) for x in text.split(",") if x != ""]
    except ValueError:
        raise UsageError(f"expected comma-separated integers, got {text!r}") from None


def _workers(parameters: dict) -> int:
    if parameters.get("workers"):
        return int(parameters["workers"])
    return int(os.environ.get(WORKERS_ENV_VAR, "1"))


def _load_pair(spec: ExperimentSpec, key_a: str, key_b: str, prune: float) -> CorpusPair:
    return load_parallel_corpus(
        spec.inputs[key_a],
        spec.inputs[key_b],
        spec.parameters.get("lang_a", "a"),
        spec.parameters.get("lang_b", "b"),
        prune_threshold=prune,
    )


def _topic_word_sets(topics):
    words_a, words_b = set(), set()
    for topic in topics:
        words_a.update(topic.words_a)
        words_b.update(topic.words_b)
    return words_a, words_b


# ---------------------------------------------------------------------------
# command handlers


def _run_index(spec: ExperimentSpec) -> Path:
    prune = float(spec.parameters.get("prune", 1.0))
    corpus = _load_pair(spec, "corpus_a", "corpus_b", prune)
    restrict_a = restrict_b = None
    if spec.inputs.get("restrict_topics"):
        topics = load_topics(spec.inputs["restrict_topics"])
        restrict_a, restrict_b = _topic_word_sets(topics)
    index = build_index(corpus, restrict_a=restrict_a, restrict_b=restrict_b)
    out = Path(spec.parameters["out"])
    partial = out.with_name(out.name + ".partial")
    save_index_cache(index, partial)
    os.replace(partial, out)
    return out


def _build_or_load_index(spec: ExperimentSpec, corpus, topics):
    cache = spec.inputs.get("index_cache")
    if cache:
        index = load_index_cache(cache, corpus)
        if index is not None:
            return index
    restrict_a, restrict_b = _topic_word_sets(topics)
    return build_index(corpus, restrict_a=restrict_a, restrict_b=restrict_b)


def _run_score(spec: ExperimentSpec) -> Path:
    topics = load_topics(spec.inputs["topics"])
    cardinality = spec.parameters.get("cardinality")
    if cardinality:
        topics = [t.truncate(int(cardinality)) for t in topics]
    prune = float(spec.parameters.get("prune", 1.0))
    corpus = _load_pair(spec, "ref_a", "ref_b", prune)
    index = _build_or_load_index(spec, corpus, topics)
    dictionary = (
        load_dictionary(spec.inputs["dictionary"]) if spec.inputs.get("dictionary") else None
    )
    scores = score_topics(index, topics, dictionary)
    rows = [
        (s.topic_id, s.metric, s.value)
        for s in sorted(scores, key=lambda s: (s.topic_id, s.metric))
    ]
    out = write_report(
        spec.parameters["out"], _header_lines(spec), ("topic", "metric", "value"), rows
    )
    if spec.parameters.get("json_out"):
        write_scores_json(scores, spec.parameters["json_out"])
    return out


def _plm_config(spec: ExperimentSpec) -> PlmConfig:
    p = spec.parameters
    return PlmConfig(
        n_topics=int(p.get("topics_count", 20)),
        alpha=float(p.get("alpha", 0.1)),
        beta=float(p.get("beta", 0.01)),
        iterations=int(p.get("iterations", 1000)),
        chains=int(p.get("chains", 5)),
        optimize_interval=int(p.get("optimize_interval", 50)),
        link_fraction=float(p.get("link_fraction", 1.0)),
        seed=spec.seed,
    )


def _run_train_plm(spec: ExperimentSpec) -> Path:
    prune = float(spec.parameters.get("prune", 0.3))
    corpus = _load_pair(spec, "corpus_a", "corpus_b", prune)
    config = _plm_config(spec)
    output = train(corpus, config)
    cardinality = int(spec.parameters.get("cardinality", 10))
    topics_out = Path(spec.parameters["topics_out"])
    partial = topics_out.with_name(topics_out.name + ".partial")
    export_topics(output, partial, cardinality)
    os.replace(partial, topics_out)
    if spec.parameters.get("theta_out"):
        write_theta_tsv(
            output,
            spec.parameters["theta_out"],
            header=_header_lines(spec, deviations=PLM_DEVIATIONS),
        )
    if spec.parameters.get("phi_out"):
        save_phi_cache(output, spec.parameters["phi_out"])
    return topics_out


LANGUAGE_DIR_FILES = {
    "topics": "topics.json",
    "ref_a": "ref_a.txt",
    "ref_b": "ref_b.txt",
    "aux_a": "aux_a.txt",
    "aux_b": "aux_b.txt",
    "dictionary": "dictionary.tsv",
    "era": "era.tsv",
}


def _load_language_dir(directory: Path, need_targets: bool):
    """Load one language's estimator inputs from the documented layout.

    Layout: topics.json, ref_a.txt/ref_b.txt (narrow reference pair),
    aux_a.txt/aux_b.txt (broad pivot-language pair), dictionary.tsv, era.tsv,
    and for training targets.tsv with (topic-id, target) rows.
    """
    paths = {k: directory / v for k, v in LANGUAGE_DIR_FILES.items()}
    missing = [str(p) for p in paths.values() if not p.exists()]
    if need_targets and not (directory / "targets.tsv").exists():
        missing.append(str(directory / "targets.tsv"))
    if missing:
        raise UsageError(f"language directory {directory} is missing: {', '.join(missing)}")
    topics = load_topics(paths["topics"])
    ref_corpus = load_parallel_corpus(paths["ref_a"], paths["ref_b"], "a", "b", 1.0)
    aux_corpus = load_parallel_corpus(paths["aux_a"], paths["aux_b"], "a", "b", 1.0)
    dictionary = load_dictionary(paths["dictionary"])
    era = load_era_lexicon(paths["era"])
    restrict_a, restrict_b = _topic_word_sets(topics)
    ref_index = build_index(ref_corpus, restrict_a=restrict_a, restrict_b=restrict_b)
    features = [
        extract_features(t, ref_index, dictionary, era, ref_corpus, aux_corpus)
        for t in topics
    ]
    targets = None
    if need_targets:
        targets = [None] * len(topics)
        for line in (directory / "targets.tsv").read_text(encoding="utf-8").splitlines():
            if not line or line.startswith("#"):
                continue
            topic_id, _, value = line.partition("\t")
            index = int(topic_id)
            if not 0 <= index < len(topics):
                raise UsageError(
                    f"{directory / 'targets.tsv'}: topic id {index} outside 0..{len(topics) - 1}"
                )
            targets[index] = float(value)
        if any(t is None for t in targets):
            missing = [i for i, t in enumerate(targets) if t is None]
            raise UsageError(
                f"{directory / 'targets.tsv'}: missing targets for topics {missing}"
            )
    return features, targets


def _run_train_estimator(spec: ExperimentSpec) -> Path:
    root = Path(spec.inputs["train_dir"])
    languages = spec.parameters.get("languages")
    if languages:
        names = [x for x in languages.split(",") if x]
    else:
        names = sorted(p.name for p in root.iterdir() if p.is_dir())
    if not names:
        raise UsageError(f"no language directories under {root}")
    by_language = {}
    for name in names:
        features, targets = _load_language_dir(root / name, need_targets=True)
        by_language[name] = (features, targets)
        if spec.parameters.get("features_out"):
            feature_dir = Path(spec.parameters["features_out"])
            feature_dir.mkdir(parents=True, exist_ok=True)
            write_feature_matrix(features, feature_dir / f"{name}.features.tsv", targets)
    rates = _parse_floats(spec.parameters.get("learning_rates", "0.1,0.5,1.0"))
    losses = [x for x in spec.parameters.get("losses", "linear,square,exponential").split(",") if x]
    stages = int(spec.parameters.get("stages", 50))
    chosen = cross_validate(
        by_language, learning_rates=rates, losses=losses, stage_count=stages,
        seed=spec.seed,
    )
    all_features = [f for feats, _ in by_language.values() for f in feats]
    all_targets = [t for _, targets in by_language.values() for t in targets]
    model = fit(
        all_features, all_targets, loss=chosen.loss,
        learning_rate=chosen.learning_rate, stage_count=stages, seed=spec.seed,
    )
    out = Path(spec.parameters["model_out"])
    partial = out.with_name(out.name + ".partial")
    model.save(partial)
    os.replace(partial, out)
    return out


def _run_estimate(spec: ExperimentSpec) -> Path:
    model = EstimatorModel.load(spec.inputs["model"])
    features, _ = _load_language_dir(Path(spec.inputs["language_dir"]), need_targets=False)
    estimates = predict(model, features)
    rows = [(i, float(v)) for i, v in enumerate(estimates)]
    return write_report(
        spec.parameters["out"], _header_lines(spec), ("topic", "estimate"), rows
    )


def _theta_matrices(theta_path):
    from .plm import read_theta_tsv

    rows = read_theta_tsv(theta_path)
    pairs: dict[str, dict[str, np.ndarray]] = {}
    for doc_id, probs in rows.items():
        pair_id, _, side = doc_id.rpartition(":")
        if side not in ("a", "b") or not pair_id:
            raise UsageError(f"theta row id {doc_id!r} is not of the form '<pair>:<side>'")
        pairs.setdefault(pair_id, {})[side] = probs
    for pair_id, sides in pairs.items():
        if set(sides) != {"a", "b"}:
            raise UsageError(f"theta file is missing a side for pair {pair_id!r}")
    try:
        ordered = sorted(pairs, key=int)
    except ValueError:
        ordered = sorted(pairs)
    theta_a = np.vstack([pairs[p]["a"] for p in ordered])
    theta_b = np.vstack([pairs[p]["b"] for p in ordered])
    return ordered, theta_a, theta_b


def _run_classify(spec: ExperimentSpec) -> Path:
    pair_ids, theta_a, theta_b = _theta_matrices(spec.inputs["theta"])
    labels = read_labels_tsv(spec.inputs["labels"])
    keep = [i for i, p in enumerate(pair_ids) if p in labels]
    if not keep:
        raise UsageError("no documents shared between theta file and label file")
    pair_ids = [pair_ids[i] for i in keep]
    theta_a, theta_b = theta_a[keep], theta_b[keep]
    raw_labels = [labels[p] for p in pair_ids]
    universe = select_labels(raw_labels, int(spec.parameters.get("top_labels", 7)))
    rng = np.random.default_rng([spec.seed, 6])
    order = rng.permutation(len(pair_ids))
    n_test = max(1, int(round(float(spec.parameters.get("test_fraction", 0.5)) * len(pair_ids))))
    test_idx, train_idx = order[:n_test], order[n_test:]
    if train_idx.size == 0:
        raise UsageError("test fraction leaves no training documents")
    model_id = spec.parameters.get("model_id") or Path(spec.inputs["theta"]).stem
    results = []
    for direction, train_theta, test_theta in (
        ("a->b", theta_a, theta_b),
        ("b->a", theta_b, theta_a),
    ):
        train_set = build_theta_set(
            train_theta[train_idx], [raw_labels[i] for i in train_idx], universe
        )
        test_set = build_theta_set(
            test_theta[test_idx], [raw_labels[i] for i in test_idx], universe
        )
        weights = train_classifier(
            train_set, float(spec.parameters.get("regularization", 1e-3))
        )
        results.append((model_id, direction, evaluate_f1(weights, test_set)))
    return write_report(
        spec.parameters["out"], _header_lines(spec), ("model", "direction", "f1"), results
    )


def _run_sweep_cardinality(spec: ExperimentSpec) -> Path:
    topics = load_topics(spec.inputs["topics"])
    corpus = _load_pair(spec, "ref_a", "ref_b", float(spec.parameters.get("prune", 1.0)))
    restrict_a, restrict_b = _topic_word_sets(topics)
    index = build_index(corpus, restrict_a=restrict_a, restrict_b=restrict_b)
    dictionary = (
        load_dictionary(spec.inputs["dictionary"]) if spec.inputs.get("dictionary") else None
    )
    cardinalities = (
        _parse_ints(spec.parameters["cardinalities"])
        if spec.parameters.get("cardinalities")
        else list(CARDINALITY_GRID)
    )
    rows = run_cardinality_sweep(
        index,
        topics,
        dictionary,
        cardinalities=cardinalities,
        include_raw_mta=bool(spec.parameters.get("include_raw_mta")),
    )
    return write_report(
        spec.parameters["out"], _header_lines(spec), ("cardinality", "metric", "mean"), rows
    )


def _run_sweep_links(spec: ExperimentSpec) -> Path:
    prune = float(spec.parameters.get("prune", 0.3))
    train_corpus = _load_pair(spec, "train_a", "train_b", prune)
    if spec.inputs.get("ref_a") and spec.inputs.get("ref_b"):
        ref_corpus = _load_pair(spec, "ref_a", "ref_b", 1.0)
    else:
        ref_corpus = train_corpus
    fractions = (
        _parse_floats(spec.parameters["fractions"])
        if spec.parameters.get("fractions")
        else list(LINK_FRACTION_GRID)
    )
    rows = run_link_sweep(
        train_corpus,
        ref_corpus,
        _plm_config(spec),
        fractions=fractions,
        cardinality=int(spec.parameters.get("cardinality", 10)),
        workers=_workers(spec.parameters),
    )
    return write_report(
        spec.parameters["out"],
        _header_lines(spec, deviations=PLM_DEVIATIONS),
        ("link_fraction", "mean_cnpmi"),
        rows,
    )


def _run_sweep_refsize(spec: ExperimentSpec) -> Path:
    ref_corpus = _load_pair(spec, "ref_a", "ref_b", float(spec.parameters.get("prune", 1.0)))
    topics = load_topics(spec.inputs["topics"])
    fractions = (
        _parse_floats(spec.parameters["fractions"])
        if spec.parameters.get("fractions")
        else list(REFERENCE_FRACTION_GRID)
    )
    rows = run_reference_size_sweep(
        ref_corpus,
        topics,
        fractions=fractions,
        cardinality=int(spec.parameters.get("cardinality", 10)),
        seed=spec.seed,
    )
    tagged = [
        (f, mean, n, "small-reference" if n < SMALL_REFERENCE_DOCS else "")
        for f, mean, n in rows
    ]
    return write_report(
        spec.parameters["out"],
        _header_lines(spec),
        ("fraction", "mean_cnpmi", "documents", "note"),
        tagged,
    )


_HANDLERS = {
    "index": _run_index,
    "score": _run_score,
    "train-plm": _run_train_plm,
    "train-estimator": _run_train_estimator,
    "estimate": _run_estimate,
    "classify": _run_classify,
    "sweep-cardinality": _run_sweep_cardinality,
    "sweep-links": _run_sweep_links,
    "sweep-refsize": _run_sweep_refsize,
}


def run_pipeline(spec: ExperimentSpec) -> Path:
    """Validate the spec and dispatch to its command handler."""
    spec.validate()
    handler = _HANDLERS.get(spec.kind)
    if handler is None:
        raise UsageError(f"unknown command kind {spec.kind!r}")
    return handler(spec)


# ---------------------------------------------------------------------------
# argument parsing


def _add_common(parser):
    parser.add_argument("--config", help="key=value file supplying flag defaults")
    parser.add_argument("--seed", type=int, default=0)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="polytopic",
        description="Multilingual topic quality: metrics, topic model, coherence estimator",
    )
    parser.add_argument("--version", action="version", version=f"polytopic {__version__}")
    sub = parser.add_subparsers(dest="kind", required=True)

    p = sub.add_parser("index", help="build and cache a co-occurrence index")
    _add_common(p)
    p.add_argument("--corpus-a", required=True)
    p.add_argument("--corpus-b", required=True)
    p.add_argument("--lang-a", default="a")
    p.add_argument("--lang-b", default="b")
    p.add_argument("--prune", type=float, default=1.0)
    p.add_argument("--restrict-topics", help="topic file; restrict counting to its words")
    p.add_argument("--out", required=True)

    p = sub.add_parser("score", help="score a topic file against a reference corpus")
    _add_common(p)
    p.add_argument("--topics", required=True)
    p.add_argument("--ref-a", required=True)
    p.add_argument("--ref-b", required=True)
    p.add_argument("--lang-a", default="a")
    p.add_argument("--lang-b", default="b")
    p.add_argument("--prune", type=float, default=1.0)
    p.add_argument("--dictionary")
    p.add_argument("--index-cache", help="reuse a cached index when fresh")
    p.add_argument("--cardinality", type=int, help="truncate topics before scoring")
    p.add_argument("--out", required=True)
    p.add_argument("--json-out")

    p = sub.add_parser("train-plm", help="train the polylingual topic model")
    _add_common(p)
    p.add_argument("--corpus-a", required=True)
    p.add_argument("--corpus-b", required=True)
    p.add_argument("--lang-a", default="a")
    p.add_argument("--lang-b", default="b")
    p.add_argument("--prune", type=float, default=0.3)
    p.add_argument("--topics-count", type=int, default=20)
    p.add_argument("--alpha", type=float, default=0.1)
    p.add_argument("--beta", type=float, default=0.01)
    p.add_argument("--iterations", type=int, default=1000)
    p.add_argument("--chains", type=int, default=5)
    p.add_argument("--optimize-interval", type=int, default=50)
    p.add_argument("--link-fraction", type=float, default=1.0)
    p.add_argument("--cardinality", type=int, default=10)
    p.add_argument("--topics-out", required=True)
    p.add_argument("--theta-out")
    p.add_argument("--phi-out")

    p = sub.add_parser("train-estimator", help="train the coherence estimator")
    _add_common(p)
    p.add_argument("--train-dir", required=True)
    p.add_argument("--languages", help="comma-separated subdirectory names")
    p.add_argument("--learning-rates", default="0.1,0.5,1.0")
    p.add_argument("--losses", default="linear,square,exponential")
    p.add_argument("--stages", type=int, default=50)
    p.add_argument("--model-out", required=True)
    p.add_argument("--features-out", help="directory for per-language feature TSVs")

    p = sub.add_parser("estimate", help="apply a trained estimator to a language directory")
    _add_common(p)
    p.add_argument("--model", required=True)
    p.add_argument("--language-dir", required=True)
    p.add_argument("--out", required=True)

    p = sub.add_parser("classify", help="crosslingual document classification on theta features")
    _add_common(p)
    p.add_argument("--theta", required=True)
    p.add_argument("--labels", required=True)
    p.add_argument("--top-labels", type=int, default=7)
    p.add_argument("--regularization", type=float, default=1e-3)
    p.add_argument("--test-fraction", type=float, default=0.5)
    p.add_argument("--model-id")
    p.add_argument("--out", required=True)

    p = sub.add_parser("sweep-cardinality", help="cnpmi and mta across topic cardinalities")
    _add_common(p)
    p.add_argument("--topics", required=True)
    p.add_argument("--ref-a", required=True)
    p.add_argument("--ref-b", required=True)
    p.add_argument("--lang-a", default="a")
    p.add_argument("--lang-b", default="b")
    p.add_argument("--prune", type=float, default=1.0)
    p.add_argument("--dictionary")
    p.add_argument("--cardinalities", help="comma-separated, default 10,20,30,40,50")
    p.add_argument("--include-raw-mta", action="store_true")
    p.add_argument("--out", required=True)

    p = sub.add_parser("sweep-links", help="mean cnpmi across document-link fractions")
    _add_common(p)
    p.add_argument("--train-a", required=True)
    p.add_argument("--train-b", required=True)
    p.add_argument("--ref-a")
    p.add_argument("--ref-b")
    p.add_argument("--lang-a", default="a")
    p.add_argument("--lang-b", default="b")
    p.add_argument("--prune", type=float, default=0.3)
    p.add_argument("--fractions", help="comma-separated, default 0,0.2,0.4,0.6,0.8,1.0")
    p.add_argument("--topics-count", type=int, default=20)
    p.add_argument("--alpha", type=float, default=0.1)
    p.add_argument("--beta", type=float, default=0.01)
    p.add_argument("--iterations", type=int, default=1000)
    p.add_argument("--chains", type=int, default=5)
    p.add_argument("--optimize-interval", type=int, default=50)
    p.add_argument("--cardinality", type=int, default=10)
    p.add_argument("--workers", type=int, help=f"default ${WORKERS_ENV_VAR} or 1")
    p.add_argument("--out", required=True)

    p = sub.add_parser("sweep-refsize", help="mean cnpmi across reference subsampling fractions")
    _add_common(p)
    p.add_argument("--ref-a", required=True)
    p.add_argument("--ref-b", required=True)
    p.add_argument("--lang-a", default="a")
    p.add_argument("--lang-b", default="b")
    p.add_argument("--prune", type=float, default=1.0)
    p.add_argument("--topics", required=True)
    p.add_argument("--fractions", help="comma-separated, default 0.2,0.4,0.6,0.8,1.0")
    p.add_argument("--cardinality", type=int, default=10)
    p.add_argument("--out", required=True)

    return parser


_INPUT_KEYS = {
    "index": ("corpus_a", "corpus_b", "restrict_topics"),
    "score": ("topics", "ref_a", "ref_b", "dictionary", "index_cache"),
    "train-plm": ("corpus_a", "corpus_b"),
    "train-estimator": ("train_dir",),
    "estimate": ("model", "language_dir"),
    "classify": ("theta", "labels"),
    "sweep-cardinality": ("topics", "ref_a", "ref_b", "dictionary"),
    "sweep-links": ("train_a", "train_b", "ref_a", "ref_b"),
    "sweep-refsize": ("ref_a", "ref_b", "topics"),
}


def spec_from_args(args: argparse.Namespace) -> ExperimentSpec:
    values = {k: v for k, v in vars(args).items() if k not in ("kind", "config", "seed")}
    input_keys = _INPUT_KEYS[args.kind]
    inputs = {k: values.pop(k) for k in input_keys if k in values}
    inputs = {k: v for k, v in inputs.items() if v}
    parameters = {k: v for k, v in values.items() if v is not None}
    return ExperimentSpec(kind=args.kind, inputs=inputs, parameters=parameters, seed=args.seed)


def _config_argv(argv: list[str]) -> list[str]:
    """Expand `--config file` into flag tokens inserted after the subcommand,
    so explicit flags (parsed later) override the file."""
    config_path = None
    for i, token in enumerate(argv):
        if token == "--config" and i + 1 < len(argv):
            config_path = argv[i + 1]
        elif token.startswith("--config="):
            config_path = token.split("=", 1)[1]
    if config_path is None:
        return argv
    if not Path(config_path).exists():
        raise UsageError(f"config file does not exist: {config_path}")
    injected = []
    for line_number, line in enumerate(
        Path(config_path).read_text(encoding="utf-8").splitlines(), 1
    ):
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        key, sep, value = line.partition("=")
        if not sep:
            raise UsageError(
                f"{config_path}:{line_number}: expected key=value, got {line!r}"
            )
        injected.extend([f"--{key.strip().replace('_', '-')}", value.strip()])
    return argv[:1] + injected + argv[1:]


def main(argv: Sequence[str] | None = None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    try:
        argv = _config_argv(argv)
        parser = build_parser()
        try:
            args = parser.parse_args(argv)
        except SystemExit as status:
            return int(status.code or 0)
        spec = spec_from_args(args)
        report = run_pipeline(spec)
        print(report)
        return 0
    except UsageError as err:
        print(f"error: {err}", file=sys.stderr)
        return 2
    except PolytopicError as err:
        print(f"error: {err}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
