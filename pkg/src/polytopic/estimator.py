"""Low-resource coherence estimator.

Extracts per-topic features from a narrow reference corpus (plus a
dictionary, an era lexicon, and a broad pivot-language corpus for meaning
drift) and boosts weighted-least-squares linear regressors to predict the
coherence a broad reference would assign. Boosting follows the classic
regression recipe: loss-scaled reweighting per stage, weighted-median
prediction.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Mapping, Sequence

import numpy as np

from .cooccur import CooccurrenceIndex, context_vector, cosine_similarity
from .corpus import BilingualDictionary, CorpusPair, EraLexicon, MultilingualTopic
from .errors import FoldError, UndefinedCorrelationError
from .metrics import cnpmi, mta, pearson, topic_npmi, twc

GAP_SMOOTHING = 0.001
DRIFT_WINDOW = 5
LOSS_KINDS = ("linear", "square", "exponential")
DEFAULT_LEARNING_RATES = (0.1, 0.5, 1.0)
DEFAULT_STAGE_COUNT = 50
MODEL_FORMAT_VERSION = 1

FEATURE_NAMES = (
    "cardinality",
    "cnpmi_ref",
    "inpmi_ref",
    "mta",
    "twc_a",
    "twc_b",
    "mc_ab",
    "mc_ba",
    "icc_ab",
    "icc_ba",
    "era_mean",
    "era_std",
    "drift_mean",
    "drift_std",
)


@dataclass(frozen=True)
class FeatureVector:
    """One topic's features. Era entries are NaN when no topic word is in the
    lexicon; `mask` flags which entries are observed (False = to be imputed)."""

    cardinality: float
    cnpmi_ref: float
    inpmi_ref: float
    mta: float
    twc_a: float
    twc_b: float
    mc_ab: float
    mc_ba: float
    icc_ab: float
    icc_ba: float
    era_mean: float
    era_std: float
    drift_mean: float
    drift_std: float
    mask: tuple[bool, ...] = ()

    def __post_init__(self):
        if not self.mask:
            object.__setattr__(
                self, "mask", tuple(bool(np.isfinite(v)) for v in self._values())
            )

    def _values(self) -> tuple[float, ...]:
        return (
            self.cardinality, self.cnpmi_ref, self.inpmi_ref, self.mta,
            self.twc_a, self.twc_b, self.mc_ab, self.mc_ba,
            self.icc_ab, self.icc_ba, self.era_mean, self.era_std,
            self.drift_mean, self.drift_std,
        )

    def as_array(self) -> np.ndarray:
        return np.array(self._values(), dtype=np.float64)


def _safe_ratio(numerator: float, denominator: float) -> float:
    # the smoothing constant keeps denominators off zero for scores >= 0;
    # guard the measure-zero case where a negative score cancels it exactly
    if denominator == 0.0:
        denominator = 1e-9
    return numerator / denominator


def extract_features(
    topic: MultilingualTopic,
    ref_index: CooccurrenceIndex,
    dictionary: BilingualDictionary,
    era_lexicon: EraLexicon,
    ref_corpus: CorpusPair,
    aux_corpus: CorpusPair,
    window: int = DRIFT_WINDOW,
) -> FeatureVector:
    """Features for one topic against a narrow reference.

    `ref_corpus` and `aux_corpus` must both carry the pivot language on side
    A; drift compares each pivot-side topic word's context vector between the
    two. Era statistics cover only the pivot-side words found in the lexicon
    and are NaN (masked) when none is found.
    """
    npmi_a = topic_npmi(ref_index, topic.words_a, side="a")
    npmi_b = topic_npmi(ref_index, topic.words_b, side="b")
    cnpmi_ref = cnpmi(ref_index, topic)
    years = [era_lexicon.get(w) for w in topic.words_a]
    years = [y for y in years if y is not None]
    if years:
        era_mean = float(np.mean(years))
        era_std = float(np.std(years))
    else:
        era_mean = era_std = float("nan")
    similarities = [
        cosine_similarity(
            context_vector(ref_corpus, "a", w, window),
            context_vector(aux_corpus, "a", w, window),
        )
        for w in topic.words_a
    ]
    return FeatureVector(
        cardinality=float(topic.cardinality),
        cnpmi_ref=cnpmi_ref,
        inpmi_ref=(npmi_a + npmi_b) / 2.0,
        mta=mta(dictionary, topic),
        twc_a=twc(ref_index, topic.words_a, "a"),
        twc_b=twc(ref_index, topic.words_b, "b"),
        mc_ab=_safe_ratio(cnpmi_ref, npmi_a + GAP_SMOOTHING),
        mc_ba=_safe_ratio(cnpmi_ref, npmi_b + GAP_SMOOTHING),
        icc_ab=_safe_ratio(npmi_a + GAP_SMOOTHING, npmi_b + GAP_SMOOTHING),
        icc_ba=_safe_ratio(npmi_b + GAP_SMOOTHING, npmi_a + GAP_SMOOTHING),
        era_mean=era_mean,
        era_std=era_std,
        drift_mean=float(np.mean(similarities)),
        drift_std=float(np.std(similarities)),
    )


def weighted_least_squares(
    x: np.ndarray, y: np.ndarray, weights: np.ndarray
) -> tuple[np.ndarray, float]:
    """Minimum-norm weighted least squares with intercept: returns (coef, intercept)."""
    sqrt_w = np.sqrt(weights)
    design = np.hstack([x, np.ones((x.shape[0], 1))]) * sqrt_w[:, None]
    solution, *_ = np.linalg.lstsq(design, y * sqrt_w, rcond=None)
    return solution[:-1], float(solution[-1])


@dataclass(frozen=True)
class LinearStage:
    coef: np.ndarray
    intercept: float
    weight: float

    def predict(self, x: np.ndarray) -> np.ndarray:
        return x @ self.coef + self.intercept


@dataclass
class EstimatorModel:
    """Trained boosted ensemble plus the feature preprocessing it was fit with."""

    stages: list[LinearStage]
    loss: str
    learning_rate: float
    feature_names: tuple[str, ...]
    norm_mean: np.ndarray
    norm_scale: np.ndarray
    imputation: np.ndarray
    weight_history: list[np.ndarray] = field(default_factory=list, repr=False)

    def save(self, path) -> None:
        doc = {
            "format_version": MODEL_FORMAT_VERSION,
            "kind": "boosted-linear-coherence-estimator",
            "loss": self.loss,
            "learning_rate": self.learning_rate,
            "feature_names": list(self.feature_names),
            "normalization": {
                "mean": self.norm_mean.tolist(),
                "scale": self.norm_scale.tolist(),
            },
            "imputation": self.imputation.tolist(),
            "stages": [
                {
                    "coef": stage.coef.tolist(),
                    "intercept": stage.intercept,
                    "weight": stage.weight,
                }
                for stage in self.stages
            ],
        }
        Path(path).write_text(json.dumps(doc, indent=1) + "\n", encoding="utf-8")

    @staticmethod
    def load(path) -> "EstimatorModel":
        doc = json.loads(Path(path).read_text(encoding="utf-8"))
        if doc.get("format_version") != MODEL_FORMAT_VERSION:
            raise ValueError(
                f"unsupported model format version {doc.get('format_version')}"
            )
        return EstimatorModel(
            stages=[
                LinearStage(
                    coef=np.array(s["coef"], dtype=np.float64),
                    intercept=float(s["intercept"]),
                    weight=float(s["weight"]),
                )
                for s in doc["stages"]
            ],
            loss=doc["loss"],
            learning_rate=float(doc["learning_rate"]),
            feature_names=tuple(doc["feature_names"]),
            norm_mean=np.array(doc["normalization"]["mean"], dtype=np.float64),
            norm_scale=np.array(doc["normalization"]["scale"], dtype=np.float64),
            imputation=np.array(doc["imputation"], dtype=np.float64),
        )


def _feature_matrix(features: Sequence[FeatureVector] | np.ndarray) -> np.ndarray:
    if isinstance(features, np.ndarray):
        return np.asarray(features, dtype=np.float64)
    return np.vstack([f.as_array() for f in features])


def _loss_values(errors: np.ndarray, max_error: float, loss: str) -> np.ndarray:
    scaled = errors / max_error
    if loss == "linear":
        return scaled
    if loss == "square":
        return scaled**2
    if loss == "exponential":
        return 1.0 - np.exp(-scaled)
    raise ValueError(f"loss must be one of {LOSS_KINDS}, got {loss!r}")


def fit(
    features: Sequence[FeatureVector] | np.ndarray,
    targets: Sequence[float],
    loss: str = "linear",
    learning_rate: float = 1.0,
    stage_count: int = DEFAULT_STAGE_COUNT,
    seed: int = 0,
    keep_weight_history: bool = False,
) -> EstimatorModel:
    """Boosted regression fit.

    Stages are weighted-least-squares linear fits under loss-scaled sample
    reweighting (no resampling, so `seed` does not influence the result).
    Boosting stops early on a perfect stage or when the weighted average
    loss reaches 0.5; a degenerate first stage is kept with unit weight so
    the model always has at least one stage.
    """
    del seed  # deterministic: reweighting, not resampling
    if loss not in LOSS_KINDS:
        raise ValueError(f"loss must be one of {LOSS_KINDS}, got {loss!r}")
    if learning_rate <= 0:
        raise ValueError("learning_rate must be positive")
    if stage_count < 1:
        raise ValueError("stage_count must be >= 1")
    x_raw = _feature_matrix(features)
    y = np.asarray(targets, dtype=np.float64)
    if x_raw.shape[0] != y.shape[0]:
        raise ValueError("features and targets disagree in length")
    if x_raw.shape[0] < 2:
        raise ValueError("need at least 2 training samples")

    observed = np.isfinite(x_raw)
    imputation = np.zeros(x_raw.shape[1])
    for j in range(x_raw.shape[1]):
        column = x_raw[observed[:, j], j]
        imputation[j] = column.mean() if column.size else 0.0
    x_filled = np.where(observed, x_raw, imputation)
    norm_mean = x_filled.mean(axis=0)
    norm_scale = x_filled.std(axis=0)
    norm_scale[norm_scale == 0.0] = 1.0
    x = (x_filled - norm_mean) / norm_scale

    n = x.shape[0]
    sample_weight = np.full(n, 1.0 / n)
    stages: list[LinearStage] = []
    history: list[np.ndarray] = []
    perfect = 1e-10 * max(1.0, float(np.abs(y).max()))
    for _ in range(stage_count):
        coef, intercept = weighted_least_squares(x, y, sample_weight)
        predictions = x @ coef + intercept
        errors = np.abs(predictions - y)
        max_error = errors.max()
        if max_error <= perfect:
            # perfect stage: keep it; any positive weight works for the median
            stages.append(LinearStage(coef, intercept, 1.0))
            history.append(sample_weight.copy())
            break
        losses = _loss_values(errors, max_error, loss)
        avg_loss = float(np.dot(sample_weight, losses))
        if avg_loss >= 0.5:
            if not stages:
                stages.append(LinearStage(coef, intercept, 1.0))
                history.append(sample_weight.copy())
            break
        beta = avg_loss / (1.0 - avg_loss)
        stage_weight = learning_rate * math.log(1.0 / beta)
        stages.append(LinearStage(coef, intercept, stage_weight))
        sample_weight = sample_weight * np.power(beta, learning_rate * (1.0 - losses))
        total = sample_weight.sum()
        if not np.isfinite(total) or total <= 0.0:
            break  # weights degenerated (extreme learning rate); keep stages so far
        sample_weight = sample_weight / total
        history.append(sample_weight.copy())
    model = EstimatorModel(
        stages=stages,
        loss=loss,
        learning_rate=learning_rate,
        feature_names=FEATURE_NAMES,
        norm_mean=norm_mean,
        norm_scale=norm_scale,
        imputation=imputation,
    )
    if keep_weight_history:
        model.weight_history = history
    return model


def weighted_median(values: np.ndarray, weights: np.ndarray) -> float:
    """Smallest value whose cumulative weight reaches half the total."""
    order = np.argsort(values, kind="stable")
    cumulative = np.cumsum(weights[order])
    pivot = np.searchsorted(cumulative, 0.5 * cumulative[-1])
    return float(values[order][min(pivot, values.shape[0] - 1)])


def predict(model: EstimatorModel, features) -> float | np.ndarray:
    """Weighted median of stage predictions, after the model's stored
    imputation and normalization. Accepts one FeatureVector or a sequence."""
    single = isinstance(features, FeatureVector)
    x_raw = _feature_matrix([features] if single else features)
    x_filled = np.where(np.isfinite(x_raw), x_raw, model.imputation)
    x = (x_filled - model.norm_mean) / model.norm_scale
    stage_predictions = np.vstack([stage.predict(x) for stage in model.stages])
    stage_weights = np.array([stage.weight for stage in model.stages])
    out = np.array(
        [
            weighted_median(stage_predictions[:, i], stage_weights)
            for i in range(x.shape[0])
        ]
    )
    return float(out[0]) if single else out


@dataclass(frozen=True)
class CrossValidationResult:
    learning_rate: float
    loss: str
    mean_correlation: float
    table: tuple[tuple[float, str, float], ...]  # (learning rate, loss, score)


def language_folds(languages: Sequence[str], n_folds: int, seed: int) -> list[list[str]]:
    """Seeded shuffle of whole languages into `n_folds` near-even folds."""
    if len(languages) < n_folds:
        raise FoldError(
            f"need at least {n_folds} languages for {n_folds}-fold validation, "
            f"got {len(languages)}"
        )
    rng = np.random.default_rng([seed, 3])
    ordered = sorted(languages)
    shuffled = [ordered[i] for i in rng.permutation(len(ordered))]
    return [list(part) for part in np.array_split(np.array(shuffled, dtype=object), n_folds)]


def cross_validate(
    features_by_language: Mapping[str, tuple[Sequence[FeatureVector], Sequence[float]]],
    learning_rates: Sequence[float] = DEFAULT_LEARNING_RATES,
    losses: Sequence[str] = LOSS_KINDS,
    stage_count: int = DEFAULT_STAGE_COUNT,
    n_folds: int = 3,
    seed: int = 0,
) -> CrossValidationResult:
    """Grid search by cross-validation over whole languages.

    Languages are shuffled with the seed and split into `n_folds` folds; a
    grid point's score is the mean Pearson correlation between held-out
    predictions and targets over the folds (folds where the correlation is
    undefined are skipped). Ties keep the earliest grid point.
    """
    folds = language_folds(sorted(features_by_language), n_folds, seed)
    all_langs = [lang for fold in folds for lang in fold]

    def stacked(langs):
        xs, ys = [], []
        for lang in langs:
            features, targets = features_by_language[lang]
            xs.append(_feature_matrix(features))
            ys.extend(targets)
        return np.vstack(xs), np.array(ys, dtype=np.float64)

    best: CrossValidationResult | None = None
    table = []
    for rate in learning_rates:
        for loss in losses:
            fold_scores = []
            for held_out in folds:
                train_langs = [l for l in all_langs if l not in held_out]
                x_train, y_train = stacked(train_langs)
                x_test, y_test = stacked(held_out)
                model = fit(
                    x_train, y_train, loss=loss, learning_rate=rate,
                    stage_count=stage_count,
                )
                predictions = predict(model, x_test)
                try:
                    fold_scores.append(pearson(predictions, y_test))
                except UndefinedCorrelationError:
                    continue
            score = float(np.mean(fold_scores)) if fold_scores else -np.inf
            table.append((rate, loss, score))
            if best is None or score > best.mean_correlation:
                best = CrossValidationResult(rate, loss, score, ())
    assert best is not None
    return CrossValidationResult(
        best.learning_rate, best.loss, best.mean_correlation, tuple(table)
    )


def write_feature_matrix(
    features: Sequence[FeatureVector],
    path,
    targets: Sequence[float] | None = None,
) -> None:
    """Feature matrix as TSV with a header row naming the features."""
    header = "topic\t" + "\t".join(FEATURE_NAMES)
    if targets is not None:
        header += "\ttarget"
    lines = [header]
    for i, feature in enumerate(features):
        row = [str(i)] + [f"{v:.10g}" for v in feature.as_array()]
        if targets is not None:
            row.append(f"{targets[i]:.10g}")
        lines.append("\t".join(row))
    Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8")
