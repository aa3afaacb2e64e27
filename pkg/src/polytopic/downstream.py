"""Crosslingual document classification on document-topic features.

One-vs-rest linear classifiers with logistic loss, trained by full-batch
gradient descent; micro-averaged F1 at threshold 0.5. Used to check whether
coherence scores track downstream usefulness.
"""

from __future__ import annotations

import warnings
from collections import Counter
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

from .errors import PolytopicError

GRADIENT_TOLERANCE = 1e-6
MAX_EPOCHS = 1000
# intercept magnitude that saturates the sigmoid for constant-label columns
CONSTANT_LABEL_INTERCEPT = 50.0


@dataclass
class LabeledThetaSet:
    """Document-topic rows with multi-label category sets."""

    thetas: np.ndarray  # (N, K)
    labels: list[frozenset[str]]
    label_universe: tuple[str, ...]

    def __post_init__(self):
        self.thetas = np.asarray(self.thetas, dtype=np.float64)
        if self.thetas.ndim != 2 or self.thetas.shape[0] != len(self.labels):
            raise ValueError("thetas and labels disagree in shape")
        universe = set(self.label_universe)
        for labels in self.labels:
            if not labels <= universe:
                raise ValueError(f"labels {labels - universe} outside the universe")

    @property
    def n_documents(self) -> int:
        return self.thetas.shape[0]

    def label_matrix(self) -> np.ndarray:
        """(N, L) 0/1 matrix in label-universe order."""
        matrix = np.zeros((self.n_documents, len(self.label_universe)))
        for i, labels in enumerate(self.labels):
            for j, category in enumerate(self.label_universe):
                if category in labels:
                    matrix[i, j] = 1.0
        return matrix


def select_labels(raw_labels: Sequence[Iterable[str]], top_count: int) -> tuple[str, ...]:
    """The `top_count` categories with highest document frequency, ties
    broken lexicographically. Emits a warning and shrinks when fewer exist."""
    if top_count < 1:
        raise ValueError("top_count must be >= 1")
    frequency: Counter = Counter()
    for labels in raw_labels:
        frequency.update(set(labels))
    ranked = sorted(frequency, key=lambda c: (-frequency[c], c))
    if len(ranked) < top_count:
        warnings.warn(
            f"only {len(ranked)} distinct categories available, requested {top_count}",
            stacklevel=2,
        )
        top_count = len(ranked)
    return tuple(ranked[:top_count])


def build_theta_set(
    thetas: np.ndarray,
    raw_labels: Sequence[Iterable[str]],
    label_universe: Sequence[str],
) -> LabeledThetaSet:
    """Restrict labels to the universe and drop documents left with none."""
    universe = tuple(label_universe)
    keep_rows, keep_labels = [], []
    for i, labels in enumerate(raw_labels):
        surviving = frozenset(labels) & frozenset(universe)
        if surviving:
            keep_rows.append(i)
            keep_labels.append(surviving)
    return LabeledThetaSet(
        thetas=np.asarray(thetas)[keep_rows], labels=keep_labels, label_universe=universe
    )


def _sigmoid(z: np.ndarray) -> np.ndarray:
    out = np.empty_like(z)
    positive = z >= 0
    out[positive] = 1.0 / (1.0 + np.exp(-z[positive]))
    expz = np.exp(z[~positive])
    out[~positive] = expz / (1.0 + expz)
    return out


def _fit_binary(x_aug: np.ndarray, y: np.ndarray, regularization: float) -> np.ndarray:
    """Logistic regression by gradient descent with a Lipschitz-safe step."""
    n = x_aug.shape[0]
    # gradient of mean log-loss is (L/4n)-Lipschitz with L <= ||X||_F^2
    step = 1.0 / (np.sum(x_aug * x_aug) / (4.0 * n) + regularization + 1e-12)
    w = np.zeros(x_aug.shape[1])
    penalty_mask = np.ones_like(w)
    penalty_mask[-1] = 0.0  # intercept unregularized
    for _ in range(MAX_EPOCHS):
        p = _sigmoid(x_aug @ w)
        gradient = x_aug.T @ (p - y) / n + regularization * penalty_mask * w
        if np.linalg.norm(gradient) < GRADIENT_TOLERANCE:
            break
        w = w - step * gradient
    return w


def train_classifier(train: LabeledThetaSet, regularization: float = 1e-3) -> np.ndarray:
    """One linear model per label; returns (L, K+1) weights, intercept last.

    Labels that are all-positive or all-negative in training get a saturated
    constant-prediction model.
    """
    if train.n_documents == 0:
        raise PolytopicError("empty training set")
    x_aug = np.hstack([train.thetas, np.ones((train.n_documents, 1))])
    y_matrix = train.label_matrix()
    weights = np.zeros((len(train.label_universe), x_aug.shape[1]))
    for j in range(y_matrix.shape[1]):
        y = y_matrix[:, j]
        if y.min() == y.max():
            weights[j, -1] = CONSTANT_LABEL_INTERCEPT if y[0] == 1.0 else -CONSTANT_LABEL_INTERCEPT
        else:
            weights[j] = _fit_binary(x_aug, y, regularization)
    return weights


def evaluate_f1(weights: np.ndarray, test: LabeledThetaSet) -> float:
    """Micro-averaged F1 over all (document, label) decisions at threshold 0.5."""
    if test.n_documents == 0:
        raise PolytopicError("empty test set")
    if weights.shape != (len(test.label_universe), test.thetas.shape[1] + 1):
        raise ValueError(
            f"weight shape {weights.shape} does not match "
            f"{len(test.label_universe)} labels x {test.thetas.shape[1]} topics"
        )
    x_aug = np.hstack([test.thetas, np.ones((test.n_documents, 1))])
    predictions = (x_aug @ weights.T) >= 0.0  # sigmoid(z) >= 0.5 iff z >= 0
    actual = test.label_matrix() > 0.5
    tp = int(np.sum(predictions & actual))
    fp = int(np.sum(predictions & ~actual))
    fn = int(np.sum(~predictions & actual))
    denominator = 2 * tp + fp + fn
    if denominator == 0:
        return 1.0  # no positives anywhere and none predicted
    return 2 * tp / denominator


def read_labels_tsv(path) -> dict[str, frozenset[str]]:
    """Label file: TSV rows (doc-id, comma-separated category names)."""
    out: dict[str, frozenset[str]] = {}
    for line in Path(path).read_text(encoding="utf-8").splitlines():
        if not line or line.startswith("#"):
            continue
        doc_id, _, categories = line.partition("\t")
        out[doc_id] = frozenset(c for c in categories.split(",") if c)
    return out


def write_results_tsv(rows: Sequence[tuple[str, str, float]], path) -> None:
    """Classification results: rows of (model-id, direction, F1)."""
    lines = ["model\tdirection\tf1"]
    for model_id, direction, f1 in rows:
        lines.append(f"{model_id}\t{direction}\t{f1:.10g}")
    Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8")
