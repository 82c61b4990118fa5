"""Label encoding, stratified k-fold CV, weighted metrics, experiments.

Scoring pools the held-out predictions of all folds into one confusion
matrix and computes support-weighted one-vs-rest metrics from it. With
that convention weighted recall equals accuracy by construction.
"""

from __future__ import annotations

import json
import warnings
from dataclasses import dataclass, field, replace
from typing import Optional, Sequence

import numpy as np

from .data import Dataset
from .ensemble import EnsembleConfig, train_ensemble
from .errors import ConfigError
from .features import ExtractionConfig, FeatureMatrix, extract_feature_matrix

METRIC_NAMES = ("f1", "accuracy", "precision", "recall", "fpr", "fnr")


@dataclass
class LabelEncoding:
    """Bijection between user ids and codes 0..q-1, lexicographic order."""

    classes: list[str]

    @property
    def q(self) -> int:
        return len(self.classes)

    def encode(self, labels: Sequence[str]) -> np.ndarray:
        code = {c: i for i, c in enumerate(self.classes)}
        return np.array([code[l] for l in labels], dtype=np.int64)

    def decode(self, codes: Sequence[int]) -> list[str]:
        return [self.classes[c] for c in codes]


def encode_labels(labels: Sequence[str]) -> LabelEncoding:
    if len(labels) == 0:
        raise ConfigError("cannot encode an empty label list")
    return LabelEncoding(sorted(set(labels)))


@dataclass
class FoldAssignment:
    k: int
    fold_of: np.ndarray  # per-row fold index in [0, k)
    seed: int
    small_classes: list[str] = field(default_factory=list)


def stratified_folds(labels: Sequence[str], k: int, seed: int) -> FoldAssignment:
    """Shuffle rows, then deal each class round-robin across folds.

    Per-class per-fold counts differ by at most one. Classes with fewer
    rows than folds are assigned as far as they go and flagged with a
    warning.
    """
    if k < 2:
        raise ConfigError("fold count k must be >= 2")
    labels_arr = np.asarray(labels)
    n = labels_arr.shape[0]
    rng = np.random.default_rng(seed)
    perm = rng.permutation(n)
    fold_of = np.full(n, -1, dtype=np.int64)
    small = []
    for cls in sorted(set(labels_arr.tolist())):
        rows = perm[labels_arr[perm] == cls]
        fold_of[rows] = np.arange(rows.shape[0], dtype=np.int64) % k
        if rows.shape[0] < k:
            small.append(str(cls))
    if small:
        warnings.warn(
            f"{len(small)} class(es) have fewer rows than k={k}; "
            f"some folds will lack them: {small[:5]}",
            stacklevel=2,
        )
    return FoldAssignment(k, fold_of, seed, small)


def confusion_matrix(y_true: np.ndarray, y_pred: np.ndarray, q: int) -> np.ndarray:
    cm = np.zeros((q, q), dtype=np.int64)
    np.add.at(cm, (y_true, y_pred), 1)
    return cm


@dataclass
class MetricsReport:
    f1: float
    accuracy: float
    precision: float
    recall: float
    fpr: float
    fnr: float
    n_samples: int = 0

    def metric(self, name: str) -> float:
        return getattr(self, name)

    def as_percentages(self) -> dict[str, float]:
        """Metrics as percentages rounded to 2 decimals for display."""
        return {name: round(getattr(self, name) * 100.0, 2) for name in METRIC_NAMES}


def weighted_metrics(cm: np.ndarray) -> MetricsReport:
    """Support-weighted one-vs-rest metrics from a pooled confusion matrix."""
    cm = np.asarray(cm, dtype=np.float64)
    total = cm.sum()
    if total <= 0:
        raise ConfigError("confusion matrix is empty")
    support = cm.sum(axis=1)
    tp = np.diag(cm)
    fp = cm.sum(axis=0) - tp
    fn = support - tp
    tn = total - tp - fp - fn

    def safe_div(num, den):
        out = np.zeros_like(num)
        np.divide(num, den, out=out, where=den > 0)
        return out

    precision = safe_div(tp, tp + fp)
    recall = safe_div(tp, tp + fn)
    f1 = safe_div(2.0 * precision * recall, precision + recall)
    fpr = safe_div(fp, fp + tn)
    fnr = safe_div(fn, fn + tp)

    def weighted(per_class):
        return float(np.sum(per_class * support) / total)

    return MetricsReport(
        f1=weighted(f1),
        accuracy=float(np.trace(cm) / total),
        precision=weighted(precision),
        recall=weighted(recall),
        fpr=weighted(fpr),
        fnr=weighted(fnr),
        n_samples=int(total),
    )


def _fold_seed(model_seed: int, cv_seed: int, fold: int) -> int:
    ss = np.random.SeedSequence([model_seed & 0xFFFFFFFFFFFFFFFF, cv_seed & 0xFFFFFFFFFFFFFFFF, fold])
    return int(ss.generate_state(1)[0])


def cross_validate_matrix(
    m: FeatureMatrix,
    model: EnsembleConfig,
    k: int,
    seed: int,
    n_threads: int = 1,
) -> MetricsReport:
    """Stratified k-fold CV over an already-extracted feature matrix."""
    encoding = encode_labels(m.labels)
    y = encoding.encode(m.labels)
    folds = stratified_folds(m.labels, k, seed)
    cm = np.zeros((encoding.q, encoding.q), dtype=np.int64)
    for f in range(k):
        test = folds.fold_of == f
        train = ~test
        if not test.any():
            continue
        cfg = replace(model, seed=_fold_seed(model.seed, seed, f))
        fitted = train_ensemble(m.values[train], y[train], cfg, n_threads=n_threads)
        pred = fitted.predict(m.values[test])
        cm += confusion_matrix(y[test], pred, encoding.q)
    return weighted_metrics(cm)


def cross_validate(
    d: Dataset,
    extraction: ExtractionConfig,
    model: EnsembleConfig,
    k: int,
    seed: int,
    n_threads: int = 1,
) -> MetricsReport:
    """Extract features once on the full dataset, then run stratified CV.

    Coherence features are computed globally before folding, mirroring a
    pipeline where features precede the shuffle; a sample's coherence
    set may therefore span train and test rows of the same user.
    """
    m = extract_feature_matrix(d, extraction)
    return cross_validate_matrix(m, model, k, seed, n_threads=n_threads)


def slice_alpha(m: FeatureMatrix, alpha: int) -> FeatureMatrix:
    """Restrict a matrix extracted at a larger alpha to dc_1..dc_alpha."""
    if alpha > len(m.columns) - 7:
        raise ConfigError(f"matrix holds only {len(m.columns) - 7} coherence columns")
    cols = 7 + alpha
    return FeatureMatrix(m.values[:, :cols], m.labels, m.columns[:cols], m.fill_count)


@dataclass
class ExperimentResult:
    algorithms: list[str]
    alphas: list[int]  # always includes 0 (the no-coherence baseline)
    reports: dict[tuple[str, int], MetricsReport]
    deltas: dict[tuple[str, int], dict[str, float]]  # percent deltas vs alpha=0


def run_experiment(
    d: Dataset,
    algorithms: Sequence[str],
    alpha_list: Sequence[int],
    extraction: Optional[ExtractionConfig] = None,
    model: Optional[EnsembleConfig] = None,
    k: int = 10,
    seed: int = 0,
    n_threads: int = 1,
) -> ExperimentResult:
    """One CV report per (algorithm, alpha) plus deltas against alpha=0."""
    if not alpha_list:
        raise ConfigError("alpha_list must not be empty")
    extraction = extraction or ExtractionConfig()
    model = model or EnsembleConfig()
    alphas = sorted(set(int(a) for a in alpha_list) | {0})
    full = extract_feature_matrix(d, replace(extraction, alpha=max(alphas)))

    reports: dict[tuple[str, int], MetricsReport] = {}
    for alg in algorithms:
        cfg = replace(model, algorithm=alg)
        for alpha in alphas:
            reports[(alg, alpha)] = cross_validate_matrix(
                slice_alpha(full, alpha), cfg, k, seed, n_threads=n_threads
            )

    deltas: dict[tuple[str, int], dict[str, float]] = {}
    for alg in algorithms:
        base = reports[(alg, 0)].as_percentages()
        for alpha in alphas:
            cur = reports[(alg, alpha)].as_percentages()
            deltas[(alg, alpha)] = {
                name: round(cur[name] - base[name], 2) for name in METRIC_NAMES
            }
    return ExperimentResult(list(algorithms), alphas, reports, deltas)


def _alpha_name(alpha: int) -> str:
    return "NoDC" if alpha == 0 else f"{alpha}-DC"


def experiment_json(result: ExperimentResult) -> str:
    doc = {
        "algorithms": result.algorithms,
        "alphas": result.alphas,
        "cells": [
            {
                "algorithm": alg,
                "alpha": alpha,
                "label": _alpha_name(alpha),
                "metrics": result.reports[(alg, alpha)].as_percentages(),
                "delta_vs_nodc": result.deltas[(alg, alpha)],
            }
            for alg in result.algorithms
            for alpha in result.alphas
        ],
    }
    return json.dumps(doc, sort_keys=True, indent=2)


def experiment_table(result: ExperimentResult) -> str:
    """Aligned text table: metric rows, one column block per (alg, alpha)."""
    headers = ["Measure"]
    for alg in result.algorithms:
        for alpha in result.alphas:
            headers.append(f"{alg}/{_alpha_name(alpha)}")
            if alpha != 0:
                headers.append("d")
    rows = []
    for name in METRIC_NAMES:
        row = [name.upper() if name in ("fpr", "fnr") else name.capitalize()]
        for alg in result.algorithms:
            for alpha in result.alphas:
                row.append("%.2f" % result.reports[(alg, alpha)].as_percentages()[name])
                if alpha != 0:
                    row.append("%+.2f" % result.deltas[(alg, alpha)][name])
        rows.append(row)
    widths = [max(len(r[i]) for r in [headers] + rows) for i in range(len(headers))]
    lines = ["  ".join(h.ljust(w) for h, w in zip(headers, widths))]
    for row in rows:
        lines.append("  ".join(c.rjust(w) for c, w in zip(row, widths)))
    return "\n".join(lines) + "\n"


def sweep_csv(result: ExperimentResult) -> str:
    """Plot-ready CSV of the alpha sweep, one line per (algorithm, alpha)."""
    lines = ["algorithm,alpha," + ",".join(METRIC_NAMES) + ","
             + ",".join(f"delta_{m}" for m in METRIC_NAMES)]
    for alg in result.algorithms:
        for alpha in result.alphas:
            pct = result.reports[(alg, alpha)].as_percentages()
            d = result.deltas[(alg, alpha)]
            lines.append(
                f"{alg},{alpha},"
                + ",".join("%.2f" % pct[m] for m in METRIC_NAMES)
                + ","
                + ",".join("%.2f" % d[m] for m in METRIC_NAMES)
            )
    return "\n".join(lines) + "\n"
