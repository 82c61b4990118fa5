"""Average-ensemble classifiers over from-scratch decision trees.

Three variants share one tree grower:

* rf         - bootstrap resampling, sqrt feature subsets, optimal splits
* extratrees - no resampling, sqrt feature subsets, random splits
* bagging    - bootstrap resampling, all features, optimal splits

Prediction averages the per-tree leaf class-frequency vectors and takes
the argmax, ties broken toward the lowest encoded label.
"""

from __future__ import annotations

import json
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, replace
from typing import Optional, TextIO, Union

import numpy as np

from . import _tree
from .errors import ConfigError, TrainingError

ALGORITHMS = ("rf", "extratrees", "bagging")

_ALGO_DEFAULTS = {
    # algorithm: (bootstrap, max_features)
    "rf": (True, "sqrt"),
    "extratrees": (False, "sqrt"),
    "bagging": (True, "all"),
}


@dataclass
class EnsembleConfig:
    algorithm: str = "rf"
    n_estimators: int = 100
    max_features: Optional[str] = None  # "sqrt" | "all"; None derives from algorithm
    bootstrap: Optional[bool] = None  # None derives from algorithm
    min_samples_split: int = 2
    max_depth: Optional[int] = None
    seed: int = 0

    def validate(self) -> None:
        if self.algorithm not in ALGORITHMS:
            raise ConfigError(f"algorithm must be one of {ALGORITHMS}, got {self.algorithm!r}")
        if self.n_estimators < 1:
            raise ConfigError("n_estimators must be >= 1")
        if self.min_samples_split < 2:
            raise ConfigError("min_samples_split must be >= 2")
        if self.max_features not in (None, "sqrt", "all"):
            raise ConfigError("max_features must be 'sqrt', 'all', or None")

    def resolved_bootstrap(self) -> bool:
        if self.bootstrap is not None:
            return self.bootstrap
        return _ALGO_DEFAULTS[self.algorithm][0]

    def resolved_max_features(self, n_features: int) -> int:
        choice = self.max_features or _ALGO_DEFAULTS[self.algorithm][1]
        if choice == "all":
            return n_features
        return max(1, int(math.floor(math.sqrt(n_features))))

    def uses_random_split(self) -> bool:
        return self.algorithm == "extratrees"


@dataclass
class EnsembleModel:
    """A trained forest stored as concatenated flat node arrays."""

    config: EnsembleConfig
    n_classes: int
    n_features: int
    node_feature: np.ndarray
    node_threshold: np.ndarray
    node_left: np.ndarray
    node_right: np.ndarray
    node_leaf: np.ndarray  # (total_nodes, n_classes)
    tree_offsets: np.ndarray  # (n_estimators + 1,)

    @property
    def n_estimators(self) -> int:
        return len(self.tree_offsets) - 1

    def predict_proba(self, X: np.ndarray) -> np.ndarray:
        X = np.atleast_2d(np.asarray(X, dtype=np.float64))
        if X.shape[1] != self.n_features:
            raise ConfigError(
                f"feature width mismatch: model expects {self.n_features}, got {X.shape[1]}"
            )
        out = np.zeros((X.shape[0], self.n_classes), dtype=np.float64)
        _tree.predict_proba_kernel(
            X, self.node_feature, self.node_threshold, self.node_left,
            self.node_right, self.node_leaf, self.tree_offsets, out,
        )
        return out

    def predict(self, X: np.ndarray) -> np.ndarray:
        # np.argmax takes the first maximum, i.e. the lowest encoded label.
        return np.argmax(self.predict_proba(X), axis=1)


def bootstrap_sample(n: int, rng: np.random.Generator) -> np.ndarray:
    """Draw exactly n row positions uniformly with replacement."""
    if n < 1:
        raise ConfigError("cannot bootstrap an empty dataset")
    return rng.integers(0, n, size=n)


def _as_split_inputs(X, y, features):
    X = np.ascontiguousarray(X, dtype=np.float64)
    y = np.ascontiguousarray(y, dtype=np.int64)
    cand = np.sort(np.asarray(features, dtype=np.int64))
    rows = np.arange(X.shape[0], dtype=np.int64)
    q = int(y.max()) + 1 if y.size else 0
    return X, y, q, rows, cand


def find_optimal_split(X, y, features) -> Optional[tuple[int, float, float]]:
    """Exhaustive best Gini split over the candidate features, or None."""
    X, y, q, rows, cand = _as_split_inputs(X, y, features)
    f, thr, gain = _tree.search_optimal_split(X, y, q, rows, cand)
    if f < 0:
        return None
    return int(f), float(thr), float(gain)


def find_random_split(
    X, y, features, rng: Union[np.random.Generator, int]
) -> Optional[tuple[int, float, float]]:
    """Best of one uniform random cut per candidate feature, or None."""
    X, y, q, rows, cand = _as_split_inputs(X, y, features)
    if isinstance(rng, np.random.Generator):
        seed = int(rng.integers(0, 2**32))
    else:
        seed = int(rng) & 0xFFFFFFFF
    _tree.seed_rng(seed)
    f, thr, gain = _tree.search_random_split(X, y, q, rows, cand)
    if f < 0:
        return None
    return int(f), float(thr), float(gain)


def _tree_seed(master_seed: int, tree_index: int) -> tuple[int, np.random.Generator]:
    ss = np.random.SeedSequence([master_seed & 0xFFFFFFFFFFFFFFFF, tree_index])
    node_seed = int(ss.generate_state(1)[0])
    return node_seed, np.random.default_rng(ss)


def train_ensemble(
    X: np.ndarray,
    y: np.ndarray,
    cfg: EnsembleConfig,
    n_threads: int = 1,
) -> EnsembleModel:
    """Train n_estimators trees; bit-deterministic for a fixed seed.

    Each tree's randomness derives from (seed, tree index) only, so the
    result is independent of n_threads and of tree build order.
    """
    cfg.validate()
    X = np.ascontiguousarray(X, dtype=np.float64)
    y = np.ascontiguousarray(y, dtype=np.int64)
    if X.size == 0 or X.shape[0] != y.shape[0]:
        raise TrainingError(f"bad training shapes X={X.shape}, y={y.shape}")
    n, f = X.shape
    q = int(y.max()) + 1
    bootstrap = cfg.resolved_bootstrap()
    max_features = cfg.resolved_max_features(f)
    random_split = cfg.uses_random_split()
    max_depth = -1 if cfg.max_depth is None else cfg.max_depth

    def build(i: int):
        node_seed, boot_rng = _tree_seed(cfg.seed, i)
        idx = bootstrap_sample(n, boot_rng) if bootstrap else np.arange(n, dtype=np.int64)
        return _tree.grow_tree(
            X, y, q, idx, max_features, random_split,
            cfg.min_samples_split, max_depth, node_seed,
        )

    if n_threads > 1:
        with ThreadPoolExecutor(max_workers=n_threads) as pool:
            trees = list(pool.map(build, range(cfg.n_estimators)))
    else:
        trees = [build(i) for i in range(cfg.n_estimators)]

    offsets = np.zeros(cfg.n_estimators + 1, dtype=np.int64)
    for i, t in enumerate(trees):
        offsets[i + 1] = offsets[i] + t[0].shape[0]
    return EnsembleModel(
        config=replace(cfg),
        n_classes=q,
        n_features=f,
        node_feature=np.concatenate([t[0] for t in trees]),
        node_threshold=np.concatenate([t[1] for t in trees]),
        node_left=np.concatenate([t[2] for t in trees]),
        node_right=np.concatenate([t[3] for t in trees]),
        node_leaf=np.concatenate([t[4] for t in trees]),
        tree_offsets=offsets,
    )


def predict(model: EnsembleModel, row: np.ndarray) -> tuple[np.ndarray, int]:
    """Class probability vector and argmax label for one feature row."""
    proba = model.predict_proba(np.asarray(row, dtype=np.float64).reshape(1, -1))[0]
    return proba, int(np.argmax(proba))


MODEL_FORMAT = "geocoherence-ensemble"
MODEL_VERSION = 1


def save_model(model: EnsembleModel, out: TextIO) -> None:
    """Serialize to self-describing JSON; round-trips predictions exactly."""
    doc = {
        "format": MODEL_FORMAT,
        "version": MODEL_VERSION,
        "config": {
            "algorithm": model.config.algorithm,
            "n_estimators": model.config.n_estimators,
            "max_features": model.config.max_features,
            "bootstrap": model.config.bootstrap,
            "min_samples_split": model.config.min_samples_split,
            "max_depth": model.config.max_depth,
            "seed": model.config.seed,
        },
        "n_classes": model.n_classes,
        "n_features": model.n_features,
        "tree_offsets": model.tree_offsets.tolist(),
        "nodes": {
            "feature": model.node_feature.tolist(),
            "threshold": model.node_threshold.tolist(),
            "left": model.node_left.tolist(),
            "right": model.node_right.tolist(),
            "leaf": model.node_leaf.tolist(),
        },
    }
    json.dump(doc, out)


def load_model(source: TextIO) -> EnsembleModel:
    doc = json.load(source)
    if doc.get("format") != MODEL_FORMAT or doc.get("version") != MODEL_VERSION:
        raise ConfigError("not a recognized ensemble model file")
    nodes = doc["nodes"]
    return EnsembleModel(
        config=EnsembleConfig(**doc["config"]),
        n_classes=doc["n_classes"],
        n_features=doc["n_features"],
        node_feature=np.asarray(nodes["feature"], dtype=np.int64),
        node_threshold=np.asarray(nodes["threshold"], dtype=np.float64),
        node_left=np.asarray(nodes["left"], dtype=np.int64),
        node_right=np.asarray(nodes["right"], dtype=np.int64),
        node_leaf=np.asarray(nodes["leaf"], dtype=np.float64),
        tree_offsets=np.asarray(doc["tree_offsets"], dtype=np.int64),
    )
