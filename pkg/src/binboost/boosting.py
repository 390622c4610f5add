"""Stochastic gradient boosting of binned decision trees.

Binary classification with labels +1 (signal) and -1 (background), boosted
under the binomial log-likelihood.  Scores F accumulate tree outputs on top
of the prior F0; probabilities are sigmoid(2F).  Fitting works on binned
events, application works on raw float rows against the stored thresholds,
and both route missing values by stopping at the current node.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np
from scipy.special import expit

from .binning import FeatureBinning, fit_binning
from .sample import EventSample, build_sample, subsample
from .trees import WEIGHT_EPS, Tree, fit_tree, traverse_bins, traverse_values

__all__ = [
    "FitConfig",
    "Forest",
    "prior",
    "residual",
    "boost_weight_of_event",
    "leaf_weight",
    "fit_forest",
    "predict",
    "predict_batch",
]


@dataclass(frozen=True)
class FitConfig:
    """Hyperparameters of one forest fit."""

    n_trees: int = 100
    depth: int = 3
    shrinkage: float = 0.1
    subsample: float = 0.5
    binning_levels: int = 8
    seed: int = 0

    def __post_init__(self) -> None:
        if self.n_trees < 1:
            raise ValueError("n_trees must be >= 1")
        if self.depth < 1:
            raise ValueError("depth must be >= 1")
        if not 0.0 < self.shrinkage <= 1.0:
            raise ValueError("shrinkage must be in (0, 1]")
        if not 0.0 < self.subsample <= 1.0:
            raise ValueError("subsample must be in (0, 1]")
        if self.binning_levels < 1:
            raise ValueError("binning_levels must be >= 1")


@dataclass
class Forest:
    """A fitted model: prior, per-feature binnings and trees whose node
    weights already include the shrinkage factor."""

    f0: float
    trees: list[Tree]
    binnings: list[FeatureBinning]
    shrinkage: float = 1.0
    config: FitConfig | None = None

    @property
    def n_features(self) -> int:
        return len(self.binnings)


def prior(sample: EventSample) -> float:
    """Initial score: half the log ratio of total signal to background user
    weight, 0 if either total is not positive."""
    w_sig = float(np.sum(sample.signal.user_weights))
    w_bkg = float(np.sum(sample.background.user_weights))
    if w_sig <= 0.0 or w_bkg <= 0.0:
        return 0.0
    return 0.5 * math.log(w_sig / w_bkg)


def residual(label: int, score: float) -> float:
    """Gradient response 2y / (1 + exp(2yF)) for one event."""
    return 2.0 * label * float(expit(-2.0 * label * score))


def boost_weight_of_event(r: float) -> float:
    """Per-event histogram weight |r| * (2 - |r|)."""
    a = abs(r)
    return a * (2.0 - a)


def leaf_weight(residuals: np.ndarray, user_weights: np.ndarray) -> float:
    """Node output sum(w*r) / sum(w*|r|*(2-|r|)), 0 when the denominator's
    magnitude falls below the emptiness guard."""
    r = np.asarray(residuals, dtype=np.float64)
    w = np.asarray(user_weights, dtype=np.float64)
    a = np.abs(r)
    den = float(np.sum(w * (a * (2.0 - a))))
    if abs(den) < WEIGHT_EPS:
        return 0.0
    return float(np.sum(w * r)) / den


def _refresh_responses(sample: EventSample) -> None:
    # r = 2y * sigmoid(-2yF), overflow-stable; boost weight |r|(2-|r|)
    for label, block in sample.blocks():
        block.residuals[:] = 2.0 * label * expit(-2.0 * label * block.scores)
        a = np.abs(block.residuals)
        block.boost_weights[:] = a * (2.0 - a)


def fit_forest(
    X: np.ndarray,
    y: np.ndarray,
    weights: np.ndarray | None = None,
    config: FitConfig | None = None,
) -> Forest:
    """Fit a boosted forest on raw rows.

    Parameters
    ----------
    X : (n_events, n_features) float array; NaN marks missing values and
        +-inf are legal (they land in the outermost bins).
    y : (n_events,) labels; > 0 means signal.  Both {0, 1} and {-1, +1}
        conventions are accepted.  Both classes must be present.
    weights : optional per-event user weights, negative values allowed.
    config : fit hyperparameters; defaults to FitConfig().

    The fit is deterministic given (X, y, weights, config): subsampling draws
    from one seeded generator, and every accumulation is a fixed-order pass.
    """
    cfg = config or FitConfig()
    X = np.asarray(X, dtype=np.float64)
    if X.ndim != 2:
        raise ValueError("X must be 2-d (n_events, n_features)")
    y = np.asarray(y)
    labels = np.where(y > 0, 1, -1)
    if not ((labels == 1).any() and (labels == -1).any()):
        raise ValueError("training data must contain both classes")

    binnings = []
    placeholder = np.zeros((1 << cfg.binning_levels) - 1)
    for j in range(X.shape[1]):
        col = X[:, j]
        if np.isfinite(col).any():
            binnings.append(fit_binning(col, cfg.binning_levels))
        else:
            # all-missing column: every event gets bin 0, every cut candidate
            # has an empty side, so it can never be selected
            binnings.append(FeatureBinning(boundaries=placeholder, levels=cfg.binning_levels))

    sample = build_sample(X, labels, weights, binnings)
    f0 = prior(sample)
    for _, block in sample.blocks():
        block.scores[:] = f0

    rng = np.random.Generator(np.random.PCG64(cfg.seed))
    trees: list[Tree] = []
    for _ in range(cfg.n_trees):
        _refresh_responses(sample)
        subsample(sample, cfg.subsample, rng)
        tree = fit_tree(sample, cfg.depth)
        tree.node_weight *= cfg.shrinkage
        trees.append(tree)
        for _, block in sample.blocks():
            block.scores += tree.node_weight[traverse_bins(tree, block.bins)]

    return Forest(f0=f0, trees=trees, binnings=binnings, shrinkage=cfg.shrinkage, config=cfg)


def _sigmoid2(f: float) -> float:
    # p = 1 / (1 + exp(-2F)) in the branch-stable form; scalar math.exp keeps
    # results identical no matter how rows are chunked across threads
    if f >= 0.0:
        return 1.0 / (1.0 + math.exp(-2.0 * f))
    e = math.exp(2.0 * f)
    return e / (1.0 + e)


def _score_rows(forest: Forest, X: np.ndarray) -> np.ndarray:
    scores = np.full(X.shape[0], forest.f0)
    for tree in forest.trees:
        scores += tree.node_weight[traverse_values(tree, X)]
    return scores


def _predict_chunk(forest: Forest, X: np.ndarray) -> np.ndarray:
    return np.array([_sigmoid2(f) for f in _score_rows(forest, X)])


def predict_batch(forest: Forest, X: np.ndarray, threads: int = 1) -> np.ndarray:
    """Signal probabilities for a batch of raw rows.

    Identical to mapping predict over the rows at any thread count: rows are
    split into contiguous chunks and every chunk runs the same row-wise
    arithmetic.
    """
    X = np.asarray(X, dtype=np.float64)
    if X.ndim != 2:
        raise ValueError("X must be 2-d (n_events, n_features)")
    if X.shape[1] != forest.n_features:
        raise ValueError(
            f"model expects {forest.n_features} features, rows have {X.shape[1]}"
        )
    if X.shape[0] == 0:
        return np.empty(0)
    if threads < 1:
        raise ValueError("threads must be >= 1")
    if threads == 1 or X.shape[0] < 2 * threads:
        return _predict_chunk(forest, X)
    chunks = np.array_split(X, threads)
    with ThreadPoolExecutor(max_workers=threads) as pool:
        parts = list(pool.map(lambda c: _predict_chunk(forest, c), chunks))
    return np.concatenate(parts)


def predict(forest: Forest, row: np.ndarray) -> float:
    """Signal probability of a single feature vector."""
    row = np.asarray(row, dtype=np.float64)
    if row.ndim != 1:
        raise ValueError("row must be 1-d")
    return float(predict_batch(forest, row.reshape(1, -1))[0])
