"""Model quality and feature importance tooling.

Three importance views: summed cut gains (cheap, misleading under feature
correlations), per-event path gains, and recursive elimination, which refits
on shrinking feature sets and scores each feature by the validation-AUC drop
its removal causes.  Elimination is the expensive, trustworthy one: for N
features it runs exactly N(N+1)/2 fits.
"""

from __future__ import annotations

import dataclasses
import math
from dataclasses import dataclass

import numpy as np

from .boosting import FitConfig, Forest, fit_forest, predict_batch

__all__ = [
    "ImportanceReport",
    "roc_auc",
    "gain_importance",
    "individual_importance",
    "elimination_importance",
]


@dataclass
class ImportanceReport:
    """Per-feature scores plus, for elimination, the removal trail.

    ``order`` lists feature indices in removal order with the never-removed
    survivor last; ``step_aucs`` starts with the all-features validation AUC
    followed by the AUC after each removal; ``n_fits`` counts forest fits.
    """

    method: str
    scores: np.ndarray
    order: list[int] | None = None
    step_aucs: list[float] | None = None
    n_fits: int | None = None


def roc_auc(scores: np.ndarray, labels: np.ndarray, weights: np.ndarray | None = None) -> float:
    """Weighted probability that a signal event outscores a background one,
    counting ties as half.  Any monotone transform of the scores gives the
    same value.  Raises if either class is absent or has non-positive total
    weight."""
    scores = np.asarray(scores, dtype=np.float64)
    labels = np.asarray(labels)
    n = scores.shape[0]
    if weights is None:
        weights = np.ones(n)
    else:
        weights = np.asarray(weights, dtype=np.float64)
    if labels.shape != (n,) or weights.shape != (n,):
        raise ValueError("scores, labels and weights must have equal length")
    is_sig = labels > 0
    w_sig = float(np.sum(weights[is_sig]))
    w_bkg = float(np.sum(weights[~is_sig]))
    if w_sig <= 0.0 or w_bkg <= 0.0:
        raise ValueError("roc_auc needs both classes with positive total weight")

    uniq, inverse = np.unique(scores, return_inverse=True)
    sig_at = np.bincount(inverse, weights=np.where(is_sig, weights, 0.0), minlength=uniq.size)
    bkg_at = np.bincount(inverse, weights=np.where(is_sig, 0.0, weights), minlength=uniq.size)
    bkg_below = np.concatenate(([0.0], np.cumsum(bkg_at)[:-1]))
    won = float(np.sum(sig_at * (bkg_below + 0.5 * bkg_at)))
    return won / (w_sig * w_bkg)


def gain_importance(forest: Forest) -> ImportanceReport:
    """Total separation gain claimed by each feature across all valid cuts."""
    scores = np.zeros(forest.n_features)
    for tree in forest.trees:
        for i in range(tree.n_internal):
            if tree.valid[i]:
                scores[tree.feature[i]] += tree.gain[i]
    return ImportanceReport(method="gain", scores=scores)


def individual_importance(forest: Forest, row: np.ndarray) -> ImportanceReport:
    """Gains of the cuts this single event actually traverses.

    A cut counts only when the event makes its decision; missing values stop
    the walk before the cut, so an all-NaN event scores zero everywhere.
    """
    row = np.asarray(row, dtype=np.float64)
    if row.shape != (forest.n_features,):
        raise ValueError(f"row must have {forest.n_features} entries, got {row.shape}")
    scores = np.zeros(forest.n_features)
    for tree in forest.trees:
        node = 0
        while node < tree.n_internal and tree.valid[node]:
            value = row[tree.feature[node]]
            if math.isnan(value):
                break
            scores[tree.feature[node]] += tree.gain[node]
            node = 2 * node + 1 + (value >= tree.threshold[node])
    return ImportanceReport(method="individual", scores=scores)


def elimination_importance(
    X: np.ndarray,
    y: np.ndarray,
    weights: np.ndarray | None = None,
    config: FitConfig | None = None,
) -> ImportanceReport:
    """Recursive feature elimination by validation-AUC drop.

    Rows are split 50/50 (seeded shuffle) into train and validation halves.
    After one baseline fit on all features, each round fits once per
    remaining feature with that feature left out, scores the feature whose
    removal hurts validation AUC most (ties break toward the lower index),
    removes it, and reuses that fit's AUC as the next round's baseline.  The
    survivor keeps its final-round drop.  Total fits for N features:
    N(N+1)/2, each seeded with config.seed + fit ordinal.
    """
    cfg = config or FitConfig()
    X = np.asarray(X, dtype=np.float64)
    if X.ndim != 2:
        raise ValueError("X must be 2-d (n_events, n_features)")
    n, d = X.shape
    if d < 2:
        raise ValueError("elimination importance needs at least 2 features")
    y = np.asarray(y)
    w = np.ones(n) if weights is None else np.asarray(weights, dtype=np.float64)

    rng = np.random.Generator(np.random.PCG64(cfg.seed))
    perm = rng.permutation(n)
    train, val = perm[: n // 2], perm[n // 2 :]

    ordinal = 0

    def fit_auc(cols: list[int]) -> float:
        nonlocal ordinal
        sub_cfg = dataclasses.replace(cfg, seed=cfg.seed + ordinal)
        ordinal += 1
        forest = fit_forest(X[np.ix_(train, cols)], y[train], w[train], sub_cfg)
        probs = predict_batch(forest, X[np.ix_(val, cols)])
        return roc_auc(probs, y[val], w[val])

    remaining = list(range(d))
    scores = np.zeros(d)
    order: list[int] = []
    baseline = fit_auc(remaining)
    step_aucs = [baseline]

    while len(remaining) >= 2:
        drops = {}
        aucs = {}
        for f in remaining:
            aucs[f] = fit_auc([c for c in remaining if c != f])
            drops[f] = baseline - aucs[f]
        worst = max(remaining, key=lambda f: (drops[f], -f))
        scores[worst] = drops[worst]
        order.append(worst)
        remaining.remove(worst)
        baseline = aucs[worst]
        step_aucs.append(baseline)
        if len(remaining) == 1:
            survivor = remaining[0]
            scores[survivor] = drops[survivor]
            order.append(survivor)

    return ImportanceReport(
        method="elimination",
        scores=scores,
        order=order,
        step_aucs=step_aucs,
        n_fits=ordinal,
    )
