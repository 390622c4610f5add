"""Shared builders for the test suite."""

from __future__ import annotations

import numpy as np
from scipy.special import expit

from binboost.binning import FeatureBinning, fit_binning
from binboost.sample import build_sample, subsample


def sample_from_bins(sig_bins, bkg_bins, levels, sig_weights=None, bkg_weights=None):
    """Build an EventSample whose stored bins equal the given integer arrays.

    Uses boundaries 1..B-1 so that raw value (bin - 0.5) lands exactly in
    ``bin``; bin 0 entries become NaN inputs.
    """
    sig_bins = np.atleast_2d(np.asarray(sig_bins))
    bkg_bins = np.atleast_2d(np.asarray(bkg_bins))
    d = sig_bins.shape[1] if sig_bins.size else bkg_bins.shape[1]
    n_bins = 1 << levels
    binnings = [
        FeatureBinning(boundaries=np.arange(1.0, n_bins), levels=levels)
        for _ in range(d)
    ]
    bins = np.vstack([b for b in (sig_bins, bkg_bins) if b.size]).astype(float)
    X = np.where(bins == 0, np.nan, bins - 0.5)
    y = np.array([1] * sig_bins.shape[0] + [-1] * bkg_bins.shape[0])
    weights = None
    if sig_weights is not None or bkg_weights is not None:
        weights = np.concatenate(
            [
                np.asarray(sig_weights if sig_weights is not None else np.ones(sig_bins.shape[0]), float),
                np.asarray(bkg_weights if bkg_weights is not None else np.ones(bkg_bins.shape[0]), float),
            ]
        )
    sample = build_sample(X, y, weights, binnings)
    np.testing.assert_array_equal(sample.signal.bins, sig_bins)
    np.testing.assert_array_equal(sample.background.bins, bkg_bins)
    return sample


def random_fit_sample(
    rng,
    max_events=200,
    max_features=3,
    max_levels=3,
    max_depth=3,
    negative_weights=True,
):
    """A randomized mid-boost EventSample plus a tree depth to fit.

    Mixes continuous and heavily tied columns, sprinkles NaN and +-inf,
    optionally flips a few user weights negative, randomizes the boosting
    state (scores, residuals, boost weights) and the active subset.  Returns
    (sample, depth, X, y) so tests can replay the raw rows.
    """
    n = int(rng.integers(10, max_events + 1))
    d = int(rng.integers(1, max_features + 1))
    levels = int(rng.integers(1, max_levels + 1))
    depth = int(rng.integers(1, max_depth + 1))

    X = rng.normal(size=(n, d))
    for j in range(d):
        if rng.random() < 0.4:
            X[:, j] = np.round(X[:, j] * 2) / 2  # force ties
        miss = rng.random(n) < 0.1
        X[miss, j] = np.nan
        inf_mask = rng.random(n) < 0.05
        X[inf_mask, j] = np.where(rng.random(inf_mask.sum()) < 0.5, np.inf, -np.inf)
        if not np.isfinite(X[:, j]).any():
            X[0, j] = 0.0

    y = rng.integers(0, 2, n)
    y[0], y[1] = 1, 0
    weights = rng.uniform(0.2, 2.0, n)
    if negative_weights:
        weights[rng.random(n) < 0.1] *= -1.0

    binnings = [fit_binning(X[:, j], levels) for j in range(d)]
    sample = build_sample(X, y, weights, binnings)

    for label, block in sample.blocks():
        scores = rng.normal(0.0, 1.0, block.n_events)
        block.scores[:] = scores
        block.residuals[:] = 2.0 * label * expit(-2.0 * label * scores)
        a = np.abs(block.residuals)
        block.boost_weights[:] = a * (2.0 - a)

    subsample(sample, float(rng.uniform(0.3, 1.0)), rng)
    return sample, depth, X, y


def assert_rel_close(actual, expected, rel=1e-12):
    """Relative closeness |a - e| <= rel * max(|a|, |e|), exact zeros match."""
    a = np.asarray(actual, dtype=np.float64)
    e = np.asarray(expected, dtype=np.float64)
    scale = np.maximum(np.abs(a), np.abs(e))
    ok = (a == e) | (np.abs(a - e) <= rel * scale)
    assert ok.all(), f"values differ beyond rel={rel}:\n{a}\nvs\n{e}"


def assert_tree_matches_reference(tree, ref, rel=1e-12):
    """Cut sequence integer-equal, float statistics within ``rel`` relative."""
    np.testing.assert_array_equal(tree.valid, ref["valid"])
    np.testing.assert_array_equal(tree.feature, ref["feature"])
    np.testing.assert_array_equal(tree.cut_bin, ref["cut_bin"])
    np.testing.assert_array_equal(tree.threshold, ref["threshold"])
    assert_rel_close(tree.gain, ref["gain"], rel)
    assert_rel_close(tree.node_weight, ref["weight"], rel)
    assert_rel_close(tree.node_purity, ref["purity"], rel)
