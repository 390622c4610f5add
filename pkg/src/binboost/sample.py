"""Binned training events in record-major storage, one region per class.

Signal and background live in separate contiguous blocks.  Within a block the
bin matrix is C-ordered with one row per event, so a pass over events in
storage order walks memory monotonically.  Per-event mutable state (user
weight, residual, boost weight, score, node cursor, active flag) sits in
parallel arrays of the same block.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .binning import FeatureBinning, bin_values

__all__ = ["ClassBlock", "EventSample", "build_sample", "subsample"]


def _bin_dtype(n_bins: int) -> np.dtype:
    # bins run 0 .. n_bins inclusive; pick the smallest unsigned type that fits
    return np.min_scalar_type(n_bins)


@dataclass
class ClassBlock:
    """One class's contiguous event region."""

    bins: np.ndarray           # (n, d) unsigned ints, row per event
    user_weights: np.ndarray   # (n,) float64, negative values allowed
    residuals: np.ndarray      # (n,) float64, gradient responses
    boost_weights: np.ndarray  # (n,) float64
    scores: np.ndarray         # (n,) float64, accumulated model output F
    node_index: np.ndarray     # (n,) int64 tree cursor
    active: np.ndarray         # (n,) bool, subsample membership

    @property
    def n_events(self) -> int:
        return self.bins.shape[0]


@dataclass
class EventSample:
    """Binned events for one fit, split into signal and background blocks."""

    binnings: list[FeatureBinning]
    signal: ClassBlock
    background: ClassBlock

    @property
    def n_features(self) -> int:
        return len(self.binnings)

    def blocks(self) -> tuple[tuple[int, ClassBlock], ...]:
        """Class blocks in fixed (signal, background) order.

        The tree fitter consumes events exclusively through this accessor,
        one full pass per block per layer; tests hook it to check the access
        pattern.
        """
        return ((1, self.signal), (-1, self.background))


def _new_block(bins: np.ndarray, weights: np.ndarray) -> ClassBlock:
    n = bins.shape[0]
    return ClassBlock(
        bins=bins,
        user_weights=weights,
        residuals=np.zeros(n),
        boost_weights=np.ones(n),
        scores=np.zeros(n),
        node_index=np.zeros(n, dtype=np.int64),
        active=np.ones(n, dtype=bool),
    )


def build_sample(
    X: np.ndarray,
    y: np.ndarray,
    weights: np.ndarray | None,
    binnings: list[FeatureBinning],
) -> EventSample:
    """Bin raw rows and lay them out as class-separated record blocks.

    ``y`` entries > 0 are signal, the rest background.  ``weights`` defaults
    to 1.0 per event; negative weights are legal, non-finite ones are not.
    Row order within each class follows the input order.
    """
    X = np.asarray(X, dtype=np.float64)
    if X.ndim != 2:
        raise ValueError("X must be a 2-d array of shape (n_events, n_features)")
    n, d = X.shape
    if d != len(binnings):
        raise ValueError(f"X has {d} features but {len(binnings)} binnings given")
    y = np.asarray(y)
    if y.shape != (n,):
        raise ValueError(f"y has shape {y.shape}, expected ({n},)")
    if weights is None:
        weights = np.ones(n)
    else:
        weights = np.asarray(weights, dtype=np.float64)
        if weights.shape != (n,):
            raise ValueError(f"weights has shape {weights.shape}, expected ({n},)")
        if not np.all(np.isfinite(weights)):
            raise ValueError("user weights must be finite")

    n_bins_max = max(b.n_bins for b in binnings) if binnings else 2
    bins = np.empty((n, d), dtype=_bin_dtype(n_bins_max))
    for j, binning in enumerate(binnings):
        bins[:, j] = bin_values(binning, X[:, j])

    is_signal = np.asarray(y) > 0
    sig = _new_block(np.ascontiguousarray(bins[is_signal]), weights[is_signal].copy())
    bkg = _new_block(np.ascontiguousarray(bins[~is_signal]), weights[~is_signal].copy())
    return EventSample(binnings=list(binnings), signal=sig, background=bkg)


def subsample(sample: EventSample, rate: float, rng: np.random.Generator) -> None:
    """Mark exactly ``floor(rate * n)`` events of each class active.

    Stratified, uniform without replacement, driven entirely by ``rng`` so a
    seeded generator reproduces the same choice.  ``rate`` must be in (0, 1].
    """
    if not 0.0 < rate <= 1.0:
        raise ValueError(f"subsample rate must be in (0, 1], got {rate}")
    for _, block in sample.blocks():
        n = block.n_events
        k = math.floor(rate * n)
        block.active[:] = False
        block.active[rng.permutation(n)[:k]] = True
