"""Array-in, array-out binding over the binboost engine.

The binding validates shapes and label conventions, then forwards every
call to the engine's public API.  It performs no arithmetic of its own, so
results are numerically identical to what the ``binboost`` CLI produces on
the same inputs.
"""

from __future__ import annotations

import numpy as np

from binboost.analysis import (
    elimination_importance,
    gain_importance,
    individual_importance,
)
from binboost.boosting import FitConfig, Forest, predict_batch
from binboost.boosting import fit_forest as _fit_forest
from binboost.model_io import load_forest, save_forest

__all__ = ["BoundModel", "fit", "load"]


def _as_matrix(X: object) -> np.ndarray:
    """Coerce to a float64 matrix; ragged or non-2-d input raises."""
    arr = np.asarray(X, dtype=np.float64)
    if arr.ndim != 2:
        raise ValueError(f"features must be a 2-d matrix, got shape {arr.shape}")
    return arr


def _training_arrays(
    X: object, y: object, weights: object | None
) -> tuple[np.ndarray, np.ndarray, np.ndarray | None]:
    matrix = _as_matrix(X)
    labels = np.asarray(y, dtype=np.float64)
    if labels.ndim != 1:
        raise ValueError(f"labels must be 1-d, got shape {labels.shape}")
    if labels.shape[0] != matrix.shape[0]:
        raise ValueError(
            f"labels length {labels.shape[0]} does not match "
            f"{matrix.shape[0]} feature rows"
        )
    if not np.isin(labels, (0.0, 1.0)).all():
        bad = sorted(set(labels[~np.isin(labels, (0.0, 1.0))].tolist()))
        raise ValueError(f"labels must be 0 or 1, found {bad}")
    w = None
    if weights is not None:
        w = np.asarray(weights, dtype=np.float64)
        if w.shape != labels.shape:
            raise ValueError(
                f"weights shape {w.shape} does not match labels shape {labels.shape}"
            )
    return matrix, labels, w


class BoundModel:
    """Handle on a fitted forest.

    All operations delegate to the engine.  ``close()`` releases the handle;
    any later operation raises instead of crashing.  One handle may serve
    predictions from several threads at once, and a prediction that started
    before ``close()`` finishes on its own reference to the forest.
    """

    def __init__(self, forest: Forest) -> None:
        self._forest: Forest | None = forest

    @property
    def config(self) -> FitConfig | None:
        """Hyperparameters the model was fitted with, when recorded."""
        return self._live().config

    @property
    def n_features(self) -> int:
        return self._live().n_features

    def _live(self) -> Forest:
        forest = self._forest
        if forest is None:
            raise RuntimeError("model handle is closed")
        return forest

    def predict(self, X: object) -> np.ndarray:
        """Signal probability per row, NaN cells treated as missing."""
        forest = self._live()
        arr = np.asarray(X, dtype=np.float64)
        if arr.ndim == 1 and arr.size == 0:
            arr = arr.reshape(0, forest.n_features)
        if arr.ndim != 2:
            raise ValueError(f"features must be a 2-d matrix, got shape {arr.shape}")
        return predict_batch(forest, arr)

    def save(self, path: str) -> None:
        save_forest(self._live(), path)

    def importance(
        self,
        method: str,
        *,
        row: object | None = None,
        X: object | None = None,
        y: object | None = None,
        weights: object | None = None,
    ) -> np.ndarray:
        """Per-feature importance scores.

        ``gain`` reads the fitted trees and takes no extra arguments.
        ``individual`` explains one feature row passed as ``row``.
        ``elimination`` refits on training data passed as ``X`` and ``y``
        (plus optional ``weights``), reusing this model's hyperparameters.
        """
        forest = self._live()
        if method == "gain":
            if row is not None or X is not None or y is not None or weights is not None:
                raise ValueError("gain importance takes no extra arguments")
            return gain_importance(forest).scores
        if method == "individual":
            if row is None:
                raise ValueError("individual importance requires row=")
            if X is not None or y is not None or weights is not None:
                raise ValueError("individual importance takes only row=")
            return individual_importance(
                forest, np.asarray(row, dtype=np.float64)
            ).scores
        if method == "elimination":
            if row is not None:
                raise ValueError("elimination importance does not take row=")
            if X is None or y is None:
                raise ValueError("elimination importance requires X= and y=")
            matrix, labels, w = _training_arrays(X, y, weights)
            return elimination_importance(matrix, labels, w, forest.config).scores
        raise ValueError(f"unknown importance method: {method!r}")

    def close(self) -> None:
        self._forest = None

    def __enter__(self) -> "BoundModel":
        return self

    def __exit__(self, *exc: object) -> None:
        self.close()


def fit(
    X: object,
    y: object,
    weights: object | None = None,
    trees: int = 100,
    depth: int = 3,
    shrinkage: float = 0.1,
    subsample: float = 0.5,
    binning_levels: int = 8,
    seed: int = 0,
) -> BoundModel:
    """Fit a boosted forest on a feature matrix and 0/1 labels.

    NaN cells mark missing values and +-inf are legal.  The fit is
    deterministic given identical inputs and hyperparameters.
    """
    matrix, labels, w = _training_arrays(X, y, weights)
    config = FitConfig(
        n_trees=trees,
        depth=depth,
        shrinkage=shrinkage,
        subsample=subsample,
        binning_levels=binning_levels,
        seed=seed,
    )
    return BoundModel(_fit_forest(matrix, labels, w, config))


def load(path: str) -> BoundModel:
    """Open a stored model; parse and validation failures raise."""
    return BoundModel(load_forest(path))
