"""CSV loading for the command line tools, plus synthetic benchmark data.

Expected layout: a header row, one column holding the class label ({0,1} or
{-1,1}), optionally one holding per-event weights, and every other column a
float feature.  Cells accept whatever float() accepts, which covers "nan",
"inf", "-inf" and friends case-insensitively.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass

import numpy as np

__all__ = ["DataError", "Dataset", "load_csv", "load_matrix", "make_synthetic"]


class DataError(ValueError):
    """Unusable input data (as opposed to a bad command line argument)."""


@dataclass
class Dataset:
    feature_names: list[str]
    X: np.ndarray        # (n, d) float64
    y: np.ndarray        # (n,) int, +1 signal / -1 background
    weights: np.ndarray  # (n,) float64


def load_csv(path: str, label: str, weight: str | None = None) -> Dataset:
    """Load a training/prediction table.

    ``label`` names the class column; ``weight`` optionally names the weight
    column (unit weights otherwise).  Errors carry row/column coordinates.
    """
    try:
        fh = open(path, "r", encoding="utf-8", newline="")
    except OSError as e:
        raise DataError(f"cannot open {path}: {e.strerror}") from e
    with fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise DataError(f"{path}: empty file") from None
        header = [h.strip() for h in header]
        if label not in header:
            raise DataError(f"{path}: no column named '{label}'")
        if weight is not None and weight not in header:
            raise DataError(f"{path}: no column named '{weight}'")
        label_idx = header.index(label)
        weight_idx = header.index(weight) if weight is not None else None
        feature_idx = [
            j for j in range(len(header)) if j != label_idx and j != weight_idx
        ]
        if not feature_idx:
            raise DataError(f"{path}: no feature columns besides label/weight")

        rows: list[list[float]] = []
        labels: list[float] = []
        weights: list[float] = []
        for row_no, row in enumerate(reader, start=2):
            if not row:
                continue
            if len(row) != len(header):
                raise DataError(
                    f"{path}: row {row_no} has {len(row)} cells, expected {len(header)}"
                )
            parsed = []
            for j, cell in enumerate(row):
                try:
                    parsed.append(float(cell))
                except ValueError:
                    raise DataError(
                        f"{path}: row {row_no}, column '{header[j]}': "
                        f"not a number: {cell!r}"
                    ) from None
            labels.append(parsed[label_idx])
            if weight_idx is not None:
                w = parsed[weight_idx]
                if not np.isfinite(w):
                    raise DataError(f"{path}: row {row_no}: non-finite weight {w!r}")
                weights.append(w)
            rows.append([parsed[j] for j in feature_idx])

    if not rows:
        raise DataError(f"{path}: no data rows")
    values = set(labels)
    if not (values <= {0.0, 1.0} or values <= {-1.0, 1.0}):
        raise DataError(
            f"{path}: label column '{label}' must use 0/1 or -1/1, got {sorted(values)}"
        )
    y = np.where(np.asarray(labels) > 0, 1, -1)
    return Dataset(
        feature_names=[header[j] for j in feature_idx],
        X=np.asarray(rows, dtype=np.float64),
        y=y,
        weights=np.asarray(weights) if weights else np.ones(len(rows)),
    )


def load_matrix(path: str, exclude: list[str] | None = None) -> tuple[list[str], np.ndarray]:
    """Load every CSV column as a float feature, minus the ``exclude`` names
    (columns to ignore if present, e.g. a label in a training table reused
    for prediction).  Returns (feature_names, X)."""
    drop = set(exclude or ())
    try:
        fh = open(path, "r", encoding="utf-8", newline="")
    except OSError as e:
        raise DataError(f"cannot open {path}: {e.strerror}") from e
    with fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise DataError(f"{path}: empty file") from None
        header = [h.strip() for h in header]
        keep = [j for j, name in enumerate(header) if name not in drop]
        if not keep:
            raise DataError(f"{path}: no feature columns left")
        rows: list[list[float]] = []
        for row_no, row in enumerate(reader, start=2):
            if not row:
                continue
            if len(row) != len(header):
                raise DataError(
                    f"{path}: row {row_no} has {len(row)} cells, expected {len(header)}"
                )
            parsed = []
            for j in keep:
                try:
                    parsed.append(float(row[j]))
                except ValueError:
                    raise DataError(
                        f"{path}: row {row_no}, column '{header[j]}': "
                        f"not a number: {row[j]!r}"
                    ) from None
            rows.append(parsed)
    if not rows:
        raise DataError(f"{path}: no data rows")
    return [header[j] for j in keep], np.asarray(rows, dtype=np.float64)


def make_synthetic(
    n_events: int, n_features: int, seed: int, shift: float = 0.5
) -> Dataset:
    """Balanced two-class Gaussian toy data: unit-variance features whose
    means differ by ``shift`` between the classes."""
    rng = np.random.Generator(np.random.PCG64(seed))
    y = np.where(rng.random(n_events) < 0.5, 1, -1)
    X = rng.standard_normal((n_events, n_features)) + shift * (y == 1)[:, None]
    return Dataset(
        feature_names=[f"f{j}" for j in range(n_features)],
        X=X,
        y=y,
        weights=np.ones(n_events),
    )
