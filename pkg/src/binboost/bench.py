"""Scaling benchmark: sweep one knob, time fit and apply, fit a line.

For each swept value the harness fits on synthetic Gaussian data and applies
the model to a held-out half, repeating both phases and keeping every wall
time.  Per-value minima (least noisy) feed an ordinary least squares line
y = a*x + c with its R^2, the quantity of interest for checking that cost
grows linearly in trees/events and that apply cost ignores train-only knobs.
"""

from __future__ import annotations

import dataclasses
import time
from dataclasses import dataclass

import numpy as np

from .analysis import roc_auc
from .boosting import FitConfig, fit_forest, predict_batch
from .dataset import make_synthetic

__all__ = ["SWEEP_KEYS", "BenchRecord", "LineFit", "run_sweep"]

SWEEP_KEYS = ("trees", "depth", "events", "features", "subsample")


@dataclass
class BenchRecord:
    parameter: str
    value: float
    phase: str            # "fit" or "apply"
    seconds_best: float
    seconds_mean: float
    auc: float


@dataclass
class LineFit:
    slope: float
    intercept: float
    r_squared: float


def ols_line(x: np.ndarray, y: np.ndarray) -> LineFit:
    """Least squares y = a*x + c and the fraction of variance it explains."""
    x = np.asarray(x, dtype=np.float64)
    y = np.asarray(y, dtype=np.float64)
    slope, intercept = np.polyfit(x, y, 1)
    fitted = slope * x + intercept
    ss_res = float(np.sum((y - fitted) ** 2))
    ss_tot = float(np.sum((y - np.mean(y)) ** 2))
    r2 = 1.0 if ss_tot == 0.0 else 1.0 - ss_res / ss_tot
    return LineFit(slope=float(slope), intercept=float(intercept), r_squared=r2)


def _config_for(base: FitConfig, key: str, value: float) -> FitConfig:
    if key == "trees":
        return dataclasses.replace(base, n_trees=int(value))
    if key == "depth":
        return dataclasses.replace(base, depth=int(value))
    if key == "subsample":
        return dataclasses.replace(base, subsample=float(value))
    return base


def run_sweep(
    sweep: str,
    values: list[float],
    repeats: int = 5,
    base_config: FitConfig | None = None,
    n_events: int = 50_000,
    n_features: int = 10,
    seed: int = 0,
) -> tuple[list[BenchRecord], dict[str, LineFit]]:
    """Run one sweep and return its records plus per-phase OLS lines.

    ``n_events`` is the training-set size (the apply set is equally large);
    the "events" and "features" sweeps override the respective default.
    Data generation happens outside the timed regions.
    """
    if sweep not in SWEEP_KEYS:
        raise ValueError(f"unknown sweep '{sweep}', expected one of {SWEEP_KEYS}")
    if repeats < 1:
        raise ValueError("repeats must be >= 1")
    base = base_config or FitConfig()

    # Repeats are interleaved round-robin across the swept values: slow
    # machine-state drift (cache warmup, frequency scaling) then lands on
    # every value equally instead of masquerading as a trend.
    contexts = []
    for value in values:
        n_train = int(value) if sweep == "events" else n_events
        d = int(value) if sweep == "features" else n_features
        cfg = _config_for(base, sweep, value)
        data = make_synthetic(2 * n_train, d, seed)
        contexts.append(
            (
                cfg,
                data.X[:n_train], data.y[:n_train],
                data.X[n_train:], data.y[n_train:],
            )
        )

    fit_times: list[list[float]] = [[] for _ in values]
    apply_times: list[list[float]] = [[] for _ in values]
    aucs: list[float] = [0.0] * len(values)
    for _ in range(repeats):
        for i, (cfg, X_train, y_train, X_test, y_test) in enumerate(contexts):
            t0 = time.perf_counter()
            forest = fit_forest(X_train, y_train, None, cfg)
            fit_times[i].append(time.perf_counter() - t0)
            t0 = time.perf_counter()
            probs = predict_batch(forest, X_test)
            apply_times[i].append(time.perf_counter() - t0)
            aucs[i] = roc_auc(probs, y_test)

    records: list[BenchRecord] = []
    fit_minima: list[float] = []
    apply_minima: list[float] = []
    for i, value in enumerate(values):
        auc = aucs[i]
        for phase, times in (("fit", fit_times[i]), ("apply", apply_times[i])):
            records.append(
                BenchRecord(
                    parameter=sweep,
                    value=float(value),
                    phase=phase,
                    seconds_best=min(times),
                    seconds_mean=float(np.mean(times)),
                    auc=auc,
                )
            )
        fit_minima.append(min(fit_times[i]))
        apply_minima.append(min(apply_times[i]))

    xs = np.asarray(values, dtype=np.float64)
    lines = {
        "fit": ols_line(xs, np.asarray(fit_minima)),
        "apply": ols_line(xs, np.asarray(apply_minima)),
    }
    return records, lines
