"""Equal-frequency binning of continuous features onto a small integer range.

Each feature is mapped onto bins ``0 .. 2**levels``.  Bin 0 is reserved for
missing values (NaN); finite values and infinities land in ``1 .. 2**levels``.
Boundaries are order statistics of the finite training values, so any
strictly increasing transform of a feature yields the same bin assignment.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

__all__ = ["FeatureBinning", "fit_binning", "to_bin", "bin_values", "from_bin_cut"]


@dataclass(frozen=True)
class FeatureBinning:
    """Bin boundaries for one feature.

    ``boundaries`` has length ``2**levels - 1`` and is non-decreasing; entry
    ``k`` (0-based) is the lower edge of bin ``k + 2``.  Values below the
    first boundary fall into bin 1, values at or above the last into bin
    ``2**levels``.
    """

    boundaries: np.ndarray
    levels: int

    def __post_init__(self) -> None:
        if self.levels < 1:
            raise ValueError("levels must be a positive integer")
        bounds = np.asarray(self.boundaries, dtype=np.float64)
        object.__setattr__(self, "boundaries", bounds)
        if bounds.ndim != 1 or bounds.size != self.n_bins - 1:
            raise ValueError(
                f"expected {self.n_bins - 1} boundaries for {self.levels} levels, "
                f"got {bounds.size}"
            )
        if not np.all(np.isfinite(bounds)):
            raise ValueError("boundaries must be finite")
        if np.any(np.diff(bounds) < 0):
            raise ValueError("boundaries must be non-decreasing")

    @property
    def n_bins(self) -> int:
        """Number of regular (non-missing) bins, ``2**levels``."""
        return 1 << self.levels


def fit_binning(values: np.ndarray, levels: int) -> FeatureBinning:
    """Fit equal-frequency boundaries from one feature's training values.

    NaN and infinite entries are excluded from boundary estimation.  With M
    finite values sorted ascending, boundary k (1-based, k = 1 .. 2**levels-1)
    is the value at index floor(k * M / 2**levels), so boundaries are always
    actual data values.

    Raises ValueError if ``levels < 1`` or no finite value exists.
    """
    if levels < 1:
        raise ValueError("levels must be a positive integer")
    arr = np.asarray(values, dtype=np.float64).ravel()
    finite = arr[np.isfinite(arr)]
    if finite.size == 0:
        raise ValueError("feature has no finite values")
    finite.sort()
    n_bins = 1 << levels
    idx = (np.arange(1, n_bins, dtype=np.int64) * finite.size) // n_bins
    return FeatureBinning(boundaries=finite[idx], levels=levels)


def bin_values(binning: FeatureBinning, values: np.ndarray) -> np.ndarray:
    """Vectorised bin assignment: NaN -> 0, else 1 + #{k : v >= boundary_k}."""
    arr = np.asarray(values, dtype=np.float64)
    out = np.searchsorted(binning.boundaries, arr, side="right").astype(np.int64) + 1
    out[np.isnan(arr)] = 0
    return out


def to_bin(binning: FeatureBinning, value: float) -> int:
    """Bin index of a single value (0 for NaN, 1 .. 2**levels otherwise)."""
    return int(bin_values(binning, np.asarray([value]))[0])


def from_bin_cut(binning: FeatureBinning, cut_bin: int) -> float:
    """Float threshold equivalent to the bin-level cut ``bin <= cut_bin``.

    An event goes left iff its bin is <= cut_bin, which is exactly
    ``value < from_bin_cut(binning, cut_bin)`` for every non-missing value.
    Valid cut bins are 1 .. 2**levels - 1.
    """
    if not 1 <= cut_bin <= binning.n_bins - 1:
        raise ValueError(
            f"cut_bin must be in [1, {binning.n_bins - 1}], got {cut_bin}"
        )
    return float(binning.boundaries[cut_bin - 1])
