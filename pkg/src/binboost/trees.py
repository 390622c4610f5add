"""Layer-wise decision tree fitting over binned events.

A tree of depth D is stored as flat heap-indexed arrays: children of node i
are 2i+1 and 2i+2, cut layers are 1..D, terminal nodes occupy the last layer.
All nodes of one layer are fitted simultaneously: a single pass over the
active events accumulates cumulative weight histograms for every (node,
feature, bin) at once, then the best cut per node is read off the prefix
sums.  Accumulation is index arithmetic only; there is no per-event branching
on bin or node values.

Bin 0 carries missing values.  It is excluded from the cumulative sums and
from cut candidates: an event whose cut feature is missing stays at the node
it reached, which then acts as its terminal node.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .binning import from_bin_cut
from .sample import EventSample

__all__ = [
    "Cut",
    "Tree",
    "LayerHistograms",
    "separation_gain",
    "accumulate_layer_histograms",
    "find_best_cuts",
    "advance_node_indices",
    "fit_tree",
    "traverse_bins",
    "traverse_values",
]

# Leaf-weight denominators smaller than this count as empty.
WEIGHT_EPS = 1e-12


@dataclass
class Cut:
    """Best split found for one node: go left iff bin <= cut_bin."""

    feature: int
    cut_bin: int
    threshold: float
    gain: float
    valid: bool

    @staticmethod
    def none() -> "Cut":
        return Cut(feature=-1, cut_bin=0, threshold=math.nan, gain=0.0, valid=False)


@dataclass
class Tree:
    """Heap-indexed tree: cut arrays cover internal nodes, weight and purity
    arrays cover every node so traversal can stop early anywhere."""

    depth: int
    feature: np.ndarray     # (2**depth - 1,) int32, -1 where invalid
    cut_bin: np.ndarray     # (2**depth - 1,) int32
    threshold: np.ndarray   # (2**depth - 1,) float64, NaN where invalid
    gain: np.ndarray        # (2**depth - 1,) float64
    valid: np.ndarray       # (2**depth - 1,) bool
    node_weight: np.ndarray # (2**(depth+1) - 1,) float64
    node_purity: np.ndarray # (2**(depth+1) - 1,) float64

    @property
    def n_internal(self) -> int:
        return (1 << self.depth) - 1

    @property
    def n_nodes(self) -> int:
        return (1 << (self.depth + 1)) - 1

    def cuts(self) -> list[Cut]:
        """Internal-node cuts in heap order."""
        return [
            Cut(
                feature=int(self.feature[i]),
                cut_bin=int(self.cut_bin[i]),
                threshold=float(self.threshold[i]),
                gain=float(self.gain[i]),
                valid=bool(self.valid[i]),
            )
            for i in range(self.n_internal)
        ]


@dataclass
class LayerHistograms:
    """Per-layer cumulative histograms, one (node, feature, bin) lattice per
    class.

    Slot layout along the last axis: index 0 holds the raw missing-value
    mass (never summed), index b >= 1 holds the cumulative effective weight
    of bins 1..b.  The last slot is therefore the per-feature total of all
    non-missing events at the node.
    """

    signal: np.ndarray      # (n_layer_nodes, n_features, n_bins + 1)
    background: np.ndarray

    @property
    def n_bins(self) -> int:
        return self.signal.shape[2] - 1


def _layer_start(layer: int) -> int:
    return (1 << (layer - 1)) - 1


def _g(s: float, b: float) -> float:
    den = s + b
    return s * s / den if den > 0.0 else 0.0


def separation_gain(s_left: float, b_left: float, s_right: float, b_right: float) -> float:
    """Separation gained by splitting (s_left+s_right, b_left+b_right).

    Uses G(s, b) = s^2 / (s + b), with G = 0 whenever s + b <= 0 so empty or
    negative-weight sides contribute nothing.
    """
    return _g(s_left, b_left) + _g(s_right, b_right) - _g(s_left + s_right, b_left + b_right)


def _g_arr(s: np.ndarray, b: np.ndarray) -> np.ndarray:
    den = s + b
    out = np.zeros_like(den)
    ok = den > 0.0
    out[ok] = s[ok] * s[ok] / den[ok]
    return out


def accumulate_layer_histograms(sample: EventSample, layer: int) -> LayerHistograms:
    """One pass over the active events of ``layer``, filling every node's
    cumulative histograms for all features at once.

    Each event contributes its effective weight (user weight times boost
    weight) at flat index (node, feature, bin); events parked at shallower
    nodes are skipped.  After accumulation the bins >= 1 are prefix-summed in
    place; bin 0 keeps the raw missing mass.
    """
    d = sample.n_features
    width = max(b.n_bins for b in sample.binnings) + 1
    start = _layer_start(layer)
    count = 1 << (layer - 1)
    offsets = np.arange(d, dtype=np.int64) * width
    per_class: dict[int, np.ndarray] = {}
    for label, block in sample.blocks():
        at_layer = block.active & (block.node_index >= start)
        rows = block.bins[at_layer].astype(np.int64)
        local = block.node_index[at_layer] - start
        eff = block.user_weights[at_layer] * block.boost_weights[at_layer]
        idx = local[:, None] * (d * width) + offsets[None, :] + rows
        hist = np.bincount(
            idx.ravel(),
            weights=np.repeat(eff, d),
            minlength=count * d * width,
        ).reshape(count, d, width)
        hist[:, :, 1:] = np.cumsum(hist[:, :, 1:], axis=2)
        per_class[label] = hist
    return LayerHistograms(signal=per_class[1], background=per_class[-1])


def find_best_cuts(hists: LayerHistograms, final_layer: bool = False) -> list[Cut]:
    """Best cut per node of the layer, read off the cumulative histograms.

    For a candidate bin c the left side is the cumulative mass through c and
    the right side is the per-feature total minus it.  Candidates where
    either side's effective weight is <= 0 are never selected.  Ties break
    toward the lower feature index, then the lower cut bin.  Zero-gain cuts
    are kept on non-final layers (deeper layers may still separate what this
    one cannot) and rejected on the final layer, where they could change
    nothing.  Thresholds are left NaN; fit_tree fills them in.
    """
    n_bins = hists.n_bins
    cum_s, cum_b = hists.signal, hists.background
    left_s = cum_s[:, :, 1:n_bins]
    left_b = cum_b[:, :, 1:n_bins]
    right_s = cum_s[:, :, n_bins:] - left_s
    right_b = cum_b[:, :, n_bins:] - left_b
    feasible = ((left_s + left_b) > 0) & ((right_s + right_b) > 0)
    gains = (
        _g_arr(left_s, left_b)
        + _g_arr(right_s, right_b)
        - _g_arr(left_s + right_s, left_b + right_b)
    )
    scored = np.where(feasible, gains, -np.inf).reshape(cum_s.shape[0], -1)
    best = np.argmax(scored, axis=1)

    cuts: list[Cut] = []
    for node, flat in enumerate(best):
        g = scored[node, flat]
        if math.isfinite(g) and (g > 0.0 or (g == 0.0 and not final_layer)):
            f, c = divmod(int(flat), n_bins - 1)
            cuts.append(Cut(feature=f, cut_bin=c + 1, threshold=math.nan, gain=float(g), valid=True))
        else:
            cuts.append(Cut.none())
    return cuts


def advance_node_indices(sample: EventSample, cuts: list[Cut], layer: int) -> None:
    """Move each active event of ``layer`` to a child of its node.

    Events go left (2i+1) iff their bin is <= the cut bin, right (2i+2)
    otherwise.  Events whose node has no valid cut, or whose cut feature is
    missing (bin 0), keep their node index and sit out all deeper layers.
    """
    start = _layer_start(layer)
    feat = np.array([c.feature if c.valid else 0 for c in cuts], dtype=np.int64)
    cbin = np.array([c.cut_bin for c in cuts], dtype=np.int64)
    ok = np.array([c.valid for c in cuts], dtype=bool)
    for _, block in sample.blocks():
        at_layer = block.active & (block.node_index >= start)
        rows = np.flatnonzero(at_layer)
        if rows.size == 0:
            continue
        node = block.node_index[rows]
        local = node - start
        bins_at_cut = block.bins[rows, feat[local]].astype(np.int64)
        move = ok[local] & (bins_at_cut != 0)
        child = 2 * node + 1 + (bins_at_cut > cbin[local])
        block.node_index[rows] = np.where(move, child, node)


def _node_sums(sample: EventSample, layer: int, n_nodes_total: int):
    """Per-node effective weight and response sums over the events at
    ``layer`` (the events that reached those nodes), one class at a time."""
    start = _layer_start(layer)
    count = 1 << (layer - 1)
    sums = {}
    for label, block in sample.blocks():
        at_layer = block.active & (block.node_index >= start)
        local = block.node_index[at_layer] - start
        w = block.user_weights[at_layer]
        eff = np.bincount(local, weights=w * block.boost_weights[at_layer], minlength=count)
        resp = np.bincount(local, weights=w * block.residuals[at_layer], minlength=count)
        sums[label] = (eff, resp)
    return start, count, sums


def fit_tree(sample: EventSample, depth: int) -> Tree:
    """Fit one depth-``depth`` tree on the sample's active events.

    Layers are fitted top-down; every layer costs one accumulation pass over
    the active events.  Node weights follow the boosting leaf rule
    sum(w*r) / sum(w*|r|*(2-|r|)) with the denominator guard, and are
    computed for every node (internal ones serve as early-stop outputs for
    missing values at application time).  Purity is the effective-weight
    signal fraction of the events that reached the node.
    """
    if depth < 1:
        raise ValueError("depth must be a positive integer")
    n_internal = (1 << depth) - 1
    n_nodes = (1 << (depth + 1)) - 1

    feature = np.full(n_internal, -1, dtype=np.int32)
    cut_bin = np.zeros(n_internal, dtype=np.int32)
    threshold = np.full(n_internal, np.nan)
    gain = np.zeros(n_internal)
    valid = np.zeros(n_internal, dtype=bool)
    eff_sig = np.zeros(n_nodes)
    eff_bkg = np.zeros(n_nodes)
    resp_sig = np.zeros(n_nodes)
    resp_bkg = np.zeros(n_nodes)

    for _, block in sample.blocks():
        block.node_index[:] = 0

    for layer in range(1, depth + 2):
        start, count, sums = _node_sums(sample, layer, n_nodes)
        eff_sig[start:start + count] = sums[1][0]
        resp_sig[start:start + count] = sums[1][1]
        eff_bkg[start:start + count] = sums[-1][0]
        resp_bkg[start:start + count] = sums[-1][1]
        if layer > depth:
            break
        hists = accumulate_layer_histograms(sample, layer)
        cuts = find_best_cuts(hists, final_layer=(layer == depth))
        for local, cut in enumerate(cuts):
            if not cut.valid:
                continue
            i = start + local
            feature[i] = cut.feature
            cut_bin[i] = cut.cut_bin
            cut.threshold = from_bin_cut(sample.binnings[cut.feature], cut.cut_bin)
            threshold[i] = cut.threshold
            gain[i] = cut.gain
            valid[i] = True
        advance_node_indices(sample, cuts, layer)

    den = eff_sig + eff_bkg
    num = resp_sig + resp_bkg
    node_weight = np.zeros(n_nodes)
    ok = np.abs(den) >= WEIGHT_EPS
    node_weight[ok] = num[ok] / den[ok]
    node_purity = np.zeros(n_nodes)
    pok = den >= WEIGHT_EPS
    node_purity[pok] = eff_sig[pok] / den[pok]

    return Tree(
        depth=depth,
        feature=feature,
        cut_bin=cut_bin,
        threshold=threshold,
        gain=gain,
        valid=valid,
        node_weight=node_weight,
        node_purity=node_purity,
    )


def traverse_bins(tree: Tree, bins: np.ndarray) -> np.ndarray:
    """Final node index per row of a binned matrix (training-side routing)."""
    n = bins.shape[0]
    node = np.zeros(n, dtype=np.int64)
    rows = np.arange(n)
    for _ in range(tree.depth):
        vld = tree.valid[node]
        f = np.where(vld, tree.feature[node], 0)
        b = bins[rows, f].astype(np.int64)
        move = vld & (b != 0)
        child = 2 * node + 1 + (b > tree.cut_bin[node])
        node = np.where(move, child, node)
    return node


def traverse_values(tree: Tree, X: np.ndarray) -> np.ndarray:
    """Final node index per raw float row: left iff value < threshold,
    missing (NaN) stops at the current node.  No binning happens here."""
    n = X.shape[0]
    node = np.zeros(n, dtype=np.int64)
    rows = np.arange(n)
    for _ in range(tree.depth):
        vld = tree.valid[node]
        f = np.where(vld, tree.feature[node], 0)
        v = X[rows, f]
        move = vld & ~np.isnan(v)
        child = 2 * node + 1 + (v >= tree.threshold[node]).astype(np.int64)
        node = np.where(move, child, node)
    return node
