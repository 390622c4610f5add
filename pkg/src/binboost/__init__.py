"""Gradient-boosted decision trees over equal-frequency binned features.

Fast, deterministic binary classification: features are mapped onto small
integer bins once, trees are grown layer by layer with a single histogram
pass per layer, and the fitted model applies to raw float rows (missing
values stop traversal early instead of being imputed).
"""

from .analysis import (
    ImportanceReport,
    elimination_importance,
    gain_importance,
    individual_importance,
    roc_auc,
)
from .binning import FeatureBinning, bin_values, fit_binning, from_bin_cut, to_bin
from .boosting import (
    FitConfig,
    Forest,
    boost_weight_of_event,
    fit_forest,
    leaf_weight,
    predict,
    predict_batch,
    prior,
    residual,
)
from .dataset import Dataset, load_csv, make_synthetic
from .model_io import (
    FORMAT_VERSION,
    ModelParseError,
    ModelValidationError,
    ModelVersionError,
    load_forest,
    parse_forest,
    save_forest,
    serialize_forest,
)
from .sample import ClassBlock, EventSample, build_sample, subsample
from .trees import (
    Cut,
    LayerHistograms,
    Tree,
    accumulate_layer_histograms,
    advance_node_indices,
    find_best_cuts,
    fit_tree,
    separation_gain,
    traverse_bins,
    traverse_values,
)

__version__ = "0.1.0"

__all__ = [
    "FeatureBinning",
    "fit_binning",
    "bin_values",
    "to_bin",
    "from_bin_cut",
    "ClassBlock",
    "EventSample",
    "build_sample",
    "subsample",
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
    "FitConfig",
    "Forest",
    "prior",
    "residual",
    "boost_weight_of_event",
    "leaf_weight",
    "fit_forest",
    "predict",
    "predict_batch",
    "ImportanceReport",
    "roc_auc",
    "gain_importance",
    "individual_importance",
    "elimination_importance",
    "FORMAT_VERSION",
    "ModelParseError",
    "ModelVersionError",
    "ModelValidationError",
    "serialize_forest",
    "parse_forest",
    "save_forest",
    "load_forest",
    "Dataset",
    "load_csv",
    "make_synthetic",
    "__version__",
]
