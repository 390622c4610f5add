"""Versioned JSON persistence for fitted forests.

The document is deterministic: fixed key order, shortest round-trip float
representation, no NaN/Infinity literals.  Thresholds stored per cut are the
authoritative routing values at application time; cut bins are kept for
provenance.  serialize(parse(serialize(f))) is byte-identical to
serialize(f).
"""

from __future__ import annotations

import json
import math

import numpy as np

from .binning import FeatureBinning
from .boosting import FitConfig, Forest
from .trees import Tree

__all__ = [
    "FORMAT_VERSION",
    "ModelParseError",
    "ModelVersionError",
    "ModelValidationError",
    "serialize_forest",
    "parse_forest",
    "save_forest",
    "load_forest",
]

FORMAT_VERSION = 1

_TOP_KEYS = ("format_version", "config", "f0", "binnings", "trees")


class ModelParseError(ValueError):
    """Malformed document (bad JSON or wrong shape)."""


class ModelVersionError(ModelParseError):
    """Document written by an unknown format version."""


class ModelValidationError(ModelParseError):
    """Structurally sound JSON whose content breaks a model invariant."""


def serialize_forest(forest: Forest) -> str:
    """Render a forest as the versioned JSON document."""
    config = None
    if forest.config is not None:
        c = forest.config
        config = {
            "n_trees": c.n_trees,
            "depth": c.depth,
            "shrinkage": c.shrinkage,
            "subsample": c.subsample,
            "binning_levels": c.binning_levels,
            "seed": c.seed,
        }
    doc = {
        "format_version": FORMAT_VERSION,
        "config": config,
        "f0": float(forest.f0),
        "binnings": [
            {"levels": b.levels, "boundaries": [float(v) for v in b.boundaries]}
            for b in forest.binnings
        ],
        "trees": [_tree_doc(t) for t in forest.trees],
    }
    return json.dumps(doc, indent=2, allow_nan=False) + "\n"


def _tree_doc(tree: Tree) -> dict:
    nodes = []
    for i in range(tree.n_nodes):
        is_cut = i < tree.n_internal and bool(tree.valid[i])
        nodes.append(
            {
                "index": i,
                "valid": is_cut,
                "featureIndex": int(tree.feature[i]) if is_cut else None,
                "cutBin": int(tree.cut_bin[i]) if is_cut else None,
                "threshold": float(tree.threshold[i]) if is_cut else None,
                "gain": float(tree.gain[i]) if is_cut else None,
                "nodeBoostWeight": float(tree.node_weight[i]),
                "nodePurity": float(tree.node_purity[i]),
            }
        )
    return {"depth": tree.depth, "nodes": nodes}


def _expect(cond: bool, where: str, detail: str) -> None:
    if not cond:
        raise ModelValidationError(f"{where}: {detail}")


def _finite_number(value: object, where: str) -> float:
    _expect(isinstance(value, (int, float)) and not isinstance(value, bool), where, "must be a number")
    out = float(value)  # type: ignore[arg-type]
    _expect(math.isfinite(out), where, "must be finite")
    return out


def _int_field(value: object, where: str) -> int:
    _expect(isinstance(value, int) and not isinstance(value, bool), where, "must be an integer")
    return int(value)  # type: ignore[arg-type]


def parse_forest(text: str) -> Forest:
    """Parse and validate a serialized forest.

    Raises ModelParseError with line/column info on malformed JSON,
    ModelVersionError on an unknown format_version, ModelValidationError
    naming the offending field on any invariant violation.
    """
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as e:
        raise ModelParseError(
            f"invalid JSON at line {e.lineno}, column {e.colno}: {e.msg}"
        ) from e
    _expect(isinstance(doc, dict), "document", "must be a JSON object")
    unknown = set(doc) - set(_TOP_KEYS)
    _expect(not unknown, "document", f"unknown keys {sorted(unknown)}")
    for key in _TOP_KEYS:
        _expect(key in doc, "document", f"missing key '{key}'")

    version = doc["format_version"]
    if not isinstance(version, int) or isinstance(version, bool) or version != FORMAT_VERSION:
        raise ModelVersionError(
            f"format_version: expected {FORMAT_VERSION}, got {version!r}"
        )

    config = None
    if doc["config"] is not None:
        c = doc["config"]
        _expect(isinstance(c, dict), "config", "must be an object or null")
        try:
            config = FitConfig(
                n_trees=_int_field(c.get("n_trees"), "config.n_trees"),
                depth=_int_field(c.get("depth"), "config.depth"),
                shrinkage=_finite_number(c.get("shrinkage"), "config.shrinkage"),
                subsample=_finite_number(c.get("subsample"), "config.subsample"),
                binning_levels=_int_field(c.get("binning_levels"), "config.binning_levels"),
                seed=_int_field(c.get("seed"), "config.seed"),
            )
        except ValueError as e:
            if isinstance(e, ModelParseError):
                raise
            raise ModelValidationError(f"config: {e}") from e

    f0 = _finite_number(doc["f0"], "f0")

    _expect(isinstance(doc["binnings"], list), "binnings", "must be a list")
    binnings = []
    for j, b in enumerate(doc["binnings"]):
        where = f"binnings[{j}]"
        _expect(isinstance(b, dict), where, "must be an object")
        levels = _int_field(b.get("levels"), f"{where}.levels")
        bounds = b.get("boundaries")
        _expect(isinstance(bounds, list), f"{where}.boundaries", "must be a list")
        values = [_finite_number(v, f"{where}.boundaries[{k}]") for k, v in enumerate(bounds)]
        try:
            binnings.append(FeatureBinning(boundaries=np.asarray(values), levels=levels))
        except ValueError as e:
            raise ModelValidationError(f"{where}: {e}") from e

    _expect(isinstance(doc["trees"], list), "trees", "must be a list")
    trees = [_parse_tree(t, i, binnings) for i, t in enumerate(doc["trees"])]

    return Forest(
        f0=f0,
        trees=trees,
        binnings=binnings,
        shrinkage=config.shrinkage if config is not None else 1.0,
        config=config,
    )


def _parse_tree(t: object, tree_idx: int, binnings: list[FeatureBinning]) -> Tree:
    where = f"trees[{tree_idx}]"
    _expect(isinstance(t, dict), where, "must be an object")
    depth = _int_field(t.get("depth"), f"{where}.depth")  # type: ignore[union-attr]
    _expect(depth >= 1, f"{where}.depth", "must be >= 1")
    n_internal = (1 << depth) - 1
    n_nodes = (1 << (depth + 1)) - 1
    nodes = t.get("nodes")  # type: ignore[union-attr]
    _expect(isinstance(nodes, list), f"{where}.nodes", "must be a list")
    _expect(len(nodes) == n_nodes, f"{where}.nodes", f"must have {n_nodes} records for depth {depth}")

    feature = np.full(n_internal, -1, dtype=np.int32)
    cut_bin = np.zeros(n_internal, dtype=np.int32)
    threshold = np.full(n_internal, np.nan)
    gain = np.zeros(n_internal)
    valid = np.zeros(n_internal, dtype=bool)
    weight = np.zeros(n_nodes)
    purity = np.zeros(n_nodes)

    for i, rec in enumerate(nodes):
        w = f"{where}.nodes[{i}]"
        _expect(isinstance(rec, dict), w, "must be an object")
        _expect(_int_field(rec.get("index"), f"{w}.index") == i, f"{w}.index", f"must equal {i}")
        is_cut = rec.get("valid")
        _expect(isinstance(is_cut, bool), f"{w}.valid", "must be a boolean")
        weight[i] = _finite_number(rec.get("nodeBoostWeight"), f"{w}.nodeBoostWeight")
        purity[i] = _finite_number(rec.get("nodePurity"), f"{w}.nodePurity")
        if not is_cut:
            continue
        _expect(i < n_internal, f"{w}.valid", "terminal nodes cannot carry cuts")
        f = _int_field(rec.get("featureIndex"), f"{w}.featureIndex")
        _expect(0 <= f < len(binnings), f"{w}.featureIndex", f"must be in [0, {len(binnings) - 1}]")
        cb = _int_field(rec.get("cutBin"), f"{w}.cutBin")
        _expect(
            1 <= cb <= binnings[f].n_bins - 1,
            f"{w}.cutBin",
            f"must be in [1, {binnings[f].n_bins - 1}]",
        )
        g = _finite_number(rec.get("gain"), f"{w}.gain")
        _expect(g >= 0.0, f"{w}.gain", "must be >= 0")
        feature[i] = f
        cut_bin[i] = cb
        threshold[i] = _finite_number(rec.get("threshold"), f"{w}.threshold")
        gain[i] = g
        valid[i] = True

    return Tree(
        depth=depth,
        feature=feature,
        cut_bin=cut_bin,
        threshold=threshold,
        gain=gain,
        valid=valid,
        node_weight=weight,
        node_purity=purity,
    )


def save_forest(forest: Forest, path: str) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(serialize_forest(forest))


def load_forest(path: str) -> Forest:
    with open(path, "r", encoding="utf-8") as fh:
        return parse_forest(fh.read())
