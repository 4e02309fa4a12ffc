"""Binary archives for feature sets, trained models, and prediction files.

One container layout for everything: an ASCII decimal header length on the
first line, a compact UTF-8 JSON header, then a raw little-endian payload.
The header records a CRC32 of the payload, so payload corruption is
detected on load; save output is byte-deterministic (sorted keys, shortest
float repr), which makes archives content-addressable.
"""

from __future__ import annotations

import json
import zlib
from pathlib import Path

import numpy as np

from ..core import FeatureSet
from ..learn import (
    Forest,
    KnnState,
    Predictions,
    TrainedModel,
    tree_from_jsonable,
    tree_to_jsonable,
)

SCHEMA_VERSION = "1"


class ArchiveError(ValueError):
    """Unreadable or inconsistent archive file."""


class ChecksumMismatchError(ArchiveError):
    pass


class SchemaVersionError(ArchiveError):
    pass


class TruncatedArchiveError(ArchiveError):
    pass


class DimensionMismatchError(ArchiveError):
    pass


def _write_envelope(path: str | Path, header: dict, payload: bytes) -> None:
    header = dict(header)
    header["schema_version"] = SCHEMA_VERSION
    header["payload_crc32"] = zlib.crc32(payload)
    blob = json.dumps(
        header, sort_keys=True, separators=(",", ":"), ensure_ascii=False
    ).encode("utf-8")
    with open(path, "wb") as fh:
        fh.write(str(len(blob)).encode("ascii") + b"\n")
        fh.write(blob)
        fh.write(payload)


def _read_envelope(path: str | Path) -> tuple[dict, bytes]:
    raw = Path(path).read_bytes()
    newline = raw.find(b"\n")
    if newline < 0:
        raise TruncatedArchiveError(f"{path}: missing header length line")
    try:
        header_len = int(raw[:newline].decode("ascii"))
    except (UnicodeDecodeError, ValueError) as exc:
        raise ArchiveError(f"{path}: bad header length line") from exc
    header_start = newline + 1
    if len(raw) < header_start + header_len:
        raise TruncatedArchiveError(f"{path}: header truncated")
    try:
        header = json.loads(raw[header_start : header_start + header_len])
    except json.JSONDecodeError as exc:
        raise ArchiveError(f"{path}: malformed header JSON") from exc
    version = header.get("schema_version")
    if version != SCHEMA_VERSION:
        raise SchemaVersionError(f"{path}: unknown schema_version {version!r}")
    payload = raw[header_start + header_len :]
    return header, payload


def _check_payload(path, header, payload, expected_size) -> None:
    declared_crc = header.get("payload_crc32")
    if len(payload) != expected_size:
        if zlib.crc32(payload) == declared_crc:
            raise DimensionMismatchError(
                f"{path}: dimension mismatch: payload has {len(payload)} bytes, "
                f"header declares {expected_size}"
            )
        raise TruncatedArchiveError(
            f"{path}: payload truncated ({len(payload)} of {expected_size} bytes)"
        )
    if zlib.crc32(payload) != declared_crc:
        raise ChecksumMismatchError(f"{path}: checksum mismatch")


def save_featureset(fs: FeatureSet, path: str | Path) -> None:
    """Write a feature set; the float64 payload round-trips bit-exactly."""
    header = {
        "kind": "featureset",
        "series_names": list(fs.series_names),
        "n_channels": fs.n_channels,
        "feature_names": list(fs.feature_names),
        "targets": list(fs.targets),
        "metadata": [dict(m) for m in fs.metadata],
    }
    payload = np.ascontiguousarray(fs.values, dtype="<f8").tobytes()
    _write_envelope(path, header, payload)


def load_featureset(path: str | Path) -> FeatureSet:
    header, payload = _read_envelope(path)
    if header.get("kind") != "featureset":
        raise ArchiveError(f"{path}: not a feature set archive")
    names = header["series_names"]
    feats = header["feature_names"]
    n_channels = int(header["n_channels"])
    expected = len(names) * n_channels * len(feats) * 8
    _check_payload(path, header, payload, expected)
    values = np.frombuffer(payload, dtype="<f8").reshape(
        len(names), n_channels, len(feats)
    )
    return FeatureSet(
        series_names=tuple(names),
        feature_names=tuple(feats),
        values=values,
        targets=tuple(header["targets"]),
        metadata=tuple(header["metadata"]),
    )


def save_model(model: TrainedModel, path: str | Path) -> None:
    """Write a trained model; k-NN training data goes in the binary payload,
    forest structure in the header (floats keep their exact repr)."""
    header = {
        "kind": "model",
        "learner": model.kind,
        "params": dict(model.params),
        "cv_folds": model.cv_folds,
        "seed": model.seed,
        "classes": list(model.classes),
        "layout": list(model.layout),
        "feature_names": list(model.feature_names),
        "n_channels": model.n_channels,
        "cv_accuracy": model.cv_accuracy,
    }
    if model.kind == "knn":
        state: KnnState = model.state
        header["state"] = {
            "n_rows": int(state.train_x.shape[0]),
            "n_cols": int(state.train_x.shape[1]),
        }
        payload = (
            np.ascontiguousarray(state.train_x, dtype="<f8").tobytes()
            + np.ascontiguousarray(state.train_y, dtype="<i8").tobytes()
        )
    else:
        forest: Forest = model.state
        header["state"] = {
            "n_classes": forest.n_classes,
            "trees": [tree_to_jsonable(t) for t in forest.trees],
        }
        payload = b""
    _write_envelope(path, header, payload)


def load_model(path: str | Path) -> TrainedModel:
    header, payload = _read_envelope(path)
    if header.get("kind") != "model":
        raise ArchiveError(f"{path}: not a model archive")
    learner = header["learner"]
    if learner == "knn":
        n_rows = int(header["state"]["n_rows"])
        n_cols = int(header["state"]["n_cols"])
        expected = n_rows * n_cols * 8 + n_rows * 8
        _check_payload(path, header, payload, expected)
        split = n_rows * n_cols * 8
        train_x = np.frombuffer(payload[:split], dtype="<f8").reshape(n_rows, n_cols)
        train_y = np.frombuffer(payload[split:], dtype="<i8")
        state = KnnState(train_x=train_x, train_y=train_y)
    elif learner == "random_forest":
        _check_payload(path, header, payload, 0)
        state = Forest(
            trees=tuple(
                tree_from_jsonable(t) for t in header["state"]["trees"]
            ),
            n_classes=int(header["state"]["n_classes"]),
        )
    else:
        raise ArchiveError(f"{path}: unknown learner {learner!r}")
    params = dict(header["params"])
    return TrainedModel(
        kind=learner,
        params=params,
        cv_folds=int(header["cv_folds"]),
        seed=int(header["seed"]),
        classes=tuple(header["classes"]),
        layout=tuple(header["layout"]),
        feature_names=tuple(header["feature_names"]),
        n_channels=int(header["n_channels"]),
        state=state,
        cv_accuracy=float(header["cv_accuracy"]),
    )


def save_predictions(pred: Predictions, path: str | Path) -> None:
    """Write predictions as deterministic JSON (stable for content hashing)."""
    doc = {
        "schema_version": SCHEMA_VERSION,
        "kind": "predictions",
        "names": list(pred.names),
        "classes": list(pred.classes),
        "labels": list(pred.labels),
        "probs": None if pred.probs is None else _probs_to_jsonable(pred.probs),
        "errors": list(pred.errors),
    }
    text = json.dumps(doc, sort_keys=True, separators=(",", ":"), ensure_ascii=False)
    Path(path).write_text(text + "\n", encoding="utf-8")


def _probs_to_jsonable(probs: np.ndarray) -> list:
    return [
        [None if np.isnan(p) else float(p) for p in row] for row in probs
    ]


def load_predictions(path: str | Path) -> Predictions:
    doc = json.loads(Path(path).read_text(encoding="utf-8"))
    if doc.get("kind") != "predictions":
        raise ArchiveError(f"{path}: not a predictions file")
    probs = doc["probs"]
    arr = None
    if probs is not None:
        arr = np.array(
            [[np.nan if p is None else p for p in row] for row in probs],
            dtype=np.float64,
        )
    return Predictions(
        names=tuple(doc["names"]),
        classes=tuple(doc["classes"]),
        labels=tuple(doc["labels"]),
        probs=arr,
        errors=tuple(doc["errors"]),
    )
