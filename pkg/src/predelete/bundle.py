"""Model persistence: one self-describing binary file per trained model.

Layout (version 1, little-endian throughout):

  1. magic line   ``predelete-bundle 1\\n`` (ASCII)
  2. header line  one-line JSON object ending in ``\\n`` (UTF-8): format
                  version, training metadata, label names, normalization
                  config, vocabulary terms and scalars, model kind and
                  hyperparameters
  3. u64          number of numeric sections
  4. sections     each: u64 name length, name (UTF-8), u64 value count,
                  values as float64
  5. sha256       32-byte digest over every preceding byte

Loading verifies the digest before parsing, so truncation or corruption
surfaces as ``BundleChecksumError`` and an unrecognized version as
``BundleVersionError``. A round-trip preserves predictions bit for bit.
"""

from __future__ import annotations

import hashlib
import json
import struct
from dataclasses import dataclass

import numpy as np

from .errors import BundleChecksumError, BundleFormatError, BundleVersionError, ModelError
from .features import Vocabulary
from .models import (
    DecisionTree,
    ForestHyperparams,
    ForestModel,
    LabelMap,
    LinearSvmModel,
    MajorityModel,
    SvmHyperparams,
)
from .textprep import NormalizationConfig

FORMAT_VERSION = 1
_MAGIC_PREFIX = b"predelete-bundle "
_U64 = struct.Struct("<Q")


@dataclass(frozen=True)
class TrainingMetadata:
    """Provenance recorded inside every bundle."""

    corpus_fingerprint: str
    seed: int
    timestamp: str

    def __post_init__(self):
        if not self.timestamp:
            raise ModelError("training metadata needs a timestamp")


@dataclass(frozen=True)
class ModelBundle:
    """A trained model plus everything needed to score raw text."""

    config: NormalizationConfig
    vocabulary: Vocabulary
    model: MajorityModel | LinearSvmModel | ForestModel
    labels: LabelMap
    metadata: TrainingMetadata
    format_version: int = FORMAT_VERSION

    def __post_init__(self):
        if self.format_version != FORMAT_VERSION:
            raise BundleVersionError(
                f"bundle format version {self.format_version} unsupported; "
                f"this build writes version {FORMAT_VERSION}"
            )
        if self.model.labels != self.labels:
            raise ModelError("bundle label map must match the model's label map")
        if isinstance(self.model, LinearSvmModel) and self.model.n_features != len(
            self.vocabulary
        ):
            raise ModelError(
                f"SVM dimension {self.model.n_features} does not match "
                f"vocabulary size {len(self.vocabulary)}"
            )
        if isinstance(self.model, ForestModel) and self.model.n_features != len(self.vocabulary):
            raise ModelError(
                f"forest dimension {self.model.n_features} does not match "
                f"vocabulary size {len(self.vocabulary)}"
            )


def _model_header(model) -> dict:
    if isinstance(model, MajorityModel):
        return {"kind": "majority", "hyperparams": {}}
    if isinstance(model, LinearSvmModel):
        hp = model.hyperparams
        return {
            "kind": "svm",
            "hyperparams": {
                "lambda_reg": hp.lambda_reg,
                "epochs": hp.epochs,
                "seed": hp.seed,
                "balance_classes": hp.balance_classes,
            },
        }
    if isinstance(model, ForestModel):
        hp = model.hyperparams
        return {
            "kind": "forest",
            "hyperparams": {
                "n_trees": hp.n_trees,
                "max_depth": hp.max_depth,
                "max_features": hp.max_features,
                "seed": hp.seed,
                "bootstrap": hp.bootstrap,
            },
        }
    raise ModelError(f"cannot serialize model type {type(model).__name__}")


def _model_sections(model) -> list[tuple[str, np.ndarray]]:
    if isinstance(model, MajorityModel):
        return [("class_counts", np.asarray(model.class_counts, dtype=np.float64))]
    if isinstance(model, LinearSvmModel):
        return [
            ("svm_weights", model.weights.reshape(-1)),
            ("svm_biases", model.biases),
            ("svm_objective", model.objective_history.reshape(-1)),
        ]
    offsets = [0]
    feature, threshold, left, right, counts = [], [], [], [], []
    for tree in model.trees:
        offsets.append(offsets[-1] + len(tree))
        feature.append(tree.feature)
        threshold.append(tree.threshold)
        left.append(tree.left)
        right.append(tree.right)
        counts.append(tree.counts)
    return [
        ("forest_features", np.concatenate(feature).astype(np.float64)),
        ("forest_thresholds", np.concatenate(threshold)),
        ("forest_left", np.concatenate(left).astype(np.float64)),
        ("forest_right", np.concatenate(right).astype(np.float64)),
        ("forest_counts", np.vstack(counts).reshape(-1)),
        ("forest_node_offsets", np.asarray(offsets, dtype=np.float64)),
    ]


def serialize_bundle(bundle: ModelBundle) -> bytes:
    header = {
        "format_version": bundle.format_version,
        "metadata": {
            "corpus_fingerprint": bundle.metadata.corpus_fingerprint,
            "seed": bundle.metadata.seed,
            "timestamp": bundle.metadata.timestamp,
        },
        "labels": list(bundle.labels.names),
        "normalization": bundle.config.to_dict(),
        "vocabulary": {
            "terms": list(bundle.vocabulary.terms),
            "n_documents": bundle.vocabulary.n_documents,
            "min_df": bundle.vocabulary.min_df,
            "max_features": bundle.vocabulary.max_features,
        },
        "model": _model_header(bundle.model),
    }
    sections = [
        ("document_frequency", bundle.vocabulary.document_frequency.astype(np.float64))
    ] + _model_sections(bundle.model)
    parts = [
        f"predelete-bundle {bundle.format_version}\n".encode("ascii"),
        json.dumps(header, ensure_ascii=False, sort_keys=True, separators=(",", ":")).encode(
            "utf-8"
        )
        + b"\n",
        _U64.pack(len(sections)),
    ]
    for name, values in sections:
        encoded = name.encode("utf-8")
        arr = np.ascontiguousarray(values, dtype="<f8")
        parts.append(_U64.pack(len(encoded)))
        parts.append(encoded)
        parts.append(_U64.pack(arr.size))
        parts.append(arr.tobytes())
    body = b"".join(parts)
    return body + hashlib.sha256(body).digest()


def save_bundle(bundle: ModelBundle, path) -> str:
    """Write the bundle; returns its fingerprint (sha256 hex of the file)."""
    data = serialize_bundle(bundle)
    with open(path, "wb") as handle:
        handle.write(data)
    return hashlib.sha256(data).hexdigest()


def bundle_fingerprint(bundle: ModelBundle) -> str:
    return hashlib.sha256(serialize_bundle(bundle)).hexdigest()


class _Reader:
    def __init__(self, data: bytes, offset: int):
        self.data = data
        self.offset = offset

    def take(self, n: int) -> bytes:
        if self.offset + n > len(self.data):
            raise BundleFormatError("section data runs past the end of the file")
        chunk = self.data[self.offset : self.offset + n]
        self.offset += n
        return chunk

    def u64(self) -> int:
        return _U64.unpack(self.take(8))[0]

    def floats(self, count: int) -> np.ndarray:
        return np.frombuffer(self.take(count * 8), dtype="<f8").copy()


def _parse_magic(data: bytes) -> tuple[int, int]:
    probe = min(len(data), len(_MAGIC_PREFIX))
    if data[:probe] != _MAGIC_PREFIX[:probe]:
        raise BundleFormatError("not a model bundle file")
    newline = data.find(b"\n")
    if len(data) < len(_MAGIC_PREFIX) or newline == -1:
        raise BundleChecksumError("file truncated inside the magic line")
    version_text = data[len(_MAGIC_PREFIX) : newline].decode("ascii", errors="replace")
    try:
        version = int(version_text)
    except ValueError:
        raise BundleFormatError(f"unreadable bundle version {version_text!r}") from None
    return version, newline + 1


def _rebuild_model(kind: str, hp: dict, labels: LabelMap, sections: dict, vocab_size: int):
    if kind == "majority":
        counts = sections.pop("class_counts").astype(np.int64)
        return MajorityModel(
            labels=labels,
            class_counts=tuple(int(c) for c in counts),
            majority_class=int(np.argmax(counts)),
        )
    if kind == "svm":
        hyper = SvmHyperparams(**hp)
        weights = sections.pop("svm_weights")
        if vocab_size:
            weights = weights.reshape(len(labels), vocab_size)
        else:
            weights = weights.reshape(len(labels), 0)
        history = sections.pop("svm_objective").reshape(len(labels), hyper.epochs)
        return LinearSvmModel(labels, weights, sections.pop("svm_biases"), hyper, history)
    if kind == "forest":
        hyper = ForestHyperparams(**hp)
        offsets = sections.pop("forest_node_offsets").astype(np.int64)
        feature = sections.pop("forest_features").astype(np.int64)
        threshold = sections.pop("forest_thresholds")
        left = sections.pop("forest_left").astype(np.int64)
        right = sections.pop("forest_right").astype(np.int64)
        counts = sections.pop("forest_counts").reshape(-1, len(labels))
        trees = []
        for i in range(len(offsets) - 1):
            lo, hi = int(offsets[i]), int(offsets[i + 1])
            trees.append(
                DecisionTree(feature[lo:hi], threshold[lo:hi], left[lo:hi], right[lo:hi],
                             counts[lo:hi])
            )
        return ForestModel(labels, trees, hyper, vocab_size)
    raise BundleFormatError(f"unknown model kind {kind!r}")


def deserialize_bundle(data: bytes) -> ModelBundle:
    version, header_start = _parse_magic(data)
    if version != FORMAT_VERSION:
        raise BundleVersionError(
            f"bundle format version {version} is not supported; this build reads "
            f"version {FORMAT_VERSION}"
        )
    if len(data) < header_start + 32:
        raise BundleChecksumError("file truncated before the checksum")
    digest = data[-32:]
    if hashlib.sha256(data[:-32]).digest() != digest:
        raise BundleChecksumError("checksum mismatch; the file is truncated or corrupted")
    body = data[:-32]
    header_end = body.find(b"\n", header_start)
    if header_end == -1:
        raise BundleFormatError("missing header line")
    try:
        header = json.loads(body[header_start:header_end].decode("utf-8"))
    except (UnicodeDecodeError, json.JSONDecodeError) as exc:
        raise BundleFormatError(f"unreadable header: {exc}") from None
    reader = _Reader(body, header_end + 1)
    sections: dict[str, np.ndarray] = {}
    try:
        for _ in range(reader.u64()):
            name = reader.take(reader.u64()).decode("utf-8")
            sections[name] = reader.floats(reader.u64())
        labels = LabelMap(tuple(header["labels"]))
        config = NormalizationConfig.from_dict(header["normalization"])
        voc = header["vocabulary"]
        vocabulary = Vocabulary(
            terms=voc["terms"],
            document_frequency=sections.pop("document_frequency").astype(np.int64),
            n_documents=voc["n_documents"],
            min_df=voc["min_df"],
            max_features=voc["max_features"],
        )
        metadata = TrainingMetadata(**header["metadata"])
        model = _rebuild_model(
            header["model"]["kind"], header["model"]["hyperparams"], labels, sections,
            len(vocabulary),
        )
    except KeyError as exc:
        raise BundleFormatError(f"bundle is missing field or section {exc}") from None
    if reader.offset != len(body):
        raise BundleFormatError("trailing bytes after the last section")
    return ModelBundle(
        config=config,
        vocabulary=vocabulary,
        model=model,
        labels=labels,
        metadata=metadata,
        format_version=version,
    )


def load_bundle(path) -> ModelBundle:
    with open(path, "rb") as handle:
        return deserialize_bundle(handle.read())
