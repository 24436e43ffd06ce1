"""A tiny hand-built cascade with margins you can compute on paper.

Shared vocabulary (lexicographic order, equal document frequency so every
idf is identical and a single-term document vectorizes to weight 1.0):

    badattack, benignword, offensiveslur, rumorclaim, spamoffer

Every trigger term carries weight +2 toward the risky class, benignword
carries -1, and biases are -0.5/+0.5, so a one-trigger draft scores margin
2*1 - 0.5 = 1.5 for the risky side and -1.5 for the safe side. Unknown words
vectorize to the zero vector and fall back to the biases, which favor the
safe class. In the reason model each trigger maps to its own class
(badattack -> hate_speech, offensiveslur -> offensive, rumorclaim -> rumor,
spamoffer -> spam); equal-margin ties resolve to the lowest class index.
"""

from __future__ import annotations

from pathlib import Path

import numpy as np

from .bundle import ModelBundle, TrainingMetadata, save_bundle
from .cascade import CascadeBundle, write_manifest
from .experiments import DELETION_LABELS, DISINFO_LABELS, REASON_LABELS
from .features import Vocabulary
from .models import LabelMap, LinearSvmModel, SvmHyperparams
from .textprep import DEFAULT_CONFIG

FIXTURE_TERMS = ("badattack", "benignword", "offensiveslur", "rumorclaim", "spamoffer")
HS_TRIGGER = "badattack"
BENIGN_TEXT = "benignword"

_TRIGGER_CLASS = {
    "badattack": "hate_speech",
    "offensiveslur": "offensive",
    "rumorclaim": "rumor",
    "spamoffer": "spam",
}

_METADATA = TrainingMetadata(
    corpus_fingerprint="fixture", seed=0, timestamp="1970-01-01T00:00:00Z"
)


def _fixture_vocabulary() -> Vocabulary:
    return Vocabulary(
        terms=FIXTURE_TERMS,
        document_frequency=[1] * len(FIXTURE_TERMS),
        n_documents=len(FIXTURE_TERMS),
        min_df=1,
        max_features=None,
    )


def _svm_bundle(labels: LabelMap, weights: np.ndarray, biases: np.ndarray) -> ModelBundle:
    hp = SvmHyperparams()
    model = LinearSvmModel(
        labels=labels,
        weights=weights,
        biases=biases,
        hyperparams=hp,
        objective_history=np.zeros((len(labels), hp.epochs)),
    )
    return ModelBundle(
        config=DEFAULT_CONFIG,
        vocabulary=_fixture_vocabulary(),
        model=model,
        labels=labels,
        metadata=_METADATA,
    )


def _binary_bundle(labels: LabelMap) -> ModelBundle:
    risky = np.array([2.0, -1.0, 2.0, 2.0, 2.0])
    weights = np.vstack([risky, -risky])
    biases = np.array([-0.5, 0.5])
    return _svm_bundle(labels, weights, biases)


def _reason_bundle() -> ModelBundle:
    weights = np.zeros((len(REASON_LABELS), len(FIXTURE_TERMS)))
    for column, term in enumerate(FIXTURE_TERMS):
        if term == "benignword":
            weights[:, column] = -1.0
        else:
            weights[REASON_LABELS.index_of(_TRIGGER_CLASS[term]), column] = 2.0
    biases = np.full(len(REASON_LABELS), -0.5)
    return _svm_bundle(REASON_LABELS, weights, biases)


def build_fixture_cascade() -> CascadeBundle:
    return CascadeBundle(
        deletion=_binary_bundle(DELETION_LABELS),
        disinfo=_binary_bundle(DISINFO_LABELS),
        reason=_reason_bundle(),
    )


def save_fixture_cascade(directory) -> Path:
    """Write the three fixture bundles plus a manifest; returns the manifest path."""
    directory = Path(directory)
    directory.mkdir(parents=True, exist_ok=True)
    cascade = build_fixture_cascade()
    names = {}
    for stage in ("deletion", "disinfo", "reason"):
        filename = f"{stage}.bundle"
        save_bundle(getattr(cascade, stage), directory / filename)
        names[stage] = filename
    manifest = directory / "cascade.manifest"
    write_manifest(
        manifest,
        deletion_bundle=names["deletion"],
        disinfo_bundle=names["disinfo"],
        reason_bundle=names["reason"],
    )
    return manifest
