"""The warn-before-posting pipeline: deletion risk, disinfo check, reason.

Stages 1 (deletion) and 2 (disinfo) always run on the raw draft text, each
with its own bundle's preprocessing and vocabulary. Stage 3 (the
fine-grained reason) runs only when stage 2 says disinfo, because that model
is trained exclusively on disinformative records. Warnings come out in a
fixed order: DELETE_RISK first, then the reason-specific code.
"""

from __future__ import annotations

import hashlib
from dataclasses import dataclass
from pathlib import Path

from .bundle import ModelBundle, bundle_fingerprint, load_bundle
from .errors import DataError, ModelError
from .experiments import DELETION_LABELS, DISINFO_LABELS, REASON_LABELS
from .features import vectorize_text
from .models import predict

STAGE_LABELS = {
    "deletion": DELETION_LABELS,
    "disinfo": DISINFO_LABELS,
    "reason": REASON_LABELS,
}

_WARNING_TEXT = {
    "DELETE_RISK": "This draft resembles tweets that ended up deleted.",
    "WARN_HS": "This draft may be read as hate speech against a group or person.",
    "WARN_OFFENSIVE": "This draft contains language likely to be seen as offensive.",
    "WARN_RUMOR": "This draft repeats a claim that circulated as an unverified rumor.",
    "WARN_SPAM": "This draft looks like spam or unsolicited promotion.",
}

_REASON_WARNING = {
    "hate_speech": "WARN_HS",
    "offensive": "WARN_OFFENSIVE",
    "rumor": "WARN_RUMOR",
    "spam": "WARN_SPAM",
}


@dataclass(frozen=True)
class StageVerdict:
    label: str
    score: float


@dataclass(frozen=True)
class CheckWarning:
    code: str
    message: str


@dataclass(frozen=True)
class CheckResult:
    deletion: StageVerdict
    disinfo: StageVerdict
    reason: StageVerdict | None
    warnings: tuple[CheckWarning, ...]


def _require_labels(bundle: ModelBundle, stage: str) -> None:
    expected = STAGE_LABELS[stage]
    if bundle.labels != expected:
        raise ModelError(
            f"{stage} bundle has classes {bundle.labels.names}, expected {expected.names}"
        )


@dataclass(frozen=True)
class CascadeBundle:
    """Three stage bundles plus decision thresholds (0 means plain argmax)."""

    deletion: ModelBundle
    disinfo: ModelBundle
    reason: ModelBundle
    threshold_deletion: float = 0.0
    threshold_disinfo: float = 0.0
    fingerprints: tuple[tuple[str, str], ...] = ()

    def __post_init__(self):
        _require_labels(self.deletion, "deletion")
        _require_labels(self.disinfo, "disinfo")
        _require_labels(self.reason, "reason")
        if not self.fingerprints:
            prints = tuple(
                (stage, bundle_fingerprint(getattr(self, stage)))
                for stage in ("deletion", "disinfo", "reason")
            )
            object.__setattr__(self, "fingerprints", prints)

    @property
    def fingerprint(self) -> str:
        """One digest covering all three stage bundles."""
        joined = "\n".join(f"{stage}:{digest}" for stage, digest in self.fingerprints)
        return hashlib.sha256(joined.encode("ascii")).hexdigest()


def _binary_stage(bundle: ModelBundle, text: str, threshold: float) -> StageVerdict:
    vector = vectorize_text(text, bundle.vocabulary, bundle.config)
    prediction = predict(bundle.model, vector)
    positive, negative = bundle.labels.names
    margin = prediction.scores[0] - prediction.scores[1]
    label = positive if margin >= threshold else negative
    score = prediction.scores[0] if label == positive else prediction.scores[1]
    return StageVerdict(label=label, score=float(score))


def check(text: str, cascade: CascadeBundle) -> CheckResult:
    """Run the cascade on one draft; deterministic for a fixed bundle."""
    if not text or not text.strip():
        raise DataError("text is empty")
    deletion = _binary_stage(cascade.deletion, text, cascade.threshold_deletion)
    disinfo = _binary_stage(cascade.disinfo, text, cascade.threshold_disinfo)
    reason = None
    if disinfo.label == "disinfo":
        vector = vectorize_text(text, cascade.reason.vocabulary, cascade.reason.config)
        prediction = predict(cascade.reason.model, vector)
        idx = cascade.reason.labels.index_of(prediction.label)
        reason = StageVerdict(label=prediction.label, score=float(prediction.scores[idx]))
    warnings = []
    if deletion.label == "deleted":
        warnings.append(CheckWarning("DELETE_RISK", _WARNING_TEXT["DELETE_RISK"]))
    if reason is not None:
        code = _REASON_WARNING[reason.label]
        warnings.append(CheckWarning(code, _WARNING_TEXT[code]))
    return CheckResult(
        deletion=deletion, disinfo=disinfo, reason=reason, warnings=tuple(warnings)
    )


def check_result_to_dict(result: CheckResult) -> dict:
    def stage(v: StageVerdict | None):
        return None if v is None else {"label": v.label, "score": v.score}

    return {
        "deletion": stage(result.deletion),
        "disinfo": stage(result.disinfo),
        "reason": stage(result.reason),
        "warnings": [{"code": w.code, "message": w.message} for w in result.warnings],
    }


_MANIFEST_KEYS = (
    "deletion_bundle",
    "disinfo_bundle",
    "reason_bundle",
    "threshold_deletion",
    "threshold_disinfo",
)


def write_manifest(
    path,
    deletion_bundle: str,
    disinfo_bundle: str,
    reason_bundle: str,
    threshold_deletion: float = 0.0,
    threshold_disinfo: float = 0.0,
) -> None:
    """Plain key=value manifest; bundle paths are relative to the manifest."""
    lines = [
        f"deletion_bundle={deletion_bundle}",
        f"disinfo_bundle={disinfo_bundle}",
        f"reason_bundle={reason_bundle}",
        f"threshold_deletion={threshold_deletion!r}",
        f"threshold_disinfo={threshold_disinfo!r}",
    ]
    Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8")


def load_cascade(manifest_path) -> CascadeBundle:
    manifest_path = Path(manifest_path)
    try:
        raw = manifest_path.read_text(encoding="utf-8")
    except OSError as exc:
        raise DataError(f"cannot read manifest {manifest_path}: {exc}") from None
    values: dict[str, str] = {}
    for line_no, line in enumerate(raw.splitlines(), start=1):
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        if "=" not in line:
            raise DataError(f"{manifest_path}:{line_no}: expected key=value, got {line!r}")
        key, _, value = line.partition("=")
        key = key.strip()
        if key not in _MANIFEST_KEYS:
            raise DataError(f"{manifest_path}:{line_no}: unknown manifest key {key!r}")
        if key in values:
            raise DataError(f"{manifest_path}:{line_no}: duplicate manifest key {key!r}")
        values[key] = value.strip()
    for key in ("deletion_bundle", "disinfo_bundle", "reason_bundle"):
        if key not in values:
            raise DataError(f"manifest {manifest_path} is missing {key}")

    def threshold(key: str) -> float:
        text = values.get(key)
        if text is None:
            return 0.0
        try:
            return float(text)
        except ValueError:
            raise DataError(f"manifest {key} must be a number, got {text!r}") from None

    base = manifest_path.parent
    bundles = {}
    fingerprints = []
    for stage in ("deletion", "disinfo", "reason"):
        bundle_path = base / values[f"{stage}_bundle"]
        bundles[stage] = load_bundle(bundle_path)
        fingerprints.append((stage, hashlib.sha256(bundle_path.read_bytes()).hexdigest()))
    return CascadeBundle(
        deletion=bundles["deletion"],
        disinfo=bundles["disinfo"],
        reason=bundles["reason"],
        threshold_deletion=threshold("threshold_deletion"),
        threshold_disinfo=threshold("threshold_disinfo"),
        fingerprints=tuple(fingerprints),
    )
