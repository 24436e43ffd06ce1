"""Corpus data model, file ingestion, weak labeling, and stratified splitting.

A corpus is an immutable ordered list of tweet records loaded from JSONL or
TSV. All operations here are pure functions: splitting is a deterministic
function of (file order, seed), so experiments are reproducible byte for byte.
"""

from __future__ import annotations

import datetime as _dt
import hashlib
import json
import warnings
from dataclasses import dataclass, replace
from enum import Enum
from fractions import Fraction
from pathlib import Path
from typing import Iterable, Iterator, Sequence

import numpy as np

from .errors import CorpusFormatError, DataError, DuplicateIdError, InvariantError


class DeletionLabel(Enum):
    DELETED = "deleted"
    NOT_DELETED = "not_deleted"
    UNKNOWN = "unknown"


class CategoryLabel(Enum):
    NOT_DISINFO = "not_disinfo"
    HATE_SPEECH = "hate_speech"
    OFFENSIVE = "offensive"
    RUMOR = "rumor"
    SPAM = "spam"
    UNLABELED = "unlabeled"


class LabelSource(Enum):
    MANUAL = "manual"
    WEAK = "weak"
    NONE = "none"


class UserStatus(Enum):
    SUSPENDED = "suspended"
    ACCOUNT_DELETED = "account_deleted"
    ACTIVE_PRIVATE = "active_private"
    ACTIVE_PUBLIC = "active_public"
    UNKNOWN = "unknown"


#: Categories counted as "disinformative" (umbrella term, not strict disinformation).
DISINFORMATIVE_CATEGORIES = (
    CategoryLabel.HATE_SPEECH,
    CategoryLabel.OFFENSIVE,
    CategoryLabel.RUMOR,
    CategoryLabel.SPAM,
)

ATTRIBUTE_FLAGS = ("has_hashtag", "has_url", "has_mention", "is_reply", "is_retweet")


class CorpusFormat(Enum):
    JSONL = "jsonl"
    TSV = "tsv"


class StratifyAxis(Enum):
    DELETION_LABEL = "deletion"
    CATEGORY_LABEL = "category"


class DistributionAxis(Enum):
    DELETION_LABEL = "deletion"
    CATEGORY_LABEL = "category"
    LABEL_SOURCE = "label_source"


class WeakLabelRule(Enum):
    NON_DELETED_AS_NOT_DISINFO = "non_deleted_as_not_disinfo"


@dataclass(frozen=True)
class TweetRecord:
    """One post with its labels, attribute flags, and author account status.

    ``user_id`` and ``target`` are optional analysis columns: an opaque author
    id (hashed upstream, never a real identity) and an annotated target string
    for hate-speech frequency counts.
    """

    id: str
    text: str
    deletion_label: DeletionLabel = DeletionLabel.UNKNOWN
    category_label: CategoryLabel = CategoryLabel.UNLABELED
    label_source: LabelSource = LabelSource.NONE
    has_hashtag: bool = False
    has_url: bool = False
    has_mention: bool = False
    is_reply: bool = False
    is_retweet: bool = False
    user_status: UserStatus = UserStatus.UNKNOWN
    user_id: str | None = None
    target: str | None = None

    def __post_init__(self):
        if not self.id:
            raise InvariantError("record id must be non-empty")
        if not self.text.strip():
            raise InvariantError(f"record {self.id!r}: text is empty after whitespace trim")
        if self.category_label is not CategoryLabel.UNLABELED and self.label_source not in (
            LabelSource.MANUAL,
            LabelSource.WEAK,
        ):
            raise InvariantError(
                f"record {self.id!r}: category {self.category_label.value!r} requires "
                f"label_source manual or weak, got {self.label_source.value!r}"
            )
        if self.label_source is LabelSource.WEAK and self.category_label is not CategoryLabel.NOT_DISINFO:
            raise InvariantError(
                f"record {self.id!r}: weak labels exist only for not_disinfo, "
                f"got {self.category_label.value!r}"
            )

    @property
    def is_disinformative(self) -> bool:
        return self.category_label in DISINFORMATIVE_CATEGORIES


@dataclass(frozen=True)
class Corpus:
    """Immutable ordered collection of records with unique ids."""

    records: tuple[TweetRecord, ...]
    provenance: str = ""

    def __post_init__(self):
        if not isinstance(self.records, tuple):
            object.__setattr__(self, "records", tuple(self.records))
        seen: set[str] = set()
        for rec in self.records:
            if rec.id in seen:
                raise DuplicateIdError(rec.id)
            seen.add(rec.id)

    def __len__(self) -> int:
        return len(self.records)

    def __iter__(self) -> Iterator[TweetRecord]:
        return iter(self.records)

    def texts(self) -> list[str]:
        return [rec.text for rec in self.records]

    def ids(self) -> list[str]:
        return [rec.id for rec in self.records]

    def filter(self, keep, provenance: str = "") -> "Corpus":
        """New corpus with the records satisfying ``keep``, order preserved."""
        return Corpus(tuple(r for r in self.records if keep(r)), provenance or self.provenance)


# ---------------------------------------------------------------------------
# File formats
# ---------------------------------------------------------------------------

_CORE_KEYS = (
    "id",
    "text",
    "deletion_label",
    "category_label",
    "label_source",
    "has_hashtag",
    "has_url",
    "has_mention",
    "is_reply",
    "is_retweet",
    "user_status",
)
_OPTIONAL_KEYS = ("user_id", "target")

# TSV text escaping: backslash escaped too, so the mapping is lossless.
_TSV_ESCAPE = {"\\": "\\\\", "\t": "\\t", "\n": "\\n", "\r": "\\r"}
_TSV_UNESCAPE = {"\\": "\\", "t": "\t", "n": "\n", "r": "\r"}


def _tsv_escape(value: str) -> str:
    out = []
    for ch in value:
        out.append(_TSV_ESCAPE.get(ch, ch))
    return "".join(out)


def _tsv_unescape(value: str) -> str:
    out = []
    i = 0
    while i < len(value):
        ch = value[i]
        if ch == "\\":
            if i + 1 >= len(value) or value[i + 1] not in _TSV_UNESCAPE:
                raise ValueError(f"invalid escape sequence at column offset {i}")
            out.append(_TSV_UNESCAPE[value[i + 1]])
            i += 2
        else:
            out.append(ch)
            i += 1
    return "".join(out)


def _parse_enum(enum_cls, value, key: str):
    try:
        return enum_cls(value)
    except ValueError:
        allowed = ", ".join(e.value for e in enum_cls)
        raise ValueError(f"{key}={value!r} is not one of: {allowed}") from None


def _parse_bool(value, key: str, from_string: bool) -> bool:
    if from_string:
        if value == "true":
            return True
        if value == "false":
            return False
    elif isinstance(value, bool):
        return value
    raise ValueError(f"{key}={value!r} is not a boolean")


def _record_from_mapping(obj: dict, booleans_are_strings: bool) -> TweetRecord:
    missing = [k for k in _CORE_KEYS if k not in obj]
    if missing:
        raise ValueError(f"missing keys: {', '.join(missing)}")
    unknown = [k for k in obj if k not in _CORE_KEYS and k not in _OPTIONAL_KEYS]
    if unknown:
        raise ValueError(f"unexpected keys: {', '.join(sorted(unknown))}")
    if not isinstance(obj["id"], str) or not isinstance(obj["text"], str):
        raise ValueError("id and text must be strings")
    flags = {}
    for key in ATTRIBUTE_FLAGS:
        flags[key] = _parse_bool(obj[key], key, from_string=booleans_are_strings)
    return TweetRecord(
        id=obj["id"],
        text=obj["text"],
        deletion_label=_parse_enum(DeletionLabel, obj["deletion_label"], "deletion_label"),
        category_label=_parse_enum(CategoryLabel, obj["category_label"], "category_label"),
        label_source=_parse_enum(LabelSource, obj["label_source"], "label_source"),
        user_status=_parse_enum(UserStatus, obj["user_status"], "user_status"),
        user_id=obj.get("user_id") or None,
        target=obj.get("target") or None,
        **flags,
    )


def record_to_mapping(rec: TweetRecord) -> dict:
    """Canonical JSON mapping for one record (key order fixed)."""
    obj = {
        "id": rec.id,
        "text": rec.text,
        "deletion_label": rec.deletion_label.value,
        "category_label": rec.category_label.value,
        "label_source": rec.label_source.value,
        "has_hashtag": rec.has_hashtag,
        "has_url": rec.has_url,
        "has_mention": rec.has_mention,
        "is_reply": rec.is_reply,
        "is_retweet": rec.is_retweet,
        "user_status": rec.user_status.value,
    }
    if rec.user_id is not None:
        obj["user_id"] = rec.user_id
    if rec.target is not None:
        obj["target"] = rec.target
    return obj


def infer_format(path: str | Path) -> CorpusFormat:
    suffix = Path(path).suffix.lower()
    if suffix in (".jsonl", ".ndjson", ".json"):
        return CorpusFormat.JSONL
    if suffix in (".tsv", ".tab", ".txt"):
        return CorpusFormat.TSV
    raise DataError(f"cannot infer corpus format from suffix {suffix!r}; pass the format explicitly")


def load_corpus(path: str | Path, fmt: CorpusFormat | None = None) -> Corpus:
    """Load a corpus file, enforcing all record and corpus invariants.

    Malformed lines raise :class:`CorpusFormatError` carrying the 1-based line
    number; a repeated id raises on the line of its second occurrence.
    """
    path = Path(path)
    if not path.exists():
        raise DataError(f"corpus file not found: {path}")
    fmt = fmt or infer_format(path)
    records: list[TweetRecord] = []
    seen: dict[str, int] = {}

    def add(rec: TweetRecord, line_no: int):
        if rec.id in seen:
            raise CorpusFormatError(
                f"duplicate record id {rec.id!r} (first seen on line {seen[rec.id]})",
                str(path),
                line_no,
            )
        seen[rec.id] = line_no
        records.append(rec)

    with path.open("r", encoding="utf-8") as fh:
        if fmt is CorpusFormat.JSONL:
            for line_no, line in enumerate(fh, start=1):
                if not line.strip():
                    continue
                try:
                    obj = json.loads(line)
                    if not isinstance(obj, dict):
                        raise ValueError("line is not a JSON object")
                    rec = _record_from_mapping(obj, booleans_are_strings=False)
                except CorpusFormatError:
                    raise
                except (ValueError, InvariantError) as exc:
                    raise CorpusFormatError(str(exc), str(path), line_no) from None
                add(rec, line_no)
        else:
            header_line = fh.readline()
            if not header_line:
                raise CorpusFormatError("missing header row", str(path), 1)
            header = header_line.rstrip("\n").split("\t")
            unknown = [c for c in header if c not in _CORE_KEYS and c not in _OPTIONAL_KEYS]
            missing = [c for c in _CORE_KEYS if c not in header]
            if unknown or missing:
                detail = []
                if missing:
                    detail.append(f"missing columns: {', '.join(missing)}")
                if unknown:
                    detail.append(f"unknown columns: {', '.join(unknown)}")
                raise CorpusFormatError("; ".join(detail), str(path), 1)
            for line_no, line in enumerate(fh, start=2):
                if not line.strip():
                    continue
                cells = line.rstrip("\n").split("\t")
                if len(cells) != len(header):
                    raise CorpusFormatError(
                        f"expected {len(header)} columns, got {len(cells)}", str(path), line_no
                    )
                try:
                    obj = {key: _tsv_unescape(cell) for key, cell in zip(header, cells)}
                    rec = _record_from_mapping(obj, booleans_are_strings=True)
                except (ValueError, InvariantError) as exc:
                    raise CorpusFormatError(str(exc), str(path), line_no) from None
                add(rec, line_no)

    loaded_at = _dt.datetime.now(_dt.timezone.utc).isoformat(timespec="seconds")
    return Corpus(tuple(records), provenance=f"{path} ({fmt.value}, loaded {loaded_at})")


def save_corpus(corpus: Corpus, path: str | Path, fmt: CorpusFormat | None = None) -> None:
    """Write a corpus file. Optional columns appear only if some record uses them."""
    path = Path(path)
    fmt = fmt or infer_format(path)
    with path.open("w", encoding="utf-8") as fh:
        if fmt is CorpusFormat.JSONL:
            for rec in corpus:
                fh.write(json.dumps(record_to_mapping(rec), ensure_ascii=False) + "\n")
        else:
            columns = list(_CORE_KEYS)
            for opt in _OPTIONAL_KEYS:
                if any(getattr(rec, opt) is not None for rec in corpus):
                    columns.append(opt)
            fh.write("\t".join(columns) + "\n")
            for rec in corpus:
                obj = record_to_mapping(rec)
                cells = []
                for col in columns:
                    value = obj.get(col)
                    if value is None:
                        cells.append("")
                    elif isinstance(value, bool):
                        cells.append("true" if value else "false")
                    else:
                        cells.append(_tsv_escape(value))
                fh.write("\t".join(cells) + "\n")


def corpus_fingerprint(corpus: Corpus) -> str:
    """SHA-256 over the canonical JSONL serialization of the records."""
    digest = hashlib.sha256()
    for rec in corpus:
        digest.update(json.dumps(record_to_mapping(rec), ensure_ascii=False).encode("utf-8"))
        digest.update(b"\n")
    return digest.hexdigest()


# ---------------------------------------------------------------------------
# Weak labels
# ---------------------------------------------------------------------------


def apply_weak_labels(
    corpus: Corpus, rule: WeakLabelRule = WeakLabelRule.NON_DELETED_AS_NOT_DISINFO
) -> Corpus:
    """Label every non-deleted, unlabeled record as not_disinfo (weak source).

    Idempotent: records that already carry any label are untouched.
    """
    if rule is not WeakLabelRule.NON_DELETED_AS_NOT_DISINFO:
        raise DataError(f"unknown weak-label rule: {rule}")
    out = []
    for rec in corpus:
        if (
            rec.deletion_label is DeletionLabel.NOT_DELETED
            and rec.category_label is CategoryLabel.UNLABELED
        ):
            rec = replace(
                rec, category_label=CategoryLabel.NOT_DISINFO, label_source=LabelSource.WEAK
            )
        out.append(rec)
    return Corpus(tuple(out), provenance=corpus.provenance)


def drop_duplicate_texts(corpus: Corpus) -> Corpus:
    """Keep the first record for each exact text string (off by default in the CLI)."""
    seen: set[str] = set()
    out = []
    for rec in corpus:
        if rec.text in seen:
            continue
        seen.add(rec.text)
        out.append(rec)
    return Corpus(tuple(out), provenance=corpus.provenance)


# ---------------------------------------------------------------------------
# Stratified splitting
# ---------------------------------------------------------------------------


class SplitWarning(UserWarning):
    """Emitted when a stratum is too small to populate every part."""


def _as_fraction(value) -> Fraction:
    if isinstance(value, Fraction):
        return value
    if isinstance(value, str):
        return Fraction(value)
    if isinstance(value, float):
        # via the decimal literal, so 0.7 means 7/10, not its binary expansion
        return Fraction(str(value))
    raise DataError(f"fraction must be a Fraction, str, or float, got {type(value).__name__}")


@dataclass(frozen=True)
class SplitSpec:
    """Train/dev/test fractions (exact rationals), seed, and stratification axis."""

    fractions: tuple[Fraction, Fraction, Fraction] = (
        Fraction(7, 10),
        Fraction(1, 10),
        Fraction(2, 10),
    )
    seed: int = 0
    stratify_on: StratifyAxis = StratifyAxis.DELETION_LABEL

    def __post_init__(self):
        fracs = tuple(_as_fraction(f) for f in self.fractions)
        object.__setattr__(self, "fractions", fracs)
        if len(fracs) != 3:
            raise DataError("exactly three fractions (train, dev, test) are required")
        for f in fracs:
            if not (0 < f < 1):
                raise DataError(f"each fraction must lie in (0, 1), got {f}")
        if sum(fracs) != 1:
            raise DataError(f"fractions must sum to 1 exactly, got {sum(fracs)}")


@dataclass(frozen=True)
class SplitResult:
    train: Corpus
    dev: Corpus
    test: Corpus

    def parts(self) -> tuple[tuple[str, Corpus], ...]:
        return (("train", self.train), ("dev", self.dev), ("test", self.test))


def largest_remainder_sizes(n: int, fractions: Sequence[Fraction]) -> list[int]:
    """Apportion ``n`` into integer parts by the largest-remainder rule.

    Floors the exact shares, then hands the leftover units to the largest
    fractional remainders; remainder ties go to the earlier part.
    """
    shares = [_as_fraction(f) * n for f in fractions]
    sizes = [int(s) for s in shares]
    leftover = n - sum(sizes)
    by_remainder = sorted(range(len(shares)), key=lambda i: shares[i] - sizes[i], reverse=True)
    for i in by_remainder[:leftover]:
        sizes[i] += 1
    return sizes


def _stratum_rng(seed: int, stratum: str) -> np.random.Generator:
    # PCG64 seeded from (seed, blake2b-64(stratum)): platform independent,
    # stable across runs, and insensitive to which other strata exist.
    digest = hashlib.blake2b(stratum.encode("utf-8"), digest_size=8).digest()
    seq = np.random.SeedSequence([seed & 0xFFFFFFFFFFFFFFFF, int.from_bytes(digest, "big")])
    return np.random.Generator(np.random.PCG64(seq))


def _stratum_key(rec: TweetRecord, axis: StratifyAxis) -> str:
    if axis is StratifyAxis.DELETION_LABEL:
        if rec.deletion_label is DeletionLabel.UNKNOWN:
            raise DataError(f"record {rec.id!r} has deletion_label unknown; cannot stratify")
        return rec.deletion_label.value
    if rec.category_label is CategoryLabel.UNLABELED:
        raise DataError(f"record {rec.id!r} has category_label unlabeled; cannot stratify")
    return rec.category_label.value


def stratified_split(corpus: Corpus, spec: SplitSpec) -> SplitResult:
    """Deterministic stratified split: exact largest-remainder sizes per class.

    Within each stratum the records are shuffled by a PRNG derived from
    (seed, stratum) and dealt to train/dev/test; each part then keeps the
    original corpus order. The three parts always partition the input.
    """
    if len(corpus) == 0:
        raise DataError("cannot split an empty corpus")
    strata: dict[str, list[int]] = {}
    for pos, rec in enumerate(corpus.records):
        strata.setdefault(_stratum_key(rec, spec.stratify_on), []).append(pos)

    part_positions: tuple[list[int], list[int], list[int]] = ([], [], [])
    for stratum, positions in strata.items():
        if len(positions) < 3:
            warnings.warn(
                f"stratum {stratum!r} has only {len(positions)} record(s); "
                "some parts will receive none of it",
                SplitWarning,
                stacklevel=2,
            )
        sizes = largest_remainder_sizes(len(positions), spec.fractions)
        perm = _stratum_rng(spec.seed, stratum).permutation(len(positions))
        shuffled = [positions[i] for i in perm]
        start = 0
        for part_idx, size in enumerate(sizes):
            part_positions[part_idx].extend(shuffled[start : start + size])
            start += size

    parts = []
    for name, positions in zip(("train", "dev", "test"), part_positions):
        positions.sort()
        parts.append(
            Corpus(
                tuple(corpus.records[i] for i in positions),
                provenance=f"{name} split of: {corpus.provenance}",
            )
        )
    return SplitResult(*parts)


# ---------------------------------------------------------------------------
# Distribution report
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class DistributionRow:
    value: str
    count: int
    percent: float


def distribution_report(corpus: Corpus, axis: DistributionAxis) -> list[DistributionRow]:
    """Counts and percentages along one label axis, in enum declaration order.

    Values that never occur are omitted; an empty corpus yields an empty table.
    """
    attr = {
        DistributionAxis.DELETION_LABEL: "deletion_label",
        DistributionAxis.CATEGORY_LABEL: "category_label",
        DistributionAxis.LABEL_SOURCE: "label_source",
    }[axis]
    counts: dict[str, int] = {}
    order: list[str] = []
    enum_cls = type(getattr(corpus.records[0], attr)) if len(corpus) else None
    if enum_cls is not None:
        order = [e.value for e in enum_cls]
    for rec in corpus:
        counts[getattr(rec, attr).value] = counts.get(getattr(rec, attr).value, 0) + 1
    total = len(corpus)
    return [
        DistributionRow(value, counts[value], 100.0 * counts[value] / total)
        for value in order
        if value in counts
    ]
