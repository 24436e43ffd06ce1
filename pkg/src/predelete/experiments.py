"""The three experimental settings and their fixed label maps.

Setting (wire name / classes):

- deletion: will this tweet be deleted? classes deleted / not_deleted
- disinfo: is a deleted tweet disinformative? classes disinfo / not_disinfo
- reason: which disinformative category? hate_speech / offensive / rumor / spam

The disinfo and reason settings train and evaluate on manually annotated
records by default because weak labels exist only for the not_disinfo side;
``include_weak`` widens disinfo to weakly labeled records as well.
"""

from __future__ import annotations

import enum
import warnings

from .corpus import CategoryLabel, Corpus, DeletionLabel, LabelSource, TweetRecord
from .errors import DataError
from .models import LabelMap


class Setting(enum.Enum):
    DELETION = "deletion"
    DISINFO = "disinfo"
    REASON = "reason"


DELETION_LABELS = LabelMap(("deleted", "not_deleted"))
DISINFO_LABELS = LabelMap(("disinfo", "not_disinfo"))
REASON_LABELS = LabelMap(("hate_speech", "offensive", "rumor", "spam"))

_LABEL_MAPS = {
    Setting.DELETION: DELETION_LABELS,
    Setting.DISINFO: DISINFO_LABELS,
    Setting.REASON: REASON_LABELS,
}

# The reason-setting majority baseline is arithmetically 448/816 = 0.549 on
# the published test distribution, while the original study's results table
# prints 0.537 for that row. We assert the forced value and surface the
# divergence instead of guessing how the lower figure was produced.
ORIGINAL_REASON_MAJORITY_ACCURACY = 0.537


def reason_majority_note(accuracy: float) -> str:
    return (
        f"majority accuracy computed here is {accuracy:.3f}; on the originally "
        f"published test distribution this baseline is arithmetically 448/816 = 0.549, "
        f"while the original study's results table prints "
        f"{ORIGINAL_REASON_MAJORITY_ACCURACY:.3f} for that row"
    )


def label_map_for(setting: Setting) -> LabelMap:
    return _LABEL_MAPS[setting]


def gold_label(record: TweetRecord, setting: Setting, include_weak: bool = False) -> str | None:
    """The record's class name under a setting, or None when it carries none."""
    if setting is Setting.DELETION:
        if record.deletion_label is DeletionLabel.UNKNOWN:
            return None
        return record.deletion_label.value
    allowed = {LabelSource.MANUAL, LabelSource.WEAK} if include_weak else {LabelSource.MANUAL}
    if record.label_source not in allowed:
        return None
    if setting is Setting.DISINFO:
        if record.category_label is CategoryLabel.UNLABELED:
            return None
        return "disinfo" if record.is_disinformative else "not_disinfo"
    if record.is_disinformative:
        return record.category_label.value
    return None


def records_for_setting(
    corpus: Corpus, setting: Setting, include_weak: bool = False, warn: bool = True
) -> tuple[list[TweetRecord], list[str]]:
    """Records usable under a setting plus their class names, corpus order kept.

    Records without the needed label are dropped; one warning summarizes how
    many were dropped.
    """
    records: list[TweetRecord] = []
    labels: list[str] = []
    dropped = 0
    for record in corpus:
        name = gold_label(record, setting, include_weak=include_weak)
        if name is None:
            dropped += 1
            continue
        records.append(record)
        labels.append(name)
    if not records:
        raise DataError(f"no records carry a {setting.value} label")
    if dropped and warn:
        warnings.warn(
            f"dropped {dropped} of {len(corpus)} records without a usable "
            f"{setting.value} label",
            stacklevel=2,
        )
    return records, labels


def class_indices(labels: list[str], label_map: LabelMap) -> list[int]:
    return [label_map.index_of(name) for name in labels]
