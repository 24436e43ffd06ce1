"""Shared builders for the test suite."""

from __future__ import annotations

import numpy as np
import pytest

from predelete.corpus import (
    CategoryLabel,
    Corpus,
    DeletionLabel,
    LabelSource,
    TweetRecord,
    UserStatus,
)

REASON_WORDS = {
    "hate_speech": ["grouphate", "slurterm", "targethate", "vilify", "dehumanize", "bigotword"],
    "offensive": ["rudeword", "crudejoke", "insultterm", "mockword", "cursefoo", "cursebar"],
    "rumor": ["falseclaim", "unverified", "hoaxstory", "fakereport", "madeup", "baseless"],
    "spam": ["freemoney", "clickhere", "promocode", "winbig", "cheapdeal", "buynow"],
}
FILLER_WORDS = ["about", "today", "people", "really", "think", "going", "said", "still"]


def make_record(i: int = 0, **overrides) -> TweetRecord:
    fields = dict(
        id=f"t{i}",
        text=f"sample text {i}",
        deletion_label=DeletionLabel.NOT_DELETED,
        category_label=CategoryLabel.UNLABELED,
        label_source=LabelSource.NONE,
        user_status=UserStatus.ACTIVE_PUBLIC,
    )
    fields.update(overrides)
    return TweetRecord(**fields)


def make_corpus(records) -> Corpus:
    return Corpus(tuple(records))


def labeled_record(i: int, category: str, deleted: bool = True, **overrides) -> TweetRecord:
    return make_record(
        i,
        deletion_label=DeletionLabel.DELETED if deleted else DeletionLabel.NOT_DELETED,
        category_label=CategoryLabel(category),
        label_source=LabelSource.WEAK if category == "not_disinfo" and not deleted
        else LabelSource.MANUAL,
        **overrides,
    )


def synthetic_reason_corpus(n_docs: int, seed: int) -> tuple[list[str], list[str]]:
    """Separable 4-class texts: every doc plants markers of exactly one class.

    Returns (texts, class names). Markers never overlap across classes, so a
    linear model and a forest can both reach high accuracy.
    """
    rng = np.random.default_rng(seed)
    classes = list(REASON_WORDS)
    texts, labels = [], []
    for _ in range(n_docs):
        cls = classes[int(rng.integers(len(classes)))]
        markers = list(rng.choice(REASON_WORDS[cls], size=3, replace=True))
        filler = list(rng.choice(FILLER_WORDS, size=5, replace=True))
        words = markers + filler
        rng.shuffle(words)
        texts.append(" ".join(words))
        labels.append(cls)
    return texts, labels


@pytest.fixture
def tiny_corpus() -> Corpus:
    records = [
        labeled_record(0, "hate_speech", user_id="u1", target="group a"),
        labeled_record(1, "offensive", user_id="u2"),
        labeled_record(2, "rumor", user_id="u1"),
        labeled_record(3, "spam", user_id="u3"),
        labeled_record(4, "not_disinfo", deleted=True, user_id="u4"),
        labeled_record(5, "not_disinfo", deleted=False, user_id="u5"),
        make_record(6, deletion_label=DeletionLabel.DELETED),
    ]
    return make_corpus(records)
