"""Stratified splitting: exactness, determinism, apportionment."""

from __future__ import annotations

from fractions import Fraction

import numpy as np
import pytest

from predelete.corpus import (
    CategoryLabel,
    DeletionLabel,
    SplitSpec,
    SplitWarning,
    StratifyAxis,
    largest_remainder_sizes,
    stratified_split,
)
from predelete.errors import DataError

from conftest import labeled_record, make_corpus, make_record


def two_class_corpus(n_deleted: int, n_kept: int):
    records = [
        make_record(i, deletion_label=DeletionLabel.DELETED) for i in range(n_deleted)
    ] + [
        make_record(n_deleted + i, deletion_label=DeletionLabel.NOT_DELETED)
        for i in range(n_kept)
    ]
    return make_corpus(records)


class TestLargestRemainder:
    def test_exact_shares(self):
        assert largest_remainder_sizes(10, [Fraction(7, 10), Fraction(1, 10), Fraction(2, 10)]) == [
            7,
            1,
            2,
        ]

    def test_leftovers_go_to_largest_remainders(self):
        # 5 * (0.7, 0.1, 0.2) = (3.5, 0.5, 1.0): floor (3, 0, 1), one leftover,
        # remainder tie 0.5/0.5 goes to the earlier part
        assert largest_remainder_sizes(5, [Fraction(7, 10), Fraction(1, 10), Fraction(2, 10)]) == [
            4,
            0,
            1,
        ]

    def test_sums_match_for_random_inputs(self):
        rng = np.random.default_rng(11)
        for _ in range(200):
            n = int(rng.integers(0, 5000))
            cuts = sorted(rng.integers(1, 100, size=2))
            fracs = [
                Fraction(int(cuts[0]), 100),
                Fraction(int(cuts[1] - cuts[0]), 100),
                Fraction(int(100 - cuts[1]), 100),
            ]
            if any(f == 0 for f in fracs):
                continue
            sizes = largest_remainder_sizes(n, fracs)
            assert sum(sizes) == n
            for size, frac in zip(sizes, fracs):
                assert abs(size - frac * n) < 1

    def test_spec_rejects_bad_fractions(self):
        with pytest.raises(DataError):
            SplitSpec(fractions=(Fraction(1, 2), Fraction(1, 2), Fraction(1, 2)))
        with pytest.raises(DataError):
            SplitSpec(fractions=(Fraction(1), Fraction(0), Fraction(0)))

    def test_float_fractions_read_as_decimal_literals(self):
        spec = SplitSpec(fractions=(0.7, 0.1, 0.2))
        assert spec.fractions == (Fraction(7, 10), Fraction(1, 10), Fraction(2, 10))


class TestStratifiedSplit:
    def test_partition_and_order(self):
        corpus = two_class_corpus(60, 40)
        result = stratified_split(corpus, SplitSpec(seed=5))
        ids = []
        for _, part in result.parts():
            part_ids = part.ids()
            # each part keeps original corpus order
            assert part_ids == sorted(part_ids, key=lambda s: int(s[1:]))
            ids.extend(part_ids)
        assert sorted(ids) == sorted(corpus.ids())
        assert len(set(ids)) == len(corpus)

    def test_stratum_sizes_apportioned(self):
        corpus = two_class_corpus(60, 40)
        result = stratified_split(corpus, SplitSpec(seed=5))
        for fraction, (_, part) in zip((0.7, 0.1, 0.2), result.parts()):
            deleted = sum(1 for r in part if r.deletion_label is DeletionLabel.DELETED)
            assert abs(deleted - fraction * 60) < 1
            assert abs((len(part) - deleted) - fraction * 40) < 1

    def test_deterministic_and_seed_sensitive(self):
        corpus = two_class_corpus(200, 100)
        a = stratified_split(corpus, SplitSpec(seed=9))
        b = stratified_split(corpus, SplitSpec(seed=9))
        c = stratified_split(corpus, SplitSpec(seed=10))
        assert a.train.ids() == b.train.ids()
        assert a.test.ids() == b.test.ids()
        assert a.train.ids() != c.train.ids()

    def test_stratum_seed_isolated_from_other_strata(self):
        # adding records of another stratum must not reshuffle the first one
        base = [make_record(i, deletion_label=DeletionLabel.DELETED) for i in range(50)]
        extra = [
            make_record(100 + i, deletion_label=DeletionLabel.NOT_DELETED) for i in range(30)
        ]
        only = stratified_split(make_corpus(base), SplitSpec(seed=3))
        mixed = stratified_split(make_corpus(base + extra), SplitSpec(seed=3))

        def deleted_ids(corpus):
            return [r.id for r in corpus if r.deletion_label is DeletionLabel.DELETED]

        assert deleted_ids(only.train) == deleted_ids(mixed.train)
        assert deleted_ids(only.test) == deleted_ids(mixed.test)

    def test_small_stratum_warns(self):
        corpus = make_corpus(
            [make_record(0, deletion_label=DeletionLabel.DELETED)]
            + [make_record(i + 1, deletion_label=DeletionLabel.NOT_DELETED) for i in range(20)]
        )
        with pytest.warns(SplitWarning):
            stratified_split(corpus, SplitSpec(seed=1))

    def test_category_axis_requires_labels(self):
        corpus = make_corpus([make_record(0)])
        with pytest.raises(DataError):
            stratified_split(
                corpus, SplitSpec(seed=1, stratify_on=StratifyAxis.CATEGORY_LABEL)
            )

    def test_category_axis_splits_each_class(self):
        records = []
        i = 0
        for name in ("hate_speech", "offensive", "rumor", "spam"):
            for _ in range(40):
                records.append(labeled_record(i, name))
                i += 1
        corpus = make_corpus(records)
        result = stratified_split(
            corpus, SplitSpec(seed=2, stratify_on=StratifyAxis.CATEGORY_LABEL)
        )
        for name in ("hate_speech", "offensive", "rumor", "spam"):
            in_train = sum(
                1 for r in result.train if r.category_label is CategoryLabel(name)
            )
            assert in_train == 28  # 0.7 * 40 exactly
