"""Corpus records, file formats, weak labels, fingerprints."""

from __future__ import annotations

import json

import pytest

from predelete.corpus import (
    CategoryLabel,
    Corpus,
    CorpusFormat,
    DeletionLabel,
    DistributionAxis,
    LabelSource,
    TweetRecord,
    UserStatus,
    apply_weak_labels,
    corpus_fingerprint,
    distribution_report,
    drop_duplicate_texts,
    infer_format,
    load_corpus,
    save_corpus,
)
from predelete.errors import CorpusFormatError, DataError, DuplicateIdError, InvariantError

from conftest import labeled_record, make_corpus, make_record


class TestRecordInvariants:
    def test_empty_text_rejected(self):
        with pytest.raises(InvariantError):
            make_record(0, text="   \n\t ")

    def test_empty_id_rejected(self):
        with pytest.raises(InvariantError):
            make_record(0, id="")

    def test_category_requires_source(self):
        with pytest.raises(InvariantError):
            make_record(0, category_label=CategoryLabel.SPAM, label_source=LabelSource.NONE)

    def test_weak_label_only_not_disinfo(self):
        with pytest.raises(InvariantError):
            make_record(0, category_label=CategoryLabel.RUMOR, label_source=LabelSource.WEAK)
        ok = make_record(
            0, category_label=CategoryLabel.NOT_DISINFO, label_source=LabelSource.WEAK
        )
        assert not ok.is_disinformative

    def test_disinformative_property(self):
        for name in ("hate_speech", "offensive", "rumor", "spam"):
            assert labeled_record(0, name).is_disinformative
        assert not labeled_record(0, "not_disinfo").is_disinformative


class TestCorpus:
    def test_duplicate_ids_rejected(self):
        with pytest.raises(DuplicateIdError):
            make_corpus([make_record(1), make_record(1)])

    def test_filter_preserves_order(self):
        corpus = make_corpus([make_record(i) for i in range(10)])
        kept = corpus.filter(lambda r: int(r.id[1:]) % 2 == 0)
        assert kept.ids() == ["t0", "t2", "t4", "t6", "t8"]


class TestFormats:
    def test_infer_format(self, tmp_path):
        assert infer_format("a.jsonl") is CorpusFormat.JSONL
        assert infer_format("a.tsv") is CorpusFormat.TSV
        with pytest.raises(DataError):
            infer_format("a.csv")

    @pytest.mark.parametrize("fmt", [CorpusFormat.JSONL, CorpusFormat.TSV])
    def test_round_trip(self, tmp_path, fmt):
        records = [
            labeled_record(0, "hate_speech", user_id="u1", target="some target"),
            labeled_record(1, "not_disinfo", deleted=False),
            make_record(2, text="tabs\tand\nnewlines\\here", has_url=True),
            make_record(3, text="عربي ونص mixed"),
        ]
        corpus = make_corpus(records)
        path = tmp_path / f"c.{fmt.value}"
        save_corpus(corpus, path)
        loaded = load_corpus(path)
        assert len(loaded) == len(corpus)
        for a, b in zip(corpus, loaded):
            assert a == b

    def test_round_trip_fingerprint_stable(self, tmp_path):
        corpus = make_corpus([make_record(i, text=f"text {i} ok") for i in range(25)])
        before = corpus_fingerprint(corpus)
        for fmt in CorpusFormat:
            path = tmp_path / f"c.{fmt.value}"
            save_corpus(corpus, path)
            assert corpus_fingerprint(load_corpus(path)) == before

    def test_jsonl_error_names_line(self, tmp_path):
        path = tmp_path / "bad.jsonl"
        good = json.dumps(
            {
                "id": "a",
                "text": "x",
                "deletion_label": "deleted",
                "category_label": "unlabeled",
                "label_source": "none",
                "has_hashtag": False,
                "has_url": False,
                "has_mention": False,
                "is_reply": False,
                "is_retweet": False,
                "user_status": "unknown",
            }
        )
        path.write_text(good + "\n{not json}\n", encoding="utf-8")
        with pytest.raises(CorpusFormatError) as err:
            load_corpus(path)
        assert err.value.line == 2
        assert ":2:" in str(err.value)

    def test_duplicate_id_names_line(self, tmp_path):
        corpus = make_corpus([make_record(0), make_record(1)])
        path = tmp_path / "c.jsonl"
        save_corpus(corpus, path)
        lines = path.read_text(encoding="utf-8").splitlines()
        path.write_text("\n".join(lines + [lines[0]]) + "\n", encoding="utf-8")
        with pytest.raises(CorpusFormatError) as err:
            load_corpus(path)
        assert "t0" in str(err.value)
        assert err.value.line == 3

    def test_duplicate_id_in_memory(self):
        with pytest.raises(DuplicateIdError) as err:
            make_corpus([make_record(0), make_record(0)])
        assert "t0" in str(err.value)

    def test_tsv_requires_header(self, tmp_path):
        path = tmp_path / "c.tsv"
        path.write_text("", encoding="utf-8")
        with pytest.raises(CorpusFormatError):
            load_corpus(path)

    def test_tsv_unknown_enum_value(self, tmp_path):
        corpus = make_corpus([make_record(0)])
        path = tmp_path / "c.tsv"
        save_corpus(corpus, path)
        text = path.read_text(encoding="utf-8").replace("not_deleted", "nope")
        path.write_text(text, encoding="utf-8")
        with pytest.raises(CorpusFormatError):
            load_corpus(path)

    def test_optional_columns_only_when_used(self, tmp_path):
        plain = make_corpus([make_record(0)])
        path = tmp_path / "plain.tsv"
        save_corpus(plain, path)
        header = path.read_text(encoding="utf-8").splitlines()[0]
        assert "user_id" not in header and "target" not in header
        rich = make_corpus([make_record(0, user_id="u", target="tg")])
        save_corpus(rich, path)
        header = path.read_text(encoding="utf-8").splitlines()[0]
        assert header.endswith("user_id\ttarget")


class TestWeakLabels:
    def test_rule_assigns_not_disinfo_to_non_deleted(self):
        corpus = make_corpus(
            [
                make_record(0, deletion_label=DeletionLabel.NOT_DELETED),
                make_record(1, deletion_label=DeletionLabel.DELETED),
                labeled_record(2, "spam"),
            ]
        )
        out = apply_weak_labels(corpus)
        assert out.records[0].category_label is CategoryLabel.NOT_DISINFO
        assert out.records[0].label_source is LabelSource.WEAK
        # deleted-but-unlabeled and manual records stay as they were
        assert out.records[1].category_label is CategoryLabel.UNLABELED
        assert out.records[2].label_source is LabelSource.MANUAL

    def test_idempotent(self):
        corpus = make_corpus([make_record(0, deletion_label=DeletionLabel.NOT_DELETED)])
        once = apply_weak_labels(corpus)
        twice = apply_weak_labels(once)
        assert once.records == twice.records


def test_drop_duplicate_texts_keeps_first():
    corpus = make_corpus(
        [
            make_record(0, text="same text"),
            make_record(1, text="same text"),
            make_record(2, text="other"),
        ]
    )
    out = drop_duplicate_texts(corpus)
    assert out.ids() == ["t0", "t2"]


def test_distribution_report_counts_and_order(tiny_corpus):
    rows = distribution_report(tiny_corpus, DistributionAxis.CATEGORY_LABEL)
    values = {r.value: r.count for r in rows}
    assert values["not_disinfo"] == 2
    assert values["hate_speech"] == 1
    # declaration order of the enum, zero-count entries omitted
    assert [r.value for r in rows] == [
        v for v in ("not_disinfo", "hate_speech", "offensive", "rumor", "spam", "unlabeled")
        if v in values
    ]
    assert abs(sum(r.percent for r in rows) - 100.0) < 1e-9
