"""Classification metrics, error slicing, and annotation-agreement statistics.

Metric conventions, pinned so results are reproducible:

- precision of a never-predicted class is 0; recall of a zero-support class
  is 0; f1 is 0 when precision + recall is 0
- weighted_X = sum over classes of (support_c / n) * X_c, which makes
  weighted recall equal accuracy exactly (it is computed as trace/n)
- report rendering rounds to 3 decimals

Agreement uses the standard Fleiss construction: per-item pairwise agreement
P_i, chance agreement from pooled category shares, kappa = (P - Pe)/(1 - Pe).
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from .errors import CorpusFormatError, DataError
from .models import LabelMap, Prediction


class AgreementBand(enum.Enum):
    BELOW_MODERATE = "below_moderate"
    MODERATE = "moderate"
    SUBSTANTIAL = "substantial"
    PERFECT = "perfect"


@dataclass(frozen=True)
class ConfusionMatrix:
    """Rows are gold classes, columns are predicted classes."""

    labels: LabelMap
    matrix: tuple[tuple[int, ...], ...]

    def __post_init__(self):
        k = len(self.labels)
        rows = tuple(tuple(int(v) for v in row) for row in self.matrix)
        object.__setattr__(self, "matrix", rows)
        if len(rows) != k or any(len(row) != k for row in rows):
            raise DataError(f"confusion matrix must be {k}x{k}")
        if any(v < 0 for row in rows for v in row):
            raise DataError("confusion matrix entries must be non-negative")

    @property
    def n(self) -> int:
        return sum(sum(row) for row in self.matrix)

    def as_array(self) -> np.ndarray:
        return np.asarray(self.matrix, dtype=np.int64)


@dataclass(frozen=True)
class ClassMetrics:
    precision: float
    recall: float
    f1: float
    support: int


@dataclass(frozen=True)
class EvalReport:
    accuracy: float
    weighted_precision: float
    weighted_recall: float
    weighted_f1: float
    per_class: tuple[ClassMetrics, ...]
    confusion: ConfusionMatrix

    @property
    def labels(self) -> LabelMap:
        return self.confusion.labels


def _to_indices(values, labels: LabelMap, what: str) -> np.ndarray:
    out = []
    for value in values:
        if isinstance(value, Prediction):
            value = value.label
        if isinstance(value, str):
            out.append(labels.index_of(value))
        else:
            idx = int(value)
            if not 0 <= idx < len(labels):
                raise DataError(f"{what} class index {idx} out of range")
            out.append(idx)
    return np.asarray(out, dtype=np.int64)


def confusion_matrix(gold, pred, labels: LabelMap) -> ConfusionMatrix:
    g = _to_indices(gold, labels, "gold")
    p = _to_indices(pred, labels, "predicted")
    if len(g) != len(p):
        raise DataError(f"gold has {len(g)} items but predictions have {len(p)}")
    if not len(g):
        raise DataError("cannot evaluate an empty prediction set")
    k = len(labels)
    counts = np.bincount(g * k + p, minlength=k * k).reshape(k, k)
    return ConfusionMatrix(labels=labels, matrix=tuple(tuple(int(v) for v in r) for r in counts))


def evaluate(gold, pred, labels: LabelMap) -> EvalReport:
    """Accuracy plus support-weighted precision/recall/f1 and per-class rows."""
    confusion = confusion_matrix(gold, pred, labels)
    m = confusion.as_array()
    n = confusion.n
    tp = np.diag(m).astype(np.float64)
    support = m.sum(axis=1).astype(np.float64)
    predicted = m.sum(axis=0).astype(np.float64)
    per_class = []
    weighted_p = 0.0
    weighted_f = 0.0
    for c in range(len(labels)):
        precision = float(tp[c] / predicted[c]) if predicted[c] > 0 else 0.0
        recall = float(tp[c] / support[c]) if support[c] > 0 else 0.0
        f1 = 2 * precision * recall / (precision + recall) if precision + recall > 0 else 0.0
        per_class.append(
            ClassMetrics(precision=precision, recall=recall, f1=f1, support=int(support[c]))
        )
        weighted_p += (support[c] / n) * precision
        weighted_f += (support[c] / n) * f1
    accuracy = float(tp.sum() / n)
    # weighted recall reduces to trace/n, so reuse accuracy for exact equality
    return EvalReport(
        accuracy=accuracy,
        weighted_precision=float(weighted_p),
        weighted_recall=accuracy,
        weighted_f1=float(weighted_f),
        per_class=tuple(per_class),
        confusion=confusion,
    )


@dataclass(frozen=True)
class ErrorSlice:
    """Records whose gold class is in ``from`` and predicted class is ``to``."""

    count: int
    record_ids: tuple[str, ...]


def error_slice(
    gold,
    pred,
    labels: LabelMap,
    from_labels: Iterable[str],
    to_label: str,
    ids: Sequence[str] | None = None,
) -> ErrorSlice:
    g = _to_indices(gold, labels, "gold")
    p = _to_indices(pred, labels, "predicted")
    if len(g) != len(p):
        raise DataError(f"gold has {len(g)} items but predictions have {len(p)}")
    from_idx = {labels.index_of(name) for name in from_labels}
    to_idx = labels.index_of(to_label)
    if ids is None:
        ids = [str(i) for i in range(len(g))]
    elif len(ids) != len(g):
        raise DataError(f"{len(ids)} ids for {len(g)} predictions")
    hits = tuple(ids[i] for i in range(len(g)) if int(g[i]) in from_idx and int(p[i]) == to_idx)
    return ErrorSlice(count=len(hits), record_ids=hits)


def _agreement_table(table) -> np.ndarray:
    arr = np.asarray(table)
    if arr.ndim != 2 or arr.shape[0] < 1 or arr.shape[1] < 1:
        raise DataError("agreement table must be a 2-D item-by-category count matrix")
    if not np.issubdtype(arr.dtype, np.integer):
        if not np.all(arr == np.floor(arr)):
            raise DataError("agreement counts must be integers")
        arr = arr.astype(np.int64)
    if np.any(arr < 0):
        raise DataError("agreement counts must be non-negative")
    row_sums = arr.sum(axis=1)
    r = int(row_sums[0])
    if np.any(row_sums != r):
        raise DataError("every item must be rated by the same number of annotators")
    if r < 2:
        raise DataError(f"need at least 2 annotators per item, got {r}")
    return arr.astype(np.int64)


def _per_item_agreement(arr: np.ndarray) -> np.ndarray:
    r = int(arr[0].sum())
    return (np.sum(arr * (arr - 1), axis=1)) / (r * (r - 1))


def average_observed_agreement(table) -> float:
    """Mean over items of (agreeing annotator pairs) / (total pairs)."""
    arr = _agreement_table(table)
    return float(np.mean(_per_item_agreement(arr)))


def fleiss_kappa(table) -> float:
    """Chance-corrected multi-annotator agreement.

    When pooled category shares make chance agreement 1 (every rating in one
    category) the statistic is undefined unless observed agreement is also 1,
    in which case 1 is returned.
    """
    arr = _agreement_table(table)
    p_observed = float(np.mean(_per_item_agreement(arr)))
    shares = arr.sum(axis=0) / arr.sum()
    p_chance = float(shares @ shares)
    if p_chance == 1.0:
        if p_observed == 1.0:
            return 1.0
        raise DataError("chance agreement is 1 (single category used); kappa undefined")
    return (p_observed - p_chance) / (1.0 - p_chance)


def band(kappa: float) -> AgreementBand:
    """0.41-0.60 moderate, 0.61-0.80 substantial, 0.81-1 perfect."""
    if not kappa <= 1.0:
        raise DataError(f"kappa cannot exceed 1, got {kappa}")
    if kappa < 0.41:
        return AgreementBand.BELOW_MODERATE
    if kappa <= 0.60:
        return AgreementBand.MODERATE
    if kappa <= 0.80:
        return AgreementBand.SUBSTANTIAL
    return AgreementBand.PERFECT


@dataclass(frozen=True)
class AgreementReport:
    kappa: float
    aoe: float
    n_items: int
    n_annotators: int
    band: AgreementBand


def agreement_report(table) -> AgreementReport:
    arr = _agreement_table(table)
    kappa = fleiss_kappa(arr)
    return AgreementReport(
        kappa=kappa,
        aoe=average_observed_agreement(arr),
        n_items=arr.shape[0],
        n_annotators=int(arr[0].sum()),
        band=band(kappa),
    )


def load_agreement_table(path) -> tuple[np.ndarray, tuple[str, ...]]:
    """Read annotations: TSV, one row per item, one label column per annotator.

    No header row; categories are the sorted distinct labels. Returns the
    item-by-category count matrix and the category names.
    """
    path = str(path)
    rows: list[list[str]] = []
    with open(path, "r", encoding="utf-8", newline="") as handle:
        for line_no, line in enumerate(handle, start=1):
            line = line.rstrip("\n").rstrip("\r")
            if not line:
                continue
            cells = line.split("\t")
            if any(not c for c in cells):
                raise CorpusFormatError("empty annotation cell", path=path, line=line_no)
            if rows and len(cells) != len(rows[0]):
                raise CorpusFormatError(
                    f"row has {len(cells)} annotations, expected {len(rows[0])}",
                    path=path,
                    line=line_no,
                )
            rows.append(cells)
    if not rows:
        raise CorpusFormatError("no annotation rows", path=path)
    categories = tuple(sorted({c for row in rows for c in row}))
    index = {c: i for i, c in enumerate(categories)}
    counts = np.zeros((len(rows), len(categories)), dtype=np.int64)
    for i, row in enumerate(rows):
        for cell in row:
            counts[i, index[cell]] += 1
    return counts, categories


def _fmt(value: float) -> str:
    return f"{value:.3f}"


def render_eval_report(report: EvalReport, note: str | None = None) -> str:
    """Aligned plain-text rendering, 3-decimal rounding."""
    names = report.labels.names
    width = max(len("class"), *(len(n) for n in names))
    lines = [
        f"n                   {report.confusion.n}",
        f"accuracy            {_fmt(report.accuracy)}",
        f"weighted_precision  {_fmt(report.weighted_precision)}",
        f"weighted_recall     {_fmt(report.weighted_recall)}",
        f"weighted_f1         {_fmt(report.weighted_f1)}",
        "",
        f"{'class'.ljust(width)}  precision  recall  f1     support",
    ]
    for name, row in zip(names, report.per_class):
        lines.append(
            f"{name.ljust(width)}  {_fmt(row.precision)}      {_fmt(row.recall)}   "
            f"{_fmt(row.f1)}  {row.support}"
        )
    lines.append("")
    lines.append("confusion (rows gold, columns predicted)")
    cell = max(width, *(len(str(v)) for r in report.confusion.matrix for v in r)) + 2
    lines.append(" " * width + "".join(n.rjust(cell) for n in names))
    for name, row in zip(names, report.confusion.matrix):
        lines.append(name.ljust(width) + "".join(str(v).rjust(cell) for v in row))
    if note:
        lines.append("")
        lines.append(f"note: {note}")
    return "\n".join(lines) + "\n"


def report_to_dict(report: EvalReport, note: str | None = None) -> dict:
    out = {
        "n": report.confusion.n,
        "accuracy": report.accuracy,
        "weighted_precision": report.weighted_precision,
        "weighted_recall": report.weighted_recall,
        "weighted_f1": report.weighted_f1,
        "per_class": {
            name: {
                "precision": row.precision,
                "recall": row.recall,
                "f1": row.f1,
                "support": row.support,
            }
            for name, row in zip(report.labels.names, report.per_class)
        },
        "confusion": {
            "labels": list(report.labels.names),
            "matrix": [list(row) for row in report.confusion.matrix],
        },
    }
    if note:
        out["note"] = note
    return out


def render_agreement_report(report: AgreementReport) -> str:
    return (
        f"items        {report.n_items}\n"
        f"annotators   {report.n_annotators}\n"
        f"kappa        {_fmt(report.kappa)}\n"
        f"aoe          {_fmt(report.aoe)}\n"
        f"band         {report.band.value}\n"
    )


def agreement_to_dict(report: AgreementReport) -> dict:
    return {
        "n_items": report.n_items,
        "n_annotators": report.n_annotators,
        "kappa": report.kappa,
        "aoe": report.aoe,
        "band": report.band.value,
    }
