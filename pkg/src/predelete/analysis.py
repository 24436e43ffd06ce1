"""Corpus characterization: attribute rates, user account status, target counts.

Percentages are kept at 3-decimal precision internally and printed as whole
percents. User-status breakdowns treat users as opaque ids: a user counts
under every disinformative category they posted in, but once in the overall
total.
"""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass

from .corpus import ATTRIBUTE_FLAGS, CategoryLabel, Corpus, UserStatus
from .errors import DataError

REPORT_STATUSES = (
    UserStatus.SUSPENDED,
    UserStatus.ACCOUNT_DELETED,
    UserStatus.ACTIVE_PRIVATE,
    UserStatus.ACTIVE_PUBLIC,
)

REASON_CATEGORIES = (
    CategoryLabel.HATE_SPEECH,
    CategoryLabel.OFFENSIVE,
    CategoryLabel.RUMOR,
    CategoryLabel.SPAM,
)


@dataclass(frozen=True)
class SliceDistribution:
    name: str
    n: int
    percents: tuple[tuple[str, float], ...]  # (attribute, percent of records)


@dataclass(frozen=True)
class AttributeReport:
    slices: tuple[SliceDistribution, ...]


def attribute_distribution(slices) -> AttributeReport:
    """Per named slice, the percent of records with each attribute flag set.

    ``slices`` is a sequence of (name, Corpus) pairs; an empty slice is an
    error because its percentages would be undefined.
    """
    named = list(slices)
    if not named:
        raise DataError("attribute_distribution needs at least one slice")
    out = []
    for name, corpus in named:
        if not len(corpus):
            raise DataError(f"slice {name!r} is empty")
        percents = []
        for flag in ATTRIBUTE_FLAGS:
            count = sum(1 for record in corpus if getattr(record, flag))
            percents.append((flag, round(100.0 * count / len(corpus), 3)))
        out.append(SliceDistribution(name=str(name), n=len(corpus), percents=tuple(percents)))
    return AttributeReport(slices=tuple(out))


def render_attribute_report(report: AttributeReport) -> str:
    width = max(len(flag) for flag in ATTRIBUTE_FLAGS)
    name_width = max(len("slice (n)"), *(len(f"{s.name} ({s.n})") for s in report.slices))
    header = "slice (n)".ljust(name_width) + "".join(
        flag.rjust(width + 2) for flag in ATTRIBUTE_FLAGS
    )
    lines = [header]
    for s in report.slices:
        cells = "".join(f"{round(pct):d}%".rjust(width + 2) for _, pct in s.percents)
        lines.append(f"{s.name} ({s.n})".ljust(name_width) + cells)
    return "\n".join(lines) + "\n"


def attribute_report_to_dict(report: AttributeReport) -> dict:
    return {
        "slices": [
            {"name": s.name, "n": s.n, "percents": {flag: pct for flag, pct in s.percents}}
            for s in report.slices
        ]
    }


@dataclass(frozen=True)
class StatusReport:
    """Unique disinformative-posting users broken down by account status."""

    per_category: tuple[tuple[str, tuple[tuple[str, int], ...]], ...]
    overall: tuple[tuple[str, int], ...]
    total_users: int


def user_status_breakdown(corpus: Corpus) -> StatusReport:
    """Status counts over users with at least one disinformative record.

    Every disinformative record must carry a user id and a known account
    status. If a user's records disagree on status, the first one in corpus
    order wins.
    """
    status_of: dict[str, UserStatus] = {}
    users_in: dict[CategoryLabel, set[str]] = {c: set() for c in REASON_CATEGORIES}
    for record in corpus:
        if not record.is_disinformative:
            continue
        if record.user_id is None:
            raise DataError(f"record {record.id} has no user id; breakdown needs user ids")
        if record.user_status is UserStatus.UNKNOWN:
            raise DataError(f"record {record.id} has unknown user status")
        status_of.setdefault(record.user_id, record.user_status)
        users_in[record.category_label].add(record.user_id)

    def counts_for(users: set[str]) -> tuple[tuple[str, int], ...]:
        tally = Counter(status_of[u] for u in users)
        return tuple((status.value, tally.get(status, 0)) for status in REPORT_STATUSES)

    per_category = tuple(
        (category.value, counts_for(users_in[category])) for category in REASON_CATEGORIES
    )
    return StatusReport(
        per_category=per_category,
        overall=counts_for(set(status_of)),
        total_users=len(status_of),
    )


def render_status_report(report: StatusReport) -> str:
    lines = [f"disinformative-posting users: {report.total_users}"]
    width = max(len(s.value) for s in REPORT_STATUSES)
    for status, count in report.overall:
        share = 100.0 * count / report.total_users if report.total_users else 0.0
        lines.append(f"  {status.ljust(width)}  {count}  ({round(share)}%)")
    for category, counts in report.per_category:
        total = sum(c for _, c in counts)
        lines.append(f"{category}: {total} users")
        for status, count in counts:
            lines.append(f"  {status.ljust(width)}  {count}")
    return "\n".join(lines) + "\n"


def status_report_to_dict(report: StatusReport) -> dict:
    return {
        "total_users": report.total_users,
        "overall": {status: count for status, count in report.overall},
        "per_category": {
            category: {status: count for status, count in counts}
            for category, counts in report.per_category
        },
    }


def target_frequencies(corpus: Corpus, category: CategoryLabel | None = None) -> list[tuple[str, int]]:
    """Exact-string counts of the optional target annotation.

    Sorted by descending count, then lexicographically. Records without a
    target are skipped; ``category`` restricts to one label when given.
    """
    counts: Counter[str] = Counter()
    for record in corpus:
        if record.target is None or not record.target:
            continue
        if category is not None and record.category_label is not category:
            continue
        counts[record.target] += 1
    return sorted(counts.items(), key=lambda item: (-item[1], item[0]))


def render_target_frequencies(rows: list[tuple[str, int]]) -> str:
    if not rows:
        return "no targets annotated\n"
    width = max(len(t) for t, _ in rows)
    return "".join(f"{t.ljust(width)}  {c}\n" for t, c in rows)
