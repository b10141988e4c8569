"""Pairwise coder comparisons and their aggregate tables.

The input is a flat annotation file: one row per (example, coder) with
the coder's raw code list and an optional quality rating. A comparison
between two coders walks every example either of them annotated,
normalizes both code sets, excludes examples that lose all their codes
(with a reason), and scores the rest with the set-distance metric. Rows
and exclusions always partition the example universe, so reported
denominators can be audited.

Aggregations mirror the usual reporting shapes: cumulative distance-band
tables stratified by whether both coders used a single code, pooled
(micro-averaged) tables across comparisons, band-by-band similarity
matrices against a shared reference coder, rating cross-tabulations, and
distance-versus-rating tables. Percentages are rendered round-half-up
from exact rationals; the rationals are kept alongside.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass
from enum import Enum
from fractions import Fraction
from typing import Iterable, Mapping, Sequence, TextIO

from .errors import (
    DuplicateRecord,
    MalformedLine,
    MissingRating,
    UnknownCoder,
)
from .hierarchy import FocusView
from .metric import (
    DEFAULT_THRESHOLDS,
    EXACT_BAND,
    CodeSet,
    DenominatorPolicy,
    DistanceResult,
    band_labels,
    band_of_value,
    code_set_distance,
    normalize_code_set,
    normalize_thresholds,
)

ANNOTATION_HEADER = ("example_id", "coder_id", "codes", "rating")

ALL_ROW = "all"


class Rating(Enum):
    GOOD = "good"
    ACCEPTABLE = "acceptable"
    NOT_ACCEPTABLE = "not_acceptable"

    @classmethod
    def parse(cls, text: str) -> "Rating | None":
        if text == "":
            return None
        for member in cls:
            if member.value == text:
                return member
        raise ValueError(f"unknown rating {text!r}")


class Stratum(Enum):
    SINGLE_FINDING = "single_finding"
    MULTI_FINDING = "multi_finding"


class ExclusionReason(Enum):
    LEFT_EMPTY = "left_empty_after_normalization"
    RIGHT_EMPTY = "right_empty_after_normalization"
    BOTH_EMPTY = "both_empty_after_normalization"
    MISSING_FROM_CODER = "missing_from_coder"


@dataclass(frozen=True)
class AnnotationRecord:
    example_id: str
    coder_id: str
    raw_codes: tuple[int, ...]
    rating: Rating | None = None


class AnnotationSet:
    """All annotation records of a run, indexed by (example, coder)."""

    def __init__(self, records: Iterable[AnnotationRecord]):
        self._by_key: dict[tuple[str, str], AnnotationRecord] = {}
        self._coders: set[str] = set()
        for record in records:
            key = (record.example_id, record.coder_id)
            if key in self._by_key:
                raise DuplicateRecord(*key)
            self._by_key[key] = record
            self._coders.add(record.coder_id)

    def __len__(self) -> int:
        return len(self._by_key)

    @property
    def records(self) -> list[AnnotationRecord]:
        return list(self._by_key.values())

    def coders(self) -> list[str]:
        return sorted(self._coders)

    def has_coder(self, coder_id: str) -> bool:
        return coder_id in self._coders

    def get(self, example_id: str, coder_id: str) -> AnnotationRecord | None:
        return self._by_key.get((example_id, coder_id))

    def examples_of(self, coder_id: str) -> set[str]:
        return {ex for ex, coder in self._by_key if coder == coder_id}

    def rating_of(self, example_id: str, coder_id: str) -> Rating | None:
        record = self._by_key.get((example_id, coder_id))
        return record.rating if record else None

    def ratings_of(self, coder_id: str) -> dict[str, Rating | None]:
        """Example -> rating map for one coder (None where unrated)."""
        return {
            ex: record.rating
            for (ex, coder), record in self._by_key.items()
            if coder == coder_id
        }


def load_annotations(stream: TextIO) -> AnnotationSet:
    """Parse an `example_id,coder_id,codes,rating` CSV.

    `codes` is a pipe-separated list of positive integers and must be
    non-empty; `rating` is one of good / acceptable / not_acceptable or
    blank. Repeated (example, coder) pairs raise
    :class:`DuplicateRecord`; any other anomaly raises
    :class:`MalformedLine` with its line number.
    """
    reader = csv.reader(stream)
    header = next(reader, None)
    if header is None or tuple(h.strip() for h in header) != ANNOTATION_HEADER:
        raise MalformedLine(
            1, f"expected header {','.join(ANNOTATION_HEADER)!r}, got {header!r}"
        )
    records = []
    seen: set[tuple[str, str]] = set()
    for row in reader:
        line_no = reader.line_num
        if not row or all(not cell.strip() for cell in row):
            continue
        if len(row) != 4:
            raise MalformedLine(line_no, f"expected 4 columns, got {len(row)}")
        example_id, coder_id, codes_text, rating_text = (cell.strip() for cell in row)
        if not example_id or not coder_id:
            raise MalformedLine(line_no, "example_id and coder_id must be non-empty")
        if not codes_text:
            raise MalformedLine(line_no, "codes column is empty")
        codes = []
        for part in codes_text.split("|"):
            part = part.strip()
            if not part.isdigit() or int(part) <= 0:
                raise MalformedLine(line_no, f"code {part!r} is not a positive integer")
            codes.append(int(part))
        try:
            rating = Rating.parse(rating_text)
        except ValueError as exc:
            raise MalformedLine(line_no, str(exc)) from exc
        key = (example_id, coder_id)
        if key in seen:
            raise DuplicateRecord(example_id, coder_id)
        seen.add(key)
        records.append(
            AnnotationRecord(
                example_id=example_id,
                coder_id=coder_id,
                raw_codes=tuple(codes),
                rating=rating,
            )
        )
    return AnnotationSet(records)


@dataclass(frozen=True)
class ComparisonRow:
    example_id: str
    left_set: CodeSet
    right_set: CodeSet
    distance: DistanceResult
    stratum: Stratum
    band: str

    def as_dict(self) -> dict:
        return {
            "example_id": self.example_id,
            "left_codes": self.left_set.sorted(),
            "right_codes": self.right_set.sorted(),
            "distance": self.distance.as_dict(),
            "stratum": self.stratum.value,
            "band": self.band,
        }


@dataclass(frozen=True)
class ExclusionRecord:
    example_id: str
    reason: ExclusionReason

    def as_dict(self) -> dict:
        return {"example_id": self.example_id, "reason": self.reason.value}


def pair_comparison(
    annotations: AnnotationSet,
    left_coder: str,
    right_coder: str,
    view: FocusView,
    policy: DenominatorPolicy = DenominatorPolicy.TERM_COUNT,
    thresholds: Sequence[Fraction] = DEFAULT_THRESHOLDS,
) -> tuple[list[ComparisonRow], list[ExclusionRecord]]:
    """Compare two coders over every example either of them annotated.

    Examples annotated by only one of the pair are excluded as missing;
    examples whose code set on either side normalizes to nothing are
    excluded with the corresponding emptiness reason. Everything else
    yields a row with the set distance, its band, and its stratum
    (single-finding only when both normalized sets hold exactly one
    code). Rows plus exclusions cover the universe exactly once; both
    come back sorted by example id.
    """
    thresholds = normalize_thresholds(thresholds)
    for coder in (left_coder, right_coder):
        if not annotations.has_coder(coder):
            raise UnknownCoder(coder)

    universe = annotations.examples_of(left_coder) | annotations.examples_of(right_coder)
    rows: list[ComparisonRow] = []
    exclusions: list[ExclusionRecord] = []
    for example_id in sorted(universe):
        left_record = annotations.get(example_id, left_coder)
        right_record = annotations.get(example_id, right_coder)
        if left_record is None or right_record is None:
            exclusions.append(
                ExclusionRecord(example_id, ExclusionReason.MISSING_FROM_CODER)
            )
            continue
        left_set, _ = normalize_code_set(left_record.raw_codes, view)
        right_set, _ = normalize_code_set(right_record.raw_codes, view)
        if left_set is None and right_set is None:
            exclusions.append(ExclusionRecord(example_id, ExclusionReason.BOTH_EMPTY))
            continue
        if left_set is None:
            exclusions.append(ExclusionRecord(example_id, ExclusionReason.LEFT_EMPTY))
            continue
        if right_set is None:
            exclusions.append(ExclusionRecord(example_id, ExclusionReason.RIGHT_EMPTY))
            continue
        result = code_set_distance(left_set, right_set, view, policy)
        stratum = (
            Stratum.SINGLE_FINDING
            if len(left_set) == 1 and len(right_set) == 1
            else Stratum.MULTI_FINDING
        )
        rows.append(
            ComparisonRow(
                example_id=example_id,
                left_set=left_set,
                right_set=right_set,
                distance=result,
                stratum=stratum,
                band=band_of_value(result.value, thresholds),
            )
        )
    return rows, exclusions


@dataclass(frozen=True)
class CountShare:
    """A count with its share of the population, exact and rendered."""

    count: int
    fraction: Fraction | None
    percent: int | None

    def as_dict(self) -> dict:
        return {
            "count": self.count,
            "fraction": None if self.fraction is None else str(self.fraction),
            "percent": self.percent,
        }


def percent_round_half_up(fraction: Fraction) -> int:
    """Integer percent, ties rounding up (1/200 -> 1), never bankers."""
    return math.floor(fraction * 100 + Fraction(1, 2))


def _share(count: int, n: int) -> CountShare:
    if n == 0:
        return CountShare(count=count, fraction=None, percent=None)
    fraction = Fraction(count, n)
    return CountShare(count=count, fraction=fraction, percent=percent_round_half_up(fraction))


@dataclass(frozen=True)
class BandTableRow:
    n: int
    cumulative: dict[str, CountShare]  # exact first, then one key per threshold

    def as_dict(self) -> dict:
        return {
            "n": self.n,
            "cumulative": {k: v.as_dict() for k, v in self.cumulative.items()},
        }


@dataclass(frozen=True)
class BandTable:
    thresholds: tuple[Fraction, ...]
    rows: dict[str, BandTableRow]

    def columns(self) -> list[str]:
        return [EXACT_BAND] + [f"<={t}" for t in self.thresholds]

    def as_dict(self) -> dict:
        return {
            "thresholds": [str(t) for t in self.thresholds],
            "columns": self.columns(),
            "rows": {k: v.as_dict() for k, v in self.rows.items()},
        }


def _cumulative_row(
    rows: Sequence[ComparisonRow], thresholds: tuple[Fraction, ...]
) -> BandTableRow:
    n = len(rows)
    bounds = [Fraction(0)] + list(thresholds)
    labels = [EXACT_BAND] + [f"<={t}" for t in thresholds]
    cumulative = {}
    for label, bound in zip(labels, bounds):
        count = sum(1 for row in rows if row.distance.value <= bound)
        cumulative[label] = _share(count, n)
    return BandTableRow(n=n, cumulative=cumulative)


def band_table(
    rows: Sequence[ComparisonRow],
    thresholds: Sequence[Fraction] = DEFAULT_THRESHOLDS,
) -> BandTable:
    """Cumulative band percentages for all rows and per stratum.

    Each table row reports n and, for exact and every threshold, the
    share of comparisons at or under that distance. Shares are exact
    rationals with a round-half-up integer rendering; a stratum with no
    rows has undefined shares (None), rendered as dashes downstream.
    """
    thresholds = normalize_thresholds(thresholds)
    singles = [r for r in rows if r.stratum is Stratum.SINGLE_FINDING]
    multis = [r for r in rows if r.stratum is Stratum.MULTI_FINDING]
    return BandTable(
        thresholds=thresholds,
        rows={
            ALL_ROW: _cumulative_row(list(rows), thresholds),
            Stratum.SINGLE_FINDING.value: _cumulative_row(singles, thresholds),
            Stratum.MULTI_FINDING.value: _cumulative_row(multis, thresholds),
        },
    )


def micro_average(
    row_lists: Sequence[Sequence[ComparisonRow]],
    thresholds: Sequence[Fraction] = DEFAULT_THRESHOLDS,
) -> BandTable:
    """Band table over the pooled rows of several comparisons.

    Pooling weights every comparison row equally, which is not the mean
    of the per-comparison percentages: one comparison with 1 exact row
    and another with 3 inexact rows pool to 25% exact, not 50%.
    """
    if not row_lists:
        raise ValueError("micro_average needs at least one row list")
    pooled = [row for rows in row_lists for row in rows]
    return band_table(pooled, thresholds)


@dataclass(frozen=True)
class CountMatrix:
    row_labels: tuple[str, ...]
    col_labels: tuple[str, ...]
    counts: tuple[tuple[int, ...], ...]

    def total(self) -> int:
        return sum(sum(row) for row in self.counts)

    def as_dict(self) -> dict:
        return {
            "row_labels": list(self.row_labels),
            "col_labels": list(self.col_labels),
            "counts": [list(row) for row in self.counts],
            "total": self.total(),
        }


def cross_band_matrix(
    left_rows: Sequence[ComparisonRow],
    right_rows: Sequence[ComparisonRow],
    thresholds: Sequence[Fraction] = DEFAULT_THRESHOLDS,
) -> CountMatrix:
    """Count examples by (left band, right band) against a shared reference.

    Both row lists must come from comparisons against the same reference
    coder; the matrix is over the inner join on example id and holds raw
    counts, not percentages. Bands are exact, one bucket per threshold,
    and one beyond bucket.
    """
    thresholds = normalize_thresholds(thresholds)
    labels = tuple(band_labels(thresholds))
    index = {label: i for i, label in enumerate(labels)}
    left_by_example = {row.example_id: row for row in left_rows}
    right_by_example = {row.example_id: row for row in right_rows}
    counts = [[0] * len(labels) for _ in labels]
    for example_id in left_by_example.keys() & right_by_example.keys():
        left_band = band_of_value(left_by_example[example_id].distance.value, thresholds)
        right_band = band_of_value(right_by_example[example_id].distance.value, thresholds)
        counts[index[left_band]][index[right_band]] += 1
    return CountMatrix(
        row_labels=labels,
        col_labels=labels,
        counts=tuple(tuple(row) for row in counts),
    )


RATING_ORDER = (Rating.GOOD, Rating.ACCEPTABLE, Rating.NOT_ACCEPTABLE)


def rating_crosstab(
    left_ratings: Mapping[str, Rating | None],
    right_ratings: Mapping[str, Rating | None],
) -> CountMatrix:
    """Count examples by (left rating, right rating), inner-joined.

    Every joined example must be rated on both sides; a None rating
    raises :class:`MissingRating`.
    """
    labels = tuple(r.value for r in RATING_ORDER)
    index = {rating: i for i, rating in enumerate(RATING_ORDER)}
    counts = [[0] * len(labels) for _ in labels]
    for example_id in left_ratings.keys() & right_ratings.keys():
        left = left_ratings[example_id]
        right = right_ratings[example_id]
        if left is None or right is None:
            raise MissingRating(example_id)
        counts[index[left]][index[right]] += 1
    return CountMatrix(
        row_labels=labels,
        col_labels=labels,
        counts=tuple(tuple(row) for row in counts),
    )


@dataclass(frozen=True)
class AcceptabilityRow:
    n: int
    shares: dict[str, CountShare]  # good, acceptable, good_or_acceptable, not_acceptable

    def as_dict(self) -> dict:
        return {"n": self.n, "shares": {k: v.as_dict() for k, v in self.shares.items()}}


@dataclass(frozen=True)
class AcceptabilitySummary:
    coders: dict[str, AcceptabilityRow]
    micro_average: AcceptabilityRow

    def as_dict(self) -> dict:
        return {
            "coders": {k: v.as_dict() for k, v in self.coders.items()},
            "micro_average": self.micro_average.as_dict(),
        }


def _acceptability_row(ratings: Sequence[Rating]) -> AcceptabilityRow:
    n = len(ratings)
    good = sum(1 for r in ratings if r is Rating.GOOD)
    acceptable = sum(1 for r in ratings if r is Rating.ACCEPTABLE)
    not_acceptable = sum(1 for r in ratings if r is Rating.NOT_ACCEPTABLE)
    return AcceptabilityRow(
        n=n,
        shares={
            "good": _share(good, n),
            "acceptable": _share(acceptable, n),
            "good_or_acceptable": _share(good + acceptable, n),
            "not_acceptable": _share(not_acceptable, n),
        },
    )


def acceptability_summary(
    ratings_by_coder: Mapping[str, Sequence[Rating]],
) -> AcceptabilitySummary:
    """Rating shares per coder plus a pooled (micro-averaged) row.

    Shares are good, acceptable, their cumulative sum, and not
    acceptable. Every coder must contribute at least one rating.
    """
    for coder, ratings in ratings_by_coder.items():
        if not ratings:
            raise ValueError(f"coder {coder!r} has no rated examples")
    coders = {
        coder: _acceptability_row(list(ratings))
        for coder, ratings in ratings_by_coder.items()
    }
    pooled = [rating for ratings in ratings_by_coder.values() for rating in ratings]
    return AcceptabilitySummary(coders=coders, micro_average=_acceptability_row(pooled))


def distance_vs_rating(
    rated_rows: Iterable[tuple[ComparisonRow, Rating | None]],
    thresholds: Sequence[Fraction] = DEFAULT_THRESHOLDS,
) -> BandTable:
    """Cumulative band shares of reference distances, grouped by rating.

    Input rows are pooled across coders; each must carry the rating its
    coder's code set received (None raises :class:`MissingRating`). The
    result reuses the band-table shape with one row per rating; ratings
    with no rows appear with n=0.
    """
    thresholds = normalize_thresholds(thresholds)
    by_rating: dict[Rating, list[ComparisonRow]] = {r: [] for r in RATING_ORDER}
    for row, rating in rated_rows:
        if rating is None:
            raise MissingRating(row.example_id)
        by_rating[rating].append(row)
    return BandTable(
        thresholds=thresholds,
        rows={
            rating.value: _cumulative_row(rows, thresholds)
            for rating, rows in by_rating.items()
        },
    )
