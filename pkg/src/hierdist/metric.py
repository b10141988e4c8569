"""Code-set normalization and the average-minimum-distance metric.

A code set is the set of concepts a coder assigned to one free-text
example. Before comparison, raw code lists are normalized against a
focus view: codes missing from the terminology, codes outside the focus
subhierarchy, and duplicates are removed and itemized in a report. An
example whose code set normalizes to nothing must be excluded by the
caller; the metric is undefined on empty sets.

The set distance D(X, Y) pairs every code with its closest counterpart
in the other set and averages those minimum hop distances:

    numerator   = sum over x in X of min over y in Y of d(x, y)
                + sum over y in Y of min over x in X of d(y, x)
    D(X, Y)     = numerator / denominator

Two denominator conventions are in circulation for this average and
they disagree whenever the sets overlap: dividing by the number of
min-terms, |X| + |Y|, or by the size of the union, |X u Y|. Both are
implemented; `term_count` is the default because the numerator has
exactly |X| + |Y| terms, and every result records which policy produced
it. Values are exact rationals, never floats, so band boundaries at
whole numbers compare exactly.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum
from fractions import Fraction
from typing import Iterable, Sequence

from .errors import InvalidThresholds, OutOfFocus
from .hierarchy import FocusView, cached_concept_distance

DEFAULT_THRESHOLDS = (Fraction(1), Fraction(2), Fraction(3))

EXACT_BAND = "exact"


class DenominatorPolicy(Enum):
    TERM_COUNT = "term_count"  # divide by |X| + |Y|
    SET_UNION = "set_union"    # divide by |X u Y|

    @classmethod
    def parse(cls, text: str) -> "DenominatorPolicy":
        for member in cls:
            if member.value == text:
                return member
        raise ValueError(f"unknown denominator policy {text!r}")


@dataclass(frozen=True)
class CodeSet:
    """Deduplicated in-focus concept ids annotating one example."""

    codes: frozenset[int]

    def __post_init__(self):
        if not self.codes:
            raise ValueError("a code set cannot be empty")

    def __iter__(self):
        return iter(self.codes)

    def __len__(self) -> int:
        return len(self.codes)

    def __contains__(self, code: int) -> bool:
        return code in self.codes

    def sorted(self) -> list[int]:
        return sorted(self.codes)


@dataclass
class NormalizationReport:
    """What happened to each raw code during normalization."""

    kept: int = 0
    dropped_unknown: list[int] = field(default_factory=list)
    dropped_out_of_focus: list[int] = field(default_factory=list)
    dropped_duplicates: int = 0
    empty_after_normalization: bool = False

    def as_dict(self) -> dict:
        return {
            "kept": self.kept,
            "dropped_unknown": list(self.dropped_unknown),
            "dropped_out_of_focus": list(self.dropped_out_of_focus),
            "dropped_duplicates": self.dropped_duplicates,
            "empty_after_normalization": self.empty_after_normalization,
        }


def normalize_code_set(
    raw: Iterable[int], view: FocusView
) -> tuple[CodeSet | None, NormalizationReport]:
    """Reduce a raw code list to its valid in-focus subset.

    Codes absent from the underlying graph (erroneous or retired ids)
    are dropped as unknown; codes present but outside the focus
    subhierarchy are dropped as out-of-focus; repeats of a code already
    seen are counted as duplicates. Nothing raises: every anomaly lands
    in the report, and a fully-dropped input returns ``(None, report)``
    with `empty_after_normalization` set so the caller can exclude the
    example.
    """
    report = NormalizationReport()
    seen: set[int] = set()
    kept: set[int] = set()
    for code in raw:
        if code in seen:
            report.dropped_duplicates += 1
            continue
        seen.add(code)
        if code not in view.base:
            report.dropped_unknown.append(code)
        elif code not in view.members:
            report.dropped_out_of_focus.append(code)
        else:
            kept.add(code)
    report.kept = len(kept)
    if not kept:
        report.empty_after_normalization = True
        return None, report
    return CodeSet(frozenset(kept)), report


@dataclass(frozen=True)
class DistanceResult:
    """An exact-rational set distance plus the bookkeeping behind it."""

    numerator: int
    denominator: int
    value: Fraction
    policy: DenominatorPolicy
    exact_match: bool

    def as_dict(self) -> dict:
        return {
            "numerator": self.numerator,
            "denominator": self.denominator,
            "value": str(self.value),
            "policy": self.policy.value,
            "exact_match": self.exact_match,
        }


def code_set_distance(
    x: CodeSet,
    y: CodeSet,
    view: FocusView,
    policy: DenominatorPolicy = DenominatorPolicy.TERM_COUNT,
) -> DistanceResult:
    """Average minimum hop distance between two normalized code sets.

    Both sets must have been normalized against `view`; a stray code
    raises :class:`OutOfFocus` defensively. The result is 0 exactly when
    the sets are equal.
    """
    for code in list(x) + list(y):
        if code not in view.members:
            raise OutOfFocus(code, view.focus_root)

    numerator = 0
    for code in x:
        numerator += min(cached_concept_distance(view, code, other) for other in y)
    for code in y:
        numerator += min(cached_concept_distance(view, code, other) for other in x)

    if policy is DenominatorPolicy.TERM_COUNT:
        denominator = len(x) + len(y)
    else:
        denominator = len(x.codes | y.codes)

    value = Fraction(numerator, denominator)
    return DistanceResult(
        numerator=numerator,
        denominator=denominator,
        value=value,
        policy=policy,
        exact_match=numerator == 0,
    )


def normalize_thresholds(values: Sequence) -> tuple[Fraction, ...]:
    """Coerce band thresholds to positive, strictly increasing rationals."""
    try:
        thresholds = tuple(Fraction(v) for v in values)
    except (ValueError, TypeError, ZeroDivisionError) as exc:
        raise InvalidThresholds(str(exc)) from exc
    if not thresholds:
        raise InvalidThresholds("at least one threshold is required")
    if thresholds[0] <= 0:
        raise InvalidThresholds("thresholds must be positive")
    for lo, hi in zip(thresholds, thresholds[1:]):
        if hi <= lo:
            raise InvalidThresholds("thresholds must be strictly increasing")
    return thresholds


def band_labels(thresholds: Sequence[Fraction]) -> list[str]:
    """All band labels in order: exact, one per threshold, then beyond."""
    labels = [EXACT_BAND]
    labels.extend(f"<={t}" for t in thresholds)
    labels.append(f">{thresholds[-1]}")
    return labels


def band_of_value(
    value: Fraction, thresholds: Sequence[Fraction] = DEFAULT_THRESHOLDS
) -> str:
    """Bucket a distance value: exact at 0, else its smallest threshold.

    With the default thresholds the buckets are exact, (0, 1], (1, 2],
    (2, 3], and beyond 3. Comparison is exact rational comparison, so a
    value sitting precisely on a threshold lands inside it.
    """
    thresholds = normalize_thresholds(thresholds)
    if value == 0:
        return EXACT_BAND
    for t in thresholds:
        if value <= t:
            return f"<={t}"
    return f">{thresholds[-1]}"


def distance_band(
    result: DistanceResult, thresholds: Sequence[Fraction] = DEFAULT_THRESHOLDS
) -> str:
    """Band label for a computed :class:`DistanceResult`."""
    return band_of_value(result.value, thresholds)
