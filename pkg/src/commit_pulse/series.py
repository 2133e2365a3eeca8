"""Tumbling-window commit count series at daily/weekly/monthly granularity.

Buckets are consecutive, non-overlapping, and anchored *backward* from
the span end: the newest bucket always ends exactly at ``end_utc``, and
when the span is not an integer multiple of the window the oldest
partial window is dropped. The most recent activity is the signal of
interest; a short leading bucket would bias the dispersion measure.
All boundaries are computed in UTC.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from typing import Iterable, Sequence

from commit_pulse.errors import DegenerateSpanError
from commit_pulse.ingest import CommitRecord

SECONDS_PER_DAY = 86_400
DAYS_PER_YEAR = 365.25

# Default analysis span: the last ~5 years.
DEFAULT_SPAN_DAYS = 1826


class Granularity(Enum):
    """Bucketing window size, in days."""

    DAILY = 1
    WEEKLY = 7
    MONTHLY = 30

    @property
    def window_days(self) -> int:
        return self.value

    @property
    def window_seconds(self) -> int:
        return self.value * SECONDS_PER_DAY


@dataclass(frozen=True)
class AnalysisSpan:
    """Half-open observation window ``[end - length, end)``.

    ``length_days`` accepts fractional day counts (throughput spans are
    frequently expressed in 365.25-day years). A span must cover at
    least one bucket of whatever granularity it is used with; the full
    three-granularity ladder therefore needs >= 30 days, which the
    workflow entry points enforce.
    """

    end_utc: int
    length_days: float = DEFAULT_SPAN_DAYS

    def __post_init__(self):
        if self.length_days < 1:
            raise DegenerateSpanError(
                f"span must cover at least one day, got {self.length_days}"
            )

    @property
    def length_seconds(self) -> int:
        return round(self.length_days * SECONDS_PER_DAY)

    @property
    def start_utc(self) -> int:
        return self.end_utc - self.length_seconds

    def contains(self, timestamp_utc: int) -> bool:
        return self.start_utc <= timestamp_utc < self.end_utc


@dataclass(frozen=True)
class BucketSeries:
    """Ordered commit counts per tumbling window at one granularity."""

    granularity: Granularity
    span: AnalysisSpan
    bucket_start_utc: tuple[int, ...]
    counts: tuple[int, ...]

    def __post_init__(self):
        if len(self.counts) != len(self.bucket_start_utc) or not self.counts:
            raise ValueError("counts and bucket_start_utc must be equally long and non-empty")
        step = self.granularity.window_seconds
        for earlier, later in zip(self.bucket_start_utc, self.bucket_start_utc[1:]):
            if later - earlier != step:
                raise ValueError("bucket starts must be consecutive with step = window size")
        if any(c < 0 for c in self.counts):
            raise ValueError("counts must be non-negative")

    @property
    def end_utc(self) -> int:
        return self.bucket_start_utc[-1] + self.granularity.window_seconds


def bucketize(
    records: Iterable[CommitRecord], granularity: Granularity, span: AnalysisSpan
) -> BucketSeries:
    """Count commits per tumbling window, oldest bucket first.

    Every record inside the retained buckets is counted exactly once;
    records before the oldest retained bucket (the dropped partial
    window) or at/after ``end_utc`` are ignored. Zero-commit buckets are
    present with count 0.
    """
    window = granularity.window_seconds
    n_buckets = span.length_seconds // window
    if n_buckets < 1:
        raise DegenerateSpanError(
            f"span of {span.length_days} days is shorter than one "
            f"{granularity.name.lower()} window ({granularity.window_days} days)"
        )
    origin = span.end_utc - n_buckets * window
    counts = [0] * n_buckets
    for record in records:
        if origin <= record.timestamp_utc < span.end_utc:
            counts[(record.timestamp_utc - origin) // window] += 1
    starts = tuple(origin + i * window for i in range(n_buckets))
    return BucketSeries(
        granularity=granularity,
        span=span,
        bucket_start_utc=starts,
        counts=tuple(counts),
    )


def frequency_series(series: BucketSeries) -> list[float]:
    """Commits per day for each bucket: counts divided by the window length.

    For DAILY series this equals the counts numerically.
    """
    window_days = series.granularity.window_days
    return [count / window_days for count in series.counts]


def annual_throughput(records: Sequence[CommitRecord], span: AnalysisSpan) -> float:
    """Commits per 365.25-day year over the span."""
    in_span = sum(1 for record in records if span.contains(record.timestamp_utc))
    return in_span * DAYS_PER_YEAR / span.length_days
