"""Stability classification and scoring of commit-rhythm series.

A bucket series is *stable* when its coefficient of variation (population
standard deviation over mean) stays inside the corridor ``[0, 0.5]``.
Inside the corridor a triangular normalizer maps the CV to a score in
``[0, 1]`` peaking at CV = 0.25; outside the corridor the score is 0.
Classification and score are reported as separate facts: the corridor
boundaries (CV = 0 and CV = 0.5) are classified stable yet score 0.

The CV is computed on raw bucket counts. Scaling a series by any
positive constant leaves the CV unchanged, so counts and commits-per-day
frequencies classify identically.
"""

from __future__ import annotations

import statistics
from dataclasses import dataclass
from enum import Enum
from typing import Sequence

from commit_pulse.errors import ContractViolation, EmptySeriesError
from commit_pulse.ingest import CommitRecord, FilterOptions, filter_commits
from commit_pulse.series import (
    AnalysisSpan,
    BucketSeries,
    Granularity,
    annual_throughput,
    bucketize,
    frequency_series,
)

# Upper bound of the stability corridor for the CV.
ALPHA_C = 0.5
# The CV that receives the maximum score, and the tolerated deviation.
PHI_TARGET = 0.25
PHI_TOLERANCE = 0.25


class ProfileLabel(Enum):
    ALL_THREE = "ALL_THREE"
    WEEKLY_MONTHLY = "WEEKLY_MONTHLY"
    MONTHLY_ONLY = "MONTHLY_ONLY"
    UNSTABLE = "UNSTABLE"
    NON_HIERARCHICAL = "NON_HIERARCHICAL"


_GRANULARITY_LETTER = {Granularity.DAILY: "D", Granularity.WEEKLY: "W", Granularity.MONTHLY: "M"}


@dataclass(frozen=True)
class GranularityAssessment:
    """Dispersion, classification, and score for one granularity.

    ``cv`` is ``None`` (undefined) for dead series (mean = 0) and for
    single-bucket series, both flagged ``degenerate`` and treated as
    unstable with score 0.
    """

    granularity: Granularity
    mean: float
    std_dev: float
    cv: float | None
    stable: bool
    phi: float
    degenerate: bool


@dataclass(frozen=True)
class StabilityProfile:
    """Which of the three granularities a repository is stable at."""

    stable_set: frozenset[Granularity]
    label: ProfileLabel

    def display(self) -> str:
        """Render the label; non-hierarchical sets keep the explicit set."""
        if self.label is not ProfileLabel.NON_HIERARCHICAL:
            return self.label.value
        letters = [_GRANULARITY_LETTER[g] for g in Granularity if g in self.stable_set]
        return f"NON_HIERARCHICAL{{{','.join(letters)}}}"


@dataclass(frozen=True)
class DeltaPair:
    """Score change when the window widens: daily->weekly, weekly->monthly."""

    delta_dw: float
    delta_wm: float


@dataclass(frozen=True)
class RepoAssessment:
    """The full per-repository stability row."""

    repo_id: str
    daily: GranularityAssessment
    weekly: GranularityAssessment
    monthly: GranularityAssessment
    profile: StabilityProfile
    deltas: DeltaPair
    annual_throughput: float

    def at(self, granularity: Granularity) -> GranularityAssessment:
        return {
            Granularity.DAILY: self.daily,
            Granularity.WEEKLY: self.weekly,
            Granularity.MONTHLY: self.monthly,
        }[granularity]


def coefficient_of_variation(counts: Sequence[int]) -> float | None:
    """Population standard deviation divided by the mean; None if mean = 0."""
    if not counts:
        raise EmptySeriesError("cannot compute the CV of an empty series")
    mean = statistics.fmean(counts)
    if mean == 0:
        return None
    return statistics.pstdev(counts) / mean


def classify_stable(cv: float | None) -> bool:
    """True iff the CV is defined and inside the corridor (boundary inclusive)."""
    return cv is not None and cv <= ALPHA_C


def triangular_normalizer(cv: float | None) -> float:
    """Map a CV to a score in [0, 1], peaking at the target CV.

    ``1 - |cv - 0.25| / 0.25`` inside the corridor ``[0, 0.5]``, else 0.
    An undefined CV maps to 0.
    """
    if cv is None or cv < 0.0 or cv > PHI_TARGET + PHI_TOLERANCE:
        return 0.0
    return 1.0 - abs(cv - PHI_TARGET) / PHI_TOLERANCE


def assess_granularity(series: BucketSeries) -> GranularityAssessment:
    """Classify and score one bucket series.

    A single-bucket series carries no dispersion information: it is
    flagged degenerate (cv undefined, unstable, score 0) rather than
    raising.
    """
    counts = series.counts
    mean = statistics.fmean(counts)
    std_dev = statistics.pstdev(counts)
    if len(counts) < 2:
        cv: float | None = None
    else:
        cv = None if mean == 0 else std_dev / mean
    return GranularityAssessment(
        granularity=series.granularity,
        mean=mean,
        std_dev=std_dev,
        cv=cv,
        stable=classify_stable(cv),
        phi=triangular_normalizer(cv),
        degenerate=cv is None,
    )


def derive_profile(
    daily_stable: bool, weekly_stable: bool, monthly_stable: bool
) -> StabilityProfile:
    """Map the three stability flags onto the profile taxonomy.

    The hierarchy daily ⊂ weekly ⊂ monthly gets the named labels; any
    other non-empty combination is NON_HIERARCHICAL with the explicit
    set retained.
    """
    stable_set = frozenset(
        g
        for g, flag in (
            (Granularity.DAILY, daily_stable),
            (Granularity.WEEKLY, weekly_stable),
            (Granularity.MONTHLY, monthly_stable),
        )
        if flag
    )
    if stable_set == frozenset(Granularity):
        label = ProfileLabel.ALL_THREE
    elif stable_set == frozenset({Granularity.WEEKLY, Granularity.MONTHLY}):
        label = ProfileLabel.WEEKLY_MONTHLY
    elif stable_set == frozenset({Granularity.MONTHLY}):
        label = ProfileLabel.MONTHLY_ONLY
    elif not stable_set:
        label = ProfileLabel.UNSTABLE
    else:
        label = ProfileLabel.NON_HIERARCHICAL
    return StabilityProfile(stable_set=stable_set, label=label)


def compute_deltas(phi_d: float, phi_w: float, phi_m: float) -> DeltaPair:
    """Stepwise score deltas across the granularity ladder."""
    for name, phi in (("phi_d", phi_d), ("phi_w", phi_w), ("phi_m", phi_m)):
        if not 0.0 <= phi <= 1.0:
            raise ContractViolation(f"{name} must be in [0, 1], got {phi}")
    return DeltaPair(delta_dw=phi_w - phi_d, delta_wm=phi_m - phi_w)


def assess_repo(
    repo_id: str,
    records: Sequence[CommitRecord],
    span: AnalysisSpan,
    filter_options: FilterOptions | None = None,
) -> RepoAssessment:
    """Assess one repository at all three granularities.

    All three series share the same backward anchor (the span end).
    When ``filter_options`` is given the records are filtered first;
    filtering is idempotent, so pre-filtered input is fine. Annual
    throughput is computed over the same filtered set.
    """
    if filter_options is not None:
        records = filter_commits(records, filter_options)
    by_granularity = {
        g: assess_granularity(bucketize(records, g, span)) for g in Granularity
    }
    daily = by_granularity[Granularity.DAILY]
    weekly = by_granularity[Granularity.WEEKLY]
    monthly = by_granularity[Granularity.MONTHLY]
    return RepoAssessment(
        repo_id=repo_id,
        daily=daily,
        weekly=weekly,
        monthly=monthly,
        profile=derive_profile(daily.stable, weekly.stable, monthly.stable),
        deltas=compute_deltas(daily.phi, weekly.phi, monthly.phi),
        annual_throughput=annual_throughput(records, span),
    )


def derivative_diagnostic(series: BucketSeries) -> list[float]:
    """Discrete rate of change of the commit frequency, per day.

    First differences of the per-day frequencies divided by the window
    length in days. Diagnostic output only; classification always goes
    through the CV corridor.
    """
    freqs = frequency_series(series)
    window_days = series.granularity.window_days
    return [(b - a) / window_days for a, b in zip(freqs, freqs[1:])]
