"""Shared builders for the test suite."""

from __future__ import annotations

import itertools

from commit_pulse.ingest import CommitRecord
from commit_pulse.series import AnalysisSpan, BucketSeries, Granularity
from commit_pulse.stability import (
    DeltaPair,
    GranularityAssessment,
    RepoAssessment,
    compute_deltas,
    derive_profile,
)

DAY = 86_400

_hash_counter = itertools.count(0x1000000)


def rec(
    ts: int,
    repo: str = "demo/repo",
    author: str = "dev@example.com",
    merge: bool = False,
    commit_hash: str | None = None,
) -> CommitRecord:
    return CommitRecord(
        repo_id=repo,
        commit_hash=commit_hash or f"{next(_hash_counter):07x}",
        timestamp_utc=ts,
        author_id=author,
        is_merge=merge,
    )


def make_series(
    counts: list[int],
    granularity: Granularity = Granularity.DAILY,
    end_utc: int = 1_700_006_400,
) -> BucketSeries:
    """A consistent BucketSeries with the given counts."""
    window = granularity.window_seconds
    n = len(counts)
    span = AnalysisSpan(end_utc=end_utc, length_days=n * granularity.window_days)
    starts = tuple(end_utc - (n - i) * window for i in range(n))
    return BucketSeries(
        granularity=granularity, span=span, bucket_start_utc=starts, counts=tuple(counts)
    )


def ga(granularity: Granularity, stable: bool, phi: float) -> GranularityAssessment:
    """A consistent assessment with a chosen stability flag and score.

    Stable assessments get cv = 0.25 * phi (the lower inverse of the
    normalizer, always inside the corridor); unstable ones sit at
    cv = 0.75 with phi forced to 0.
    """
    if stable:
        cv = 0.25 * phi
    else:
        assert phi == 0.0, "an unstable granularity must score 0"
        cv = 0.75
    return GranularityAssessment(
        granularity=granularity,
        mean=1.0,
        std_dev=cv,
        cv=cv,
        stable=stable,
        phi=phi,
        degenerate=False,
    )


def make_assessment(
    repo: str,
    stable: tuple[bool, bool, bool],
    phi: tuple[float, float, float] = (0.0, 0.0, 0.0),
    cv_weekly: float | None = None,
    cv_monthly: float | None = None,
    throughput: float = 0.0,
) -> RepoAssessment:
    """A RepoAssessment with chosen stability flags and scores.

    ``cv_weekly``/``cv_monthly`` override the derived CVs (for rank
    correlation tests); overrides must stay consistent with the flags.
    """
    daily = ga(Granularity.DAILY, stable[0], phi[0])
    weekly = ga(Granularity.WEEKLY, stable[1], phi[1])
    monthly = ga(Granularity.MONTHLY, stable[2], phi[2])
    if cv_weekly is not None:
        weekly = GranularityAssessment(
            granularity=weekly.granularity,
            mean=weekly.mean,
            std_dev=cv_weekly,
            cv=cv_weekly,
            stable=weekly.stable,
            phi=weekly.phi,
            degenerate=False,
        )
    if cv_monthly is not None:
        monthly = GranularityAssessment(
            granularity=monthly.granularity,
            mean=monthly.mean,
            std_dev=cv_monthly,
            cv=cv_monthly,
            stable=monthly.stable,
            phi=monthly.phi,
            degenerate=False,
        )
    return RepoAssessment(
        repo_id=repo,
        daily=daily,
        weekly=weekly,
        monthly=monthly,
        profile=derive_profile(daily.stable, weekly.stable, monthly.stable),
        deltas=compute_deltas(daily.phi, weekly.phi, monthly.phi),
        annual_throughput=throughput,
    )


def delta_pair(delta_dw: float, delta_wm: float) -> DeltaPair:
    return DeltaPair(delta_dw=delta_dw, delta_wm=delta_wm)
