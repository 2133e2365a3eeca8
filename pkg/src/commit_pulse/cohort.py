"""Cohort-level aggregation over many repository assessments.

Produces the profile census, the share of repositories stable at each
granularity, weekly-to-monthly score-evolution statistics (restricted to
the weekly-stable repositories), a rank correlation between weekly and
monthly CVs, and per-domain rollups.
"""

from __future__ import annotations

import math
import statistics
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

from commit_pulse.errors import ContractViolation, EmptyCohortError
from commit_pulse.ingest import RepoMetadata
from commit_pulse.stability import ProfileLabel, RepoAssessment

UNTAGGED_DOMAIN = "untagged"

_CANONICAL_PROFILES = (
    ProfileLabel.ALL_THREE,
    ProfileLabel.WEEKLY_MONTHLY,
    ProfileLabel.MONTHLY_ONLY,
    ProfileLabel.UNSTABLE,
)


@dataclass(frozen=True)
class DeltaStats:
    """Weekly-to-monthly score evolution over the weekly-stable repos.

    ``mean_change``/``median_change`` are ``None`` for an empty
    considered set. ``max_improvement``/``max_degradation`` report 0.0
    when the corresponding sub-population is empty; ``n_improved`` and
    ``n_degraded`` are the empty-population markers.
    """

    n_considered: int
    n_improved: int
    n_degraded: int
    n_unchanged: int
    mean_change: float | None
    median_change: float | None
    max_improvement: float
    max_degradation: float


@dataclass(frozen=True)
class CohortSummary:
    """Cohort-level stability findings."""

    n_repos: int
    profile_counts: dict[str, int]
    pct_daily_stable: float
    pct_weekly_stable: float
    pct_monthly_stable: float
    delta_stats: DeltaStats
    spearman_weekly_monthly_cv: float | None


@dataclass(frozen=True)
class DomainRollup:
    """Monthly-granularity stability rollup for one application domain."""

    domain_tag: str
    n_repos: int
    n_monthly_stable: int
    mean_monthly_phi: float


def _average_ranks_doubled(values: Sequence[float]) -> list[int]:
    """1-based average ranks, doubled so ties (x.5) stay integers."""
    order = sorted(range(len(values)), key=lambda i: values[i])
    ranks = [0] * len(values)
    i = 0
    while i < len(values):
        j = i
        while j + 1 < len(values) and values[order[j + 1]] == values[order[i]]:
            j += 1
        doubled = (i + 1) + (j + 1)  # first + last 1-based position of the tie group
        for k in range(i, j + 1):
            ranks[order[k]] = doubled
        i = j + 1
    return ranks


def spearman_rank(xs: Sequence[float], ys: Sequence[float]) -> float | None:
    """Spearman rank correlation with average ranks for ties.

    Pearson correlation of the ranked data, computed in exact integer
    arithmetic so that rational results (identical rankings -> 1.0,
    reversals -> -1.0, tie-free small cases) come out exact. Returns
    ``None`` when either side is constant.
    """
    if len(xs) != len(ys):
        raise ContractViolation(f"length mismatch: {len(xs)} vs {len(ys)}")
    if len(xs) < 2:
        raise ContractViolation("need at least 2 observations")
    rx = _average_ranks_doubled(xs)
    ry = _average_ranks_doubled(ys)
    n = len(rx)
    sum_x, sum_y = sum(rx), sum(ry)
    cov_n = n * sum(a * b for a, b in zip(rx, ry)) - sum_x * sum_y
    var_x = n * sum(a * a for a in rx) - sum_x * sum_x
    var_y = n * sum(b * b for b in ry) - sum_y * sum_y
    if var_x == 0 or var_y == 0:
        return None
    denom_sq = var_x * var_y
    root = math.isqrt(denom_sq)
    if root * root == denom_sq:
        return float(Fraction(cov_n, root))
    return cov_n / math.sqrt(denom_sq)


def delta_statistics(assessments: Sequence[RepoAssessment]) -> DeltaStats:
    """Partition weekly-stable repos by the sign of their weekly->monthly delta."""
    deltas = [a.deltas.delta_wm for a in assessments if a.weekly.stable]
    improved = [d for d in deltas if d > 0]
    degraded = [d for d in deltas if d < 0]
    return DeltaStats(
        n_considered=len(deltas),
        n_improved=len(improved),
        n_degraded=len(degraded),
        n_unchanged=len(deltas) - len(improved) - len(degraded),
        mean_change=statistics.fmean(deltas) if deltas else None,
        median_change=statistics.median(deltas) if deltas else None,
        max_improvement=max(improved, default=0.0),
        max_degradation=min(degraded, default=0.0),
    )


def summarize(assessments: Sequence[RepoAssessment]) -> CohortSummary:
    """Aggregate per-repo assessments into the cohort summary.

    The rank correlation is computed over the repos whose weekly and
    monthly CVs are both defined; it is ``None`` when fewer than two
    such repos exist or either side is constant.
    """
    if not assessments:
        raise EmptyCohortError("cannot summarize an empty cohort")
    seen_ids: set[str] = set()
    for assessment in assessments:
        if assessment.repo_id in seen_ids:
            raise ContractViolation(f"duplicate repo_id {assessment.repo_id!r}")
        seen_ids.add(assessment.repo_id)

    profile_counts: dict[str, int] = {label.value: 0 for label in _CANONICAL_PROFILES}
    for assessment in assessments:
        key = assessment.profile.display()
        profile_counts[key] = profile_counts.get(key, 0) + 1
    # Canonical labels first, then any non-hierarchical sets, sorted.
    extras = sorted(k for k in profile_counts if k not in {l.value for l in _CANONICAL_PROFILES})
    ordered = {label.value: profile_counts[label.value] for label in _CANONICAL_PROFILES}
    ordered.update({k: profile_counts[k] for k in extras})

    n = len(assessments)
    cv_pairs = [
        (a.weekly.cv, a.monthly.cv)
        for a in assessments
        if a.weekly.cv is not None and a.monthly.cv is not None
    ]
    if len(cv_pairs) >= 2:
        spearman = spearman_rank([p[0] for p in cv_pairs], [p[1] for p in cv_pairs])
    else:
        spearman = None

    return CohortSummary(
        n_repos=n,
        profile_counts=ordered,
        pct_daily_stable=sum(1 for a in assessments if a.daily.stable) / n,
        pct_weekly_stable=sum(1 for a in assessments if a.weekly.stable) / n,
        pct_monthly_stable=sum(1 for a in assessments if a.monthly.stable) / n,
        delta_stats=delta_statistics(assessments),
        spearman_weekly_monthly_cv=spearman,
    )


def domain_rollup(
    assessments: Sequence[RepoAssessment], metadata: Sequence[RepoMetadata]
) -> list[DomainRollup]:
    """Group assessments by domain tag and roll up monthly stability.

    Repos whose metadata has no domain tag land under ``"untagged"``.
    Every assessment must have a metadata entry.
    """
    by_id = {m.repo_id: m for m in metadata}
    groups: dict[str, list[RepoAssessment]] = {}
    for assessment in assessments:
        meta = by_id.get(assessment.repo_id)
        if meta is None:
            raise ContractViolation(f"no metadata for repo {assessment.repo_id!r}")
        tag = meta.domain_tag or UNTAGGED_DOMAIN
        groups.setdefault(tag, []).append(assessment)
    return [
        DomainRollup(
            domain_tag=tag,
            n_repos=len(members),
            n_monthly_stable=sum(1 for a in members if a.monthly.stable),
            mean_monthly_phi=statistics.fmean(a.monthly.phi for a in members),
        )
        for tag, members in sorted(groups.items())
    ]
