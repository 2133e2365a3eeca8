"""Commit-rhythm stability analytics.

Ingests git commit histories, buckets them into daily/weekly/monthly
tumbling windows, classifies rhythm stability from the coefficient of
variation, scores it with a triangular normalizer, and aggregates
cohort-level statistics.
"""

__version__ = "0.1.0"

from commit_pulse.errors import CommitPulseError
from commit_pulse.ingest import (
    CommitRecord,
    EligibilityReport,
    FilterOptions,
    RepoMetadata,
    check_selection_criteria,
    filter_commits,
    parse_commit_jsonl,
    parse_git_log,
    write_commit_jsonl,
)
from commit_pulse.series import (
    AnalysisSpan,
    BucketSeries,
    Granularity,
    annual_throughput,
    bucketize,
    frequency_series,
)
from commit_pulse.stability import (
    ALPHA_C,
    PHI_TARGET,
    PHI_TOLERANCE,
    DeltaPair,
    GranularityAssessment,
    ProfileLabel,
    RepoAssessment,
    StabilityProfile,
    assess_granularity,
    assess_repo,
    classify_stable,
    coefficient_of_variation,
    compute_deltas,
    derivative_diagnostic,
    derive_profile,
    triangular_normalizer,
)
from commit_pulse.cohort import (
    CohortSummary,
    DeltaStats,
    DomainRollup,
    delta_statistics,
    domain_rollup,
    spearman_rank,
    summarize,
)
from commit_pulse.report import (
    ConfigEcho,
    ReportBundle,
    build_bundle,
    emit_cohort_markdown,
    emit_json,
    emit_repo_csv,
    parse_report_json,
)

__all__ = [
    "__version__",
    "ALPHA_C",
    "PHI_TARGET",
    "PHI_TOLERANCE",
    "AnalysisSpan",
    "BucketSeries",
    "CohortSummary",
    "CommitPulseError",
    "CommitRecord",
    "ConfigEcho",
    "DeltaPair",
    "DeltaStats",
    "DomainRollup",
    "EligibilityReport",
    "FilterOptions",
    "Granularity",
    "GranularityAssessment",
    "ProfileLabel",
    "RepoAssessment",
    "RepoMetadata",
    "ReportBundle",
    "StabilityProfile",
    "annual_throughput",
    "assess_granularity",
    "assess_repo",
    "bucketize",
    "build_bundle",
    "check_selection_criteria",
    "classify_stable",
    "coefficient_of_variation",
    "compute_deltas",
    "delta_statistics",
    "derivative_diagnostic",
    "derive_profile",
    "domain_rollup",
    "emit_cohort_markdown",
    "emit_json",
    "emit_repo_csv",
    "filter_commits",
    "frequency_series",
    "parse_commit_jsonl",
    "parse_git_log",
    "parse_report_json",
    "spearman_rank",
    "summarize",
    "triangular_normalizer",
    "write_commit_jsonl",
]
