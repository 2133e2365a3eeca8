"""Pydantic request/response models for the commit-pulse service."""

from __future__ import annotations

from typing import Literal

from pydantic import BaseModel, Field

CommitsFormat = Literal["jsonl", "gitlog"]


class SpanModel(BaseModel):
    end_utc: int = Field(gt=0, description="span end, UTC epoch seconds (exclusive)")
    length_days: float = Field(default=1826, description="span length in days, >= 30")


class FiltersModel(BaseModel):
    exclude_merges: bool = False
    exclude_bots: bool = False
    bot_pattern: str = "[bot]"


class RepoMetadataModel(BaseModel):
    created_at_utc: int = Field(gt=0)
    stars: int = Field(ge=0)
    forks: int = Field(ge=0)
    archived: bool = False
    educational: bool = False
    domain_tag: str | None = None


class AnalyzeRequest(BaseModel):
    repo: str
    content: str = Field(description="commit export, inline")
    format: CommitsFormat = "jsonl"
    span: SpanModel
    filters: FiltersModel = FiltersModel()
    generated_at_utc: int | None = None


class GranularityResult(BaseModel):
    mean: float
    std_dev: float
    cv: float | None
    stable: bool
    phi: float
    degenerate: bool


class RepoRow(BaseModel):
    repo: str
    daily: GranularityResult
    weekly: GranularityResult
    monthly: GranularityResult
    profile: str
    stable_set: list[str]
    delta_dw: float
    delta_wm: float
    annual_commits: float


class RenderedReports(BaseModel):
    csv: str
    markdown: str
    json_report: str


class AnalyzeResponse(BaseModel):
    row: RepoRow
    reports: RenderedReports


class BatchRepoInput(BaseModel):
    repo: str
    content: str
    format: CommitsFormat = "jsonl"
    metadata: RepoMetadataModel | None = None


class BatchRequest(BaseModel):
    repos: list[BatchRepoInput]
    span: SpanModel
    filters: FiltersModel = FiltersModel()
    generated_at_utc: int | None = None
    jobs: int = Field(default=1, ge=1)


class SkippedRepo(BaseModel):
    repo: str
    code: str
    message: str


class DeltaStatsResult(BaseModel):
    n_considered: int
    n_improved: int
    n_degraded: int
    n_unchanged: int
    mean_change: float | None
    median_change: float | None
    max_improvement: float
    max_degradation: float


class CohortResult(BaseModel):
    n_repos: int
    profile_counts: dict[str, int]
    pct_daily_stable: float
    pct_weekly_stable: float
    pct_monthly_stable: float
    delta_stats: DeltaStatsResult
    spearman_weekly_monthly_cv: float | None


class DomainRollupResult(BaseModel):
    domain: str
    n_repos: int
    n_monthly_stable: int
    mean_monthly_phi: float


class BatchResponse(BaseModel):
    rows: list[RepoRow]
    skipped: list[SkippedRepo]
    cohort: CohortResult
    domains: list[DomainRollupResult] | None
    reports: RenderedReports


class IngestRequest(BaseModel):
    repo: str
    span: SpanModel
    token: str | None = None
    api_base: str | None = None
    page_size: int = Field(default=100, ge=1, le=100)


class IngestResponse(BaseModel):
    repo: str
    n_records: int
    jsonl: str


class EligibilityRequest(BaseModel):
    repo: str
    metadata: RepoMetadataModel
    now_utc: int = Field(gt=0)


class EligibilityResponse(BaseModel):
    repo: str
    age_ok: bool
    stars_ok: bool
    forks_ok: bool
    active_ok: bool
    dev_focus_ok: bool
    eligible: bool


class CohortRenderRequest(BaseModel):
    report_json: str = Field(description="a previously produced JSON report")


class CohortRenderResponse(BaseModel):
    cohort: CohortResult
    reports: RenderedReports


class HealthResponse(BaseModel):
    status: str
    version: str
