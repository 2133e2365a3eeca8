"""FastAPI application exposing the analytics pipeline.

Domain errors surface as ``{"error": {"code", "message"}}`` bodies; the
``code`` values are the stable contract the CLI maps to exit codes.
"""

from __future__ import annotations

import io
import time
from concurrent.futures import ThreadPoolExecutor

import httpx
from fastapi import FastAPI, Request
from fastapi.responses import JSONResponse

from commit_pulse import __version__
from commit_pulse.cohort import CohortSummary, DomainRollup, domain_rollup
from commit_pulse.errors import (
    AuthError,
    BudgetExceededError,
    CommitPulseError,
    ParseError,
    RemoteError,
    UnknownRepoError,
)
from commit_pulse.ingest import (
    CommitRecord,
    FilterOptions,
    RepoMetadata,
    check_selection_criteria,
    parse_commit_jsonl,
    parse_git_log,
    write_commit_jsonl,
)
from commit_pulse.remote import DEFAULT_API_BASE, fetch_commits_remote
from commit_pulse.report import (
    ConfigEcho,
    ReportBundle,
    build_bundle,
    parse_report_json,
    render_cohort_markdown,
    render_report_json,
    render_repo_csv,
)
from commit_pulse.series import AnalysisSpan, Granularity
from commit_pulse.stability import RepoAssessment, assess_repo
from commit_pulse.service import schemas


def _status_for(exc: CommitPulseError) -> int:
    if isinstance(exc, UnknownRepoError):
        return 404
    if isinstance(exc, AuthError):
        return 401
    if isinstance(exc, BudgetExceededError):
        return 429
    if isinstance(exc, RemoteError):
        return 502
    return 422


def _parse_content(content: str, fmt: str, repo: str) -> list[CommitRecord]:
    if fmt == "gitlog":
        return parse_git_log(content, repo)
    return parse_commit_jsonl(content)


def _filters(model: schemas.FiltersModel, span: AnalysisSpan) -> FilterOptions:
    return FilterOptions(
        exclude_merges=model.exclude_merges,
        exclude_bot_authors=model.exclude_bots,
        bot_pattern=model.bot_pattern,
        span_start_utc=span.start_utc,
        span_end_utc=span.end_utc,
    )


def _config_echo(span: AnalysisSpan, filters: schemas.FiltersModel) -> ConfigEcho:
    return ConfigEcho(
        span_end_utc=span.end_utc,
        span_length_days=span.length_days,
        exclude_merges=filters.exclude_merges,
        exclude_bots=filters.exclude_bots,
        bot_pattern=filters.bot_pattern,
    )


def _granularity_result(assessment) -> schemas.GranularityResult:
    return schemas.GranularityResult(
        mean=assessment.mean,
        std_dev=assessment.std_dev,
        cv=assessment.cv,
        stable=assessment.stable,
        phi=assessment.phi,
        degenerate=assessment.degenerate,
    )


def _repo_row(assessment: RepoAssessment) -> schemas.RepoRow:
    return schemas.RepoRow(
        repo=assessment.repo_id,
        daily=_granularity_result(assessment.daily),
        weekly=_granularity_result(assessment.weekly),
        monthly=_granularity_result(assessment.monthly),
        profile=assessment.profile.display(),
        stable_set=[
            g.name.lower() for g in Granularity if g in assessment.profile.stable_set
        ],
        delta_dw=assessment.deltas.delta_dw,
        delta_wm=assessment.deltas.delta_wm,
        annual_commits=assessment.annual_throughput,
    )


def _cohort_result(cohort: CohortSummary) -> schemas.CohortResult:
    return schemas.CohortResult(
        n_repos=cohort.n_repos,
        profile_counts=cohort.profile_counts,
        pct_daily_stable=cohort.pct_daily_stable,
        pct_weekly_stable=cohort.pct_weekly_stable,
        pct_monthly_stable=cohort.pct_monthly_stable,
        delta_stats=schemas.DeltaStatsResult(
            n_considered=cohort.delta_stats.n_considered,
            n_improved=cohort.delta_stats.n_improved,
            n_degraded=cohort.delta_stats.n_degraded,
            n_unchanged=cohort.delta_stats.n_unchanged,
            mean_change=cohort.delta_stats.mean_change,
            median_change=cohort.delta_stats.median_change,
            max_improvement=cohort.delta_stats.max_improvement,
            max_degradation=cohort.delta_stats.max_degradation,
        ),
        spearman_weekly_monthly_cv=cohort.spearman_weekly_monthly_cv,
    )


def _rendered(bundle: ReportBundle) -> schemas.RenderedReports:
    return schemas.RenderedReports(
        csv=render_repo_csv(bundle),
        markdown=render_cohort_markdown(bundle),
        json_report=render_report_json(bundle),
    )


def _generated_at(requested: int | None) -> int:
    return requested if requested is not None else int(time.time())


def create_app(*, remote_transport: httpx.BaseTransport | None = None) -> FastAPI:
    """Build the service app.

    ``remote_transport`` lets tests point the ingest endpoint at a mock
    upstream API without a live network.
    """
    app = FastAPI(title="commit-pulse", version=__version__)

    @app.exception_handler(CommitPulseError)
    async def _domain_error(request: Request, exc: CommitPulseError) -> JSONResponse:
        return JSONResponse(
            status_code=_status_for(exc),
            content={"error": {"code": exc.code, "message": str(exc)}},
        )

    @app.get("/v1/health", response_model=schemas.HealthResponse)
    def health() -> schemas.HealthResponse:
        return schemas.HealthResponse(status="ok", version=__version__)

    @app.post("/v1/analyze", response_model=schemas.AnalyzeResponse)
    def analyze(req: schemas.AnalyzeRequest) -> schemas.AnalyzeResponse:
        span = AnalysisSpan(end_utc=req.span.end_utc, length_days=req.span.length_days)
        records = _parse_content(req.content, req.format, req.repo)
        assessment = assess_repo(req.repo, records, span, _filters(req.filters, span))
        bundle = build_bundle(
            [assessment], _config_echo(span, req.filters), _generated_at(req.generated_at_utc)
        )
        return schemas.AnalyzeResponse(row=_repo_row(assessment), reports=_rendered(bundle))

    @app.post("/v1/batch", response_model=schemas.BatchResponse)
    def batch(req: schemas.BatchRequest) -> schemas.BatchResponse:
        span = AnalysisSpan(end_utc=req.span.end_utc, length_days=req.span.length_days)
        filters = _filters(req.filters, span)

        parsed: list[tuple[schemas.BatchRepoInput, list[CommitRecord]]] = []
        skipped: list[schemas.SkippedRepo] = []
        for item in req.repos:
            try:
                parsed.append((item, _parse_content(item.content, item.format, item.repo)))
            except CommitPulseError as exc:
                skipped.append(
                    schemas.SkippedRepo(repo=item.repo, code=exc.code, message=str(exc))
                )
        if not parsed:
            raise ParseError(f"all {len(req.repos)} repositories failed to parse")

        def _assess(entry: tuple[schemas.BatchRepoInput, list[CommitRecord]]) -> RepoAssessment:
            item, records = entry
            return assess_repo(item.repo, records, span, filters)

        if req.jobs > 1 and len(parsed) > 1:
            with ThreadPoolExecutor(max_workers=req.jobs) as pool:
                assessments = list(pool.map(_assess, parsed))
        else:
            assessments = [_assess(entry) for entry in parsed]

        metadata = [
            RepoMetadata(
                repo_id=item.repo,
                created_at_utc=item.metadata.created_at_utc,
                stars=item.metadata.stars,
                forks=item.metadata.forks,
                archived=item.metadata.archived,
                educational=item.metadata.educational,
                domain_tag=item.metadata.domain_tag,
            )
            for item, _ in parsed
            if item.metadata is not None
        ]
        rollups: list[DomainRollup] | None = None
        if metadata:
            with_meta = {m.repo_id for m in metadata}
            rollups = domain_rollup(
                [a for a in assessments if a.repo_id in with_meta], metadata
            )

        bundle = build_bundle(
            assessments,
            _config_echo(span, req.filters),
            _generated_at(req.generated_at_utc),
            domain_rollups=rollups,
        )
        assert bundle.cohort is not None
        return schemas.BatchResponse(
            rows=[_repo_row(a) for a in bundle.per_repo_rows],
            skipped=skipped,
            cohort=_cohort_result(bundle.cohort),
            domains=(
                [
                    schemas.DomainRollupResult(
                        domain=r.domain_tag,
                        n_repos=r.n_repos,
                        n_monthly_stable=r.n_monthly_stable,
                        mean_monthly_phi=r.mean_monthly_phi,
                    )
                    for r in bundle.domain_rollups
                ]
                if bundle.domain_rollups is not None
                else None
            ),
            reports=_rendered(bundle),
        )

    @app.post("/v1/ingest", response_model=schemas.IngestResponse)
    def ingest(req: schemas.IngestRequest) -> schemas.IngestResponse:
        span = AnalysisSpan(end_utc=req.span.end_utc, length_days=req.span.length_days)
        records = fetch_commits_remote(
            req.repo,
            span,
            token=req.token,
            api_base=req.api_base or DEFAULT_API_BASE,
            page_size=req.page_size,
            transport=remote_transport,
        )
        buffer = io.StringIO()
        write_commit_jsonl(records, buffer)
        return schemas.IngestResponse(repo=req.repo, n_records=len(records), jsonl=buffer.getvalue())

    @app.post("/v1/eligibility", response_model=schemas.EligibilityResponse)
    def eligibility(req: schemas.EligibilityRequest) -> schemas.EligibilityResponse:
        metadata = RepoMetadata(
            repo_id=req.repo,
            created_at_utc=req.metadata.created_at_utc,
            stars=req.metadata.stars,
            forks=req.metadata.forks,
            archived=req.metadata.archived,
            educational=req.metadata.educational,
            domain_tag=req.metadata.domain_tag,
        )
        report = check_selection_criteria(metadata, req.now_utc)
        return schemas.EligibilityResponse(
            repo=report.repo_id,
            age_ok=report.age_ok,
            stars_ok=report.stars_ok,
            forks_ok=report.forks_ok,
            active_ok=report.active_ok,
            dev_focus_ok=report.dev_focus_ok,
            eligible=report.eligible,
        )

    @app.post("/v1/cohort", response_model=schemas.CohortRenderResponse)
    def cohort_render(req: schemas.CohortRenderRequest) -> schemas.CohortRenderResponse:
        bundle = parse_report_json(req.report_json)
        if bundle.cohort is None:
            raise ParseError("report contains no repositories to aggregate")
        return schemas.CohortRenderResponse(
            cohort=_cohort_result(bundle.cohort), reports=_rendered(bundle)
        )

    return app


app = create_app()
