"""Diff-friendly report rendering: per-repo CSV, cohort markdown, full JSON.

Rendering is deterministic: identical bundles produce byte-identical
output. CSV values are fixed at 6 decimal places so goldens do not churn
on float noise; the JSON report keeps full precision and is lossless
(schema version "1"). Undefined CVs render as an empty CSV field and as
JSON ``null``. Rows are sorted by repo id for stable diffs.
"""

from __future__ import annotations

import csv
import io
import json
from dataclasses import dataclass
from typing import IO, Sequence

from commit_pulse import __version__
from commit_pulse.cohort import (
    CohortSummary,
    DeltaStats,
    DomainRollup,
    summarize,
)
from commit_pulse.errors import ParseError
from commit_pulse.series import Granularity
from commit_pulse.stability import (
    ALPHA_C,
    PHI_TARGET,
    PHI_TOLERANCE,
    DeltaPair,
    GranularityAssessment,
    RepoAssessment,
    derive_profile,
)

SCHEMA_VERSION = "1"

CSV_HEADER = (
    "repo,daily_cv,daily_stable,daily_phi,weekly_cv,weekly_stable,weekly_phi,"
    "monthly_cv,monthly_stable,monthly_phi,profile,delta_dw,delta_wm,annual_commits"
)


@dataclass(frozen=True)
class ConfigEcho:
    """Effective parameters echoed into every report."""

    span_end_utc: int
    span_length_days: float
    exclude_merges: bool
    exclude_bots: bool
    bot_pattern: str
    alpha_c: float = ALPHA_C
    phi_target: float = PHI_TARGET
    phi_tolerance: float = PHI_TOLERANCE


@dataclass(frozen=True)
class ReportBundle:
    """Everything one run produced, ready for rendering."""

    per_repo_rows: tuple[RepoAssessment, ...]
    cohort: CohortSummary | None
    config: ConfigEcho
    generated_at_utc: int
    tool_version: str = __version__
    domain_rollups: tuple[DomainRollup, ...] | None = None


def build_bundle(
    assessments: Sequence[RepoAssessment],
    config: ConfigEcho,
    generated_at_utc: int,
    domain_rollups: Sequence[DomainRollup] | None = None,
    tool_version: str = __version__,
) -> ReportBundle:
    """Sort rows, summarize the cohort, and freeze the bundle."""
    rows = tuple(sorted(assessments, key=lambda a: a.repo_id))
    return ReportBundle(
        per_repo_rows=rows,
        cohort=summarize(rows) if rows else None,
        config=config,
        generated_at_utc=generated_at_utc,
        tool_version=tool_version,
        domain_rollups=tuple(domain_rollups) if domain_rollups is not None else None,
    )


def _fmt(value: float | None) -> str:
    if value is None:
        return ""
    # `+ 0.0` turns -0.0 into 0.0 so goldens never flip sign on noise.
    return f"{value + 0.0:.6f}"


def _fmt_bool(value: bool) -> str:
    return "true" if value else "false"


def render_repo_csv(bundle: ReportBundle) -> str:
    out = io.StringIO()
    writer = csv.writer(out, lineterminator="\n")
    writer.writerow(CSV_HEADER.split(","))
    for row in bundle.per_repo_rows:
        cells: list[str] = [row.repo_id]
        for assessment in (row.daily, row.weekly, row.monthly):
            cells.append(_fmt(assessment.cv))
            cells.append(_fmt_bool(assessment.stable))
            cells.append(_fmt(assessment.phi))
        cells.append(row.profile.display())
        cells.append(_fmt(row.deltas.delta_dw))
        cells.append(_fmt(row.deltas.delta_wm))
        cells.append(_fmt(row.annual_throughput))
        writer.writerow(cells)
    return out.getvalue()


def emit_repo_csv(bundle: ReportBundle, sink: IO[str]) -> None:
    """Write the per-repo CSV (LF line endings, UTF-8 text sink)."""
    sink.write(render_repo_csv(bundle))


def _empty_delta_stats() -> DeltaStats:
    return DeltaStats(
        n_considered=0,
        n_improved=0,
        n_degraded=0,
        n_unchanged=0,
        mean_change=None,
        median_change=None,
        max_improvement=0.0,
        max_degradation=0.0,
    )


def render_cohort_markdown(bundle: ReportBundle) -> str:
    cohort = bundle.cohort
    profile_counts = (
        cohort.profile_counts
        if cohort is not None
        else {"ALL_THREE": 0, "WEEKLY_MONTHLY": 0, "MONTHLY_ONLY": 0, "UNSTABLE": 0}
    )
    deltas = cohort.delta_stats if cohort is not None else _empty_delta_stats()
    spearman = cohort.spearman_weekly_monthly_cv if cohort is not None else None

    lines = [
        "# Commit stability report",
        "",
        f"- Tool version: {bundle.tool_version}",
        f"- Generated at (UTC epoch): {bundle.generated_at_utc}",
        f"- Repositories: {cohort.n_repos if cohort is not None else 0}",
        f"- Span: {bundle.config.span_length_days:g} days ending at epoch {bundle.config.span_end_utc}",
        f"- CV stability corridor: [0, {bundle.config.alpha_c:g}]",
        f"- Normalizer target/tolerance: {bundle.config.phi_target:g}/{bundle.config.phi_tolerance:g}",
        f"- Spearman (weekly vs monthly CV): {_fmt(spearman) or 'undefined'}",
        "",
        "## Stability profiles",
        "",
        "| Profile | Repositories |",
        "| --- | ---: |",
    ]
    for label, count in profile_counts.items():
        lines.append(f"| {label} | {count} |")
    lines += [
        "",
        "## Stable share by granularity",
        "",
        "| Granularity | Stable share |",
        "| --- | ---: |",
        f"| daily | {_fmt(cohort.pct_daily_stable if cohort else 0.0)} |",
        f"| weekly | {_fmt(cohort.pct_weekly_stable if cohort else 0.0)} |",
        f"| monthly | {_fmt(cohort.pct_monthly_stable if cohort else 0.0)} |",
        "",
        "## Weekly to monthly score evolution (weekly-stable repositories)",
        "",
        "| Metric | Value |",
        "| --- | ---: |",
    ]
    if deltas.n_considered == 0:
        lines.append("| Considered (weekly-stable) | n=0 |")
    else:
        lines += [
            f"| Considered (weekly-stable) | {deltas.n_considered} |",
            f"| Improved (delta > 0) | {deltas.n_improved} |",
            f"| Degraded (delta < 0) | {deltas.n_degraded} |",
            f"| Unchanged | {deltas.n_unchanged} |",
            f"| Mean change | {_fmt(deltas.mean_change)} |",
            f"| Median change | {_fmt(deltas.median_change)} |",
            f"| Largest improvement | {_fmt(deltas.max_improvement)} |",
            f"| Largest degradation | {_fmt(deltas.max_degradation)} |",
        ]
    if bundle.domain_rollups is not None:
        lines += [
            "",
            "## Domain rollups (monthly granularity)",
            "",
            "| Domain | Repositories | Monthly-stable | Mean monthly score |",
            "| --- | ---: | ---: | ---: |",
        ]
        for rollup in bundle.domain_rollups:
            lines.append(
                f"| {rollup.domain_tag} | {rollup.n_repos} | "
                f"{rollup.n_monthly_stable} | {_fmt(rollup.mean_monthly_phi)} |"
            )
    return "\n".join(lines) + "\n"


def emit_cohort_markdown(bundle: ReportBundle, sink: IO[str]) -> None:
    """Write the cohort markdown tables (deterministic for equal bundles)."""
    sink.write(render_cohort_markdown(bundle))


def _assessment_to_json(assessment: GranularityAssessment) -> dict:
    return {
        "mean": assessment.mean,
        "std_dev": assessment.std_dev,
        "cv": assessment.cv,
        "stable": assessment.stable,
        "phi": assessment.phi,
        "degenerate": assessment.degenerate,
    }


def _row_to_json(row: RepoAssessment) -> dict:
    return {
        "repo": row.repo_id,
        "daily": _assessment_to_json(row.daily),
        "weekly": _assessment_to_json(row.weekly),
        "monthly": _assessment_to_json(row.monthly),
        "profile": row.profile.display(),
        "stable_set": [g.name.lower() for g in Granularity if g in row.profile.stable_set],
        "delta_dw": row.deltas.delta_dw,
        "delta_wm": row.deltas.delta_wm,
        "annual_commits": row.annual_throughput,
    }


def render_report_json(bundle: ReportBundle) -> str:
    cohort_json = None
    if bundle.cohort is not None:
        c = bundle.cohort
        cohort_json = {
            "n_repos": c.n_repos,
            "profile_counts": c.profile_counts,
            "pct_daily_stable": c.pct_daily_stable,
            "pct_weekly_stable": c.pct_weekly_stable,
            "pct_monthly_stable": c.pct_monthly_stable,
            "delta_stats": {
                "n_considered": c.delta_stats.n_considered,
                "n_improved": c.delta_stats.n_improved,
                "n_degraded": c.delta_stats.n_degraded,
                "n_unchanged": c.delta_stats.n_unchanged,
                "mean_change": c.delta_stats.mean_change,
                "median_change": c.delta_stats.median_change,
                "max_improvement": c.delta_stats.max_improvement,
                "max_degradation": c.delta_stats.max_degradation,
            },
            "spearman_weekly_monthly_cv": c.spearman_weekly_monthly_cv,
        }
    domains_json = None
    if bundle.domain_rollups is not None:
        domains_json = [
            {
                "domain": r.domain_tag,
                "n_repos": r.n_repos,
                "n_monthly_stable": r.n_monthly_stable,
                "mean_monthly_phi": r.mean_monthly_phi,
            }
            for r in bundle.domain_rollups
        ]
    payload = {
        "schema_version": SCHEMA_VERSION,
        "tool_version": bundle.tool_version,
        "generated_at_utc": bundle.generated_at_utc,
        "config": {
            "span_end_utc": bundle.config.span_end_utc,
            "span_length_days": bundle.config.span_length_days,
            "exclude_merges": bundle.config.exclude_merges,
            "exclude_bots": bundle.config.exclude_bots,
            "bot_pattern": bundle.config.bot_pattern,
            "alpha_c": bundle.config.alpha_c,
            "phi_target": bundle.config.phi_target,
            "phi_tolerance": bundle.config.phi_tolerance,
        },
        "repos": [_row_to_json(row) for row in bundle.per_repo_rows],
        "cohort": cohort_json,
        "domains": domains_json,
    }
    return json.dumps(payload, indent=2, ensure_ascii=False) + "\n"


def emit_json(bundle: ReportBundle, sink: IO[str]) -> None:
    """Write the full-precision JSON report (stable key order)."""
    sink.write(render_report_json(bundle))


def _assessment_from_json(data: dict, granularity: Granularity) -> GranularityAssessment:
    return GranularityAssessment(
        granularity=granularity,
        mean=data["mean"],
        std_dev=data["std_dev"],
        cv=data["cv"],
        stable=data["stable"],
        phi=data["phi"],
        degenerate=data["degenerate"],
    )


def _row_from_json(data: dict) -> RepoAssessment:
    daily = _assessment_from_json(data["daily"], Granularity.DAILY)
    weekly = _assessment_from_json(data["weekly"], Granularity.WEEKLY)
    monthly = _assessment_from_json(data["monthly"], Granularity.MONTHLY)
    return RepoAssessment(
        repo_id=data["repo"],
        daily=daily,
        weekly=weekly,
        monthly=monthly,
        profile=derive_profile(daily.stable, weekly.stable, monthly.stable),
        deltas=DeltaPair(delta_dw=data["delta_dw"], delta_wm=data["delta_wm"]),
        annual_throughput=data["annual_commits"],
    )


def parse_report_json(text: str) -> ReportBundle:
    """Rebuild a bundle from a serialized JSON report.

    Numeric fields round-trip exactly; the cohort block is recomputed
    from the rows (it is a pure projection of them).
    """
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(f"invalid report JSON ({exc.msg})") from None
    if not isinstance(data, dict) or data.get("schema_version") != SCHEMA_VERSION:
        raise ParseError(f"unsupported report schema (expected version {SCHEMA_VERSION!r})")
    try:
        config = ConfigEcho(
            span_end_utc=data["config"]["span_end_utc"],
            span_length_days=data["config"]["span_length_days"],
            exclude_merges=data["config"]["exclude_merges"],
            exclude_bots=data["config"]["exclude_bots"],
            bot_pattern=data["config"]["bot_pattern"],
            alpha_c=data["config"]["alpha_c"],
            phi_target=data["config"]["phi_target"],
            phi_tolerance=data["config"]["phi_tolerance"],
        )
        rows = tuple(_row_from_json(r) for r in data["repos"])
        domains = data.get("domains")
        rollups = (
            tuple(
                DomainRollup(
                    domain_tag=d["domain"],
                    n_repos=d["n_repos"],
                    n_monthly_stable=d["n_monthly_stable"],
                    mean_monthly_phi=d["mean_monthly_phi"],
                )
                for d in domains
            )
            if domains is not None
            else None
        )
    except (KeyError, TypeError) as exc:
        raise ParseError(f"malformed report JSON: missing or invalid field ({exc})") from None
    return ReportBundle(
        per_repo_rows=rows,
        cohort=summarize(rows) if rows else None,
        config=config,
        generated_at_utc=data["generated_at_utc"],
        tool_version=data["tool_version"],
        domain_rollups=rollups,
    )
