"""Command-line client for the commit-pulse service.

Every command talks HTTP to the service. By default the app is mounted
in-process (no daemon needed); ``--server`` points at a running
instance instead. Exit codes are a total function of the failure class:

    0  success
    1  local I/O failure (missing input, unwritable output)
    2  parse/contract failure (bad commit export, bad manifest, empty cohort)
    3  degenerate span (including --span-days below 30)
    4  remote failure (unknown repo, network, rate-limit budget)
    5  remote authentication failure
"""

from __future__ import annotations

import asyncio
import json
import os
import sys
import tempfile
from datetime import datetime, timezone
from pathlib import Path

import click
import httpx

from commit_pulse import __version__

EXIT_IO = 1
EXIT_PARSE = 2
EXIT_SPAN = 3
EXIT_REMOTE = 4
EXIT_AUTH = 5

_EXIT_BY_CODE = {
    "parse_error": EXIT_PARSE,
    "contract_violation": EXIT_PARSE,
    "empty_cohort": EXIT_PARSE,
    "empty_series": EXIT_PARSE,
    "invalid_metadata": EXIT_PARSE,
    "invalid_request": EXIT_PARSE,
    "degenerate_span": EXIT_SPAN,
    "unknown_repo": EXIT_REMOTE,
    "remote_error": EXIT_REMOTE,
    "budget_exceeded": EXIT_REMOTE,
    "auth_error": EXIT_AUTH,
}

_FORMAT_EXT = {"csv": ".csv", "json": ".json", "md": ".md"}
_FORMAT_KEY = {"csv": "csv", "json": "json_report", "md": "markdown"}

MIN_SPAN_DAYS = 30


class ServiceError(Exception):
    """Error response from the service, carrying its stable code."""

    def __init__(self, code: str, message: str):
        self.code = code
        super().__init__(message)


class ServiceClient:
    """Minimal JSON-over-HTTP client; in-process ASGI when no server is set."""

    def __init__(self, server: str | None = None):
        self._server = server

    def post(self, path: str, payload: dict) -> dict:
        return asyncio.run(self._post(path, payload))

    async def _post(self, path: str, payload: dict) -> dict:
        if self._server is None:
            from commit_pulse.service.app import create_app

            transport = httpx.ASGITransport(app=create_app())
            async with httpx.AsyncClient(
                transport=transport, base_url="http://commit-pulse.internal", timeout=300.0
            ) as client:
                response = await client.post(path, json=payload)
        else:
            async with httpx.AsyncClient(base_url=self._server, timeout=300.0) as client:
                response = await client.post(path, json=payload)
        if response.status_code >= 400:
            raise ServiceError(*_error_parts(response))
        return response.json()


def _error_parts(response: httpx.Response) -> tuple[str, str]:
    try:
        body = response.json()
    except ValueError:
        return ("remote_error", f"HTTP {response.status_code}")
    if isinstance(body, dict) and isinstance(body.get("error"), dict):
        error = body["error"]
        return (str(error.get("code", "error")), str(error.get("message", "")))
    # FastAPI request-validation failure ({"detail": [...]}).
    return ("invalid_request", json.dumps(body.get("detail", body)))


def _fail(exit_code: int, message: str) -> None:
    click.echo(f"error: {message}", err=True)
    sys.exit(exit_code)


def _call(client: ServiceClient, path: str, payload: dict) -> dict:
    try:
        return client.post(path, payload)
    except ServiceError as exc:
        _fail(_EXIT_BY_CODE.get(exc.code, EXIT_IO), str(exc))
    except httpx.TransportError as exc:
        _fail(EXIT_REMOTE, f"cannot reach service: {exc}")
    raise AssertionError("unreachable")


def _read_text(path: Path) -> str:
    if not path.exists():
        _fail(EXIT_IO, f"no such file: {path}")
    try:
        return path.read_text(encoding="utf-8")
    except OSError as exc:
        _fail(EXIT_IO, f"cannot read {path}: {exc}")
    raise AssertionError("unreachable")


def _write_atomic(path: Path, text: str) -> None:
    """Write via temp file + rename so a crash never leaves a truncated file."""
    try:
        path.parent.mkdir(parents=True, exist_ok=True)
        fd, tmp_name = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.", suffix=".tmp")
        try:
            with os.fdopen(fd, "w", encoding="utf-8", newline="") as handle:
                handle.write(text)
            os.replace(tmp_name, path)
        except BaseException:
            if os.path.exists(tmp_name):
                os.unlink(tmp_name)
            raise
    except OSError as exc:
        _fail(EXIT_IO, f"cannot write {path}: {exc}")


def _parse_span_end(value: str | None) -> int:
    """Epoch seconds from an epoch string or ISO-8601 date/datetime.

    Defaults to midnight UTC of the invocation day, so repeated same-day
    runs are reproducible.
    """
    if value is None:
        today = datetime.now(timezone.utc).replace(hour=0, minute=0, second=0, microsecond=0)
        return int(today.timestamp())
    text = value.strip()
    if text.lstrip("+-").isdigit():
        return int(text)
    try:
        moment = datetime.fromisoformat(text.replace("Z", "+00:00"))
    except ValueError:
        _fail(EXIT_PARSE, f"unparseable --span-end {value!r} (use epoch seconds or ISO-8601)")
        raise AssertionError("unreachable")
    if moment.tzinfo is None:
        moment = moment.replace(tzinfo=timezone.utc)
    return int(moment.timestamp())


def _check_span_days(span_days: int) -> None:
    if span_days < MIN_SPAN_DAYS:
        _fail(EXIT_SPAN, f"--span-days must be >= {MIN_SPAN_DAYS}, got {span_days}")


def _generated_at() -> int | None:
    # SOURCE_DATE_EPOCH pins report timestamps for reproducible output.
    raw = os.environ.get("SOURCE_DATE_EPOCH")
    return int(raw) if raw else None


def _infer_format(path: str) -> str:
    suffix = Path(path).suffix.lower()
    if suffix in (".jsonl", ".ndjson"):
        return "jsonl"
    if suffix in (".log", ".gitlog", ".txt"):
        return "gitlog"
    return "jsonl"


@click.group()
@click.version_option(__version__)
@click.option(
    "--server",
    envvar="COMMIT_PULSE_SERVER",
    default=None,
    help="Base URL of a running commit-pulse service; default runs in-process.",
)
@click.pass_context
def main(ctx: click.Context, server: str | None) -> None:
    """Commit-rhythm stability analytics."""
    ctx.obj = ServiceClient(server)


@main.command()
@click.option("--input", "input_path", required=True, type=click.Path(path_type=Path))
@click.option("--repo", default=None, help="Repository id; defaults to the input file stem.")
@click.option(
    "--input-format",
    type=click.Choice(["jsonl", "gitlog"]),
    default=None,
    help="Input format; inferred from the file suffix when omitted.",
)
@click.option("--span-end", default=None, help="Span end (epoch or ISO-8601); default: today 00:00 UTC.")
@click.option("--span-days", type=int, default=1826, show_default=True)
@click.option("--exclude-merges", is_flag=True)
@click.option("--exclude-bots", is_flag=True)
@click.option("--format", "out_format", type=click.Choice(["csv", "json", "md"]), default="json", show_default=True)
@click.option("--out", type=click.Path(path_type=Path), default=None, help="Report path; default report.<format>.")
@click.pass_obj
def analyze(
    client: ServiceClient,
    input_path: Path,
    repo: str | None,
    input_format: str | None,
    span_end: str | None,
    span_days: int,
    exclude_merges: bool,
    exclude_bots: bool,
    out_format: str,
    out: Path | None,
) -> None:
    """Assess a single repository from a local commit export."""
    _check_span_days(span_days)
    content = _read_text(input_path)
    repo = repo or input_path.stem
    payload = {
        "repo": repo,
        "content": content,
        "format": input_format or _infer_format(str(input_path)),
        "span": {"end_utc": _parse_span_end(span_end), "length_days": span_days},
        "filters": {"exclude_merges": exclude_merges, "exclude_bots": exclude_bots},
        "generated_at_utc": _generated_at(),
    }
    response = _call(client, "/v1/analyze", payload)
    row = response["row"]
    click.echo(
        f"{repo}: profile={row['profile']} "
        f"phi_daily={row['daily']['phi']:.6f} "
        f"phi_weekly={row['weekly']['phi']:.6f} "
        f"phi_monthly={row['monthly']['phi']:.6f}"
    )
    out = out or Path(f"report{_FORMAT_EXT[out_format]}")
    _write_atomic(out, response["reports"][_FORMAT_KEY[out_format]])
    click.echo(f"wrote {out}")


def _load_manifest(manifest_path: Path) -> list[dict]:
    entries = []
    text = _read_text(manifest_path)
    for line_no, line in enumerate(text.splitlines(), start=1):
        if not line.strip():
            continue
        try:
            entry = json.loads(line)
        except json.JSONDecodeError as exc:
            _fail(EXIT_PARSE, f"{manifest_path}:{line_no}: invalid manifest JSON ({exc.msg})")
        if not isinstance(entry, dict) or "repo" not in entry or "commits_path" not in entry:
            _fail(EXIT_PARSE, f"{manifest_path}:{line_no}: manifest entries need repo and commits_path")
        entries.append(entry)
    if not entries:
        _fail(EXIT_PARSE, f"{manifest_path}: empty manifest")
    return entries


@main.command()
@click.option("--manifest", "manifest_path", required=True, type=click.Path(path_type=Path))
@click.option("--span-end", default=None)
@click.option("--span-days", type=int, default=1826, show_default=True)
@click.option("--exclude-merges", is_flag=True)
@click.option("--exclude-bots", is_flag=True)
@click.option("--out", "out_dir", type=click.Path(path_type=Path), default=Path("reports"), show_default=True)
@click.option("--jobs", type=int, default=None, help="Parallel assessment workers; default: available CPUs.")
@click.pass_obj
def batch(
    client: ServiceClient,
    manifest_path: Path,
    span_end: str | None,
    span_days: int,
    exclude_merges: bool,
    exclude_bots: bool,
    out_dir: Path,
    jobs: int | None,
) -> None:
    """Assess every repository in a manifest and emit cohort reports.

    The manifest is JSONL: {"repo", "commits_path", "format"?, "metadata"?}
    with paths resolved relative to the manifest file. Repositories that
    fail to parse are reported and skipped; the run fails only if none
    succeed.
    """
    _check_span_days(span_days)
    entries = _load_manifest(manifest_path)
    base_dir = manifest_path.parent

    repos = []
    local_failures: list[tuple[str, str]] = []
    for entry in entries:
        commits_path = base_dir / entry["commits_path"]
        try:
            content = commits_path.read_text(encoding="utf-8")
        except OSError as exc:
            local_failures.append((entry["repo"], f"cannot read {commits_path}: {exc}"))
            continue
        repos.append(
            {
                "repo": entry["repo"],
                "content": content,
                "format": entry.get("format") or _infer_format(entry["commits_path"]),
                "metadata": entry.get("metadata"),
            }
        )
    if not repos:
        _fail(EXIT_PARSE, f"all {len(entries)} repositories failed to load")

    payload = {
        "repos": repos,
        "span": {"end_utc": _parse_span_end(span_end), "length_days": span_days},
        "filters": {"exclude_merges": exclude_merges, "exclude_bots": exclude_bots},
        "generated_at_utc": _generated_at(),
        "jobs": jobs or os.cpu_count() or 1,
    }
    response = _call(client, "/v1/batch", payload)

    skipped = local_failures + [(s["repo"], s["message"]) for s in response["skipped"]]
    for repo, message in skipped:
        click.echo(f"warning: skipped {repo}: {message}", err=True)
    if not response["rows"]:
        _fail(EXIT_PARSE, f"all {len(entries)} repositories failed")

    out_dir = Path(out_dir)
    _write_atomic(out_dir / "repos.csv", response["reports"]["csv"])
    _write_atomic(out_dir / "cohort.md", response["reports"]["markdown"])
    _write_atomic(out_dir / "report.json", response["reports"]["json_report"])
    click.echo(
        f"assessed {len(response['rows'])} repositories"
        + (f", skipped {len(skipped)}" if skipped else "")
    )
    click.echo(f"wrote {out_dir / 'repos.csv'}, {out_dir / 'cohort.md'}, {out_dir / 'report.json'}")


@main.command()
@click.option("--repo", required=True, help="Repository id, e.g. owner/name.")
@click.option("--span-end", default=None)
@click.option("--span-days", type=int, default=1826, show_default=True)
@click.option("--out", type=click.Path(path_type=Path), default=None, help="Output JSONL; default <owner>-<name>.jsonl.")
@click.option("--api-base", default=None, help="Override the commit API base URL.")
@click.option("--page-size", type=int, default=100, show_default=True)
@click.pass_obj
def ingest(
    client: ServiceClient,
    repo: str,
    span_end: str | None,
    span_days: int,
    out: Path | None,
    api_base: str | None,
    page_size: int,
) -> None:
    """Fetch a repository's commits from the remote API into canonical JSONL.

    Reads the API token from COMMIT_PULSE_TOKEN. Re-running against an
    unchanged upstream overwrites the output atomically with identical
    bytes.
    """
    _check_span_days(span_days)
    payload = {
        "repo": repo,
        "span": {"end_utc": _parse_span_end(span_end), "length_days": span_days},
        "token": os.environ.get("COMMIT_PULSE_TOKEN"),
        "api_base": api_base,
        "page_size": page_size,
    }
    response = _call(client, "/v1/ingest", payload)
    out = out or Path(f"{repo.replace('/', '-')}.jsonl")
    _write_atomic(out, response["jsonl"])
    click.echo(f"{repo}: {response['n_records']} commits -> {out}")


@main.command()
@click.option("--input", "input_path", required=True, type=click.Path(path_type=Path), help="A report.json produced by batch or analyze.")
@click.option("--format", "out_format", type=click.Choice(["csv", "json", "md"]), default="md", show_default=True)
@click.option("--out", type=click.Path(path_type=Path), default=None, help="Output path; default: stdout.")
@click.pass_obj
def cohort(
    client: ServiceClient,
    input_path: Path,
    out_format: str,
    out: Path | None,
) -> None:
    """Re-aggregate and re-render cohort views from an existing JSON report."""
    response = _call(client, "/v1/cohort", {"report_json": _read_text(input_path)})
    rendered = response["reports"][_FORMAT_KEY[out_format]]
    if out is None:
        click.echo(rendered, nl=False)
    else:
        _write_atomic(out, rendered)
        click.echo(f"wrote {out}")


@main.command()
@click.option("--host", default="127.0.0.1", show_default=True)
@click.option("--port", type=int, default=8177, show_default=True)
def serve(host: str, port: int) -> None:
    """Run the commit-pulse HTTP service."""
    import uvicorn

    uvicorn.run("commit_pulse.service.app:app", host=host, port=port)


if __name__ == "__main__":
    main()
