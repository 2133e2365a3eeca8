"""Commit-history ingestion: parsers, filters, and the selection checker.

Two on-disk formats are supported:

* canonical commit JSONL - one object per line with keys ``repo``,
  ``hash``, ``timestamp`` (ISO-8601 with zone, or epoch seconds),
  ``author`` and optional ``is_merge``;
* git log export - one commit per line, fields separated by the unit
  separator 0x1F: ``<hash> <committer-date ISO-8601> <author-email>
  <parents>``, produced by
  ``git log --no-show-signature --pretty=format:%h%x1f%cI%x1f%ae%x1f%P``.
  The fourth field may be either the post-processed parent count or the
  raw space-separated parent hashes; both are accepted.

All timestamps are normalized to UTC epoch seconds at parse time.
"""

from __future__ import annotations

import calendar
import json
import re
from dataclasses import dataclass
from datetime import datetime
from typing import IO, Iterable, Iterator

from commit_pulse.errors import InvalidMetadataError, ParseError

_HEX_HASH_RE = re.compile(r"^[0-9a-fA-F]{7,}$")

# 10 years of 365.25 days, in seconds (leap-safe, deterministic).
DECADE_SECONDS = 315_576_000

MIN_STARS = 10_000
MIN_FORKS = 9_000


@dataclass(frozen=True)
class CommitRecord:
    """One commit event, immutable and safe to share across threads."""

    repo_id: str
    commit_hash: str
    timestamp_utc: int
    author_id: str
    is_merge: bool = False

    def __post_init__(self):
        if not self.repo_id:
            raise ValueError("repo_id must be non-empty")
        if not _HEX_HASH_RE.match(self.commit_hash):
            raise ValueError(f"commit_hash must be hex of length >= 7, got {self.commit_hash!r}")
        if self.timestamp_utc <= 0:
            raise ValueError(f"timestamp_utc must be positive, got {self.timestamp_utc}")

    @property
    def dedup_key(self) -> tuple[str, str]:
        # Hashes are case-insensitive hex; dedup must not care about case.
        return (self.repo_id, self.commit_hash.lower())


@dataclass(frozen=True)
class RepoMetadata:
    """Repository-level facts used by the selection checker.

    ``educational`` cannot be machine-decided and is user-asserted.
    """

    repo_id: str
    created_at_utc: int
    stars: int
    forks: int
    archived: bool = False
    educational: bool = False
    domain_tag: str | None = None

    def __post_init__(self):
        if self.created_at_utc <= 0:
            raise ValueError("created_at_utc must be positive")
        if self.stars < 0 or self.forks < 0:
            raise ValueError("stars and forks must be non-negative")


@dataclass(frozen=True)
class FilterOptions:
    """Record-level filters applied before bucketing.

    Merges and bot authors are kept by default; both materially change
    the coefficient of variation, so the flags exist for sensitivity
    runs. ``bot_pattern`` is a plain substring match on the author id.
    Span bounds are half-open ``[start, end)``; ``None`` means unbounded.
    """

    exclude_merges: bool = False
    exclude_bot_authors: bool = False
    bot_pattern: str = "[bot]"
    span_start_utc: int | None = None
    span_end_utc: int | None = None

    def __post_init__(self):
        if (
            self.span_start_utc is not None
            and self.span_end_utc is not None
            and self.span_start_utc >= self.span_end_utc
        ):
            raise ValueError("span_start_utc must be < span_end_utc")


@dataclass(frozen=True)
class EligibilityReport:
    """Outcome of the five selection criteria for one repository."""

    repo_id: str
    age_ok: bool
    stars_ok: bool
    forks_ok: bool
    active_ok: bool
    dev_focus_ok: bool
    eligible: bool


def _iter_lines(source: str | bytes | IO[bytes] | IO[str]) -> Iterator[str]:
    if hasattr(source, "read"):
        source = source.read()
    if isinstance(source, bytes):
        source = source.decode("utf-8")
    yield from source.splitlines()


def _parse_timestamp(value: object, line_no: int) -> int:
    """Normalize an epoch int or zoned ISO-8601 string to UTC epoch seconds."""
    if isinstance(value, bool):
        raise ParseError("timestamp must be epoch seconds or ISO-8601", line=line_no, field="timestamp")
    if isinstance(value, int):
        return value
    if isinstance(value, str):
        text = value.strip()
        try:
            # Python 3.10 fromisoformat does not accept a trailing 'Z'.
            moment = datetime.fromisoformat(text.replace("Z", "+00:00"))
        except ValueError:
            raise ParseError(f"unparseable timestamp {text!r}", line=line_no, field="timestamp") from None
        if moment.tzinfo is None:
            raise ParseError(f"timestamp {text!r} lacks a UTC offset", line=line_no, field="timestamp")
        return calendar.timegm(moment.utctimetuple())
    raise ParseError(
        f"timestamp must be epoch seconds or ISO-8601, got {type(value).__name__}",
        line=line_no,
        field="timestamp",
    )


def parse_commit_jsonl(source: str | bytes | IO[bytes] | IO[str]) -> list[CommitRecord]:
    """Parse canonical commit JSONL into records.

    Records come back in input order; duplicate (repo, hash) lines are
    collapsed to the first occurrence. Malformed lines raise
    :class:`ParseError` carrying the 1-based line number.
    """
    records: list[CommitRecord] = []
    seen: set[tuple[str, str]] = set()
    for line_no, line in enumerate(_iter_lines(source), start=1):
        if not line.strip():
            continue
        try:
            obj = json.loads(line)
        except json.JSONDecodeError as exc:
            raise ParseError(f"invalid JSON ({exc.msg})", line=line_no) from None
        if not isinstance(obj, dict):
            raise ParseError("line is not a JSON object", line=line_no)
        for key in ("repo", "hash", "timestamp", "author"):
            if key not in obj:
                raise ParseError(f"missing key {key!r}", line=line_no, field=key)
        try:
            record = CommitRecord(
                repo_id=str(obj["repo"]),
                commit_hash=str(obj["hash"]),
                timestamp_utc=_parse_timestamp(obj["timestamp"], line_no),
                author_id=str(obj["author"]),
                is_merge=bool(obj.get("is_merge", False)),
            )
        except ValueError as exc:
            raise ParseError(str(exc), line=line_no) from None
        if record.dedup_key in seen:
            continue
        seen.add(record.dedup_key)
        records.append(record)
    return records


def _parent_count(text: str, line_no: int) -> int:
    """Decode the git-log parent field: a count, or raw parent hashes."""
    text = text.strip()
    if not text:
        return 0
    # A short digit run is a post-processed count; hashes are >= 7 chars.
    if text.isdigit() and len(text) < 7:
        return int(text)
    parents = text.split()
    if all(_HEX_HASH_RE.match(p) for p in parents):
        return len(parents)
    raise ParseError(f"unreadable parent field {text!r}", line=line_no, field="parents")


def parse_git_log(source: str | bytes | IO[bytes] | IO[str], repo_id: str) -> list[CommitRecord]:
    """Parse a 0x1F-delimited git log export for one repository.

    The committer date is used as the commit timestamp: it reflects when
    the work landed in the history, which is what rhythm bucketing
    measures. ``is_merge`` is true when the commit has >= 2 parents.
    """
    records: list[CommitRecord] = []
    seen: set[tuple[str, str]] = set()
    for line_no, line in enumerate(_iter_lines(source), start=1):
        if not line.strip():
            continue
        fields = line.split("\x1f")
        if len(fields) != 4:
            raise ParseError(f"expected 4 fields, got {len(fields)}", line=line_no)
        commit_hash, committer_date, author_email, parent_field = fields
        try:
            record = CommitRecord(
                repo_id=repo_id,
                commit_hash=commit_hash.strip(),
                timestamp_utc=_parse_timestamp(committer_date.strip(), line_no),
                author_id=author_email.strip(),
                is_merge=_parent_count(parent_field, line_no) >= 2,
            )
        except ValueError as exc:
            raise ParseError(str(exc), line=line_no) from None
        if record.dedup_key in seen:
            continue
        seen.add(record.dedup_key)
        records.append(record)
    return records


def write_commit_jsonl(records: Iterable[CommitRecord], sink: IO[str]) -> None:
    """Serialize records to canonical commit JSONL (epoch timestamps, LF)."""
    for record in records:
        obj = {
            "repo": record.repo_id,
            "hash": record.commit_hash,
            "timestamp": record.timestamp_utc,
            "author": record.author_id,
            "is_merge": record.is_merge,
        }
        sink.write(json.dumps(obj, separators=(",", ":"), ensure_ascii=False))
        sink.write("\n")


def filter_commits(records: Iterable[CommitRecord], options: FilterOptions) -> list[CommitRecord]:
    """Apply span/merge/bot filters, preserving input order.

    Idempotent: filtering an already-filtered list with the same options
    is a no-op.
    """
    out: list[CommitRecord] = []
    for record in records:
        if options.span_start_utc is not None and record.timestamp_utc < options.span_start_utc:
            continue
        if options.span_end_utc is not None and record.timestamp_utc >= options.span_end_utc:
            continue
        if options.exclude_merges and record.is_merge:
            continue
        if options.exclude_bot_authors and options.bot_pattern in record.author_id:
            continue
        out.append(record)
    return out


def check_selection_criteria(metadata: RepoMetadata, now_utc: int) -> EligibilityReport:
    """Evaluate the five dataset-selection criteria for one repository.

    age >= a decade (365.25-day years), stars strictly > 10,000, forks
    strictly > 9,000, not archived, not educational. ``eligible`` is the
    conjunction of all five flags.
    """
    if now_utc <= metadata.created_at_utc:
        raise InvalidMetadataError(
            f"now_utc ({now_utc}) must be after created_at_utc ({metadata.created_at_utc})"
        )
    age_ok = (now_utc - metadata.created_at_utc) >= DECADE_SECONDS
    stars_ok = metadata.stars > MIN_STARS
    forks_ok = metadata.forks > MIN_FORKS
    active_ok = not metadata.archived
    dev_focus_ok = not metadata.educational
    return EligibilityReport(
        repo_id=metadata.repo_id,
        age_ok=age_ok,
        stars_ok=stars_ok,
        forks_ok=forks_ok,
        active_ok=active_ok,
        dev_focus_ok=dev_focus_ok,
        eligible=age_ok and stars_ok and forks_ok and active_ok and dev_focus_ok,
    )
