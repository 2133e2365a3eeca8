"""Remote commit acquisition from a GitHub-style REST API.

Pages through ``/repos/{repo}/commits`` until exhaustion, retries
transient failures with exponential backoff, and honors rate-limit
headers by sleeping until the advertised reset. All rate-limit waits
draw from a process-wide wall-clock budget so concurrent fetchers can
never overrun it together.
"""

from __future__ import annotations

import threading
import time
from datetime import datetime, timezone
from typing import Callable

import httpx

from commit_pulse.errors import (
    AuthError,
    BudgetExceededError,
    RemoteError,
    UnknownRepoError,
)
from commit_pulse.ingest import CommitRecord
from commit_pulse.series import AnalysisSpan

DEFAULT_API_BASE = "https://api.github.com"
DEFAULT_PAGE_SIZE = 100
DEFAULT_MAX_RETRIES = 3
DEFAULT_BUDGET_SECONDS = 300.0


class RateLimitBudget:
    """Serialized wall-clock budget for rate-limit waits.

    ``reserve`` atomically debits the budget before any sleep happens,
    so parallel callers never observe interleaved corruption and the
    total time spent waiting on rate limits stays bounded.
    """

    def __init__(self, max_wait_seconds: float = DEFAULT_BUDGET_SECONDS):
        self._lock = threading.Lock()
        self._remaining = max_wait_seconds

    def reserve(self, seconds: float) -> None:
        with self._lock:
            if seconds > self._remaining:
                raise BudgetExceededError(
                    f"rate-limit wait of {seconds:.1f}s exceeds the remaining "
                    f"budget of {self._remaining:.1f}s"
                )
            self._remaining -= seconds

    @property
    def remaining(self) -> float:
        with self._lock:
            return self._remaining


_process_budget = RateLimitBudget()


def _iso_utc(epoch: int) -> str:
    return datetime.fromtimestamp(epoch, tz=timezone.utc).strftime("%Y-%m-%dT%H:%M:%SZ")


def _rate_limit_wait(response: httpx.Response, now: float) -> float | None:
    """Seconds to wait if the response is a rate-limit rejection, else None."""
    if response.status_code == 429:
        return float(response.headers.get("Retry-After", "1"))
    if response.status_code == 403 and response.headers.get("X-RateLimit-Remaining") == "0":
        reset = float(response.headers.get("X-RateLimit-Reset", now))
        return max(reset - now, 0.0) + 1.0
    return None


def _record_from_api(repo_id: str, item: dict) -> CommitRecord:
    commit = item.get("commit") or {}
    committer = commit.get("committer") or {}
    date = committer.get("date")
    if date is None:
        raise RemoteError(f"commit object for {repo_id} lacks a committer date")
    moment = datetime.fromisoformat(str(date).replace("Z", "+00:00"))
    author = (commit.get("author") or {}).get("email") or (item.get("author") or {}).get(
        "login"
    ) or "unknown"
    return CommitRecord(
        repo_id=repo_id,
        commit_hash=item["sha"],
        timestamp_utc=int(moment.timestamp()),
        author_id=author,
        is_merge=len(item.get("parents") or []) >= 2,
    )


def fetch_commits_remote(
    repo_id: str,
    span: AnalysisSpan,
    token: str | None = None,
    *,
    api_base: str = DEFAULT_API_BASE,
    page_size: int = DEFAULT_PAGE_SIZE,
    max_retries: int = DEFAULT_MAX_RETRIES,
    budget: RateLimitBudget | None = None,
    transport: httpx.BaseTransport | None = None,
    sleep: Callable[[float], None] = time.sleep,
    now: Callable[[], float] = time.time,
) -> list[CommitRecord]:
    """Fetch every commit whose committer date lies in ``[start, end)``.

    Without a token the unauthenticated rate limits apply. Raises
    :class:`UnknownRepoError` on 404, :class:`AuthError` on 401/403
    outside rate limiting, :class:`BudgetExceededError` when rate-limit
    waits would overrun the budget, and :class:`RemoteError` when
    retries are exhausted.

    ``transport``, ``sleep`` and ``now`` exist for injection; production
    callers use the defaults.
    """
    if budget is None:
        budget = _process_budget
    headers = {"Accept": "application/vnd.github+json"}
    if token:
        headers["Authorization"] = f"Bearer {token}"
    params_base = {
        "since": _iso_utc(span.start_utc),
        "until": _iso_utc(span.end_utc),
        "per_page": str(page_size),
    }

    records: list[CommitRecord] = []
    seen: set[tuple[str, str]] = set()
    with httpx.Client(base_url=api_base, headers=headers, timeout=30.0, transport=transport) as client:
        page = 1
        while True:
            items = _fetch_page(
                client,
                repo_id,
                dict(params_base, page=str(page)),
                max_retries=max_retries,
                budget=budget,
                sleep=sleep,
                now=now,
            )
            for item in items:
                record = _record_from_api(repo_id, item)
                # The API's until bound is inclusive; our span is half-open.
                if not span.contains(record.timestamp_utc):
                    continue
                if record.dedup_key in seen:
                    continue
                seen.add(record.dedup_key)
                records.append(record)
            if len(items) < page_size:
                break
            page += 1
    return records


def _fetch_page(
    client: httpx.Client,
    repo_id: str,
    params: dict,
    *,
    max_retries: int,
    budget: RateLimitBudget,
    sleep: Callable[[float], None],
    now: Callable[[], float],
) -> list:
    attempt = 0
    while True:
        try:
            response = client.get(f"/repos/{repo_id}/commits", params=params)
        except httpx.TransportError as exc:
            attempt += 1
            if attempt > max_retries:
                raise RemoteError(f"network failure fetching {repo_id}: {exc}") from exc
            sleep(2 ** (attempt - 1))
            continue

        if response.status_code == 200:
            body = response.json()
            if not isinstance(body, list):
                raise RemoteError(f"unexpected response shape for {repo_id}")
            return body
        if response.status_code == 404:
            raise UnknownRepoError(f"unknown repository: {repo_id}")

        wait = _rate_limit_wait(response, now())
        if wait is not None:
            budget.reserve(wait)
            sleep(wait)
            continue
        if response.status_code in (401, 403):
            raise AuthError(f"authentication rejected for {repo_id} (HTTP {response.status_code})")
        if response.status_code >= 500:
            attempt += 1
            if attempt > max_retries:
                raise RemoteError(
                    f"server error fetching {repo_id} (HTTP {response.status_code})"
                )
            sleep(2 ** (attempt - 1))
            continue
        raise RemoteError(f"unexpected HTTP {response.status_code} fetching {repo_id}")
