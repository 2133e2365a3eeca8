#!/usr/bin/env python3
"""Regenerate the bundled 3-repo batch fixture under tests/fixtures/batch/.

Deterministic (seeded); run from the repository root:

    python scripts/make_fixtures.py

The three repositories are engineered to land on different stability
profiles: a clockwork repo (stable everywhere), a weekday-cadence repo
(weekly/monthly stable, daily not), and a bursty repo (unstable
throughout). After regenerating fixtures, regenerate the goldens too
(see README).
"""

from __future__ import annotations

import json
import random
from datetime import datetime, timezone
from pathlib import Path

SPAN_END = 1_735_689_600  # 2025-01-01T00:00:00Z
SPAN_DAYS = 210
DAY = 86_400
START = SPAN_END - SPAN_DAYS * DAY

FIXTURE_DIR = Path(__file__).resolve().parent.parent / "tests" / "fixtures" / "batch"


def iso(ts: int, offset: str = "Z") -> str:
    if offset == "Z":
        return datetime.fromtimestamp(ts, tz=timezone.utc).strftime("%Y-%m-%dT%H:%M:%SZ")
    sign = 1 if offset.startswith("+") else -1
    hours, minutes = int(offset[1:3]), int(offset[4:6])
    shift = sign * (hours * 3600 + minutes * 60)
    local = datetime.fromtimestamp(ts + shift, tz=timezone.utc)
    return local.strftime("%Y-%m-%dT%H:%M:%S") + offset


def clockwork_lines() -> list[str]:
    """2-4 commits per day: tight daily rhythm, stable at every granularity."""
    rng = random.Random(101)
    lines = []
    serial = 0
    for day in range(SPAN_DAYS):
        for _ in range(rng.choice((2, 3, 4))):
            serial += 1
            ts = START + day * DAY + rng.randrange(8 * 3600, 20 * 3600)
            author = "release[bot]" if rng.random() < 0.08 else f"dev{rng.randrange(4)}@example.com"
            obj = {
                "repo": "demo/clockwork",
                "hash": f"c{serial:06x}",
                "timestamp": ts,
                "author": author,
            }
            if rng.random() < 0.10:
                obj["is_merge"] = True
            lines.append(json.dumps(obj, separators=(",", ":")))
    # One duplicated line: ingest must collapse it.
    lines.append(lines[17])
    return lines


def weekday_lines() -> list[str]:
    """Weekday-only commits: bursty day-to-day, steady week-to-week."""
    rng = random.Random(202)
    offsets = ["+02:00", "-05:00", "Z", "+09:00"]
    lines = []
    serial = 0
    for day in range(SPAN_DAYS):
        weekday = day % 7
        if weekday < 2:  # two quiet days per cycle
            continue
        for _ in range(4 + rng.randrange(0, 3)):
            serial += 1
            ts = START + day * DAY + rng.randrange(7 * 3600, 19 * 3600)
            parent = "2" if rng.random() < 0.12 else "1"
            lines.append(
                f"a{serial:06x}\x1f{iso(ts, rng.choice(offsets))}\x1f"
                f"dev{rng.randrange(5)}@example.com\x1f{parent}"
            )
    # Exercise the lenient parent-field forms: raw hashes and a root commit.
    ts = START + 3 * DAY + 10 * 3600
    lines.append(f"afff001\x1f{iso(ts)}\x1fdev0@example.com\x1fabc1234 def5678")
    lines.append(f"afff002\x1f{iso(ts + 60)}\x1fdev0@example.com\x1f0")
    # And a duplicated hash line.
    lines.append(lines[0])
    return lines


def bursty_lines() -> list[str]:
    """Rare intense bursts separated by silence: unstable at every scale."""
    rng = random.Random(303)
    lines = []
    serial = 0
    day = 4
    while day < SPAN_DAYS:
        burst_days = rng.randrange(1, 4)
        intensity = rng.choice((15, 20, 45, 90))
        for b in range(burst_days):
            if day + b >= SPAN_DAYS:
                break
            for _ in range(max(1, intensity + rng.randrange(-5, 6))):
                serial += 1
                ts = START + (day + b) * DAY + rng.randrange(0, DAY)
                lines.append(
                    json.dumps(
                        {
                            "repo": "demo/bursty",
                            "hash": f"b{serial:06x}",
                            "timestamp": iso(ts),
                            "author": "solo@example.com",
                        },
                        separators=(",", ":"),
                    )
                )
        day += burst_days + rng.randrange(18, 55)
    return lines


def main() -> None:
    FIXTURE_DIR.mkdir(parents=True, exist_ok=True)
    (FIXTURE_DIR / "clockwork.jsonl").write_text("\n".join(clockwork_lines()) + "\n")
    (FIXTURE_DIR / "weekday.log").write_text("\n".join(weekday_lines()) + "\n")
    (FIXTURE_DIR / "bursty.jsonl").write_text("\n".join(bursty_lines()) + "\n")

    manifest = [
        {
            "repo": "demo/clockwork",
            "commits_path": "clockwork.jsonl",
            "metadata": {
                "created_at_utc": 1_275_350_400,  # 2010-06-01
                "stars": 25_000,
                "forks": 11_000,
                "domain_tag": "systems",
            },
        },
        {
            "repo": "demo/weekday",
            "commits_path": "weekday.log",
            "format": "gitlog",
            "metadata": {
                "created_at_utc": 1_370_044_800,  # 2013-06-01
                "stars": 12_000,
                "forks": 9_500,
                "domain_tag": "web",
            },
        },
        {
            "repo": "demo/bursty",
            "commits_path": "bursty.jsonl",
            "metadata": {
                "created_at_utc": 1_433_116_800,  # 2015-06-01
                "stars": 30_000,
                "forks": 15_000,
            },
        },
    ]
    with open(FIXTURE_DIR / "manifest.jsonl", "w") as handle:
        for entry in manifest:
            handle.write(json.dumps(entry, separators=(",", ":")) + "\n")

    # Print the resulting assessments for eyeballing.
    from commit_pulse.ingest import parse_commit_jsonl, parse_git_log
    from commit_pulse.series import AnalysisSpan
    from commit_pulse.stability import assess_repo

    span = AnalysisSpan(end_utc=SPAN_END, length_days=SPAN_DAYS)
    for name, path, fmt in (
        ("demo/clockwork", "clockwork.jsonl", "jsonl"),
        ("demo/weekday", "weekday.log", "gitlog"),
        ("demo/bursty", "bursty.jsonl", "jsonl"),
    ):
        text = (FIXTURE_DIR / path).read_text()
        records = (
            parse_git_log(text, name) if fmt == "gitlog" else parse_commit_jsonl(text)
        )
        result = assess_repo(name, records, span)
        print(
            f"{name}: n={len(records)} profile={result.profile.display()} "
            f"cv_d={result.daily.cv:.4f} cv_w={result.weekly.cv:.4f} "
            f"cv_m={result.monthly.cv:.4f} "
            f"phi=({result.daily.phi:.3f},{result.weekly.phi:.3f},{result.monthly.phi:.3f})"
        )


if __name__ == "__main__":
    main()
