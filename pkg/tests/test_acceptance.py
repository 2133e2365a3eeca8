"""Acceptance suite: one test per shipping criterion, at pinned tolerances.

Each test prints a single PASS line (visible with ``pytest -s``); a
failing criterion shows up as a regular pytest failure instead.
"""

import json
import os
import random
import time
from pathlib import Path

import numpy as np
import pytest
from click.testing import CliRunner

from commit_pulse.cli import main as cli_main
from commit_pulse.cohort import spearman_rank, summarize
from commit_pulse.ingest import CommitRecord
from commit_pulse.series import AnalysisSpan, Granularity, bucketize
from commit_pulse.stability import (
    assess_granularity,
    assess_repo,
    classify_stable,
    coefficient_of_variation,
    compute_deltas,
    derive_profile,
    triangular_normalizer,
)

from helpers import DAY, make_assessment, rec

END = 1_735_689_600  # 2025-01-01T00:00:00Z
FIXTURES = Path(__file__).parent / "fixtures" / "batch"
GOLDENS = Path(__file__).parent / "goldens" / "batch"


def _pass(number: int, message: str) -> None:
    print(f"ACCEPTANCE {number:02d} PASS - {message}")


def test_criterion_01_normalizer_goldens():
    golden = {0.25: 1.0, 0.0: 0.0, 0.5: 0.0, 0.6: 0.0, 0.125: 0.5}
    for cv, expected in golden.items():
        assert abs(triangular_normalizer(cv) - expected) <= 1e-12, cv
    _pass(1, "normalizer goldens at 0.25/0/0.5/0.6/0.125 within 1e-12")


def test_criterion_02_classification_boundary():
    assert classify_stable(0.5) is True
    assert classify_stable(0.5 + 1e-9) is False
    _pass(2, "stability corridor boundary: 0.5 stable, 0.5+1e-9 not")


# Brute-force oracle, written independently of the library path: numpy
# reductions and a *4 scaling instead of the /0.25 division.
def _oracle_cv(counts):
    arr = np.asarray(counts, dtype=np.float64)
    mean = arr.sum() / arr.size
    if mean == 0.0:
        return None
    sigma = np.sqrt(np.square(arr - mean).sum() / arr.size)
    return float(sigma / mean)


def _oracle_stable(cv):
    return cv is not None and cv <= 0.5


def _oracle_phi(cv):
    if cv is None or cv < 0.0 or cv > 0.5:
        return 0.0
    return 1.0 - abs(cv - 0.25) * 4.0


def test_criterion_03_oracle_equivalence():
    rng = random.Random(1009)
    mismatches = 0
    for _ in range(1000):
        counts = [rng.randint(0, 50) for _ in range(rng.randint(10, 200))]
        cv = coefficient_of_variation(counts)
        expected_cv = _oracle_cv(counts)
        if (cv is None) != (expected_cv is None):
            mismatches += 1
            continue
        if cv is not None and abs(cv - expected_cv) > 1e-9:
            mismatches += 1
        if classify_stable(cv) != _oracle_stable(expected_cv):
            mismatches += 1
        if abs(triangular_normalizer(cv) - _oracle_phi(expected_cv)) > 1e-9:
            mismatches += 1
    assert mismatches == 0
    _pass(3, "1000 random series match the brute-force oracle within 1e-9")


def test_criterion_04_score_row_consistency():
    # CV inputs are the normalizer inverses of the published 0.91/0.68/0.52
    # score row (lower branch for the first, upper branch for the others).
    cvs = (0.2275, 0.33, 0.37)
    expected = (0.91, 0.68, 0.52)
    phis = tuple(triangular_normalizer(cv) for cv in cvs)
    for phi, target in zip(phis, expected):
        assert abs(phi - target) <= 0.005
    profile = derive_profile(*(classify_stable(cv) for cv in cvs))
    assert profile.display() == "ALL_THREE"
    _pass(4, "inverted score row reproduces 0.91/0.68/0.52 within 0.005, ALL_THREE")


def test_criterion_05_aggregation_consistency():
    rng = random.Random(2027)
    span = AnalysisSpan(end_utc=END, length_days=210)
    for _ in range(100):
        records = [
            rec(rng.randrange(span.start_utc, span.end_utc))
            for _ in range(rng.randrange(0, 400))
        ]
        daily = bucketize(records, Granularity.DAILY, span).counts
        weekly = bucketize(records, Granularity.WEEKLY, span).counts
        monthly = bucketize(records, Granularity.MONTHLY, span).counts
        assert len(daily) == 210 and len(weekly) == 30 and len(monthly) == 7
        for i, count in enumerate(weekly):
            assert count == sum(daily[i * 7 : (i + 1) * 7])
        for i, count in enumerate(monthly):
            assert count == sum(daily[i * 30 : (i + 1) * 30])
    _pass(5, "weekly/monthly buckets equal their daily sums exactly, 100 random sets")


def test_criterion_06_telescoping_deltas():
    # Scores drawn from a dyadic grid (multiples of 1/1024) so that every
    # float subtraction below is exact and the identity holds bit-for-bit.
    rng = random.Random(3049)
    for _ in range(1000):
        phi_d, phi_w, phi_m = (rng.randrange(0, 1025) / 1024 for _ in range(3))
        deltas = compute_deltas(phi_d, phi_w, phi_m)
        assert deltas.delta_dw + deltas.delta_wm == phi_m - phi_d
    _pass(6, "delta_dw + delta_wm telescopes to phi_m - phi_d exactly, 1000 triples")


def test_criterion_07_spearman():
    assert spearman_rank([1, 2, 3], [1, 3, 2]) == 0.5
    rng = random.Random(4051)
    for _ in range(100):
        n = rng.randrange(3, 50)
        xs = [rng.randrange(0, 12) / 2 for _ in range(n)]  # ties likely
        monotone = [x**3 + 2 * x + 1 for x in xs]  # strictly increasing in x
        assert spearman_rank(xs, monotone) == 1.0
        ys = [rng.random() for _ in range(n)]
        base = spearman_rank(xs, ys)
        assert spearman_rank([2 * x + 0.5 for x in xs], ys) == base
    _pass(7, "0.5 small case exact; monotone pairs exactly 1.0; tie ranks transform-invariant")


def test_criterion_08_synthetic_cohort_census():
    cohort = (
        [make_assessment(f"all{i}", (True, True, True), (0.9, 0.7, 0.5)) for i in range(2)]
        + [make_assessment(f"wm{i}", (False, True, True), (0.0, 0.6, 0.7)) for i in range(27)]
        + [make_assessment(f"m{i}", (False, False, True), (0.0, 0.0, 0.5)) for i in range(21)]
        + [make_assessment(f"u{i}", (False, False, False)) for i in range(50)]
    )
    summary = summarize(cohort)
    assert summary.profile_counts["ALL_THREE"] == 2
    assert summary.profile_counts["WEEKLY_MONTHLY"] == 27
    assert summary.profile_counts["MONTHLY_ONLY"] == 21
    assert summary.profile_counts["UNSTABLE"] == 50
    assert summary.pct_daily_stable == 0.02
    assert summary.pct_weekly_stable == 0.29
    assert summary.pct_monthly_stable == 0.50
    _pass(8, "2/27/21/50 census and 2%/29%/50% shares reproduced exactly")


def test_criterion_09_poisson_sanity():
    rng = np.random.default_rng(20240501)
    n_days = 1050
    span = AnalysisSpan(end_utc=END, length_days=n_days)
    records = []
    serial = 0
    for day, count in enumerate(rng.poisson(40.0, size=n_days)):
        day_start = span.start_utc + day * DAY
        for k in range(count):
            serial += 1
            records.append(
                CommitRecord(
                    repo_id="sim/poisson",
                    commit_hash=f"{serial + 0x9000000:07x}",
                    timestamp_utc=day_start + 1 + (k * DAY) // (count + 1),
                    author_id="sim@example.com",
                )
            )
    daily = assess_granularity(bucketize(records, Granularity.DAILY, span))
    weekly = assess_granularity(bucketize(records, Granularity.WEEKLY, span))
    # Monte-Carlo expectation: CV of Poisson(r) is 1/sqrt(r).
    assert daily.cv == pytest.approx(1 / np.sqrt(40.0), abs=0.02)
    assert weekly.cv == pytest.approx(1 / np.sqrt(280.0), abs=0.02)
    assert daily.stable and weekly.stable
    _pass(9, f"Poisson(40/day): daily cv={daily.cv:.3f}, weekly cv={weekly.cv:.3f}, both stable")


def test_criterion_10_end_to_end_golden(tmp_path):
    runner = CliRunner()
    outputs = []
    for run in ("first", "second"):
        out_dir = tmp_path / run
        result = runner.invoke(
            cli_main,
            [
                "batch",
                "--manifest", str(FIXTURES / "manifest.jsonl"),
                "--span-end", str(END),
                "--span-days", "210",
                "--out", str(out_dir),
            ],
            env={"SOURCE_DATE_EPOCH": str(END)},
        )
        assert result.exit_code == 0, result.output
        outputs.append(
            {name: (out_dir / name).read_bytes() for name in ("repos.csv", "cohort.md", "report.json")}
        )
    assert outputs[0] == outputs[1]
    for name, produced in outputs[0].items():
        assert produced == (GOLDENS / name).read_bytes(), f"{name} diverged from golden"
    _pass(10, "repeated batch runs byte-identical to checked-in goldens")


def test_criterion_11_performance():
    rng = random.Random(5081)
    span = AnalysisSpan(end_utc=END, length_days=1826)
    records = [
        rec(rng.randrange(span.start_utc, span.end_utc), repo="perf/large")
        for _ in range(50_000)
    ]
    started = time.perf_counter()
    result = assess_repo("perf/large", records, span)
    elapsed = time.perf_counter() - started
    assert result.daily.cv is not None
    assert elapsed < 1.0, f"assessment took {elapsed:.3f}s"
    _pass(11, f"50k commits over 5 years assessed in {elapsed * 1000:.0f}ms")


REPLICATION_ENV = "COMMIT_PULSE_REPLICATION_MANIFEST"


@pytest.mark.skipif(
    REPLICATION_ENV not in os.environ,
    reason="dataset-scale findings need the upstream replication data; "
    f"point {REPLICATION_ENV} at its batch manifest to enable",
)
def test_criterion_12_replication_dataset(tmp_path):
    manifest = Path(os.environ[REPLICATION_ENV])
    runner = CliRunner()
    out_dir = tmp_path / "replication"
    result = runner.invoke(
        cli_main,
        ["batch", "--manifest", str(manifest), "--out", str(out_dir)],
        env={"SOURCE_DATE_EPOCH": str(END)},
    )
    assert result.exit_code == 0, result.output
    report = json.loads((out_dir / "report.json").read_text())
    stats = report["cohort"]["delta_stats"]
    assert stats["n_improved"] == 26
    assert stats["n_degraded"] == 3
    assert stats["mean_change"] == pytest.approx(0.33, abs=0.01)
    assert stats["median_change"] == pytest.approx(0.34, abs=0.01)
    assert stats["max_improvement"] == pytest.approx(0.79, abs=0.01)
    assert stats["max_degradation"] == pytest.approx(-0.16, abs=0.01)
    _pass(12, "replication dataset reproduces the weekly-to-monthly evolution table")
