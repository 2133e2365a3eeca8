import math
import random
from fractions import Fraction

import pytest

from commit_pulse.errors import ContractViolation, EmptySeriesError
from commit_pulse.ingest import FilterOptions
from commit_pulse.series import AnalysisSpan, Granularity
from commit_pulse.stability import (
    ProfileLabel,
    assess_granularity,
    assess_repo,
    classify_stable,
    coefficient_of_variation,
    compute_deltas,
    derivative_diagnostic,
    derive_profile,
    triangular_normalizer,
)

from helpers import DAY, make_series, rec

END = 1_700_006_400


class TestCoefficientOfVariation:
    def test_hand_oracle(self):
        # mean 2, population sigma sqrt(0.5)
        expected = math.sqrt(0.5) / 2
        assert coefficient_of_variation([1, 2, 3, 2]) == pytest.approx(expected, abs=1e-12)
        assert coefficient_of_variation([1, 2, 3, 2]) == pytest.approx(0.3535533905932738, abs=1e-12)

    def test_zero_variance(self):
        assert coefficient_of_variation([5, 5, 5, 5]) == 0.0

    def test_zero_mean_is_undefined(self):
        assert coefficient_of_variation([0, 0, 0]) is None

    def test_empty_series_raises(self):
        with pytest.raises(EmptySeriesError):
            coefficient_of_variation([])

    def test_scale_invariance(self):
        rng = random.Random(41)
        for _ in range(50):
            counts = [rng.randrange(0, 50) for _ in range(rng.randrange(5, 60))]
            if sum(counts) == 0:
                counts[0] = 1
            base = coefficient_of_variation(counts)
            k = rng.randrange(1, 1000) / rng.randrange(1, 100)
            scaled = coefficient_of_variation([k * c for c in counts])
            assert scaled == pytest.approx(base, abs=1e-12)
            assert classify_stable(scaled) == classify_stable(base)
            assert triangular_normalizer(scaled) == pytest.approx(
                triangular_normalizer(base), abs=1e-12
            )

    def test_permutation_invariance(self):
        rng = random.Random(43)
        counts = [rng.randrange(0, 50) for _ in range(60)]
        counts[0] = 1
        shuffled = counts[:]
        rng.shuffle(shuffled)
        assert coefficient_of_variation(counts) == coefficient_of_variation(shuffled)


class TestClassifyStable:
    def test_interior_value(self):
        # Either inverse of a 0.27 daily score (0.0675 or 0.4325) is stable.
        assert classify_stable(0.4325) is True
        assert classify_stable(0.0675) is True

    def test_boundary_inclusive(self):
        assert classify_stable(0.5) is True
        assert classify_stable(0.500001) is False

    def test_undefined_is_unstable(self):
        assert classify_stable(None) is False


class TestTriangularNormalizer:
    def test_peak(self):
        assert triangular_normalizer(0.25) == 1.0

    def test_corridor_boundaries(self):
        assert triangular_normalizer(0.0) == 0.0
        assert triangular_normalizer(0.5) == 0.0

    def test_outside_corridor(self):
        assert triangular_normalizer(0.6) == 0.0
        assert triangular_normalizer(-0.1) == 0.0

    def test_hand_oracle(self):
        cv = 0.3535533905932738
        assert triangular_normalizer(cv) == pytest.approx(1 - abs(cv - 0.25) / 0.25, abs=1e-15)
        assert triangular_normalizer(cv) == pytest.approx(0.5857864376269049, abs=1e-9)

    def test_undefined_scores_zero(self):
        assert triangular_normalizer(None) == 0.0

    def test_range_and_symmetry(self):
        rng = random.Random(47)
        for _ in range(500):
            cv = rng.random() * 2
            phi = triangular_normalizer(cv)
            assert 0.0 <= phi <= 1.0
            offset = rng.random() * 0.25
            assert triangular_normalizer(0.25 - offset) == pytest.approx(
                triangular_normalizer(0.25 + offset), abs=1e-12
            )

    def test_positive_score_implies_stable(self):
        rng = random.Random(53)
        for _ in range(500):
            cv = rng.random() * 2
            if triangular_normalizer(cv) > 0:
                assert classify_stable(cv)
        # The converse fails exactly at the corridor boundaries.
        for boundary in (0.0, 0.5):
            assert classify_stable(boundary)
            assert triangular_normalizer(boundary) == 0.0


class TestAssessGranularity:
    def test_uniform_series_is_stable_with_zero_score(self):
        series = make_series([5] * 60)
        result = assess_granularity(series)
        assert result.cv == 0.0
        assert result.stable is True
        assert result.phi == 0.0
        assert result.degenerate is False

    def test_mild_variation(self):
        result = assess_granularity(make_series([1, 2, 3, 2]))
        assert result.stable is True
        assert result.phi == pytest.approx(0.586, abs=1e-3)

    def test_bursty_series(self):
        # mean 2.5, sigma sqrt(18.75): cv is sqrt(3)
        result = assess_granularity(make_series([0, 0, 10, 0]))
        assert result.cv == pytest.approx(math.sqrt(3), abs=1e-12)
        assert result.stable is False
        assert result.phi == 0.0

    def test_single_bucket_is_degenerate(self):
        result = assess_granularity(make_series([5], Granularity.MONTHLY))
        assert result.degenerate is True
        assert result.cv is None
        assert result.stable is False
        assert result.phi == 0.0
        assert result.mean == 5.0

    def test_dead_series_is_degenerate(self):
        result = assess_granularity(make_series([0, 0, 0]))
        assert result.degenerate is True
        assert result.cv is None
        assert result.stable is False

    def test_counts_match_frequency_classification(self):
        # The corridor is scale-free, so counts and per-day frequencies agree.
        rng = random.Random(59)
        for granularity in (Granularity.WEEKLY, Granularity.MONTHLY):
            counts = [rng.randrange(0, 60) for _ in range(40)]
            counts[0] = 1
            series = make_series(counts, granularity)
            from_counts = assess_granularity(series)
            freq_cv = coefficient_of_variation(
                [c / granularity.window_days for c in counts]
            )
            assert from_counts.cv == pytest.approx(freq_cv, abs=1e-12)


class TestDeriveProfile:
    def test_canonical_labels(self):
        assert derive_profile(True, True, True).label is ProfileLabel.ALL_THREE
        assert derive_profile(False, True, True).label is ProfileLabel.WEEKLY_MONTHLY
        assert derive_profile(False, False, True).label is ProfileLabel.MONTHLY_ONLY
        assert derive_profile(False, False, False).label is ProfileLabel.UNSTABLE

    def test_non_hierarchical_keeps_the_set(self):
        profile = derive_profile(True, False, True)
        assert profile.label is ProfileLabel.NON_HIERARCHICAL
        assert profile.stable_set == frozenset({Granularity.DAILY, Granularity.MONTHLY})
        assert profile.display() == "NON_HIERARCHICAL{D,M}"

    def test_all_combinations_are_labelled(self):
        non_hierarchical = set()
        for d in (False, True):
            for w in (False, True):
                for m in (False, True):
                    profile = derive_profile(d, w, m)
                    if profile.label is ProfileLabel.NON_HIERARCHICAL:
                        non_hierarchical.add(profile.display())
        assert non_hierarchical == {
            "NON_HIERARCHICAL{D}",
            "NON_HIERARCHICAL{W}",
            "NON_HIERARCHICAL{D,W}",
            "NON_HIERARCHICAL{D,M}",
        }


class TestComputeDeltas:
    def test_declining_scores(self):
        deltas = compute_deltas(0.91, 0.68, 0.52)
        assert deltas.delta_dw == pytest.approx(-0.23, abs=1e-12)
        assert deltas.delta_wm == pytest.approx(-0.16, abs=1e-12)

    def test_improving_scores(self):
        deltas = compute_deltas(0.27, 0.51, 0.62)
        assert deltas.delta_dw == pytest.approx(0.24, abs=1e-12)
        assert deltas.delta_wm == pytest.approx(0.11, abs=1e-12)

    def test_identity(self):
        deltas = compute_deltas(0.4, 0.4, 0.4)
        assert deltas.delta_dw == 0.0
        assert deltas.delta_wm == 0.0

    def test_out_of_range_rejected(self):
        with pytest.raises(ContractViolation):
            compute_deltas(1.2, 0.5, 0.5)
        with pytest.raises(ContractViolation):
            compute_deltas(0.5, -0.1, 0.5)

    def test_telescoping_is_exact_in_rational_arithmetic(self):
        rng = random.Random(61)
        for _ in range(300):
            phis = [Fraction(rng.randrange(0, 1001), 1000) for _ in range(3)]
            deltas = compute_deltas(*phis)
            assert deltas.delta_dw + deltas.delta_wm == phis[2] - phis[0]


class TestAssessRepo:
    def test_empty_record_set(self):
        span = AnalysisSpan(end_utc=END, length_days=90)
        result = assess_repo("dead/repo", [], span)
        assert result.daily.degenerate
        assert result.weekly.degenerate
        assert result.monthly.degenerate
        assert result.profile.label is ProfileLabel.UNSTABLE
        assert result.annual_throughput == 0.0

    def test_uniform_daily_commits_over_five_years(self):
        span = AnalysisSpan(end_utc=END, length_days=1826)
        records = [rec(span.start_utc + i * DAY + 43_200) for i in range(1826)]
        result = assess_repo("steady/repo", records, span)
        assert result.profile.label is ProfileLabel.ALL_THREE
        assert result.daily.phi == 0.0
        assert result.weekly.phi == 0.0
        # 30-day buckets over 1826 days drop a 26-day partial window.
        assert result.monthly.cv == 0.0

    def test_filters_are_applied(self):
        span = AnalysisSpan(end_utc=END, length_days=60)
        humans = [rec(span.start_utc + i * DAY + 100, author="human") for i in range(60)]
        bots = [rec(span.start_utc + i * DAY + 200, author="ci[bot]") for i in range(0, 60, 2)]
        no_filter = assess_repo("mixed/repo", humans + bots, span)
        filtered = assess_repo(
            "mixed/repo",
            humans + bots,
            span,
            FilterOptions(exclude_bot_authors=True),
        )
        assert no_filter.daily.mean == 1.5
        assert filtered.daily.mean == 1.0

    def test_span_shorter_than_monthly_window_propagates(self):
        from commit_pulse.errors import DegenerateSpanError

        span = AnalysisSpan(end_utc=END, length_days=21)
        with pytest.raises(DegenerateSpanError):
            assess_repo("short/repo", [], span)


class TestDerivativeDiagnostic:
    def test_constant_series(self):
        assert derivative_diagnostic(make_series([2, 2, 2])) == [0.0, 0.0]

    def test_daily_step(self):
        assert derivative_diagnostic(make_series([1, 3])) == [2.0]

    def test_weekly_step(self):
        diag = derivative_diagnostic(make_series([7, 21], Granularity.WEEKLY))
        assert diag == pytest.approx([2 / 7], abs=1e-15)

    def test_order_sensitive_by_design(self):
        increasing = derivative_diagnostic(make_series([1, 2, 3]))
        decreasing = derivative_diagnostic(make_series([3, 2, 1]))
        assert increasing != decreasing
