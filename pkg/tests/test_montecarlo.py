"""Monte Carlo outage estimation: Wilson bounds, slope fits, calibration.

Calibration targets are the closed-form gamma/exponential outage
probabilities; every seeded run asserted here was checked against those
targets before the seed was frozen.
"""

import math

import numpy as np
import pytest
from numpy.testing import assert_allclose
from scipy import special, stats

from mcqkd import (
    DegenerateInputError,
    EmpiricalOutage,
    InsufficientTrialsError,
    TrialConfig,
    estimate_mean_fade_outage,
    estimate_rate_outage,
    fit_diversity_slope,
    wilson_interval,
)

from oracles import ls_slope, wilson_direct

GRID = (10.0, 31.6, 100.0)
HIGH_GRID = (1e4, 1e5, 1e6)
THREE_SIGMA = math.erf(3.0 / math.sqrt(2.0))


def analytic_inside_3sigma(outage, analytic_fn):
    """True when the analytic outage lies inside the 3-sigma Wilson interval
    recomputed from the run's own success counts, at every grid point."""
    for snr, successes in zip(outage.snr_grid, outage.successes):
        lo, hi = wilson_interval(successes, outage.trials, confidence=THREE_SIGMA)
        if not lo <= analytic_fn(snr) <= hi:
            return False
    return True


class TestWilsonInterval:
    def test_zero_successes_pin_lower_bound(self):
        lo, hi = wilson_interval(0, 1000)
        assert lo == 0.0
        assert 0.0 < hi < 0.01

    def test_full_successes_pin_upper_bound(self):
        lo, hi = wilson_interval(1000, 1000)
        assert hi == 1.0
        assert 0.99 < lo < 1.0

    def test_half_split_textbook_values(self):
        lo, hi = wilson_interval(50, 100)
        assert_allclose(lo, 0.4038315303659956, rtol=1e-12)
        assert_allclose(hi, 0.5961684696340044, rtol=1e-12)

    def test_interval_is_symmetric_around_half(self):
        lo, hi = wilson_interval(50, 100)
        assert_allclose(lo + hi, 1.0, atol=1e-14)

    @pytest.mark.parametrize(
        "successes,trials", [(1, 30), (7, 50), (250, 1000), (999, 1000), (13, 13)]
    )
    def test_matches_direct_transcription(self, successes, trials):
        z = float(stats.norm.ppf(0.975))
        expected = wilson_direct(successes, trials, z)
        got = wilson_interval(successes, trials)
        assert_allclose(got, np.clip(expected, 0.0, 1.0), rtol=1e-12)

    def test_higher_confidence_widens_interval(self):
        lo95, hi95 = wilson_interval(30, 500)
        lo3, hi3 = wilson_interval(30, 500, confidence=THREE_SIGMA)
        assert lo3 < lo95 and hi3 > hi95

    @pytest.mark.parametrize(
        "successes,trials,confidence",
        [(0, 0, 0.95), (-1, 10, 0.95), (11, 10, 0.95), (5, 10, 0.0), (5, 10, 1.0)],
    )
    def test_validation(self, successes, trials, confidence):
        with pytest.raises(ValueError):
            wilson_interval(successes, trials, confidence)


class TestSlopeFit:
    def test_exact_power_law_recovered(self):
        grid = np.array([10.0, 100.0, 1000.0, 10000.0])
        fit = fit_diversity_slope(grid, grid**-3)
        assert_allclose(fit.slope, -3.0, atol=1e-9)
        assert fit.stderr < 1e-9

    def test_intercept_does_not_bias_slope(self):
        grid = np.array(GRID)
        fit = fit_diversity_slope(grid, 0.5 * grid**-2)
        assert_allclose(fit.slope, -2.0, atol=1e-9)

    def test_matches_least_squares_oracle(self):
        rng = np.random.default_rng(77)
        grid = np.logspace(1, 4, 6)
        p = grid**-1.3 * np.exp(rng.normal(0.0, 0.05, size=6))
        fit = fit_diversity_slope(grid, p)
        assert_allclose(fit.slope, ls_slope(np.log2(grid), np.log2(p)), rtol=1e-12)

    def test_zero_estimates_excluded_with_warning(self):
        grid = np.array([10.0, 31.6, 100.0, 316.0])
        p = np.array([1e-2, 1e-3, 1e-4, 0.0])
        with pytest.warns(UserWarning, match="zero outage estimate"):
            fit = fit_diversity_slope(grid, p)
        clean = fit_diversity_slope(grid[:3], p[:3])
        assert_allclose(fit.slope, clean.slope, rtol=1e-12)

    def test_too_few_nonzero_points(self):
        with pytest.warns(UserWarning):
            with pytest.raises(InsufficientTrialsError):
                fit_diversity_slope(GRID, [1e-2, 1e-3, 0.0])

    def test_constant_grid_rejected(self):
        with pytest.raises(DegenerateInputError):
            fit_diversity_slope([10.0, 10.0, 10.0], [0.1, 0.1, 0.1])

    @pytest.mark.parametrize(
        "grid,p",
        [
            ([10.0, 100.0], [0.1, 0.01, 0.001]),
            ([10.0, -5.0, 100.0], [0.1, 0.01, 0.001]),
            ([10.0, 31.6, 100.0], [0.1, 1.5, 0.001]),
            ([10.0, 31.6, 100.0], [0.1, -0.2, 0.001]),
        ],
    )
    def test_shape_and_range_validation(self, grid, p):
        with pytest.raises(ValueError):
            fit_diversity_slope(grid, p)


class TestTrialConfig:
    def test_grid_coerced_to_float_tuple(self):
        cfg = TrialConfig(l=1, multiplex_ratio=0.0, snr_grid=[10, 32, 100], trials=1000, seed=1)
        assert cfg.snr_grid == (10.0, 32.0, 100.0)
        assert isinstance(cfg.snr_grid, tuple)

    @pytest.mark.parametrize(
        "kwargs",
        [
            dict(l=0),
            dict(multiplex_ratio=-0.1),
            dict(multiplex_ratio=1.1),
            dict(snr_grid=(10.0, 100.0)),
            dict(snr_grid=(1.0, 10.0, 100.0)),
            dict(snr_grid=(0.5, 10.0, 100.0)),
            dict(trials=999),
            dict(fade_variance=0.0),
        ],
    )
    def test_invalid_configs_rejected(self, kwargs):
        base = dict(l=1, multiplex_ratio=0.0, snr_grid=GRID, trials=1000, seed=1)
        base.update(kwargs)
        with pytest.raises(ValueError):
            TrialConfig(**base)


class TestMeanFadeOutage:
    def test_single_channel_calibration(self):
        """At a million trials the analytic 1 - exp(-1/snr) outage must sit
        inside the 3-sigma Wilson band at every grid point."""
        cfg = TrialConfig(l=1, multiplex_ratio=0.0, snr_grid=GRID, trials=1_000_000, seed=101)
        out = estimate_mean_fade_outage(cfg)
        assert analytic_inside_3sigma(out, lambda s: 1.0 - math.exp(-1.0 / s))
        assert_allclose(out.p_hat[0], 0.09516258196404044, atol=3e-3)

    def test_two_channel_calibration(self):
        cfg = TrialConfig(l=2, multiplex_ratio=0.0, snr_grid=GRID, trials=1_000_000, seed=202)
        out = estimate_mean_fade_outage(cfg)
        assert analytic_inside_3sigma(out, lambda s: float(special.gammainc(2, 2.0 / s)))
        assert_allclose(out.p_hat[0], 0.017523096306421772, atol=1.5e-3)

    def test_single_channel_slope_near_diversity_one(self):
        cfg = TrialConfig(l=1, multiplex_ratio=0.0, snr_grid=GRID, trials=1_000_000, seed=101)
        out = estimate_mean_fade_outage(cfg)
        assert 0.85 <= out.slope <= 1.15

    def test_two_channel_slope_near_diversity_two(self):
        cfg = TrialConfig(l=2, multiplex_ratio=0.0, snr_grid=GRID, trials=1_000_000, seed=202)
        out = estimate_mean_fade_outage(cfg)
        assert 1.7 <= out.slope <= 2.3

    def test_fade_variance_rescales_outage(self):
        """Doubling the fade variance at fixed snr is the same event as
        halving the threshold, so the estimate must drop."""
        base = TrialConfig(l=1, multiplex_ratio=0.0, snr_grid=GRID, trials=100_000, seed=7)
        wide = TrialConfig(
            l=1, multiplex_ratio=0.0, snr_grid=GRID, trials=100_000, seed=7, fade_variance=2.0
        )
        p_base = estimate_mean_fade_outage(base).p_hat
        p_wide = estimate_mean_fade_outage(wide).p_hat
        assert all(w < b for w, b in zip(p_wide, p_base))

    def test_thread_partitioning_is_invisible(self):
        cfg = TrialConfig(l=2, multiplex_ratio=0.0, snr_grid=GRID, trials=200_000, seed=42)
        serial = estimate_mean_fade_outage(cfg, threads=1)
        pooled = estimate_mean_fade_outage(cfg, threads=4)
        assert serial.successes == pooled.successes
        assert serial.p_hat == pooled.p_hat
        assert serial.slope == pooled.slope

    def test_seed_changes_the_sample(self):
        mk = lambda seed: TrialConfig(
            l=1, multiplex_ratio=0.0, snr_grid=GRID, trials=50_000, seed=seed
        )
        a = estimate_mean_fade_outage(mk(1))
        b = estimate_mean_fade_outage(mk(2))
        assert a.successes != b.successes

    def test_unresolvable_probability_is_refused(self):
        cfg = TrialConfig(l=4, multiplex_ratio=0.0, snr_grid=(1e3, 1e4, 1e5), trials=10_000, seed=1)
        with pytest.raises(InsufficientTrialsError, match="cannot be resolved by sampling"):
            estimate_mean_fade_outage(cfg)

    def test_all_zero_counts_attach_partial_result(self):
        """Rare-but-allowed probabilities can still produce zero counts; the
        error then carries the per-point zeros with an undefined slope."""
        cfg = TrialConfig(
            l=2, multiplex_ratio=0.0, snr_grid=(1e3, 3.16e3, 1e4), trials=1000, seed=5
        )
        with pytest.raises(InsufficientTrialsError) as excinfo:
            estimate_mean_fade_outage(cfg)
        partial = excinfo.value.outage
        assert partial is not None
        assert partial.p_hat == (0.0, 0.0, 0.0)
        assert partial.successes == (0, 0, 0)
        assert math.isnan(partial.slope)
        assert partial.ci_low == (0.0, 0.0, 0.0)
        assert all(hi > 0 for hi in partial.ci_high)


class TestRateOutage:
    def test_zero_multiplex_event_never_occurs(self):
        cfg = TrialConfig(l=1, multiplex_ratio=0.0, snr_grid=GRID, trials=1000, seed=1)
        with pytest.raises(InsufficientTrialsError) as excinfo:
            estimate_rate_outage(cfg)
        partial = excinfo.value.outage
        assert partial.p_hat == (0.0, 0.0, 0.0)
        assert math.isnan(partial.slope)

    def test_half_multiplex_calibration(self):
        """l=1 at half multiplexing: outage below snr^(1/2) bits is the
        exponential event with threshold (sqrt(snr) - 1)/snr."""
        cfg = TrialConfig(l=1, multiplex_ratio=0.5, snr_grid=GRID, trials=1_000_000, seed=303)
        out = estimate_rate_outage(cfg)
        analytic = lambda s: 1.0 - math.exp(-(math.sqrt(s) - 1.0) / s)
        assert analytic_inside_3sigma(out, analytic)
        assert_allclose(out.p_hat[2], 1.0 - math.exp(-0.09), atol=1e-3)

    def test_single_channel_slope_at_high_snr(self):
        cfg = TrialConfig(l=1, multiplex_ratio=0.5, snr_grid=HIGH_GRID, trials=200_000, seed=11)
        out = estimate_rate_outage(cfg)
        assert 0.425 <= out.slope <= 0.575

    def test_two_channel_slope_at_high_snr(self):
        cfg = TrialConfig(l=2, multiplex_ratio=0.5, snr_grid=HIGH_GRID, trials=200_000, seed=3)
        out = estimate_rate_outage(cfg)
        assert 0.85 <= out.slope <= 1.15

    def test_custom_rate_fn_reproduces_exponential_outage(self):
        """A constant one-bit rate turns the event into |F|^2 < 1/snr, whose
        probability is 1 - exp(-1/snr)."""
        cfg = TrialConfig(l=1, multiplex_ratio=0.5, snr_grid=GRID, trials=200_000, seed=17)
        out = estimate_rate_outage(cfg, secret_rate_fn=lambda ratio, snr: 1.0)
        assert analytic_inside_3sigma(out, lambda s: 1.0 - math.exp(-1.0 / s))

    def test_negative_rate_fn_rejected(self):
        cfg = TrialConfig(l=1, multiplex_ratio=0.5, snr_grid=GRID, trials=1000, seed=1)
        with pytest.raises(ValueError, match="non-negative"):
            estimate_rate_outage(cfg, secret_rate_fn=lambda ratio, snr: -1.0)

    def test_thread_partitioning_is_invisible(self):
        cfg = TrialConfig(l=1, multiplex_ratio=0.5, snr_grid=GRID, trials=150_000, seed=9)
        serial = estimate_rate_outage(cfg, threads=1)
        pooled = estimate_rate_outage(cfg, threads=3)
        assert serial.successes == pooled.successes

    def test_unresolvable_probability_is_refused(self):
        cfg = TrialConfig(
            l=4, multiplex_ratio=0.25, snr_grid=(1e5, 1e6, 1e7), trials=10_000, seed=1
        )
        with pytest.raises(InsufficientTrialsError, match="rate outage"):
            estimate_rate_outage(cfg)


class TestEmpiricalOutage:
    def _sample(self):
        cfg = TrialConfig(l=1, multiplex_ratio=0.0, snr_grid=GRID, trials=10_000, seed=3)
        return estimate_mean_fade_outage(cfg)

    def test_bounds_bracket_estimates(self):
        out = self._sample()
        for lo, p, hi in zip(out.ci_low, out.p_hat, out.ci_high):
            assert 0.0 <= lo <= p <= hi <= 1.0

    def test_inverted_bounds_rejected(self):
        with pytest.raises(ValueError, match="confidence bounds"):
            EmpiricalOutage(
                snr_grid=GRID,
                p_hat=(0.1, 0.05, 0.01),
                ci_low=(0.2, 0.0, 0.0),
                ci_high=(0.3, 0.1, 0.02),
                slope=1.0,
                slope_stderr=0.1,
                successes=(100, 50, 10),
                trials=1000,
            )

    def test_csv_layout(self):
        out = self._sample()
        lines = out.to_csv().splitlines()
        assert lines[0] == "snr,p_hat,ci_low,ci_high"
        assert len(lines) == 5
        first = lines[1].split(",")
        assert float(first[0]) == 10.0
        assert_allclose(float(first[1]), out.p_hat[0], rtol=1e-8)
        trailer = lines[-1].split(",")
        assert trailer[0] == "slope" and trailer[2] == "stderr"
        assert out.to_csv().endswith("\n")

    def test_csv_precision(self):
        out = self._sample()
        row = out.to_csv(precision=3).splitlines()[1]
        for cell in row.split(","):
            mantissa = cell.lstrip("-").replace(".", "").split("e")[0].lstrip("0")
            assert len(mantissa) <= 3
        with pytest.raises(ValueError):
            out.to_csv(precision=0)
