"""Monte Carlo estimation of fading-outage probabilities and diversity slopes.

Randomness contract: the fades of trial t at grid point g are a pure function
of (seed, g, t).  Trials are generated in fixed-size blocks whose bit streams
come from a counter-based generator keyed by (seed, grid index, block index),
so estimates are bit-identical no matter how many worker threads partition
the blocks.

Two outage events are supported over l i.i.d. exponential squared fades
|F_i|^2 with mean ``fade_variance``:

  * mean-fade outage:  (1/l) * sum_i |F_i|^2 < 1/snr
    (analytically the regularised gamma P(l, l/(snr*fade_variance)))
  * rate outage:       sum_i log2(1 + |F_i|^2 * snr) < l * rate(snr)
    with the threshold rate(snr) = multiplex_ratio * log2(snr)

Configurations whose analytic outage probability is below 1e-8 at some grid
point are refused up front: no affordable number of trials could resolve
them, and the power-law formulas cover that regime analytically.
"""

from __future__ import annotations

import math
import warnings
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Callable, NamedTuple

import numpy as np
from scipy import special, stats

from .errors import DegenerateInputError, InsufficientTrialsError

_BLOCK = 1 << 16
_MASK64 = (1 << 64) - 1
_MIN_ANALYTIC_P = 1e-8


@dataclass(frozen=True)
class TrialConfig:
    """One Monte Carlo run: l faded sub-channels sampled ``trials`` times at
    every SNR grid point."""

    l: int
    multiplex_ratio: float
    snr_grid: tuple
    trials: int
    seed: int
    fade_variance: float = 1.0

    def __post_init__(self):
        if self.l < 1:
            raise ValueError(f"l must be >= 1, got {self.l}")
        if not 0.0 <= self.multiplex_ratio <= 1.0:
            raise ValueError(
                f"multiplex_ratio must lie in [0, 1], got {self.multiplex_ratio}"
            )
        grid = tuple(float(s) for s in self.snr_grid)
        if len(grid) < 3:
            raise ValueError(f"snr_grid needs at least 3 points, got {len(grid)}")
        if any(s <= 1.0 for s in grid):
            raise ValueError("every snr grid value must exceed 1")
        if self.trials < 1000:
            raise ValueError(f"trials must be >= 1000, got {self.trials}")
        if not self.fade_variance > 0:
            raise ValueError(f"fade_variance must be positive, got {self.fade_variance}")
        object.__setattr__(self, "snr_grid", grid)
        object.__setattr__(self, "seed", int(self.seed))


@dataclass(frozen=True)
class EmpiricalOutage:
    """Per-grid-point outage estimates with Wilson confidence bounds and the
    fitted diversity exponent (positive for decaying outage)."""

    snr_grid: tuple
    p_hat: tuple
    ci_low: tuple
    ci_high: tuple
    slope: float
    slope_stderr: float
    successes: tuple
    trials: int

    def __post_init__(self):
        for name in ("snr_grid", "p_hat", "ci_low", "ci_high", "successes"):
            object.__setattr__(self, name, tuple(getattr(self, name)))
        for lo, p, hi in zip(self.ci_low, self.p_hat, self.ci_high):
            if not 0.0 <= lo <= p <= hi <= 1.0:
                raise ValueError(
                    f"confidence bounds must satisfy 0 <= {lo} <= {p} <= {hi} <= 1"
                )

    def to_csv(self, precision: int = 9) -> str:
        """CSV rows ``snr,p_hat,ci_low,ci_high`` plus a slope/stderr trailer."""
        if precision < 1:
            raise ValueError(f"precision must be >= 1, got {precision}")
        fmt = f"{{:.{precision}g}}"
        lines = ["snr,p_hat,ci_low,ci_high"]
        for snr, p, lo, hi in zip(self.snr_grid, self.p_hat, self.ci_low, self.ci_high):
            lines.append(",".join(fmt.format(v) for v in (snr, p, lo, hi)))
        lines.append(f"slope,{fmt.format(self.slope)},stderr,{fmt.format(self.slope_stderr)}")
        return "\n".join(lines) + "\n"


class SlopeFit(NamedTuple):
    slope: float
    stderr: float


def wilson_interval(successes: int, trials: int, confidence: float = 0.95) -> tuple[float, float]:
    """Wilson score interval for a binomial proportion."""
    if trials < 1:
        raise ValueError(f"trials must be >= 1, got {trials}")
    if not 0 <= successes <= trials:
        raise ValueError(f"successes must lie in [0, {trials}], got {successes}")
    if not 0.0 < confidence < 1.0:
        raise ValueError(f"confidence must lie in (0, 1), got {confidence}")
    z = float(stats.norm.ppf(0.5 + confidence / 2.0))
    n = float(trials)
    p = successes / n
    denom = 1.0 + z * z / n
    centre = (p + z * z / (2.0 * n)) / denom
    half = z * math.sqrt(p * (1.0 - p) / n + z * z / (4.0 * n * n)) / denom
    # The bound is exactly 0 (or 1) at the boundary counts; rounding in the
    # centre/half cancellation must not leak a tiny residue past p_hat.
    lower = 0.0 if successes == 0 else max(centre - half, 0.0)
    upper = 1.0 if successes == trials else min(centre + half, 1.0)
    return lower, upper


def fit_diversity_slope(snr_grid, p_hats) -> SlopeFit:
    """Least-squares slope of log2(p_hat) against log2(snr) with its standard
    error.  Zero estimates are excluded with a warning; fewer than three
    surviving points, or a constant snr grid, make the fit impossible."""
    grid = np.asarray(snr_grid, dtype=float)
    p = np.asarray(p_hats, dtype=float)
    if grid.shape != p.shape or grid.ndim != 1:
        raise ValueError("snr_grid and p_hats must be equal-length vectors")
    if np.any(grid <= 0) or np.any(p < 0) or np.any(p > 1):
        raise ValueError("snr values must be positive and p_hats probabilities")
    keep = p > 0
    if not np.all(keep):
        warnings.warn(
            f"excluding {int(np.count_nonzero(~keep))} zero outage estimate(s) from the "
            "slope fit",
            stacklevel=2,
        )
    grid, p = grid[keep], p[keep]
    if grid.size < 3:
        raise InsufficientTrialsError(
            f"slope fit needs at least 3 nonzero points, got {grid.size}"
        )
    x = np.log2(grid)
    y = np.log2(p)
    if np.ptp(x) == 0.0:
        raise DegenerateInputError("snr grid is constant; slope undefined")
    xc = x - x.mean()
    slope = float(np.sum(xc * y) / np.sum(xc * xc))
    resid = y - (y.mean() + slope * xc)
    dof = x.size - 2
    if dof > 0:
        stderr = float(np.sqrt(np.sum(resid**2) / dof / np.sum(xc * xc)))
    else:
        stderr = 0.0
    return SlopeFit(slope, stderr)


def _block_fades(
    seed: int, grid_index: int, block_index: int, count: int, l: int, variance: float
) -> np.ndarray:
    ss = np.random.SeedSequence(
        entropy=seed & _MASK64, spawn_key=(grid_index, block_index)
    )
    rng = np.random.Generator(np.random.Philox(ss))
    return -variance * np.log1p(-rng.random((count, l)))


def _count_events(
    cfg: TrialConfig, grid_index: int, event: Callable[[np.ndarray], np.ndarray], threads: int
) -> int:
    n_blocks = -(-cfg.trials // _BLOCK)

    def work(block_index: int) -> int:
        start = block_index * _BLOCK
        count = min(_BLOCK, cfg.trials - start)
        fades = _block_fades(
            cfg.seed, grid_index, block_index, count, cfg.l, cfg.fade_variance
        )
        return int(np.count_nonzero(event(fades)))

    if threads <= 1:
        return sum(work(b) for b in range(n_blocks))
    with ThreadPoolExecutor(max_workers=threads) as pool:
        return sum(pool.map(work, range(n_blocks)))


def _refuse_rare(analytic: float, snr: float, what: str) -> None:
    if 0.0 < analytic < _MIN_ANALYTIC_P:
        raise InsufficientTrialsError(
            f"refusing {what} at snr={snr:g}: analytic outage probability "
            f"{analytic:.3e} is below {_MIN_ANALYTIC_P:g} and cannot be resolved "
            "by sampling; use the closed-form power laws for this regime"
        )


def _assemble(cfg: TrialConfig, successes: list[int]) -> EmpiricalOutage:
    p_hat = [s / cfg.trials for s in successes]
    bounds = [wilson_interval(s, cfg.trials) for s in successes]
    ci_low = [b[0] for b in bounds]
    ci_high = [b[1] for b in bounds]

    def build(slope: float, stderr: float) -> EmpiricalOutage:
        return EmpiricalOutage(
            cfg.snr_grid, p_hat, ci_low, ci_high, slope, stderr,
            tuple(successes), cfg.trials,
        )

    if all(s == 0 for s in successes):
        raise InsufficientTrialsError(
            f"no outage events in {cfg.trials} trials at any grid point; "
            "increase trials or lower the snr grid",
            outage=build(math.nan, math.nan),
        )
    try:
        fit = fit_diversity_slope(cfg.snr_grid, p_hat)
    except InsufficientTrialsError as exc:
        raise InsufficientTrialsError(str(exc), outage=build(math.nan, math.nan)) from None
    return build(-fit.slope, fit.stderr)


def estimate_mean_fade_outage(cfg: TrialConfig, threads: int = 1) -> EmpiricalOutage:
    """Estimate Pr[(1/l) * sum |F_i|^2 < 1/snr] over the SNR grid and fit the
    diversity slope of the estimates."""
    for snr in cfg.snr_grid:
        analytic = float(special.gammainc(cfg.l, cfg.l / (snr * cfg.fade_variance)))
        _refuse_rare(analytic, snr, "mean-fade outage")
    successes = []
    for g, snr in enumerate(cfg.snr_grid):
        threshold = 1.0 / snr
        successes.append(
            _count_events(cfg, g, lambda f: f.mean(axis=1) < threshold, threads)
        )
    return _assemble(cfg, successes)


def default_secret_rate(multiplex_ratio: float, snr: float) -> float:
    """Threshold rate in bits per sub-channel: multiplex_ratio * log2(snr)."""
    return multiplex_ratio * math.log2(snr)


def estimate_rate_outage(
    cfg: TrialConfig,
    secret_rate_fn: Callable[[float, float], float] = default_secret_rate,
    threads: int = 1,
) -> EmpiricalOutage:
    """Estimate Pr[sum_i log2(1 + |F_i|^2 * snr) < l * rate] over the SNR grid,
    where rate = secret_rate_fn(multiplex_ratio, snr), and fit the diversity
    slope of the estimates."""
    rates = [float(secret_rate_fn(cfg.multiplex_ratio, snr)) for snr in cfg.snr_grid]
    if any(r < 0 for r in rates):
        raise ValueError("secret_rate_fn must return non-negative rates")
    for snr, rate in zip(cfg.snr_grid, rates):
        threshold = (2.0**rate - 1.0) / snr
        analytic = float(
            special.gammainc(cfg.l, cfg.l * threshold / cfg.fade_variance)
        )
        _refuse_rare(analytic, snr, "rate outage")
    successes = []
    for g, (snr, rate) in enumerate(zip(cfg.snr_grid, rates)):
        target = cfg.l * rate

        def event(f: np.ndarray, snr=snr, target=target) -> np.ndarray:
            return np.log2(1.0 + f * snr).sum(axis=1) < target

        successes.append(_count_events(cfg, g, event, threads))
    return _assemble(cfg, successes)
