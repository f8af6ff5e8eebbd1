"""
Information cost calibration.

Switcher-free markets are run many times; each run contributes the gap
between the informed and uninformed mean order profits. A curve
a*exp(-((x-b)/c)^2) is fitted to the histogram of gaps and turned into
a cost sampler.
"""

import logging
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass

import numpy as np
import pandas as pd
from scipy import optimize

from .agents import AgentKind
from .costs import CostSampler
from .exceptions import CalibrationError, FitError
from .simulation import run_market
from .streams import derive_seeds

logger = logging.getLogger(__name__)

MIN_SAMPLES = 30


@dataclass(frozen=True)
class CostSample:
    seed: int
    gap: float


@dataclass(frozen=True)
class GaussianFit:
    a: float
    b: float
    c: float
    r2: float
    r2_adj: float
    bins: int

    @property
    def sigma(self):
        return self.c / math.sqrt(2.0)

    def to_dict(self):
        return {**asdict(self), 'sigma': self.sigma}


def gaussian_curve(x, a, b, c):
    return a * np.exp(-((x - b) / c) ** 2)


def _profit_gap(config):
    result = run_market(config)
    gap = result.mean_profit(AgentKind.INFORMED.value) - result.mean_profit(AgentKind.UNINFORMED.value)
    return CostSample(seed=config.seed, gap=float(gap))


def run_calibration_campaign(base, n_runs, threads=1, seeds=None):
    """One profit-gap sample per independent switcher-free run"""
    if base.mix.switchers != 0:
        raise CalibrationError('calibration markets must not contain switchers')
    if n_runs < 1:
        raise CalibrationError('n_runs must be >= 1')
    seeds = seeds if seeds is not None else derive_seeds(base.seed, n_runs)
    configs = [base.with_changes(seed=seed).validate() for seed in seeds[:n_runs]]
    logger.info('calibration campaign: %d runs, %d workers', len(configs), threads)
    if threads > 1:
        with ProcessPoolExecutor(max_workers=threads) as pool:
            samples = list(pool.map(_profit_gap, configs))
    else:
        samples = [_profit_gap(config) for config in configs]
    gaps = [s.gap for s in samples if math.isfinite(s.gap)]
    if gaps:
        logger.info('calibration campaign done: mean gap %.4f over %d runs', np.mean(gaps), len(gaps))
    return samples


def freedman_diaconis_bins(values):
    q75, q25 = np.percentile(values, [75, 25])
    width = 2 * (q75 - q25) / len(values) ** (1 / 3)
    if width <= 0:
        return 10
    return max(int(math.ceil((values.max() - values.min()) / width)), 4)


def fit_gaussian_curve(centers, counts, initial, max_nfev=2000):
    """Levenberg-Marquardt fit of the curve to binned counts; returns (a, b, c, r2, r2_adj)"""
    centers = np.asarray(centers, dtype=float)
    counts = np.asarray(counts, dtype=float)
    n = len(counts)
    if n <= 3:
        raise FitError('need more than three bins to fit three parameters', last_iterate=tuple(initial))

    def residuals(params):
        return gaussian_curve(centers, *params) - counts

    solution = optimize.least_squares(residuals, initial, method='lm', max_nfev=max_nfev)
    a, b, c = solution.x
    if not solution.success or not np.all(np.isfinite(solution.x)) or abs(c) < 1e-12:
        logger.warning('gaussian fit failed: %s', solution.message)
        raise FitError(f'gaussian fit did not converge: {solution.message}', last_iterate=tuple(solution.x))
    ss_res = float(np.sum(solution.fun ** 2))
    ss_tot = float(np.sum((counts - counts.mean()) ** 2))
    r2 = 1.0 - ss_res / ss_tot if ss_tot > 0 else float('nan')
    r2_adj = 1.0 - (1.0 - r2) * (n - 1) / (n - 3)
    return float(a), float(b), abs(float(c)), r2, r2_adj


def histogram(samples, bins=None):
    values = np.array([s.gap for s in samples], dtype=float)
    values = values[np.isfinite(values)]
    bins = bins or freedman_diaconis_bins(values)
    counts, edges = np.histogram(values, bins=bins)
    return values, counts, edges


def fit_gaussian(samples, bins=None):
    """Histogram the gaps and fit the curve from moment-based starting values"""
    if len(samples) < MIN_SAMPLES:
        raise CalibrationError(f'need at least {MIN_SAMPLES} samples, got {len(samples)}')
    values = np.array([s.gap for s in samples], dtype=float)
    values = values[np.isfinite(values)]
    spread = float(np.std(values, ddof=1)) if len(values) > 1 else 0.0
    initial = (float(len(values)), float(np.mean(values)) if len(values) else 0.0, math.sqrt(2.0) * spread)
    if len(values) < MIN_SAMPLES or spread == 0:
        raise FitError('samples are degenerate (zero spread)', last_iterate=initial)

    values, counts, edges = histogram(samples, bins)
    centers = (edges[:-1] + edges[1:]) / 2
    initial = (float(counts.max()), initial[1], initial[2])
    a, b, c, r2, r2_adj = fit_gaussian_curve(centers, counts, initial)
    fit = GaussianFit(a=a, b=b, c=c, r2=r2, r2_adj=r2_adj, bins=len(counts))
    logger.info('gaussian fit a=%.3f b=%.4f c=%.5f adj R2=%.4f', a, b, c, r2_adj)
    return fit


def cost_distribution(fit):
    if fit.c <= 0:
        raise CalibrationError('fit width must be positive')
    return CostSampler.from_width(fit.b, fit.c)


def information_cost(samples):
    """Cost C for switchers in this market: the fitted centre, else the mean gap.

    Returns (info_cost, fit dict or None, mean gap). A non-positive result
    is clamped to zero.
    """
    gaps = [s.gap for s in samples if math.isfinite(s.gap)]
    if not gaps:
        raise CalibrationError('no finite profit gaps to calibrate on')
    mean_gap = float(np.mean(gaps))
    try:
        fit = fit_gaussian(samples).to_dict()
        info_cost = fit['b']
    except CalibrationError as exc:
        logger.warning('calibration fit unavailable (%s); using the sample mean gap', exc)
        fit = None
        info_cost = mean_gap
    if not info_cost > 0:
        logger.warning('calibrated information cost %.6f is not positive; switchers get it for free', info_cost)
        info_cost = 0.0
    return info_cost, fit, mean_gap


def samples_frame(samples):
    return pd.DataFrame([asdict(s) for s in samples], columns=['seed', 'gap'])


def histogram_frame(samples, fit):
    """Bin centres, counts and fitted curve values"""
    _, counts, edges = histogram(samples, fit.bins)
    centers = (edges[:-1] + edges[1:]) / 2
    return pd.DataFrame({
        'bin_center': centers,
        'count': counts,
        'fitted': gaussian_curve(centers, fit.a, fit.b, fit.c),
    })
