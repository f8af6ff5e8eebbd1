"""
Stylized facts of return series.

Descriptive moments with Jarque-Bera, the one-lag ARCH-LM regression on
AR(1) residuals, sample autocorrelations with their 95% band, and Hurst
exponents by rescaled range (default) or detrended fluctuation analysis.
"""

import math
from dataclasses import asdict, dataclass

import numpy as np
import statsmodels.api as sm
from scipy import stats
from statsmodels.tsa.stattools import acf as sample_acf

from .exceptions import StatsError

MARKET = 'market'
FUNDAMENTAL = 'fundamental'


@dataclass
class ReturnSeries:
    r: np.ndarray
    source: str = MARKET

    def __post_init__(self):
        self.r = np.asarray(self.r, dtype=float)
        if self.r.ndim != 1 or len(self.r) < 2:
            raise StatsError('return series needs at least two observations')
        if not np.all(np.isfinite(self.r)):
            raise StatsError('return series contains non-finite values')

    def __len__(self):
        return len(self.r)

    @classmethod
    def from_prices(cls, prices, source=MARKET):
        prices = np.asarray(prices, dtype=float)
        if np.any(prices <= 0):
            raise StatsError('prices must be positive for log returns')
        return cls(np.diff(np.log(prices)), source)


def _series(r):
    return r if isinstance(r, ReturnSeries) else ReturnSeries(r)


def describe(r):
    """Moments, un-excess kurtosis and the Jarque-Bera test"""
    x = _series(r).r
    if len(x) < 8:
        raise StatsError('describe needs at least 8 observations')
    std = float(np.std(x, ddof=1))
    if std == 0:
        raise StatsError('series is constant; Jarque-Bera is undefined')
    skewness = float(stats.skew(x))
    kurtosis = float(stats.kurtosis(x, fisher=False))
    jb = stats.jarque_bera(x)
    return {
        'mean': float(np.mean(x)),
        'median': float(np.median(x)),
        'max': float(np.max(x)),
        'min': float(np.min(x)),
        'std': std,
        'skewness': skewness,
        'kurtosis': kurtosis,
        'jarque_bera': float(jb.statistic),
        'jb_pvalue': float(jb.pvalue),
        'observations': len(x),
    }


@dataclass
class ArchReport:
    ar1: tuple
    a: float
    a_se: float
    a_t: float
    a_pvalue: float
    b: float
    b_se: float
    b_t: float
    b_pvalue: float
    f_stat: float
    f_pvalue: float
    obs_r2: float
    obs_r2_pvalue: float
    observations: int

    def to_dict(self):
        return asdict(self)


def arch_lm(r):
    """Regress squared AR(1) residuals on their first lag"""
    x = _series(r).r
    if len(x) < 50:
        raise StatsError('ARCH-LM needs at least 50 observations')
    ar1 = sm.OLS(x[1:], sm.add_constant(x[:-1], has_constant='add')).fit()
    squared = ar1.resid ** 2
    lagged = squared[:-1]
    if np.var(lagged) == 0:
        raise StatsError('residuals have zero variance; ARCH regression is singular')
    fit = sm.OLS(squared[1:], sm.add_constant(lagged, has_constant='add')).fit()
    obs_r2 = float(fit.nobs * fit.rsquared)
    return ArchReport(
        ar1=(float(ar1.params[0]), float(ar1.params[1])),
        a=float(fit.params[0]), a_se=float(fit.bse[0]), a_t=float(fit.tvalues[0]), a_pvalue=float(fit.pvalues[0]),
        b=float(fit.params[1]), b_se=float(fit.bse[1]), b_t=float(fit.tvalues[1]), b_pvalue=float(fit.pvalues[1]),
        f_stat=float(fit.fvalue), f_pvalue=float(fit.f_pvalue),
        obs_r2=obs_r2, obs_r2_pvalue=float(stats.chi2.sf(obs_r2, 1)),
        observations=int(fit.nobs),
    )


@dataclass
class AcfResult:
    values: np.ndarray
    band: float

    def inside_band(self):
        return np.abs(self.values) <= self.band


def acf(series, max_lag):
    """Autocorrelations at lags 1..max_lag and the +/-1.96/sqrt(n) band"""
    x = np.asarray(series, dtype=float)
    if len(x) <= max_lag + 1:
        raise StatsError(f'series of length {len(x)} too short for {max_lag} lags')
    values = sample_acf(x, nlags=max_lag, fft=False)[1:]
    return AcfResult(values=values, band=1.96 / math.sqrt(len(x)))


def window_sizes(n, min_window=32, count=20):
    """Geometrically spaced window sizes between min_window and n // 2"""
    top = n // 2
    if top < min_window:
        return np.array([], dtype=int)
    grid = np.geomspace(min_window, top, num=count)
    return np.unique(np.floor(grid).astype(int))


def hurst_rs(series, min_window=32):
    """Rescaled-range Hurst exponent"""
    x = np.asarray(series, dtype=float)
    n = len(x)
    if n < 512:
        raise StatsError('Hurst estimation needs at least 512 observations')
    sizes, ratios = [], []
    for w in window_sizes(n, min_window):
        blocks = x[:(n // w) * w].reshape(-1, w)
        deviations = blocks - blocks.mean(axis=1, keepdims=True)
        profile = np.cumsum(deviations, axis=1)
        spread = profile.max(axis=1) - profile.min(axis=1)
        scale = blocks.std(axis=1, ddof=1)
        valid = scale > 0
        if valid.any():
            sizes.append(w)
            ratios.append(np.mean(spread[valid] / scale[valid]))
    if len(sizes) < 4:
        raise StatsError('fewer than four usable window sizes')
    slope, _ = np.polyfit(np.log(sizes), np.log(ratios), 1)
    return float(slope)


def hurst_dfa(series, min_window=16, order=1):
    """Detrended fluctuation analysis Hurst exponent"""
    x = np.asarray(series, dtype=float)
    n = len(x)
    if n < 512:
        raise StatsError('Hurst estimation needs at least 512 observations')
    profile = np.cumsum(x - x.mean())
    sizes, fluctuations = [], []
    for s in window_sizes(n // 2, min_window):
        windows = profile[:(n // s) * s].reshape(-1, s)
        t = np.arange(s, dtype=float)
        coeffs = np.polynomial.polynomial.polyfit(t, windows.T, order)
        trend = np.polynomial.polynomial.polyval(t, coeffs)
        f2 = np.mean((windows - trend) ** 2, axis=1)
        sizes.append(s)
        fluctuations.append(math.sqrt(np.mean(f2)))
    if len(sizes) < 4:
        raise StatsError('fewer than four usable window sizes')
    slope, _ = np.polyfit(np.log(sizes), np.log(fluctuations), 1)
    return float(slope)


def hurst(series, method='rs'):
    if method == 'rs':
        return hurst_rs(series)
    if method == 'dfa':
        return hurst_dfa(series)
    raise ValueError(f'unknown Hurst method {method!r}')


def stylized_report(prices, fundamental, max_lag=50):
    """Full battery for one run; the contents of stats.json"""
    market = ReturnSeries.from_prices(prices, MARKET)
    fund = ReturnSeries.from_prices(fundamental, FUNDAMENTAL)
    returns_acf = acf(market.r, max_lag)
    absolute_acf = acf(np.abs(market.r), max_lag)
    squared_acf = acf(market.r ** 2, max_lag)
    return {
        'describe': describe(market),
        'describe_fundamental': describe(fund),
        'arch_market': arch_lm(market).to_dict(),
        'arch_fundamental': arch_lm(fund).to_dict(),
        'acf': {
            'band': returns_acf.band,
            'returns': returns_acf.values,
            'absolute_returns': absolute_acf.values,
            'squared_returns': squared_acf.values,
            'returns_inside_band': float(np.mean(returns_acf.inside_band())),
            'absolute_positive': float(np.mean(absolute_acf.values > 0)),
        },
        'hurst': {
            'market': hurst_rs(market.r),
            'fundamental': hurst_rs(fund.r),
            'market_dfa': hurst_dfa(market.r),
            'fundamental_dfa': hurst_dfa(fund.r),
        },
    }
