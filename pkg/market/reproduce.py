"""
End-to-end reproduction bundle.

Stages run in order and each is checkpointed, so an interrupted pipeline
resumes where it stopped:

    calibration -> validity battery -> mix sweep -> gamma analysis -> bundle

The bundle holds tables/table1..9.csv, figures/fig1..8.csv and report.md.
Nothing in it depends on wall-clock time, so a rerun with the same master
seed reproduces it byte for byte.
"""

import logging
from dataclasses import asdict
from pathlib import Path

import numpy as np
import pandas as pd
from scipy import stats

from .calibration import (CostSample, GaussianFit, histogram_frame, information_cost, run_calibration_campaign,
                          samples_frame)
from .conf import SimConfig, table8_mixes
from .experiments import Checkpoint, ExperimentPlan, run_sweep, sweep_from_dict
from .exports import read_prices, write_csv, write_run
from .simulation import run_market
from .streams import derive_seeds
from .stylized import acf, arch_lm, describe, hurst_rs

logger = logging.getLogger(__name__)

SMOKE_STEPS = 4000
SMOKE_SEEDS = 5
HURST_RUNS = 5
ARCH_RUNS = 10

ORDER_RULES = [
    ('1: bid and ask exist', 'p_e > ask + mu', 'market buy'),
    ('1: bid and ask exist', 'ask + mu >= p_e >= bid - mu and |ask - p_e| <= |p_e - bid|', 'limit buy at p_e - mu'),
    ('1: bid and ask exist', 'ask + mu >= p_e >= bid - mu and |ask - p_e| > |p_e - bid|', 'limit sell at p_e + mu'),
    ('1: bid and ask exist', 'p_e < bid - mu', 'market sell'),
    ('2: no bids', 'p_e > ask + mu', 'market buy'),
    ('2: no bids', 'p_e <= ask + mu', 'limit buy at p_e - mu'),
    ('3: no asks', 'p_e < bid - mu', 'market sell'),
    ('3: no asks', 'p_e >= bid - mu', 'limit sell at p_e + mu'),
    ('4: empty book', 'probability 1/2', 'limit buy at p_e - mu'),
    ('4: empty book', 'probability 1/2', 'limit sell at p_e + mu'),
]


def _stage_calibration(checkpoint, base, runs, threads):
    saved = checkpoint.load('calibration')
    if saved is not None:
        return saved
    calibration_base = base.with_changes(mix=table8_mixes()[0])
    samples = run_calibration_campaign(calibration_base, runs, threads=threads)
    info_cost, fit, mean_gap = information_cost(samples)
    return checkpoint.save('calibration', {
        'samples': [asdict(s) for s in samples],
        'fit': fit,
        'info_cost': info_cost,
        'mean_gap': mean_gap,
    })


def _stage_validity(checkpoint, base, seeds, outdir):
    saved = checkpoint.load('validity')
    if saved is not None:
        return saved
    baseline = base.with_changes(mix=table8_mixes()[0])
    hurst_rows = []
    arch_rows = []
    run_dir = None
    for index, seed in enumerate(seeds):
        result = run_market(baseline.with_changes(seed=seed))
        if index == 0:
            run_dir = str(write_run(result, Path(outdir) / 'baseline'))
        if index < HURST_RUNS:
            hurst_rows.append({'run': index + 1, 'seed': seed,
                               'fundamental': hurst_rs(result.fundamental_returns),
                               'market': hurst_rs(result.price_returns)})
        arch_rows.append({'seed': seed,
                          'market_b_pvalue': arch_lm(result.price_returns).b_pvalue,
                          'fundamental_b_pvalue': arch_lm(result.fundamental_returns).b_pvalue})
    return checkpoint.save('validity', {'run_dir': run_dir, 'hurst': hurst_rows, 'arch': arch_rows})


def _stage_sweep(checkpoint, plan, threads, outdir):
    saved = checkpoint.load('sweep')
    if saved is not None:
        return sweep_from_dict(plan, saved['cells'])
    report = run_sweep(plan, threads=threads, outdir=Path(outdir) / 'sweep')
    checkpoint.save('sweep', {'cells': [asdict(c) for c in report.cells]})
    return report


def _arch_frames(report):
    test = pd.DataFrame([
        {'statistic': 'F-statistic', 'value': report.f_stat, 'probability': report.f_pvalue},
        {'statistic': 'Obs*R-squared', 'value': report.obs_r2, 'probability': report.obs_r2_pvalue},
    ])
    coefficients = pd.DataFrame([
        {'variable': 'a', 'coefficient': report.a, 'std_error': report.a_se,
         't_statistic': report.a_t, 'probability': report.a_pvalue},
        {'variable': 'b', 'coefficient': report.b, 'std_error': report.b_se,
         't_statistic': report.b_t, 'probability': report.b_pvalue},
    ])
    return test, coefficients


def _return_histogram(returns, bins=60):
    counts, edges = np.histogram(returns, bins=bins)
    centers = (edges[:-1] + edges[1:]) / 2
    width = edges[1] - edges[0]
    normal = len(returns) * width * stats.norm.pdf(centers, np.mean(returns), np.std(returns, ddof=1))
    return pd.DataFrame({'bin_center': centers, 'count': counts, 'normal': normal})


def _table2(base):
    rows = [('v0', base.v0), ('tick', base.tick), ('mu', base.mu), ('phi', base.phi),
            ('lambda', base.order_rate), ('tau', base.lag), ('steps', base.steps),
            ('agents', base.n_agents)]
    return pd.DataFrame(rows, columns=['parameter', 'value'])


def _table8():
    rows = []
    for index, mix in enumerate(table8_mixes(), start=1):
        rows.append({'simulation': index, 'informed': mix.informed, 'uninformed': mix.uninformed,
                     'zero_intelligence': mix.zero_intelligence, 'switchers': mix.switchers})
    return pd.DataFrame(rows)


def return_checks(report):
    """Per-type return criteria, each evaluated only where the groups exist.

    Switchers against uninformed agents is paired by (rho, seed) over every
    row holding both. The trend checks compare a group's mean return at the
    largest rho where it exists with the smallest.
    """
    frame = report.frame()
    checks = {}
    informed = frame.groupby('rho')['informed_mean'].mean().dropna()
    if len(informed) > 1:
        checks['informed return varies < 30% across rho'] = bool(
            (informed.max() - informed.min()) < 0.3 * abs(informed.mean()))
    both = frame[['switcher_net', 'uninformed_mean']].dropna()
    if len(both):
        checks['switcher net >= uninformed in >= 70% of paired runs'] = bool(
            (both['switcher_net'] >= both['uninformed_mean']).mean() >= 0.7)
    uninformed = frame.groupby('rho')['uninformed_mean'].mean().dropna()
    if len(uninformed) > 1:
        checks['uninformed return lower at largest rho than at smallest'] = bool(
            uninformed.iloc[-1] < uninformed.iloc[0])
    switcher = frame.groupby('rho')['switcher_net'].mean().dropna()
    if len(switcher) > 1:
        checks['switcher net return lower at largest rho than at smallest'] = bool(
            switcher.iloc[-1] < switcher.iloc[0])
    return checks


def _checks(calibration, market_stats, fundamental_hurst, validity, report, smoke):
    fit = calibration['fit']
    volatility = report.volatility_table()
    rhos = list(volatility['rho'])
    top = max(rhos)
    arch = pd.DataFrame(validity['arch'])
    checks = {
        'calibration mean gap positive': calibration['mean_gap'] > 0,
        'calibration adjusted R2 > 0.85': bool(fit and fit['r2_adj'] > 0.85),
        'calibration mean within 3x of 0.36': bool(fit and 0.12 <= fit['b'] <= 1.08),
        'market kurtosis > 4': market_stats['describe']['kurtosis'] > 4,
        'Jarque-Bera rejects at 1%': market_stats['describe']['jb_pvalue'] < 0.01,
        'market ARCH b significant at 1% in >= 80% of runs': bool((arch['market_b_pvalue'] < 0.01).mean() >= 0.8),
        'fundamental ARCH b insignificant at 5% in >= 80% of runs':
            bool((arch['fundamental_b_pvalue'] > 0.05).mean() >= 0.8),
        'returns ACF inside band for >= 90% of lags': market_stats['acf_inside'] >= 0.9,
        'absolute returns ACF positive for >= 80% of lags': market_stats['acf_abs_positive'] >= 0.8,
        'fundamental Hurst in [0.45, 0.62]': all(0.45 <= h <= 0.62 for h in fundamental_hurst),
        'market Hurst > 0.65 in >= 4 of 5 runs': sum(r['market'] > 0.65 for r in validity['hurst']) >= 4,
        'volatility strictly increasing in rho': report.ordering_checks()['volatility_increasing'],
        'rho=0 volatility within 3x of 0.00043':
            0.00043 / 3 <= float(volatility['mean_volatility'].iloc[0]) <= 0.00043 * 3,
    }
    if top > 0:
        checks['rho=0 volatility below largest rho'] = bool(
            volatility['mean_volatility'].iloc[0] < volatility['mean_volatility'].iloc[-1])
        checks['switchers bought information at largest rho'] = bool(
            report.frame().groupby('rho')['mean_gamma'].mean().loc[top] > 0)
        checks['gamma Spearman < -0.3 at largest rho'] = report.mean_spearman(top) < -0.3
        checks.update(return_checks(report))
    if smoke:
        checks = {f'{name} (smoke tolerances)': value for name, value in checks.items()}
    return checks


def _markdown_table(frame):
    def cell(value):
        return f'{value:.6g}' if isinstance(value, (float, np.floating)) else str(value)

    lines = ['| ' + ' | '.join(map(str, frame.columns)) + ' |',
             '|' + ' --- |' * len(frame.columns)]
    for row in frame.itertuples(index=False):
        lines.append('| ' + ' | '.join(cell(v) for v in row) + ' |')
    return '\n'.join(lines)


def _report_markdown(calibration, tables, checks, smoke):
    lines = ['# Artificial market reproduction report', '']
    if smoke:
        lines += ['Smoke mode: shortened runs and few seeds; checks are indicative only.', '']
    fit = calibration['fit']
    lines += ['## Information cost', '',
              f"- mean profit gap: {calibration['mean_gap']:.6f}",
              f"- information cost used: {calibration['info_cost']:.6f}"]
    if fit:
        lines.append(f"- fit: a={fit['a']:.4f} b={fit['b']:.6f} c={fit['c']:.6f} "
                     f"sigma={fit['sigma']:.6f} adjusted R2={fit['r2_adj']:.4f} bins={fit['bins']}")
    else:
        lines.append('- fit: did not converge')
    lines += ['', '## Checks', '', '| check | result |', '| --- | --- |']
    lines += [f"| {name} | {'pass' if ok else 'FAIL'} |" for name, ok in checks.items()]
    for name in ('table3', 'table7', 'table9'):
        lines += ['', f'## {name}', '', _markdown_table(tables[name])]
    return '\n'.join(lines) + '\n'


def reproduce_results(outdir, base=None, runs_per_mix=30, calibration_runs=200, smoke=False, threads=1):
    """Run every stage and write the bundle; returns the check results"""
    outdir = Path(outdir)
    base = (base or SimConfig()).validate()
    if smoke:
        base = base.with_changes(steps=min(base.steps, SMOKE_STEPS))
        runs_per_mix = min(runs_per_mix, SMOKE_SEEDS)
        calibration_runs = min(calibration_runs, 30)
    checkpoint = Checkpoint(outdir)

    logger.info('reproduce: calibration stage (%d runs)', calibration_runs)
    calibration = _stage_calibration(checkpoint, base, calibration_runs, threads)
    base = base.with_changes(info_cost=calibration['info_cost'])

    seeds = derive_seeds(base.seed, max(runs_per_mix, HURST_RUNS, ARCH_RUNS))
    logger.info('reproduce: validity stage (%d runs)', ARCH_RUNS)
    validity = _stage_validity(checkpoint, base, seeds[:max(HURST_RUNS, ARCH_RUNS)], outdir)

    logger.info('reproduce: sweep stage (%d seeds per mix)', runs_per_mix)
    plan = ExperimentPlan(mixes=tuple(table8_mixes()), seeds=tuple(seeds[:runs_per_mix]), base=base)
    report = _stage_sweep(checkpoint, plan, threads, outdir)

    prices = read_prices(Path(validity['run_dir']) / 'prices.csv')
    market_returns = prices['log_ret_p'].dropna().to_numpy()
    fundamental_returns = prices['log_ret_v'].dropna().to_numpy()
    market_desc = describe(market_returns)
    market_arch = arch_lm(market_returns)
    fundamental_arch = arch_lm(fundamental_returns)
    returns_acf = acf(market_returns, 50)
    absolute_acf = acf(np.abs(market_returns), 50)

    samples = [CostSample(**s) for s in calibration['samples']]
    fund_test, fund_coef = _arch_frames(fundamental_arch)
    fund_test['variable'] = ''
    market_test, market_coef = _arch_frames(market_arch)
    tables = {
        'table1': pd.DataFrame(ORDER_RULES, columns=['case', 'scenario', 'order']),
        'table2': _table2(base),
        'table3': pd.DataFrame([{'statistic': k, 'value': v} for k, v in market_desc.items()]),
        'table4': pd.concat([fund_test, fund_coef], ignore_index=True),
        'table5': market_test,
        'table6': market_coef,
        'table7': pd.DataFrame(validity['hurst']),
        'table8': _table8(),
        'table9': report.volatility_table(),
    }
    fig7 = report.frame().groupby('rho', as_index=False).agg(
        informed=('informed_mean', 'mean'), uninformed=('uninformed_mean', 'mean'),
        switcher_net=('switcher_net', 'mean'))
    gamma_frames = []
    for rho in sorted({c.rho for c in report.cells if c.gamma_table}):
        frame = report.gamma_table(rho).frame()
        frame.insert(0, 'rho', rho)
        gamma_frames.append(frame)
    figures = {
        'fig1': histogram_frame(samples, GaussianFit(**{k: v for k, v in calibration['fit'].items() if k != 'sigma'}))
        if calibration['fit'] else samples_frame(samples),
        'fig2': prices[['t', 'v', 'p']],
        'fig3': _return_histogram(market_returns),
        'fig4': prices[['t', 'log_ret_v']].dropna(),
        'fig5': prices[['t', 'log_ret_p']].dropna(),
        'fig6': pd.DataFrame({'lag': np.arange(1, 51), 'returns': returns_acf.values,
                              'absolute_returns': absolute_acf.values, 'band': returns_acf.band}),
        'fig7': fig7,
        'fig8': pd.concat(gamma_frames, ignore_index=True) if gamma_frames
        else pd.DataFrame(columns=['rho', 'bin_center', 'mean_volatility', 'count']),
    }

    (outdir / 'tables').mkdir(parents=True, exist_ok=True)
    (outdir / 'figures').mkdir(parents=True, exist_ok=True)
    for name, frame in tables.items():
        write_csv(outdir / 'tables' / f'{name}.csv', frame)
    for name, frame in figures.items():
        write_csv(outdir / 'figures' / f'{name}.csv', frame)
    write_csv(outdir / 'calibration.csv', samples_frame(samples))

    market_stats = {
        'describe': market_desc,
        'acf_inside': float(np.mean(returns_acf.inside_band())),
        'acf_abs_positive': float(np.mean(absolute_acf.values > 0)),
    }
    checks = _checks(calibration, market_stats, [r['fundamental'] for r in validity['hurst']],
                     validity, report, smoke)
    (outdir / 'report.md').write_text(_report_markdown(calibration, tables, checks, smoke))
    logger.info('reproduce: bundle written to %s', outdir)
    return checks
