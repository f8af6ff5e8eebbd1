"""
Experiments over agent mixes and seeds.

A sweep runs every (mix, seed) cell with seeds shared across mixes, so
differences between mixes come from the mix alone. The gamma analysis
windows a run, bins windows by the share of switchers holding
information and reports the mean windowed volatility per bin.
"""

import logging
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field
from pathlib import Path

import numpy as np
import pandas as pd
from scipy import stats

from .agents import AgentKind
from .conf import SimConfig, table8_mixes
from .exceptions import ExperimentError
from .exports import read_json, write_csv, write_json, write_run
from .simulation import run_market
from .streams import derive_seeds

logger = logging.getLogger(__name__)

PROFIT_GROUPS = (AgentKind.INFORMED.value, AgentKind.UNINFORMED.value, AgentKind.SWITCHER.value)


@dataclass(frozen=True)
class ExperimentPlan:
    mixes: tuple
    seeds: tuple
    base: SimConfig = field(default_factory=SimConfig)
    gamma_window: int = 50
    gamma_bins: int = 10

    def validate(self):
        if not self.mixes or not self.seeds:
            raise ExperimentError('plan needs at least one mix and one seed')
        for mix in self.mixes:
            if not (math.isclose(mix.informed, 0.12) and math.isclose(mix.zero_intelligence, 0.58)):
                raise ExperimentError(f'mix {mix} must keep informed at 12% and zero intelligence at 58%')
            self.base.with_changes(mix=mix).validate()
        if self.gamma_window < 10 or self.gamma_bins < 1:
            raise ExperimentError('gamma_window must be >= 10 and gamma_bins >= 1')
        return self

    def configs(self):
        """Every cell's config, seeds shared across mixes"""
        return [self.base.with_changes(mix=mix, seed=seed) for mix in self.mixes for seed in self.seeds]

    def to_dict(self):
        return {
            'mixes': [asdict(m) for m in self.mixes],
            'seeds': list(self.seeds),
            'base': self.base.to_dict(),
            'gamma_window': self.gamma_window,
            'gamma_bins': self.gamma_bins,
        }


def table8_plan(base=None, n_seeds=30, master_seed=None, **kwargs):
    base = base or SimConfig()
    master = base.seed if master_seed is None else master_seed
    return ExperimentPlan(mixes=tuple(table8_mixes()), seeds=tuple(derive_seeds(master, n_seeds)),
                          base=base, **kwargs)


@dataclass
class GammaTable:
    centers: np.ndarray
    volatility: np.ndarray
    counts: np.ndarray
    windows: int

    @property
    def spearman(self):
        occupied = self.counts > 0
        if occupied.sum() < 3:
            return float('nan')
        return float(stats.spearmanr(self.centers[occupied], self.volatility[occupied]).statistic)

    def frame(self):
        return pd.DataFrame({'bin_center': self.centers, 'mean_volatility': self.volatility, 'count': self.counts})


def gamma_windows(prices, gamma, window):
    """(mean gamma, return std) for consecutive windows of steps"""
    returns = np.diff(np.log(np.asarray(prices, dtype=float)))
    gamma = np.asarray(gamma, dtype=float)
    n = (min(len(returns), len(gamma)) // window) * window
    if n == 0:
        raise ExperimentError('run is shorter than one gamma window')
    mean_gamma = gamma[:n].reshape(-1, window).mean(axis=1)
    vol = returns[:n].reshape(-1, window).std(axis=1, ddof=1)
    return mean_gamma, vol


def bin_gamma(mean_gamma, vol, bins):
    edges = np.linspace(0.0, 1.0, bins + 1)
    index = np.clip((np.asarray(mean_gamma) * bins).astype(int), 0, bins - 1)
    counts = np.bincount(index, minlength=bins)
    sums = np.bincount(index, weights=vol, minlength=bins)
    with np.errstate(invalid='ignore', divide='ignore'):
        volatility = np.where(counts > 0, sums / np.maximum(counts, 1), np.nan)
    return GammaTable(centers=(edges[:-1] + edges[1:]) / 2, volatility=volatility,
                      counts=counts, windows=len(mean_gamma))


def gamma_analysis(result, window=50, bins=10):
    """Volatility against the share of switchers buying information"""
    if result.gamma is None:
        raise ExperimentError('run has no switchers; gamma is undefined')
    if window < 10:
        raise ExperimentError('gamma window must be at least 10 steps')
    mean_gamma, vol = gamma_windows(result.prices, result.gamma, window)
    return bin_gamma(mean_gamma, vol, bins)


@dataclass
class SweepCell:
    rho: float
    seed: int
    volatility: float
    profits: dict
    mean_gamma: float = None
    spearman: float = None
    gamma_table: dict = None
    run_dir: str = None


def _run_cell(config, window, bins, outdir):
    result = run_market(config)
    cell = SweepCell(rho=config.mix.switchers, seed=config.seed, volatility=result.volatility,
                     profits={g: {'mean': result.mean_profit(g), 'net_mean': result.mean_profit(g, net=True)}
                              for g in PROFIT_GROUPS},
                     mean_gamma=result.mean_gamma)
    if result.gamma is not None:
        table = gamma_analysis(result, window, bins)
        cell.spearman = table.spearman
        cell.gamma_table = {'counts': table.counts.tolist(), 'volatility': table.volatility.tolist()}
    if outdir is not None:
        cell.run_dir = str(write_run(result, Path(outdir) / 'runs' / f'{config.mix.label}_seed{config.seed}'))
    return cell


@dataclass
class SweepReport:
    plan: ExperimentPlan
    cells: list

    def frame(self):
        rows = []
        for cell in self.cells:
            row = {'rho': cell.rho, 'seed': cell.seed, 'volatility': cell.volatility,
                   'mean_gamma': cell.mean_gamma, 'spearman': cell.spearman}
            for group in PROFIT_GROUPS:
                row[f'{group}_mean'] = cell.profits[group]['mean']
                row[f'{group}_net'] = cell.profits[group]['net_mean']
            rows.append(row)
        return pd.DataFrame(rows)

    def volatility_table(self):
        """Mean run volatility per rho"""
        frame = self.frame()
        return frame.groupby('rho', as_index=False).agg(mean_volatility=('volatility', 'mean'),
                                                      runs=('volatility', 'size'))

    def returns_table(self, group, net=False):
        """Mean order return of one group against rho, per seed and averaged"""
        column = f'{group}_{"net" if net else "mean"}'
        frame = self.frame().pivot(index='rho', columns='seed', values=column)
        frame.columns = [f'seed_{s}' for s in frame.columns]
        frame['average'] = frame.mean(axis=1)
        return frame.reset_index()

    def gamma_table(self, rho):
        """Bin table for one rho, volatility averaged over seeds"""
        cells = [c for c in self.cells if math.isclose(c.rho, rho) and c.gamma_table]
        if not cells:
            raise ExperimentError(f'no gamma data for rho={rho}')
        bins = self.plan.gamma_bins
        counts = np.sum([c.gamma_table['counts'] for c in cells], axis=0)
        vols = np.array([c.gamma_table['volatility'] for c in cells], dtype=float)
        with np.errstate(invalid='ignore'):
            weights = np.array([c.gamma_table['counts'] for c in cells], dtype=float)
            volatility = np.nansum(vols * weights, axis=0) / np.where(counts > 0, counts, np.nan)
        edges = np.linspace(0.0, 1.0, bins + 1)
        return GammaTable(centers=(edges[:-1] + edges[1:]) / 2, volatility=volatility,
                          counts=counts, windows=int(counts.sum()))

    def mean_spearman(self, rho):
        values = [c.spearman for c in self.cells
                  if math.isclose(c.rho, rho) and c.spearman is not None and math.isfinite(c.spearman)]
        return float(np.mean(values)) if values else float('nan')

    def ordering_checks(self):
        table = self.volatility_table()
        means = table['mean_volatility'].to_numpy()
        frame = self.frame()
        per_seed = frame.pivot(index='seed', columns='rho', values='volatility')
        baseline = per_seed.columns.min()
        others = [c for c in per_seed.columns if c != baseline]
        smallest = bool((per_seed[others].gt(per_seed[baseline], axis=0)).all().all()) if others else None
        return {
            'volatility_increasing': bool(np.all(np.diff(means) > 0)),
            'baseline_smallest_every_seed': smallest,
        }

    def write(self, outdir):
        outdir = Path(outdir)
        outdir.mkdir(parents=True, exist_ok=True)
        write_csv(outdir / 'cells.csv', self.frame())
        write_csv(outdir / 'table9.csv', self.volatility_table())
        for suffix, group, net in (('a', 'informed', False), ('b', 'uninformed', False), ('c', 'switcher', True)):
            write_csv(outdir / f'fig7{suffix}.csv', self.returns_table(group, net))
        gamma_frames = []
        for rho in sorted({c.rho for c in self.cells if c.gamma_table}):
            frame = self.gamma_table(rho).frame()
            frame.insert(0, 'rho', rho)
            gamma_frames.append(frame)
        if gamma_frames:
            write_csv(outdir / 'fig8.csv', pd.concat(gamma_frames, ignore_index=True))
        write_json(outdir / 'sweep.json', {'plan': self.plan.to_dict(), 'checks': self.ordering_checks(),
                                           'spearman': {str(r): self.mean_spearman(r) for r in
                                                        sorted({c.rho for c in self.cells if c.rho > 0})}})
        return outdir


def run_sweep(plan, threads=1, outdir=None):
    """Run every (mix, seed) cell; a failure aborts with the finished cells attached"""
    plan.validate()
    configs = plan.configs()
    logger.info('sweep: %d mixes x %d seeds = %d runs', len(plan.mixes), len(plan.seeds), len(configs))
    cells = []
    try:
        if threads > 1:
            with ProcessPoolExecutor(max_workers=threads) as pool:
                futures = [pool.submit(_run_cell, c, plan.gamma_window, plan.gamma_bins, outdir) for c in configs]
                for future in futures:
                    cells.append(future.result())
        else:
            for config in configs:
                cells.append(_run_cell(config, plan.gamma_window, plan.gamma_bins, outdir))
    except Exception as exc:
        partial = SweepReport(plan, cells)
        if outdir is not None and cells:
            partial.write(Path(outdir) / 'partial')
        raise ExperimentError(f'sweep aborted after {len(cells)} of {len(configs)} runs: {exc}',
                              partial=partial) from exc
    report = SweepReport(plan, cells)
    if outdir is not None:
        report.write(outdir)
    return report


def sweep_from_dict(plan, data):
    """Rebuild a report from the cells saved by a checkpoint"""
    return SweepReport(plan, [SweepCell(**cell) for cell in data])


class Checkpoint:
    """Stage results saved as JSON under <outdir>/checkpoints"""

    def __init__(self, outdir):
        self.root = Path(outdir) / 'checkpoints'
        self.root.mkdir(parents=True, exist_ok=True)

    def load(self, stage):
        path = self.root / f'{stage}.json'
        return read_json(path) if path.exists() else None

    def save(self, stage, data):
        target = self.root / f'{stage}.json'
        tmp = target.with_suffix('.tmp')
        write_json(tmp, data)
        tmp.replace(target)
        return data
