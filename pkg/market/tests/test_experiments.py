import math
import tempfile
from dataclasses import asdict
from pathlib import Path
from unittest import mock

import numpy as np
from django.test import SimpleTestCase

from market.conf import AgentMix, SimConfig, table8_mixes
from market.exceptions import ExperimentError
from market.experiments import (Checkpoint, ExperimentPlan, SweepCell, SweepReport, _run_cell, bin_gamma,
                                gamma_analysis, gamma_windows, run_sweep, sweep_from_dict, table8_plan)
from market.genetic import GAConfig
from market.reproduce import return_checks
from market.simulation import run_market

from .synthetic import small_config, switcher_mix


def sweep_base():
    return SimConfig(steps=150, lag=20, ga=GAConfig(interval=50, eval_window=25), seed=3)


class PlanTests(SimpleTestCase):
    def test_table8_plan(self):
        plan = table8_plan(sweep_base(), n_seeds=3).validate()
        configs = plan.configs()
        self.assertEqual(len(configs), 15)
        self.assertEqual({c.seed for c in configs[:3]}, {c.seed for c in configs[-3:]})
        self.assertEqual(sorted({c.mix.switchers for c in configs}), [0.0, 0.07, 0.15, 0.22, 0.30])

    def test_mix_must_hold_informed_and_zero_intelligence(self):
        plan = ExperimentPlan(mixes=(AgentMix(0.2, 0.22, 0.58, 0.0),), seeds=(1,), base=sweep_base())
        with self.assertRaises(ExperimentError):
            plan.validate()
        with self.assertRaises(ExperimentError):
            ExperimentPlan(mixes=(), seeds=(1,)).validate()
        with self.assertRaises(ExperimentError):
            ExperimentPlan(mixes=(AgentMix(),), seeds=(1,), base=sweep_base(), gamma_window=5).validate()


class GammaTests(SimpleTestCase):
    def test_binning(self):
        table = bin_gamma(np.array([0.05, 0.95, 1.0]), np.array([1.0, 2.0, 4.0]), 10)
        self.assertEqual(table.counts[0], 1)
        self.assertEqual(table.counts[9], 2)
        self.assertAlmostEqual(table.volatility[9], 3.0)
        self.assertTrue(np.isnan(table.volatility[5]))
        self.assertTrue(math.isnan(table.spearman))
        self.assertAlmostEqual(table.centers[0], 0.05)

    def test_spearman_sign(self):
        gamma = np.linspace(0, 0.99, 100)
        table = bin_gamma(gamma, 1.0 - gamma, 10)
        self.assertAlmostEqual(table.spearman, -1.0)

    def test_all_informed_fills_top_bin(self):
        table = bin_gamma(np.ones(20), np.full(20, 0.01), 10)
        self.assertEqual(table.counts.tolist(), [0] * 9 + [20])

    def test_windows(self):
        prices = 20 * np.exp(np.cumsum(np.concatenate(([0.0], np.random.default_rng(0).normal(0, 1e-3, 200)))))
        mean_gamma, vol = gamma_windows(prices, np.full(200, 0.4), 50)
        self.assertEqual(len(mean_gamma), 4)
        np.testing.assert_allclose(mean_gamma, 0.4)
        with self.assertRaises(ExperimentError):
            gamma_windows(prices[:10], np.zeros(9), 50)

    def test_analysis_of_a_run(self):
        result = run_market(small_config(steps=200, mix=switcher_mix(), info_cost=0.05))
        table = gamma_analysis(result, window=20, bins=5)
        self.assertEqual(table.windows, 10)
        self.assertEqual(int(table.counts.sum()), 10)
        with self.assertRaises(ExperimentError):
            gamma_analysis(run_market(small_config(steps=50)))
        with self.assertRaises(ExperimentError):
            gamma_analysis(result, window=5)


class SweepTests(SimpleTestCase):
    @classmethod
    def setUpClass(cls):
        super().setUpClass()
        cls.tmp = tempfile.TemporaryDirectory()
        cls.plan = ExperimentPlan(mixes=(AgentMix(0.12, 0.30, 0.58, 0.0), AgentMix(0.12, 0.15, 0.58, 0.15)),
                                  seeds=(1, 2), base=sweep_base(), gamma_window=25, gamma_bins=5)
        cls.report = run_sweep(cls.plan, outdir=Path(cls.tmp.name) / 'sweep')

    @classmethod
    def tearDownClass(cls):
        cls.tmp.cleanup()
        super().tearDownClass()

    def test_cells(self):
        self.assertEqual(len(self.report.cells), 4)
        baseline = [c for c in self.report.cells if c.rho == 0.0]
        self.assertTrue(all(c.mean_gamma is None and c.gamma_table is None for c in baseline))
        switching = [c for c in self.report.cells if c.rho == 0.15]
        self.assertTrue(all(c.gamma_table is not None for c in switching))

    def test_tables(self):
        volatility = self.report.volatility_table()
        self.assertEqual(list(volatility['rho']), [0.0, 0.15])
        self.assertEqual(list(volatility['runs']), [2, 2])
        returns = self.report.returns_table('informed')
        self.assertEqual(list(returns.columns), ['rho', 'seed_1', 'seed_2', 'average'])
        gamma = self.report.gamma_table(0.15)
        self.assertEqual(int(gamma.counts.sum()), 12)
        with self.assertRaises(ExperimentError):
            self.report.gamma_table(0.0)
        self.assertIn('volatility_increasing', self.report.ordering_checks())

    def test_files(self):
        root = Path(self.tmp.name) / 'sweep'
        for name in ('cells.csv', 'table9.csv', 'fig7a.csv', 'fig7b.csv', 'fig7c.csv', 'fig8.csv', 'sweep.json'):
            self.assertTrue((root / name).exists(), name)
        self.assertEqual(len(list((root / 'runs').iterdir())), 4)

    def test_same_plan_same_report(self):
        again = run_sweep(self.plan)
        self.assertEqual([c.volatility for c in again.cells], [c.volatility for c in self.report.cells])

    def test_parallel_matches_serial(self):
        parallel = run_sweep(self.plan, threads=2)
        self.assertEqual([c.volatility for c in parallel.cells], [c.volatility for c in self.report.cells])

    def test_failure_keeps_partial_results(self):
        first = self.report.cells[0]
        with tempfile.TemporaryDirectory() as tmp, \
                mock.patch('market.experiments._run_cell', side_effect=[first, RuntimeError('boom')]):
            with self.assertRaises(ExperimentError) as caught:
                run_sweep(self.plan, outdir=tmp)
            self.assertEqual(len(caught.exception.partial.cells), 1)
            self.assertTrue((Path(tmp) / 'partial' / 'cells.csv').exists())

    def test_checkpoint_round_trip(self):
        with tempfile.TemporaryDirectory() as tmp:
            checkpoint = Checkpoint(tmp)
            self.assertIsNone(checkpoint.load('sweep'))
            checkpoint.save('sweep', {'cells': [asdict(c) for c in self.report.cells]})
            restored = sweep_from_dict(self.plan, checkpoint.load('sweep')['cells'])
            np.testing.assert_allclose(restored.volatility_table()['mean_volatility'],
                                       self.report.volatility_table()['mean_volatility'])

    def test_cell_without_output(self):
        cell = _run_cell(self.plan.configs()[0], 25, 5, None)
        self.assertIsNone(cell.run_dir)
        self.assertEqual(set(cell.profits), {'informed', 'uninformed', 'switcher'})


def synthetic_report(switcher, uninformed, informed=lambda rho: 0.03, seeds=(1, 2, 3)):
    """Report over the five standard mixes; a group's columns are NaN where it has no agents"""
    nan = float('nan')
    cells = []
    for mix in table8_mixes():
        rho = mix.switchers
        profits = {
            'informed': {'mean': informed(rho), 'net_mean': informed(rho)},
            'uninformed': {'mean': uninformed(rho), 'net_mean': uninformed(rho)} if mix.uninformed
            else {'mean': nan, 'net_mean': nan},
            'switcher': {'mean': switcher(rho) + 0.01, 'net_mean': switcher(rho)} if rho
            else {'mean': nan, 'net_mean': nan},
        }
        for seed in seeds:
            cells.append(SweepCell(rho=rho, seed=seed, volatility=0.0004 * (1 + rho), profits=profits,
                                   mean_gamma=0.5 if rho else None))
    return SweepReport(table8_plan(sweep_base(), n_seeds=len(seeds)), cells)


class ReturnCheckTests(SimpleTestCase):
    def test_pairs_only_where_both_groups_trade(self):
        report = synthetic_report(switcher=lambda rho: 0.05, uninformed=lambda rho: 0.01)
        frame = report.frame()
        self.assertTrue(frame.loc[np.isclose(frame['rho'], 0.30), 'uninformed_mean'].isna().all())
        checks = return_checks(report)
        self.assertTrue(checks['switcher net >= uninformed in >= 70% of paired runs'])
        self.assertTrue(checks['informed return varies < 30% across rho'])
        self.assertFalse(checks['uninformed return lower at largest rho than at smallest'])
        self.assertFalse(checks['switcher net return lower at largest rho than at smallest'])

    def test_switchers_below_uninformed(self):
        checks = return_checks(synthetic_report(switcher=lambda rho: 0.0, uninformed=lambda rho: 0.01))
        self.assertFalse(checks['switcher net >= uninformed in >= 70% of paired runs'])

    def test_returns_fall_as_switchers_spread(self):
        checks = return_checks(synthetic_report(switcher=lambda rho: 0.06 - 0.1 * rho,
                                                uninformed=lambda rho: 0.02 - 0.05 * rho))
        self.assertTrue(checks['uninformed return lower at largest rho than at smallest'])
        self.assertTrue(checks['switcher net return lower at largest rho than at smallest'])
        self.assertTrue(all(checks.values()))


class SwitchingSweepTests(SimpleTestCase):
    def test_cost_at_forecast_error_scale_makes_switchers_buy(self):
        plan = table8_plan(sweep_base().with_changes(info_cost=math.inf), n_seeds=2)
        top = plan.base.with_changes(mix=plan.mixes[-1], seed=plan.seeds[0])
        cost = float(np.median(run_market(top).switcher_errors))

        report = run_sweep(table8_plan(sweep_base().with_changes(info_cost=cost), n_seeds=2))
        frame = report.frame()
        switching = frame[frame['rho'] > 0]
        self.assertGreater(switching['mean_gamma'].mean(), 0)
        top_cell = frame[np.isclose(frame['rho'], 0.30) & (frame['seed'] == plan.seeds[0])]
        self.assertGreater(float(top_cell['mean_gamma'].iloc[0]), 0)
        self.assertGreater(report.volatility_table()['mean_volatility'].nunique(), 1)
