import math

import numpy as np
from django.test import SimpleTestCase

from market.calibration import (CostSample, cost_distribution, fit_gaussian, fit_gaussian_curve,
                                freedman_diaconis_bins, gaussian_curve, histogram_frame, information_cost,
                                run_calibration_campaign, samples_frame)
from market.exceptions import CalibrationError, FitError

from .synthetic import small_config, switcher_mix


def normal_samples(n=2000, mean=0.36, std=0.07, seed=0):
    rng = np.random.default_rng(seed)
    return [CostSample(seed=i, gap=float(g)) for i, g in enumerate(rng.normal(mean, std, n))]


class GaussianFitTests(SimpleTestCase):
    def test_recovers_normal_parameters(self):
        fit = fit_gaussian(normal_samples())
        self.assertAlmostEqual(fit.b, 0.36, delta=0.01)
        self.assertAlmostEqual(fit.sigma, 0.07, delta=0.01)
        self.assertGreater(fit.r2_adj, 0.9)
        self.assertEqual(fit.to_dict()['sigma'], fit.sigma)

    def test_exact_curve(self):
        centers = np.linspace(0.1, 0.6, 15)
        counts = gaussian_curve(centers, 40.0, 0.3604, 0.09662)
        a, b, c, r2, r2_adj = fit_gaussian_curve(centers, counts, (30.0, 0.3, 0.1))
        self.assertAlmostEqual(a, 40.0, places=4)
        self.assertAlmostEqual(b, 0.3604, places=6)
        self.assertAlmostEqual(c, 0.09662, places=6)
        self.assertAlmostEqual(r2, 1.0, places=8)

    def test_too_few_samples(self):
        with self.assertRaises(CalibrationError):
            fit_gaussian(normal_samples(n=20))

    def test_zero_spread(self):
        samples = [CostSample(seed=i, gap=0.3) for i in range(40)]
        with self.assertRaises(FitError) as caught:
            fit_gaussian(samples)
        self.assertIsNotNone(caught.exception.last_iterate)

    def test_too_few_bins(self):
        with self.assertRaises(FitError):
            fit_gaussian_curve([0.1, 0.2, 0.3], [1, 5, 1], (5.0, 0.2, 0.1))

    def test_bin_rule(self):
        values = np.random.default_rng(1).normal(size=1000)
        self.assertGreaterEqual(freedman_diaconis_bins(values), 10)
        self.assertEqual(freedman_diaconis_bins(np.zeros(50)), 10)

    def test_frames(self):
        samples = normal_samples(n=300)
        fit = fit_gaussian(samples)
        frame = histogram_frame(samples, fit)
        self.assertEqual(len(frame), fit.bins)
        self.assertEqual(int(frame['count'].sum()), 300)
        self.assertEqual(list(samples_frame(samples).columns), ['seed', 'gap'])

    def test_cost_distribution(self):
        fit = fit_gaussian(normal_samples())
        sampler = cost_distribution(fit)
        self.assertAlmostEqual(sampler.std, fit.c / math.sqrt(2))
        self.assertEqual(sampler.mean, fit.b)


class CampaignTests(SimpleTestCase):
    def test_rejects_switchers(self):
        with self.assertRaises(CalibrationError):
            run_calibration_campaign(small_config(mix=switcher_mix()), 2)
        with self.assertRaises(CalibrationError):
            run_calibration_campaign(small_config(), 0)

    def test_one_sample_per_seed(self):
        samples = run_calibration_campaign(small_config(steps=100), 2, seeds=[3, 4])
        self.assertEqual([s.seed for s in samples], [3, 4])
        self.assertTrue(all(math.isfinite(s.gap) for s in samples))
        again = run_calibration_campaign(small_config(steps=100), 2, seeds=[3, 4])
        self.assertEqual(samples, again)

    def test_single_run_gives_one_sample_and_no_fit(self):
        samples = run_calibration_campaign(small_config(steps=100), 1)
        self.assertEqual(len(samples), 1)
        with self.assertRaises(CalibrationError):
            fit_gaussian(samples)
        info_cost, fit, mean_gap = information_cost(samples)
        self.assertIsNone(fit)
        self.assertEqual(mean_gap, samples[0].gap)
        self.assertEqual(info_cost, max(samples[0].gap, 0.0))

    def test_clones_earn_what_uninformed_agents_earn(self):
        samples = run_calibration_campaign(small_config(clone_informed=True), 8)
        gaps = [s.gap for s in samples]
        self.assertTrue(all(math.isfinite(g) for g in gaps))
        self.assertAlmostEqual(float(np.mean(gaps)), 0.0, delta=0.01)


class InformationCostTests(SimpleTestCase):
    def test_uses_fitted_centre(self):
        info_cost, fit, mean_gap = information_cost(normal_samples())
        self.assertEqual(info_cost, fit['b'])
        self.assertAlmostEqual(mean_gap, 0.36, delta=0.01)

    def test_non_positive_cost_clamped(self):
        info_cost, fit, mean_gap = information_cost(normal_samples(n=500, mean=-0.2, std=0.05))
        self.assertEqual(info_cost, 0.0)
        self.assertLess(mean_gap, 0)

    def test_no_finite_gaps(self):
        with self.assertRaises(CalibrationError):
            information_cost([CostSample(seed=1, gap=float('nan'))])
