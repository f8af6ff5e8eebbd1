import numpy as np
from django.test import SimpleTestCase

from market.fundamental import TWO_POINT, generate_path, jump_increments, step_fundamental
from market.streams import StreamFactory, derive_seeds


class FundamentalPathTests(SimpleTestCase):
    def rng(self, seed=1):
        return np.random.default_rng(seed)

    def test_no_jumps_keeps_value(self):
        path = generate_path(20.0, 500, self.rng(), phi=0.0)
        np.testing.assert_array_equal(path.values, np.full(501, 20.0))

    def test_zero_steps(self):
        path = generate_path(20.0, 0, self.rng())
        np.testing.assert_array_equal(path.values, [20.0])
        self.assertEqual(len(path.log_returns), 0)

    def test_increment_moments(self):
        increments = jump_increments(self.rng(3), 200_000, phi=4.0, tick=0.01)
        self.assertAlmostEqual(increments.mean(), 0.0, delta=3e-4)
        # phi * E[U^2] with U uniform on (-tick, tick)
        self.assertAlmostEqual(increments.var() / (4.0 * 0.01 ** 2 / 3), 1.0, delta=0.03)

    def test_two_point_variance(self):
        increments = jump_increments(self.rng(4), 200_000, phi=4.0, tick=0.01, jumps=TWO_POINT)
        self.assertAlmostEqual(increments.var() / (4.0 * 0.01 ** 2), 1.0, delta=0.03)

    def test_same_seed_same_path(self):
        first = generate_path(20.0, 1000, StreamFactory(42).stream('fundamental'))
        second = generate_path(20.0, 1000, StreamFactory(42).stream('fundamental'))
        np.testing.assert_array_equal(first.values, second.values)
        third = generate_path(20.0, 1000, StreamFactory(43).stream('fundamental'))
        self.assertFalse(np.array_equal(first.values, third.values))

    def test_degenerate_path_clamps_to_one_tick(self):
        with self.assertLogs('market.fundamental', 'WARNING'):
            path = generate_path(0.005, 2000, self.rng(5), jumps=TWO_POINT)
        self.assertGreater(path.clamped, 0)
        self.assertTrue(np.all(path.values > 0))

    def test_single_step(self):
        self.assertEqual(step_fundamental(20.0, self.rng(), phi=0.0), 20.0)
        with self.assertRaises(ValueError):
            step_fundamental(0.0, self.rng())


class StreamTests(SimpleTestCase):
    def test_named_streams_are_independent(self):
        streams = StreamFactory(9)
        a = streams.stream('fundamental').random(5)
        b = streams.stream('scheduler').random(5)
        self.assertFalse(np.array_equal(a, b))
        np.testing.assert_array_equal(streams.agent(3).random(5), StreamFactory(9).agent(3).random(5))

    def test_derived_seeds_are_stable(self):
        self.assertEqual(derive_seeds(1, 5), derive_seeds(1, 5))
        self.assertEqual(len(set(derive_seeds(1, 50))), 50)

    def test_negative_seed_rejected(self):
        with self.assertRaises(ValueError):
            StreamFactory(-1)
