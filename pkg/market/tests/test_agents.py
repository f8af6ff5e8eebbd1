import math

import numpy as np
from django.test import SimpleTestCase

from market.agents import (AgentKind, AgentState, PredictorCoeffs, build_population, classify_order,
                           make_orders, predict_informed, predict_uninformed, predict_zero_intelligence,
                           switcher_decide)
from market.exceptions import PredictionError
from market.orderbook import BUY, LIMIT, MARKET, SELL
from market.streams import StreamFactory

from .synthetic import view


class PredictorTests(SimpleTestCase):
    def test_equal_inputs(self):
        coeffs = PredictorCoeffs(0.2, 0.5, 0.9)
        self.assertAlmostEqual(predict_uninformed(coeffs, view(v_lagged=21.0, p_ave=21.0, p_mid=21.0)), 21.0)

    def test_prediction_is_a_convex_combination(self):
        rng = np.random.default_rng(0)
        for _ in range(500):
            inputs = rng.uniform(15, 25, 3)
            coeffs = PredictorCoeffs.random(rng)
            p = predict_uninformed(coeffs, view(v_lagged=inputs[0], p_ave=inputs[1], p_mid=inputs[2]))
            self.assertGreaterEqual(p, inputs.min() - 1e-12)
            self.assertLessEqual(p, inputs.max() + 1e-12)

    def test_zero_intelligence_mean_is_centred(self):
        rng = np.random.default_rng(1)
        market = view(v_lagged=19.0, p_ave=20.0, p_mid=21.0)
        draws = np.array([predict_zero_intelligence(rng, market) for _ in range(20_000)])
        stderr = draws.std() / math.sqrt(len(draws))
        self.assertLess(abs(draws.mean() - 20.0), 3 * stderr)

    def test_informed_uses_current_value(self):
        self.assertEqual(predict_informed(view(v_now=20.37)), 20.37)

    def test_invalid_coefficients(self):
        with self.assertRaises(PredictionError):
            PredictorCoeffs(0.0, 0.0, 0.0)
        with self.assertRaises(PredictionError):
            PredictorCoeffs(1.2, 0.1, 0.1)

    def test_informed_agents_carry_no_coefficients(self):
        with self.assertRaises(PredictionError):
            AgentState(0, AgentKind.INFORMED, PredictorCoeffs(0.1, 0.1, 0.1))


class SwitcherTests(SimpleTestCase):
    def switcher(self, cost, bought=False, last=None, coeffs=(1.0, 0.0, 0.0)):
        return AgentState(0, AgentKind.SWITCHER, PredictorCoeffs(*coeffs), info_cost=cost,
                          bought_info_last=bought, last_prediction=last)

    def test_starts_uninformed(self):
        state = self.switcher(0.0)
        informed, prediction = switcher_decide(state, view(v_now=20.5, v_lagged=19.5))
        self.assertFalse(informed)
        self.assertIsNone(state.last_error)
        self.assertEqual(prediction, 19.5)
        self.assertEqual(state.last_prediction, 19.5)

    def test_small_error_stays_uninformed(self):
        state = self.switcher(0.36, last=20.10)
        informed, _ = switcher_decide(state, view(p_prev=20.0))
        self.assertFalse(informed)
        self.assertFalse(state.bought_info_last)
        self.assertAlmostEqual(state.last_error, 0.10)
        self.assertAlmostEqual(state.snapshot()['last_error'], 0.10)

    def test_large_error_buys_again(self):
        state = self.switcher(0.36, bought=True, last=20.50)
        informed, prediction = switcher_decide(state, view(v_now=20.07, v_prev=20.0, p_prev=20.0))
        self.assertTrue(informed)
        self.assertEqual(prediction, 20.07)
        self.assertTrue(state.bought_info_last)

    def test_tie_buys(self):
        state = self.switcher(0.0, bought=True, last=20.3)
        informed, _ = switcher_decide(state, view(v_prev=20.3, p_prev=20.0))
        self.assertTrue(informed)

    def test_zero_cost_branch_table(self):
        # (e_u, e_i, buys)
        table = [(0.0, 0.0, True), (0.1, 0.2, False), (0.2, 0.1, True),
                 (0.5, 0.5, True), (0.05, 0.3, False), (1.0, 0.0, True)]
        for e_u, e_i, buys in table:
            state = self.switcher(0.0, bought=True, last=20.0 + e_u)
            informed, _ = switcher_decide(state, view(v_prev=20.0 + e_i, p_prev=20.0))
            self.assertEqual(informed, buys, (e_u, e_i))

    def test_infinite_cost_never_buys(self):
        state = self.switcher(math.inf, bought=True, last=30.0)
        for _ in range(10):
            informed, _ = switcher_decide(state, view(v_prev=20.0, p_prev=20.0))
            self.assertFalse(informed)

    def test_forecast_stored_even_when_informed(self):
        state = self.switcher(0.0, bought=True, last=25.0, coeffs=(0.0, 1.0, 0.0))
        informed, prediction = switcher_decide(state, view(v_now=20.2, p_ave=19.8))
        self.assertTrue(informed)
        self.assertEqual(prediction, 20.2)
        self.assertEqual(state.last_prediction, 19.8)

    def test_learns_only_while_uninformed(self):
        state = self.switcher(0.1)
        self.assertTrue(state.learns)
        state.bought_info_last = True
        self.assertFalse(state.learns)


class OrderRuleTests(SimpleTestCase):
    def setUp(self):
        self.rng = np.random.default_rng(2)

    def test_both_quotes(self):
        self.assertEqual(classify_order(20.10, 19.90, 20.00, 0.04, self.rng).kind, MARKET)
        intent = classify_order(20.00, 19.90, 20.03, 0.04, self.rng)
        self.assertEqual((intent.side, intent.kind), (BUY, LIMIT))
        self.assertAlmostEqual(intent.price, 19.96)
        intent = classify_order(19.99, 19.97, 20.10, 0.04, self.rng)
        self.assertEqual((intent.side, intent.kind), (SELL, LIMIT))
        self.assertAlmostEqual(intent.price, 20.03)
        intent = classify_order(19.80, 19.90, 20.00, 0.04, self.rng)
        self.assertEqual((intent.side, intent.kind), (SELL, MARKET))

    def test_equal_distance_buys(self):
        intent = classify_order(20.0, 19.75, 20.25, 0.04, self.rng)
        self.assertEqual(intent.side, BUY)

    def test_one_sided_books(self):
        self.assertEqual(classify_order(20.10, None, 20.00, 0.04, self.rng).kind, MARKET)
        self.assertEqual(classify_order(20.00, None, 20.00, 0.04, self.rng).kind, LIMIT)
        self.assertEqual(classify_order(19.80, 19.90, None, 0.04, self.rng).side, SELL)
        self.assertEqual(classify_order(19.80, 19.90, None, 0.04, self.rng).kind, MARKET)
        intent = classify_order(19.90, 19.90, None, 0.04, self.rng)
        self.assertEqual((intent.side, intent.kind), (SELL, LIMIT))

    def test_empty_book_is_a_coin_flip(self):
        sides = [classify_order(20.0, None, None, 0.04, self.rng) for _ in range(4000)]
        buys = [i for i in sides if i.side == BUY]
        self.assertTrue(all(i.kind == LIMIT for i in sides))
        self.assertAlmostEqual(buys[0].price, 19.96)
        self.assertAlmostEqual(len(buys) / len(sides), 0.5, delta=0.05)

    def test_classification_is_total_and_never_hits_empty_side(self):
        for _ in range(5000):
            bid = None if self.rng.random() < 0.3 else float(self.rng.uniform(19, 21))
            ask = None if self.rng.random() < 0.3 else float(self.rng.uniform(19, 21))
            if bid is not None and ask is not None and bid >= ask:
                bid, ask = ask - 0.01, bid
            intent = classify_order(float(self.rng.uniform(18, 22)), bid, ask, 0.04, self.rng)
            self.assertIn(intent.side, (BUY, SELL))
            self.assertIn(intent.kind, (LIMIT, MARKET))
            if intent.kind == MARKET:
                self.assertIsNotNone(ask if intent.side == BUY else bid)

    def test_make_orders_reads_live_quotes(self):
        quotes = iter([(None, None), (19.96, None), (19.96, 20.04)])
        intents = list(make_orders(20.0, lambda: next(quotes), 0.04, 3, np.random.default_rng(0)))
        self.assertEqual(len(intents), 3)
        self.assertEqual(intents[1].side, SELL)

    def test_non_positive_limit_suppressed(self):
        with self.assertLogs('market.agents', 'WARNING'):
            intents = list(make_orders(0.02, lambda: (None, 0.5), 0.04, 1, self.rng))
        self.assertEqual(intents, [])

    def test_zero_orders(self):
        self.assertEqual(list(make_orders(20.0, lambda: (None, None), 0.04, 0, self.rng)), [])


class PopulationTests(SimpleTestCase):
    def test_id_order_and_defaults(self):
        counts = {AgentKind.INFORMED: 2, AgentKind.UNINFORMED: 3, AgentKind.SWITCHER: 1,
                  AgentKind.ZERO_INTELLIGENCE: 4}
        agents = build_population(counts, StreamFactory(1))
        kinds = [a.kind for a in agents]
        self.assertEqual(kinds, [AgentKind.INFORMED] * 2 + [AgentKind.UNINFORMED] * 3
                         + [AgentKind.SWITCHER] + [AgentKind.ZERO_INTELLIGENCE] * 4)
        self.assertEqual([a.id for a in agents], list(range(10)))
        self.assertTrue(math.isinf(agents[5].info_cost))
        self.assertIsNone(agents[0].coeffs)

    def test_clones_keep_informed_group(self):
        agents = build_population({AgentKind.INFORMED: 2}, StreamFactory(1), clone_informed=True)
        self.assertTrue(all(a.kind == AgentKind.UNINFORMED for a in agents))
        self.assertTrue(all(a.group == 'informed' for a in agents))

    def test_snapshot(self):
        agents = build_population({AgentKind.SWITCHER: 1}, StreamFactory(1), info_costs=lambda _: 0.3)
        snapshot = agents[0].snapshot()
        self.assertEqual(snapshot['kind'], 'switcher')
        self.assertEqual(snapshot['info_cost'], 0.3)
        self.assertEqual(len(snapshot['coeffs']), 3)
