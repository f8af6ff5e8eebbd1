"""
The market loop.

Each step: the fundamental advances, agents visit in a fresh random
order, each one cancels its resting orders, draws a Poisson order count,
forecasts and submits orders against the live book. The step's market
price is the size-weighted mean trade price, carried forward when nothing
traded.
"""

import logging
import math
from collections import deque
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .agents import (AgentKind, MarketView, PredictorCoeffs, build_population, make_orders,
                     predict_informed, predict_uninformed, predict_zero_intelligence,
                     switcher_decide)
from .conf import FITTED, RANDOM
from .costs import CostSampler
from .fundamental import FundamentalPath, generate_path
from .genetic import Chromosome, ForecastHistory, GATrace, evaluate, evolve, fitness
from .orderbook import BUY, LIMIT, SELL, OrderBook, to_ticks
from .streams import StreamFactory

logger = logging.getLogger(__name__)

GROUPS = [kind.value for kind in AgentKind]


def order_profit(side, price, v):
    """Profit of one executed order measured against the fundamental.

    A limit order only ever executes at its own limit price, so the trade
    price serves for both order kinds.
    """
    if side == SELL:
        return price - v
    if side == BUY:
        return v - price
    raise ValueError(f'unknown side {side!r}')


def trade_profits(trade, v, tick):
    """(buyer profit, seller profit) for one trade"""
    price = trade.price * tick
    return order_profit(BUY, price, v), order_profit(SELL, price, v)


def market_prices_from_tape(tape, steps, v0, tick):
    """Recompute the per-step market price series from a trade tape"""
    value = np.zeros(steps + 1)
    size = np.zeros(steps + 1)
    for trade in tape:
        value[trade.step] += trade.price * trade.size
        size[trade.step] += trade.size
    prices = np.empty(steps + 1)
    prices[0] = v0
    for t in range(1, steps + 1):
        prices[t] = value[t] / size[t] * tick if size[t] else prices[t - 1]
    return prices


@dataclass
class ProfitLedger:
    """Order profits per agent group, before the transaction cost"""
    totals: dict = field(default_factory=dict)

    def _row(self, group):
        return self.totals.setdefault(group, {'profit': 0.0, 'orders': 0, 'info_cost': 0.0, 'informed_steps': 0})

    def add(self, group, profit):
        row = self._row(group)
        row['profit'] += profit
        row['orders'] += 1

    def charge(self, group, cost):
        row = self._row(group)
        row['info_cost'] += cost
        row['informed_steps'] += 1

    def mean(self, group):
        row = self.totals.get(group)
        if not row or not row['orders']:
            return float('nan')
        return row['profit'] / row['orders']

    def net_mean(self, group):
        """Mean order profit after the information cost paid by the group"""
        row = self.totals.get(group)
        if not row or not row['orders']:
            return float('nan')
        return (row['profit'] - row['info_cost']) / row['orders']

    def summary(self):
        return {
            group: {
                'orders': row['orders'],
                'total': row['profit'],
                'mean': self.mean(group),
                'info_cost': row['info_cost'],
                'informed_steps': row['informed_steps'],
                'net_mean': self.net_mean(group),
            }
            for group, row in sorted(self.totals.items())
        }


@dataclass
class MarketState:
    step: int
    book: OrderBook
    prices: np.ndarray
    fundamental: FundamentalPath
    tape: list = field(default_factory=list)
    trailing_window: deque = field(default_factory=deque)
    gamma: list = field(default_factory=list)
    profits: ProfitLedger = field(default_factory=ProfitLedger)


@dataclass
class RunResult:
    config: object
    prices: np.ndarray
    fundamental: np.ndarray
    gamma: Optional[np.ndarray]
    tape: list
    profits: dict
    ga_trace: GATrace
    agents: list
    clamped: int = 0
    # e_u seen by switchers at every decision, in currency
    switcher_errors: Optional[np.ndarray] = None

    @property
    def price_returns(self):
        return np.diff(np.log(self.prices))

    @property
    def fundamental_returns(self):
        return np.diff(np.log(self.fundamental))

    @property
    def volatility(self):
        """Standard deviation of per-step log returns of the market price"""
        return float(np.std(self.price_returns, ddof=1))

    @property
    def mean_gamma(self):
        return None if self.gamma is None else float(np.mean(self.gamma))

    def forecast_error_stats(self):
        """Scale of the switchers' uninformed forecast error, to compare with C"""
        if self.switcher_errors is None or not len(self.switcher_errors):
            return None
        errors = self.switcher_errors
        return {
            'median': float(np.median(errors)),
            'p95': float(np.percentile(errors, 95)),
            'max': float(np.max(errors)),
        }

    def mean_profit(self, group, net=False):
        row = self.profits.get(group)
        if not row:
            return float('nan')
        return row['net_mean'] if net else row['mean']

    def summary(self):
        fundamental_vol = float(np.std(self.fundamental_returns, ddof=1))
        return {
            'seed': self.config.seed,
            'rho': self.config.mix.switchers,
            'steps': self.config.steps,
            'trades': len(self.tape),
            'volatility': self.volatility,
            'fundamental_volatility': fundamental_vol,
            'excess_volatility': self.volatility / fundamental_vol if fundamental_vol else None,
            'tracking_error': float(np.max(np.abs(self.prices - self.fundamental))),
            'mean_gamma': self.mean_gamma,
            'switcher_forecast_error': self.forecast_error_stats(),
            'clamped': self.clamped,
            'profits': self.profits,
        }


class Market:
    """One seeded run of the artificial market"""

    def __init__(self, config):
        self.config = config.validate()
        self.streams = StreamFactory(config.seed)
        path = generate_path(config.v0, config.steps, self.streams.stream('fundamental'),
                             phi=config.phi, tick=config.tick, jumps=config.jumps)
        counts = config.mix.counts(config.n_agents)
        self.agents = build_population(counts, self.streams, info_costs=self._info_costs(),
                                       clone_informed=config.clone_informed)
        self.switchers = [a for a in self.agents if a.kind == AgentKind.SWITCHER]
        self.scheduler = self.streams.stream('scheduler')
        self.ga_rng = self.streams.stream('ga')
        self.ga_trace = GATrace()

        prices = np.full(config.steps + 1, np.nan)
        prices[0] = config.v0
        self.state = MarketState(step=0, book=OrderBook(), prices=prices, fundamental=path)
        self._window_value = 0
        self._window_count = 0
        # step-start forecast inputs, kept for the genetic algorithm
        self._lagged = np.full(config.steps + 1, config.v0)
        self._p_ave = np.full(config.steps + 1, config.v0)
        self._p_mid = np.full(config.steps + 1, config.v0)
        self._switcher_errors = []

    def _info_costs(self):
        config = self.config
        if config.cost_policy == FITTED:
            sampler = CostSampler.from_width(config.cost_mean, config.cost_width)
            return lambda agent_id: sampler.draw(self.streams.stream('costs', agent_id))
        return lambda agent_id: config.info_cost

    def _quotes(self):
        bid, ask = self.state.book.best_quotes()
        tick = self.config.tick
        return (None if bid is None else bid * tick), (None if ask is None else ask * tick)

    def _midpoint(self, p_prev):
        bid, ask = self.state.book.best_quotes()
        if bid is not None and ask is not None:
            return (bid + ask) / 2 * self.config.tick
        if bid is not None or ask is not None:
            return (bid if bid is not None else ask) * self.config.tick
        return p_prev

    def _trailing_average(self, t, p_prev):
        """Mean trade price over steps [t - lag, t - 1]"""
        window = self.state.trailing_window
        while window and window[0][0] < t - self.config.lag:
            _, value, count = window.popleft()
            self._window_value -= value
            self._window_count -= count
        if not self._window_count:
            return p_prev
        return self._window_value / self._window_count * self.config.tick

    def _predict(self, agent, view):
        if agent.kind == AgentKind.INFORMED:
            return predict_informed(view), False
        if agent.kind == AgentKind.UNINFORMED:
            return predict_uninformed(agent.coeffs, view), False
        if agent.kind == AgentKind.ZERO_INTELLIGENCE:
            return predict_zero_intelligence(agent.rng, view), False
        informed, prediction = switcher_decide(agent, view)
        if agent.last_error is not None:
            self._switcher_errors.append(agent.last_error)
        if informed:
            self.state.profits.charge(agent.group, agent.info_cost)
        return prediction, informed

    def _submit(self, agent, intent, t):
        book = self.state.book
        if intent.kind == LIMIT:
            ticks = to_ticks(intent.price, self.config.tick, intent.side)
            if ticks < 1:
                logger.warning('agent %d limit %s rounds below one tick, suppressed', agent.id, intent.side)
                return []
            order = book.new_order(agent.id, intent.side, LIMIT, ticks)
        else:
            order = book.new_order(agent.id, intent.side, intent.kind)
        return book.submit(order, step=t)

    def run_step(self):
        state = self.state
        config = self.config
        t = state.step + 1
        if t > config.steps:
            raise IndexError(f'run already finished at step {config.steps}')

        values = state.fundamental.values
        v_now, v_prev = values[t], values[t - 1]
        v_lagged = values[max(t - config.lag, 0)]
        p_prev = state.prices[t - 1]
        p_ave = self._trailing_average(t, p_prev)
        self._lagged[t] = v_lagged
        self._p_ave[t] = p_ave
        self._p_mid[t] = self._midpoint(p_prev)

        if config.scheduling == RANDOM:
            visit = self.scheduler.permutation(len(self.agents))
        else:
            visit = range(len(self.agents))

        trades = []
        informed_switchers = 0
        for index in visit:
            agent = self.agents[index]
            state.book.cancel_agent_orders(agent.id)
            n = int(agent.rng.poisson(config.order_rate))
            view = MarketView(v_now=v_now, v_prev=v_prev, v_lagged=v_lagged, p_ave=p_ave,
                              p_mid=self._midpoint(p_prev), p_prev=p_prev, step=t)
            prediction, informed = self._predict(agent, view)
            informed_switchers += informed
            for intent in make_orders(prediction, self._quotes, config.mu, n, agent.rng):
                for trade in self._submit(agent, intent, t):
                    buyer, seller = trade_profits(trade, v_now, config.tick)
                    state.profits.add(self.agents[trade.buy_agent].group, buyer)
                    state.profits.add(self.agents[trade.sell_agent].group, seller)
                    trades.append(trade)

        if trades:
            value = sum(trade.price * trade.size for trade in trades)
            size = sum(trade.size for trade in trades)
            state.prices[t] = value / size * config.tick
            state.trailing_window.append((t, value, size))
            self._window_value += value
            self._window_count += size
        else:
            state.prices[t] = p_prev
        state.tape.extend(trades)
        if self.switchers:
            state.gamma.append(informed_switchers / len(self.switchers))
        state.step = t

        if t % config.ga.interval == 0:
            self._learn(t)
        return state

    def _learn(self, t):
        learners = [agent for agent in self.agents if agent.learns]
        if len(learners) < 2:
            return
        window = slice(max(t - self.config.ga.eval_window + 1, 1), t + 1)
        history = ForecastHistory(self._lagged[window], self._p_ave[window],
                                  self._p_mid[window], self.state.prices[window])
        population = evaluate([Chromosome(agent.coeffs.as_array()) for agent in learners],
                              lambda genes: fitness(genes, history))
        self.ga_trace.record(len(self.ga_trace.rows), t, population)
        logger.debug('step %d: GA over %d learners, best fitness %.6f',
                     t, len(learners), self.ga_trace.rows[-1]['best_fitness'])
        for agent, child in zip(learners, evolve(population, self.ga_rng, self.config.ga)):
            agent.coeffs = PredictorCoeffs(*(float(g) for g in child.genes))

    def run(self):
        config = self.config
        logger.info('run seed=%d rho=%.2f steps=%d agents=%d',
                    config.seed, config.mix.switchers, config.steps, config.n_agents)
        while self.state.step < config.steps:
            self.run_step()
        state = self.state
        result = RunResult(
            config=config,
            prices=state.prices,
            fundamental=state.fundamental.values,
            gamma=np.array(state.gamma) if self.switchers else None,
            tape=state.tape,
            profits=state.profits.summary(),
            ga_trace=self.ga_trace,
            agents=[agent.snapshot() for agent in self.agents],
            clamped=state.fundamental.clamped,
            switcher_errors=np.array(self._switcher_errors) if self.switchers else None,
        )
        logger.info('run seed=%d done: %d trades, volatility %.6f', config.seed, len(state.tape), result.volatility)
        self._warn_if_never_informed(result)
        return result

    def _warn_if_never_informed(self, result):
        stats = result.forecast_error_stats()
        if stats is None or result.mean_gamma:
            return
        cheapest = min(agent.info_cost for agent in self.switchers)
        if math.isfinite(cheapest) and cheapest > stats['max']:
            logger.warning('switchers never bought information: cost %.4f is above every forecast error '
                           '(largest %.4f); calibrate the cost on this market', cheapest, stats['max'])


def run_market(config):
    return Market(config).run()
