"""
Trader types, price forecasts and order submission rules.

Uninformed, zero-intelligence and switching traders forecast with a
convex combination of the lagged fundamental, the trailing average trade
price and the quote midpoint. Informed traders forecast the current
fundamental. Orders are classified against the live quotes one at a time.
"""

import logging
import math
from dataclasses import dataclass, field
from enum import Enum
from typing import Optional

import numpy as np

from .exceptions import PredictionError
from .orderbook import BUY, LIMIT, MARKET, SELL

logger = logging.getLogger(__name__)


class AgentKind(str, Enum):
    INFORMED = 'informed'
    UNINFORMED = 'uninformed'
    ZERO_INTELLIGENCE = 'zero_intelligence'
    SWITCHER = 'switcher'


@dataclass(frozen=True)
class PredictorCoeffs:
    """Weights on (lagged fundamental, trailing average, midpoint)"""
    a: float
    b: float
    c: float

    def __post_init__(self):
        for name in ('a', 'b', 'c'):
            value = getattr(self, name)
            if not 0.0 <= value <= 1.0:
                raise PredictionError(f'coefficient {name}={value} outside [0, 1]')
        if self.a + self.b + self.c <= 0:
            raise PredictionError('coefficients are all zero')

    @classmethod
    def random(cls, rng):
        while True:
            a, b, c = rng.random(3)
            if a + b + c > 0:
                return cls(float(a), float(b), float(c))

    def as_array(self):
        return np.array([self.a, self.b, self.c])


@dataclass
class MarketView:
    """What an agent sees on its turn"""
    v_now: float
    v_prev: float
    v_lagged: float
    p_ave: float
    p_mid: float
    p_prev: float
    step: int = 0


@dataclass
class AgentState:
    id: int
    kind: AgentKind
    coeffs: Optional[PredictorCoeffs] = None
    info_cost: float = 0.0
    bought_info_last: bool = False
    last_prediction: Optional[float] = None
    # |last uninformed forecast - p_{t-1}| from the most recent switch decision
    last_error: Optional[float] = None
    # profit group; differs from kind only for diagnostic clones
    group: str = ''
    rng: Optional[np.random.Generator] = field(default=None, repr=False, compare=False)

    def __post_init__(self):
        self.kind = AgentKind(self.kind)
        if not self.group:
            self.group = self.kind.value
        if self.kind == AgentKind.INFORMED and self.coeffs is not None:
            raise PredictionError('informed agents carry no coefficients')
        if self.kind == AgentKind.SWITCHER and not self.info_cost >= 0:
            raise PredictionError('information cost must be non-negative')

    @property
    def learns(self):
        """Takes part in the genetic algorithm this step"""
        if self.kind == AgentKind.UNINFORMED:
            return True
        return self.kind == AgentKind.SWITCHER and not self.bought_info_last

    def snapshot(self):
        return {
            'id': self.id,
            'kind': self.kind.value,
            'group': self.group,
            'coeffs': None if self.coeffs is None else [self.coeffs.a, self.coeffs.b, self.coeffs.c],
            'info_cost': self.info_cost if self.kind == AgentKind.SWITCHER else None,
            'bought_info_last': self.bought_info_last,
            'last_prediction': self.last_prediction,
            'last_error': self.last_error,
        }


@dataclass(frozen=True)
class OrderIntent:
    side: str
    kind: str
    price: Optional[float] = None


def predict_informed(view):
    return view.v_now


def predict_uninformed(coeffs, view):
    """Weighted average of v_{t-tau}, p_ave and p_mid"""
    total = coeffs.a + coeffs.b + coeffs.c
    if total <= 0:
        raise PredictionError('coefficients are all zero')
    return (coeffs.a * view.v_lagged + coeffs.b * view.p_ave + coeffs.c * view.p_mid) / total


def predict_zero_intelligence(rng, view):
    return predict_uninformed(PredictorCoeffs.random(rng), view)


def switcher_decide(state, view):
    """Decide whether to pay for the fundamental this step.

    Returns (informed, prediction). The uninformed forecast is stored on
    the state every step so the next comparison is always defined.
    """
    uninformed_forecast = predict_uninformed(state.coeffs, view)
    if state.last_prediction is None:
        informed = False
    else:
        error_uninformed = abs(state.last_prediction - view.p_prev)
        state.last_error = error_uninformed
        if state.bought_info_last:
            error_informed = abs(view.v_prev - view.p_prev)
        else:
            # without last step's fundamental, p_{t-1} stands in for v_{t-1}
            error_informed = 0.0
        informed = not error_uninformed < error_informed + state.info_cost

    state.bought_info_last = informed
    state.last_prediction = uninformed_forecast
    return informed, (view.v_now if informed else uninformed_forecast)


def classify_order(prediction, bid, ask, mu, rng):
    """Order submission rule for one order against the current quotes"""
    if bid is not None and ask is not None:
        if prediction > ask + mu:
            return OrderIntent(BUY, MARKET)
        if prediction < bid - mu:
            return OrderIntent(SELL, MARKET)
        if abs(ask - prediction) <= abs(prediction - bid):
            return OrderIntent(BUY, LIMIT, prediction - mu)
        return OrderIntent(SELL, LIMIT, prediction + mu)
    if ask is not None:
        if prediction > ask + mu:
            return OrderIntent(BUY, MARKET)
        return OrderIntent(BUY, LIMIT, prediction - mu)
    if bid is not None:
        if prediction < bid - mu:
            return OrderIntent(SELL, MARKET)
        return OrderIntent(SELL, LIMIT, prediction + mu)
    if rng.random() < 0.5:
        return OrderIntent(BUY, LIMIT, prediction - mu)
    return OrderIntent(SELL, LIMIT, prediction + mu)


def make_orders(prediction, quotes, mu, n, rng):
    """Yield ``n`` order intents, each classified against ``quotes()``.

    ``quotes`` returns the live (bid, ask) in currency; the caller submits
    each intent before asking for the next one.
    """
    if n < 0 or mu < 0:
        raise ValueError('order count and mu must be non-negative')
    for _ in range(n):
        bid, ask = quotes()
        intent = classify_order(prediction, bid, ask, mu, rng)
        if intent.kind == LIMIT and not intent.price > 0:
            logger.warning('suppressed %s limit at non-positive price %.4f', intent.side, intent.price)
            continue
        yield intent


def build_population(counts, streams, info_costs=None, clone_informed=False):
    """Create agents in id order informed, uninformed, switchers, zero intelligence"""
    agents = []
    order = [AgentKind.INFORMED, AgentKind.UNINFORMED, AgentKind.SWITCHER, AgentKind.ZERO_INTELLIGENCE]
    for kind in order:
        for _ in range(counts.get(kind, 0)):
            agent_id = len(agents)
            rng = streams.agent(agent_id)
            if kind == AgentKind.INFORMED and clone_informed:
                agent = AgentState(agent_id, AgentKind.UNINFORMED, PredictorCoeffs.random(rng),
                                   group=AgentKind.INFORMED.value, rng=rng)
            elif kind == AgentKind.INFORMED:
                agent = AgentState(agent_id, kind, rng=rng)
            elif kind == AgentKind.SWITCHER:
                cost = info_costs(agent_id) if info_costs else math.inf
                agent = AgentState(agent_id, kind, PredictorCoeffs.random(rng), info_cost=cost, rng=rng)
            else:
                agent = AgentState(agent_id, kind, PredictorCoeffs.random(rng), rng=rng)
            agents.append(agent)
    return agents
