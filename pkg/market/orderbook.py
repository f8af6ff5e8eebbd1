"""
Continuous double auction book with price-time priority.

Prices are integer tick counts. Each side is a heap keyed by
(price, seq); cancelled or filled orders are dropped lazily when they
reach the top of a heap.
"""

import heapq
import math
from dataclasses import dataclass
from typing import Optional

import pandas as pd

from .exceptions import DuplicateOrderError, EmptySideError, OrderBookError

BUY = 'buy'
SELL = 'sell'
LIMIT = 'limit'
MARKET = 'market'

# float noise tolerated when a price already sits on the grid
_GRID_EPS = 1e-9


def to_ticks(price, tick, side=None):
    """Convert a currency price to ticks.

    Rounds to the nearest tick; an exact half tick rounds down for buys
    and up for sells.
    """
    x = price / tick
    nearest = round(x)
    if abs(x - nearest) < _GRID_EPS:
        return int(nearest)
    if side == BUY:
        return int(math.ceil(x - 0.5))
    return int(math.floor(x + 0.5))


def to_price(ticks, tick):
    """Currency value of a tick count, rounded clear of float residue"""
    return round(ticks * tick, 10)


@dataclass(slots=True)
class Order:
    """One-share order"""
    id: int
    agent: int
    side: str
    kind: str
    price: Optional[int] = None
    seq: int = 0
    size: int = 1

    def __post_init__(self):
        if self.side not in (BUY, SELL):
            raise OrderBookError(f'unknown side {self.side!r}')
        if self.kind == LIMIT and (self.price is None or self.price < 1):
            raise OrderBookError('limit orders need a positive tick price')
        if self.kind == MARKET and self.price is not None:
            raise OrderBookError('market orders carry no price')
        if self.size != 1:
            raise OrderBookError('orders are for exactly one share')


@dataclass(frozen=True, slots=True)
class Trade:
    """Executed share, priced at the resting order's limit"""
    price: int
    step: int
    buy_order: int
    sell_order: int
    buy_agent: int
    sell_agent: int
    buy_kind: str
    sell_kind: str
    size: int = 1


class OrderBook:
    """Bids and asks in price-time priority"""

    def __init__(self):
        self._bids = []  # (-price, seq, id)
        self._asks = []  # (price, seq, id)
        self._resting = {}
        self._by_agent = {}
        self._last_id = 0
        self._last_seq = 0
        self.submitted = 0
        self.executed = 0
        self.cancelled = 0

    def __len__(self):
        return len(self._resting)

    def new_order(self, agent, side, kind, price=None):
        """Build an order with the next id and sequence number"""
        self._last_seq += 1
        return Order(id=self._last_id + 1, agent=agent, side=side, kind=kind,
                     price=price, seq=self._last_seq)

    def _accept(self, order):
        if order.id <= self._last_id:
            raise DuplicateOrderError(f'order id {order.id} already used')
        self._last_id = order.id
        self._last_seq = max(self._last_seq, order.seq)
        self.submitted += 1

    def _top(self, heap):
        while heap and heap[0][2] not in self._resting:
            heapq.heappop(heap)
        return self._resting[heap[0][2]] if heap else None

    def best_bid(self):
        order = self._top(self._bids)
        return order.price if order else None

    def best_ask(self):
        order = self._top(self._asks)
        return order.price if order else None

    def best_quotes(self):
        """(best bid, best ask) in ticks, None for an empty side"""
        return self.best_bid(), self.best_ask()

    def _remove(self, order):
        del self._resting[order.id]
        owned = self._by_agent.get(order.agent)
        if owned is not None:
            owned.discard(order.id)
            if not owned:
                del self._by_agent[order.agent]

    def _rest(self, order):
        self._resting[order.id] = order
        self._by_agent.setdefault(order.agent, set()).add(order.id)
        if order.side == BUY:
            heapq.heappush(self._bids, (-order.price, order.seq, order.id))
        else:
            heapq.heappush(self._asks, (order.price, order.seq, order.id))

    def _fill(self, incoming, resting, step):
        self._remove(resting)
        self.executed += 2
        if incoming.side == BUY:
            return Trade(price=resting.price, step=step,
                         buy_order=incoming.id, sell_order=resting.id,
                         buy_agent=incoming.agent, sell_agent=resting.agent,
                         buy_kind=incoming.kind, sell_kind=resting.kind)
        return Trade(price=resting.price, step=step,
                     buy_order=resting.id, sell_order=incoming.id,
                     buy_agent=resting.agent, sell_agent=incoming.agent,
                     buy_kind=resting.kind, sell_kind=incoming.kind)

    def submit_limit(self, order, step=0):
        """Match a limit order while it crosses, rest any remainder"""
        if order.kind != LIMIT:
            raise OrderBookError('submit_limit needs a limit order')
        self._accept(order)
        if order.side == BUY:
            best = self._top(self._asks)
            if best is not None and best.price <= order.price:
                return [self._fill(order, best, step)]
        else:
            best = self._top(self._bids)
            if best is not None and best.price >= order.price:
                return [self._fill(order, best, step)]
        self._rest(order)
        return []

    def submit_market(self, order, step=0):
        """Execute one share at the best opposite quote"""
        if order.kind != MARKET:
            raise OrderBookError('submit_market needs a market order')
        best = self._top(self._asks if order.side == BUY else self._bids)
        if best is None:
            raise EmptySideError(f'market {order.side} into an empty book side')
        self._accept(order)
        return [self._fill(order, best, step)]

    def submit(self, order, step=0):
        if order.kind == LIMIT:
            return self.submit_limit(order, step)
        return self.submit_market(order, step)

    def cancel_agent_orders(self, agent):
        """Remove every resting order owned by ``agent``; returns the count"""
        owned = self._by_agent.pop(agent, None)
        if not owned:
            return 0
        for order_id in owned:
            del self._resting[order_id]
        self.cancelled += len(owned)
        if len(self._bids) + len(self._asks) > 2 * len(self._resting) + 256:
            self._compact()
        return len(owned)

    def _compact(self):
        self._bids = [e for e in self._bids if e[2] in self._resting]
        self._asks = [e for e in self._asks if e[2] in self._resting]
        heapq.heapify(self._bids)
        heapq.heapify(self._asks)

    def resting_orders(self, side):
        """Live orders of one side in priority order"""
        orders = [o for o in self._resting.values() if o.side == side]
        if side == BUY:
            return sorted(orders, key=lambda o: (-o.price, o.seq))
        return sorted(orders, key=lambda o: (o.price, o.seq))

    def snapshot(self, depth=5):
        """Aggregated depth per price level"""
        def levels(side):
            totals = {}
            for order in self.resting_orders(side):
                totals[order.price] = totals.get(order.price, 0) + order.size
            return list(totals.items())[:depth]

        return {'bids': levels(BUY), 'asks': levels(SELL)}


def tape_frame(tape, tick):
    """Trade tape as a table: step, price, size, buy_agent, sell_agent"""
    return pd.DataFrame({
        'step': [t.step for t in tape],
        'price': [to_price(t.price, tick) for t in tape],
        'size': [t.size for t in tape],
        'buy_agent': [t.buy_agent for t in tape],
        'sell_agent': [t.sell_agent for t in tape],
        'buy_kind': [t.buy_kind for t in tape],
        'sell_kind': [t.sell_kind for t in tape],
    }, columns=['step', 'price', 'size', 'buy_agent', 'sell_agent', 'buy_kind', 'sell_kind'])
