"""Errors raised by the market simulator and its analysis pipeline"""


class MarketError(Exception):
    """Base class for every simulator error"""


class ConfigError(MarketError):
    """A configuration value is missing, unknown or out of range"""


class OrderBookError(MarketError):
    """An order was rejected by the book"""


class DuplicateOrderError(OrderBookError):
    """Order id was already used (ids must increase monotonically)"""


class EmptySideError(OrderBookError):
    """Market order sent against an empty side of the book"""


class PredictionError(MarketError):
    """Forecast coefficients violate their invariants"""


class CalibrationError(MarketError):
    """Calibration campaign or fit preconditions not met"""


class FitError(CalibrationError):
    """Gaussian fit did not converge"""

    def __init__(self, message, last_iterate=None):
        super().__init__(message)
        self.last_iterate = last_iterate


class StatsError(MarketError):
    """Series is too short or degenerate for the requested statistic"""


class ExperimentError(MarketError):
    """An experiment stage failed; ``partial`` holds what was completed"""

    def __init__(self, message, partial=None):
        super().__init__(message)
        self.partial = partial
