"""Information cost distribution: a normal truncated at zero"""

import math
from dataclasses import dataclass

from scipy import stats


@dataclass(frozen=True)
class CostSampler:
    mean: float
    std: float

    @classmethod
    def from_width(cls, mean, width):
        """The fitted curve a*exp(-((x-b)/c)^2) has std c/sqrt(2)"""
        return cls(mean=mean, std=width / math.sqrt(2.0))

    @property
    def distribution(self):
        return stats.truncnorm((0.0 - self.mean) / self.std, math.inf, loc=self.mean, scale=self.std)

    def draw(self, rng, size=None):
        values = self.distribution.rvs(size=size, random_state=rng)
        return float(values) if size is None else values

    def negative_mass(self):
        """Probability the untruncated normal falls below zero"""
        return float(stats.norm.cdf(0.0, loc=self.mean, scale=self.std))
