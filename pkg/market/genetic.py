"""
Real-valued genetic algorithm for the forecast coefficients.

Chromosomes are (a, b, c) triples in [0, 1]; fitness is the mean absolute
forecast error over a recent window (lower is better). One generation
keeps the best chromosome, fills the rest by tournament selection,
uniform crossover and clipped Gaussian mutation.
"""

import logging
from dataclasses import dataclass, field, replace
from typing import Optional

import numpy as np
import pandas as pd

from .exceptions import ConfigError

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class GAConfig:
    interval: int = 50
    eval_window: int = 50
    tournament_size: int = 2
    crossover_rate: float = 0.7
    mutation_rate: float = 0.1
    mutation_scale: float = 0.1

    def validate(self):
        if self.interval < 1:
            raise ConfigError('ga.interval must be >= 1')
        if self.eval_window < 1:
            raise ConfigError('ga.eval_window must be >= 1')
        if self.tournament_size < 2:
            raise ConfigError('ga.tournament_size must be >= 2')
        for name in ('crossover_rate', 'mutation_rate'):
            if not 0.0 <= getattr(self, name) <= 1.0:
                raise ConfigError(f'ga.{name} must lie in [0, 1]')
        if self.mutation_scale < 0:
            raise ConfigError('ga.mutation_scale must be non-negative')
        return self


@dataclass
class Chromosome:
    genes: np.ndarray
    fitness: Optional[float] = None

    def __post_init__(self):
        self.genes = np.asarray(self.genes, dtype=float)


@dataclass
class ForecastHistory:
    """Forecast inputs and the realised market price over a window"""
    v_lagged: np.ndarray
    p_ave: np.ndarray
    p_mid: np.ndarray
    realized: np.ndarray

    def __len__(self):
        return len(self.realized)


@dataclass
class GATrace:
    rows: list = field(default_factory=list)

    def record(self, generation, step, population):
        scores = [c.fitness for c in population]
        self.rows.append({
            'generation': generation,
            'step': step,
            'best_fitness': float(np.min(scores)),
            'mean_fitness': float(np.mean(scores)),
            'population': len(population),
        })

    def frame(self):
        return pd.DataFrame(self.rows, columns=['generation', 'step', 'best_fitness', 'mean_fitness', 'population'])


def fitness(genes, history):
    """Mean absolute error of the weighted forecast against realised prices"""
    if len(history) == 0:
        raise ValueError('fitness needs a non-empty history')
    a, b, c = genes
    total = a + b + c
    if total <= 0:
        return np.inf
    forecasts = (a * history.v_lagged + b * history.p_ave + c * history.p_mid) / total
    return float(np.mean(np.abs(forecasts - history.realized)))


def evaluate(population, score):
    for chromosome in population:
        chromosome.fitness = score(chromosome.genes)
    return population


def _tournament(population, rng, size):
    picks = rng.choice(len(population), size=min(size, len(population)), replace=False)
    return min((population[i] for i in picks), key=lambda c: c.fitness)


def evolve(population, rng, config):
    """One generation; every chromosome must carry a fitness"""
    if len(population) < 2:
        raise ValueError('population needs at least two chromosomes')
    if any(c.fitness is None for c in population):
        raise ValueError('evaluate the population before evolving it')

    elite = min(population, key=lambda c: c.fitness)
    offspring = [replace(elite, genes=elite.genes.copy())]
    while len(offspring) < len(population):
        first = _tournament(population, rng, config.tournament_size)
        second = _tournament(population, rng, config.tournament_size)
        genes = first.genes.copy()
        if rng.random() < config.crossover_rate:
            swap = rng.random(genes.size) < 0.5
            genes[swap] = second.genes[swap]
        mutate = rng.random(genes.size) < config.mutation_rate
        if mutate.any():
            genes[mutate] += rng.normal(0.0, config.mutation_scale, int(mutate.sum()))
            np.clip(genes, 0.0, 1.0, out=genes)
        if genes.sum() <= 0:
            genes = first.genes.copy()
        offspring.append(Chromosome(genes))
    return offspring
