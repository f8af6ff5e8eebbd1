"""
Simulation configuration.

Defaults follow the published parameter table: v0 = 20, tick 0.01,
mu = 0.04, phi = 4, lambda = 1, tau = 1200, 12000 steps, 100 agents.
Files are TOML or JSON with optional [mix], [ga] and [plan] tables.
"""

import json
import math

try:
    import tomllib
except ModuleNotFoundError:  # Python < 3.11
    import tomli as tomllib
from dataclasses import asdict, dataclass, field, fields, replace
from pathlib import Path

from .agents import AgentKind
from .exceptions import ConfigError
from .fundamental import TWO_POINT, UNIFORM
from .genetic import GAConfig

FIXED = 'fixed'
FITTED = 'fitted'
RANDOM = 'random'
SEQUENTIAL = 'sequential'


@dataclass(frozen=True)
class AgentMix:
    """Population fractions; switchers is rho"""
    informed: float = 0.12
    uninformed: float = 0.30
    zero_intelligence: float = 0.58
    switchers: float = 0.0

    def validate(self):
        values = [self.informed, self.uninformed, self.zero_intelligence, self.switchers]
        if any(v < 0 for v in values):
            raise ConfigError('mix fractions must be non-negative')
        if not math.isclose(sum(values), 1.0, abs_tol=1e-9):
            raise ConfigError(f'mix fractions sum to {sum(values):.6f}, expected 1')
        return self

    def counts(self, n_agents):
        """Agent count per kind; each share of n_agents must be whole"""
        self.validate()
        result = {}
        for kind, share in ((AgentKind.INFORMED, self.informed),
                            (AgentKind.UNINFORMED, self.uninformed),
                            (AgentKind.ZERO_INTELLIGENCE, self.zero_intelligence),
                            (AgentKind.SWITCHER, self.switchers)):
            exact = n_agents * share
            if abs(exact - round(exact)) > 1e-6:
                raise ConfigError(f'{kind.value} share {share} of {n_agents} agents is not whole')
            result[kind] = int(round(exact))
        return result

    @property
    def label(self):
        return f'rho{round(self.switchers * 100):02d}'


def table8_mixes():
    """Informed 12% and zero intelligence 58%; the remaining 30% split between uninformed and switchers"""
    return [AgentMix(0.12, round(0.30 - rho, 2), 0.58, rho) for rho in (0.0, 0.07, 0.15, 0.22, 0.30)]


@dataclass(frozen=True)
class SimConfig:
    v0: float = 20.0
    tick: float = 0.01
    mu: float = 0.04
    phi: float = 4.0
    order_rate: float = 1.0
    lag: int = 1200
    steps: int = 12000
    n_agents: int = 100
    mix: AgentMix = field(default_factory=AgentMix)
    cost_policy: str = FIXED
    info_cost: float = 0.36
    cost_mean: float = 0.3604
    cost_width: float = 0.09662
    seed: int = 0
    jumps: str = UNIFORM
    scheduling: str = RANDOM
    clone_informed: bool = False
    ga: GAConfig = field(default_factory=GAConfig)

    def validate(self):
        if self.v0 <= 0 or self.tick <= 0:
            raise ConfigError('v0 and tick must be positive')
        if self.mu < 0 or self.phi < 0 or self.order_rate < 0:
            raise ConfigError('mu, phi and order_rate must be non-negative')
        if self.lag < 0:
            raise ConfigError('lag must be non-negative')
        if self.steps < 1:
            raise ConfigError('steps must be >= 1')
        if self.n_agents < 1:
            raise ConfigError('n_agents must be >= 1')
        if self.cost_policy not in (FIXED, FITTED):
            raise ConfigError(f'unknown cost_policy {self.cost_policy!r}')
        if not self.info_cost >= 0:
            raise ConfigError('info_cost must be non-negative')
        if self.cost_policy == FITTED and self.cost_width <= 0:
            raise ConfigError('cost_width must be positive for fitted costs')
        if self.jumps not in (UNIFORM, TWO_POINT):
            raise ConfigError(f'unknown jumps {self.jumps!r}')
        if self.scheduling not in (RANDOM, SEQUENTIAL):
            raise ConfigError(f'unknown scheduling {self.scheduling!r}')
        if self.seed < 0:
            raise ConfigError('seed must be non-negative')
        self.mix.counts(self.n_agents)
        self.ga.validate()
        return self

    def with_changes(self, **changes):
        return replace(self, **changes)

    def to_dict(self):
        return asdict(self)

    @classmethod
    def from_dict(cls, data):
        data = dict(data)
        mix = _build(AgentMix, data.pop('mix', {}), 'mix')
        ga = _build(GAConfig, data.pop('ga', {}), 'ga')
        data.pop('plan', None)
        return _build(cls, data, 'simulation', mix=mix, ga=ga)


def _build(klass, data, section, **extra):
    known = {f.name for f in fields(klass)}
    unknown = set(data) - known
    if unknown:
        raise ConfigError(f'unknown {section} keys: {", ".join(sorted(unknown))}')
    return klass(**data, **extra)


def read_config_file(path):
    """Parse a TOML or JSON config file into a dict"""
    path = Path(path)
    try:
        if path.suffix == '.json':
            return json.loads(path.read_text())
        with path.open('rb') as handle:
            return tomllib.load(handle)
    except FileNotFoundError as exc:
        raise ConfigError(f'config file {path} not found') from exc
    except (json.JSONDecodeError, tomllib.TOMLDecodeError) as exc:
        raise ConfigError(f'config file {path} is malformed: {exc}') from exc


def load_config(path=None, **overrides):
    data = read_config_file(path) if path else {}
    config = SimConfig.from_dict(data)
    if overrides:
        config = replace(config, **overrides)
    return config.validate()
