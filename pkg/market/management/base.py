"""
Shared plumbing for the market commands.

Every command takes --seed, --config, --out, --threads, --smoke and
--no-record, turns simulator errors into CommandError and leaves an
ExperimentLog row behind unless recording is off.
"""

import logging
from pathlib import Path

from django.conf import settings
from django.core.management.base import BaseCommand, CommandError

from market.conf import load_config, read_config_file
from market.exceptions import MarketError
from market.models import ExperimentLog

logger = logging.getLogger('market.commands')

SMOKE_STEPS = 4000
SMOKE_SEEDS = 5


class MarketCommand(BaseCommand):
    action_type = None

    def add_arguments(self, parser):
        parser.add_argument('--seed', type=int, help='master seed (default: MARKET_SEED)')
        parser.add_argument('--config', help='TOML or JSON configuration file')
        parser.add_argument('--out', help='output path (default: under MARKET_OUTPUT_DIR)')
        parser.add_argument('--threads', type=int, default=None, help='worker processes (default: MARKET_THREADS)')
        parser.add_argument('--smoke', action='store_true', help=f'shorten runs to {SMOKE_STEPS} steps')
        parser.add_argument('--no-record', action='store_true', help='do not write to the database')
        self.add_command_arguments(parser)

    def add_command_arguments(self, parser):
        pass

    def handle(self, *args, **options):
        self.options = options
        self.record = not options['no_record']
        try:
            message = self.run(**options)
        except MarketError as exc:
            logger.error('%s failed: %s', self.action_type, exc)
            self.log(f'failed: {exc}', succeeded=False)
            raise CommandError(str(exc)) from exc
        self.log(message)
        self.stdout.write(self.style.SUCCESS(message))

    def run(self, **options):
        raise NotImplementedError

    @property
    def threads(self):
        threads = self.options['threads']
        return settings.MARKET_THREADS if threads is None else max(threads, 1)

    def config_data(self):
        path = self.options['config']
        return read_config_file(path) if path else {}

    def build_config(self, **overrides):
        """Defaults, then the config file, then command-line flags"""
        seed = self.options['seed']
        if seed is not None:
            overrides['seed'] = seed
        elif 'seed' not in self.config_data():
            overrides['seed'] = settings.MARKET_SEED
        config = load_config(self.options['config'], **overrides)
        if self.options['smoke']:
            config = config.with_changes(steps=min(config.steps, SMOKE_STEPS))
        return config

    def output_path(self, default_name):
        out = self.options['out']
        return Path(out) if out else Path(settings.MARKET_OUTPUT_DIR) / default_name

    def log(self, description, succeeded=True):
        if not self.record or self.action_type is None:
            return
        ExperimentLog.objects.create(action_type=self.action_type, description=description,
                                     seed=self.options.get('seed'), succeeded=succeeded)
