from pathlib import Path

from django.core.management.base import CommandError

from market.exceptions import ExperimentError
from market.experiments import bin_gamma, gamma_windows
from market.exports import read_prices, write_csv
from market.management.base import MarketCommand


class Command(MarketCommand):
    help = 'Windowed volatility against the share of switchers buying information'
    action_type = 'GAMMA'

    def add_command_arguments(self, parser):
        parser.add_argument('--in', dest='source', required=True, help='prices.csv of a run with switchers')
        parser.add_argument('--window', type=int, default=50)
        parser.add_argument('--bins', type=int, default=10)

    def run(self, **options):
        source = Path(options['source'])
        try:
            prices = read_prices(source)
        except FileNotFoundError as exc:
            raise CommandError(f'{source} does not exist') from exc
        gamma = prices['gamma'].iloc[1:]
        if gamma.isna().all():
            raise ExperimentError('run has no switchers; gamma is undefined')
        if options['window'] < 10:
            raise ExperimentError('gamma window must be at least 10 steps')
        mean_gamma, vol = gamma_windows(prices['p'].to_numpy(), gamma.to_numpy(), options['window'])
        table = bin_gamma(mean_gamma, vol, options['bins'])
        target = Path(options['out']) if options['out'] else source.with_name('gamma.csv')
        write_csv(target, table.frame())
        return f'{table.windows} windows, Spearman {table.spearman:.3f}; written to {target}'
