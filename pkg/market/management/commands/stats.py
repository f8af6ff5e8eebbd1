from pathlib import Path

from django.core.management.base import CommandError

from market.exports import read_prices, write_json
from market.management.base import MarketCommand
from market.stylized import stylized_report


class Command(MarketCommand):
    help = 'Stylized facts of a prices.csv'
    action_type = 'STATS'

    def add_command_arguments(self, parser):
        parser.add_argument('--in', dest='source', required=True, help='prices.csv of a run')
        parser.add_argument('--max-lag', type=int, default=50)

    def run(self, **options):
        source = Path(options['source'])
        try:
            prices = read_prices(source)
        except FileNotFoundError as exc:
            raise CommandError(f'{source} does not exist') from exc
        report = stylized_report(prices['p'].to_numpy(), prices['v'].to_numpy(), options['max_lag'])
        target = Path(options['out']) if options['out'] else source.with_name('stats.json')
        write_json(target, report)
        d = report['describe']
        return (f"kurtosis {d['kurtosis']:.3f}, JB p {d['jb_pvalue']:.3g}, "
                f"Hurst {report['hurst']['market']:.3f}; written to {target}")
