from market.conf import AgentMix
from market.exceptions import StatsError
from market.exports import json_safe, write_json, write_run
from market.management.base import MarketCommand
from market.models import SimulationRun
from market.simulation import run_market
from market.stylized import stylized_report


class Command(MarketCommand):
    help = 'Run one seeded market and write its artifacts'
    action_type = 'RUN'

    def add_command_arguments(self, parser):
        parser.add_argument('--rho', type=float, help='switcher share, taken from the uninformed 30%')
        parser.add_argument('--clone-informed', action='store_true',
                            help='uninformed agents copy the informed forecast')
        parser.add_argument('--stats', action='store_true', help='also write stats.json')

    def run(self, **options):
        overrides = {}
        if options['rho'] is not None:
            overrides['mix'] = AgentMix(0.12, round(0.30 - options['rho'], 2), 0.58, options['rho'])
        if options['clone_informed']:
            overrides['clone_informed'] = True
        config = self.build_config(**overrides)
        result = run_market(config)
        target = write_run(result, self.output_path(f'run_{config.mix.label}_seed{config.seed}'))

        stats = {}
        if options['stats']:
            try:
                stats = stylized_report(result.prices, result.fundamental)
                write_json(target / 'stats.json', stats)
            except StatsError as exc:
                self.stderr.write(self.style.WARNING(f'stats skipped: {exc}'))
        if self.record:
            run = SimulationRun.record(result, output_dir=target)
            if stats:
                run.stats = json_safe({'describe': stats['describe'], 'hurst': stats['hurst'],
                             'arch_b_pvalue': stats['arch_market']['b_pvalue']})
                run.save(update_fields=['stats'])
        return f'run seed={config.seed} volatility={result.volatility:.6g} written to {target}'
