from market.management.base import MarketCommand
from market.reproduce import reproduce_results


class Command(MarketCommand):
    help = 'Run the full pipeline and write the tables, figures and report bundle'
    action_type = 'REPRODUCE'

    def add_command_arguments(self, parser):
        parser.add_argument('--runs-per-mix', type=int, default=30)
        parser.add_argument('--calibration-runs', type=int, default=200)

    def run(self, **options):
        base = self.build_config()
        target = self.output_path(f'reproduce_seed{base.seed}')
        checks = reproduce_results(target, base=base, runs_per_mix=options['runs_per_mix'],
                                 calibration_runs=options['calibration_runs'],
                                 smoke=options['smoke'], threads=self.threads)
        failed = [name for name, ok in checks.items() if not ok]
        for name in failed:
            self.stderr.write(self.style.WARNING(f'check failed: {name}'))
        return f'bundle written to {target}; {len(checks) - len(failed)} of {len(checks)} checks passed'
