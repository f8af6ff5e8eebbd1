from market.calibration import information_cost, run_calibration_campaign
from market.conf import table8_mixes
from market.experiments import run_sweep, table8_plan
from market.exceptions import ExperimentError
from market.management.base import SMOKE_SEEDS, MarketCommand
from market.models import Sweep


class Command(MarketCommand):
    help = 'Run every agent mix over shared seeds'
    action_type = 'SWEEP'

    def add_command_arguments(self, parser):
        parser.add_argument('--runs-per-mix', type=int, default=None, help='seeds per mix (default 30)')
        parser.add_argument('--calibration-runs', type=int, default=0,
                            help='calibrate the information cost on this many switcher-free runs first '
                                 '(default 0: keep the configured cost)')

    def calibrated(self, base, runs):
        samples = run_calibration_campaign(base.with_changes(mix=table8_mixes()[0]), runs, threads=self.threads)
        info_cost, _, mean_gap = information_cost(samples)
        self.stdout.write(f'calibrated information cost {info_cost:.6f} (mean gap {mean_gap:.6f})')
        return base.with_changes(info_cost=info_cost)

    def run(self, **options):
        plan_options = self.config_data().get('plan', {})
        runs = options['runs_per_mix'] or plan_options.get('runs_per_mix', 30)
        if options['smoke']:
            runs = min(runs, SMOKE_SEEDS)
        base = self.build_config()
        if options['calibration_runs'] > 0:
            base = self.calibrated(base, options['calibration_runs'])
        plan = table8_plan(base, n_seeds=runs,
                           gamma_window=plan_options.get('gamma_window', 50),
                           gamma_bins=plan_options.get('gamma_bins', 10))
        target = self.output_path(f'sweep_seed{base.seed}')
        try:
            report = run_sweep(plan, threads=self.threads, outdir=target)
        except ExperimentError as exc:
            if self.record and exc.partial is not None and exc.partial.cells:
                Sweep.record(exc.partial, output_dir=target / 'partial', name='partial')
            raise
        if self.record:
            Sweep.record(report, output_dir=target, name=f'mixes x {runs} seeds')
        checks = report.ordering_checks()
        table = report.volatility_table()
        lines = ', '.join(f'{r.rho:.2f}: {r.mean_volatility:.3g}' for r in table.itertuples())
        return (f'sweep of {len(report.cells)} runs written to {target}; volatility {lines}; '
                f'increasing={checks["volatility_increasing"]}')
