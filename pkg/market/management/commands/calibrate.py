from market.calibration import fit_gaussian, histogram_frame, run_calibration_campaign, samples_frame
from market.conf import table8_mixes
from market.exceptions import FitError
from market.exports import atomic_directory, write_csv, write_json
from market.management.base import MarketCommand
from market.models import CalibrationCampaign


class Command(MarketCommand):
    help = 'Estimate the information cost from switcher-free runs'
    action_type = 'CALIBRATE'

    def add_command_arguments(self, parser):
        parser.add_argument('--runs', type=int, default=200, help='independent runs (default 200)')

    def run(self, **options):
        runs = 30 if options['smoke'] else options['runs']
        config = self.build_config()
        if config.mix.switchers:
            config = config.with_changes(mix=table8_mixes()[0])
        samples = run_calibration_campaign(config, runs, threads=self.threads)
        try:
            fit = fit_gaussian(samples)
        except FitError as exc:
            self.stderr.write(self.style.WARNING(f'fit failed: {exc}; last iterate {exc.last_iterate}'))
            fit = None

        target = self.output_path(f'calibration_seed{config.seed}')
        with atomic_directory(target) as tmp:
            write_csv(tmp / 'samples.csv', samples_frame(samples))
            if fit is not None:
                write_csv(tmp / 'histogram.csv', histogram_frame(samples, fit))
            write_json(tmp / 'fit.json', fit.to_dict() if fit else {'converged': False})
        if self.record:
            CalibrationCampaign.record(samples, fit, output_dir=target)
        if fit is None:
            return f'calibration of {len(samples)} runs written to {target} without a fit'
        return (f'calibration of {len(samples)} runs: mean {fit.b:.4f} sigma {fit.sigma:.5f} '
                f'adj R2 {fit.r2_adj:.3f}, written to {target}')
