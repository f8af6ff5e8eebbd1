import math

from django.db import models

from .exports import json_safe


def _finite(value):
    if value is None:
        return None
    value = float(value)
    return value if math.isfinite(value) else None


class Sweep(models.Model):
    """A grid of runs over agent mixes and shared seeds"""
    name = models.CharField(max_length=100, blank=True)
    plan = models.JSONField(default=dict)
    checks = models.JSONField(default=dict, blank=True)
    output_dir = models.CharField(max_length=500, blank=True)
    created_at = models.DateTimeField(auto_now_add=True)

    class Meta:
        verbose_name_plural = "Sweeps"
        ordering = ['-created_at']

    def __str__(self):
        return self.name or f"Sweep {self.pk}"

    @classmethod
    def record(cls, report, output_dir='', name=''):
        sweep = cls.objects.create(name=name, plan=json_safe(report.plan.to_dict()),
                                   checks=json_safe(report.ordering_checks()), output_dir=str(output_dir or ''))
        for cell in report.cells:
            SimulationRun.objects.create(
                sweep=sweep,
                seed=cell.seed,
                rho=cell.rho,
                steps=report.plan.base.steps,
                volatility=_finite(cell.volatility),
                mean_gamma=_finite(cell.mean_gamma),
                informed_profit=_finite(cell.profits['informed']['mean']),
                uninformed_profit=_finite(cell.profits['uninformed']['mean']),
                switcher_profit=_finite(cell.profits['switcher']['net_mean']),
                output_dir=cell.run_dir or '',
            )
        return sweep


class SimulationRun(models.Model):
    """One seeded market run"""
    sweep = models.ForeignKey(Sweep, on_delete=models.CASCADE, null=True, blank=True, related_name='runs')
    seed = models.BigIntegerField()
    rho = models.FloatField(default=0)
    steps = models.IntegerField()
    volatility = models.FloatField(null=True, blank=True)
    mean_gamma = models.FloatField(null=True, blank=True)
    informed_profit = models.FloatField(null=True, blank=True)
    uninformed_profit = models.FloatField(null=True, blank=True)
    # net of information cost
    switcher_profit = models.FloatField(null=True, blank=True)
    output_dir = models.CharField(max_length=500, blank=True)
    config = models.JSONField(default=dict, blank=True)
    stats = models.JSONField(default=dict, blank=True)
    created_at = models.DateTimeField(auto_now_add=True)

    class Meta:
        verbose_name_plural = "Simulation Runs"
        ordering = ['-created_at', 'rho', 'seed']

    def __str__(self):
        return f"rho={self.rho:.2f} seed={self.seed}"

    @classmethod
    def record(cls, result, output_dir=''):
        """Store the headline numbers of a finished run"""
        return cls.objects.create(
            seed=result.config.seed,
            rho=result.config.mix.switchers,
            steps=result.config.steps,
            volatility=_finite(result.volatility),
            mean_gamma=_finite(result.mean_gamma),
            informed_profit=_finite(result.mean_profit('informed')),
            uninformed_profit=_finite(result.mean_profit('uninformed')),
            switcher_profit=_finite(result.mean_profit('switcher', net=True)),
            output_dir=str(output_dir or ''),
            config=json_safe(result.config.to_dict()),
        )


class CalibrationCampaign(models.Model):
    """Fitted information-cost distribution"""
    runs = models.IntegerField()
    a = models.FloatField(null=True, blank=True)
    b = models.FloatField(null=True, blank=True)
    c = models.FloatField(null=True, blank=True)
    r2_adj = models.FloatField(null=True, blank=True)
    bins = models.IntegerField(null=True, blank=True)
    converged = models.BooleanField(default=False)
    output_dir = models.CharField(max_length=500, blank=True)
    created_at = models.DateTimeField(auto_now_add=True)

    class Meta:
        verbose_name_plural = "Calibration Campaigns"
        ordering = ['-created_at']

    def __str__(self):
        if self.converged:
            return f"Calibration {self.pk}: mean {self.b:.4f}"
        return f"Calibration {self.pk}: no fit"

    @property
    def sigma(self):
        return self.c / math.sqrt(2.0) if self.c is not None else None

    @classmethod
    def record(cls, samples, fit=None, output_dir=''):
        campaign = cls.objects.create(
            runs=len(samples),
            a=fit.a if fit else None,
            b=fit.b if fit else None,
            c=fit.c if fit else None,
            r2_adj=_finite(fit.r2_adj) if fit else None,
            bins=fit.bins if fit else None,
            converged=fit is not None,
            output_dir=str(output_dir or ''),
        )
        CalibrationSample.objects.bulk_create(
            [CalibrationSample(campaign=campaign, seed=s.seed, gap=_finite(s.gap)) for s in samples])
        return campaign


class CalibrationSample(models.Model):
    campaign = models.ForeignKey(CalibrationCampaign, on_delete=models.CASCADE, related_name='samples')
    seed = models.BigIntegerField()
    gap = models.FloatField(null=True, blank=True)

    class Meta:
        ordering = ['campaign', 'id']

    def __str__(self):
        return f"seed={self.seed} gap={self.gap}"


class ExperimentLog(models.Model):
    """Audit trail of command invocations"""
    ACTION_TYPES = [
        ('RUN', 'Single Run'),
        ('CALIBRATE', 'Calibration'),
        ('STATS', 'Stylized Facts'),
        ('SWEEP', 'Mix Sweep'),
        ('GAMMA', 'Gamma Analysis'),
        ('REPRODUCE', 'Reproduction Bundle'),
    ]

    action_type = models.CharField(max_length=20, choices=ACTION_TYPES)
    description = models.TextField()
    seed = models.BigIntegerField(null=True, blank=True)
    succeeded = models.BooleanField(default=True)
    timestamp = models.DateTimeField(auto_now_add=True)

    class Meta:
        verbose_name_plural = "Experiment Logs"
        ordering = ['-timestamp']

    def __str__(self):
        return f"{self.get_action_type_display()} - {self.timestamp:%Y-%m-%d %H:%M}"
