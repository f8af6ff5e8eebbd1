# Generated by Django 4.2 on 2026-10-18 10:12

from django.db import migrations, models
import django.db.models.deletion


class Migration(migrations.Migration):

    initial = True

    dependencies = [
    ]

    operations = [
        migrations.CreateModel(
            name='CalibrationCampaign',
            fields=[
                ('id', models.BigAutoField(auto_created=True, primary_key=True, serialize=False, verbose_name='ID')),
                ('runs', models.IntegerField()),
                ('a', models.FloatField(blank=True, null=True)),
                ('b', models.FloatField(blank=True, null=True)),
                ('c', models.FloatField(blank=True, null=True)),
                ('r2_adj', models.FloatField(blank=True, null=True)),
                ('bins', models.IntegerField(blank=True, null=True)),
                ('converged', models.BooleanField(default=False)),
                ('output_dir', models.CharField(blank=True, max_length=500)),
                ('created_at', models.DateTimeField(auto_now_add=True)),
            ],
            options={
                'verbose_name_plural': 'Calibration Campaigns',
                'ordering': ['-created_at'],
            },
        ),
        migrations.CreateModel(
            name='ExperimentLog',
            fields=[
                ('id', models.BigAutoField(auto_created=True, primary_key=True, serialize=False, verbose_name='ID')),
                ('action_type', models.CharField(choices=[('RUN', 'Single Run'), ('CALIBRATE', 'Calibration'), ('STATS', 'Stylized Facts'), ('SWEEP', 'Mix Sweep'), ('GAMMA', 'Gamma Analysis'), ('REPRODUCE', 'Reproduction Bundle')], max_length=20)),
                ('description', models.TextField()),
                ('seed', models.BigIntegerField(blank=True, null=True)),
                ('succeeded', models.BooleanField(default=True)),
                ('timestamp', models.DateTimeField(auto_now_add=True)),
            ],
            options={
                'verbose_name_plural': 'Experiment Logs',
                'ordering': ['-timestamp'],
            },
        ),
        migrations.CreateModel(
            name='Sweep',
            fields=[
                ('id', models.BigAutoField(auto_created=True, primary_key=True, serialize=False, verbose_name='ID')),
                ('name', models.CharField(blank=True, max_length=100)),
                ('plan', models.JSONField(default=dict)),
                ('checks', models.JSONField(blank=True, default=dict)),
                ('output_dir', models.CharField(blank=True, max_length=500)),
                ('created_at', models.DateTimeField(auto_now_add=True)),
            ],
            options={
                'verbose_name_plural': 'Sweeps',
                'ordering': ['-created_at'],
            },
        ),
        migrations.CreateModel(
            name='SimulationRun',
            fields=[
                ('id', models.BigAutoField(auto_created=True, primary_key=True, serialize=False, verbose_name='ID')),
                ('seed', models.BigIntegerField()),
                ('rho', models.FloatField(default=0)),
                ('steps', models.IntegerField()),
                ('volatility', models.FloatField(blank=True, null=True)),
                ('mean_gamma', models.FloatField(blank=True, null=True)),
                ('informed_profit', models.FloatField(blank=True, null=True)),
                ('uninformed_profit', models.FloatField(blank=True, null=True)),
                ('switcher_profit', models.FloatField(blank=True, null=True)),
                ('output_dir', models.CharField(blank=True, max_length=500)),
                ('config', models.JSONField(blank=True, default=dict)),
                ('stats', models.JSONField(blank=True, default=dict)),
                ('created_at', models.DateTimeField(auto_now_add=True)),
                ('sweep', models.ForeignKey(blank=True, null=True, on_delete=django.db.models.deletion.CASCADE, related_name='runs', to='market.sweep')),
            ],
            options={
                'verbose_name_plural': 'Simulation Runs',
                'ordering': ['-created_at', 'rho', 'seed'],
            },
        ),
        migrations.CreateModel(
            name='CalibrationSample',
            fields=[
                ('id', models.BigAutoField(auto_created=True, primary_key=True, serialize=False, verbose_name='ID')),
                ('seed', models.BigIntegerField()),
                ('gap', models.FloatField(blank=True, null=True)),
                ('campaign', models.ForeignKey(on_delete=django.db.models.deletion.CASCADE, related_name='samples', to='market.calibrationcampaign')),
            ],
            options={
                'ordering': ['campaign', 'id'],
            },
        ),
    ]
