from django.http import JsonResponse
from django.shortcuts import get_object_or_404
from django.views.decorators.http import require_GET

from .models import CalibrationCampaign, SimulationRun, Sweep

RUN_FIELDS = ('id', 'seed', 'rho', 'steps', 'volatility', 'mean_gamma',
              'informed_profit', 'uninformed_profit', 'switcher_profit', 'output_dir')


def _run_row(run):
    return {name: getattr(run, name) for name in RUN_FIELDS}


@require_GET
def run_list(request):
    """Recorded runs, optionally filtered by ?rho= and ?sweep="""
    runs = SimulationRun.objects.all()
    try:
        if 'rho' in request.GET:
            runs = runs.filter(rho=float(request.GET['rho']))
        if 'sweep' in request.GET:
            runs = runs.filter(sweep_id=int(request.GET['sweep']))
    except ValueError:
        return JsonResponse({'error': 'rho must be a number and sweep an integer'}, status=400)
    return JsonResponse({'runs': [_run_row(run) for run in runs[:500]]})


@require_GET
def run_detail(request, run_id):
    run = get_object_or_404(SimulationRun, id=run_id)
    data = _run_row(run)
    data.update({'config': run.config, 'stats': run.stats, 'sweep': run.sweep_id})
    return JsonResponse(data)


@require_GET
def calibration_detail(request, campaign_id):
    campaign = get_object_or_404(CalibrationCampaign, id=campaign_id)
    return JsonResponse({
        'id': campaign.id,
        'runs': campaign.runs,
        'converged': campaign.converged,
        'fit': {'a': campaign.a, 'b': campaign.b, 'c': campaign.c,
                'sigma': campaign.sigma, 'r2_adj': campaign.r2_adj, 'bins': campaign.bins},
        'gaps': list(campaign.samples.values_list('gap', flat=True)),
    })


@require_GET
def sweep_report(request, sweep_id):
    """Volatility and per-group returns averaged per rho"""
    sweep = get_object_or_404(Sweep, id=sweep_id)
    table = {}
    for run in sweep.runs.all():
        table.setdefault(run.rho, []).append(run)
    rows = []
    for rho in sorted(table):
        runs = table[rho]
        rows.append({
            'rho': rho,
            'runs': len(runs),
            'mean_volatility': _mean(r.volatility for r in runs),
            'informed': _mean(r.informed_profit for r in runs),
            'uninformed': _mean(r.uninformed_profit for r in runs),
            'switcher_net': _mean(r.switcher_profit for r in runs),
        })
    return JsonResponse({'id': sweep.id, 'name': str(sweep), 'checks': sweep.checks, 'table': rows})


def _mean(values):
    values = [v for v in values if v is not None]
    return sum(values) / len(values) if values else None
