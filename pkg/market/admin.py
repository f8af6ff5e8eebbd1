from django.contrib import admin
from django.utils.html import format_html

from .models import CalibrationCampaign, CalibrationSample, ExperimentLog, SimulationRun, Sweep

BADGE = '<span style="background-color: {}; color: white; padding: 3px 8px; border-radius: 3px; font-size: 0.9em;">{}</span>'


def _number(value, digits=6):
    return '-' if value is None else f"{value:.{digits}g}"


@admin.register(SimulationRun)
class SimulationRunAdmin(admin.ModelAdmin):
    list_display = ('id', 'rho', 'seed', 'steps', 'volatility_badge', 'gamma_display', 'switcher_profit', 'created_at')
    list_filter = ('rho', 'sweep')
    search_fields = ('seed', 'output_dir')
    readonly_fields = ('created_at',)

    def volatility_badge(self, obj):
        """Green below the switcher-free level, orange above, red at double"""
        if obj.volatility is None:
            return '-'
        if obj.volatility < 0.00043:
            color = '#28a745'
        elif obj.volatility < 0.00086:
            color = '#ffc107'
        else:
            color = '#dc3545'
        return format_html(BADGE, color, _number(obj.volatility, 4))

    volatility_badge.short_description = 'Volatility'

    def gamma_display(self, obj):
        """Display mean share of switchers buying information"""
        return _number(obj.mean_gamma, 3)

    gamma_display.short_description = 'Mean gamma'


class SimulationRunInline(admin.TabularInline):
    model = SimulationRun
    fields = ('rho', 'seed', 'volatility', 'mean_gamma', 'switcher_profit')
    readonly_fields = fields
    extra = 0
    can_delete = False


@admin.register(Sweep)
class SweepAdmin(admin.ModelAdmin):
    list_display = ('__str__', 'run_count', 'ordering_badge', 'created_at')
    readonly_fields = ('created_at',)
    inlines = [SimulationRunInline]

    def run_count(self, obj):
        """Display number of runs in bold"""
        return format_html('<span style="font-weight: bold;">{}</span>', obj.runs.count())

    run_count.short_description = 'Runs'

    def ordering_badge(self, obj):
        """Display volatility ordering as colored badge"""
        if obj.checks.get('volatility_increasing'):
            return format_html(BADGE, '#28a745', 'Increasing')
        return format_html(BADGE, '#dc3545', 'Not monotone')

    ordering_badge.short_description = 'Volatility in rho'


class CalibrationSampleInline(admin.TabularInline):
    model = CalibrationSample
    fields = ('seed', 'gap')
    readonly_fields = fields
    extra = 0
    can_delete = False


@admin.register(CalibrationCampaign)
class CalibrationCampaignAdmin(admin.ModelAdmin):
    list_display = ('__str__', 'runs', 'b', 'c', 'fit_badge', 'created_at')
    list_filter = ('converged',)
    readonly_fields = ('created_at',)
    inlines = [CalibrationSampleInline]

    def fit_badge(self, obj):
        """Display fit quality as colored badge"""
        if not obj.converged:
            return format_html(BADGE, '#dc3545', 'No fit')
        color = '#28a745' if (obj.r2_adj or 0) > 0.85 else '#ffc107'
        return format_html(BADGE, color, f"adj R2 {_number(obj.r2_adj, 3)}")

    fit_badge.short_description = 'Fit'


@admin.register(ExperimentLog)
class ExperimentLogAdmin(admin.ModelAdmin):
    """Command audit trail; read-only"""
    list_display = ('action_type_badge', 'seed', 'status', 'timestamp', 'description_preview')
    list_filter = ('action_type', 'succeeded', 'timestamp')
    search_fields = ('description',)
    readonly_fields = ('action_type', 'description', 'seed', 'succeeded', 'timestamp')
    date_hierarchy = 'timestamp'

    def action_type_badge(self, obj):
        """Display action type as colored badge"""
        colors = {
            'RUN': '#007bff',
            'CALIBRATE': '#6f42c1',
            'STATS': '#17a2b8',
            'SWEEP': '#28a745',
            'GAMMA': '#fd7e14',
            'REPRODUCE': '#343a40',
        }
        return format_html(BADGE, colors.get(obj.action_type, '#6c757d'), obj.get_action_type_display())

    action_type_badge.short_description = 'Action Type'

    def status(self, obj):
        """Display status as colored badge"""
        return format_html(BADGE, '#28a745', 'OK') if obj.succeeded else format_html(BADGE, '#dc3545', 'Failed')

    def description_preview(self, obj):
        """Display truncated description"""
        return obj.description[:40] + '...' if len(obj.description) > 40 else obj.description

    description_preview.short_description = 'Description'

    def has_add_permission(self, request):
        return False

    def has_change_permission(self, request, obj=None):
        return False

    def has_delete_permission(self, request, obj=None):
        return False


admin.site.site_header = "Market Lab - Admin Panel"
admin.site.site_title = "Market Lab Admin"
admin.site.index_title = "Artificial market runs and experiments"
