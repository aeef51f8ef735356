"""
Django admin configuration for simulation runs.
"""

from django.contrib import admin
from . import models


class MatchReportRecordInline(admin.TabularInline):
    model = models.MatchReportRecord
    extra = 0
    fields = ('seed', 'goals_for', 'goals_against', 'lock_time', 'lock_correct',
              'collisions', 'violations', 'trigger_error', 'trace_path')
    readonly_fields = fields


@admin.register(models.SimulationRun)
class SimulationRunAdmin(admin.ModelAdmin):
    list_display = ('scenario', 'seeds', 'status', 'started_at', 'finished_at')
    list_filter = ('scenario', 'status')
    search_fields = ('scenario', 'seeds', 'output_dir')
    inlines = [MatchReportRecordInline]
    fieldsets = (
        ('Run', {
            'fields': ('scenario', 'seeds', 'status', 'output_dir')
        }),
        ('Timing', {
            'fields': ('started_at', 'finished_at')
        }),
        ('Configuration', {
            'classes': ('collapse',),
            'fields': ('config',)
        }),
    )


@admin.register(models.MatchReportRecord)
class MatchReportRecordAdmin(admin.ModelAdmin):
    list_display = ('run', 'seed', 'goals_for', 'goals_against', 'lock_correct', 'violations')
    list_filter = ('lock_correct', 'run__scenario')
    search_fields = ('trace_path',)
