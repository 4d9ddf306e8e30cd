from django.contrib import admin

from .models import ExperimentRun


@admin.register(ExperimentRun)
class ExperimentRunAdmin(admin.ModelAdmin):
    list_display = ('command', 'scheme', 'status', 'trials', 'mean_rate', 'std_error', 'started_at', 'duration_display')
    list_filter = ('status', 'command', 'scheme', 'started_at')
    search_fields = ('scheme', 'output_path', 'error_message')
    readonly_fields = (
        'command', 'scheme', 'parameters', 'seed', 'trials', 'mean_rate', 'std_error',
        'bounds', 'output_path', 'started_at', 'completed_at', 'error_message',
    )
    date_hierarchy = 'started_at'

    def duration_display(self, obj):
        duration = obj.duration
        if duration:
            total_seconds = duration.total_seconds()
            hours = int(total_seconds // 3600)
            minutes = int((total_seconds % 3600) // 60)
            seconds = int(total_seconds % 60)
            return f"{hours:02d}:{minutes:02d}:{seconds:02d}"
        return "N/A"
    duration_display.short_description = 'Duration'

    def has_add_permission(self, request):
        return False
