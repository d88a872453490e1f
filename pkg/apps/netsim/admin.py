from django.contrib import admin

from .models import SimulationRun


@admin.register(SimulationRun)
class SimulationRunAdmin(admin.ModelAdmin):
    list_display = ["schedule_run", "mode", "seed", "jitter_ns", "skew_ns", "mce", "mcv", "drops", "created_at"]
    list_filter = ["mode"]
    search_fields = ["schedule_run__scenario__name"]
    readonly_fields = ["created_at", "report"]
    ordering = ["-created_at"]
    list_per_page = 20
