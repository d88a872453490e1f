from django.contrib import admin

from .models import ScheduleRun


@admin.register(ScheduleRun)
class ScheduleRunAdmin(admin.ModelAdmin):
    list_display = ["scenario", "model_kind", "gamma", "status", "objective", "nodes", "created_at"]
    list_filter = ["model_kind", "status"]
    search_fields = ["scenario__name", "infeasible_family"]
    readonly_fields = ["created_at"]
    ordering = ["-created_at"]
    list_per_page = 20
