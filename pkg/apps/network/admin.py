from django.contrib import admin

from .models import Scenario


@admin.register(Scenario)
class ScenarioAdmin(admin.ModelAdmin):
    list_display = ["name", "short_digest", "flow_count", "get_node_count", "created_at"]
    search_fields = ["name", "digest"]
    readonly_fields = ["digest", "flow_count", "created_at", "updated_at"]
    ordering = ["-created_at"]
    list_per_page = 20

    def short_digest(self, obj):
        return obj.digest[:12]

    short_digest.short_description = "Digest"

    def get_node_count(self, obj):
        return obj.get_node_count()

    get_node_count.short_description = "Nós"
