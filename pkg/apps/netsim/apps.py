from django.apps import AppConfig


class NetsimConfig(AppConfig):
    default_auto_field = "django.db.models.BigAutoField"
    name = "apps.netsim"
    verbose_name = "Netsim"
    app_label = "netsim"
