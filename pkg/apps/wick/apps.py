from django.apps import AppConfig


class WickConfig(AppConfig):
    default_auto_field = 'django.db.models.BigAutoField'
    name = 'apps.wick'
    verbose_name = "Momentos de Wick y certificados"
