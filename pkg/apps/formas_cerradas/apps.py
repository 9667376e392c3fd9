from django.apps import AppConfig


class FormasCerradasConfig(AppConfig):
    default_auto_field = 'django.db.models.BigAutoField'
    name = 'apps.formas_cerradas'
    verbose_name = "Fórmulas cerradas"
