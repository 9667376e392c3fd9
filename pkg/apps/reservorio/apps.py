from django.apps import AppConfig


class ReservorioConfig(AppConfig):
    default_auto_field = 'django.db.models.BigAutoField'
    name = 'apps.reservorio'
    verbose_name = "Modelos de reservorio"
