from django.apps import AppConfig


class ConmutadoresConfig(AppConfig):
    default_auto_field = 'django.db.models.BigAutoField'
    name = 'apps.conmutadores'
    verbose_name = "Álgebra de multiconmutadores"
