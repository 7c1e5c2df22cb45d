from django.apps import AppConfig


class MprAppConfig(AppConfig):
    default_auto_field = 'django.db.models.BigAutoField'
    name = 'mpr'
    verbose_name = 'Multi-scale period representation'
