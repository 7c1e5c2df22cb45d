from django.apps import AppConfig


class TensorcoreConfig(AppConfig):
    default_auto_field = 'django.db.models.BigAutoField'
    name = 'tensorcore'
    verbose_name = 'Tensor core'
