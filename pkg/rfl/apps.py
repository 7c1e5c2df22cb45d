from django.apps import AppConfig


class RflAppConfig(AppConfig):
    default_auto_field = 'django.db.models.BigAutoField'
    name = 'rfl'
    verbose_name = 'Repetition foreground localization'
