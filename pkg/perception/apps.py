from django.apps import AppConfig


class PerceptionConfig(AppConfig):
    default_auto_field = 'django.db.models.BigAutoField'
    name = 'perception'
    verbose_name = 'Perception'
