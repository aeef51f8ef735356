from django.apps import AppConfig


class BehaviorsConfig(AppConfig):
    default_auto_field = 'django.db.models.BigAutoField'
    name = 'behaviors'
    verbose_name = 'Behaviors'
