from django.apps import AppConfig


class KickTimingConfig(AppConfig):
    default_auto_field = 'django.db.models.BigAutoField'
    name = 'kick_timing'
    verbose_name = 'Kick timing'
