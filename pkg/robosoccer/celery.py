"""
Celery application for robosoccer seed batches.
"""

import os

from celery import Celery

os.environ.setdefault('DJANGO_SETTINGS_MODULE', 'robosoccer.settings')

app = Celery('robosoccer')
app.config_from_object('django.conf:settings', namespace='CELERY')
app.autodiscover_tasks()
