"""
URL configuration for robosoccer project.

Only the admin is served; it browses persisted simulation runs and reports.
"""
from django.contrib import admin
from django.urls import path

urlpatterns = [
    path('admin/', admin.site.urls),
]
