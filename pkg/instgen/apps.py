from django.apps import AppConfig


class InstgenConfig(AppConfig):
    name = 'instgen'
    verbose_name = 'Instance generation'
