from django.apps import AppConfig


class RelaxationsConfig(AppConfig):
    name = 'relaxations'
    verbose_name = 'State space relaxations'
