from django.apps import AppConfig


class SolverAppConfig(AppConfig):
    name = 'solver'
    verbose_name = 'Bidirectional labeling solver'
