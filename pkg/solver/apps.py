from django.apps import AppConfig


class SolverConfig(AppConfig):
    name = 'solver'
    verbose_name = '谱方法求解器'
