from django.apps import AppConfig


class ScenariosConfig(AppConfig):
    name = 'scenarios'
    verbose_name = '算例与命令行'
