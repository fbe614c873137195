"""
Django settings for peri-richards project.

求解器以Django项目的形式组织：管理命令作为命令行入口，
配置通过 python-decouple 从环境变量或 .env 文件读取。

For the full list of settings and their values, see
https://docs.djangoproject.com/en/5.1/ref/settings/
"""

from pathlib import Path

from decouple import Csv, config

# Build paths inside the project like this: BASE_DIR / 'subdir'.
BASE_DIR = Path(__file__).resolve().parent.parent


# SECURITY WARNING: keep the secret key used in production secret!
SECRET_KEY = config('SECRET_KEY', default='django-insecure-peri-richards-local-key')

DEBUG = config('DEBUG', default=False, cast=bool)

ALLOWED_HOSTS = config('ALLOWED_HOSTS', default='localhost,127.0.0.1', cast=Csv())


# Application definition

INSTALLED_APPS = [
    'base',       # 基础模块：验证器与通用工具
    'solver',     # 谱方法求解器
    'analysis',   # 收敛性分析
    'scenarios',  # 算例、配置文件与命令行
]

MIDDLEWARE = []

# 求解器不使用数据库
DATABASES = {}

DEFAULT_AUTO_FIELD = 'django.db.models.BigAutoField'


# Internationalization

LANGUAGE_CODE = 'zh-hans'

TIME_ZONE = 'Asia/Shanghai'

USE_I18N = True

USE_TZ = True


# 求解器配置
PERI_RICHARDS = {
    # 算子乘以物理域雅可比因子 Z/2
    'JACOBIAN_SCALING': config('PERI_JACOBIAN_SCALING', default=False, cast=bool),
    # 使用 DCT-I 快速变换
    'FAST_TRANSFORM': config('PERI_FAST_TRANSFORM', default=False, cast=bool),
    # 核函数系数: moments | discrete
    'KERNEL_TRANSFORM': config('PERI_KERNEL_TRANSFORM', default='moments'),
    # 收敛性研究的并发运行数
    'STUDY_WORKERS': config('PERI_STUDY_WORKERS', default=1, cast=int),
    # 每隔多少步记录一次进度日志
    'PROGRESS_EVERY': config('PERI_PROGRESS_EVERY', default=100, cast=int),
    # 含水量截断下限与容差（相对 θs−θr）
    'CLAMP_FLOOR': config('PERI_CLAMP_FLOOR', default=1e-9, cast=float),
    'CLAMP_TOLERANCE': config('PERI_CLAMP_TOLERANCE', default=1e-6, cast=float),
    # 求积验证每个节点的最少面板数因子
    'ORACLE_PANEL_FACTOR': config('PERI_ORACLE_PANEL_FACTOR', default=4, cast=int),
}


# Logging settings
LOG_DIR = BASE_DIR / 'logs'
LOG_DIR.mkdir(exist_ok=True)

LOG_LEVEL = config('LOG_LEVEL', default='INFO')
LOG_CONSOLE_LEVEL = config('LOG_CONSOLE_LEVEL', default='WARNING')

LOGGING = {
    'version': 1,
    'disable_existing_loggers': False,
    'formatters': {
        'verbose': {
            'format': '{levelname} {asctime} {module} {process:d} {thread:d} {message}',
            'style': '{',
        },
        'json': {
            'format': '{message}',
            'style': '{',
        },
    },
    'handlers': {
        'console': {
            'level': LOG_CONSOLE_LEVEL,
            'class': 'logging.StreamHandler',
            'formatter': 'verbose',
        },
        'solver_file': {
            'level': LOG_LEVEL,
            'class': 'logging.handlers.RotatingFileHandler',
            'filename': LOG_DIR / 'solver.log',
            'maxBytes': 1024 * 1024 * 10,  # 10MB
            'backupCount': 5,
            'formatter': 'json',
        },
    },
    'loggers': {
        'django': {
            'handlers': ['console'],
            'level': 'WARNING',
            'propagate': True,
        },
        'solver': {
            'handlers': ['console', 'solver_file'],
            'level': LOG_LEVEL,
            'propagate': False,
        },
    },
}
