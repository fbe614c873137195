"""
命令处理装饰器
用于简化管理命令中的异常处理，统一映射为退出码
"""

import functools
from typing import Callable

from django.core.management.base import CommandError

from .exceptions import custom_exception_handler
from .logging import solver_logger


def handle_exceptions(func: Callable = None, *, phase: str = None):
    """
    管理命令异常处理装饰器
    将求解器异常转换为带退出码的CommandError

    Args:
        func: 被装饰的函数
        phase: 当前阶段，参与退出码映射（例如 'config'）
    """
    def decorator(handler: Callable) -> Callable:
        @functools.wraps(handler)
        def wrapper(*args, **kwargs):
            try:
                return handler(*args, **kwargs)
            except CommandError:
                raise
            except Exception as e:
                exit_code, message = custom_exception_handler(e, {'phase': phase})
                solver_logger.log_error(e, operation=handler.__name__, exit_code=exit_code)
                raise CommandError(message, returncode=exit_code) from e

        return wrapper

    if func is None:
        return decorator
    return decorator(func)
