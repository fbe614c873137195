"""
日志工具类
提供统一的求解日志记录功能，包括运行开始、进度、监控结果和运行结束日志
"""

import functools
import json
import logging
import time
from typing import Any, Dict, Optional


class SolverLogger:
    """求解日志记录器"""

    def __init__(self, name: str = 'solver'):
        self.logger = logging.getLogger(name)

    def log_run_start(self, scenario, n_steps: int, **kwargs):
        """
        记录运行开始日志

        Args:
            scenario: 计算场景
            n_steps: 时间步总数
            **kwargs: 额外参数
        """
        try:
            log_data = {
                'type': 'run_start',
                'scenario': getattr(scenario, 'name', '') or 'custom',
                'N': scenario.N,
                'dt': scenario.dt,
                'T': scenario.T,
                'delta': scenario.delta,
                'n_steps': n_steps,
                'timestamp': time.time(),
                **kwargs
            }
            self.logger.info(f"求解开始: {self._dumps(log_data)}")
        except Exception as e:
            self.logger.error(f"记录开始日志失败: {str(e)}")

    def log_progress(self, step_index: int, t: float, theta_max: float, theta_min: float, **kwargs):
        """记录时间推进进度"""
        log_data = {
            'type': 'progress',
            'step': step_index,
            't': t,
            'theta_max': theta_max,
            'theta_min': theta_min,
            **kwargs
        }
        self.logger.debug(f"求解进度: {self._dumps(log_data)}")

    def log_monitor_violation(self, step_index: int, t: float, theta_max: float, bound: float, **kwargs):
        """记录极大值原理监控发现的越界"""
        log_data = {
            'type': 'max_principle_violation',
            'step': step_index,
            't': t,
            'theta_max': theta_max,
            'bound': bound,
            **kwargs
        }
        self.logger.warning(f"极大值原理越界: {self._dumps(log_data)}")

    def log_run_end(self, record, **kwargs):
        """
        记录运行结束日志

        Args:
            record: 运行记录
            **kwargs: 额外参数
        """
        try:
            diagnostics = record.diagnostics
            log_data = {
                'type': 'run_end',
                'steps': diagnostics.step_count,
                'complete': diagnostics.complete,
                'wall_time': diagnostics.wall_time,
                'violations': len(diagnostics.violations),
                'timestamp': time.time(),
                **kwargs
            }
            if diagnostics.complete:
                self.logger.info(f"求解完成: {self._dumps(log_data)}")
            else:
                self.logger.warning(f"求解中断: {self._dumps(log_data)}")
        except Exception as e:
            self.logger.error(f"记录结束日志失败: {str(e)}")

    def log_error(self, error: BaseException, operation: Optional[str] = None, **kwargs):
        """
        记录错误日志

        Args:
            error: 错误对象
            operation: 操作名称
            **kwargs: 额外参数
        """
        try:
            log_data = {
                'type': 'error',
                'operation': operation,
                'error_type': type(error).__name__,
                'error_message': str(error),
                'timestamp': time.time(),
                **kwargs
            }
            self.logger.error(f"求解错误: {self._dumps(log_data)}")
        except Exception as e:
            self.logger.error(f"记录错误日志失败: {str(e)}")

    def log_call(self, operation: str, duration: float, **kwargs):
        """记录一次顶层操作的耗时"""
        log_data = {
            'type': 'call',
            'operation': operation,
            'duration': duration,
            **kwargs
        }
        self.logger.info(f"操作完成: {self._dumps(log_data)}")

    @staticmethod
    def _dumps(data: Dict[str, Any]) -> str:
        return json.dumps(data, ensure_ascii=False, default=str)


# 全局日志记录器实例
solver_logger = SolverLogger()


def log_solver_call(func=None, *, log_duration=True, log_error=True):
    """
    求解操作日志装饰器

    Args:
        func: 被装饰的函数
        log_duration: 是否记录耗时
        log_error: 是否记录错误日志
    """
    def decorator(operation):
        @functools.wraps(operation)
        def wrapper(*args, **kwargs):
            name = operation.__name__
            start_time = time.perf_counter()
            try:
                result = operation(*args, **kwargs)
            except Exception as e:
                if log_error:
                    solver_logger.log_error(e, operation=name)
                raise
            if log_duration:
                solver_logger.log_call(name, time.perf_counter() - start_time)
            return result

        return wrapper

    if func is None:
        return decorator
    else:
        return decorator(func)
