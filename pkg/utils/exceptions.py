"""
自定义异常类和异常处理器
用于统一处理求解过程中的各种异常并映射为标准化的退出码和错误信息
"""

import os
from typing import Any, Dict, Optional, Tuple

from django.core.exceptions import ValidationError


class ExitCode:
    """命令行退出码定义"""

    SUCCESS = 0
    FAILURE = 1
    CONFIG_ERROR = 2
    INSTABILITY = 3
    IO_ERROR = 4


class ErrorMessage:
    """基础错误消息定义"""

    FAILURE = "求解器内部错误"
    CONFIG_ERROR = "配置文件无效"
    INSTABILITY = "数值计算不稳定"
    IO_ERROR = "文件读写失败"


class SolverException(Exception):
    """求解器异常基类"""

    default_detail = '数值求解异常'
    default_code = 'solver_error'
    exit_code = ExitCode.FAILURE

    def __init__(self, detail: Optional[str] = None, code: Optional[str] = None, **context):
        self.detail = detail if detail is not None else self.default_detail
        self.code = code or self.default_code
        self.record = context.pop('record', None)
        self.context: Dict[str, Any] = context
        super().__init__(self.detail)

    def __str__(self):
        return str(self.detail)


class ParameterError(SolverException, ValueError):
    """参数取值超出允许范围"""

    default_detail = '参数取值无效'
    default_code = 'invalid_parameter'

    def __init__(self, detail: Optional[str] = None, parameter: Optional[str] = None, **context):
        self.parameter = parameter
        super().__init__(detail, parameter=parameter, **context)


class InvalidDegreeError(ParameterError):
    """Chebyshev多项式阶数无效"""

    default_detail = 'Chebyshev阶数N必须不小于2'
    default_code = 'invalid_degree'


class GridMismatchError(SolverException, ValueError):
    """网格函数不属于同一个CGL网格"""

    default_detail = '网格函数所在的网格不一致'
    default_code = 'grid_mismatch'


class DomainError(SolverException, ValueError):
    """含水量超出物理范围，无法反演基质势"""

    default_detail = '含水量超出物理范围'
    default_code = 'domain_error'

    def __init__(self, detail: Optional[str] = None, index: Optional[int] = None,
                 value: Optional[float] = None, **context):
        self.index = index
        self.value = value
        super().__init__(detail, index=index, value=value, **context)


class InstabilityError(SolverException, ArithmeticError):
    """时间推进出现非有限值"""

    default_detail = ErrorMessage.INSTABILITY
    default_code = 'instability'
    exit_code = ExitCode.INSTABILITY

    def __init__(self, detail: Optional[str] = None, step_index: Optional[int] = None, **context):
        self.step_index = step_index
        super().__init__(detail, step_index=step_index, **context)


class ConfigError(SolverException, ValueError):
    """配置文件解析或校验失败"""

    default_detail = ErrorMessage.CONFIG_ERROR
    default_code = 'config_error'
    exit_code = ExitCode.CONFIG_ERROR

    def __init__(self, reason: str, key: Optional[str] = None, line: Optional[int] = None, **context):
        self.key = key
        self.line = line
        self.reason = reason
        location = []
        if key:
            location.append(f"键 '{key}'")
        if line is not None:
            location.append(f'第{line}行')
        detail = f"{', '.join(location)}: {reason}" if location else reason
        super().__init__(detail, key=key, line=line, **context)


class StudyError(SolverException, ValueError):
    """收敛性研究参数无效或运行失败"""

    default_detail = '收敛性研究失败'
    default_code = 'study_error'


class InvalidLevelsError(StudyError):
    """加密序列无效（层级不足、顺序错误或 dt 不整除 T）"""

    default_detail = '加密序列无效'
    default_code = 'invalid_levels'
    exit_code = ExitCode.CONFIG_ERROR


class OutputError(SolverException):
    """结果文件写出失败"""

    default_detail = ErrorMessage.IO_ERROR
    default_code = 'io_error'
    exit_code = ExitCode.IO_ERROR


def custom_exception_handler(exc: BaseException, context: Optional[Dict[str, Any]] = None) -> Tuple[int, str]:
    """
    自定义异常处理器
    统一将各种异常映射为 (退出码, 错误信息)
    """
    context = context or {}

    # 处理求解器自定义异常
    if isinstance(exc, SolverException):
        if isinstance(exc, DomainError) and exc.record is not None:
            # 运行中的反演失败同样视为数值不稳定
            return ExitCode.INSTABILITY, str(exc)
        if isinstance(exc, ParameterError) and context.get('phase') == 'config':
            return ExitCode.CONFIG_ERROR, str(exc)
        return exc.exit_code, str(exc)

    # 处理Django原生校验异常
    if isinstance(exc, ValidationError):
        if hasattr(exc, 'message_dict'):
            messages = '; '.join(f'{key}: {", ".join(values)}' for key, values in exc.message_dict.items())
        else:
            messages = '; '.join(exc.messages)
        return ExitCode.CONFIG_ERROR, f'{ErrorMessage.CONFIG_ERROR}: {messages}'

    # 处理文件系统异常
    if isinstance(exc, OSError):
        return ExitCode.IO_ERROR, f'{ErrorMessage.IO_ERROR}: {exc}'

    # 处理其他未捕获的异常
    if os.getenv('DEBUG', 'False').lower() == 'true':
        return ExitCode.FAILURE, f'{ErrorMessage.FAILURE}: {type(exc).__name__}: {exc}'
    return ExitCode.FAILURE, ErrorMessage.FAILURE
