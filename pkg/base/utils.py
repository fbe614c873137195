"""
通用工具类
提供求解器配置读取和数值格式化等辅助功能
"""

import math
from typing import Any

from django.conf import settings
from django.core.exceptions import ImproperlyConfigured


# 未加载Django配置时使用的默认值
SOLVER_DEFAULTS = {
    'JACOBIAN_SCALING': False,
    'FAST_TRANSFORM': False,
    'KERNEL_TRANSFORM': 'moments',
    'STUDY_WORKERS': 1,
    'PROGRESS_EVERY': 100,
    'CLAMP_FLOOR': 1e-9,
    'CLAMP_TOLERANCE': 1e-6,
    'ORACLE_PANEL_FACTOR': 4,
}


def get_solver_setting(key: str) -> Any:
    """
    读取求解器配置
    优先使用 settings.PERI_RICHARDS，未配置Django时退回默认值
    """
    if key not in SOLVER_DEFAULTS:
        raise KeyError(f'未知的求解器配置项: {key}')
    try:
        overrides = getattr(settings, 'PERI_RICHARDS', {})
    except ImproperlyConfigured:
        overrides = {}
    return overrides.get(key, SOLVER_DEFAULTS[key])


class NumberUtils:
    """数值格式化工具"""

    @staticmethod
    def format_float(value: float) -> str:
        """完整精度、与区域设置无关的浮点数格式"""
        return repr(float(value))

    @staticmethod
    def format_seconds(value: float) -> str:
        """时间标签，例如 15 或 0.5"""
        value = float(value)
        if value.is_integer():
            return str(int(value))
        return repr(value)

    @staticmethod
    def parse_float_list(text: str) -> list:
        """解析逗号分隔的数值列表"""
        items = [item.strip() for item in text.split(',') if item.strip()]
        values = [float(item) for item in items]
        for value in values:
            if not math.isfinite(value):
                raise ValueError(f'非有限数值: {value}')
        return values

    @staticmethod
    def safe_log_ratio(coarse: float, fine: float) -> float:
        """ln(coarse/fine)，任一值不为正时返回 nan"""
        if coarse <= 0.0 or fine <= 0.0:
            return math.nan
        return math.log(coarse / fine)
