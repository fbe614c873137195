"""
初始含水量剖面
所有剖面定义在映射坐标 x ∈ [-1, 1] 上，x = 1 为顶部，并可与配置文件互相转换
"""

from dataclasses import dataclass
from typing import Any, Dict, Tuple

import numpy as np
from numpy.polynomial import chebyshev

from utils.exceptions import ParameterError


@dataclass(frozen=True)
class KinkedLinearProfile:
    """
    折线剖面，在 x = 0 处折转
    x ≤ 0: lower_anchor + lower_slope·(x + 1)
    x > 0: upper_anchor + upper_slope·(x − 1)
    """
    lower_anchor: float
    lower_slope: float
    upper_anchor: float
    upper_slope: float

    type_name = 'kinked_linear'

    def __call__(self, x):
        x = np.asarray(x, dtype=float)
        lower = self.lower_anchor + self.lower_slope * (x + 1.0)
        upper = self.upper_anchor + self.upper_slope * (x - 1.0)
        return np.where(x <= 0.0, lower, upper)

    def to_config(self) -> Dict[str, Any]:
        return {
            'type': self.type_name,
            'lower_anchor': self.lower_anchor,
            'lower_slope': self.lower_slope,
            'upper_anchor': self.upper_anchor,
            'upper_slope': self.upper_slope,
        }


@dataclass(frozen=True)
class CosineProfile:
    """amplitude·cos((x + 1)π/2) + offset"""
    amplitude: float
    offset: float

    type_name = 'cosine'

    def __call__(self, x):
        x = np.asarray(x, dtype=float)
        return self.amplitude * np.cos((x + 1.0) * np.pi / 2.0) + self.offset

    def to_config(self) -> Dict[str, Any]:
        return {'type': self.type_name, 'amplitude': self.amplitude, 'offset': self.offset}


@dataclass(frozen=True)
class ChebyshevPolynomialProfile:
    """Σ c_k T_k(x)"""
    coefficients: Tuple[float, ...]

    type_name = 'chebyshev'

    def __post_init__(self):
        coefficients = tuple(float(c) for c in self.coefficients)
        if not coefficients:
            raise ParameterError('Chebyshev剖面至少需要一个系数', parameter='coefficients')
        object.__setattr__(self, 'coefficients', coefficients)

    @property
    def degree(self) -> int:
        return len(self.coefficients) - 1

    def __call__(self, x):
        return chebyshev.chebval(np.asarray(x, dtype=float), self.coefficients)

    def to_config(self) -> Dict[str, Any]:
        return {'type': self.type_name, 'coefficients': list(self.coefficients)}


@dataclass(frozen=True)
class TabulatedProfile:
    """节点值表，表间线性插值，x 必须严格递增并覆盖 [-1, 1]"""
    x: Tuple[float, ...]
    values: Tuple[float, ...]

    type_name = 'tabulated'

    def __post_init__(self):
        x = tuple(float(v) for v in self.x)
        values = tuple(float(v) for v in self.values)
        if len(x) < 2 or len(x) != len(values):
            raise ParameterError('x 与 values 的长度必须相同且不少于2', parameter='values')
        if any(b <= a for a, b in zip(x, x[1:])):
            raise ParameterError('x 必须严格递增', parameter='x')
        if x[0] != -1.0 or x[-1] != 1.0:
            raise ParameterError('x 必须从 -1 开始、到 1 结束', parameter='x')
        object.__setattr__(self, 'x', x)
        object.__setattr__(self, 'values', values)

    def __call__(self, x):
        return np.interp(np.asarray(x, dtype=float), self.x, self.values)

    def to_config(self) -> Dict[str, Any]:
        return {'type': self.type_name, 'x': list(self.x), 'values': list(self.values)}


PROFILE_TYPES = {
    profile.type_name: profile
    for profile in (KinkedLinearProfile, CosineProfile, ChebyshevPolynomialProfile, TabulatedProfile)
}


def profile_from_config(data: Dict[str, Any]):
    """
    根据配置映射构造剖面

    Raises:
        ParameterError: 未知类型或字段不匹配
    """
    data = dict(data)
    type_name = data.pop('type', None)
    profile_class = PROFILE_TYPES.get(type_name)
    if profile_class is None:
        choices = ', '.join(sorted(PROFILE_TYPES))
        raise ParameterError(f'未知的初始条件类型 {type_name!r}，可选: {choices}', parameter='type')
    try:
        return profile_class(**data)
    except TypeError as e:
        raise ParameterError(f'{type_name} 剖面字段无效: {e}', parameter='ic') from e
