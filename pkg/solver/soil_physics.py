"""
Van Genuchten-Mualem 本构关系
θ(h_m)、K(h_m)、闭式反演 h_m(θ) 以及水力势 H = h_m + z
"""

from dataclasses import asdict, dataclass, field
from typing import Dict, Protocol, runtime_checkable

import numpy as np

from base.utils import get_solver_setting
from base.validators import (
    IntervalValidator,
    positive_validator,
    unit_interval_validator,
    validate_parameter,
)
from utils.exceptions import DomainError, ParameterError


@dataclass(frozen=True)
class VanGenuchtenParams:
    """
    VGM参数
    theta_r/theta_s 无量纲，alpha 单位 1/cm，K_s 单位 cm/s
    """
    theta_r: float
    theta_s: float
    alpha: float
    n: float
    K_s: float
    m: float = field(init=False)

    def __post_init__(self):
        for name in ('theta_r', 'theta_s', 'alpha', 'n', 'K_s'):
            object.__setattr__(self, name, float(getattr(self, name)))

        validate_parameter('theta_r', self.theta_r, unit_interval_validator)
        validate_parameter('theta_s', self.theta_s, unit_interval_validator)
        if not self.theta_r < self.theta_s:
            raise ParameterError(
                f'要求 theta_r < theta_s，收到 {self.theta_r} 与 {self.theta_s}', parameter='theta_s'
            )
        validate_parameter('alpha', self.alpha, positive_validator)
        validate_parameter('n', self.n, IntervalValidator(lower=1, lower_inclusive=False))
        validate_parameter('K_s', self.K_s, positive_validator)
        object.__setattr__(self, 'm', 1.0 - 1.0 / self.n)

    @property
    def theta_range(self) -> float:
        return self.theta_s - self.theta_r

    def to_dict(self) -> Dict[str, float]:
        data = asdict(self)
        data.pop('m')
        return data


def water_content(p: VanGenuchtenParams, h_m):
    """θ(h_m) = θr + (θs−θr) / (1 + |α h_m|^n)^m"""
    h_m = np.asarray(h_m, dtype=float)
    return p.theta_r + p.theta_range / (1.0 + np.abs(p.alpha * h_m) ** p.n) ** p.m


def hydraulic_conductivity(p: VanGenuchtenParams, h_m):
    """K(h_m) = Ks · [1/(1+|αh|^n)]^(m/2) · [1 − (1 − 1/(1+|αh|^n))^m]²"""
    h_m = np.asarray(h_m, dtype=float)
    power = np.abs(p.alpha * h_m) ** p.n
    inverse = 1.0 / (1.0 + power)
    # 1 − 1/(1+u) 写成 u/(1+u)，避免 h_m→0 时的抵消误差
    complement = power * inverse
    return p.K_s * inverse ** (p.m / 2.0) * (1.0 - complement ** p.m) ** 2


def effective_saturation(p: VanGenuchtenParams, theta):
    """Se = (θ−θr)/(θs−θr)"""
    return (np.asarray(theta, dtype=float) - p.theta_r) / p.theta_range


def _first_offender(mask: np.ndarray) -> int:
    return int(np.flatnonzero(np.atleast_1d(mask))[0])


def matric_head(p: VanGenuchtenParams, theta):
    """
    闭式反演 h_m(θ) ≤ 0，θ = θs 时为 0

    Raises:
        DomainError: θ 低于 θr + 截断下限，或高于 θs
    """
    theta = np.asarray(theta, dtype=float)
    floor = p.theta_r + get_solver_setting('CLAMP_FLOOR') * p.theta_range
    bad = ~np.isfinite(theta) | (theta < floor) | (theta > p.theta_s)
    if np.any(bad):
        index = _first_offender(bad)
        value = float(np.atleast_1d(theta)[index])
        raise DomainError(
            f'含水量 {value!r} 超出可反演范围 [{floor!r}, {p.theta_s!r}] (节点 {index})',
            index=index, value=value,
        )

    se = effective_saturation(p, theta)
    magnitude = np.maximum(se ** (-1.0 / p.m) - 1.0, 0.0) ** (1.0 / p.n)
    return -magnitude / p.alpha


def clamp_water_content(p: VanGenuchtenParams, theta) -> np.ndarray:
    """
    将节点含水量截断到 [θr + floor·(θs−θr), θs]
    超出容差 tolerance·(θs−θr) 的值视为数值不稳定，不做截断

    Raises:
        DomainError: 存在非有限值或越界超过容差的节点
    """
    theta = np.asarray(theta, dtype=float)
    lower = p.theta_r + get_solver_setting('CLAMP_FLOOR') * p.theta_range
    tolerance = get_solver_setting('CLAMP_TOLERANCE') * p.theta_range

    bad = ~np.isfinite(theta) | (theta < lower - tolerance) | (theta > p.theta_s + tolerance)
    if np.any(bad):
        index = _first_offender(bad)
        value = float(np.atleast_1d(theta)[index])
        raise DomainError(
            f'节点 {index} 的含水量 {value!r} 超出物理范围 [{p.theta_r!r}, {p.theta_s!r}]',
            index=index, value=value,
        )
    return np.clip(theta, lower, p.theta_s)


def hydraulic_potential(h_m, z):
    """H = h_m + z（z 为物理高程，单位 cm）"""
    return np.asarray(h_m, dtype=float) + np.asarray(z, dtype=float)


@runtime_checkable
class SoilModel(Protocol):
    """时间推进所需的土壤模型接口"""

    theta_r: float
    theta_s: float

    def matric_head(self, theta): ...

    def hydraulic_conductivity(self, h_m): ...


class VanGenuchtenMualem:
    """把VGM参数和本构关系绑定为土壤模型"""

    def __init__(self, params: VanGenuchtenParams, name: str = ''):
        self.params = params
        self.name = name

    @property
    def theta_r(self) -> float:
        return self.params.theta_r

    @property
    def theta_s(self) -> float:
        return self.params.theta_s

    def water_content(self, h_m):
        return water_content(self.params, h_m)

    def hydraulic_conductivity(self, h_m):
        return hydraulic_conductivity(self.params, h_m)

    def matric_head(self, theta):
        return matric_head(self.params, clamp_water_content(self.params, theta))

    def __eq__(self, other):
        return isinstance(other, VanGenuchtenMualem) and other.params == self.params

    def __hash__(self):
        return hash(self.params)

    def __repr__(self):
        label = self.name or 'custom'
        return f'VanGenuchtenMualem({label}, {self.params!r})'


# 两个算例使用的土壤参数
EXAMPLE1_SAND = VanGenuchtenParams(theta_r=0.075, theta_s=0.287, alpha=0.036, n=1.56, K_s=0.00094)
EXAMPLE2_BERINO = VanGenuchtenParams(theta_r=0.0286, theta_s=0.3658, alpha=0.028, n=2.2390, K_s=0.0063)

SOIL_PRESETS = {
    'example1_sand': EXAMPLE1_SAND,
    'example2_berino': EXAMPLE2_BERINO,
}


def soil_preset(name: str) -> VanGenuchtenMualem:
    """
    按名称获取预设土壤

    Raises:
        ParameterError: 未知的预设名称
    """
    try:
        return VanGenuchtenMualem(SOIL_PRESETS[name], name=name)
    except KeyError:
        choices = ', '.join(sorted(SOIL_PRESETS))
        raise ParameterError(f'未知的土壤预设 {name!r}，可选: {choices}', parameter='soil') from None
