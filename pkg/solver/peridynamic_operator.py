"""
近场动力学非局部算子
分布式影响函数 φ_δ、积分常数 β，以及非局部算子 L 的两种实现：
谱方法（变换乘积形式）与直接求积（用作验证基准）
"""

import math
from dataclasses import dataclass
from functools import lru_cache
from typing import Optional

import numpy as np
from numpy.polynomial import chebyshev, legendre
from scipy import integrate

from base.utils import get_solver_setting
from base.validators import horizon_validator, validate_parameter
from utils.exceptions import GridMismatchError, ParameterError

from .spectral_core import ChebGrid, GridFunction, forward_values, inverse_values, make_grid

KERNEL_MODES = ('moments', 'discrete')

# 核函数矩的 Gauss-Legendre 额外节点数
MOMENT_EXTRA_NODES = 64


def _check_delta(delta: float) -> float:
    return validate_parameter('delta', float(delta), horizon_validator)


def phi_delta(delta: float, z):
    """
    影响函数 φ_δ(z)
    |z| < 1−δ 时为 0，1−δ ≤ |z| ≤ 1 时线性增长到 1，|z| > 1 时为 0
    """
    delta = _check_delta(delta)
    r = np.abs(np.asarray(z, dtype=float))
    values = np.clip((r - (1.0 - delta)) / delta, 0.0, 1.0)
    return np.where(r > 1.0, 0.0, values)


def phi_bar(delta: float, z):
    """φ̄_δ(z) = φ_δ(z)/|z|，原点处取 0"""
    r = np.abs(np.asarray(z, dtype=float))
    phi = phi_delta(delta, z)
    return np.divide(phi, r, out=np.zeros_like(r), where=r > 0.0)


def beta(delta: float) -> float:
    """β = ∫φ̄_δ = 2(1 + ((1−δ)/δ)·ln(1−δ))"""
    delta = _check_delta(delta)
    return 2.0 * (1.0 + (1.0 - delta) / delta * math.log1p(-delta))


@dataclass(frozen=True)
class InfluenceKernel:
    """分布式影响函数，horizon δ ∈ (0, 1)"""
    delta: float

    def __post_init__(self):
        object.__setattr__(self, 'delta', _check_delta(self.delta))

    def phi(self, z):
        return phi_delta(self.delta, z)

    def phi_bar(self, z):
        return phi_bar(self.delta, z)

    @property
    def beta(self) -> float:
        return beta(self.delta)


@dataclass(frozen=True, eq=False)
class OperatorInputs:
    """算子输入：节点上的 K、H 与 Λ = K·H"""
    K_vals: GridFunction
    H_vals: GridFunction
    Lambda_vals: GridFunction
    kernel: InfluenceKernel

    def __post_init__(self):
        grid = self.K_vals.grid
        for label in ('H_vals', 'Lambda_vals'):
            other = getattr(self, label).grid
            if other != grid:
                raise GridMismatchError(f'{label} 的网格 N={other.N} 与 K_vals 的 N={grid.N} 不一致')

    @classmethod
    def from_fields(cls, K_vals: GridFunction, H_vals: GridFunction, kernel: InfluenceKernel) -> 'OperatorInputs':
        if K_vals.grid != H_vals.grid:
            raise GridMismatchError(f'K 与 H 的网格不一致: N={K_vals.grid.N} 与 N={H_vals.grid.N}')
        return cls(K_vals, H_vals, GridFunction(K_vals.grid, K_vals.values * H_vals.values), kernel)

    @property
    def grid(self) -> ChebGrid:
        return self.K_vals.grid


def _moment_multipliers(N: int, delta: float) -> np.ndarray:
    # κ_k = ∫ φ̄_δ(s) T_k(s) ds，φ̄ 为偶函数，奇数阶为 0
    points, weights = legendre.leggauss(N + MOMENT_EXTRA_NODES)
    half = delta / 2.0
    s = (1.0 - half) + half * points
    vander = chebyshev.chebvander(s, N)
    kappa = 2.0 * half * (vander.T @ (weights * phi_bar(delta, s)))
    kappa[1::2] = 0.0
    kappa[0] = beta(delta)
    return kappa


@lru_cache(maxsize=64)
def _cached_multipliers(N: int, delta: float, mode: str) -> np.ndarray:
    if mode == 'moments':
        kappa = _moment_multipliers(N, delta)
    else:
        grid = make_grid(N)
        kappa = forward_values(grid, phi_bar(delta, grid.nodes))
    kappa.setflags(write=False)
    return kappa


def kernel_multipliers(grid: ChebGrid, delta: float, mode: Optional[str] = None) -> np.ndarray:
    """
    核函数在系数乘积中的乘子向量（按 (N, δ, mode) 缓存）

    Args:
        grid: CGL网格
        delta: horizon
        mode: 'moments' 使用 φ̄ 的Chebyshev矩（κ_0 = β）；
              'discrete' 使用 φ̄ 节点值的离散变换
    """
    mode = mode or get_solver_setting('KERNEL_TRANSFORM')
    if mode not in KERNEL_MODES:
        raise ParameterError(f'未知的核函数变换方式 {mode!r}，可选: {", ".join(KERNEL_MODES)}',
                             parameter='kernel_transform')
    return _cached_multipliers(grid.N, _check_delta(delta), mode)


def operator_values(grid: ChebGrid, K: np.ndarray, H: np.ndarray, kernel: InfluenceKernel,
                    mode: Optional[str] = None) -> np.ndarray:
    """
    谱方法算子（不含源项），数组形式
    ½[C(φ̄,Λ) + K·C(φ̄,H)] − ½[H·C(φ̄,K) + βΛ]
    """
    kappa = kernel_multipliers(grid, kernel.delta, mode)
    Lam = K * H

    def convolve(values):
        return inverse_values(grid, kappa * forward_values(grid, values))

    return 0.5 * (convolve(Lam) + K * convolve(H)) - 0.5 * (H * convolve(K) + kernel.beta * Lam)


def _require_grid(inputs: OperatorInputs, S_vals: GridFunction):
    if S_vals.grid != inputs.grid:
        raise GridMismatchError(f'源项网格 N={S_vals.grid.N} 与算子输入 N={inputs.grid.N} 不一致')


def apply_spectral(inputs: OperatorInputs, S_vals: GridFunction, mode: Optional[str] = None) -> GridFunction:
    """谱方法计算 L(θ) + S"""
    _require_grid(inputs, S_vals)
    values = operator_values(inputs.grid, inputs.K_vals.values, inputs.H_vals.values, inputs.kernel, mode)
    return GridFunction(inputs.grid, values + S_vals.values)


def _simpson_nodes(a: float, b: float, panels: int) -> np.ndarray:
    panels += panels % 2
    return np.linspace(a, b, panels + 1)


def apply_quadrature(inputs: OperatorInputs, S_vals: GridFunction) -> GridFunction:
    """
    直接求积计算 L(θ) + S
    在每个节点 z_h 上对 ∫ φ̄(z′−z_h)·(K(z_h)+K(z′))/2·(H(z′)−H(z_h)) dz′ 做复合Simpson积分，
    积分区间在 z_h ± (1−δ) 与 z_h ± 1 处分段，K、H 由Chebyshev插值计算
    """
    _require_grid(inputs, S_vals)
    grid = inputs.grid
    delta = inputs.kernel.delta
    inner = 1.0 - delta

    K_coeffs = forward_values(grid, inputs.K_vals.values)
    H_coeffs = forward_values(grid, inputs.H_vals.values)
    panel_density = get_solver_setting('ORACLE_PANEL_FACTOR') * grid.N / delta

    values = np.zeros(grid.size)
    for h, z_h in enumerate(grid.nodes):
        K_h = inputs.K_vals.values[h]
        H_h = inputs.H_vals.values[h]
        total = 0.0
        for a, b in ((z_h - 1.0, z_h - inner), (z_h + inner, z_h + 1.0)):
            a, b = max(a, -1.0), min(b, 1.0)
            if b <= a:
                continue
            panels = max(2, math.ceil(panel_density * (b - a)))
            z = _simpson_nodes(a, b, panels)
            K_z = chebyshev.chebval(z, K_coeffs)
            H_z = chebyshev.chebval(z, H_coeffs)
            integrand = phi_bar(delta, z - z_h) * 0.5 * (K_h + K_z) * (H_z - H_h)
            total += integrate.simpson(integrand, x=z)
        values[h] = total

    return GridFunction(grid, values + S_vals.values)
