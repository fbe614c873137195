"""
Chebyshev-Gauss-Lobatto网格与离散Chebyshev变换
提供CGL节点、求积权重、正反变换、投影算子以及加权离散范数
"""

from dataclasses import dataclass, field
from functools import lru_cache
from typing import Callable, Optional

import numpy as np
from numpy.polynomial import chebyshev
from scipy import fft as sp_fft

from base.utils import get_solver_setting
from utils.exceptions import GridMismatchError, InvalidDegreeError, ParameterError


@dataclass(frozen=True, eq=False)
class ChebGrid:
    """
    CGL网格
    nodes[h] = cos(hπ/N)，从 +1 递减到 -1
    """
    N: int
    nodes: np.ndarray
    quad_weights: np.ndarray
    normalizers: np.ndarray
    # basis[k, h] = T_k(nodes[h])
    basis: np.ndarray = field(repr=False)

    @property
    def size(self) -> int:
        return self.N + 1

    def __eq__(self, other):
        return isinstance(other, ChebGrid) and other.N == self.N

    def __hash__(self):
        return hash(('ChebGrid', self.N))


def _readonly(array: np.ndarray) -> np.ndarray:
    array.setflags(write=False)
    return array


@lru_cache(maxsize=None)
def _build_grid(N: int) -> ChebGrid:
    h = np.arange(N + 1)
    # sin形式保证节点关于原点严格对称、中心节点精确为0
    nodes = np.sin(np.pi * (N - 2 * h) / (2 * N))

    quad_weights = np.full(N + 1, np.pi / N)
    quad_weights[[0, N]] = np.pi / (2 * N)

    normalizers = np.full(N + 1, np.pi / 2)
    normalizers[[0, N]] = np.pi

    # 节点上 T_k(z_h) = cos(khπ/N)，角度先对 2N 取模
    angle_index = np.outer(h, h) % (2 * N)
    basis = np.cos(np.pi * angle_index / N)

    return ChebGrid(
        N=N,
        nodes=_readonly(nodes),
        quad_weights=_readonly(quad_weights),
        normalizers=_readonly(normalizers),
        basis=_readonly(basis),
    )


def make_grid(N: int) -> ChebGrid:
    """
    构造N阶CGL网格（按N缓存）

    Raises:
        InvalidDegreeError: N不是不小于2的整数
    """
    if isinstance(N, bool) or not isinstance(N, (int, np.integer)) or N < 2:
        raise InvalidDegreeError(f'Chebyshev阶数N必须是不小于2的整数，收到 {N!r}', parameter='N')
    return _build_grid(int(N))


def _checked_array(grid: ChebGrid, data, label: str) -> np.ndarray:
    array = np.array(data, dtype=float)
    if array.shape != (grid.size,):
        raise GridMismatchError(
            f'{label}长度应为 N+1={grid.size}，实际为 {array.shape}',
            expected=grid.size,
        )
    if not np.all(np.isfinite(array)):
        bad = int(np.flatnonzero(~np.isfinite(array))[0])
        raise ParameterError(f'{label}在索引{bad}处不是有限值', parameter=label, index=bad)
    return _readonly(array)


@dataclass(frozen=True, eq=False)
class GridFunction:
    """物理空间中的节点值"""
    grid: ChebGrid
    values: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, 'values', _checked_array(self.grid, self.values, 'values'))

    @classmethod
    def from_function(cls, grid: ChebGrid, func: Callable[[np.ndarray], np.ndarray]) -> 'GridFunction':
        """在节点上采样函数"""
        return cls(grid, np.broadcast_to(func(grid.nodes), grid.nodes.shape))

    @classmethod
    def constant(cls, grid: ChebGrid, value: float) -> 'GridFunction':
        return cls(grid, np.full(grid.size, float(value)))


@dataclass(frozen=True, eq=False)
class ChebCoeffs:
    """系数空间中的Chebyshev展开系数"""
    grid: ChebGrid
    coeffs: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, 'coeffs', _checked_array(self.grid, self.coeffs, 'coeffs'))


def _use_fast_path(fast: Optional[bool]) -> bool:
    return get_solver_setting('FAST_TRANSFORM') if fast is None else fast


def forward_values(grid: ChebGrid, values: np.ndarray, fast: Optional[bool] = None) -> np.ndarray:
    """
    离散Chebyshev正变换（数组形式）
    ū_k = (1/γ_k) Σ_h f(z_h) T_k(z_h) w_h
    """
    if _use_fast_path(fast):
        # DCT-I: y_k = f_0 + (-1)^k f_N + 2 Σ f_h cos(πkh/N)
        return sp_fft.dct(values, type=1) * (np.pi / (2 * grid.N)) / grid.normalizers
    return grid.basis @ (values * grid.quad_weights) / grid.normalizers


def inverse_values(grid: ChebGrid, coeffs: np.ndarray, fast: Optional[bool] = None) -> np.ndarray:
    """
    离散Chebyshev反变换（数组形式）
    values[h] = Σ_k c_k T_k(z_h)
    """
    if _use_fast_path(fast):
        doubled = np.array(coeffs, dtype=float)
        doubled[[0, grid.N]] *= 2.0
        return sp_fft.dct(doubled, type=1) / 2.0
    return grid.basis.T @ coeffs


def forward_transform(f: GridFunction, fast: Optional[bool] = None) -> ChebCoeffs:
    """节点值 → Chebyshev系数"""
    return ChebCoeffs(f.grid, forward_values(f.grid, f.values, fast))


def inverse_transform(c: ChebCoeffs, fast: Optional[bool] = None) -> GridFunction:
    """Chebyshev系数 → 节点值"""
    return GridFunction(c.grid, inverse_values(c.grid, c.coeffs, fast))


def project(f: GridFunction, M: int) -> GridFunction:
    """
    正交投影 P_M：截断阶数大于M的系数

    Raises:
        ParameterError: M不在 [0, N] 内
    """
    N = f.grid.N
    if isinstance(M, bool) or not isinstance(M, (int, np.integer)) or not 0 <= M <= N:
        raise ParameterError(f'投影阶数M必须满足 0 <= M <= {N}，收到 {M!r}', parameter='M')
    if M == N:
        return f
    coeffs = forward_values(f.grid, f.values)
    coeffs[M + 1:] = 0.0
    return GridFunction(f.grid, inverse_values(f.grid, coeffs))


def chebyshev_t(k: int, z) -> np.ndarray:
    """三项递推计算 T_k(z)"""
    if k < 0:
        raise ParameterError(f'Chebyshev多项式次数必须非负，收到 {k}', parameter='k')
    z = np.asarray(z, dtype=float)
    return chebyshev.chebvander(z, k)[..., k]


def evaluate(c: ChebCoeffs, x) -> np.ndarray:
    """在任意点上计算展开式 Σ c_k T_k(x)（Clenshaw）"""
    return chebyshev.chebval(np.asarray(x, dtype=float), c.coeffs)


def interpolate(f: GridFunction, target: ChebGrid) -> GridFunction:
    """把网格函数的Chebyshev插值多项式计算到另一套CGL节点上"""
    if target == f.grid:
        return f
    return GridFunction(target, evaluate(forward_transform(f), target.nodes))


def _require_same_grid(f: GridFunction, g: GridFunction):
    if f.grid != g.grid:
        raise GridMismatchError(f'网格不一致: N={f.grid.N} 与 N={g.grid.N}')


def weighted_inner(f: GridFunction, g: GridFunction) -> float:
    """离散 L²_w 内积 Σ f_h g_h w_h"""
    _require_same_grid(f, g)
    return float(np.sum(f.values * g.values * f.grid.quad_weights))


def weighted_norm(f: GridFunction) -> float:
    """离散 L²_w 范数"""
    return float(np.sqrt(np.sum(f.values ** 2 * f.grid.quad_weights)))


def weighted_norm_values(grid: ChebGrid, values: np.ndarray) -> float:
    return float(np.sqrt(np.sum(np.square(values) * grid.quad_weights)))
