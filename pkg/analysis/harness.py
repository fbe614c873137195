"""
收敛性分析
时间/空间自收敛阶测量，以及谱方法算子与直接求积之间的差异研究
"""

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, replace
from typing import Callable, Dict, List, Sequence, Tuple

import numpy as np
from django.core.exceptions import ValidationError
from numpy.polynomial import chebyshev

from base.utils import NumberUtils, get_solver_setting
from base.validators import IntegerRangeValidator, RefinementValidator, positive_validator
from solver.peridynamic_operator import InfluenceKernel, OperatorInputs, apply_quadrature, apply_spectral
from solver.spectral_core import (
    GridFunction,
    forward_values,
    interpolate,
    make_grid,
    weighted_norm_values,
)
from solver.time_stepper import Scenario, run
from utils.exceptions import InvalidLevelsError, SolverException
from utils.logging import log_solver_call, solver_logger

# 最粗一对层级允许的非单调幅度
MONOTONE_ALLOWANCE = 0.05
# 低于该值的误差视为舍入噪声
ROUNDOFF_FLOOR = 1e-12


@dataclass(frozen=True)
class LevelError:
    level: float
    max_error: float
    l2_error: float


@dataclass
class ConvergenceStudy:
    """
    自收敛研究结果
    time 轴以 Richardson 外推 2u(dt_min) − u(2dt_min) 为参考解，
    space 轴以最大 N 的解为参考解
    """
    axis: str
    base_scenario: Scenario
    levels: Tuple[float, ...]
    reference: np.ndarray
    reference_level: float
    errors: List[LevelError] = field(default_factory=list)
    observed_orders: List[float] = field(default_factory=list)
    observed_orders_l2: List[float] = field(default_factory=list)

    @property
    def monotone(self) -> bool:
        return is_monotone([error.max_error for error in self.errors])


@dataclass(frozen=True)
class GapRow:
    pair: str
    N: int
    gap: float


@dataclass
class GapTable:
    delta: float
    rows: List[GapRow] = field(default_factory=list)

    @property
    def pairs(self) -> List[str]:
        seen = []
        for row in self.rows:
            if row.pair not in seen:
                seen.append(row.pair)
        return seen

    def gaps(self, pair: str) -> List[float]:
        return [row.gap for row in self.rows if row.pair == pair]

    def monotone(self, pair: str) -> bool:
        return is_monotone(self.gaps(pair))


def is_monotone(values: Sequence[float]) -> bool:
    """单调不增，最粗一对允许 5% 的增长，舍入噪声以下的值不计"""
    for position, (coarse, fine) in enumerate(zip(values, values[1:])):
        allowance = 1.0 + MONOTONE_ALLOWANCE if position == 0 else 1.0
        if fine > coarse * allowance + ROUNDOFF_FLOOR:
            return False
    return True


def observed_order(coarse_error: float, fine_error: float, coarse_level: float, fine_level: float) -> float:
    """log(e_c/e_f) / log(h_c/h_f)，任一误差为零时返回 nan"""
    return NumberUtils.safe_log_ratio(coarse_error, fine_error) / abs(math.log(coarse_level / fine_level))


def _map_levels(func: Callable, items: Sequence) -> list:
    # executor.map 按输入顺序返回结果
    workers = int(get_solver_setting('STUDY_WORKERS'))
    if workers > 1 and len(items) > 1:
        with ThreadPoolExecutor(max_workers=min(workers, len(items))) as executor:
            return list(executor.map(func, items))
    return [func(item) for item in items]


def _validate_levels(levels, increasing: bool, item_validator):
    try:
        for level in levels:
            item_validator(level)
        RefinementValidator(min_levels=3, increasing=increasing)(list(levels))
    except ValidationError as e:
        raise InvalidLevelsError(f'层级 {list(levels)} 无效: {"; ".join(e.messages)}', levels=list(levels)) from e


def check_time_levels(T: float, dts: Sequence[float]):
    """
    T 必须是每个 dt 的整数倍

    Raises:
        InvalidLevelsError: 某个 dt 不整除 T
    """
    for dt in dts:
        if abs(round(T / dt) * dt - T) > 1e-9 * max(T, 1.0):
            raise InvalidLevelsError(f'T={T} 不是 dt={dt} 的整数倍', level=dt)


def _final_profile(scenario: Scenario, level) -> np.ndarray:
    try:
        record = run(scenario, [scenario.T])
    except SolverException as exc:
        exc.context['level'] = level
        solver_logger.log_error(exc, operation='convergence_level', level=level)
        raise
    return record.final.values


@log_solver_call
def temporal_order(base: Scenario, dts: Sequence[float]) -> ConvergenceStudy:
    """
    时间收敛阶（N 固定）

    Raises:
        InvalidLevelsError: 层级少于3个、不严格递减或 T 不是 dt 的整数倍
    """
    dts = tuple(float(dt) for dt in dts)
    _validate_levels(dts, increasing=False, item_validator=positive_validator)
    check_time_levels(base.T, dts)

    finest = dts[-1]
    doubled = 2.0 * finest
    run_levels = list(dts)
    if not any(math.isclose(dt, doubled, rel_tol=1e-12) for dt in dts):
        run_levels.append(doubled)

    profiles = _map_levels(lambda dt: _final_profile(replace(base, dt=dt), dt), run_levels)
    by_level = dict(zip(run_levels, profiles))
    coarse_ref = next(profile for dt, profile in by_level.items() if math.isclose(dt, doubled, rel_tol=1e-12))
    reference = 2.0 * by_level[finest] - coarse_ref

    grid = base.grid
    errors = []
    for dt in dts:
        difference = by_level[dt] - reference
        errors.append(LevelError(dt, float(np.max(np.abs(difference))), weighted_norm_values(grid, difference)))

    study = ConvergenceStudy(axis='time', base_scenario=base, levels=dts, reference=reference,
                             reference_level=finest, errors=errors)
    _fill_orders(study)
    return study


@log_solver_call
def spatial_order(base: Scenario, Ns: Sequence[int]) -> ConvergenceStudy:
    """
    空间收敛阶（dt 固定），最大 N 为参考解
    最大范数取粗网格节点（嵌套CGL网格的公共节点），L²_w 范数在参考网格上计算

    Raises:
        InvalidLevelsError: 层级少于3个或不严格递增
    """
    Ns = tuple(Ns)
    _validate_levels(Ns, increasing=True, item_validator=IntegerRangeValidator(min_value=2))

    profiles = _map_levels(lambda N: _final_profile(replace(base, N=N), N), list(Ns))
    reference_N = Ns[-1]
    reference_grid = make_grid(reference_N)
    reference = profiles[-1]
    reference_coeffs = forward_values(reference_grid, reference)

    errors = []
    for N, profile in zip(Ns[:-1], profiles[:-1]):
        grid = make_grid(N)
        at_coarse = chebyshev.chebval(grid.nodes, reference_coeffs)
        max_error = float(np.max(np.abs(profile - at_coarse)))
        on_reference = interpolate(GridFunction(grid, profile), reference_grid).values
        l2_error = weighted_norm_values(reference_grid, on_reference - reference)
        errors.append(LevelError(N, max_error, l2_error))

    study = ConvergenceStudy(axis='space', base_scenario=base, levels=Ns, reference=reference,
                             reference_level=reference_N, errors=errors)
    _fill_orders(study)
    return study


def _fill_orders(study: ConvergenceStudy):
    for coarse, fine in zip(study.errors, study.errors[1:]):
        study.observed_orders.append(observed_order(coarse.max_error, fine.max_error, coarse.level, fine.level))
        study.observed_orders_l2.append(observed_order(coarse.l2_error, fine.l2_error, coarse.level, fine.level))


def constant_pair(x):
    return np.full_like(x, 1.5), np.full_like(x, 2.0)


def smooth_pair(x):
    return 2.0 + np.sin(np.pi * x), x ** 2


# 名称 → 返回 (K, H) 节点值的函数
DEFAULT_TEST_PAIRS: Dict[str, Callable] = {
    'constant': constant_pair,
    'smooth': smooth_pair,
}


@log_solver_call
def operator_gap_study(delta: float, test_pairs: Dict[str, Callable] = None, Ns: Sequence[int] = ()) -> GapTable:
    """
    谱方法算子与直接求积之间的最大范数差异

    Args:
        delta: horizon
        test_pairs: 名称 → f(x) 返回 (K, H)
        Ns: 网格阶数列表

    Raises:
        InvalidLevelsError: Ns 为空
    """
    if not Ns:
        raise InvalidLevelsError('算子差异研究至少需要一个网格阶数')
    test_pairs = test_pairs or DEFAULT_TEST_PAIRS
    kernel = InfluenceKernel(delta)

    def gap(item):
        name, N = item
        grid = make_grid(N)
        K, H = test_pairs[name](grid.nodes)
        inputs = OperatorInputs.from_fields(GridFunction(grid, K), GridFunction(grid, H), kernel)
        zero = GridFunction.constant(grid, 0.0)
        spectral = apply_spectral(inputs, zero).values
        quadrature = apply_quadrature(inputs, zero).values
        return GapRow(name, N, float(np.max(np.abs(spectral - quadrature))))

    items = [(name, N) for name in test_pairs for N in Ns]
    return GapTable(delta=kernel.delta, rows=_map_levels(gap, items))
