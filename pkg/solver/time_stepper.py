"""
全离散格式
显式Euler时间推进 + 时变Dirichlet边界，附带极大值原理与稳定性监控
"""

import math
import time
from dataclasses import dataclass, field
from typing import Callable, List, Optional, Sequence, Tuple

import numpy as np

from base.utils import get_solver_setting
from base.validators import (
    finite_number_validator,
    horizon_validator,
    non_negative_validator,
    positive_validator,
    validate_parameter,
)
from utils.exceptions import InstabilityError, ParameterError, SolverException
from utils.logging import log_solver_call, solver_logger

from .peridynamic_operator import InfluenceKernel, operator_values
from .soil_physics import SoilModel, hydraulic_potential
from .spectral_core import ChebGrid, GridFunction, make_grid, project, weighted_norm_values

# ic(±1) 与 t=0 边界值的相容性容差
COMPATIBILITY_TOLERANCE = 1e-12


@dataclass(frozen=True)
class LinearRamp:
    """线性边界数据：在 [0, duration] 上从 start 变到 end，之后保持 end"""
    start: float
    end: float
    duration: float

    def __call__(self, t: float) -> float:
        if self.duration <= 0.0:
            return float(self.start)
        s = min(max(t / self.duration, 0.0), 1.0)
        # s = 1 时精确等于 end
        return float((1.0 - s) * self.start + s * self.end)

    @property
    def maximum(self) -> float:
        return float(max(self.start, self.end))


@dataclass(frozen=True)
class Scenario:
    """
    计算场景
    Z 柱长 (cm)，T 终止时间 (s)，dt 时间步长 (s)，sink 源项（乘以 sink_scale 后使用）
    ic 为映射坐标 x ∈ [-1, 1] 上的初始含水量剖面，x = 1 对应顶部 z = 0
    """
    Z: float
    T: float
    N: int
    dt: float
    delta: float
    soil: SoilModel
    sink: float
    ic: Callable
    bc_top: LinearRamp
    bc_bottom: LinearRamp
    sink_scale: float = 1.0
    jacobian_scaling: Optional[bool] = None
    name: str = ''

    def __post_init__(self):
        validate_parameter('Z', self.Z, positive_validator)
        validate_parameter('T', self.T, non_negative_validator)
        validate_parameter('dt', self.dt, positive_validator)
        validate_parameter('delta', self.delta, horizon_validator)
        validate_parameter('sink', self.sink, finite_number_validator)
        validate_parameter('sink_scale', self.sink_scale, finite_number_validator)
        make_grid(self.N)

        if self.jacobian_scaling is None:
            object.__setattr__(self, 'jacobian_scaling', bool(get_solver_setting('JACOBIAN_SCALING')))

        ends = np.asarray(self.ic(np.array([1.0, -1.0])), dtype=float)
        for label, value, ramp in (('bc_top', ends[0], self.bc_top), ('bc_bottom', ends[1], self.bc_bottom)):
            if abs(value - ramp(0.0)) > COMPATIBILITY_TOLERANCE:
                raise ParameterError(
                    f'初始条件在边界处为 {value!r}，与 {label} 的初始值 {ramp(0.0)!r} 不相容',
                    parameter=label,
                )

    @property
    def grid(self) -> ChebGrid:
        return make_grid(self.N)

    @property
    def kernel(self) -> InfluenceKernel:
        return InfluenceKernel(self.delta)

    @property
    def n_steps(self) -> int:
        return max(0, math.ceil(self.T / self.dt - 1e-9))

    @property
    def effective_sink(self) -> float:
        return self.sink * self.sink_scale

    @property
    def z_physical(self) -> np.ndarray:
        """各节点对应的物理高程 (cm)"""
        return inverse_coordinate_map(self, self.grid.nodes)


@dataclass(frozen=True, eq=False)
class SolverState:
    t: float
    theta: GridFunction
    step_index: int


@dataclass
class Snapshot:
    """输出时刻的剖面；requested_t 为请求时刻，t 为实际所在的时间步时刻"""
    requested_t: float
    t: float
    step_index: int
    values: np.ndarray


@dataclass
class RunDiagnostics:
    step_count: int = 0
    wall_time: float = 0.0
    complete: bool = False
    error: str = ''
    # θ 超过极大值原理上界的时间步
    violations: List[int] = field(default_factory=list)


@dataclass
class RunRecord:
    scenario: Scenario
    snapshots: List[Snapshot] = field(default_factory=list)
    stability_series: List[float] = field(default_factory=list)
    max_principle_series: List[Tuple[float, float]] = field(default_factory=list)
    diagnostics: RunDiagnostics = field(default_factory=RunDiagnostics)

    @property
    def z_cm(self) -> np.ndarray:
        return self.scenario.z_physical

    def snapshot_at(self, requested_t: float) -> Snapshot:
        for snapshot in self.snapshots:
            if snapshot.requested_t == requested_t:
                return snapshot
        raise KeyError(requested_t)

    @property
    def final(self) -> Snapshot:
        return self.snapshots[-1]


@dataclass(frozen=True)
class MonitorSummary:
    stability_sup: float
    # [T/2, T] 上稳定性泛函的最大值与 T/2 处值之比
    growth_ratio: float
    violation_count: int
    complete: bool


def coordinate_map(scenario: Scenario, z_physical):
    """物理坐标 z ∈ [0, Z] → 映射坐标 x = (Z − 2z)/Z"""
    z = np.asarray(z_physical, dtype=float)
    if np.any(~np.isfinite(z)) or np.any(z < 0.0) or np.any(z > scenario.Z):
        raise ParameterError(f'物理坐标必须位于 [0, {scenario.Z}] 内', parameter='z')
    return (scenario.Z - 2.0 * z) / scenario.Z


def inverse_coordinate_map(scenario: Scenario, x):
    """映射坐标 x → 物理坐标 z = Z(1 − x)/2"""
    return scenario.Z * (1.0 - np.asarray(x, dtype=float)) / 2.0


def _apply_boundary(scenario: Scenario, values: np.ndarray, t: float) -> np.ndarray:
    # 节点 0 为 x = 1（顶部），节点 N 为 x = -1（底部）
    values[0] = scenario.bc_top(t)
    values[-1] = scenario.bc_bottom(t)
    return values


def initial_state(scenario: Scenario) -> SolverState:
    """θ⁰ = P_N θ_0，端点取 t = 0 的边界值"""
    grid = scenario.grid
    theta0 = project(GridFunction.from_function(grid, scenario.ic), grid.N)
    values = _apply_boundary(scenario, np.array(theta0.values), 0.0)
    return SolverState(t=0.0, theta=GridFunction(grid, values), step_index=0)


def _operator_array(scenario: Scenario, theta: np.ndarray) -> np.ndarray:
    h_m = scenario.soil.matric_head(theta)
    K = np.asarray(scenario.soil.hydraulic_conductivity(h_m), dtype=float)
    H = hydraulic_potential(h_m, scenario.z_physical)
    values = operator_values(scenario.grid, K, H, scenario.kernel)
    if scenario.jacobian_scaling:
        values = values * (scenario.Z / 2.0)
    return values


def evaluate_operator(scenario: Scenario, theta: GridFunction) -> GridFunction:
    """节点上的 L(θ)（不含源项）"""
    return GridFunction(theta.grid, _operator_array(scenario, theta.values))


def _euler_update(scenario: Scenario, theta: np.ndarray, L: np.ndarray, step_index: int) -> np.ndarray:
    # 全阶截断 P_N 为恒等映射
    updated = theta + scenario.dt * (L + scenario.effective_sink)
    if not np.all(np.isfinite(updated)):
        raise InstabilityError(f'第{step_index}步出现非有限值', step_index=step_index)
    return _apply_boundary(scenario, updated, step_index * scenario.dt)


def step(state: SolverState, scenario: Scenario) -> SolverState:
    """
    推进一个时间步
    θ_n = θ_{n−1} + Δt·P_N[L(θ_{n−1}) + S]，随后覆盖端点为边界值

    Raises:
        InstabilityError: 出现非有限值
        DomainError: 含水量超出可反演范围
    """
    if state.t + scenario.dt > scenario.T + scenario.dt / 2.0:
        raise ParameterError(f't={state.t} 已到达终止时间 T={scenario.T}', parameter='t')
    step_index = state.step_index + 1
    L = _operator_array(scenario, state.theta.values)
    values = _euler_update(scenario, np.array(state.theta.values), L, step_index)
    return SolverState(t=step_index * scenario.dt, theta=GridFunction(state.theta.grid, values),
                       step_index=step_index)


def _source_norm(scenario: Scenario) -> float:
    grid = scenario.grid
    return weighted_norm_values(grid, np.full(grid.size, scenario.effective_sink))


def _data_supremum(scenario: Scenario) -> float:
    theta0 = initial_state(scenario).theta.values
    return max(float(np.max(theta0)), scenario.bc_top.maximum, scenario.bc_bottom.maximum)


def max_principle_bound(scenario: Scenario, t: float) -> float:
    """e^{t/2}·‖S‖_{L²_w} + max{sup θ⁰, sup θ_top, sup θ_bottom}"""
    return math.exp(t / 2.0) * _source_norm(scenario) + _data_supremum(scenario)


def snapshot_index(scenario: Scenario, t: float) -> int:
    """最近的时间步，距离相等时取较早的一步"""
    index = math.ceil(t / scenario.dt - 0.5)
    return min(max(index, 0), scenario.n_steps)


def _snapshot_plan(scenario: Scenario, snapshot_times: Optional[Sequence[float]]):
    if snapshot_times is None:
        snapshot_times = sorted({0.0, float(scenario.T)})
    plan = {}
    for requested in snapshot_times:
        requested = float(requested)
        if not math.isfinite(requested) or requested < 0.0 or requested > scenario.T + 1e-9:
            raise ParameterError(f'输出时刻 {requested} 不在 [0, {scenario.T}] 内', parameter='times')
        plan.setdefault(snapshot_index(scenario, requested), []).append(requested)
    return plan


def _capture(record: RunRecord, plan, step_index: int, values: np.ndarray):
    for requested in plan.get(step_index, ()):
        record.snapshots.append(Snapshot(
            requested_t=requested,
            t=step_index * record.scenario.dt,
            step_index=step_index,
            values=values.copy(),
        ))


@log_solver_call
def run(scenario: Scenario, snapshot_times: Optional[Sequence[float]] = None) -> RunRecord:
    """
    从 θ⁰ 推进到 T，记录输出时刻剖面和监控序列

    Args:
        scenario: 计算场景
        snapshot_times: 输出时刻（秒），默认 [0, T]

    Raises:
        InstabilityError / DomainError: 运行中断，异常的 record 属性带有不完整的运行记录
    """
    plan = _snapshot_plan(scenario, snapshot_times)
    n_steps = scenario.n_steps
    record = RunRecord(scenario=scenario)
    diagnostics = record.diagnostics
    progress_every = max(1, int(get_solver_setting('PROGRESS_EVERY')))
    solver_logger.log_run_start(scenario, n_steps)
    started = time.perf_counter()

    grid = scenario.grid
    source_norm = _source_norm(scenario)
    data_sup = _data_supremum(scenario)

    theta = np.array(initial_state(scenario).theta.values)
    _capture(record, plan, 0, theta)

    increment_sum = 0.0
    operator_sum = 0.0
    step_index = 0
    try:
        L = _operator_array(scenario, theta)
        for step_index in range(1, n_steps + 1):
            t = step_index * scenario.dt
            updated = _euler_update(scenario, theta, L, step_index)
            L = _operator_array(scenario, updated)
            if not np.all(np.isfinite(L)):
                raise InstabilityError(f'第{step_index}步算子出现非有限值', step_index=step_index)

            increment_sum += weighted_norm_values(grid, updated - theta) ** 2
            operator_sum += weighted_norm_values(grid, L) ** 2
            theta = updated
            record.stability_series.append(
                increment_sum + weighted_norm_values(grid, theta) ** 2 + scenario.dt * operator_sum
            )

            theta_max = float(np.max(theta))
            bound = math.exp(t / 2.0) * source_norm + data_sup
            record.max_principle_series.append((theta_max, bound))
            if theta_max > bound:
                diagnostics.violations.append(step_index)
                solver_logger.log_monitor_violation(step_index, t, theta_max, bound)

            _capture(record, plan, step_index, theta)
            diagnostics.step_count = step_index
            if step_index % progress_every == 0:
                solver_logger.log_progress(step_index, t, theta_max, float(np.min(theta)))
    except SolverException as exc:
        diagnostics.complete = False
        diagnostics.error = str(exc)
        diagnostics.wall_time = time.perf_counter() - started
        exc.record = record
        exc.context.setdefault('step_index', step_index)
        solver_logger.log_run_end(record)
        raise

    diagnostics.complete = True
    diagnostics.wall_time = time.perf_counter() - started
    record.snapshots.sort(key=lambda snapshot: (snapshot.step_index, snapshot.requested_t))
    solver_logger.log_run_end(record)
    return record


def stability_functional(record: RunRecord, m: int) -> float:
    """稳定性泛函前 m 步的部分和"""
    if not 1 <= m <= len(record.stability_series):
        raise ParameterError(f'm 必须位于 [1, {len(record.stability_series)}] 内', parameter='m')
    return record.stability_series[m - 1]


def monitor_summary(record: RunRecord) -> MonitorSummary:
    """稳定性泛函上确界、后半段增长比以及越界次数"""
    series = record.stability_series
    if not series:
        return MonitorSummary(math.nan, math.nan, len(record.diagnostics.violations), record.diagnostics.complete)
    midpoint = max(1, math.ceil(len(series) / 2))
    reference = series[midpoint - 1]
    tail = max(series[midpoint - 1:])
    growth = tail / reference if reference > 0.0 else math.nan
    return MonitorSummary(
        stability_sup=float(max(series)),
        growth_ratio=float(growth),
        violation_count=len(record.diagnostics.violations),
        complete=record.diagnostics.complete,
    )
