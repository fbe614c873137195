"""
算例预设
两个算例的土壤参数、初始剖面与边界线性变化
"""

from dataclasses import replace

from solver.soil_physics import soil_preset
from solver.time_stepper import LinearRamp, Scenario
from utils.exceptions import ParameterError

from .initial_conditions import CosineProfile, KinkedLinearProfile

COLUMN_LENGTH = 30.0
FINAL_TIME = 60.0
DEGREE = 100
TIME_STEP = 0.06
HORIZON = 0.15

# 源项按原值给出，再整体缩放到与边界变化同一量级
SINK_SCALE = 1e-6


def example1() -> Scenario:
    """砂土，折线初始剖面"""
    return Scenario(
        Z=COLUMN_LENGTH,
        T=FINAL_TIME,
        N=DEGREE,
        dt=TIME_STEP,
        delta=HORIZON,
        soil=soil_preset('example1_sand'),
        sink=-700.0,
        sink_scale=SINK_SCALE,
        ic=KinkedLinearProfile(lower_anchor=0.1386, lower_slope=0.0594, upper_anchor=0.2234, upper_slope=0.0254),
        bc_top=LinearRamp(0.2234, 0.1810, FINAL_TIME),
        bc_bottom=LinearRamp(0.1386, 0.1174, FINAL_TIME),
        name='example1',
    )


def example2() -> Scenario:
    """Berino壤质细砂，余弦初始剖面"""
    return Scenario(
        Z=COLUMN_LENGTH,
        T=FINAL_TIME,
        N=DEGREE,
        dt=TIME_STEP,
        delta=HORIZON,
        soil=soil_preset('example2_berino'),
        sink=-1000.0,
        sink_scale=SINK_SCALE,
        ic=CosineProfile(amplitude=-0.0674, offset=0.1972),
        bc_top=LinearRamp(0.2646, 0.1972, FINAL_TIME),
        bc_bottom=LinearRamp(0.1298, 0.0960, FINAL_TIME),
        name='example2',
    )


PRESETS = {
    'example1': example1,
    'example2': example2,
}


def get_preset(name: str, **overrides) -> Scenario:
    """
    按名称获取预设场景，可覆盖 N、dt、delta 等字段

    Raises:
        ParameterError: 未知的预设名称
    """
    try:
        scenario = PRESETS[name]()
    except KeyError:
        choices = ', '.join(sorted(PRESETS))
        raise ParameterError(f'未知的预设 {name!r}，可选: {choices}', parameter='preset') from None
    overrides = {key: value for key, value in overrides.items() if value is not None}
    return replace(scenario, **overrides) if overrides else scenario
