"""
场景配置文件
YAML格式，包含 scenario / output / study 三个部分：
结构由 JSON Schema 校验，数值范围由 base.validators 校验，错误信息带键名和行号
"""

import copy
import re
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Any, Dict, Optional, Tuple

import yaml
from django.core.exceptions import ValidationError
from jsonschema import Draft7Validator

from base.validators import (
    IntegerRangeValidator,
    RefinementValidator,
    degree_validator,
    finite_number_validator,
    horizon_validator,
    non_negative_validator,
    positive_validator,
)
from solver.soil_physics import SOIL_PRESETS, VanGenuchtenMualem, VanGenuchtenParams
from solver.time_stepper import LinearRamp, Scenario
from utils.exceptions import ConfigError, ParameterError

from .initial_conditions import profile_from_config
from .presets import PRESETS, get_preset


class ConfigLoader(yaml.SafeLoader):
    """额外把 1e-6 这类不带小数点的科学计数法识别为浮点数"""


ConfigLoader.add_implicit_resolver(
    'tag:yaml.org,2002:float',
    re.compile(r'^[-+]?[0-9][0-9_]*(?:\.[0-9_]*)?[eE][-+]?[0-9]+$'),
    list('-+0123456789'),
)


NUMBER = {'type': 'number'}
NUMBER_LIST = {'type': 'array', 'items': NUMBER}

RAMP_SCHEMA = {
    'type': 'object',
    'properties': {'start': NUMBER, 'end': NUMBER, 'duration': NUMBER},
    'required': ['start', 'end'],
    'additionalProperties': False,
}

SOIL_SCHEMA = {
    'oneOf': [
        {'type': 'string'},
        {
            'type': 'object',
            'properties': {name: NUMBER for name in ('theta_r', 'theta_s', 'alpha', 'n', 'K_s')},
            'required': ['theta_r', 'theta_s', 'alpha', 'n', 'K_s'],
            'additionalProperties': False,
        },
    ],
}

IC_SCHEMA = {
    'type': 'object',
    'properties': {
        'type': {'enum': ['kinked_linear', 'cosine', 'chebyshev', 'tabulated']},
        'lower_anchor': NUMBER,
        'lower_slope': NUMBER,
        'upper_anchor': NUMBER,
        'upper_slope': NUMBER,
        'amplitude': NUMBER,
        'offset': NUMBER,
        'coefficients': NUMBER_LIST,
        'x': NUMBER_LIST,
        'values': NUMBER_LIST,
    },
    'required': ['type'],
    'additionalProperties': False,
}

CONFIG_SCHEMA = {
    'type': 'object',
    'properties': {
        'scenario': {
            'type': 'object',
            'properties': {
                'preset': {'type': 'string'},
                'name': {'type': 'string'},
                'Z': NUMBER,
                'T': NUMBER,
                'N': {'type': 'integer'},
                'dt': NUMBER,
                'delta': NUMBER,
                'sink': NUMBER,
                'sink_scale': NUMBER,
                'jacobian_scaling': {'type': 'boolean'},
                'soil': SOIL_SCHEMA,
                'ic': IC_SCHEMA,
                'bc_top': RAMP_SCHEMA,
                'bc_bottom': RAMP_SCHEMA,
            },
            'additionalProperties': False,
        },
        'output': {
            'type': 'object',
            'properties': {
                'times': NUMBER_LIST,
                'csv': {'type': 'string'},
                'svg': {'type': 'string'},
                'report': {'type': 'string'},
            },
            'additionalProperties': False,
        },
        'study': {
            'type': 'object',
            'properties': {
                'axis': {'enum': ['time', 'space']},
                'levels': NUMBER_LIST,
            },
            'required': ['axis', 'levels'],
            'additionalProperties': False,
        },
    },
    'required': ['scenario'],
    'additionalProperties': False,
}

# 不使用预设时必须给出的场景字段
REQUIRED_SCENARIO_KEYS = ('Z', 'T', 'N', 'dt', 'delta', 'sink', 'soil', 'ic', 'bc_top', 'bc_bottom')

# 数值范围验证
RANGE_VALIDATORS = {
    'Z': positive_validator,
    'T': non_negative_validator,
    'N': degree_validator,
    'dt': positive_validator,
    'delta': horizon_validator,
    'sink': finite_number_validator,
    'sink_scale': finite_number_validator,
}


@dataclass(frozen=True)
class OutputSpec:
    times: Optional[Tuple[float, ...]] = None
    csv: Optional[str] = None
    svg: Optional[str] = None
    report: Optional[str] = None


@dataclass(frozen=True)
class StudySpec:
    axis: str
    levels: Tuple[float, ...]


@dataclass(frozen=True)
class ConfigFile:
    scenario: Scenario
    output: OutputSpec = field(default_factory=OutputSpec)
    study: Optional[StudySpec] = None

    @property
    def snapshot_times(self):
        if self.output.times is not None:
            return list(self.output.times)
        return sorted({0.0, float(self.scenario.T)})


def _line_index(node, path=(), index=None) -> Dict[tuple, int]:
    """键路径 → 行号（从1开始）"""
    if index is None:
        index = {}
    if isinstance(node, yaml.MappingNode):
        for key_node, value_node in node.value:
            child = path + (key_node.value,)
            index[child] = key_node.start_mark.line + 1
            _line_index(value_node, child, index)
    elif isinstance(node, yaml.SequenceNode):
        for position, item in enumerate(node.value):
            child = path + (position,)
            index[child] = item.start_mark.line + 1
            _line_index(item, child, index)
    return index


class _Context:
    """解析过程中的键路径与行号查找"""

    def __init__(self, lines: Dict[tuple, int]):
        self.lines = lines

    def line(self, path) -> Optional[int]:
        path = tuple(path)
        while path:
            if path in self.lines:
                return self.lines[path]
            path = path[:-1]
        return None

    def error(self, path, reason: str) -> ConfigError:
        key = '.'.join(str(part) for part in path) or None
        return ConfigError(reason, key=key, line=self.line(path))


def _schema_error(context: _Context, data) -> Optional[ConfigError]:
    errors = sorted(Draft7Validator(CONFIG_SCHEMA).iter_errors(data), key=lambda e: list(map(str, e.absolute_path)))
    if not errors:
        return None
    error = errors[0]
    path = list(error.absolute_path)
    if error.validator == 'additionalProperties' and isinstance(error.instance, dict):
        allowed = error.schema.get('properties', {})
        unknown = sorted(key for key in error.instance if key not in allowed)
        if unknown:
            return context.error(path + [unknown[0]], f'未知的键 {unknown[0]!r}')
    if error.validator == 'required':
        return context.error(path, f'缺少必需的键: {error.message}')
    return context.error(path, error.message)


def _check_range(context: _Context, path, value, *validators):
    for validator in validators:
        try:
            validator(value)
        except ValidationError as e:
            raise context.error(path, '; '.join(e.messages)) from e


def _build_soil(context: _Context, value):
    path = ('scenario', 'soil')
    if isinstance(value, str):
        if value not in SOIL_PRESETS:
            choices = ', '.join(sorted(SOIL_PRESETS))
            raise context.error(path, f'未知的土壤预设 {value!r}，可选: {choices}')
        return VanGenuchtenMualem(SOIL_PRESETS[value], name=value)
    try:
        return VanGenuchtenMualem(VanGenuchtenParams(**value))
    except ParameterError as e:
        raise context.error(path + (e.parameter,), str(e)) from e


def _build_ramp(context: _Context, name: str, value, T: float) -> LinearRamp:
    path = ('scenario', name)
    for key, number in value.items():
        _check_range(context, path + (key,), number, finite_number_validator)
    duration = value.get('duration', T)
    _check_range(context, path + ('duration',), duration, non_negative_validator)
    return LinearRamp(value['start'], value['end'], duration)


def _scenario_mapping(context: _Context, section: Dict[str, Any]) -> Dict[str, Any]:
    section = dict(section)
    preset_name = section.pop('preset', None)
    if preset_name is None:
        missing = [key for key in REQUIRED_SCENARIO_KEYS if key not in section]
        if missing:
            raise context.error(('scenario', missing[0]), f'缺少必需的键 {missing[0]!r}')
        return section
    if preset_name not in PRESETS:
        choices = ', '.join(sorted(PRESETS))
        raise context.error(('scenario', 'preset'), f'未知的预设 {preset_name!r}，可选: {choices}')
    merged = scenario_to_mapping(get_preset(preset_name))
    merged.update(section)
    return merged


def _build_scenario(context: _Context, section: Dict[str, Any], overrides: Dict[str, Any]) -> Scenario:
    mapping = _scenario_mapping(context, section)
    mapping.update({key: value for key, value in overrides.items() if value is not None})

    for key, validator in RANGE_VALIDATORS.items():
        if key in mapping:
            _check_range(context, ('scenario', key), mapping[key], validator)

    try:
        ic = profile_from_config(mapping['ic'])
    except ParameterError as e:
        raise context.error(('scenario', 'ic', e.parameter), str(e)) from e

    try:
        return Scenario(
            Z=mapping['Z'],
            T=mapping['T'],
            N=mapping['N'],
            dt=mapping['dt'],
            delta=mapping['delta'],
            soil=_build_soil(context, mapping['soil']),
            sink=mapping['sink'],
            sink_scale=mapping.get('sink_scale', 1.0),
            jacobian_scaling=mapping.get('jacobian_scaling'),
            ic=ic,
            bc_top=_build_ramp(context, 'bc_top', mapping['bc_top'], mapping['T']),
            bc_bottom=_build_ramp(context, 'bc_bottom', mapping['bc_bottom'], mapping['T']),
            name=mapping.get('name', ''),
        )
    except ParameterError as e:
        raise context.error(('scenario', e.parameter or ''), str(e)) from e


def _build_output(context: _Context, section: Dict[str, Any], T: float) -> OutputSpec:
    times = section.get('times')
    if times is not None:
        for position, value in enumerate(times):
            _check_range(context, ('output', 'times', position), value, non_negative_validator)
            if value > T:
                raise context.error(('output', 'times', position), f'输出时刻 {value} 超过终止时间 T={T}')
        times = tuple(float(value) for value in times)
    return OutputSpec(times=times, csv=section.get('csv'), svg=section.get('svg'), report=section.get('report'))


def _build_study(context: _Context, section: Optional[Dict[str, Any]]) -> Optional[StudySpec]:
    if section is None:
        return None
    axis = section['axis']
    levels = list(section['levels'])
    path = ('study', 'levels')
    if axis == 'space':
        for position, value in enumerate(levels):
            _check_range(context, path + (position,), value, IntegerRangeValidator(min_value=2))
        _check_range(context, path, levels, RefinementValidator(min_levels=3, increasing=True))
        return StudySpec(axis=axis, levels=tuple(int(value) for value in levels))
    for position, value in enumerate(levels):
        _check_range(context, path + (position,), value, positive_validator)
    _check_range(context, path, levels, RefinementValidator(min_levels=3, increasing=False))
    return StudySpec(axis=axis, levels=tuple(float(value) for value in levels))


def parse_config(text: str, overrides: Optional[Dict[str, Any]] = None) -> ConfigFile:
    """
    解析并校验配置文本

    Args:
        text: YAML文本
        overrides: 命令行覆盖的场景字段（N、dt、delta），优先于文件中的值

    Raises:
        ConfigError: 带键名、行号和原因的解析错误
    """
    try:
        root = yaml.compose(text, Loader=ConfigLoader)
        data = yaml.load(text, Loader=ConfigLoader)
    except yaml.YAMLError as e:
        mark = getattr(e, 'problem_mark', None)
        raise ConfigError(f'YAML语法错误: {getattr(e, "problem", e)}',
                          line=mark.line + 1 if mark else None) from e

    context = _Context(_line_index(root) if root is not None else {})
    if data is None:
        raise ConfigError('配置文件为空')

    error = _schema_error(context, data)
    if error is not None:
        raise error

    scenario = _build_scenario(context, data['scenario'], overrides or {})
    return ConfigFile(
        scenario=scenario,
        output=_build_output(context, data.get('output', {}), scenario.T),
        study=_build_study(context, data.get('study')),
    )


def load_config(path, overrides: Optional[Dict[str, Any]] = None) -> ConfigFile:
    """读取并解析配置文件"""
    try:
        text = Path(path).read_text(encoding='utf-8')
    except OSError as e:
        raise ConfigError(f'无法读取配置文件 {path}: {e.strerror or e}') from e
    return parse_config(text, overrides)


def scenario_to_mapping(scenario: Scenario) -> Dict[str, Any]:
    """场景 → 配置映射"""
    soil = scenario.soil
    if getattr(soil, 'name', '') in SOIL_PRESETS and SOIL_PRESETS[soil.name] == soil.params:
        soil_value = soil.name
    else:
        soil_value = soil.params.to_dict()

    mapping = {
        'Z': scenario.Z,
        'T': scenario.T,
        'N': scenario.N,
        'dt': scenario.dt,
        'delta': scenario.delta,
        'sink': scenario.sink,
        'sink_scale': scenario.sink_scale,
        'jacobian_scaling': scenario.jacobian_scaling,
        'soil': soil_value,
        'ic': scenario.ic.to_config(),
        'bc_top': _ramp_mapping(scenario.bc_top),
        'bc_bottom': _ramp_mapping(scenario.bc_bottom),
    }
    if scenario.name:
        mapping = {'name': scenario.name, **mapping}
    return copy.deepcopy(mapping)


def _ramp_mapping(ramp: LinearRamp) -> Dict[str, float]:
    return {'start': ramp.start, 'end': ramp.end, 'duration': ramp.duration}


def config_to_mapping(config: ConfigFile) -> Dict[str, Any]:
    data = {'scenario': scenario_to_mapping(config.scenario)}
    output = {
        key: value for key, value in (
            ('times', list(config.output.times) if config.output.times is not None else None),
            ('csv', config.output.csv),
            ('svg', config.output.svg),
            ('report', config.output.report),
        ) if value is not None
    }
    if output:
        data['output'] = output
    if config.study is not None:
        data['study'] = {'axis': config.study.axis, 'levels': list(config.study.levels)}
    return data


def dump_config(config: ConfigFile) -> str:
    """配置 → YAML文本，parse_config(dump_config(c)) == c"""
    return yaml.safe_dump(config_to_mapping(config), sort_keys=False, allow_unicode=True)


def config_from_preset(name: str, overrides: Optional[Dict[str, Any]] = None) -> ConfigFile:
    """由预设名称构造配置"""
    overrides = {key: value for key, value in (overrides or {}).items() if value is not None}
    try:
        scenario = get_preset(name)
    except ParameterError as e:
        raise ConfigError(str(e), key='preset') from e
    if overrides:
        try:
            scenario = replace(scenario, **overrides)
        except ParameterError as e:
            raise ConfigError(str(e), key=e.parameter) from e
    return ConfigFile(scenario=scenario)
