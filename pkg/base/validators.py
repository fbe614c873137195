"""
基础验证器
提供标准化的数值参数验证功能
"""

import math

from django.core.exceptions import ValidationError
from django.utils.deconstruct import deconstructible


@deconstructible
class FiniteNumberValidator:
    """有限实数验证器"""

    message = '请输入有限的实数'

    def __call__(self, value):
        """验证数值"""
        if isinstance(value, bool) or not isinstance(value, (int, float)):
            raise ValidationError(f'{value!r} 不是数值', code='malformed_number')
        if not math.isfinite(value):
            raise ValidationError(self.message, code='not_finite')


@deconstructible
class IntervalValidator:
    """区间范围验证器"""

    def __init__(self, lower=None, upper=None, lower_inclusive=True, upper_inclusive=True):
        self.lower = lower
        self.upper = upper
        self.lower_inclusive = lower_inclusive
        self.upper_inclusive = upper_inclusive

    def __call__(self, value):
        """验证数值是否落在区间内"""
        FiniteNumberValidator()(value)

        if self.lower is not None:
            too_small = value < self.lower if self.lower_inclusive else value <= self.lower
            if too_small:
                raise ValidationError(f'值{value}超出范围 {self.describe()}', code='out_of_range')

        if self.upper is not None:
            too_large = value > self.upper if self.upper_inclusive else value >= self.upper
            if too_large:
                raise ValidationError(f'值{value}超出范围 {self.describe()}', code='out_of_range')

    def describe(self):
        """区间的文字描述"""
        left = '[' if self.lower_inclusive else '('
        right = ']' if self.upper_inclusive else ')'
        lower = '-inf' if self.lower is None else self.lower
        upper = 'inf' if self.upper is None else self.upper
        return f'{left}{lower}, {upper}{right}'

    def __eq__(self, other):
        return (
            isinstance(other, IntervalValidator)
            and self.lower == other.lower
            and self.upper == other.upper
            and self.lower_inclusive == other.lower_inclusive
            and self.upper_inclusive == other.upper_inclusive
        )


@deconstructible
class IntegerRangeValidator:
    """整数范围验证器"""

    def __init__(self, min_value=None, max_value=None):
        self.min_value = min_value
        self.max_value = max_value

    def __call__(self, value):
        """验证整数"""
        if isinstance(value, bool) or not isinstance(value, int):
            raise ValidationError(f'{value!r} 不是整数', code='malformed_number')

        if self.min_value is not None and value < self.min_value:
            raise ValidationError(f'值不能小于{self.min_value}', code='out_of_range')

        if self.max_value is not None and value > self.max_value:
            raise ValidationError(f'值不能大于{self.max_value}', code='out_of_range')


@deconstructible
class RefinementValidator:
    """加密序列验证器：层级数量和单调性"""

    def __init__(self, min_levels=3, increasing=True):
        self.min_levels = min_levels
        self.increasing = increasing

    def __call__(self, values):
        if len(values) < self.min_levels:
            raise ValidationError(f'至少需要{self.min_levels}个层级', code='too_few_levels')
        pairs = zip(values, values[1:])
        if self.increasing:
            ok = all(b > a for a, b in pairs)
        else:
            ok = all(b < a for a, b in pairs)
        if not ok:
            direction = '严格递增' if self.increasing else '严格递减'
            raise ValidationError(f'层级必须{direction}', code='not_refining')


# 常用验证器实例
finite_number_validator = FiniteNumberValidator()
positive_validator = IntervalValidator(lower=0, lower_inclusive=False)
non_negative_validator = IntervalValidator(lower=0)
unit_interval_validator = IntervalValidator(lower=0, upper=1)
horizon_validator = IntervalValidator(lower=0, upper=1, lower_inclusive=False, upper_inclusive=False)
degree_validator = IntegerRangeValidator(min_value=2)


def validate_parameter(name, value, *validators):
    """
    依次运行验证器，并把Django的ValidationError转换为ParameterError
    供不依赖表单/配置层的数值模块使用
    """
    from utils.exceptions import ParameterError

    for validator in validators:
        try:
            validator(value)
        except ValidationError as e:
            raise ParameterError(f'参数 {name} 无效: {"; ".join(e.messages)}', parameter=name) from e
    return value
