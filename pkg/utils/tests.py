"""
基础工具测试用例
覆盖异常映射、命令装饰器、日志记录器与数值验证器
"""

import json
import math

from django.core.exceptions import ValidationError
from django.core.management.base import CommandError
from django.test import SimpleTestCase

from base.utils import NumberUtils, get_solver_setting
from base.validators import (
    FiniteNumberValidator,
    IntegerRangeValidator,
    IntervalValidator,
    RefinementValidator,
    horizon_validator,
    validate_parameter,
)

from .decorators import handle_exceptions
from .exceptions import (
    ConfigError,
    DomainError,
    ExitCode,
    InstabilityError,
    InvalidLevelsError,
    OutputError,
    ParameterError,
    SolverException,
    StudyError,
    custom_exception_handler,
)
from .logging import SolverLogger, log_solver_call


class ExitCodeTestCase(SimpleTestCase):
    """退出码定义测试"""

    def test_exit_codes(self):
        self.assertEqual(ExitCode.SUCCESS, 0)
        self.assertEqual(ExitCode.CONFIG_ERROR, 2)
        self.assertEqual(ExitCode.INSTABILITY, 3)
        self.assertEqual(ExitCode.IO_ERROR, 4)


class SolverExceptionTestCase(SimpleTestCase):
    """自定义异常测试"""

    def test_default_detail(self):
        exc = InstabilityError()
        self.assertEqual(str(exc), '数值计算不稳定')
        self.assertEqual(exc.code, 'instability')
        self.assertIsNone(exc.record)

    def test_record_is_not_context(self):
        exc = SolverException('失败', record='partial', level=3)
        self.assertEqual(exc.record, 'partial')
        self.assertEqual(exc.context, {'level': 3})

    def test_config_error_location(self):
        exc = ConfigError('超出范围', key='scenario.delta', line=4)
        self.assertEqual(str(exc), "键 'scenario.delta', 第4行: 超出范围")
        self.assertEqual(exc.reason, '超出范围')
        self.assertEqual(str(ConfigError('配置文件为空')), '配置文件为空')

    def test_parameter_error_is_value_error(self):
        exc = ParameterError('N 无效', parameter='N')
        self.assertIsInstance(exc, ValueError)
        self.assertEqual(exc.context['parameter'], 'N')


class CustomExceptionHandlerTestCase(SimpleTestCase):
    """异常处理器测试"""

    def test_solver_exceptions(self):
        self.assertEqual(custom_exception_handler(ConfigError('x'))[0], ExitCode.CONFIG_ERROR)
        self.assertEqual(custom_exception_handler(InstabilityError(step_index=5))[0], ExitCode.INSTABILITY)
        self.assertEqual(custom_exception_handler(OutputError())[0], ExitCode.IO_ERROR)

    def test_parameter_error_depends_on_phase(self):
        exc = ParameterError('dt 无效', parameter='dt')
        self.assertEqual(custom_exception_handler(exc, {'phase': 'config'})[0], ExitCode.CONFIG_ERROR)
        self.assertEqual(custom_exception_handler(exc)[0], ExitCode.FAILURE)

    def test_domain_error_during_run(self):
        exc = DomainError('θ 超出范围', index=3, value=0.5)
        self.assertEqual(custom_exception_handler(exc)[0], ExitCode.FAILURE)
        exc.record = object()
        self.assertEqual(custom_exception_handler(exc)[0], ExitCode.INSTABILITY)

    def test_invalid_levels_are_config_errors(self):
        self.assertEqual(custom_exception_handler(InvalidLevelsError('T=60 不是 dt=0.7 的整数倍'))[0],
                         ExitCode.CONFIG_ERROR)
        self.assertEqual(custom_exception_handler(StudyError())[0], ExitCode.FAILURE)

    def test_validation_error(self):
        code, message = custom_exception_handler(ValidationError('值过大'))
        self.assertEqual(code, ExitCode.CONFIG_ERROR)
        self.assertIn('值过大', message)

    def test_os_error(self):
        self.assertEqual(custom_exception_handler(PermissionError('denied'))[0], ExitCode.IO_ERROR)

    def test_unknown_error(self):
        self.assertEqual(custom_exception_handler(RuntimeError('boom'))[0], ExitCode.FAILURE)


class HandleExceptionsTestCase(SimpleTestCase):
    """命令异常装饰器测试"""

    def test_passes_result_through(self):
        @handle_exceptions
        def ok():
            return 42

        self.assertEqual(ok(), 42)

    def test_converts_to_command_error(self):
        @handle_exceptions
        def broken():
            raise OutputError('磁盘已满')

        with self.assertLogs('solver', level='ERROR'):
            with self.assertRaises(CommandError) as cm:
                broken()
        self.assertEqual(cm.exception.returncode, ExitCode.IO_ERROR)
        self.assertEqual(str(cm.exception), '磁盘已满')

    def test_config_phase(self):
        @handle_exceptions(phase='config')
        def load():
            raise ParameterError('N 无效', parameter='N')

        with self.assertLogs('solver', level='ERROR'):
            with self.assertRaises(CommandError) as cm:
                load()
        self.assertEqual(cm.exception.returncode, ExitCode.CONFIG_ERROR)

    def test_command_error_is_not_wrapped(self):
        @handle_exceptions
        def nested():
            raise CommandError('已处理', returncode=ExitCode.INSTABILITY)

        with self.assertRaises(CommandError) as cm:
            nested()
        self.assertEqual(cm.exception.returncode, ExitCode.INSTABILITY)


class SolverLoggerTestCase(SimpleTestCase):
    """日志记录器测试"""

    def test_error_payload_is_json(self):
        logger = SolverLogger()
        with self.assertLogs('solver', level='ERROR') as logs:
            logger.log_error(ValueError('坏值'), operation='run', level=0.06)
        payload = json.loads(logs.records[0].getMessage().split(': ', 1)[1])
        self.assertEqual(payload['error_type'], 'ValueError')
        self.assertEqual(payload['operation'], 'run')
        self.assertEqual(payload['level'], 0.06)

    def test_violation_is_warning(self):
        with self.assertLogs('solver', level='WARNING') as logs:
            SolverLogger().log_monitor_violation(7, 0.42, 0.3, 0.29)
        self.assertIn('max_principle_violation', logs.output[0])

    def test_decorator_logs_duration_and_errors(self):
        @log_solver_call
        def square(x):
            return x * x

        @log_solver_call(log_duration=False)
        def fail():
            raise ArithmeticError('溢出')

        with self.assertLogs('solver', level='INFO') as logs:
            self.assertEqual(square(3), 9)
        self.assertIn('"operation": "square"', logs.output[0])

        with self.assertLogs('solver', level='ERROR'):
            with self.assertRaises(ArithmeticError):
                fail()


class ValidatorTestCase(SimpleTestCase):
    """数值验证器测试"""

    def test_finite_number(self):
        validator = FiniteNumberValidator()
        validator(1.5)
        for value in (math.inf, math.nan, 'abc', True):
            with self.assertRaises(ValidationError):
                validator(value)

    def test_open_interval(self):
        horizon_validator(0.15)
        for value in (0.0, 1.0, -0.1):
            with self.assertRaises(ValidationError):
                horizon_validator(value)
        self.assertEqual(horizon_validator.describe(), '(0, 1)')

    def test_closed_interval(self):
        validator = IntervalValidator(lower=0, upper=1)
        validator(0)
        validator(1)
        self.assertEqual(validator, IntervalValidator(lower=0, upper=1))

    def test_integer_range(self):
        validator = IntegerRangeValidator(min_value=2, max_value=512)
        validator(2)
        for value in (1, 513, 2.0, False):
            with self.assertRaises(ValidationError):
                validator(value)

    def test_refinement(self):
        RefinementValidator(increasing=True)([16, 32, 64])
        RefinementValidator(increasing=False)([0.24, 0.12, 0.06])
        with self.assertRaises(ValidationError):
            RefinementValidator(increasing=True)([16, 16, 32])
        with self.assertRaises(ValidationError):
            RefinementValidator(min_levels=3)([16, 32])

    def test_validate_parameter(self):
        self.assertEqual(validate_parameter('delta', 0.3, horizon_validator), 0.3)
        with self.assertRaises(ParameterError) as cm:
            validate_parameter('delta', 1.2, horizon_validator)
        self.assertEqual(cm.exception.parameter, 'delta')


class NumberUtilsTestCase(SimpleTestCase):
    """数值格式化工具测试"""

    def test_format_float_is_round_trippable(self):
        for value in (0.1, 1e-17, 0.2234, -700.0):
            self.assertEqual(float(NumberUtils.format_float(value)), value)

    def test_format_seconds(self):
        self.assertEqual(NumberUtils.format_seconds(15.0), '15')
        self.assertEqual(NumberUtils.format_seconds(0.5), '0.5')

    def test_parse_float_list(self):
        self.assertEqual(NumberUtils.parse_float_list('0, 15,30 ,'), [0.0, 15.0, 30.0])
        with self.assertRaises(ValueError):
            NumberUtils.parse_float_list('0,abc')
        with self.assertRaises(ValueError):
            NumberUtils.parse_float_list('0,inf')

    def test_safe_log_ratio(self):
        self.assertAlmostEqual(NumberUtils.safe_log_ratio(4e-3, 1e-3), math.log(4.0), places=14)
        self.assertTrue(math.isnan(NumberUtils.safe_log_ratio(0.0, 1e-3)))
        self.assertTrue(math.isnan(NumberUtils.safe_log_ratio(1e-3, -1.0)))

    def test_solver_setting_defaults(self):
        self.assertEqual(get_solver_setting('KERNEL_TRANSFORM'), 'moments')
        with self.assertRaises(KeyError):
            get_solver_setting('UNKNOWN')
