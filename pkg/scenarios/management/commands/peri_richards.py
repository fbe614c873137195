"""
peri-richards 命令行入口
子命令: run | converge | operator-check
退出码: 0 成功, 2 配置错误, 3 数值不稳定, 4 文件读写错误
"""

from dataclasses import replace
from pathlib import Path

from django.core.exceptions import ValidationError
from django.core.management.base import BaseCommand

from analysis.harness import check_time_levels, operator_gap_study, spatial_order, temporal_order
from base.utils import NumberUtils
from base.validators import IntegerRangeValidator, RefinementValidator, horizon_validator, positive_validator
from scenarios.config import config_from_preset, load_config
from scenarios.export import write_gap_csv, write_profiles_csv, write_profiles_svg, write_study_csv, write_text
from scenarios.presets import HORIZON, PRESETS
from scenarios.reports import render_gap_report, render_monitor_report, render_report
from solver.time_stepper import run
from utils.decorators import handle_exceptions
from utils.exceptions import ConfigError, SolverException

DEFAULT_LEVELS = {
    'time': (0.24, 0.12, 0.06, 0.03),
    'space': (16, 32, 64, 128),
}
DEFAULT_GAP_LEVELS = (32, 64, 128, 256)


class Command(BaseCommand):
    help = '近场动力学Richards方程谱方法求解器'

    def add_arguments(self, parser):
        subparsers = parser.add_subparsers(dest='subcommand', required=True)

        run_parser = subparsers.add_parser('run', help='运行一个场景并导出剖面')
        self._add_source_arguments(run_parser)
        run_parser.add_argument('--out', help='剖面CSV路径')
        run_parser.add_argument('--svg', help='剖面SVG路径')
        run_parser.add_argument('--times', help='输出时刻，逗号分隔（秒）')
        run_parser.add_argument('--report', help='运行监控摘要路径')

        converge_parser = subparsers.add_parser('converge', help='时间或空间收敛性研究')
        self._add_source_arguments(converge_parser)
        converge_parser.add_argument('--axis', choices=['time', 'space'], help='加密方向（默认 time）')
        converge_parser.add_argument('--levels', help='dt 或 N 的加密序列，逗号分隔')
        converge_parser.add_argument('--out', help='研究表CSV路径')
        converge_parser.add_argument('--report', help='文本报告路径（默认与CSV同名的 .txt）')

        check_parser = subparsers.add_parser('operator-check', help='谱方法算子与直接求积的差异')
        self._add_source_arguments(check_parser)
        check_parser.add_argument('--levels', help='网格阶数 N，逗号分隔')
        check_parser.add_argument('--out', help='差异表CSV路径')
        check_parser.add_argument('--report', help='文本报告路径')

    @staticmethod
    def _add_source_arguments(parser):
        source = parser.add_mutually_exclusive_group()
        source.add_argument('--preset', choices=sorted(PRESETS), help='预设算例')
        source.add_argument('--config', help='YAML配置文件路径')
        parser.add_argument('--N', type=int, help='覆盖谱方法阶数')
        parser.add_argument('--dt', type=float, help='覆盖时间步长（秒）')
        parser.add_argument('--delta', type=float, help='覆盖 horizon')

    def handle(self, *args, **options):
        handlers = {
            'run': self.handle_run,
            'converge': self.handle_converge,
            'operator-check': self.handle_operator_check,
        }
        handlers[options['subcommand']](options)

    @handle_exceptions(phase='config')
    def load(self, options, required=True):
        """读取配置或预设，应用命令行覆盖"""
        overrides = {'N': options.get('N'), 'dt': options.get('dt'), 'delta': options.get('delta')}
        if options.get('config'):
            config = load_config(options['config'], overrides)
        elif options.get('preset'):
            config = config_from_preset(options['preset'], overrides)
        elif required:
            raise ConfigError('需要指定 --preset 或 --config')
        else:
            return None

        if options.get('times'):
            times = self._parse_list(options['times'], 'times')
            for value in times:
                if not 0.0 <= value <= config.scenario.T:
                    raise ConfigError(f'输出时刻 {value} 不在 [0, {config.scenario.T}] 内', key='times')
            config = replace(config, output=replace(config.output, times=tuple(times)))
        return config

    @staticmethod
    def _parse_list(text, key):
        try:
            return NumberUtils.parse_float_list(text)
        except ValueError as e:
            raise ConfigError(f'无法解析数值列表 {text!r}: {e}', key=key) from e

    @handle_exceptions(phase='config')
    def levels(self, options, axis, config=None, default=None):
        """解析并校验加密序列"""
        if options.get('levels'):
            levels = self._parse_list(options['levels'], 'levels')
        elif config is not None and config.study is not None and config.study.axis == axis:
            levels = list(config.study.levels)
        else:
            levels = list(default if default is not None else DEFAULT_LEVELS[axis])

        try:
            if axis == 'time':
                for level in levels:
                    positive_validator(level)
                RefinementValidator(min_levels=3, increasing=False)(levels)
                levels = tuple(float(level) for level in levels)
                if config is not None:
                    check_time_levels(config.scenario.T, levels)
                return levels
            if any(not float(level).is_integer() for level in levels):
                raise ConfigError(f'网格阶数必须是整数: {levels}', key='levels')
            levels = [int(level) for level in levels]
            for level in levels:
                IntegerRangeValidator(min_value=2)(level)
            if default is None:
                RefinementValidator(min_levels=3, increasing=True)(levels)
            elif not levels:
                raise ConfigError('至少需要一个网格阶数', key='levels')
            return tuple(levels)
        except ValidationError as e:
            raise ConfigError('; '.join(e.messages), key='levels') from e

    @handle_exceptions(phase='config')
    def horizon(self, options, config=None):
        if options.get('delta') is not None:
            delta = options['delta']
        elif config is not None:
            delta = config.scenario.delta
        else:
            delta = HORIZON
        try:
            horizon_validator(delta)
        except ValidationError as e:
            raise ConfigError('; '.join(e.messages), key='delta') from e
        return delta

    @handle_exceptions
    def handle_run(self, options):
        config = self.load(options)
        scenario = config.scenario
        report_path = options.get('report') or config.output.report

        try:
            record = run(scenario, config.snapshot_times)
        except SolverException as exc:
            if exc.record is not None and report_path:
                write_text(render_monitor_report(exc.record), report_path)
            raise

        csv_path = options.get('out') or config.output.csv
        svg_path = options.get('svg') or config.output.svg
        if csv_path:
            write_profiles_csv(record, csv_path)
            self.stdout.write(self.style.SUCCESS(f'剖面已写入 {csv_path}'))
        if svg_path:
            write_profiles_svg(record, svg_path)
            self.stdout.write(self.style.SUCCESS(f'剖面图已写入 {svg_path}'))

        report = render_monitor_report(record)
        if report_path:
            write_text(report, report_path)
            self.stdout.write(self.style.SUCCESS(f'运行摘要已写入 {report_path}'))
        if record.diagnostics.violations:
            self.stdout.write(self.style.WARNING(
                f'极大值原理越界 {len(record.diagnostics.violations)} 次，首次在第 {record.diagnostics.violations[0]} 步'
            ))
        if not (csv_path or svg_path or report_path):
            self.stdout.write(report)

        self.stdout.write(self.style.SUCCESS(
            f'完成 {record.diagnostics.step_count} 步，用时 {record.diagnostics.wall_time:.2f} 秒'
        ))

    @handle_exceptions
    def handle_converge(self, options):
        config = self.load(options)
        axis = options.get('axis') or (config.study.axis if config.study else 'time')
        levels = self.levels(options, axis, config)

        if axis == 'time':
            study = temporal_order(config.scenario, levels)
        else:
            study = spatial_order(config.scenario, levels)

        report = render_report(study)
        out = options.get('out') or config.output.csv
        report_path = options.get('report') or config.output.report
        if out:
            write_study_csv(study, out)
            self.stdout.write(self.style.SUCCESS(f'研究表已写入 {out}'))
            report_path = report_path or str(Path(out).with_suffix('.txt'))
        if report_path:
            write_text(report, report_path)
            self.stdout.write(self.style.SUCCESS(f'报告已写入 {report_path}'))
        else:
            self.stdout.write(report)

    @handle_exceptions
    def handle_operator_check(self, options):
        config = self.load(options, required=False)
        delta = self.horizon(options, config)
        Ns = self.levels(options, 'space', default=DEFAULT_GAP_LEVELS)

        table = operator_gap_study(delta, None, Ns)
        report = render_gap_report(table)
        if options.get('out'):
            write_gap_csv(table, options['out'])
            self.stdout.write(self.style.SUCCESS(f'差异表已写入 {options["out"]}'))
        if options.get('report'):
            write_text(report, options['report'])
        self.stdout.write(report)
