"""
peri_richards 管理命令测试
"""

import tempfile
from io import StringIO
from pathlib import Path
from textwrap import dedent

from django.core.management import call_command
from django.core.management.base import CommandError
from django.test import SimpleTestCase

from utils.exceptions import ExitCode

UNSTABLE_CONFIG = dedent("""\
    scenario:
      preset: example1
      N: 8
      dt: 6.0
      sink: 1.0e+300
      sink_scale: 1.0e+300
    """)


class CommandTestCase(SimpleTestCase):

    def setUp(self):
        self.directory = tempfile.TemporaryDirectory()
        self.addCleanup(self.directory.cleanup)
        self.root = Path(self.directory.name)

    def call(self, *args):
        out = StringIO()
        call_command('peri_richards', *args, stdout=out, stderr=StringIO())
        return out.getvalue()

    def assertExitCode(self, code, *args):
        with self.assertRaises(CommandError) as cm:
            self.call(*args)
        self.assertEqual(cm.exception.returncode, code)
        return cm.exception


class RunCommandTest(CommandTestCase):
    """run 子命令"""

    def test_preset_to_csv(self):
        out = self.root / 'ex1.csv'
        self.call('run', '--preset', 'example1', '--N', '16', '--dt', '6', '--times', '0,30,60', '--out', str(out))
        lines = out.read_text(encoding='utf-8').splitlines()
        self.assertEqual(lines[0], 'z_cm,t=0,t=30,t=60')
        self.assertEqual(len(lines), 18)
        row = lines[1].split(',')
        self.assertEqual((row[0], row[1], row[3]), ('0.0', '0.2234', '0.181'))
        self.assertAlmostEqual(float(row[2]), 0.2022, places=14)
        self.assertEqual(lines[-1].split(',')[0], '30.0')

    def test_svg_and_report(self):
        svg = self.root / 'ex2.svg'
        report = self.root / 'ex2.txt'
        output = self.call('run', '--preset', 'example2', '--N', '16', '--dt', '6',
                           '--svg', str(svg), '--report', str(report))
        self.assertIn('profile-1', svg.read_text(encoding='utf-8'))
        self.assertIn('完成: 是', report.read_text(encoding='utf-8'))
        self.assertIn('完成 10 步', output)

    def test_summary_printed_without_outputs(self):
        output = self.call('run', '--preset', 'example1', '--N', '8', '--dt', '12')
        self.assertIn('运行摘要: example1', output)

    def test_config_file(self):
        config = self.root / 'scenario.yaml'
        config.write_text('scenario:\n  preset: example2\n  N: 8\n  dt: 12\noutput:\n  times: [0, 60]\n',
                          encoding='utf-8')
        out = self.root / 'out.csv'
        self.call('run', '--config', str(config), '--out', str(out))
        self.assertEqual(out.read_text(encoding='utf-8').splitlines()[0], 'z_cm,t=0,t=60')

    def test_repeated_runs_are_byte_identical(self):
        first = self.root / 'first.csv'
        second = self.root / 'second.csv'
        self.call('run', '--preset', 'example1', '--N', '16', '--out', str(first))
        self.call('run', '--preset', 'example1', '--N', '16', '--out', str(second))
        self.assertEqual(first.read_bytes(), second.read_bytes())


class ExitCodeTest(CommandTestCase):
    """错误到退出码的映射"""

    def test_bad_horizon_is_config_error(self):
        error = self.assertExitCode(ExitCode.CONFIG_ERROR, 'run', '--preset', 'example1', '--delta', '1.5')
        self.assertIn('delta', str(error))

    def test_missing_source_is_config_error(self):
        self.assertExitCode(ExitCode.CONFIG_ERROR, 'run')

    def test_missing_config_file(self):
        self.assertExitCode(ExitCode.CONFIG_ERROR, 'run', '--config', str(self.root / 'missing.yaml'))

    def test_invalid_yaml_key(self):
        config = self.root / 'bad.yaml'
        config.write_text('scenario:\n  preset: example1\n  horizon: 0.2\n', encoding='utf-8')
        error = self.assertExitCode(ExitCode.CONFIG_ERROR, 'run', '--config', str(config))
        self.assertIn('scenario.horizon', str(error))

    def test_times_outside_run(self):
        self.assertExitCode(ExitCode.CONFIG_ERROR, 'run', '--preset', 'example1', '--times', '0,90')

    def test_instability(self):
        config = self.root / 'unstable.yaml'
        config.write_text(UNSTABLE_CONFIG, encoding='utf-8')
        report = self.root / 'failure.txt'
        self.assertExitCode(ExitCode.INSTABILITY, 'run', '--config', str(config), '--report', str(report))
        self.assertIn('完成: 否', report.read_text(encoding='utf-8'))

    def test_unwritable_output(self):
        blocker = self.root / 'file.txt'
        blocker.write_text('x', encoding='utf-8')
        self.assertExitCode(ExitCode.IO_ERROR, 'run', '--preset', 'example1', '--N', '8', '--dt', '12',
                            '--out', str(blocker / 'out.csv'))

    def test_bad_levels(self):
        self.assertExitCode(ExitCode.CONFIG_ERROR, 'converge', '--preset', 'example1', '--levels', '0.1,0.2,0.3')
        self.assertExitCode(ExitCode.CONFIG_ERROR, 'converge', '--preset', 'example1', '--axis', 'space',
                            '--levels', '16,32')

    def test_time_levels_must_divide_final_time(self):
        out = self.root / 'study.csv'
        error = self.assertExitCode(ExitCode.CONFIG_ERROR, 'converge', '--preset', 'example1',
                                    '--levels', '0.7,0.35,0.175', '--out', str(out))
        self.assertIn('dt=0.7', str(error))
        self.assertFalse(out.exists())

class StudyCommandTest(CommandTestCase):
    """converge 与 operator-check 子命令"""

    def test_converge_time(self):
        out = self.root / 'study.csv'
        self.call('converge', '--preset', 'example2', '--N', '8', '--axis', 'time',
                  '--levels', '12,6,3', '--out', str(out))
        lines = out.read_text(encoding='utf-8').splitlines()
        self.assertEqual(lines[0], 'level,max_error,l2w_error,order_max,order_l2w')
        self.assertEqual(len(lines), 4)
        self.assertIn('Richardson', out.with_suffix('.txt').read_text(encoding='utf-8'))

    def test_converge_space(self):
        output = self.call('converge', '--preset', 'example1', '--dt', '12', '--axis', 'space', '--levels', '8,12,16')
        self.assertIn('空间收敛性研究', output)

    def test_operator_check(self):
        out = self.root / 'gap.csv'
        output = self.call('operator-check', '--levels', '8,16', '--out', str(out))
        self.assertIn('constant:', output)
        self.assertEqual(len(out.read_text(encoding='utf-8').splitlines()), 5)

    def test_operator_check_bad_delta(self):
        self.assertExitCode(ExitCode.CONFIG_ERROR, 'operator-check', '--delta', '0')
