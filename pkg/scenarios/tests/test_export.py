"""
结果导出测试
"""

import tempfile
from pathlib import Path
from unittest import mock

from django.test import SimpleTestCase
from matplotlib.figure import Figure

from analysis.harness import operator_gap_study, temporal_order
from scenarios.export import (
    write_gap_csv,
    write_profiles_csv,
    write_profiles_svg,
    write_study_csv,
    write_text,
)
from scenarios.reports import render_gap_report, render_monitor_report, render_report
from solver.tests.base import TestDataFactory
from solver.time_stepper import RunRecord, run
from utils.exceptions import OutputError


class ExportTestCase(SimpleTestCase):

    def setUp(self):
        self.directory = tempfile.TemporaryDirectory()
        self.addCleanup(self.directory.cleanup)
        self.root = Path(self.directory.name)


class ProfileCsvTest(ExportTestCase):
    """剖面CSV"""

    def test_zero_final_time_has_single_profile(self):
        record = run(TestDataFactory.constant_scenario(T=0.0, N=8))
        path = self.root / 'profiles.csv'
        write_profiles_csv(record, path)
        lines = path.read_text(encoding='utf-8').splitlines()
        self.assertEqual(lines[0], 'z_cm,t=0')
        self.assertEqual(len(lines), 10)
        self.assertEqual(lines[1], '0.0,0.2')
        self.assertEqual(lines[-1], '30.0,0.2')

    def test_columns_and_depth_order(self):
        record = run(TestDataFactory.constant_scenario(dt=0.25), [0.0, 0.5, 1.0])
        path = self.root / 'profiles.csv'
        write_profiles_csv(record, path)
        lines = path.read_text(encoding='utf-8').splitlines()
        self.assertEqual(lines[0], 'z_cm,t=0,t=0.5,t=1')
        depths = [float(line.split(',')[0]) for line in lines[1:]]
        self.assertEqual(depths, sorted(depths))
        self.assertTrue(all(len(line.split(',')) == 4 for line in lines))

    def test_unix_line_endings_and_determinism(self):
        record = run(TestDataFactory.sand_scenario())
        first, second = self.root / 'a.csv', self.root / 'b.csv'
        write_profiles_csv(record, first)
        write_profiles_csv(run(TestDataFactory.sand_scenario()), second)
        content = first.read_bytes()
        self.assertNotIn(b'\r', content)
        self.assertEqual(content, second.read_bytes())

    def test_incomplete_record(self):
        record = RunRecord(scenario=TestDataFactory.constant_scenario())
        with self.assertRaises(OutputError):
            write_profiles_csv(record, self.root / 'profiles.csv')

    def test_unwritable_path(self):
        blocker = self.root / 'file.txt'
        blocker.write_text('x', encoding='utf-8')
        record = run(TestDataFactory.constant_scenario(T=0.0))
        with self.assertRaises(OutputError):
            write_profiles_csv(record, blocker / 'profiles.csv')

    def test_creates_parent_directory(self):
        record = run(TestDataFactory.constant_scenario(T=0.0))
        path = self.root / 'nested' / 'out' / 'profiles.csv'
        write_profiles_csv(record, path)
        self.assertTrue(path.exists())

    def test_failed_write_keeps_previous_file(self):
        record = run(TestDataFactory.constant_scenario(T=0.0))
        path = self.root / 'profiles.csv'
        path.write_text('previous', encoding='utf-8')
        disk_full = OSError(28, 'No space left on device')
        with mock.patch('scenarios.export.NumberUtils.format_float', side_effect=disk_full):
            with self.assertRaises(OutputError):
                write_profiles_csv(record, path)
        self.assertEqual(path.read_text(encoding='utf-8'), 'previous')
        self.assertEqual(list(self.root.iterdir()), [path])


class ProfileSvgTest(ExportTestCase):
    """SVG剖面图"""

    def test_one_curve_per_snapshot(self):
        record = run(TestDataFactory.sand_scenario(), [0.0, 0.3, 0.6])
        path = self.root / 'profiles.svg'
        write_profiles_svg(record, path)
        content = path.read_text(encoding='utf-8')
        self.assertIn('<svg', content)
        for index in range(3):
            self.assertIn(f'profile-{index}', content)
        self.assertNotIn('profile-3', content)

    def test_deterministic(self):
        record = run(TestDataFactory.sand_scenario())
        first, second = self.root / 'a.svg', self.root / 'b.svg'
        write_profiles_svg(record, first)
        write_profiles_svg(record, second)
        self.assertEqual(first.read_bytes(), second.read_bytes())

    def test_failed_save_leaves_no_file(self):
        record = run(TestDataFactory.constant_scenario(T=0.0))
        path = self.root / 'profiles.svg'
        with mock.patch.object(Figure, 'savefig', side_effect=OSError(28, 'No space left on device')):
            with self.assertRaises(OutputError):
                write_profiles_svg(record, path)
        self.assertEqual(list(self.root.iterdir()), [])


class StudyExportTest(ExportTestCase):
    """研究表与报告"""

    def test_study_csv_and_report(self):
        study = temporal_order(TestDataFactory.constant_scenario(dt=0.25, sink=-0.01), [0.25, 0.125, 0.0625])
        path = self.root / 'study.csv'
        write_study_csv(study, path)
        lines = path.read_text(encoding='utf-8').splitlines()
        self.assertEqual(lines[0], 'level,max_error,l2w_error,order_max,order_l2w')
        self.assertEqual(len(lines), 4)
        self.assertTrue(lines[1].startswith('0.25,'))
        self.assertTrue(lines[1].endswith(',,'))

        report = render_report(study)
        self.assertIn('Richardson', report)
        self.assertIn('0.0625', report)

    def test_gap_csv_and_report(self):
        table = operator_gap_study(0.15, Ns=(8, 16))
        path = self.root / 'gap.csv'
        write_gap_csv(table, path)
        lines = path.read_text(encoding='utf-8').splitlines()
        self.assertEqual(lines[0], 'pair,N,gap,monotone')
        self.assertEqual(len(lines), 5)
        self.assertTrue(lines[1].startswith('constant,8,'))
        self.assertIn('smooth:', render_gap_report(table))

    def test_monitor_report(self):
        record = run(TestDataFactory.constant_scenario(dt=0.25))
        report = render_monitor_report(record)
        self.assertIn('时间步数: 4', report)
        self.assertIn('极大值原理越界次数: 0', report)
        path = self.root / 'report.txt'
        write_text(report, path)
        self.assertEqual(path.read_text(encoding='utf-8'), report)
