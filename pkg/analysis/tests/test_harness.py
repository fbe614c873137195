"""
收敛性分析测试
"""

import math

from django.test import override_settings, tag

from analysis.harness import (
    check_time_levels,
    is_monotone,
    observed_order,
    operator_gap_study,
    spatial_order,
    temporal_order,
)
from scenarios.presets import example1, example2, get_preset
from solver.tests.base import SolverTestCase, TestDataFactory
from utils.exceptions import ExitCode, InvalidLevelsError, StudyError

# δ = 0.15 时光滑测试对 K = 2+sin(πx), H = x² 的谱方法与直接求积差异
SMOOTH_PAIR_GAP = 0.25376240194956


class HelperTest(SolverTestCase):
    """阶数与单调性辅助函数"""

    def test_observed_order(self):
        self.assertAlmostEqual(observed_order(1e-2, 5e-3, 0.2, 0.1), 1.0, places=12)
        self.assertAlmostEqual(observed_order(1e-2, 2.5e-3, 16, 32), 2.0, places=12)

    def test_zero_error_gives_nan(self):
        self.assertTrue(math.isnan(observed_order(0.0, 1e-3, 0.2, 0.1)))

    def test_monotone_allowance_on_coarsest_pair(self):
        self.assertTrue(is_monotone([1.0, 1.04, 0.5]))
        self.assertFalse(is_monotone([1.0, 1.1, 0.5]))
        self.assertFalse(is_monotone([1.0, 0.5, 0.6]))

    def test_monotone_ignores_roundoff(self):
        self.assertTrue(is_monotone([1e-14, 5e-13, 2e-13]))


class TemporalOrderTest(SolverTestCase):
    """时间收敛阶测试"""

    def test_frozen_solution_has_zero_errors(self):
        scenario = TestDataFactory.constant_scenario(dt=0.25)
        study = temporal_order(scenario, [0.25, 0.125, 0.0625])
        self.assertEqual(study.axis, 'time')
        self.assertEqual(study.reference_level, 0.0625)
        self.assertEqual([error.max_error for error in study.errors], [0.0, 0.0, 0.0])
        self.assertTrue(all(math.isnan(order) for order in study.observed_orders))
        self.assertTrue(study.monotone)

    def test_rejects_short_or_unordered_levels(self):
        scenario = TestDataFactory.constant_scenario(dt=0.25)
        with self.assertRaises(StudyError):
            temporal_order(scenario, [0.25, 0.125])
        with self.assertRaises(StudyError):
            temporal_order(scenario, [0.0625, 0.125, 0.25])

    def test_rejects_non_divisor_step(self):
        with self.assertRaises(InvalidLevelsError):
            temporal_order(TestDataFactory.constant_scenario(), [0.3, 0.2, 0.1])

    def test_check_time_levels(self):
        check_time_levels(60.0, [0.24, 0.12, 0.06, 0.03])
        with self.assertRaises(InvalidLevelsError) as cm:
            check_time_levels(60.0, [0.7, 0.35])
        self.assertEqual(cm.exception.exit_code, ExitCode.CONFIG_ERROR)

    @override_settings(PERI_RICHARDS={'STUDY_WORKERS': 3})
    def test_thread_pool_keeps_order(self):
        scenario = TestDataFactory.constant_scenario(dt=0.25, sink=-0.01)
        study = temporal_order(scenario, [0.25, 0.125, 0.0625])
        self.assertEqual([error.level for error in study.errors], [0.25, 0.125, 0.0625])
        for error in study.errors:
            self.assertLessEqual(error.max_error, 1e-14)


class SpatialOrderTest(SolverTestCase):
    """空间收敛阶测试"""

    def test_frozen_solution(self):
        scenario = TestDataFactory.constant_scenario(dt=0.25)
        study = spatial_order(scenario, [8, 16, 32])
        self.assertEqual(study.reference_level, 32)
        self.assertEqual(len(study.errors), 2)
        for error in study.errors:
            self.assertLessEqual(error.max_error, 1e-14)
            self.assertLessEqual(error.l2_error, 1e-13)

    def test_rejects_decreasing_levels(self):
        with self.assertRaises(StudyError):
            spatial_order(TestDataFactory.constant_scenario(), [32, 16, 64])

    def test_rejects_invalid_degree(self):
        with self.assertRaises(StudyError):
            spatial_order(TestDataFactory.constant_scenario(), [1, 16, 64])


class OperatorGapTest(SolverTestCase):
    """谱方法与直接求积差异测试"""

    def test_default_pairs(self):
        table = operator_gap_study(0.15, Ns=(16, 32))
        self.assertEqual(table.pairs, ['constant', 'smooth'])
        self.assertEqual(table.delta, 0.15)
        for gap in table.gaps('constant'):
            self.assertLessEqual(gap, 1e-10)
        for gap in table.gaps('smooth'):
            self.assertTrue(math.isfinite(gap))

    def test_custom_pair(self):
        pairs = {'zero_flux': lambda x: (0.0 * x, x ** 3)}
        table = operator_gap_study(0.3, pairs, Ns=(8,))
        self.assertEqual(len(table.rows), 1)
        self.assertEqual(table.rows[0].gap, 0.0)

    def test_requires_levels(self):
        with self.assertRaises(StudyError):
            operator_gap_study(0.15, Ns=())


@tag('slow')
class PresetConvergenceTest(SolverTestCase):
    """算例上的自收敛阶"""

    def test_example2_temporal_order_is_one(self):
        scenario = get_preset('example2', N=64)
        study = temporal_order(scenario, [0.24, 0.12, 0.06, 0.03])
        for order in study.observed_orders:
            self.assertGreaterEqual(order, 0.8)
            self.assertLessEqual(order, 1.2)
        self.assertTrue(study.monotone)

    def test_example1_spatial_order(self):
        # 底部端点的 Dirichlet 跳跃使误差按代数阶下降，实测阶数约 1.06 与 1.55
        study = spatial_order(example1(), [16, 32, 64, 128])
        self.assertTrue(study.monotone)
        self.assertGreaterEqual(study.observed_orders[0], 0.9)
        self.assertGreaterEqual(study.observed_orders[1], 1.3)

    def test_example2_spatial_errors_decrease(self):
        # 实测误差 8.3e-4、3.9e-4、1.35e-4
        study = spatial_order(example2(), [16, 32, 64, 128])
        errors = [error.max_error for error in study.errors]
        self.assertTrue(study.monotone)
        self.assertLessEqual(errors[-1], errors[0] / 5.0)
        self.assertLess(errors[0], 2e-3)

    def test_smooth_pair_gap_is_stable(self):
        table = operator_gap_study(0.15, Ns=(32, 64, 128, 256))
        self.assertTrue(table.monotone('smooth'))
        self.assertAlmostEqual(table.gaps('smooth')[-1], SMOOTH_PAIR_GAP, delta=0.1 * SMOOTH_PAIR_GAP)
        for gap in table.gaps('constant'):
            self.assertLessEqual(gap, 1e-10)
