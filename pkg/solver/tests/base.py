"""
测试基础类和工具
提供求解器测试共用的场景、土壤桩对象和断言方法
"""

import numpy as np
from django.test import SimpleTestCase

from scenarios.initial_conditions import ChebyshevPolynomialProfile
from solver.soil_physics import VanGenuchtenMualem, VanGenuchtenParams
from solver.time_stepper import LinearRamp, Scenario


class NoFlowSoil:
    """导水率恒为0的退化土壤，算子 L ≡ 0"""

    theta_r = 0.0
    theta_s = 1.0

    def matric_head(self, theta):
        return -np.ones_like(np.asarray(theta, dtype=float))

    def hydraulic_conductivity(self, h_m):
        return np.zeros_like(np.asarray(h_m, dtype=float))


class TestDataFactory:
    """测试数据工厂"""

    @staticmethod
    def sand_params():
        return VanGenuchtenParams(theta_r=0.075, theta_s=0.287, alpha=0.036, n=1.56, K_s=0.00094)

    @staticmethod
    def constant_scenario(value=0.2, N=16, T=1.0, dt=0.1, sink=0.0, soil=None, **kwargs):
        """常数初始/边界条件的场景"""
        return Scenario(
            Z=30.0,
            T=T,
            N=N,
            dt=dt,
            delta=0.15,
            soil=soil or NoFlowSoil(),
            sink=sink,
            ic=ChebyshevPolynomialProfile((value,)),
            bc_top=LinearRamp(value, value, T),
            bc_bottom=LinearRamp(value, value, T),
            **kwargs,
        )

    @staticmethod
    def sand_scenario(N=16, T=0.6, dt=0.06, **kwargs):
        """砂土、线性初始剖面的小规模场景"""
        top, bottom = 0.22, 0.14
        return Scenario(
            Z=30.0,
            T=T,
            N=N,
            dt=dt,
            delta=0.15,
            soil=VanGenuchtenMualem(TestDataFactory.sand_params(), name='example1_sand'),
            sink=0.0,
            ic=ChebyshevPolynomialProfile(((top + bottom) / 2, (top - bottom) / 2)),
            bc_top=LinearRamp(top, top, T),
            bc_bottom=LinearRamp(bottom, bottom, T),
            **kwargs,
        )


class SolverTestCase(SimpleTestCase):
    """求解器测试基础类"""

    def assertArrayClose(self, actual, expected, atol=1e-12, rtol=0.0, msg=None):
        np.testing.assert_allclose(actual, expected, atol=atol, rtol=rtol, err_msg=msg or '')

    def assertAllFinite(self, values):
        self.assertTrue(np.all(np.isfinite(values)), '存在非有限值')
