"""
近场动力学算子测试
"""

import math

import numpy as np
from django.test import override_settings
from scipy import integrate

from solver.peridynamic_operator import (
    InfluenceKernel,
    OperatorInputs,
    apply_quadrature,
    apply_spectral,
    beta,
    kernel_multipliers,
    phi_bar,
    phi_delta,
)
from solver.spectral_core import GridFunction, make_grid
from utils.exceptions import GridMismatchError, ParameterError

from .base import SolverTestCase


def make_inputs(N, K_func, H_func, delta=0.15):
    grid = make_grid(N)
    K = GridFunction(grid, np.broadcast_to(K_func(grid.nodes), grid.nodes.shape))
    H = GridFunction(grid, np.broadcast_to(H_func(grid.nodes), grid.nodes.shape))
    return OperatorInputs.from_fields(K, H, InfluenceKernel(delta))


class InfluenceFunctionTest(SolverTestCase):
    """影响函数测试"""

    def test_phi_examples(self):
        self.assertAlmostEqual(float(phi_delta(0.15, 1.0)), 1.0, places=14)
        self.assertEqual(float(phi_delta(0.15, 0.0)), 0.0)
        self.assertEqual(float(phi_delta(0.15, 0.85)), 0.0)
        self.assertAlmostEqual(float(phi_delta(0.15, -0.925)), 0.5, places=12)

    def test_phi_bounds(self):
        z = np.linspace(-1.0, 1.0, 401)
        values = phi_delta(0.3, z)
        self.assertTrue(np.all(values >= 0.0) and np.all(values <= 1.0))

    def test_phi_zero_outside_horizon(self):
        self.assertEqual(float(phi_delta(0.15, 1.5)), 0.0)

    def test_phi_bar_examples(self):
        self.assertAlmostEqual(float(phi_bar(0.15, 1.0)), 1.0, places=14)
        self.assertEqual(float(phi_bar(0.15, 0.0)), 0.0)
        self.assertAlmostEqual(float(phi_bar(0.15, 0.9)), 1.0 / 2.7, places=12)

    def test_invalid_delta(self):
        for delta in (0.0, 1.0, -0.2, 1.5):
            with self.assertRaises(ParameterError):
                phi_delta(delta, 0.5)
            with self.assertRaises(ParameterError):
                beta(delta)
            with self.assertRaises(ParameterError):
                InfluenceKernel(delta)


class BetaTest(SolverTestCase):
    """β 闭式与数值积分对比"""

    def test_against_adaptive_quadrature(self):
        for delta in (0.05, 0.15, 0.5, 0.9):
            with self.subTest(delta=delta):
                inner = 1.0 - delta
                numeric, _ = integrate.quad(lambda z: float(phi_bar(delta, z)), -1.0, 1.0,
                                            points=[-inner, 0.0, inner], epsabs=1e-13, epsrel=1e-13, limit=200)
                self.assertLessEqual(abs(beta(delta) - numeric), 1e-8)

    def test_closed_form_values(self):
        self.assertAlmostEqual(beta(0.15), 2.0 * (1.0 + (0.85 / 0.15) * math.log(0.85)), places=13)
        self.assertAlmostEqual(beta(0.5), 2.0 * (1.0 + math.log(0.5)), places=13)

    def test_limit_near_one(self):
        self.assertAlmostEqual(beta(1.0 - 1e-9), 2.0, places=6)


class KernelMultipliersTest(SolverTestCase):
    """核函数乘子测试"""

    def test_constant_mode_is_beta(self):
        grid = make_grid(32)
        kappa = kernel_multipliers(grid, 0.15)
        self.assertEqual(kappa[0], beta(0.15))

    def test_odd_moments_vanish(self):
        kappa = kernel_multipliers(make_grid(32), 0.15)
        self.assertTrue(np.all(kappa[1::2] == 0.0))

    def test_moments_against_quadrature(self):
        grid = make_grid(16)
        kappa = kernel_multipliers(grid, 0.3, mode='moments')
        for k in (2, 4, 10, 16):
            numeric, _ = integrate.quad(lambda s: float(phi_bar(0.3, s)) * math.cos(k * math.acos(s)),
                                        0.7, 1.0, epsabs=1e-13, epsrel=1e-13)
            self.assertAlmostEqual(kappa[k], 2.0 * numeric, places=10)

    def test_cached(self):
        grid = make_grid(24)
        self.assertIs(kernel_multipliers(grid, 0.15), kernel_multipliers(grid, 0.15))

    def test_discrete_mode(self):
        grid = make_grid(24)
        kappa = kernel_multipliers(grid, 0.15, mode='discrete')
        self.assertEqual(kappa.shape, (25,))
        self.assertNotAlmostEqual(kappa[0], beta(0.15), places=6)

    def test_unknown_mode(self):
        with self.assertRaises(ParameterError):
            kernel_multipliers(make_grid(8), 0.15, mode='fourier')


class ApplySpectralTest(SolverTestCase):
    """谱方法算子测试"""

    def test_constant_potential_null_case(self):
        for N in (16, 64, 256):
            with self.subTest(N=N):
                inputs = make_inputs(N, lambda z: 2.0 + np.sin(np.pi * z), lambda z: np.full_like(z, 7.0))
                zero = GridFunction.constant(inputs.grid, 0.0)
                result = apply_spectral(inputs, zero).values
                scale = 3.0 * 7.0 * beta(0.15)
                self.assertLessEqual(float(np.max(np.abs(result))), 1e-10 * scale)

    def test_zero_conductivity_returns_source(self):
        inputs = make_inputs(32, lambda z: np.zeros_like(z), lambda z: z ** 2 - 3.0 * z)
        S = GridFunction(inputs.grid, np.linspace(-1.0, 2.0, 33))
        self.assertArrayClose(apply_spectral(inputs, S).values, S.values, atol=0.0)

    def test_linear_in_source(self):
        inputs = make_inputs(16, lambda z: 1.0 + z ** 2, lambda z: np.cos(z))
        grid = inputs.grid
        S1 = GridFunction(grid, grid.nodes)
        S2 = GridFunction(grid, np.full(17, -0.5))
        zero = GridFunction.constant(grid, 0.0)
        combined = apply_spectral(inputs, GridFunction(grid, S1.values + S2.values)).values
        expected = (apply_spectral(inputs, S1).values + apply_spectral(inputs, S2).values
                    - apply_spectral(inputs, zero).values)
        self.assertArrayClose(combined, expected, atol=1e-13)

    def test_grid_mismatch(self):
        inputs = make_inputs(8, lambda z: 1.0 + 0 * z, lambda z: z)
        with self.assertRaises(GridMismatchError):
            apply_spectral(inputs, GridFunction.constant(make_grid(9), 0.0))
        with self.assertRaises(GridMismatchError):
            OperatorInputs.from_fields(GridFunction.constant(make_grid(8), 1.0),
                                       GridFunction.constant(make_grid(9), 1.0), InfluenceKernel(0.15))

    @override_settings(PERI_RICHARDS={'KERNEL_TRANSFORM': 'discrete'})
    def test_discrete_kernel_breaks_null_case(self):
        inputs = make_inputs(16, lambda z: 2.0 + np.sin(np.pi * z), lambda z: np.full_like(z, 7.0))
        result = apply_spectral(inputs, GridFunction.constant(inputs.grid, 0.0)).values
        self.assertGreater(float(np.max(np.abs(result))), 1e-6)


class ApplyQuadratureTest(SolverTestCase):
    """直接求积算子测试"""

    def test_constant_potential_null_case(self):
        inputs = make_inputs(16, lambda z: 2.0 + np.sin(np.pi * z), lambda z: np.full_like(z, 7.0))
        result = apply_quadrature(inputs, GridFunction.constant(inputs.grid, 0.0)).values
        self.assertLessEqual(float(np.max(np.abs(result))), 1e-10 * 21.0 * beta(0.15))

    def test_odd_integrand_vanishes_at_center(self):
        inputs = make_inputs(16, lambda z: np.full_like(z, 1.3), lambda z: z)
        result = apply_quadrature(inputs, GridFunction.constant(inputs.grid, 0.0)).values
        self.assertAlmostEqual(float(result[8]), 0.0, places=12)

    def test_linear_potential_at_interior_node(self):
        # K 为常数、H(z) = z 时被积函数分段线性，Simpson 应与自适应积分一致
        c, delta = 1.3, 0.15
        inputs = make_inputs(16, lambda z: np.full_like(z, c), lambda z: z, delta=delta)
        result = apply_quadrature(inputs, GridFunction.constant(inputs.grid, 0.0)).values
        z_h = float(inputs.grid.nodes[3])

        def integrand(s):
            return float(phi_bar(delta, s - z_h)) * c * (s - z_h)

        expected = sum(
            integrate.quad(integrand, max(a, -1.0), min(b, 1.0), epsabs=1e-13)[0]
            for a, b in ((z_h - 1.0, z_h - 1.0 + delta), (z_h + 1.0 - delta, z_h + 1.0))
            if min(b, 1.0) > max(a, -1.0)
        )
        self.assertAlmostEqual(float(result[3]), expected, places=9)

    def test_source_added(self):
        inputs = make_inputs(8, lambda z: np.zeros_like(z), lambda z: z)
        S = GridFunction.constant(inputs.grid, -0.25)
        self.assertArrayClose(apply_quadrature(inputs, S).values, S.values, atol=0.0)

    def test_spectral_and_quadrature_finite_for_smooth_pair(self):
        inputs = make_inputs(64, lambda z: 2.0 + np.sin(np.pi * z), lambda z: z ** 2)
        zero = GridFunction.constant(inputs.grid, 0.0)
        spectral = apply_spectral(inputs, zero).values
        quadrature = apply_quadrature(inputs, zero).values
        self.assertAllFinite(spectral)
        self.assertAllFinite(quadrature)
        self.assertGreater(float(np.max(np.abs(quadrature))), 0.0)
