import io
import math
import unittest
from fractions import Fraction

import mpmath
import numpy as np
import pytest
from scipy import optimize, special

from torsionlab.constants import (
    ZETA_R_AT_0,
    ZETA_R_PRIME_AT_0,
    BoundaryCondition,
    CrossProductKind,
    ZeroFamily,
    ZetaMethod,
)
from torsionlab.spectral_zeta import (
    FindZerosError,
    OracleConvergenceError,
    SpectralError,
    ZeroTable,
    analytic_torsion_closed_form,
    big_phi1,
    continuation_oracle,
    cross_product,
    double_series_a00,
    double_series_a01,
    double_series_terms,
    find_zeros,
    gee,
    gee_at_zero,
    large_lambda_expansion,
    log_gamma_axial,
    mellin_phi_quadrature,
    phi1,
    phi_terms,
    product_representation,
    read_zero_table,
    spectrum_descriptor,
    torsion_zeta_coefficients,
    torsion_zeta_evaluation,
    torsion_zeta_log,
    uniform_expansion_residual,
    write_zero_table,
    zprime0_axial,
)

F = CrossProductKind.F
FTILDE = CrossProductKind.FTILDE


def first_zero_by_bisection(order: float, l1: float, l2: float) -> float:
    grid = np.arange(1e-4, 6.0, 1e-4)
    values = special.jv(order, l2 * grid) * special.yv(
        order, l1 * grid
    ) - special.jv(order, l1 * grid) * special.yv(order, l2 * grid)
    i = int(np.nonzero(np.signbit(values[:-1]) != np.signbit(values[1:]))[0][0])
    return float(
        optimize.bisect(
            lambda z: cross_product(F, order, l1, l2, z),
            grid[i],
            grid[i + 1],
            xtol=1e-14,
        )
    )


class CrossProductTest(unittest.TestCase):
    def test_argument_checks(self) -> None:
        with self.assertRaises(SpectralError):
            cross_product(F, 0.0, 2.0, 1.0, 1.0)
        with self.assertRaises(SpectralError):
            cross_product(F, 0.0, 1.0, 2.0, 0.0)

    def test_gee_at_zero_matches_small_argument(self) -> None:
        for order in (0.0, 1.5):
            self.assertAlmostEqual(
                gee(F, order, 1.0, 2.0, 1e-5) / gee_at_zero(F, order, 1.0, 2.0),
                1.0,
                places=8,
            )
        self.assertAlmostEqual(
            gee(FTILDE, 0.0, 1.0, 2.0, 1e-5) / gee_at_zero(FTILDE, 0.0, 1.0, 2.0),
            1.0,
            places=8,
        )
        y = 1e-4
        self.assertAlmostEqual(
            y * y * gee(FTILDE, 2.0, 1.0, 2.0, y) / gee_at_zero(FTILDE, 2.0, 1.0, 2.0),
            1.0,
            places=6,
        )

    def test_large_order_stays_in_range(self) -> None:
        self.assertTrue(math.isfinite(math.log(gee_at_zero(F, 200.0, 1.0, 2.0))))
        self.assertGreater(gee(F, 50.0, 1.0, 2.0, 30.0), 0.0)


class FindZerosTest(unittest.TestCase):
    def setUp(self) -> None:
        self.table = find_zeros(F, 0.0, 1.0, 2.0, K=100, tol=1e-12, workers=2)

    def test_increasing_with_pi_spacing(self) -> None:
        zeros = self.table.as_array()
        self.assertEqual(len(zeros), 100)
        self.assertTrue(np.all(np.diff(zeros) > 0))
        self.assertAlmostEqual(float(np.mean(np.diff(zeros[50:]))), math.pi, places=3)
        self.assertEqual(self.table.spacing_violations(), [])

    def test_first_zero_matches_grid_scan(self) -> None:
        self.assertAlmostEqual(
            self.table.zeros[0], first_zero_by_bisection(0.0, 1.0, 2.0), places=10
        )

    def test_zeros_are_roots(self) -> None:
        for z in self.table.zeros[:10]:
            self.assertLess(abs(cross_product(F, 0.0, 1.0, 2.0, z)), 1e-10)

    def test_worker_count_does_not_change_table(self) -> None:
        single = find_zeros(F, 0.0, 1.0, 2.0, K=100, tol=1e-12, workers=1)
        self.assertEqual(single.zeros, self.table.zeros)

    def test_interlaces_with_neumann_zeros(self) -> None:
        dirichlet = self.table.as_array()[:50]
        neumann = find_zeros(FTILDE, 0.0, 1.0, 2.0, K=50, workers=2).as_array()
        self.assertTrue(np.all(dirichlet < neumann))
        self.assertTrue(np.all(neumann[:-1] < dirichlet[1:]))

    def test_neumann_zeros(self) -> None:
        table = find_zeros(FTILDE, 3.0, 1.0, 2.0, K=40, workers=1)
        self.assertTrue(all(b > a for a, b in zip(table.zeros, table.zeros[1:])))
        self.assertGreater(table.zeros[0], 3.0 / 2.0)
        for z in table.zeros[:5]:
            self.assertLess(abs(cross_product(FTILDE, 3.0, 1.0, 2.0, z)), 1e-9)

    def test_argument_errors(self) -> None:
        with self.assertRaises(SpectralError):
            find_zeros(F, 0.0, 1.0, 2.0, K=0)
        with self.assertRaises(SpectralError):
            find_zeros(F, -1.0, 1.0, 2.0, K=5)
        self.assertTrue(issubclass(FindZerosError, SpectralError))

    def test_csv_table(self) -> None:
        stream = io.StringIO()
        write_zero_table(self.table, stream)
        lines = stream.getvalue().splitlines()
        self.assertEqual(lines[0], "kind,nu_n,l1,l2,tol")
        self.assertEqual(lines[2], "k,a_k")
        self.assertEqual(len(lines), 103)
        stream.seek(0)
        self.assertEqual(read_zero_table(stream), self.table)

    def test_malformed_csv(self) -> None:
        with self.assertRaises(SpectralError):
            read_zero_table(io.StringIO("kind\nF,0\n"))


def test_spacing_violations_skip_early_gaps() -> None:
    zeros = tuple(float(k) * math.pi for k in range(1, 30))
    bent = zeros[:5] + tuple(z + 0.3 * math.pi for z in zeros[5:25]) + zeros[25:]
    table = ZeroTable(F, 0.0, 1.0, 2.0, bent, 1e-12)
    assert table.spacing_violations() == [25]


class ProductRepresentationTest(unittest.TestCase):
    def test_matches_bessel_evaluation(self) -> None:
        table = find_zeros(F, 0.0, 1.0, 2.0, K=1000, workers=2)
        for y in [*np.linspace(0.1, 2.0, 12), 3.0]:
            rep = product_representation(table, y)
            self.assertLess(abs(rep.value / gee(F, 0.0, 1.0, 2.0, y) - 1.0), 1e-6)
            self.assertGreaterEqual(rep.tail_factor, 1.0)

    def test_order_zero_only(self) -> None:
        table = ZeroTable(F, 1.0, 1.0, 2.0, (4.0,), 1e-12)
        with self.assertRaises(SpectralError):
            product_representation(table, 1.0)


class AxialZetaTest(unittest.TestCase):
    def test_closed_forms(self) -> None:
        s0 = zprime0_axial(F, 1.0, 2.0)
        expected = -(0.5 * math.log(2.0) + math.log(math.log(2.0)) + math.log(2.0))
        self.assertAlmostEqual(s0.value_at_0_derivative, expected, places=14)
        self.assertEqual(s0.sequence, "S0")
        s0t = zprime0_axial(FTILDE, 1.0, 2.0)
        self.assertAlmostEqual(
            s0t.value_at_0_derivative, 0.5 * math.log(2.0) - math.log(3.0), places=14
        )

    def test_scaling_shift(self) -> None:
        for kind in (F, FTILDE):
            base = zprime0_axial(kind, 1.0, 2.0).value_at_0_derivative
            scaled = zprime0_axial(kind, 2.0, 4.0).value_at_0_derivative
            self.assertAlmostEqual(scaled - base, -math.log(2.0), places=13)

    def test_large_lambda_expansion(self) -> None:
        for kind in (F, FTILDE):
            lam = -1e4
            exact = log_gamma_axial(kind, 1.0, 2.0, lam)
            expansion = large_lambda_expansion(kind, 1.0, 2.0, lam)
            self.assertAlmostEqual(exact, expansion.value, delta=5e-3)
            self.assertEqual(expansion.zeta_at_0, -0.5)

    def test_oracle_extrapolates_half_and_full_tables(self) -> None:
        closed = zprime0_axial(F, 1.0, 2.0).value_at_0_derivative
        table = find_zeros(F, 0.0, 1.0, 2.0, K=200, workers=2)
        value, estimate = continuation_oracle(table)
        self.assertGreater(estimate, 0.0)
        self.assertLessEqual(abs(value - closed), estimate + 1e-12)
        half = ZeroTable(F, 0.0, 1.0, 2.0, table.zeros[:100], table.tol)
        half_value, _ = continuation_oracle(half)
        self.assertLess(abs(value - closed), abs(half_value - closed))

    def test_oracle_strict_mode(self) -> None:
        with self.assertRaises(OracleConvergenceError):
            zprime0_axial(
                F,
                1.0,
                2.0,
                ZetaMethod.CONTINUATION_ORACLE,
                K=50,
                error=1e-14,
                strict=True,
            )


@pytest.mark.parametrize("kind", [F, FTILDE])
def test_oracle_matches_closed_form(kind: CrossProductKind) -> None:
    closed = zprime0_axial(kind, 1.0, 2.0)
    oracle = zprime0_axial(kind, 1.0, 2.0, ZetaMethod.CONTINUATION_ORACLE, K=10_000)
    assert oracle.error_estimate <= 1e-5
    assert abs(oracle.value_at_0_derivative - closed.value_at_0_derivative) < 1e-5


class DoubleSeriesTest(unittest.TestCase):
    def test_values_at_nu_two(self) -> None:
        terms = double_series_terms(2.0, 1.0, 2.0)
        self.assertAlmostEqual(terms.a00, 0.5 * math.log(2.0), places=15)
        self.assertAlmostEqual(terms.a01, 0.5, places=15)
        self.assertAlmostEqual(terms.a01_prime, math.log(math.pi), places=14)
        phi = phi_terms(1.0, 2.0, -1.0, 0.25)
        u_finite_part = (np.euler_gamma - math.log(2.0)) / 2.0
        self.assertAlmostEqual(
            terms.phi_contribution,
            0.5 * (phi.finite_part / 4.0 + phi.residue * u_finite_part),
            places=15,
        )
        self.assertEqual(terms.phi_contribution, 0.0)
        self.assertAlmostEqual(
            terms.difference, -0.5 * math.log(2.0) - math.log(math.pi), places=14
        )

    def test_mpmath_terms_at_origin(self) -> None:
        self.assertAlmostEqual(double_series_a01(2.0, 0.0), -ZETA_R_AT_0, places=14)
        self.assertAlmostEqual(
            double_series_a00(2.0, 1.0, 2.0, 0.0), 0.5 * math.log(2.0), places=14
        )
        h = 1e-6
        slope = (double_series_a01(2.0, h) - double_series_a01(2.0, -h)) / (2 * h)
        self.assertAlmostEqual(
            slope, double_series_terms(2.0, 1.0, 2.0).a01_prime, places=6
        )

    def test_rejects_small_nu(self) -> None:
        with self.assertRaises(SpectralError):
            double_series_terms(0.5, 1.0, 2.0)

    def test_riemann_constants(self) -> None:
        self.assertEqual(ZETA_R_AT_0, -0.5)
        self.assertAlmostEqual(
            ZETA_R_PRIME_AT_0, float(mpmath.zeta(0, derivative=1)), places=15
        )


class PhiTest(unittest.TestCase):
    def test_phi1_vanishes_at_origin(self) -> None:
        self.assertAlmostEqual(phi1(1.0, 2.0, -1e-12), 0.0, places=10)
        with self.assertRaises(SpectralError):
            phi1(1.0, 2.0, 0.5)

    def test_big_phi_is_order_s(self) -> None:
        terms = phi_terms(1.0, 2.0, -1.0, 0.25)
        self.assertEqual(big_phi1(1.0, 2.0, 0.0), 0.0)
        self.assertEqual((terms.residue, terms.finite_part), (0.0, 0.0))
        self.assertAlmostEqual(terms.measured_slope, -2.0 * math.log(2.0), places=5)

    def test_laurent_data_matches_closed_form_near_origin(self) -> None:
        for l1, l2 in ((1.0, 2.0), (0.3, 5.0)):
            terms = phi_terms(l1, l2, -1.0, 0.25)
            h = 1e-4
            left, right = big_phi1(l1, l2, -h), big_phi1(l1, l2, h)
            self.assertAlmostEqual(h * right, terms.residue, places=3)
            self.assertAlmostEqual(0.5 * (left + right), terms.finite_part, places=6)

    def test_mellin_quadrature(self) -> None:
        for s in (0.25, 0.6):
            closed = big_phi1(1.0, 2.0, s)
            numeric = mellin_phi_quadrature(1.0, 2.0, s)
            self.assertLess(abs(numeric / closed - 1.0), 1e-6)
        with self.assertRaises(SpectralError):
            mellin_phi_quadrature(1.0, 2.0, 0.0)


@pytest.mark.parametrize("nu", [1.0, 2.0])
def test_uniform_residual_is_second_order(nu: float) -> None:
    scaled = [
        uniform_expansion_residual(n, nu, 1.0, 2.0, -1.0) * n * n for n in (10, 20, 40)
    ]
    for a, b in zip(scaled, scaled[1:]):
        assert 1 / 1.5 <= abs(b / a) <= 1.5


def test_uniform_residual_without_phi_is_first_order() -> None:
    r20, r40 = (
        uniform_expansion_residual(n, 1.0, 1.0, 2.0, -0.25, include_phi=False)
        for n in (20, 40)
    )
    assert 0.4 <= r40 / r20 <= 0.6


class TorsionZetaTest(unittest.TestCase):
    def test_spectrum_descriptor(self) -> None:
        descriptor = spectrum_descriptor(1, BoundaryCondition.ABS)
        families = {f.family: f.multiplicity for f in descriptor}
        self.assertEqual(families[ZeroFamily.A_NU], 2)
        self.assertEqual(families[ZeroFamily.ATILDE_0], 1)
        rel = spectrum_descriptor(0, BoundaryCondition.REL)
        self.assertEqual({f.family for f in rel}, {ZeroFamily.A_NU, ZeroFamily.A_0})
        with self.assertRaises(SpectralError):
            spectrum_descriptor(3, BoundaryCondition.ABS)

    def test_coefficients_reduce_to_difference(self) -> None:
        coefficients = torsion_zeta_coefficients(BoundaryCondition.ABS)
        self.assertEqual(coefficients[ZeroFamily.A_NU], Fraction(1))
        self.assertEqual(coefficients[ZeroFamily.ATILDE_NU], Fraction(-1))
        self.assertEqual(coefficients[ZeroFamily.A_0], Fraction(1, 2))
        self.assertEqual(coefficients[ZeroFamily.ATILDE_0], Fraction(-1, 2))
        rel = torsion_zeta_coefficients(BoundaryCondition.REL)
        self.assertTrue(all(rel[f] == -coefficients[f] for f in ZeroFamily))

    def test_closed_form_assembly(self) -> None:
        for nu in (1.0, 2.0, 3.5):
            for l1, l2 in ((1.0, 2.0), (0.5, 3.0), (0.01, 1.0)):
                assembled = torsion_zeta_log(nu, l1, l2)
                self.assertAlmostEqual(
                    assembled, analytic_torsion_closed_form(nu, l1, l2), delta=1e-14
                )


def test_semi_numeric_matches_closed_form() -> None:
    semi = torsion_zeta_evaluation(2.0, 1.0, 2.0, ZetaMethod.CONTINUATION_ORACLE)
    closed = analytic_torsion_closed_form(2.0, 1.0, 2.0)
    assert semi.sequence == "t_abs"
    assert abs(semi.value_at_0_derivative - closed) < 1e-4
