"""Core solver tests against hand-derived and power-series oracles.

Hand-verified 2x2 case used throughout:

    A = [[0.2, 0.3],      I - A = [[0.8, -0.3],     det(I - A) = 0.6
         [0.4, 0.1]]               [-0.4, 0.9]]

    L = (I - A)^-1 = (1/0.6) [[0.9, 0.3],  = [[1.5,     0.5    ],
                              [0.4, 0.8]]     [0.66667, 1.33333]]

    y = [10, 5]  ->  q = L y = [17.5, 40/3]
    s = [0.5, 1.0]  ->  footprint = 0.5*17.5 + 40/3 = 66.25/3 = 22.08333...

    Eigenvalues of A solve l^2 - 0.3 l - 0.1 = 0 -> l = 0.5, -0.2.
"""

import numpy as np
import pytest

from _oracles import power_series_solve, random_productive_matrix, relative_error
from mrio_footprint import algebra
from mrio_footprint.errors import DimensionMismatch, NegativeEntry, UnproductiveEconomy

A_HAND = np.array([[0.2, 0.3], [0.4, 0.1]])
L_HAND = np.array([[1.5, 0.5], [2.0 / 3.0, 4.0 / 3.0]])
Y_HAND = np.array([10.0, 5.0])
Q_HAND = np.array([17.5, 40.0 / 3.0])
S_HAND = np.array([0.5, 1.0])
FOOTPRINT_HAND = 66.25 / 3.0


def coeffs(matrix) -> algebra.TechnicalCoefficients:
    matrix = np.asarray(matrix, dtype=float)
    return algebra.TechnicalCoefficients(entries=matrix, dim=matrix.shape[0])


class TestTechnicalCoefficients:
    def test_zero_transactions(self):
        A = algebra.technical_coefficients(np.zeros((2, 2)), np.array([100.0, 100.0]))
        np.testing.assert_array_equal(A.entries, np.zeros((2, 2)))

    def test_hand_division(self):
        A = algebra.technical_coefficients(
            np.array([[20.0, 30.0], [40.0, 10.0]]), np.array([100.0, 100.0]))
        np.testing.assert_allclose(A.entries, A_HAND, rtol=0, atol=1e-15)

    def test_zero_output_column_zeroed(self):
        A = algebra.technical_coefficients(
            np.array([[0.0, 5.0], [0.0, 5.0]]), np.array([0.0, 10.0]))
        np.testing.assert_array_equal(A.entries, np.array([[0.0, 0.5], [0.0, 0.5]]))

    def test_dimension_mismatch(self):
        with pytest.raises(DimensionMismatch):
            algebra.technical_coefficients(np.zeros((2, 2)), np.array([1.0, 2.0, 3.0]))
        with pytest.raises(DimensionMismatch):
            algebra.technical_coefficients(np.zeros((2, 3)), np.array([1.0, 2.0]))

    def test_negative_entry(self):
        with pytest.raises(NegativeEntry):
            algebra.technical_coefficients(
                np.array([[1.0, -2.0], [0.0, 1.0]]), np.array([10.0, 10.0]))
        with pytest.raises(NegativeEntry):
            algebra.technical_coefficients(np.zeros((2, 2)), np.array([-1.0, 1.0]))

    def test_column_sum_violations_reported(self):
        A = algebra.technical_coefficients(
            np.array([[60.0, 0.0], [50.0, 0.0]]), np.array([100.0, 100.0]))
        assert A.column_sum_violations == (0,)


class TestLeontiefSolve:
    def test_identity_economy(self):
        q = algebra.leontief_solve(coeffs(np.zeros((2, 2))), Y_HAND)
        np.testing.assert_allclose(q, Y_HAND, rtol=0, atol=0)

    def test_hand_2x2(self):
        q = algebra.leontief_solve(coeffs(A_HAND), Y_HAND)
        np.testing.assert_allclose(q, Q_HAND, rtol=1e-12)

    def test_matches_power_series(self, rng):
        for _ in range(20):
            n = int(rng.integers(2, 12))
            A = random_productive_matrix(rng, n)
            y = rng.uniform(0.0, 10.0, size=n)
            q = algebra.leontief_solve(coeffs(A), y)
            assert relative_error(q, power_series_solve(A, y)) <= 1e-6

    def test_output_covers_demand(self, rng):
        A = random_productive_matrix(rng, 8)
        y = rng.uniform(0.0, 5.0, size=8)
        q = algebra.leontief_solve(coeffs(A), y)
        assert np.all(q >= y - 1e-12)

    def test_linearity(self, rng):
        A = coeffs(random_productive_matrix(rng, 6))
        op = algebra.factorize(A)
        y1 = rng.uniform(0.0, 5.0, size=6)
        y2 = rng.uniform(0.0, 5.0, size=6)
        alpha, beta = 0.7, 2.5
        combined = op.apply(alpha * y1 + beta * y2)
        separate = alpha * op.apply(y1) + beta * op.apply(y2)
        np.testing.assert_allclose(combined, separate, rtol=1e-9)

    def test_monotonicity(self, rng):
        A = coeffs(random_productive_matrix(rng, 6))
        op = algebra.factorize(A)
        y = rng.uniform(0.0, 5.0, size=6)
        q = op.apply(y)
        for i in range(6):
            bumped = y.copy()
            bumped[i] += 1.0
            assert np.all(op.apply(bumped) >= q - 1e-12)

    def test_unproductive_singular(self):
        with pytest.raises(UnproductiveEconomy):
            algebra.leontief_solve(coeffs(np.eye(2)), Y_HAND)

    def test_unproductive_negative_output(self):
        # (I - A) is invertible here but the economy consumes more than it
        # produces; the demand-coverage check must catch it.
        with pytest.raises(UnproductiveEconomy):
            algebra.leontief_solve(coeffs(np.array([[2.0]])), np.array([1.0]))


class TestLeontiefInverse:
    def test_identity(self):
        op = algebra.leontief_inverse(coeffs(np.zeros((3, 3))))
        np.testing.assert_allclose(op.matrix, np.eye(3), atol=1e-14)

    def test_hand_2x2(self):
        op = algebra.leontief_inverse(coeffs(A_HAND))
        np.testing.assert_allclose(op.matrix, L_HAND, rtol=1e-12)

    def test_defining_identity(self, rng):
        A = random_productive_matrix(rng, 7)
        op = algebra.leontief_inverse(coeffs(A))
        np.testing.assert_allclose(op.matrix, np.eye(7) + A @ op.matrix, atol=1e-9)

    def test_dominates_identity(self, rng):
        op = algebra.leontief_inverse(coeffs(random_productive_matrix(rng, 7)))
        assert np.all(op.matrix - np.eye(7) >= -1e-12)

    def test_modes_agree(self, rng):
        A = coeffs(random_productive_matrix(rng, 9))
        y = rng.uniform(0.0, 10.0, size=9)
        solved = algebra.factorize(A).apply(y)
        inverted = algebra.leontief_inverse(A).apply(y)
        np.testing.assert_allclose(solved, inverted, rtol=1e-8)

    def test_unproductive(self):
        with pytest.raises(UnproductiveEconomy):
            algebra.leontief_inverse(coeffs(np.eye(2)))

    def test_factorized_mode_has_no_matrix(self):
        op = algebra.factorize(coeffs(A_HAND))
        assert op.mode == algebra.MODE_FACTORIZED
        with pytest.raises(ValueError):
            _ = op.matrix


class TestIntensity:
    def test_elementwise_division(self):
        s = algebra.intensity(np.array([50.0, 100.0]), np.array([100.0, 100.0]))
        np.testing.assert_array_equal(s.values, S_HAND)

    def test_zero_extension(self):
        s = algebra.intensity(np.zeros(2), np.array([3.0, 4.0]))
        np.testing.assert_array_equal(s.values, np.zeros(2))

    def test_zero_output_guard(self):
        s = algebra.intensity(np.array([5.0, 5.0]), np.array([0.0, 10.0]))
        np.testing.assert_array_equal(s.values, np.array([0.0, 0.5]))

    def test_dimension_mismatch(self):
        with pytest.raises(DimensionMismatch):
            algebra.intensity(np.zeros(3), np.zeros(2))


class TestFootprint:
    def test_hand_total(self):
        assert algebra.footprint_total(S_HAND, Q_HAND) == pytest.approx(
            FOOTPRINT_HAND, abs=1e-12)

    def test_zero_intensity(self):
        assert algebra.footprint_total(np.zeros(2), Q_HAND) == 0.0

    def test_by_source_hand(self):
        np.testing.assert_allclose(
            algebra.footprint_by_source(S_HAND, Q_HAND),
            np.array([8.75, 40.0 / 3.0]), rtol=1e-15)

    def test_one_hot_intensity(self):
        by_source = algebra.footprint_by_source(np.array([0.0, 2.0]), Q_HAND)
        assert by_source[0] == 0.0 and by_source[1] == pytest.approx(80.0 / 3.0)

    def test_total_equals_sum_of_sources(self, rng):
        for _ in range(10):
            n = int(rng.integers(1, 30))
            s = rng.uniform(0.0, 3.0, size=n)
            q = rng.uniform(0.0, 100.0, size=n)
            total = algebra.footprint_total(s, q)
            np.testing.assert_allclose(
                total, algebra.footprint_by_source(s, q).sum(), rtol=1e-9)

    def test_dimension_mismatch(self):
        with pytest.raises(DimensionMismatch):
            algebra.footprint_total(np.zeros(3), np.zeros(2))


class TestProductivityCheck:
    def test_zero_matrix(self):
        estimate = algebra.productivity_check(np.zeros((4, 4)))
        assert estimate.spectral_radius == 0.0
        assert estimate.converged and estimate.productive

    def test_hand_2x2(self):
        estimate = algebra.productivity_check(coeffs(A_HAND))
        assert estimate.converged
        assert estimate.spectral_radius == pytest.approx(0.5, abs=1e-4)
        assert estimate.productive

    def test_identity_flagged_unproductive(self):
        estimate = algebra.productivity_check(np.eye(3))
        assert estimate.converged
        assert estimate.spectral_radius == pytest.approx(1.0, abs=1e-6)
        assert estimate.productive is False

    def test_non_convergence_reports_indeterminate(self):
        # Nearly equal eigenvalues converge slowly; a tight budget must
        # come back indeterminate with the best estimate, not raise.
        A = np.array([[0.5, 0.1], [0.1, 0.5001]])
        estimate = algebra.productivity_check(A, tol=1e-14, max_iterations=2)
        assert not estimate.converged
        assert estimate.productive is None
        assert 0.0 < estimate.spectral_radius < 1.0
