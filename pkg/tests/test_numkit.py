"""Tests for the complex numerical kernels, checked against independent oracles."""

import cmath

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from gsdsce.errors import (
    DegeneratePolynomialError,
    DimensionError,
    InsufficientSamplesError,
    RankDeficiencyError,
)
from gsdsce.numkit import (
    ComplexPolynomial,
    det_complex,
    geometric_dispersion,
    is_geometric,
    poly_roots,
    solve_least_squares,
)


def cofactor_det(m):
    """Independent oracle: recursive cofactor expansion along the first row."""
    m = np.asarray(m, dtype=complex)
    n = m.shape[0]
    if n == 1:
        return m[0, 0]
    total = 0j
    for j in range(n):
        minor = np.delete(np.delete(m, 0, axis=0), j, axis=1)
        total += (-1) ** j * m[0, j] * cofactor_det(minor)
    return total


def permutation_matrix(perm):
    n = len(perm)
    m = np.zeros((n, n), dtype=complex)
    for i, j in enumerate(perm):
        m[i, j] = 1.0
    return m


def permutation_sign(perm):
    sign = 1
    seen = [False] * len(perm)
    for start in range(len(perm)):
        if seen[start]:
            continue
        length = 0
        j = start
        while not seen[j]:
            seen[j] = True
            j = perm[j]
            length += 1
        if length % 2 == 0:
            sign = -sign
    return sign


finite_complex = st.builds(
    complex,
    st.floats(-3, 3, allow_nan=False, allow_infinity=False),
    st.floats(-3, 3, allow_nan=False, allow_infinity=False),
)


class TestDetComplex:
    def test_identity(self):
        assert det_complex(np.eye(2)) == 1 + 0j

    def test_single_row_swap(self):
        assert det_complex([[0, 1], [1, 0]]) == -1 + 0j

    def test_seeded_3x3_matches_cofactor_oracle(self):
        rng = np.random.default_rng(101)
        m = rng.standard_normal((3, 3)) + 1j * rng.standard_normal((3, 3))
        expected = cofactor_det(m)
        assert abs(det_complex(m) - expected) <= 1e-12 * abs(expected)

    def test_1x1(self):
        assert det_complex([[3 - 2j]]) == 3 - 2j

    def test_singular_matrix_is_zero(self):
        assert det_complex([[1, 2], [2, 4]]) == 0j

    def test_non_square_raises(self):
        with pytest.raises(DimensionError):
            det_complex(np.ones((2, 3)))

    def test_empty_raises(self):
        with pytest.raises(DimensionError):
            det_complex(np.empty((0, 0)))

    def test_non_finite_raises(self):
        with pytest.raises(ValueError):
            det_complex([[np.inf, 0], [0, 1]])

    @pytest.mark.parametrize("perm", [(1, 0), (2, 0, 1), (0, 2, 1, 3), (3, 1, 0, 2)])
    def test_permutation_matrix_det_is_exact_sign(self, perm):
        assert det_complex(permutation_matrix(perm)) == permutation_sign(perm)

    @given(
        n=st.integers(2, 4),
        c=finite_complex.filter(lambda z: abs(z) > 0.1),
        seed=st.integers(0, 2**32 - 1),
    )
    @settings(max_examples=100, deadline=None)
    def test_scaling_property(self, n, c, seed):
        rng = np.random.default_rng(seed)
        m = rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))
        base = det_complex(m)
        scaled = det_complex(c * m)
        expected = c**n * base
        assert abs(scaled - expected) <= 1e-10 * max(abs(expected), 1e-12)


class TestPolyRoots:
    def test_difference_of_squares(self):
        roots = sorted(poly_roots([1, 0, -1]), key=lambda z: z.real)
        assert roots[0] == pytest.approx(-1)
        assert roots[1] == pytest.approx(1)

    def test_factored_quadratic(self):
        roots = sorted(poly_roots([1, -5, 6]), key=lambda z: z.real)
        assert roots[0] == pytest.approx(2)
        assert roots[1] == pytest.approx(3)

    def test_degree_four_unit_circle(self):
        rng = np.random.default_rng(7)
        thetas = np.sort(rng.uniform(-np.pi, np.pi, 4))
        true_roots = np.exp(1j * thetas)
        coeffs = np.array([1.0 + 0j])
        for r in true_roots:
            coeffs = np.convolve(coeffs, [1.0, -r])
        found = poly_roots(coeffs)
        for r in true_roots:
            assert min(abs(found - r)) < 1e-10

    def test_linear(self):
        (root,) = poly_roots([2.0, -1.0 + 1.0j])
        assert root == pytest.approx((1 - 1j) / 2)

    def test_residuals_are_small(self):
        p = ComplexPolynomial([1, 2 - 1j, -3, 0.5j])
        roots = poly_roots(p)
        assert np.all(np.abs(p(roots)) < 1e-9 * np.max(np.abs(p.coefficients)))

    def test_degenerate_leading_coefficient(self):
        with pytest.raises(DegeneratePolynomialError):
            poly_roots([1e-16, 1.0, 1.0])

    def test_degree_zero_rejected(self):
        with pytest.raises(DegeneratePolynomialError):
            poly_roots([1.0])

    @given(
        roots=st.lists(
            finite_complex.filter(lambda z: abs(z) < 2.5), min_size=1, max_size=5
        ).filter(
            # Multiple or clustered roots are intrinsically ill-conditioned
            # (cluster accuracy degrades to eps**(1/m)); the pipeline's
            # polynomials have separated roots, so the tolerance is only
            # claimed there.
            lambda rs: all(
                abs(a - b) > 0.25 for i, a in enumerate(rs) for b in rs[i + 1 :]
            )
        ),
        scale=finite_complex.filter(lambda z: abs(z) > 0.2),
    )
    @settings(max_examples=150, deadline=None)
    def test_vieta_sum_and_product(self, roots, scale):
        coeffs = np.array([1.0 + 0j])
        for r in roots:
            coeffs = np.convolve(coeffs, [1.0, -r])
        coeffs = coeffs * scale
        found = poly_roots(coeffs)
        n = len(roots)
        magnitude = 1.0 + sum(abs(r) for r in roots)
        assert abs(found.sum() - (-coeffs[1] / coeffs[0])) <= 1e-8 * magnitude
        product_scale = 1.0 + abs(np.prod([abs(r) for r in roots]))
        assert abs(found.prod() - (-1) ** n * coeffs[n] / coeffs[0]) <= 1e-8 * product_scale


class TestLeastSquares:
    def test_identity_system(self):
        x = solve_least_squares(np.eye(3), [1, 1j, -1])
        assert np.allclose(x, [1, 1j, -1], atol=1e-14)

    def test_consistent_overdetermined(self):
        rng = np.random.default_rng(23)
        a = rng.standard_normal((8, 3)) + 1j * rng.standard_normal((8, 3))
        x0 = rng.standard_normal(3) + 1j * rng.standard_normal(3)
        x = solve_least_squares(a, a @ x0)
        assert np.max(np.abs(x - x0)) < 1e-10 * max(1.0, np.max(np.abs(x0)))

    def test_vandermonde_forward_synthesis(self):
        ratios = np.array([1.0 + 0j, -1.0 + 0j])
        initial = np.array([2.0 + 0j, 3.0j])
        v = ratios[None, :] ** np.arange(6)[:, None]
        x = solve_least_squares(v, v @ initial)
        assert np.max(np.abs(x - initial)) < 1e-10

    def test_rank_deficient_reports_effective_rank(self):
        a = np.ones((4, 2), dtype=complex)
        with pytest.raises(RankDeficiencyError) as excinfo:
            solve_least_squares(a, np.ones(4))
        assert excinfo.value.effective_rank == 1

    def test_underdetermined_rejected(self):
        with pytest.raises(DimensionError):
            solve_least_squares(np.ones((2, 3)), np.ones(2))

    @given(seed=st.integers(0, 2**32 - 1), rows=st.integers(3, 9), cols=st.integers(1, 3))
    @settings(max_examples=100, deadline=None)
    def test_residual_orthogonal_to_column_space(self, seed, rows, cols):
        rng = np.random.default_rng(seed)
        if rows < cols:
            rows, cols = cols, rows
        a = rng.standard_normal((rows, cols)) + 1j * rng.standard_normal((rows, cols))
        b = rng.standard_normal(rows) + 1j * rng.standard_normal(rows)
        reference = np.linalg.norm(a.conj().T @ b)
        if reference < 1e-6:
            return
        x = solve_least_squares(a, b)
        assert np.linalg.norm(a.conj().T @ (a @ x - b)) < 1e-8 * reference


class TestIsGeometric:
    def test_ratio_two_progression(self):
        assert is_geometric([1, 2, 4, 8])

    def test_arithmetic_progression(self):
        assert not is_geometric([1, 2, 3, 4])

    def test_all_zero_fails_nonzero_requirement(self):
        assert not is_geometric([0, 0, 0])

    def test_short_sequence_rejected(self):
        with pytest.raises(InsufficientSamplesError):
            is_geometric([1, 2])

    def test_complex_ratio(self):
        r = cmath.exp(-0.7j)
        assert is_geometric([r**k for k in range(6)])

    def test_near_zero_entry_rejected(self):
        assert not is_geometric([1.0, 1e-12, 1.0, 1.0])

    def test_dispersion_of_exact_progression_is_zero(self):
        assert geometric_dispersion([3, 6, 12, 24]) == 0.0

    @given(
        ratio=finite_complex.filter(lambda z: 0.5 < abs(z) < 2),
        scale=finite_complex.filter(lambda z: abs(z) > 0.3),
        perturb=st.booleans(),
        length=st.integers(3, 10),
    )
    @settings(max_examples=150, deadline=None)
    def test_invariant_under_global_scaling(self, ratio, scale, perturb, length):
        seq = np.array([ratio**k for k in range(length)], dtype=complex)
        if perturb:
            seq[length // 2] *= 1.001  # clearly non-geometric
        assert is_geometric(seq) == is_geometric(scale * seq)


class TestComplexPolynomial:
    def test_degree_and_evaluation(self):
        p = ComplexPolynomial([2, 0, -1])
        assert p.degree == 2
        assert p(3.0) == pytest.approx(17.0)
        assert p(1j) == pytest.approx(-3 + 0j)

    def test_empty_rejected(self):
        with pytest.raises(DegeneratePolynomialError):
            ComplexPolynomial([])

    def test_negligible_leading_coefficient_rejected(self):
        with pytest.raises(DegeneratePolynomialError):
            ComplexPolynomial([1e-15, 1.0])
