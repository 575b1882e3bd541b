import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from marchenko import (KernelCoefficients, SingularSystemError, build_kernel_matrix,
                       extract_potential, invert, marchenko_residual, solve_all,
                       solve_p_system, zeta)
from marchenko.solver import KernelMatrix, SolutionMatrix, assemble_p_system, zeta_bands


def hat(n, h, t):
    return np.maximum(0.0, 1.0 - np.abs(t / h - n))


def brute_zeta(n, m, p, h):
    """Simpson on every cell of [p h, (max+2) h]; the integrand is a quadratic per cell."""
    total = 0.0
    for i in range(p, max(n, m, p) + 2):
        a, b = i * h, (i + 1) * h
        t = np.array([a, 0.5 * (a + b), b])
        f = hat(n, h, t) * hat(m, h, t)
        total += (b - a) / 6 * (f[0] + 4 * f[1] + f[2])
    return total


def coeffs_from(values, h=0.1):
    values = np.asarray(values, dtype=float)
    return KernelCoefficients(h, (values.size - 1) // 4, values)


# ---------------------------------------------------------------------------
# zeta

def test_zeta_examples():
    h = 0.04
    assert zeta(5, 5, 3, h) == pytest.approx(2 * h / 3, abs=1e-17)
    assert zeta(5, 5, 5, h) == pytest.approx(h / 3, abs=1e-17)
    assert zeta(2, 5, 0, h) == 0
    assert zeta(4, 5, 4, h) == pytest.approx(h / 6, abs=1e-17)
    assert zeta(4, 5, 5, h) == 0


def test_zeta_matches_brute_force_cube():
    h = 0.04
    worst = max(abs(zeta(n, m, p, h) - brute_zeta(n, m, p, h))
                for n in range(11) for m in range(11) for p in range(11))
    assert worst <= 1e-12


@pytest.mark.parametrize("p", [0, 3, 7])
def test_bands_agree_with_scalar_formula(p):
    N, h = 7, 0.3
    lower, diag, upper = zeta_bands(p, N, h)
    for m in range(N + 1):
        assert diag[m] == zeta(m, m, p, h)
        assert lower[m] == (zeta(m - 1, m, p, h) if m >= 1 else 0.0)
        assert upper[m] == (zeta(m + 1, m, p, h) if m < N else 0.0)


@settings(max_examples=60)
@given(n=st.integers(0, 30), m=st.integers(0, 30), p=st.integers(0, 30))
def test_zeta_symmetric_in_hat_indices(n, m, p):
    assert zeta(n, m, p, 1.0) == zeta(m, n, p, 1.0)


# ---------------------------------------------------------------------------
# kernel matrix

def test_kernel_matrix_index_arithmetic():
    N = 3
    c = coeffs_from(np.arange(-2 * N, 2 * N + 1))   # F0[k] = k
    F = build_kernel_matrix(c).values
    assert F[2, 3] == 5
    assert F.shape == (N + 1, N + 1)


def test_kernel_matrix_is_hankel(model_coeffs):
    F = build_kernel_matrix(model_coeffs[0]).values
    np.testing.assert_array_equal(F, F.T)
    np.testing.assert_array_equal(F[1:, :-1], F[:-1, 1:])


def test_zero_coefficients_give_zero_everything():
    kernel, solution, potential = invert(coeffs_from(np.zeros(41)))
    assert not kernel.values.any()
    assert not solution.values.any()
    assert not potential.values.any()
    assert marchenko_residual(solution, kernel) == 0


# ---------------------------------------------------------------------------
# linear systems

def hand_solution(F, p, h):
    a = np.empty((2, 2))
    for j in range(2):
        for m in range(2):
            a[j, m] = (j == m) + sum(zeta(n, m, p, h) * F[n, j] for n in range(2))
    b = -F[p]
    det = a[0, 0] * a[1, 1] - a[0, 1] * a[1, 0]
    return np.array([(b[0] * a[1, 1] - a[0, 1] * b[1]) / det,
                     (a[0, 0] * b[1] - b[0] * a[1, 0]) / det])


def test_two_by_two_against_cramer():
    h = 0.5
    c = coeffs_from([0.0, 0.0, 0.8, -0.3, 0.45], h)
    kernel = build_kernel_matrix(c)
    solution = solve_all(kernel)
    for p in (0, 1):
        expected = hand_solution(kernel.values, p, h)
        np.testing.assert_allclose(solve_p_system(kernel, p), expected, atol=1e-12, rtol=0)
        np.testing.assert_allclose(solution.values[p], expected, atol=1e-12, rtol=0)


def test_singular_system_names_p():
    kernel = build_kernel_matrix(coeffs_from([0, 0, 0, 0, -3.0], h=1.0))
    solve_p_system(kernel, 0)
    with pytest.raises(SingularSystemError, match="p=1") as info:
        solve_all(kernel)
    assert info.value.index == 1


def test_assemble_rejects_out_of_range_p():
    kernel = build_kernel_matrix(coeffs_from(np.zeros(9)))
    with pytest.raises(ValueError):
        assemble_p_system(kernel, 3)


@settings(max_examples=15, deadline=None)
@given(seed=st.integers(0, 2**32 - 1), N=st.integers(2, 25), scale=st.floats(0.01, 3.0))
def test_residual_bound_for_random_kernels(seed, N, scale):
    values = scale * np.random.default_rng(seed).normal(size=4 * N + 1)
    kernel = build_kernel_matrix(coeffs_from(values, h=0.1))
    try:
        solution = solve_all(kernel)
    except SingularSystemError:
        return
    bound = 1e-9 * (1 + np.max(np.abs(kernel.values)))
    assert marchenko_residual(solution, kernel) <= bound


def test_model_residual_and_perturbation(model_coeffs):
    kernel = build_kernel_matrix(model_coeffs[0])
    solution = solve_all(kernel)
    assert marchenko_residual(solution, kernel) <= 1e-9 * (1 + np.max(np.abs(kernel.values)))
    bumped = solution.values.copy()
    bumped[10, 40] += 0.1
    assert marchenko_residual(SolutionMatrix(kernel.h, kernel.N, bumped), kernel) >= 0.01


def test_weak_kernel_is_first_born_term(model_coeffs):
    eps = 1e-6
    c = model_coeffs[0]
    kernel = build_kernel_matrix(KernelCoefficients(c.h, c.N, eps * c.values))
    solution = solve_all(kernel)
    scale = np.max(np.abs(kernel.values))
    assert np.max(np.abs(solution.values + kernel.values)) <= 1e-4 * scale


# ---------------------------------------------------------------------------
# potential

def test_constant_diagonal_has_no_potential():
    solution = SolutionMatrix(0.1, 4, np.eye(5) * 2.5)
    np.testing.assert_array_equal(extract_potential(solution).values, 0.0)


def test_potential_from_linear_diagonal():
    h = 0.1
    solution = SolutionMatrix(h, 4, np.diag(0.3 * h * np.arange(5)))
    potential = extract_potential(solution)
    np.testing.assert_allclose(potential.values, -0.6, atol=1e-12)
    np.testing.assert_allclose(potential.r, h * np.arange(5))


def test_potential_needs_three_points():
    with pytest.raises(ValueError):
        extract_potential(SolutionMatrix(0.1, 1, np.zeros((2, 2))))


def test_model_potential_values(model_coeffs):
    _, _, potential = invert(model_coeffs[0])
    assert potential.values.size == 101
    r = potential.r
    assert potential.values[np.isclose(r, 1.0)][0] == pytest.approx(-3 * np.exp(-1.5), abs=0.05)
    # the origin depends on S beyond q = 8, which the data do not carry
    assert potential.values[0] == pytest.approx(-3.0, abs=0.35)


@pytest.mark.slow
def test_origin_value_improves_with_wider_data(model_potential):
    from marchenko import ScatteringData, build_y_evaluator, recover_coefficients, s_matrix_table

    table = s_matrix_table(model_potential, 16 * np.arange(1, 81) / 80)
    y = build_y_evaluator(ScatteringData.from_table(table))
    _, _, potential = invert(recover_coefficients(y, 0.04, 100))
    assert potential.values[0] == pytest.approx(-3.0, abs=0.05)


def test_potential_csv(tmp_path):
    from marchenko import PotentialGrid

    PotentialGrid(0.5, np.array([1.0, 2.0, 3.0])).to_csv(tmp_path / "v.csv")
    assert (tmp_path / "v.csv").read_text().splitlines() == ["r,V", "0,1", "0.5,2", "1,3"]
