import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from slsinc import numeric
from slsinc.numeric import LinearSystem, solve_lstsq, differentiate, log_grid


def test_identity_system():
    sys = LinearSystem(np.eye(3), [1.0, 0.0, 0.0])
    x, res = solve_lstsq(sys)
    assert np.allclose(x, [1, 0, 0], atol=1e-14)
    assert res < 1e-14


def test_overdetermined_scalar():
    # [[1],[1]] x = [1,3]: normal equations give x=2, residual sqrt(2)
    x, res = solve_lstsq(LinearSystem([[1.0], [1.0]], [1.0, 3.0]))
    assert abs(x[0] - 2.0) < 1e-14
    assert abs(res - np.sqrt(2.0)) < 1e-14


def test_against_normal_equations_oracle():
    rng = np.random.default_rng(7)
    A = rng.standard_normal((30, 15)) + 1j * rng.standard_normal((30, 15))
    b = rng.standard_normal(30) + 1j * rng.standard_normal(30)
    x_oracle = np.linalg.solve(A.conj().T @ A, A.conj().T @ b)
    x, res = solve_lstsq(LinearSystem(A, b))
    assert np.max(np.abs(x - x_oracle)) < 1e-10
    assert abs(res - np.linalg.norm(A @ x_oracle - b)) < 1e-10


def test_residual_beats_random_candidates():
    rng = np.random.default_rng(11)
    A = rng.standard_normal((20, 6)) + 1j * rng.standard_normal((20, 6))
    b = rng.standard_normal(20) + 1j * rng.standard_normal(20)
    x, res = solve_lstsq(LinearSystem(A, b))
    for _ in range(100):
        cand = x + 1e-3 * (rng.standard_normal(6) + 1j * rng.standard_normal(6))
        assert res <= np.linalg.norm(A @ cand - b) + 1e-12


def test_equilibration_agrees_on_well_conditioned():
    rng = np.random.default_rng(3)
    A = rng.standard_normal((25, 8))
    b = rng.standard_normal(25)
    x, _ = solve_lstsq(LinearSystem(A, b))
    x_plain = np.linalg.lstsq(A, b, rcond=None)[0]
    assert np.max(np.abs(x - x_plain)) < 1e-8


def test_badly_scaled_columns():
    # one column 1e12 times the other; equilibration keeps both recoverable
    rng = np.random.default_rng(5)
    base = rng.standard_normal((40, 2))
    A = base * np.array([1e12, 1.0])
    coef = np.array([3e-12, 2.0])
    x, res = solve_lstsq(LinearSystem(A, A @ coef))
    assert np.max(np.abs(x - coef) / np.abs(coef)) < 1e-8
    assert res < 1e-6


def test_rank_zero_rejected():
    with pytest.raises(RuntimeError):
        solve_lstsq(LinearSystem(np.zeros((4, 2)), np.ones(4)))


def test_linear_system_validation():
    with pytest.raises(ValueError):
        LinearSystem(np.eye(2), [1.0])
    with pytest.raises(ValueError):
        LinearSystem([[np.inf, 0], [0, 1]], [1.0, 2.0])
    with pytest.raises(ValueError):
        LinearSystem(np.eye(2), [1.0, 2.0], column_labels=["a"])


def test_differentiate_square():
    x = np.linspace(0.0, 1.0, 41)
    d = differentiate(x ** 2, x[1] - x[0])
    assert np.max(np.abs(d - 2 * x)) < 1e-10


def test_differentiate_constant():
    d = differentiate(np.full(15, 4.2), 0.1)
    assert np.max(np.abs(d)) < 1e-12


def test_differentiate_sin_second():
    x = np.linspace(0.0, np.pi, 200)
    d2 = differentiate(np.sin(x), x[1] - x[0], order=2)
    assert np.max(np.abs(d2 + np.sin(x))) < 1e-6


def test_differentiate_complex():
    x = np.linspace(0.0, 2.0, 50)
    f = np.exp(1j * x)
    d = differentiate(f, x[1] - x[0])
    # degree-4 local fit of a smooth function: expect ~h^4 accuracy
    assert np.max(np.abs(d - 1j * f)) < 1e-5


@settings(deadline=None, max_examples=40)
@given(st.lists(st.floats(-3, 3), min_size=5, max_size=5), st.integers(1, 2))
def test_differentiate_exact_on_quartics(coeffs, order):
    x = np.linspace(-1.0, 1.5, 23)
    p = np.polynomial.Polynomial(coeffs)
    d = differentiate(p(x), x[1] - x[0], order=order)
    exact = p.deriv(order)(x)
    assert np.max(np.abs(d - exact)) <= 1e-9 * (1 + np.max(np.abs(exact)))


def test_differentiate_needs_nine_samples():
    with pytest.raises(ValueError):
        differentiate(np.zeros(8), 0.1)


def test_log_grid_decades():
    assert np.allclose(log_grid(1.0, 100.0, 3), [1.0, 10.0, 100.0])


def test_log_grid_long():
    g = log_grid(0.1, 1500.0, 700)
    assert abs(g[0] - 0.1) < 1e-12 and abs(g[-1] - 1500.0) < 1e-9
    ratios = g[1:] / g[:-1]
    assert np.max(np.abs(ratios - ratios[0])) < 1e-12


@settings(deadline=None, max_examples=40)
@given(st.floats(1e-3, 10.0), st.floats(1.1, 100.0), st.integers(2, 60))
def test_log_grid_strictly_increasing(a, factor, count):
    g = log_grid(a, a * factor, count)
    assert np.all(np.diff(g) > 0)


def test_log_grid_nudges_off_avoid_points():
    g0 = log_grid(1.0, 100.0, 3)
    g = log_grid(1.0, 100.0, 3, avoid=[10.0])
    assert abs(g0[1] - 10.0) < 1e-12          # would have collided
    assert abs(g[1] - 10.0) >= 1e-6           # nudged clear
    assert abs(g[1] - 10.0) < 1e-3            # but only barely
