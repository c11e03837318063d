import numpy as np
import pytest

from slsinc import Potential, BoundaryCondition, SLProblem
from slsinc import ode
from slsinc.roots import locate_zeros


def const_problem(c, h=None, H=None, L=np.pi, M_x=32):
    pot = Potential.from_callable(lambda x: np.full_like(x, c, dtype=complex), L, M_x=M_x)
    left = BoundaryCondition.dirichlet() if h is None else BoundaryCondition.robin(h)
    right = BoundaryCondition.dirichlet() if H is None else BoundaryCondition.robin(H)
    return SLProblem(pot, left, right)


def exp_problem(h=None, H=None, L=np.pi):
    pot = Potential.from_callable(lambda x: np.exp(x), L, M_x=1024)
    left = BoundaryCondition.dirichlet() if h is None else BoundaryCondition.robin(h)
    right = BoundaryCondition.dirichlet() if H is None else BoundaryCondition.robin(H)
    return SLProblem(pot, left, right)


RHO = np.array([0.5, 1.0, 2.0, 7.3, 15.0, 1 + 0.5j, 3 - 0.2j, 0.1 + 2j])
# identities evaluated at x=L need solutions of moderate size: for strongly
# negative Re(rho^2) they reach ~1e5 and double-precision cancellation in the
# bilinear identities swamps any integrator accuracy
RHO_MILD = np.array([0.5, 1.0, 2.0, 7.3, 15.0, 1 + 0.5j, 3 - 0.2j])


def test_solution_matches_constant_q():
    c, h, H, L = 0.8 - 0.3j, 0.2 + 0.1j, -0.4j, np.pi
    prob = const_problem(c, h, H)
    mu = np.sqrt(RHO**2 - c)
    x = 1.1
    S, dS = ode.solution("S", prob, RHO, x)
    assert np.max(np.abs(S - np.sin(mu * x) / mu)) < 1e-10
    assert np.max(np.abs(dS - np.cos(mu * x))) < 1e-10
    phi, dphi = ode.solution("phi", prob, RHO, x)
    assert np.max(np.abs(phi - (np.cos(mu * x) + h * np.sin(mu * x) / mu))) < 1e-10
    psi, dpsi = ode.solution("psi", prob, RHO, x)
    s = L - x
    assert np.max(np.abs(psi - (np.cos(mu * s) + H * np.sin(mu * s) / mu))) < 1e-10
    T, dT = ode.solution("T", prob, RHO, x)
    assert np.max(np.abs(T - np.sin(mu * (x - L)) / mu)) < 1e-10
    assert np.max(np.abs(dT - np.cos(mu * s))) < 1e-9


def test_wronskian_is_minus_one():
    # S*phi' - S'*phi = -1 identically in x and rho. The absolute 1e-9 bar
    # needs solutions of moderate size, i.e. rho past the turning point of
    # q=e^x; below it the identity still holds relative to the product scale.
    prob = exp_problem(h=0.3 + 0.2j, H=1.0)
    osc = np.array([8.0, 9.5, 11.0, 15.0, 8 + 0.5j, 12 - 0.3j])
    for x in (0.4, 1.7, np.pi):
        S, dS = ode.solution("S", prob, osc, x)
        phi, dphi = ode.solution("phi", prob, osc, x)
        W = S * dphi - dS * phi
        assert np.max(np.abs(W + 1.0)) < 1e-9
    S, dS = ode.solution("S", prob, RHO, np.pi)
    phi, dphi = ode.solution("phi", prob, RHO, np.pi)
    W = S * dphi - dS * phi
    scale = 1.0 + np.abs(S * dphi) + np.abs(dS * phi)
    assert np.max(np.abs(W + 1.0) / scale) < 1e-11


def test_general_solution_identity():
    # psi(x) = (psi'(0) - h psi(0)) S(x) + psi(0) phi(x)
    prob = exp_problem(h=0.5 - 0.1j, H=0.7 + 0.3j)
    psi0, dpsi0 = ode.solution("psi", prob, RHO_MILD, 0.0)
    x = 2.0
    S, _ = ode.solution("S", prob, RHO_MILD, x)
    phi, _ = ode.solution("phi", prob, RHO_MILD, x)
    psi, _ = ode.solution("psi", prob, RHO_MILD, x)
    recon = (dpsi0 - prob.h * psi0) * S + psi0 * phi
    assert np.max(np.abs(psi - recon) / (1 + np.abs(psi))) < 1e-8


def test_char_delta_circ_equals_S_based_form():
    # psi(rho, 0) = S'(rho, L) + H * S(rho, L): two independent integrations
    # (left-to-right for S, right-to-left for psi) must agree.
    prob = exp_problem(H=0.7 + 0.3j)
    lhs = ode.char_delta_circ(prob, RHO_MILD)
    S, dS = ode.solution("S", prob, RHO_MILD, np.pi)
    rhs = dS + prob.H * S
    assert np.max(np.abs(lhs - rhs) / (1 + np.abs(rhs))) < 1e-8


def test_char_delta_zero_potential():
    # q=0, h=H=0: Delta = -rho*sin(rho L), Delta_circ = cos(rho L)
    prob = const_problem(0.0, h=0.0, H=0.0)
    rho = np.array([0.3, 1.3, 2.0 + 0.4j])
    d = ode.char_delta(prob, rho)
    assert np.max(np.abs(d - (-rho * np.sin(rho * np.pi)))) < 1e-10
    dc = ode.char_delta_circ(prob, rho)
    assert np.max(np.abs(dc - np.cos(rho * np.pi))) < 1e-10


def test_solution_on_grid_checkpoints():
    prob = exp_problem(h=0.1, H=0.9)
    xs = np.array([0.3, 1.1, 2.2, 3.0])
    for kind in ("S", "phi", "psi", "T"):
        yg, dyg = ode.solution_on_grid(kind, prob, RHO, xs)
        y1, dy1 = ode.solution(kind, prob, RHO, xs[2])
        assert np.max(np.abs(yg[2] - y1)) < 1e-9 * np.max(1 + np.abs(y1))
        assert np.max(np.abs(dyg[2] - dy1)) < 1e-9 * np.max(1 + np.abs(dy1))


def test_eigenvalues_zero_and_constant_dd():
    k = np.arange(1, 21)
    sp = ode.eigenvalues(const_problem(0.0), 20)
    assert np.max(np.abs(sp.rhos - k)) < 1e-10
    c = 2.7
    spc = ode.eigenvalues(const_problem(c), 20)
    assert np.max(np.abs(spc.rhos - np.sqrt(c + k**2))) < 1e-10


def test_eigenvalues_negative_lambda():
    spn = ode.eigenvalues(const_problem(-4.2), 4)
    lam = np.sort(spn.lambdas.real)
    k = np.arange(1, 5)
    assert np.max(np.abs(lam - (k**2 - 4.2))) < 1e-10
    assert spn.rhos[0].real == 0.0 and spn.rhos[0].imag > 0


def test_eigenvalues_complex_robin():
    c, h, H = 1.0 + 0.8j, 0.3 + 0.1j, -0.2 + 0.4j
    prob = const_problem(c, h, H, M_x=16)
    sp = ode.eigenvalues(prob, 6)

    def delta(rho):
        mu = np.sqrt(np.asarray(rho, complex)**2 - c)
        psi = np.cos(mu * np.pi) + H * np.sin(mu * np.pi) / mu
        dpsi = mu * np.sin(mu * np.pi) - H * np.cos(mu * np.pi)
        return h * psi - dpsi

    ref = np.sort_complex(locate_zeros(delta, 1e-6 - 2j, 9 + 2j, tol=1e-12))
    m = min(len(ref), len(sp.rhos))
    assert np.max(np.abs(sp.rhos[:m] - ref[:m])) < 1e-9


def test_eigenvalue_residuals_are_small():
    prob = exp_problem(h=0.4, H=0.2)
    sp = ode.eigenvalues(prob, 8)
    res = np.abs(ode.characteristic(prob, sp.rhos))
    assert np.max(res) < 1e-8


def test_phi_requires_left_robin():
    prob = exp_problem(H=0.5)  # Dirichlet left
    with pytest.raises(ValueError):
        ode.solution("phi", prob, RHO, 1.0)
    with pytest.raises(ValueError):
        ode.char_delta(prob, RHO)
