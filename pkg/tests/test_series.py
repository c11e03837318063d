import numpy as np
import pytest
import scipy.special
from hypothesis import given, settings, strategies as st

from slsinc import ode, series
from slsinc.core import BoundaryCondition, Potential, SLProblem
from slsinc.series import CardinalRep, amplitude_bound, build_rep, j1, sinc, zj1


# ---------------------------------------------------------------------------
# elementary functions

def test_sinc_basics():
    assert sinc(0.0) == 1.0
    assert abs(sinc(0.5) - 2.0 / np.pi) < 1e-15
    ks = np.arange(1, 20)
    assert np.max(np.abs(sinc(ks))) < 1e-15
    assert np.max(np.abs(sinc(-ks))) < 1e-15


def test_sinc_matches_numpy_on_reals():
    t = np.linspace(-7.3, 7.3, 401)
    assert np.max(np.abs(sinc(t) - np.sinc(t))) < 1e-15


def test_sinc_taylor_branch_agrees_with_direct():
    # just inside the |pi z| < 1e-4 switch the Taylor value must match the
    # naive quotient to full precision
    for z in (1e-5, 3.18e-5 + 1e-5j, -2e-5j, 3.1e-5):
        w = np.pi * z
        assert abs(sinc(z) - np.sin(w) / w) < 1e-15


def test_j1_against_scipy():
    t = np.linspace(0.05, 30.0, 500)
    ref = scipy.special.spherical_jn(1, t)
    assert np.max(np.abs(j1(t) - ref)) < 1e-13
    assert j1(0.0) == 0.0
    assert abs(j1(np.pi) - 1.0 / np.pi) < 1e-15


def test_j1_identity_on_complex_ring():
    z = 5.0 * np.exp(1j * np.linspace(0, 2 * np.pi, 64, endpoint=False))
    direct = (np.sin(z) / z - np.cos(z)) / z
    assert np.max(np.abs(j1(z) - direct)) < 1e-13


def test_zj1_identity_and_small_z():
    # moderate z: compare against the literal difference
    z = np.array([0.7, 2.0 - 1.0j, -3.0 + 0.5j, 11.0])
    direct = np.sin(z) / z - np.cos(z)
    assert np.max(np.abs(zj1(z) - direct)) < 1e-13
    # tiny z: literal difference loses digits, Taylor must give z^2/3
    for z in (1e-7, 1e-7 * (1 + 1j)):
        assert abs(zj1(z) - z * z / 3.0) < 1e-20
    assert zj1(0.0) == 0.0


@given(st.floats(-20, 20), st.floats(-3, 3))
@settings(max_examples=80, deadline=None)
def test_zj1_stable_everywhere(re, im):
    z = complex(re, im)
    if abs(z) < 0.1:
        # deep Taylor region where the literal difference would cancel badly
        ref = z ** 2 / 3 - z ** 4 / 30 + z ** 6 / 840 - z ** 8 / 45360 \
            + z ** 10 / 3991680
        assert abs(zj1(z) - ref) <= 1e-12 * max(1.0, abs(ref))
    else:
        ref = np.sin(z) / z - np.cos(z)
        assert abs(zj1(z) - ref) <= 1e-12 * max(1.0, abs(ref))


def test_sin_over_rho_and_j1_scaled_at_zero():
    y = 1.7
    assert abs(series.sin_over_rho(0.0, y) - y) < 1e-15
    assert abs(series.j1_scaled(0.0, y) - y * y / 3.0) < 1e-15
    rho = 2.3 - 0.4j
    assert abs(series.sin_over_rho(rho, y) - np.sin(rho * y) / rho) < 1e-14
    assert abs(series.j1_scaled(rho, y) - y / rho * j1(rho * y)) < 1e-14


# ---------------------------------------------------------------------------
# the two sinc-pair basis families

def test_integer_pair_is_cardinal():
    # B_n(k pi / y; y) = delta_nk for k>=1, and 2*delta_n0 at rho=0
    y = 1.3
    ns = np.arange(6)
    rho = np.arange(6) * np.pi / y
    B = series.sinc_pair(rho, y, ns)
    expect = np.eye(6)
    expect[0, 0] = 2.0
    assert np.max(np.abs(B - expect)) < 1e-14


def test_half_pair_matches_literal_quotient():
    # F_n = -4 y cos(rho y) / (4 rho^2 y^2 - (2n+1)^2 pi^2) away from the
    # removable points
    rng = np.random.default_rng(5)
    y = 2.1
    ns = np.arange(8)
    rho = rng.uniform(0.3, 20.0, 40) + 1j * rng.uniform(-1.5, 1.5, 40)
    F = series.sinc_pair_half(rho, y, ns)
    m = (2 * ns[:, None] + 1).astype(float)
    literal = -4.0 * y * np.cos(rho[None, :] * y) \
        / (4.0 * rho[None, :] ** 2 * y ** 2 - m ** 2 * np.pi ** 2)
    assert np.max(np.abs(F - literal)) < 1e-12


def test_half_pair_removable_points():
    y = 2.1
    ns = np.arange(7)
    # at rho=0: 4y/(pi^2 (2n+1)^2)
    F0 = series.sinc_pair_half(np.array([0.0]), y, ns)[:, 0]
    m = 2 * ns + 1
    assert np.max(np.abs(F0 - 4.0 * y / (np.pi ** 2 * m ** 2))) < 1e-15
    # at its own sample point: (-1)^n y/((2n+1) pi), zero at the others
    pts = m * np.pi / (2.0 * y)
    F = series.sinc_pair_half(pts, y, ns)
    diag = (-1.0) ** ns * y / (m * np.pi)
    offdiag = F - np.diag(diag)
    assert np.max(np.abs(np.diag(F) - diag)) < 1e-15
    assert np.max(np.abs(offdiag)) < 1e-15


def test_half_pair_even_in_rho():
    y = 1.9
    ns = np.arange(5)
    for rho in (0.7 + 0.3j, 4.0, 2.5j, -1.2 + 2.0j):
        plus = series.sinc_pair_half(np.array([rho]), y, ns)
        minus = series.sinc_pair_half(np.array([-rho]), y, ns)
        assert np.max(np.abs(plus - minus)) < 1e-14


def test_pair_div_rho2_branches_agree():
    # the small-|rho| form of B_n/rho^2 must match the literal quotient on
    # both sides of the switch
    y = 1.6
    ns = np.arange(1, 6)
    for rho in (0.5 / y * 0.999, 0.5 / y * 1.001, 0.2, 0.05):
        C = series._pair_div_rho2(np.array([rho + 0j]), y, ns)[:, 0]
        literal = series.sinc_pair(np.array([rho + 0j]), y, ns)[:, 0] / rho ** 2
        assert np.max(np.abs(C - literal)) < 1e-12 * np.max(np.abs(literal))
    # rho = 0 limit: -2 (-1)^n y^2/(pi n)^2
    C0 = series._pair_div_rho2(np.array([0j]), y, ns)[:, 0]
    lim = -2.0 * (-1.0) ** ns * y ** 2 / (np.pi * ns) ** 2
    assert np.max(np.abs(C0 - lim)) < 1e-15


# ---------------------------------------------------------------------------
# representation construction and interpolation

L = np.pi
X_LEFT = 2.1
X_RIGHT = 1.3
N_INTERP = 9


@pytest.fixture(scope="module")
def complex_problem():
    pot = Potential.from_callable(lambda t: np.exp(t) + 0.4j * np.cos(2 * t), L)
    return SLProblem(pot, BoundaryCondition.robin(0.3 + 0.2j),
                     BoundaryCondition.robin(0.8 - 0.5j))


@pytest.mark.parametrize("kind", series.KINDS)
def test_interpolation_at_sample_points(kind, complex_problem):
    # the defining property: with exact coefficients the truncated series
    # reproduces the sampled solution values exactly at its own sample points
    x = X_LEFT if kind in series._LEFT else X_RIGHT
    rep = build_rep(kind, complex_problem, x, N_INTERP)
    pts = rep.sample_points()
    base, want_deriv = series._BASE_SOLUTION[kind]
    vals, dvals = ode.solution(base, complex_problem, pts.astype(complex), x)
    truth = dvals if want_deriv else vals
    got = rep.eval(pts.astype(complex))
    scale = np.max(np.abs(truth)) + 1.0
    assert np.max(np.abs(got - truth)) < 1e-12 * scale


def test_free_problem_coefficients_vanish():
    # q=0, h=0: S = sin(rho x)/rho and phi = cos(rho x) are pure heads
    pot = Potential(L, np.zeros(41))
    prob = SLProblem(pot, BoundaryCondition.robin(0.0),
                     BoundaryCondition.robin(0.0))
    s = build_rep("S_L2", prob, X_LEFT, 8)
    assert np.max(np.abs(s.coeffs)) < 1e-10
    p = build_rep("Phi_L2", prob, X_LEFT, 8)
    assert abs(p.coeffs[0] - 0.5) < 1e-10
    assert np.max(np.abs(p.coeffs[1:])) < 1e-10
    ps = build_rep("Psi_L2", prob, X_RIGHT, 8)
    assert abs(ps.coeffs[0] - 0.5) < 1e-10
    assert np.max(np.abs(ps.coeffs[1:])) < 1e-10
    # and the truncated S-series evaluates to sin(rho x)/rho everywhere
    rho = np.linspace(0.0, 12.0, 40) + 0.5j
    dev = s.eval(rho) - series.sin_over_rho(rho, X_LEFT)
    assert np.max(np.abs(dev)) < 1e-9


def test_constant_q_coefficient_oracle():
    # q = c: S(rho,x) = sin(mu x)/mu with mu = sqrt(rho^2-c), so the S_L2
    # coefficients have a closed form
    c = 1.5 - 0.7j
    pot = Potential(L, np.full(41, c))
    rep = build_rep("S_L2", pot, X_LEFT, 10)
    n = np.arange(10)
    rho_n = (2 * n + 1) * np.pi / (2 * X_LEFT)
    mu = np.sqrt(rho_n ** 2 - c)
    oracle = (-1.0) ** n * (2 * n + 1) * np.pi / X_LEFT \
        * np.sin(mu * X_LEFT) / mu - 2.0
    assert np.max(np.abs(rep.coeffs - oracle)) < 1e-10


@pytest.mark.parametrize("kind", series.KINDS)
def test_value_at_zero_is_the_limit(kind, complex_problem):
    # approaching rho=0 along the real axis reproduces eval(0) once the
    # truncation pole (S_W21/T_W21 only) is subtracted
    x = X_LEFT if kind in series._LEFT else X_RIGHT
    rep = build_rep(kind, complex_problem, x, 9)
    v0 = rep.eval(0.0)
    assert np.isfinite(v0)
    eps = 1e-5
    ve = rep.eval(eps) - rep.pole_residue() / eps ** 2
    assert abs(ve - v0) < 1e-8 * (1.0 + abs(v0))


def test_pole_residue_matches_evaluation(complex_problem):
    # the 1/rho^2 coefficient extracted from small-rho evaluations must agree
    # with pole_residue(), and it shrinks as the truncation grows
    eps = 1e-5
    sizes = (6, 12, 24)
    mags = []
    for kind, x in (("S_W21", X_LEFT), ("T_W21", X_RIGHT)):
        for N in sizes:
            rep = build_rep(kind, complex_problem, x, N)
            delta = rep.pole_residue()
            est = (rep.eval(eps) - rep.eval(0.0)) * eps ** 2
            assert abs(est - delta) < 1e-4 * abs(delta) + 1e-12
            if kind == "S_W21":
                mags.append(abs(delta))
    assert mags[0] > mags[1] > mags[2]


def test_small_rho_branch_matches_head_formula(complex_problem):
    # inside |rho x| < 0.5 the rearranged S_W21 evaluation must agree with
    # the literal head + series/rho^2 form computed directly
    rep = build_rep("S_W21", complex_problem, X_LEFT, 10)
    x = X_LEFT
    for rho in (0.12, 0.21 + 0.05j, 0.4 / x):
        rho = complex(rho)
        om = rep.leading["omega"]
        qp = rep.leading["q_plus"]
        F = series.sinc_pair_half(np.array([rho]), x, np.arange(10))[:, 0]
        literal = (np.sin(rho * x) / rho - om * np.cos(rho * x) / rho ** 2
                   + qp * np.sin(rho * x) / rho ** 3
                   - (rep.coeffs @ F) / rho ** 2)
        assert abs(rep.eval(rho) - literal) < 1e-10 * max(1.0, abs(literal))


@pytest.mark.parametrize("kind,x", [("S_L2", X_LEFT), ("S_W21", X_LEFT),
                                    ("Phi_W21", X_LEFT), ("dPsi", X_RIGHT)])
def test_truncation_error_decreases_with_n(kind, x, complex_problem):
    rho_t = np.linspace(5.0, 40.0, 23) + 0j
    base, want_deriv = series._BASE_SOLUTION[kind]
    vals, dvals = ode.solution(base, complex_problem, rho_t, x)
    truth = dvals if want_deriv else vals
    devs = []
    for N in (8, 16, 32):
        rep = build_rep(kind, complex_problem, x, N)
        devs.append(np.max(np.abs(rep.eval(rho_t) - truth)))
    assert devs[0] > devs[1] > devs[2]


def test_w21_tails_decay_faster_than_l2():
    # rough potential (integrated white noise): the residual of the W21 forms
    # at large rho falls like rho^-3 (S) and rho^-2 (phi); log-log slopes
    # fitted over rho in [25, 790] must sit in those bands
    rng = np.random.default_rng(42)
    M = 8192
    dq = rng.standard_normal(M + 1) + 1j * rng.standard_normal(M + 1)
    q = np.cumsum(dq) * np.sqrt(L / M)
    q = 2.0 * q / np.max(np.abs(q))
    pot = Potential(L, q)
    prob = SLProblem(pot, BoundaryCondition.robin(0.3),
                     BoundaryCondition.robin(-0.2))
    x, N = 2.0, 12
    ms = np.unique(np.geomspace(16, 500, 16).astype(int))

    rep = build_rep("S_W21", prob, x, N)
    rho_s = (2 * ms + 1) * np.pi / (2 * x)
    vs, _ = ode.solution("S", prob, rho_s.astype(complex), x)
    dev_s = np.abs(vs - rep.eval(rho_s.astype(complex)))
    slope_s = np.polyfit(np.log(rho_s), np.log(dev_s), 1)[0]
    assert -3.3 < slope_s < -2.7

    rep = build_rep("Phi_W21", prob, x, N)
    rho_p = ms * np.pi / x
    vp, _ = ode.solution("phi", prob, rho_p.astype(complex), x)
    dev_p = np.abs(vp - rep.eval(rho_p.astype(complex)))
    slope_p = np.polyfit(np.log(rho_p), np.log(dev_p), 1)[0]
    assert -2.3 < slope_p < -1.7


# ---------------------------------------------------------------------------
# coefficient-perturbation amplitude bound

def test_amplitude_bound_value_and_domain():
    # at x=pi the admissible range is (0, 1/sqrt(e)]
    limit = 1.0 / np.sqrt(np.e)
    amplitude_bound(limit, np.pi)
    with pytest.raises(ValueError):
        amplitude_bound(limit * 1.0001, np.pi)
    with pytest.raises(ValueError):
        amplitude_bound(0.0, np.pi)
    with pytest.raises(ValueError):
        amplitude_bound(-1e-3, np.pi)
    got = amplitude_bound(1e-3, np.pi)
    expect = 4.0 * (np.sqrt(3.0) * np.e + np.sqrt(2.0) * np.exp(0.25)) \
        * 1e-3 * np.log(1e3)
    assert abs(got - expect) < 1e-15
    # the strip factor is exp(C x)
    assert abs(amplitude_bound(1e-3, np.pi, C=0.4)
               - expect * np.exp(0.4 * np.pi)) < 1e-12


def test_amplitude_bound_dominates_random_perturbations():
    # perturb 40 series coefficients by at most eps and evaluate on the real
    # line and on a strip; the bound must dominate the worst deviation
    x = np.pi
    eps = 1e-3
    rng = np.random.default_rng(3)
    ns = np.arange(40)
    rho = np.linspace(0.0, 60.0, 1201) + 0j
    F = series.sinc_pair_half(rho, x, ns)
    bound = amplitude_bound(eps, x)
    for _ in range(25):
        d = eps * rng.uniform(-1.0, 1.0, 40)
        assert np.max(np.abs(d @ F)) <= bound
    C = 0.4
    F_strip = series.sinc_pair_half(rho + 1j * C, x, ns)
    bound_strip = amplitude_bound(eps, x, C=C)
    for _ in range(25):
        d = rng.uniform(-1.0, 1.0, 40) + 1j * rng.uniform(-1.0, 1.0, 40)
        d *= eps / np.maximum(np.abs(d), 1.0)
        assert np.max(np.abs(d @ F_strip)) <= bound_strip


# ---------------------------------------------------------------------------
# validation and guard rails

def test_w21_kinds_require_w21_regularity():
    pot = Potential(L, np.linspace(0, 1, 41), regularity="L2")
    prob = SLProblem(pot, BoundaryCondition.robin(0.0),
                     BoundaryCondition.robin(0.0))
    with pytest.raises(ValueError):
        build_rep("S_W21", prob, X_LEFT, 6)
    build_rep("S_L2", prob, X_LEFT, 6)   # L2 kinds are fine


def test_anchor_domain_checks(complex_problem):
    with pytest.raises(ValueError):
        build_rep("S_L2", complex_problem, 0.0, 6)
    with pytest.raises(ValueError):
        build_rep("T_L2", complex_problem, L, 6)
    build_rep("S_L2", complex_problem, L, 4)
    build_rep("T_L2", complex_problem, 0.0, 4)


def test_sample_points_refuse_absurd_frequencies():
    with pytest.raises(ValueError):
        series.sample_points("S_L2", 1e-7, L, 10)
    with pytest.raises(ValueError):
        series.sample_points("bogus", 1.0, L, 10)
    with pytest.raises(ValueError):
        series.sample_points("T_L2", L, L, 10)


def test_cardinal_rep_validation():
    with pytest.raises(ValueError):
        CardinalRep("nope", 1.0, L, [1.0])
    with pytest.raises(ValueError):
        CardinalRep("dS", 1.0, L, [1.0])          # missing omega
    with pytest.raises(ValueError):
        CardinalRep("S_L2", 1.0, L, [[1.0, 2.0]])  # not a vector
    rep = CardinalRep("dS", 1.0, L, [0.1, 0.2], leading={"omega": 0.5})
    with pytest.raises(ValueError):
        rep.coeffs[0] = 9.0


def test_robin_kinds_need_robin_data():
    pot = Potential(L, np.zeros(41))
    prob = SLProblem(pot, BoundaryCondition.dirichlet(),
                     BoundaryCondition.robin(0.0))
    with pytest.raises(ValueError):
        build_rep("dPhi", prob, X_LEFT, 6)
    prob2 = SLProblem(pot, BoundaryCondition.robin(0.0),
                      BoundaryCondition.dirichlet())
    with pytest.raises(ValueError):
        build_rep("Psi_W21", prob2, X_RIGHT, 6)
