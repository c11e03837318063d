"""Recovery of the potential and boundary constants from two spectra.

Two finite eigenvalue sets of the same equation -- {xi_k} with a Robin
condition y'(0) = h y(0) on the left, {mu_m} with y(0) = 0, both sharing
the right-end condition -- determine q, h and H.  The reconstruction runs
entirely through linear systems built on the cardinal representations:

    1.  fit psi_N(., 0) from {mu_m}                (same fit weyl uses)
    2.  fit h and psi'_N(., 0) from {xi_k}
    3.  for every interior grid point x, the solution identity
            psi(rho, x) = Delta(lambda) S(rho, x) + Delta_circ(lambda) phi(rho, x)
        becomes, after inserting the truncated series of all three
        solutions, one linear system per x whose unknowns are the local
        series data: the smooth flow fits omega_H(x), q_L^H(x), Psi_n(x),
        omega(x), q+(x), s_n(x), omega_h(x), q^h(x), Phi_n(x) (3N+6
        unknowns); the plain flow fits the three coefficient families
        psi_n(x), s_n(x), phi_n(x) (3N unknowns),
    4.  the same identity at x = L (where psi = 1) pins the endpoint
        data, including h a second time and the total omega,
    5.  scalars: H = omega_H - omega, and the endpoint potential values
            q(L) = 2(q+(L) + q^h(L) + omega^2 + h omega)
            q(0) = 2(q+(L) - q^h(L) - h omega),
    6.  the potential itself, by either differentiating the recovered
        omega(x) profile (q = 2 omega'), or pointwise from the fitted
        coefficients (q = 2(q+ + q^h + omega^2 + h omega)); the plain
        flow instead differentiates the first phi-coefficient twice
        (q = phi_0''/phi_0).

When one spectrum is too short, its characteristic fit (steps 1-2) can
first be milked for more eigenvalues: evaluating the step-3 systems at
(completed) Robin eigenvalues makes the Delta factor vanish, which drops
the S-related unknowns and leaves well-overdetermined systems with the
enlarged data as sample points.  invert_with_completion does exactly that.

The per-x systems are independent and solved through a thread pool.
"""

import warnings

import numpy as np
from scipy.integrate import cumulative_trapezoid

from . import completion, numeric, series, weyl
from ._parallel import parallel_map
from .core import Spectrum
from .numeric import LinearSystem, solve_lstsq

ALGORITHMS = ("W21", "L2")
RECOVERIES = ("op1_derivative", "op2_coefficients", "both")

# Relative singular-value cutoff of the per-x and endpoint solves.  These
# systems are solved raw (no column equilibration): every unknown is a
# local value of q-sized data, so when columns degenerate -- x near an
# interval end kills the x-side blocks, eigenvalue rows far above the fitted
# data turn whole row bands into noise -- the minimum-norm tie-break in
# natural units is the meaningful one and the cutoff absorbs the rest.
RCOND = 1e-8


class InverseConfig:
    """Knobs of the two-spectra inversion.

    N          truncation of the x-dependent series in the per-x systems
               (the spectrum fits of steps 1-2 clamp their own truncations
               to what the given data supports)
    x_grid     number of uniform interior samples of the recovered q
    rho_tilde  evaluation points of the per-x systems (default: 700
               log-spaced points on [0.1, 1500])
    rho_hat    evaluation points of the endpoint system (default: same)
    algorithm  "W21" -- series with the omega/q leading terms pulled out,
               recovery without or with one derivative; "L2" -- plain
               coefficient series, recovery by double differentiation
    recovery   "op1_derivative" (q = 2 omega'), "op2_coefficients"
               (pointwise formula), or "both" (ignored by "L2", which has
               the single phi_0''/phi_0 route)
    """

    def __init__(self, N=15, x_grid=100, rho_tilde=None, rho_hat=None,
                 algorithm="W21", recovery="both"):
        self.N = int(N)
        if self.N < 1:
            raise ValueError("N must be at least 1")
        self.x_grid = int(x_grid)
        if self.x_grid < 9:
            raise ValueError("x_grid must be at least 9 (the derivative "
                             "stencils need 9 samples)")
        if algorithm not in ALGORITHMS:
            raise ValueError("algorithm must be one of %s" % (ALGORITHMS,))
        if recovery not in RECOVERIES:
            raise ValueError("recovery must be one of %s" % (RECOVERIES,))
        self.algorithm = algorithm
        self.recovery = recovery
        if rho_tilde is None:
            rho_tilde = numeric.log_grid(0.1, 1500.0, 700)
        self.rho_tilde = np.asarray(rho_tilde, dtype=complex)
        self.rho_hat = self.rho_tilde if rho_hat is None \
            else np.asarray(rho_hat, dtype=complex)
        for name, grid in (("rho_tilde", self.rho_tilde),
                           ("rho_hat", self.rho_hat)):
            if grid.ndim != 1 or grid.size < 2:
                raise ValueError("%s must be a 1-d grid" % name)
            if np.min(np.abs(grid)) < completion.MIN_RHO:
                raise ValueError("%s contains points too close to zero"
                                 % name)
        if self.rho_tilde.size < self.unknowns_per_x():
            raise ValueError("need at least %d rho_tilde points for the "
                             "per-x systems" % self.unknowns_per_x())

    def unknowns_per_x(self):
        return 3 * self.N + 6 if self.algorithm == "W21" else 3 * self.N


class InverseResult:
    """Everything the inversion recovered.

    x               uniform grid on [0, L] including the endpoints
    q               dict of recovered potentials on that grid, keyed by
                    route: "derivative" and/or "coefficients" (smooth
                    flow), "phi0" (plain flow)
    h, H, omega     recovered boundary constants and omega = 1/2 int q
    omega_profile   recovered omega(x) on the grid
    residuals       per-interior-x least-squares residual
    flagged         boolean mask over interior points whose system failed
                    (their values are interpolated from the neighbours)
    q0, qL          endpoint potential values from the step-5 formulas
    h_step2         the h estimate of the spectrum fit (step 2), kept for
                    cross-checking against the endpoint-system h
    """

    def __init__(self, x, q, h, H, omega, omega_profile, residuals,
                 flagged, q0, qL, h_step2, config):
        self.x = x
        self.q = q
        self.h = h
        self.H = H
        self.omega = omega
        self.omega_profile = omega_profile
        self.residuals = residuals
        self.flagged = flagged
        self.q0 = q0
        self.qL = qL
        self.h_step2 = h_step2
        self.config = config

    def max_error(self, q_true):
        """Max abs error of each recovered potential against a callable."""
        truth = np.asarray(q_true(self.x), dtype=complex)
        return {name: float(np.max(np.abs(vals - truth)))
                for name, vals in self.q.items()}

    def __repr__(self):
        return "InverseResult(%s, h=%.4g%+.4gj, H=%.4g%+.4gj, routes=%s)" % (
            self.config.algorithm, self.h.real, self.h.imag,
            self.H.real, self.H.imag, sorted(self.q))


# ----------------------------------------------------------- system builders
#
# Each builder returns (matrix, rhs) for one value of x; D and P are the
# step-2 and step-1 characteristic fits evaluated on the same rho points,
# D = psi'_N(., 0) - h psi_N(., 0) (zero at Robin eigenvalues) and
# P = psi_N(., 0) (zero at Dirichlet eigenvalues).

def _interior_w21(rho, D, P, x, L, N):
    # columns: omega_H(x), q_L^H(x), Psi_1..Psi_N, omega(x), q+(x),
    #          s_0..s_{N-1}, omega_h(x), q^h(x), Phi_1..Phi_N
    y = L - x
    rho2 = rho * rho
    cols = [-series.sin_over_rho(rho, y), series.j1_scaled(rho, y)]
    cols.extend(series._pair_div_rho2(rho, y, np.arange(1, N + 1)))
    cols.append(-D * np.cos(rho * x) / rho2)
    cols.append(D * series.sin_over_rho(rho, x) / rho2)
    cols.extend(-(D / rho2) * series.sinc_pair_half(rho, x, np.arange(N)))
    cols.append(P * series.sin_over_rho(rho, x))
    cols.append(-P * series.j1_scaled(rho, x))
    cols.extend(-P * series._pair_div_rho2(rho, x, np.arange(1, N + 1)))
    rhs = np.cos(rho * y) - D * series.sin_over_rho(rho, x) \
        - P * np.cos(rho * x)
    return np.stack(cols, axis=1), rhs


def _interior_w21_reduced(rho, P, x, L, N):
    # rows sit on Robin eigenvalues, where D vanishes: the middle block
    # drops and only the psi- and phi-side unknowns remain
    y = L - x
    cols = [-series.sin_over_rho(rho, y), series.j1_scaled(rho, y)]
    cols.extend(series._pair_div_rho2(rho, y, np.arange(1, N + 1)))
    cols.append(P * series.sin_over_rho(rho, x))
    cols.append(-P * series.j1_scaled(rho, x))
    cols.extend(-P * series._pair_div_rho2(rho, x, np.arange(1, N + 1)))
    rhs = np.cos(rho * y) - P * np.cos(rho * x)
    return np.stack(cols, axis=1), rhs


def _endpoint_w21(rho, D, P, L, N):
    # columns: omega, q+(L), s_0..s_{N-1}(L), h, q^h(L), Phi_1..Phi_N(L);
    # omega_h = omega + h is substituted, so omega and h share the
    # phi-side column and omega alone keeps the S-side one
    rho2 = rho * rho
    sinL = series.sin_over_rho(rho, L)
    cosL = np.cos(rho * L)
    cols = [-D * cosL / rho2 + P * sinL, D * sinL / rho2]
    cols.extend(-(D / rho2) * series.sinc_pair_half(rho, L, np.arange(N)))
    cols.append(P * sinL)
    cols.append(-P * series.j1_scaled(rho, L))
    cols.extend(-P * series._pair_div_rho2(rho, L, np.arange(1, N + 1)))
    rhs = 1.0 - D * sinL - P * cosL
    return np.stack(cols, axis=1), rhs


def _interior_l2(rho, D, P, x, L, N):
    # columns: psi_0..psi_{N-1}, s_0..s_{N-1}, phi_0..phi_{N-1}
    y = L - x
    ns = np.arange(N)
    cols = list(series.sinc_pair(rho, y, ns))
    cols.extend(-D * series.sinc_pair_half(rho, x, ns))
    cols.extend(-P * series.sinc_pair(rho, x, ns))
    rhs = D * series.sin_over_rho(rho, x) - P * series.zj1(rho * x) \
        + series.zj1(rho * y)
    return np.stack(cols, axis=1), rhs


def _interior_l2_reduced(rho, P, x, L, N):
    y = L - x
    ns = np.arange(N)
    cols = list(series.sinc_pair(rho, y, ns))
    cols.extend(-P * series.sinc_pair(rho, x, ns))
    rhs = series.zj1(rho * y) - P * series.zj1(rho * x)
    return np.stack(cols, axis=1), rhs


def _endpoint_l2(rho, D, P, L, N):
    # columns: s_0..s_{N-1}(L), phi_0..phi_{N-1}(L)
    ns = np.arange(N)
    cols = list(D * series.sinc_pair_half(rho, L, ns))
    cols.extend(P * series.sinc_pair(rho, L, ns))
    rhs = 1.0 - D * series.sin_over_rho(rho, L) + P * series.zj1(rho * L)
    return np.stack(cols, axis=1), rhs


# ------------------------------------------------------- plain-series fits
#
# The smooth flow reuses weyl.fit_psi / weyl.fit_delta for steps 1-2; the
# plain flow fits the same two characteristic functions through the plain
# coefficient series, which have no omega_H head on the psi side, so the
# Delta fit carries h, omega_H and the coefficients all at once.

class _PsiSeriesL2:
    def __init__(self, coeffs, L, fit_points, residual):
        self.coeffs = np.asarray(coeffs, dtype=complex)
        self.N = self.coeffs.size
        self.L = float(L)
        self.fit_points = np.asarray(fit_points, dtype=complex)
        self.residual = float(residual)

    def eval(self, rho):
        rho = np.asarray(rho, dtype=complex)
        flat = np.atleast_1d(rho).ravel()
        out = -series.zj1(flat * self.L) \
            + self.coeffs @ series.sinc_pair(flat, self.L, np.arange(self.N))
        return out.reshape(rho.shape) if rho.shape else out[0]


class _DeltaSeriesL2:
    def __init__(self, psi_fit, h, omega_H, coeffs, fit_points, residual):
        self.psi = psi_fit
        self.L = psi_fit.L
        self.h = complex(h)
        self.omega_H = complex(omega_H)
        self.coeffs = np.asarray(coeffs, dtype=complex)
        self.N = self.coeffs.size
        self.fit_points = np.asarray(fit_points, dtype=complex)
        self.residual = float(residual)

    @property
    def unknowns(self):
        return np.concatenate([[self.h, self.omega_H], self.coeffs])

    def eval_dpsi(self, rho):
        rho = np.asarray(rho, dtype=complex)
        flat = np.atleast_1d(rho).ravel()
        out = flat * np.sin(flat * self.L) \
            + self.omega_H * series.zj1(flat * self.L) \
            + self.coeffs @ series.sinc_pair(flat, self.L,
                                             np.arange(self.N))
        return out.reshape(rho.shape) if rho.shape else out[0]

    def eval(self, rho):
        rho = np.asarray(rho, dtype=complex)
        flat = np.atleast_1d(rho).ravel()
        out = self.h * self.psi.eval(flat) - self.eval_dpsi(flat)
        return out.reshape(rho.shape) if rho.shape else out[0]


def _fit_psi_l2(spec_dirichlet, N, L):
    mu = np.asarray(spec_dirichlet.rhos if isinstance(spec_dirichlet,
                                                      Spectrum)
                    else spec_dirichlet, dtype=complex)
    N = min(int(N), mu.size)
    B = series.sinc_pair(mu, L, np.arange(N)).T
    coeffs, residual = solve_lstsq(LinearSystem(B, series.zj1(mu * L)))
    return _PsiSeriesL2(coeffs, L, mu, residual)


def _fit_delta_l2(spec_robin, psi_fit, N, L):
    xi = np.asarray(spec_robin.rhos if isinstance(spec_robin, Spectrum)
                    else spec_robin, dtype=complex)
    if np.min(np.abs(xi)) < completion.MIN_RHO:
        raise ValueError("eigenvalues too close to zero")
    N = min(int(N), xi.size - 2)
    if N < 1:
        raise ValueError("need at least 3 Robin eigenvalues")
    cols = np.concatenate(
        [psi_fit.eval(xi)[:, None], -series.zj1(xi * L)[:, None],
         -series.sinc_pair(xi, L, np.arange(N)).T], axis=1)
    u, residual = solve_lstsq(LinearSystem(cols, xi * np.sin(xi * L)))
    return _DeltaSeriesL2(psi_fit, u[0], u[1], u[2:], xi, residual)


# ------------------------------------------------------------ the solvers

def _try_solve(A, b):
    if not (np.all(np.isfinite(A)) and np.all(np.isfinite(b))):
        return None, np.nan, 0, False
    try:
        u, _, rank, _ = np.linalg.lstsq(A, b, rcond=RCOND)
    except np.linalg.LinAlgError:
        return None, np.nan, 0, False
    if rank == 0 or not np.all(np.isfinite(u)):
        return None, np.nan, 0, False
    return u, float(np.linalg.norm(A @ u - b)), int(rank), True


def _solve_interior(builder, x_interior, width, threads):
    sols = parallel_map(builder, x_interior, threads)
    U = np.zeros((x_interior.size, width), dtype=complex)
    residuals = np.full(x_interior.size, np.nan)
    ranks = np.zeros(x_interior.size, dtype=int)
    flagged = np.ones(x_interior.size, dtype=bool)
    for i, (u, res, rank, ok) in enumerate(sols):
        if ok:
            U[i] = u
            residuals[i] = res
            ranks[i] = rank
            flagged[i] = False
    if flagged.all():
        raise RuntimeError("every interior system failed")
    # an x too close to an interval end kills that side's columns and the
    # numerical rank collapses; those solves resolve only a fraction of the
    # unknowns, so treat them like failures and interpolate across
    typical = np.median(ranks[~flagged])
    flagged |= ranks < np.ceil(0.6 * typical)
    if flagged.all():
        raise RuntimeError("every interior system is rank deficient")
    return U, residuals, flagged


def _patch_flagged(values, flagged, x_full, left=None, right=None):
    """Interpolate a complex curve across flagged interior samples.

    `left`/`right` pin the interval ends with values known exactly from the
    boundary data (omega(0) = 0, q^h(0) = 0, ...), so flagged runs touching
    an end interpolate toward the true endpoint instead of extrapolating.
    """
    if not flagged.any():
        return values
    xs = x_full[1:-1]
    good = ~flagged
    xp = xs[good]
    fp = values[good]
    if left is not None:
        xp = np.concatenate([[x_full[0]], xp])
        fp = np.concatenate([[left], fp])
    if right is not None:
        xp = np.concatenate([xp, [x_full[-1]]])
        fp = np.concatenate([fp, [right]])
    out = values.copy()
    out[flagged] = np.interp(xs[flagged], xp, fp.real) \
        + 1j * np.interp(xs[flagged], xp, fp.imag)
    return out


def _resolve_L(spec_robin, spec_dirichlet, L):
    if L is None:
        L = getattr(spec_robin, "L", None)
    if L is None:
        L = getattr(spec_dirichlet, "L", None)
    if L is None:
        raise ValueError("interval length L is needed: pass L= or use "
                         "Spectrum objects that carry it")
    return float(L)


def _run_w21(psi, delta, cfg, L, threads, xi_rows=None):
    N = cfg.N
    x_full = np.linspace(0.0, L, cfg.x_grid + 2)
    x_int = x_full[1:-1]

    if xi_rows is None:
        rho = cfg.rho_tilde
        D = -delta.eval(rho)              # psi'_N - h psi_N
        P = psi.eval(rho)

        def builder(x):
            return _try_solve(*_interior_w21(rho, D, P, x, L, N))

        width = 3 * N + 6
    else:
        rho = np.asarray(xi_rows, dtype=complex)
        P = psi.eval(rho)

        def builder(x):
            return _try_solve(*_interior_w21_reduced(rho, P, x, L, N))

        width = 2 * N + 4

    U, residuals, flagged = _solve_interior(builder, x_int, width, threads)

    # endpoint system: always on rho_hat, D there is genuinely nonzero
    rho_hat = cfg.rho_hat
    D_hat = -delta.eval(rho_hat)
    P_hat = psi.eval(rho_hat)
    uL, _ = solve_lstsq(LinearSystem(*_endpoint_w21(rho_hat, D_hat, P_hat,
                                                    L, N)),
                        cutoff=RCOND, equilibrate=False)
    omega, qplus_L = uL[0], uL[1]
    h, qh_L = uL[N + 2], uL[N + 3]
    if abs(h - delta.h) > 1e-2:
        warnings.warn("h from the endpoint system (%s) and from the "
                      "spectrum fit (%s) disagree by more than 1e-2"
                      % (h, delta.h), RuntimeWarning)
    qL = 2.0 * (qplus_L + qh_L + omega ** 2 + h * omega)
    q0 = 2.0 * (qplus_L - qh_L - h * omega)

    omega_H_x = _patch_flagged(U[:, 0], flagged, x_int)
    if xi_rows is None:
        omega_x = _patch_flagged(U[:, N + 2], flagged, x_int)
        qplus_x = _patch_flagged(U[:, N + 3], flagged, x_int)
        omega_h_x = _patch_flagged(U[:, 2 * N + 4], flagged, x_int)
        qh_x = _patch_flagged(U[:, 2 * N + 5], flagged, x_int)
        H = psi.recovered["omega_H"] - omega
    else:
        omega_h_x = _patch_flagged(U[:, N + 2], flagged, x_int)
        qh_x = _patch_flagged(U[:, N + 3], flagged, x_int)
        omega_x = omega_h_x - h
        qplus_x = qh_x + q0 / 2.0 + h * omega_x
        # omega_H(x) + omega(x) is constant (= omega + H): average it
        # instead of leaning on the scalar step-1 fit of the short data
        H = complex(np.mean(omega_H_x + omega_x)) - omega

    omega_profile = np.concatenate([[0.0], omega_x, [omega]])
    q = {}
    if cfg.recovery in ("op1_derivative", "both"):
        q["derivative"] = 2.0 * numeric.differentiate(
            omega_profile, x_full[1] - x_full[0])
    if cfg.recovery in ("op2_coefficients", "both"):
        q_int = 2.0 * (qplus_x + qh_x + omega_x ** 2 + h * omega_x)
        q["coefficients"] = np.concatenate([[q0], q_int, [qL]])

    result = InverseResult(x_full, q, complex(h), complex(H), complex(omega),
                           omega_profile, residuals, flagged, complex(q0),
                           complex(qL), delta.h, cfg)
    result.psi_fit = psi
    result.delta_fit = delta
    result.interior_unknowns = U
    result.omega_h_profile = omega_h_x
    return result


def _run_l2(psi, delta, cfg, L, threads, xi_rows=None):
    N = cfg.N
    x_full = np.linspace(0.0, L, cfg.x_grid + 2)
    x_int = x_full[1:-1]

    if xi_rows is None:
        rho = cfg.rho_tilde
        D = -delta.eval(rho)
        P = psi.eval(rho)

        def builder(x):
            return _try_solve(*_interior_l2(rho, D, P, x, L, N))

        width, phi0_col = 3 * N, 2 * N
    else:
        rho = np.asarray(xi_rows, dtype=complex)
        P = psi.eval(rho)

        def builder(x):
            return _try_solve(*_interior_l2_reduced(rho, P, x, L, N))

        width, phi0_col = 2 * N, N

    U, residuals, flagged = _solve_interior(builder, x_int, width, threads)

    rho_hat = cfg.rho_hat
    D_hat = -delta.eval(rho_hat)
    P_hat = psi.eval(rho_hat)
    uL, _ = solve_lstsq(LinearSystem(*_endpoint_l2(rho_hat, D_hat, P_hat,
                                                   L, N)),
                        cutoff=RCOND, equilibrate=False)

    # phi(rho, 0) = 1 collapses the series to 2 phi_0(0), so phi_0(0) = 1/2
    phi0 = np.concatenate([[0.5],
                           _patch_flagged(U[:, phi0_col], flagged, x_int),
                           [uL[N]]])
    dx = x_full[1] - x_full[0]
    q_vals = numeric.differentiate(phi0, dx, order=2) / phi0
    h = delta.h
    omega_profile = 0.5 * cumulative_trapezoid(q_vals, x_full, initial=0.0)
    omega = complex(omega_profile[-1])
    H = delta.omega_H - omega

    result = InverseResult(x_full, {"phi0": q_vals}, complex(h), complex(H),
                           omega, omega_profile, residuals, flagged,
                           complex(q_vals[0]), complex(q_vals[-1]),
                           delta.h, cfg)
    result.psi_fit = psi
    result.delta_fit = delta
    result.interior_unknowns = U
    result.phi0_profile = phi0
    return result


def invert_two_spectra(spec_robin, spec_dirichlet, cfg=None, L=None,
                       threads=1):
    """Recover q(x), h, H and omega from the two eigenvalue sets.

    `spec_robin` holds the Robin/shared problem's square-root eigenvalues
    {xi_k}, `spec_dirichlet` the Dirichlet/shared ones {mu_m}.  Returns an
    InverseResult; see InverseConfig for the knobs.
    """
    if cfg is None:
        cfg = InverseConfig()
    L = _resolve_L(spec_robin, spec_dirichlet, L)
    if cfg.algorithm == "W21":
        psi = weyl.fit_psi(spec_dirichlet, N=cfg.N, L=L)
        delta = weyl.fit_delta(spec_robin, psi, N=cfg.N + 1, L=L)
        return _run_w21(psi, delta, cfg, L, threads)
    psi = _fit_psi_l2(spec_dirichlet, cfg.N, L)
    delta = _fit_delta_l2(spec_robin, psi, cfg.N + 1, L)
    return _run_l2(psi, delta, cfg, L, threads)


def invert_with_completion(spec_robin, spec_dirichlet, completed_count,
                           cfg=None, L=None, threads=1):
    """Inversion with the Robin spectrum first enlarged by completion.

    The step-1/step-2 characteristic fit of the given data is used to
    complete the Robin spectrum up to `completed_count` eigenvalues, the
    step-2 fit is redone on the enlarged set, and the per-x systems are
    evaluated at the enlarged eigenvalues themselves -- where the Delta
    factor vanishes, halving the per-x unknowns.
    """
    if cfg is None:
        cfg = InverseConfig()
    L = _resolve_L(spec_robin, spec_dirichlet, L)
    if cfg.algorithm == "W21":
        psi = weyl.fit_psi(spec_dirichlet, N=cfg.N, L=L)
        delta0 = weyl.fit_delta(spec_robin, psi, N=cfg.N + 1, L=L)
        enlarged = completion.complete_spectrum(delta0, completed_count)
        needed = 2 * cfg.N + 4
        if len(enlarged) < needed:
            raise ValueError("completed spectrum too small: the reduced "
                             "per-x systems need %d points" % needed)
        delta = weyl.fit_delta(enlarged, psi, N=cfg.N + 1, L=L)
        return _run_w21(psi, delta, cfg, L, threads,
                        xi_rows=enlarged.rhos)
    psi = _fit_psi_l2(spec_dirichlet, cfg.N, L)
    delta0 = _fit_delta_l2(spec_robin, psi, cfg.N + 1, L)
    enlarged = completion.complete_spectrum(delta0, completed_count)
    if len(enlarged) < 2 * cfg.N:
        raise ValueError("completed spectrum too small: the reduced "
                         "per-x systems need %d points" % (2 * cfg.N))
    delta = _fit_delta_l2(enlarged, psi, cfg.N + 1, L)
    return _run_l2(psi, delta, cfg, L, threads, xi_rows=enlarged.rhos)
