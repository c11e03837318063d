"""Spectrum completion: extend a finite set of eigenvalues to many more.

A truncated cardinal-series representation of the problem's characteristic
function has finitely many unknown coefficients, and each known eigenvalue
contributes one linear equation (the characteristic vanishes there).
Solving that system yields an entire function of rho whose further zeros
approximate the rest of the spectrum, so a handful of eigenvalues extends
to hundreds.  No knowledge of the potential or the boundary constants is
required; some of them (omega, h, omega_H, ...) fall out of the solution
vector as a byproduct.

Six fit variants, named by boundary pair and regularity class:

    RobinRobin_W21          Delta = h*psi(.,0) - psi'(.,0); products with h
                            (h*omega_H, h*q_LH(0), h*Psi_n(0)) are kept as
                            independent unknowns so the system stays linear:
                            2N+4 unknowns.  The leading columns satisfy
                            cos(rho L) = -rho L j1(rho L) + sin(rho L)/(rho L)
                            identically, so (h, omega_H, h*omega_H) is only
                            determined up to multiples of (1, -1, -1/L); the
                            sum h + omega_H survives, and the zeros of the
                            fitted characteristic are unaffected
    RobinRobin_L2           same Delta via the plain-series forms; only the
                            combinations sigma_n = h*psi_n(0) - psi'_n(0)
                            enter, plus h and omega_H whose columns coincide
                            (-rho L j1(rho L) both), so the fit determines
                            h + omega_H: N+2 unknowns
    DirichletDirichlet_W21  S_N-type form of S(.,L): omega, q_plus(L) and N
                            series coefficients: N+2 unknowns
    DirichletDirichlet_L2   plain series of S(.,L): N unknowns
    NeumannDirichlet        plain series of phi(.,L) with h=0: N unknowns
    DirichletRobin          S_N-type form of psi(.,0): omega_H, q_LH(0) and
                            N series coefficients: N+2 unknowns
"""

import numpy as np

from . import roots, series
from .core import Spectrum
from .numeric import LinearSystem, solve_lstsq

VARIANTS = ("RobinRobin_W21", "RobinRobin_L2", "DirichletDirichlet_W21",
            "DirichletDirichlet_L2", "NeumannDirichlet", "DirichletRobin")

MIN_RHO = 1e-6   # every series row carries 1/rho powers


def unknown_count(variant, N):
    """Number of unknowns the variant's linear system has at truncation N."""
    if variant == "RobinRobin_W21":
        return 2 * N + 4
    if variant in ("RobinRobin_L2", "DirichletDirichlet_W21",
                   "DirichletRobin"):
        return N + 2
    if variant in ("DirichletDirichlet_L2", "NeumannDirichlet"):
        return N
    raise ValueError("unknown completion variant %r" % (variant,))


def default_truncation(variant, count):
    """Largest N giving a square (or smaller) system for `count` eigenvalues."""
    if variant == "RobinRobin_W21":
        N = (count - 4) // 2
    elif variant in ("RobinRobin_L2", "DirichletDirichlet_W21",
                     "DirichletRobin"):
        N = count - 2
    elif variant in ("DirichletDirichlet_L2", "NeumannDirichlet"):
        N = count
    else:
        raise ValueError("unknown completion variant %r" % (variant,))
    if N < 1:
        raise ValueError("%d eigenvalues cannot determine any %s system"
                         % (count, variant))
    return N


def _design(variant, L, N, rho):
    """Design matrix rows and right-hand side of the fit at the points rho.

    Rows are written exactly in the form the characteristic equations take,
    so that matrix @ unknowns - rhs IS the fitted characteristic (up to the
    rho^2 scaling noted in _characteristic for DirichletDirichlet_W21).
    """
    rho = np.atleast_1d(np.asarray(rho, dtype=complex))
    cosL = np.cos(rho * L)
    sinL = np.sin(rho * L)
    zj = series.zj1(rho * L)              # rho L j1(rho L)
    cols = []
    if variant == "RobinRobin_W21":
        # h*cos + (h omega_H) sin/rho - (h q_LH) (L/rho) j1 - sum (h Psi_n) C_n
        #   - omega_H rho L j1 - sum psi'_n B_n = rho sin
        C = series._pair_div_rho2(rho, L, np.arange(1, N + 1))
        B = series.sinc_pair(rho, L, np.arange(N))
        cols = [cosL, -zj, series.sin_over_rho(rho, L),
                -series.j1_scaled(rho, L)]
        cols.extend(-C)
        cols.extend(-B)
        rhs = rho * sinL
    elif variant == "RobinRobin_L2":
        # -h rho L j1 - omega_H rho L j1 + sum sigma_n B_n = rho sin
        B = series.sinc_pair(rho, L, np.arange(N))
        cols = [-zj, -zj]
        cols.extend(B)
        rhs = rho * sinL
    elif variant == "DirichletDirichlet_W21":
        # omega cos/rho^2 - q_plus(L) sin/rho^3 + sum s_n F_n/rho^2 = sin/rho
        F = series.sinc_pair_half(rho, L, np.arange(N))
        cols = [cosL / rho ** 2, -sinL / rho ** 3]
        cols.extend(F / rho ** 2)
        rhs = sinL / rho
    elif variant == "DirichletDirichlet_L2":
        # sum s_n F_n = -sin/rho
        F = series.sinc_pair_half(rho, L, np.arange(N))
        cols.extend(F)
        rhs = -sinL / rho
    elif variant == "NeumannDirichlet":
        # sum phi_n B_n = -(cos - sinc) = rho L j1(rho L)
        B = series.sinc_pair(rho, L, np.arange(N))
        cols.extend(B)
        rhs = zj
    elif variant == "DirichletRobin":
        # omega_H sin/rho - q_LH (L/rho) j1 - sum Psi_n C_n = -cos
        C = series._pair_div_rho2(rho, L, np.arange(1, N + 1))
        cols = [series.sin_over_rho(rho, L), -series.j1_scaled(rho, L)]
        cols.extend(-C)
        rhs = -cosL
    else:
        raise ValueError("unknown completion variant %r" % (variant,))
    return np.stack(cols, axis=1), rhs


_SCALAR_LABELS = {
    "RobinRobin_W21": ("h", "omega_H", "h_omega_H", "h_q_LH0"),
    "RobinRobin_L2": ("h", "omega_H"),
    "DirichletDirichlet_W21": ("omega", "q_plus_L"),
    "DirichletDirichlet_L2": (),
    "NeumannDirichlet": (),
    "DirichletRobin": ("omega_H", "q_LH0"),
}


class CompletedCharacteristic:
    """The fitted characteristic function and everything recovered with it.

    `recovered` maps the scalar unknowns by name (h, omega_H, omega, ...);
    `coeffs` holds the trailing series coefficients (for RobinRobin_W21 the
    two blocks h*Psi_n and psi'_n concatenated).  eval() computes an entire
    function of rho whose zeros approximate the problem's sqrt-eigenvalues;
    for DirichletDirichlet_W21 it is rho^2 * S_N(rho, L), everywhere else
    the characteristic itself.
    """

    def __init__(self, variant, L, N, unknowns, residual, fit_points=None):
        self.variant = variant
        self.L = float(L)
        self.N = int(N)
        self.unknowns = np.asarray(unknowns, dtype=complex)
        self.residual = float(residual)
        self.fit_points = None if fit_points is None \
            else np.asarray(fit_points, dtype=complex)
        labels = _SCALAR_LABELS[variant]
        self.recovered = {name: self.unknowns[i]
                          for i, name in enumerate(labels)}
        self.coeffs = self.unknowns[len(labels):]

    def eval(self, rho):
        scalar = np.isscalar(rho) or np.ndim(rho) == 0
        shape = np.shape(rho)
        rho = np.asarray(rho, dtype=complex).ravel()
        if rho.size == 0:
            rho = np.atleast_1d(rho)
        if self.variant == "DirichletDirichlet_W21":
            # rho^2 * (matrix @ u - rhs), computed term by term so it stays
            # finite at small rho: -(omega cos - q+ sin/rho + sum s F - rho sin)
            om, qp = self.unknowns[0], self.unknowns[1]
            F = series.sinc_pair_half(rho, self.L, np.arange(self.N))
            out = (om * np.cos(rho * self.L)
                   - qp * series.sin_over_rho(rho, self.L)
                   + self.coeffs @ F - rho * np.sin(rho * self.L))
        else:
            A, b = _design(self.variant, self.L, self.N, rho)
            out = A @ self.unknowns - b
        return out[0] if scalar else out.reshape(shape)

    def __repr__(self):
        return "CompletedCharacteristic(%s, N=%d, residual=%.3e)" % (
            self.variant, self.N, self.residual)


def fit_characteristic(variant, known, N=None, L=None):
    """Fit the unknowns of the variant's characteristic from known eigenvalues.

    `known` is a Spectrum (its rho_k must stay away from 0); L is taken from
    the spectrum when not given.  N defaults to the largest truncation the
    data determines (square system); fewer unknowns than eigenvalues gives an
    overdetermined least-squares fit.
    """
    if variant not in VARIANTS:
        raise ValueError("unknown completion variant %r" % (variant,))
    if L is None:
        L = getattr(known, "L", None)
    if L is None:
        raise ValueError("interval length L is needed: pass L= or use a "
                         "Spectrum that carries it")
    rhos = np.asarray(known.rhos if isinstance(known, Spectrum) else known,
                      dtype=complex)
    if np.min(np.abs(rhos)) < MIN_RHO:
        raise ValueError("eigenvalue too close to zero (|rho| < %g); the "
                         "series rows carry 1/rho powers" % MIN_RHO)
    K = rhos.size
    if N is None:
        N = default_truncation(variant, K)
    count = unknown_count(variant, N)
    if K < count:
        raise ValueError("%d eigenvalues cannot determine %d unknowns "
                         "(%s with N=%d)" % (K, count, variant, N))
    A, b = _design(variant, L, N, rhos)
    u, residual = solve_lstsq(LinearSystem(A, b))
    return CompletedCharacteristic(variant, L, N, u, residual, fit_points=rhos)


def _dedupe(zs, tol):
    if zs.size == 0:
        return zs
    keep = [zs[0]]
    for z in zs[1:]:
        if abs(z - keep[-1]) > tol:
            keep.append(z)
    return np.asarray(keep)


def _real_axis_zeros(f, start, stop, spacing):
    fr = lambda t: np.real(f(np.asarray(t, dtype=complex)))
    return roots.real_zeros(fr, start, stop, spacing / 8.0, tol=1e-13)


def complete_spectrum(cc, target_count, strip_height=2.0, anchor=None):
    """Locate target_count zeros of the fitted characteristic, ascending.

    The scan walks blocks of the asymptotic eigenvalue spacing pi/L along
    the real axis starting just below the smallest fitted-data eigenvalue
    (`anchor` overrides the start).  Real fits use bracketing on the real
    axis (plus the imaginary axis, where negative eigenvalues lambda = -t^2
    live); complex fits count zeros per block in the strip |Im rho| <=
    strip_height by winding number.  Blocks that unexpectedly contain no
    zero are recorded in the `gaps` attribute of the returned Spectrum and
    the scan continues.

    The given eigenvalues are the lowest ones of the problem, so below
    their range the fitted characteristic has no business vanishing except
    at (small perturbations of) the data itself.  Zeros found there that
    match no fitted eigenvalue are artifacts of extrapolating the fit far
    outside its data -- its entire-function tails grow like cosh off the
    real axis and amplify coefficient error -- and are dropped.
    """
    if target_count < 1:
        raise ValueError("target_count must be positive")
    L = cc.L
    spacing = np.pi / L
    real_fit = np.max(np.abs(cc.unknowns.imag)) \
        <= 1e-8 * (1.0 + np.max(np.abs(cc.unknowns)))
    if anchor is None:
        if cc.fit_points is not None:
            first = float(np.min(cc.fit_points.real))
        else:
            first = spacing
        anchor = max(1e-3, first - 0.6 * spacing)

    fit_pts = cc.fit_points
    if fit_pts is not None and fit_pts.size:
        lead = float(np.max(fit_pts.real)) + 1e-9 * (1.0 + spacing)
        spur_tol = 0.45 * spacing

        def _trusted(z):
            return z.real > lead or np.min(np.abs(fit_pts - z)) <= spur_tol
    else:
        def _trusted(z):
            return True

    found = []
    gaps = []
    # imaginary-axis zeros (negative lambda = -t^2) first, so ordering by
    # real part keeps them in front; scan far enough to cover any given
    # eigenvalue that already sits on that axis
    if real_fit:
        tmax = 3.0 * spacing
        if cc.fit_points is not None:
            tmax = max(tmax, 1.2 * float(np.max(np.abs(cc.fit_points.imag)))
                       + spacing)
        f_im = lambda t: np.real(cc.eval(1j * np.asarray(t)))
        for t in roots.real_zeros(f_im, 1e-3, tmax, spacing / 16.0, tol=1e-13):
            if _trusted(1j * t):
                found.append(1j * t)

    blocks_without = 0
    on_axis = False   # becomes True once the real-axis walk produces zeros
    edge = anchor
    max_blocks = 2 * target_count + 40
    for _ in range(max_blocks):
        lo, hi = edge, edge + spacing
        edge = hi
        if real_fit:
            zs = _real_axis_zeros(cc.eval, lo, hi, spacing).astype(complex)
        else:
            zs = roots.locate_zeros(cc.eval, complex(lo, -strip_height),
                                    complex(hi, strip_height), tol=1e-11,
                                    sample_spacing=0.45 * spacing)
        zs = np.asarray([z for z in zs if _trusted(z)], dtype=complex)
        if zs.size == 0:
            if on_axis:
                gaps.append((lo, hi))
                blocks_without += 1
                if blocks_without > 25:
                    break   # the fit has stopped producing zeros; give up
            continue
        blocks_without = 0
        on_axis = True
        found.extend(zs.tolist())
        if len(found) >= target_count + 2:
            break
    zeros = np.asarray(found, dtype=complex)
    order = np.lexsort((zeros.imag, zeros.real))
    zeros = _dedupe(zeros[order], 1e-6 * spacing)
    if zeros.size < target_count:
        raise RuntimeError("found only %d of %d requested zeros (last gap "
                           "at %s)" % (zeros.size, target_count,
                                       gaps[-1:] or "none"))
    out = Spectrum(zeros[:target_count], origin="completed", L=L)
    out.gaps = [g for g in gaps if g[0] < zeros[target_count - 1].real]
    return out


def omega_asymptotic(known, L=None):
    """Estimate omega = (1/2) integral of q from Dirichlet-Dirichlet data.

    Uses the asymptotics rho_k ~ k pi/L + omega/(k pi): the l2-optimal
    constant is the arithmetic mean of pi k (rho_k - k pi/L) over the given
    eigenvalues, indexed k = 1, 2, ...
    """
    if L is None:
        L = getattr(known, "L", None)
    if L is None:
        raise ValueError("interval length L is needed")
    rhos = np.asarray(known.rhos if isinstance(known, Spectrum) else known,
                      dtype=complex)
    if rhos.size < 2:
        raise ValueError("need at least two eigenvalues")
    k = np.arange(1, rhos.size + 1)
    return complex(np.mean(np.pi * k * (rhos - k * np.pi / L)))
