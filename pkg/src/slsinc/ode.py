"""Forward machinery: normalized solutions, characteristic functions,
and eigenvalue location by winding counts or real scans.

Four normalized solutions of -y'' + q y = rho^2 y are used throughout:

    S    S(rho, 0) = 0,  S'(rho, 0) = 1
    phi  phi(rho, 0) = 1, phi'(rho, 0) = h
    psi  psi(rho, L) = 1, psi'(rho, L) = -H
    T    T(rho, L) = 0,  T'(rho, L) = 1

All of them are entire and even in rho. Eigenvalues of the two-endpoint
problem are the zeros of the characteristic function Delta(lambda) =
h*psi(rho,0) - psi'(rho,0) (Robin left end) or of psi(rho,0) itself
(Dirichlet left end); with a Dirichlet right end psi is replaced by T.
"""

import numpy as np

from . import roots
from .core import Potential, Spectrum
from .kernels import propagate

DEFAULT_RTOL = 1e-12
DEFAULT_ATOL = 1e-12
MAX_BATCH = 128


def _potential_of(obj):
    return obj if isinstance(obj, Potential) else obj.potential


def propagate_grouped(rho, y0, dy0, x0, x1, coeffs, breaks,
                      rtol=DEFAULT_RTOL, atol=DEFAULT_ATOL):
    """Propagate a mixed-magnitude batch, regrouping so each kernel call
    spans at most one octave of |rho| (the shared step size is set by the
    stiffest member)."""
    rho = np.atleast_1d(np.asarray(rho, dtype=complex))
    y0 = np.broadcast_to(np.asarray(y0, dtype=complex), rho.shape)
    dy0 = np.broadcast_to(np.asarray(dy0, dtype=complex), rho.shape)
    y = np.empty(rho.shape, dtype=complex)
    dy = np.empty(rho.shape, dtype=complex)
    order = np.argsort(np.abs(rho))
    mags = np.abs(rho)[order]
    start = 0
    while start < rho.size:
        lo = max(1.0, mags[start])
        end = start + 1
        while end < rho.size and end - start < MAX_BATCH and mags[end] <= 2.0 * lo:
            end += 1
        idx = order[start:end]
        y[idx], dy[idx] = propagate(rho[idx], y0[idx], dy0[idx], x0, x1,
                                    coeffs, breaks, rtol, atol)
        start = end
    return y, dy


_LEFT_KINDS = ("S", "phi")
_RIGHT_KINDS = ("psi", "T")


def _initial_data(kind, problem):
    if kind == "S":
        return 0.0, 1.0, 0.0
    if kind == "T":
        return 0.0, 1.0, problem.L if hasattr(problem, "L") else _potential_of(problem).L
    if kind == "phi":
        h = problem.h
        if h is None:
            raise ValueError("phi needs a Robin condition at the left end")
        return 1.0, h, 0.0
    if kind == "psi":
        H = problem.H
        if H is None:
            raise ValueError("psi needs a Robin condition at the right end")
        return 1.0, -H, problem.L
    raise ValueError("kind must be one of 'S', 'phi', 'psi', 'T'")


def solution(kind, problem, rho, x=None, rtol=DEFAULT_RTOL, atol=DEFAULT_ATOL):
    """Value and x-derivative of a normalized solution at a single point.

    `problem` may be a bare Potential for the BC-free kinds 'S' and 'T'.
    `x` defaults to the opposite endpoint. Scalar rho gives scalar output.
    """
    pot = _potential_of(problem)
    if kind in ("S", "T") and isinstance(problem, Potential):
        class _Shim:  # T only needs L
            L = pot.L
        y0, dy0, x_from = _initial_data(kind, _Shim)
    else:
        y0, dy0, x_from = _initial_data(kind, problem)
    if x is None:
        x = pot.L - x_from
    coeffs, breaks = pot.spline_coefficients()
    scalar = np.isscalar(rho) or np.ndim(rho) == 0
    y, dy = propagate_grouped(rho, y0, dy0, x_from, float(x), coeffs, breaks,
                              rtol, atol)
    if scalar:
        return complex(y[0]), complex(dy[0])
    return y, dy


def solution_on_grid(kind, problem, rho, xs, rtol=DEFAULT_RTOL, atol=DEFAULT_ATOL):
    """Solution values and derivatives on an ascending grid of x points.

    Returns complex arrays of shape (len(xs), len(rho)); the propagation
    runs once end-to-end with checkpoints, not once per grid point.
    """
    pot = _potential_of(problem)
    xs = np.asarray(xs, dtype=float)
    if np.any(np.diff(xs) <= 0):
        raise ValueError("xs must be strictly increasing")
    if xs[0] < -1e-12 or xs[-1] > pot.L + 1e-12:
        raise ValueError("xs must lie inside [0, L]")
    y0, dy0, x_from = _initial_data(kind, problem)
    coeffs, breaks = pot.spline_coefficients()
    rho = np.atleast_1d(np.asarray(rho, dtype=complex))
    y_out = np.empty((xs.size, rho.size), dtype=complex)
    dy_out = np.empty_like(y_out)
    order = range(xs.size) if kind in _LEFT_KINDS else range(xs.size - 1, -1, -1)
    y = np.broadcast_to(np.asarray(y0, dtype=complex), rho.shape)
    dy = np.broadcast_to(np.asarray(dy0, dtype=complex), rho.shape)
    x_cur = x_from
    for i in order:
        y, dy = propagate_grouped(rho, y, dy, x_cur, xs[i], coeffs, breaks,
                                  rtol, atol)
        x_cur = xs[i]
        y_out[i] = y
        dy_out[i] = dy
    return y_out, dy_out


def _right_solution_at_zero(problem, rho, rtol, atol):
    kind = "psi" if problem.bc_right.kind == "robin" else "T"
    return solution(kind, problem, rho, x=0.0, rtol=rtol, atol=atol)


def char_delta(problem, rho, rtol=DEFAULT_RTOL, atol=DEFAULT_ATOL):
    """Characteristic function h*y(0) - y'(0) of a Robin left end, where y
    is the solution normalized at the right end (psi, or T if Dirichlet)."""
    if problem.h is None:
        raise ValueError("char_delta needs a Robin condition at the left end")
    y, dy = _right_solution_at_zero(problem, rho, rtol, atol)
    return problem.h * y - dy


def char_delta_circ(problem, rho, rtol=DEFAULT_RTOL, atol=DEFAULT_ATOL):
    """Characteristic function y(0) of a Dirichlet left end (y as above)."""
    y, _ = _right_solution_at_zero(problem, rho, rtol, atol)
    return y


def characteristic(problem, rho, rtol=DEFAULT_RTOL, atol=DEFAULT_ATOL):
    """Whichever of char_delta / char_delta_circ matches the left end."""
    if problem.bc_left.kind == "robin":
        return char_delta(problem, rho, rtol, atol)
    return char_delta_circ(problem, rho, rtol, atol)


def _is_real_problem(problem):
    pot = problem.potential
    if np.any(pot.samples.imag != 0.0):
        return False
    for c in (problem.h, problem.H):
        if c is not None and complex(c).imag != 0.0:
            return False
    return True


def _real_eigenvalues(problem, count, rho_min, tol, rtol, atol, step):
    L = problem.L
    if step is None:
        step = np.pi / (6.0 * L)
    # bracket with a cheap integration, polish against the tight one
    rtol_c, atol_c = max(rtol, 1e-9), max(atol, 1e-9)
    scan_tol = max(tol, 1e-8)

    def char(z):
        return characteristic(problem, np.asarray(z, dtype=complex), rtol, atol)

    def char_rho(r):
        return characteristic(problem, np.asarray(r, dtype=complex),
                              rtol_c, atol_c).real

    # negative eigenvalues lambda = -tau^2 live on the imaginary rho axis
    qmin = float(np.min(problem.potential.samples.real))
    bcs = sum(abs(c) for c in (problem.h, problem.H) if c is not None)
    lam_floor = min(0.0, qmin) - (bcs + 1.0) ** 2
    imag_part = np.empty(0)
    if lam_floor < 0.0:
        tau_max = np.sqrt(-lam_floor)

        def char_tau(t):
            return characteristic(problem, 1j * np.asarray(t, dtype=float),
                                  rtol_c, atol_c).real

        taus = roots.real_zeros(char_tau, rho_min, tau_max, step, tol=scan_tol)
        if taus.size:
            imag_part = roots._secant_batch(char, 1j * taus, 1e-6j, tol,
                                            max_iter=20).imag

    real_part = np.empty(0)
    lo = rho_min
    hi = rho_min + (count + 2.5) * np.pi / L
    for _ in range(60):
        rs = roots.real_zeros(char_rho, lo, hi, step, tol=scan_tol)
        if rs.size:
            rs = roots._secant_batch(char, rs.astype(complex), 1e-6, tol,
                                     max_iter=20).real
        real_part = np.concatenate([real_part, rs])
        if imag_part.size + real_part.size >= count:
            break
        lo, hi = hi, hi + 5.0 * np.pi / L
    found = imag_part.size + real_part.size
    if found < count:
        raise RuntimeError("eigenvalue scan found only %d of %d requested"
                           % (found, count))
    lams = np.concatenate([-imag_part**2, np.sort(real_part) ** 2])
    lams = np.sort(lams)[:count]
    return np.where(lams >= 0.0, np.sqrt(np.abs(lams)),
                    1j * np.sqrt(np.abs(lams)))


def _complex_eigenvalues(problem, count, rho_min, strip_height, tol, rtol, atol):
    L = problem.L
    # locate with a cheap integration, polish each zero against the tight one
    rtol_c, atol_c = max(rtol, 1e-9), max(atol, 1e-9)

    def char_coarse(z):
        return characteristic(problem, np.asarray(z, dtype=complex),
                              rtol_c, atol_c)

    def char(z):
        return characteristic(problem, np.asarray(z, dtype=complex), rtol, atol)

    spacing = np.pi / (3.0 * L)  # eigenvalues sit ~pi/L apart along Re rho
    found = np.empty(0, dtype=complex)
    lo = rho_min
    hi = rho_min + (count + 2.5) * np.pi / L
    for _ in range(60):
        zs = roots.locate_zeros(char_coarse, complex(lo, -strip_height),
                                complex(hi, strip_height), tol=max(tol, 1e-7),
                                sample_spacing=spacing)
        found = np.concatenate([found, zs])
        if found.size >= count:
            break
        lo, hi = hi, hi + 5.0 * np.pi / L
    if found.size < count:
        raise RuntimeError("contour search found only %d of %d eigenvalues"
                           % (found.size, count))
    polished = roots._secant_batch(char, found, 1e-6 + 1e-6j, tol, max_iter=30)
    drifted = np.abs(polished - found) > 1e-3
    polished[drifted] = found[drifted]
    # slab extensions can catch a boundary-hugging zero twice
    order = np.lexsort((polished.imag, polished.real))
    polished = polished[order]
    if polished.size > 1:
        keep = np.concatenate([[True],
                               np.abs(np.diff(polished)) > 1e-6 * (1 + np.abs(polished[1:]))])
        polished = polished[keep]
    return polished[:count]


def eigenvalues(problem, count, rho_min=1e-6, strip_height=2.0, tol=1e-12,
                rtol=DEFAULT_RTOL, atol=DEFAULT_ATOL, step=None,
                force_complex=False):
    """First `count` square-root eigenvalues rho_k of the problem.

    Real (self-adjoint) problems are scanned along the real rho axis plus
    the imaginary axis for negative eigenvalues, and ordered by lambda.
    Complex problems are searched by winding counts over the strip
    Re rho in [rho_min, R], |Im rho| <= strip_height, and ordered by
    Re rho. Only zeros inside the strip are reported: widen (or narrow)
    strip_height to select the eigenvalue branch of interest. The point
    rho = 0 is excluded by construction.
    """
    if count < 1:
        raise ValueError("count must be positive")
    if not force_complex and _is_real_problem(problem):
        rho = _real_eigenvalues(problem, count, rho_min, tol, rtol, atol, step)
    else:
        rho = _complex_eigenvalues(problem, count, rho_min, strip_height,
                                   tol, rtol, atol)
    return Spectrum(rho, origin="exact", L=problem.L)
