"""Weyl functions from two finite spectra.

Two spectra of the same equation -- one with a Robin condition y'(0) =
h y(0) at the left end, one with y(0) = 0, both sharing the right-end
condition -- determine the Weyl function

    M(lambda) = -Delta_circ(lambda) / Delta(lambda),

the quotient of the two characteristic functions Delta_circ = psi(., 0)
and Delta = h psi(., 0) - psi'(., 0).  Both numerator and denominator
are entire, so fitting their truncated cardinal representations to the
finitely many given eigenvalues (each spectrum pins down its function's
zeros) gives M everywhere in the lambda plane at once:

    step 1   fit omega_H, q_L^H(0) and the Psi_n(0) coefficients of
             psi_N(., 0) from the Dirichlet-type spectrum {mu_m}; this
             is the same linear system the DirichletRobin completion
             variant solves,
    step 2   fit h and the psi'_n(0) coefficients of psi'_N(., 0) from
             the Robin-type spectrum {xi_k}, reusing psi_N from step 1,
    step 3   divide.

A truncated-product approximation built directly from the eigenvalues
(Hadamard factorization with the asymptotic normalization constants)
serves as the baseline these fits are compared against; its accuracy
degrades quickly away from the data, which is the point of the
comparison.

The m-function variant m = psi'(., 0)/psi(., 0) of a Neumann/Dirichlet
pair is the same machinery with h pinned to zero.
"""

import numpy as np

from . import completion, ode, roots, series
from .core import Spectrum, sqrt_lambda

MASK_RADIUS = 1e-3   # rho-distance to a denominator zero that blanks a point


class WeylGrid:
    """M(lambda(rho)) sampled on a rectangular rho-grid.

    `values` holds the quotient, `delta_circ` and `delta` the fitted (or
    product-approximated) numerator and denominator, `mask` flags points
    within MASK_RADIUS of a denominator zero (their values are NaN so a
    heatmap shows holes instead of spikes).  When a reference problem is
    supplied at construction time the `truth` and `error` grids are
    filled from direct integrations of the equation.
    """

    def __init__(self, rho, values, delta_circ=None, delta=None, mask=None,
                 truth=None, error=None):
        self.rho = np.asarray(rho, dtype=complex)
        self.values = np.asarray(values, dtype=complex)
        if self.values.shape != self.rho.shape:
            raise ValueError("values and rho grids must have the same shape")
        self.delta_circ = delta_circ
        self.delta = delta
        self.mask = np.zeros(self.rho.shape, dtype=bool) if mask is None \
            else np.asarray(mask, dtype=bool)
        self.truth = truth
        self.error = error

    def sup_error(self):
        """Largest |values - truth| over the unmasked grid."""
        if self.error is None:
            raise ValueError("no truth attached to this grid")
        live = ~self.mask & np.isfinite(self.error)
        return float(np.max(self.error[live]))


def rho_grid_from_lambda(re_points, im_points):
    """Rectangular lambda-grid -> rho-grid (principal sqrt, Re rho >= 0).

    `re_points` and `im_points` are 1-D coordinate arrays; the result has
    shape (len(im_points), len(re_points)).
    """
    re = np.asarray(re_points, dtype=float)
    im = np.asarray(im_points, dtype=float)
    lam = re[None, :] + 1j * im[:, None]
    return sqrt_lambda(lam)


def fit_psi(spec_dirichlet, N=None, L=None):
    """Fit psi_N(., 0) from a Dirichlet-type spectrum (step 1).

    Identical to the DirichletRobin completion fit; N is clamped so the
    system never becomes underdetermined.
    """
    if L is None:
        L = getattr(spec_dirichlet, "L", None)
    M = len(np.asarray(spec_dirichlet.rhos))
    if N is not None:
        N = min(int(N), M - 2)
    return completion.fit_characteristic("DirichletRobin", spec_dirichlet,
                                         N=N, L=L)


class DeltaFit:
    """h * psi_N(., 0) - psi'_N(., 0) with fitted psi' coefficients.

    psi'_N(rho, 0) = rho sin(rho L) + omega_H rho L j1(rho L)
                     + sum_n psi'_n(0) B_n(rho; L)

    with omega_H inherited from the step-1 fit.  `h` is either fitted
    (Robin data) or pinned (0 for the Neumann/m-function flow).
    """

    def __init__(self, psi_fit, h, coeffs, residual, fit_points, h_fixed):
        self.psi = psi_fit
        self.L = psi_fit.L
        self.h = complex(h)
        self.coeffs = np.asarray(coeffs, dtype=complex)
        self.N = self.coeffs.size
        self.residual = float(residual)
        self.fit_points = np.asarray(fit_points, dtype=complex)
        self.h_fixed = bool(h_fixed)

    @property
    def unknowns(self):
        """Fitted quantities as one vector (h, omega_H, coefficients)."""
        return np.concatenate([[self.h, self.psi.recovered["omega_H"]],
                               self.coeffs])

    def eval_dpsi(self, rho):
        """psi'_N(rho, 0), vectorized over any shape."""
        rho = np.asarray(rho, dtype=complex)
        flat = np.atleast_1d(rho).ravel()
        omega_H = self.psi.recovered["omega_H"]
        out = flat * np.sin(flat * self.L) \
            + omega_H * series.zj1(flat * self.L)
        if self.N:
            B = series.sinc_pair(flat, self.L, np.arange(self.N))
            out = out + self.coeffs @ B
        return out.reshape(rho.shape) if rho.shape else out[0]

    def eval(self, rho):
        """Delta_N(lambda) = h psi_N(rho, 0) - psi'_N(rho, 0)."""
        rho = np.asarray(rho, dtype=complex)
        flat = np.atleast_1d(rho).ravel()
        out = self.h * self.psi.eval(flat) - self.eval_dpsi(flat)
        return out.reshape(rho.shape) if rho.shape else out[0]

    def __repr__(self):
        return "DeltaFit(N=%d, h=%s, residual=%.3e)" % (
            self.N, self.h, self.residual)


def fit_delta(spec_robin, psi_fit, N=None, h=None, L=None):
    """Fit Delta_N = h psi_N - psi'_N from a Robin-type spectrum (step 2).

    Each given eigenvalue xi_k gives one equation Delta_N(xi_k^2) = 0 in
    the unknowns h (unless pinned) and the psi'_n(0) coefficients; psi_N
    comes from `psi_fit`.
    """
    rhos = np.asarray(spec_robin.rhos if isinstance(spec_robin, Spectrum)
                      else spec_robin, dtype=complex)
    if np.min(np.abs(rhos)) < completion.MIN_RHO:
        raise ValueError("eigenvalues too close to zero for the 1/rho "
                         "series rows")
    L = psi_fit.L if L is None else float(L)
    K = rhos.size
    fit_h = h is None
    max_N = K - 1 if fit_h else K
    N = max_N if N is None else min(int(N), max_N)
    if N < 1:
        raise ValueError("need at least %d eigenvalues" % (2 if fit_h else 1))

    omega_H = psi_fit.recovered["omega_H"]
    rhs = rhos * np.sin(rhos * L) + omega_H * series.zj1(rhos * L)
    B = series.sinc_pair(rhos, L, np.arange(N)).T     # rows <-> eigenvalues
    if fit_h:
        cols = np.concatenate([psi_fit.eval(rhos)[:, None], -B], axis=1)
        x, residual = _solve(cols, rhs)
        h_val, coeffs = x[0], x[1:]
    else:
        x, residual = _solve(-B, rhs - h * psi_fit.eval(rhos))
        h_val, coeffs = h, x
    return DeltaFit(psi_fit, h_val, coeffs, residual, rhos, not fit_h)


def _solve(cols, rhs):
    from .numeric import LinearSystem, solve_lstsq
    return solve_lstsq(LinearSystem(cols, rhs))


def _zeros_near_grid(f, rho_grid, L):
    """All zeros of f in (a slightly padded hull of) the grid's bounding box."""
    pad = 0.0137 + MASK_RADIUS
    re_lo = float(np.min(rho_grid.real)) - pad
    re_hi = float(np.max(rho_grid.real)) + pad
    im_lo = float(np.min(rho_grid.imag)) - pad
    im_hi = float(np.max(rho_grid.imag)) + pad
    spacing = np.pi / L
    zs = []
    edges = np.linspace(re_lo, re_hi,
                        max(2, int(np.ceil((re_hi - re_lo) / spacing)) + 1))
    for lo, hi in zip(edges[:-1], edges[1:]):
        zs.extend(roots.locate_zeros(f, complex(lo, im_lo),
                                     complex(hi, im_hi), tol=1e-9,
                                     sample_spacing=0.45 * spacing).tolist())
    return np.asarray(zs, dtype=complex)


def _masked_quotient(numer, denom, rho_grid, zeros):
    values = np.full(rho_grid.shape, np.nan, dtype=complex)
    mask = np.zeros(rho_grid.shape, dtype=bool)
    if zeros.size:
        dist = np.min(np.abs(rho_grid[..., None]
                             - zeros[None, None, :]), axis=-1)
        mask |= dist <= MASK_RADIUS
    live = ~mask
    values[live] = -numer[live] / denom[live]
    return values, mask


def _truth_grids(problem, rho_grid, values, mask, flip):
    """True M (or m) from direct integrations, plus |fit - truth|."""
    flat = rho_grid.ravel()
    num = np.array([ode.char_delta_circ(problem, r) for r in flat])
    den = np.array([ode.char_delta(problem, r) for r in flat])
    truth = (-num / den if not flip else -den / num).reshape(rho_grid.shape)
    error = np.abs(values - truth)
    error[mask] = np.nan
    return truth, error


def weyl_from_spectra(spec_robin, spec_dirichlet, N, grid, L=None,
                      problem=None):
    """M(lambda) = -Delta_circ/Delta fitted to the two spectra, on a grid.

    `grid` is an array of rho points (build one with rho_grid_from_lambda
    for a lambda rectangle).  Points within MASK_RADIUS of a zero of the
    fitted Delta are masked.  Passing the Robin `problem` attaches truth
    and error grids computed by direct integration.  The two fitted
    characteristics ride along as `delta_circ_fit` / `delta_fit`.
    """
    rho_grid = np.atleast_2d(np.asarray(grid, dtype=complex))
    psi = fit_psi(spec_dirichlet, N=N, L=L)
    delta = fit_delta(spec_robin, psi, N=N + 1)   # psi' carries one more term
    zeros = _zeros_near_grid(delta.eval, rho_grid, psi.L)
    numer = psi.eval(rho_grid.ravel()).reshape(rho_grid.shape)
    denom = delta.eval(rho_grid)
    values, mask = _masked_quotient(numer, denom, rho_grid, zeros)
    truth = error = None
    if problem is not None:
        truth, error = _truth_grids(problem, rho_grid, values, mask, False)
    wg = WeylGrid(rho_grid, values, delta_circ=numer, delta=denom, mask=mask,
                  truth=truth, error=error)
    wg.delta_circ_fit = psi
    wg.delta_fit = delta
    return wg


def m_function(spec_neumann, spec_dirichlet, N, grid, L=None, problem=None):
    """m(lambda) = psi'_N(., 0)/psi_N(., 0) for the h = 0 problem family.

    Same two fits as weyl_from_spectra with h pinned to zero (the Robin
    spectrum degenerates to the Neumann one); masking follows the
    denominator psi_N, whose zeros are the given Dirichlet eigenvalues.
    """
    rho_grid = np.atleast_2d(np.asarray(grid, dtype=complex))
    psi = fit_psi(spec_dirichlet, N=N, L=L)
    dpsi = fit_delta(spec_neumann, psi, N=N + 1, h=0.0)
    zeros = _zeros_near_grid(lambda r: psi.eval(np.asarray(r)), rho_grid,
                             psi.L)
    numer = dpsi.eval_dpsi(rho_grid)
    denom = psi.eval(rho_grid.ravel()).reshape(rho_grid.shape)
    values, mask = _masked_quotient(-numer, denom, rho_grid, zeros)
    truth = error = None
    if problem is not None:
        truth, error = _truth_grids(problem, rho_grid, values, mask, True)
    wg = WeylGrid(rho_grid, values, delta_circ=denom, delta=-numer, mask=mask,
                  truth=truth, error=error)
    wg.delta_circ_fit = psi
    wg.delta_fit = dpsi
    return wg


def product_baseline(spec_robin, spec_dirichlet, grid, L=None, problem=None):
    """Truncated-product approximations of Delta_circ, Delta and M.

    Delta_circ ~ (L^2/pi^2) prod_{n=0}^{M2} (mu_n^2 - lambda)/(n + 1/2)^2
    Delta      ~ (L^3/pi^2) (xi_0^2 - lambda)
                            prod_{n=1}^{M1} (xi_n^2 - lambda)/n^2

    built straight from the eigenvalue data with the asymptotic
    normalization constants; no fitting involved.
    """
    if L is None:
        L = getattr(spec_robin, "L", None) or getattr(spec_dirichlet, "L",
                                                      None)
    if L is None:
        raise ValueError("interval length L is needed")
    mu = np.asarray(spec_dirichlet.rhos, dtype=complex)
    xi = np.asarray(spec_robin.rhos, dtype=complex)
    if mu.size == 0 or xi.size == 0:
        raise ValueError("both spectra must be nonempty")
    rho_grid = np.atleast_2d(np.asarray(grid, dtype=complex))
    lam = rho_grid ** 2

    n_mu = np.arange(mu.size)
    delta_circ = (L ** 2 / np.pi ** 2) * np.prod(
        (mu[None, None, :] ** 2 - lam[..., None])
        / (n_mu + 0.5)[None, None, :] ** 2, axis=-1)
    delta = (L ** 3 / np.pi ** 2) * (xi[0] ** 2 - lam)
    if xi.size > 1:
        n_xi = np.arange(1, xi.size)
        delta = delta * np.prod(
            (xi[None, None, 1:] ** 2 - lam[..., None])
            / n_xi[None, None, :] ** 2, axis=-1)

    zeros = np.concatenate([xi, -xi])
    values, mask = _masked_quotient(delta_circ, delta, rho_grid, zeros)
    truth = error = None
    if problem is not None:
        truth, error = _truth_grids(problem, rho_grid, values, mask, False)
    return WeylGrid(rho_grid, values, delta_circ=delta_circ, delta=delta,
                    mask=mask, truth=truth, error=error)
