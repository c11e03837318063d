"""Shared dense linear algebra and grid helpers.

Everything downstream (completion, Weyl fits, the inverse solver) funnels its
fitting work through solve_lstsq, so the conditioning policy lives in one
place: columns are equilibrated to unit max-magnitude before the factorization
and the singular-value cutoff is applied to the scaled matrix.
"""

import numpy as np


class LinearSystem:
    """Dense complex least-squares system A x = b with optional column labels."""

    def __init__(self, matrix, rhs, column_labels=None):
        matrix = np.asarray(matrix, dtype=complex)
        rhs = np.asarray(rhs, dtype=complex)
        if matrix.ndim != 2:
            raise ValueError("matrix must be 2-d")
        if rhs.shape != (matrix.shape[0],):
            raise ValueError("rhs length %d does not match %d rows"
                             % (rhs.size, matrix.shape[0]))
        if not (np.all(np.isfinite(matrix)) and np.all(np.isfinite(rhs))):
            raise ValueError("system contains non-finite entries")
        if column_labels is not None and len(column_labels) != matrix.shape[1]:
            raise ValueError("need one label per column")
        self.matrix = matrix
        self.rhs = rhs
        self.column_labels = list(column_labels) if column_labels else None


def solve_lstsq(sys, cutoff=1e-13, equilibrate=True):
    """Minimum-norm least-squares solution of a LinearSystem.

    With `equilibrate` (the default) columns are scaled to unit max-magnitude
    first (the spectrum fits mix rho^3-sized columns with sinc-sized ones),
    then numpy's SVD-based lstsq runs with `cutoff` as the relative
    singular-value threshold.  Columns negligible against the largest column
    (max magnitude below 1e-13 of the overall largest entry) are pure rounding
    noise -- equilibration would amplify them into garbage unknowns -- so they
    are dropped and their unknowns set to zero.

    `equilibrate=False` skips the scaling and solves the raw system: the right
    choice when all unknowns are a-priori of comparable size and columns may
    legitimately degenerate to zero (the per-x inverse systems near the
    interval ends), where the minimum of the *unscaled* ||x|| is the sensible
    tie-break.

    Returns (x, residual) where residual is ||A x - b|| of the *original*
    system.
    """
    A = sys.matrix
    b = sys.rhs
    if not equilibrate:
        x, _, rank, _ = np.linalg.lstsq(A, b, rcond=cutoff)
        if rank == 0:
            raise RuntimeError("least-squares matrix has rank zero")
        return x, float(np.linalg.norm(A @ x - b))
    colmax = np.max(np.abs(A), axis=0)
    live = colmax > 1e-13 * np.max(colmax)
    if not np.any(live):
        raise RuntimeError("least-squares matrix has rank zero")
    A_live = A[:, live]
    scale = np.max(np.abs(A_live), axis=0)
    x_scaled, _, rank, _ = np.linalg.lstsq(A_live / scale, b, rcond=cutoff)
    if rank == 0:
        raise RuntimeError("least-squares matrix has rank zero")
    x = np.zeros(A.shape[1], dtype=complex)
    x[live] = x_scaled / scale
    residual = float(np.linalg.norm(A @ x - b))
    return x, residual


# Precomputed smoothing-derivative weights: fit a low-degree polynomial through
# a 7-point window by least squares and read off the derivative at the
# evaluation point.  _weights[p][k] is the length-7 weight vector for the k-th
# derivative when the evaluation point sits at offset p inside the window.
# Centered windows use degree 4; the one-sided edge windows use degree 5, which
# knocks the extrapolation bias of the second derivative down from O(h^3) to
# O(h^4) while still reproducing quartics exactly.
def _window_weights():
    weights = []
    for p in range(7):
        t = np.arange(7, dtype=float) - p
        deg = 4 if p == 3 else 5
        V = np.vander(t, deg + 1, increasing=True)  # 7 x (deg+1)
        pinv = np.linalg.pinv(V)                    # (deg+1) x 7
        weights.append((pinv[1], 2.0 * pinv[2]))    # d/dt, d^2/dt^2 at t=0
    return weights


_WEIGHTS = _window_weights()


def differentiate(samples, dx, order=1):
    """Smoothed derivative of uniformly spaced samples.

    Local least-squares fit of a degree-4 polynomial over a sliding 7-point
    window (one-sided windows at the edges); exact on polynomials up to
    degree 4.  order=1 or 2.  Needs at least 9 samples.
    """
    samples = np.asarray(samples)
    n = samples.size
    if n < 9:
        raise ValueError("need at least 9 samples, got %d" % n)
    if order not in (1, 2):
        raise ValueError("order must be 1 or 2")
    if not dx > 0:
        raise ValueError("dx must be positive")
    out = np.empty(n, dtype=samples.dtype if samples.dtype.kind == "c" else float)
    for i in range(n):
        w0 = min(max(i - 3, 0), n - 7)
        w = _WEIGHTS[i - w0][order - 1]
        out[i] = w @ samples[w0:w0 + 7]
    return out / dx ** order


def log_grid(a, b, count, avoid=()):
    """Geometric grid of `count` points from a to b.

    Any point landing within 1e-6 of a value in `avoid` (sinc sample
    abscissae, typically) is nudged up by 1e-5*a so evaluations never sit on
    a removable singularity.
    """
    if not (0.0 < a < b):
        raise ValueError("need 0 < a < b")
    if count < 2:
        raise ValueError("need at least 2 points")
    grid = np.geomspace(a, b, count)
    if len(avoid):
        avoid = np.sort(np.asarray(avoid, dtype=float))
        for i in range(grid.size):
            while avoid.size:
                j = np.searchsorted(avoid, grid[i])
                near = min(abs(grid[i] - avoid[k]) for k in (max(j - 1, 0),
                                                             min(j, avoid.size - 1)))
                if near >= 1e-6:
                    break
                grid[i] += 1e-5 * a
    return grid
