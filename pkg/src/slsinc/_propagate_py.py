"""Batched DOP853 propagation of y'' = (q(x) - rho^2) y  (NumPy backend).

A whole vector of rho values is advanced in lockstep: every batch member
shares the accepted step sequence, so the potential spline is evaluated
once per stage no matter how wide the batch is. The state is kept in the
scaled variables (rho~ * y, y') with rho~ = max(1, |rho|) so that both
components stay comparable in size, and for strongly complex rho the
substitution y = z * exp(kappa * t), kappa = |Im rho|, removes the
exponential envelope before the error control sees it.
"""

import numpy as np

from ._dop853 import A, B, C, E3, E5, N_STAGES

SAFETY = 0.9
MIN_FACTOR = 0.2
MAX_FACTOR = 10.0
ERROR_EXPONENT = -1.0 / 8.0
MAX_STEPS = 1000000
SCALING_THRESHOLD = 30.0


def _rms(a):
    return float(np.sqrt(np.mean(np.abs(a) ** 2)))


def _q_factory(coeffs, breaks):
    """Scalar evaluator for a piecewise cubic on a uniform grid."""
    c0, c1, c2, c3 = np.asarray(coeffs, dtype=complex)
    b = np.asarray(breaks, dtype=float)
    m = b.size - 1
    x_lo = b[0]
    dxb = (b[-1] - x_lo) / m

    def q(x):
        j = int((x - x_lo) / dxb)
        if j < 0:
            j = 0
        elif j >= m:
            j = m - 1
        u = x - (x_lo + j * dxb)
        return ((c0[j] * u + c1[j]) * u + c2[j]) * u + c3[j]

    return q


def propagate(rho, y0, dy0, x0, x1, coeffs, breaks, rtol=1e-12, atol=1e-12):
    """Advance y and y' from x0 to x1 for every rho at once.

    Parameters
    ----------
    rho : complex array (m,)
        Spectral parameters; the equation is y'' = (q - rho^2) y.
    y0, dy0 : complex arrays broadcastable to (m,)
        Values and x-derivatives at x0.
    x0, x1 : float
        Endpoints; x1 may lie on either side of x0.
    coeffs, breaks : arrays
        Piecewise-cubic data of q as returned by
        Potential.spline_coefficients().
    rtol, atol : float
        Local error tolerances of the embedded 8(5,3) pair.

    Returns
    -------
    y1, dy1 : complex arrays (m,)
    """
    rho = np.atleast_1d(np.asarray(rho, dtype=complex))
    y0 = np.broadcast_to(np.asarray(y0, dtype=complex), rho.shape)
    dy0 = np.broadcast_to(np.asarray(dy0, dtype=complex), rho.shape)
    T = abs(x1 - x0)
    if T == 0.0:
        return y0.copy(), dy0.copy()
    d = 1.0 if x1 >= x0 else -1.0

    qfun = _q_factory(coeffs, breaks)
    rt = np.maximum(1.0, np.abs(rho))
    inv_rt = 1.0 / rt
    kap = np.where(np.abs(rho.imag) * T > SCALING_THRESHOLD,
                   np.abs(rho.imag), 0.0)
    base = -(rho * rho + kap * kap) * inv_rt
    two_kap = 2.0 * kap

    def rhs(t, v):
        qx = qfun(x0 + d * t)
        out = np.empty_like(v)
        out[0] = rt * v[1]
        out[1] = (qx * inv_rt + base) * v[0] - two_kap * v[1]
        return out

    v = np.empty((2, rho.size), dtype=complex)
    v[0] = rt * y0
    v[1] = d * dy0 - kap * y0
    n = v.size

    max_step = min(T, 0.5 * np.pi / max(1.0, float(np.max(np.abs(rho)))))

    # initial step a la Hairer: probe the local derivative scale
    f0 = rhs(0.0, v)
    scale0 = atol + np.abs(v) * rtol
    d0 = _rms(v / scale0)
    d1 = _rms(f0 / scale0)
    h0 = 1e-6 if (d0 < 1e-5 or d1 < 1e-5) else 0.01 * d0 / d1
    h0 = min(h0, T)
    d2 = _rms((rhs(h0, v + h0 * f0) - f0) / scale0) / h0
    if max(d1, d2) <= 1e-15:
        h1 = max(1e-6, h0 * 1e-3)
    else:
        h1 = (0.01 / max(d1, d2)) ** 0.125
    h_abs = min(100 * h0, h1, T, max_step)

    K = np.empty((N_STAGES + 1,) + v.shape, dtype=complex)
    fcur = f0
    t = 0.0
    nsteps = 0
    while t < T:
        nsteps += 1
        if nsteps > MAX_STEPS:
            raise RuntimeError("propagate: step budget exhausted")
        min_step = 10.0 * abs(np.nextafter(t, np.inf) - t)
        h_abs = min(max(h_abs, min_step), max_step)
        step_rejected = False
        while True:
            if h_abs < min_step:
                raise RuntimeError("propagate: step size underflow")
            h = h_abs
            t_new = t + h
            if t_new > T:
                t_new = T
            h = t_new - t
            h_abs = h

            K[0] = fcur
            for s in range(1, N_STAGES):
                dv = h * np.tensordot(A[s, :s], K[:s], axes=(0, 0))
                K[s] = rhs(t + C[s] * h, v + dv)
            v_new = v + h * np.tensordot(B, K[:N_STAGES], axes=(0, 0))
            f_new = rhs(t_new, v_new)
            K[N_STAGES] = f_new

            scale = atol + rtol * np.maximum(np.abs(v), np.abs(v_new))
            err5 = np.tensordot(E5, K, axes=(0, 0)) / scale
            err3 = np.tensordot(E3, K, axes=(0, 0)) / scale
            e5 = float(np.sum(err5.real**2 + err5.imag**2))
            e3 = float(np.sum(err3.real**2 + err3.imag**2))
            if e5 == 0.0 and e3 == 0.0:
                err_norm = 0.0
            else:
                err_norm = h * e5 / np.sqrt((e5 + 0.01 * e3) * n)

            if err_norm < 1.0:
                if err_norm == 0.0:
                    factor = MAX_FACTOR
                else:
                    factor = min(MAX_FACTOR, SAFETY * err_norm**ERROR_EXPONENT)
                if step_rejected:
                    factor = min(1.0, factor)
                h_abs = h * factor
                break
            h_abs = h * max(MIN_FACTOR, SAFETY * err_norm**ERROR_EXPONENT)
            step_rejected = True

        t = t_new
        v = v_new
        fcur = f_new

    growth = np.exp(kap * T)
    z = v[0] * inv_rt
    y1 = z * growth
    dy1 = d * (v[1] + kap * z) * growth
    return y1, dy1
