# cython: boundscheck=False, wraparound=False, cdivision=True, language_level=3
"""Compiled twin of _propagate_py: batched DOP853 for y'' = (q - rho^2) y.

Same algorithm and tableau as the NumPy backend; the per-stage loops are
typed so narrow batches don't pay Python overhead. Results agree with
the fallback to roundoff-level differences.
"""

import numpy as np

from libc.math cimport INFINITY, exp, fabs, nextafter, pow, sqrt

from ._dop853 import A as _A, B as _B, C as _C, E3 as _E3, E5 as _E5

cdef double[:, ::1] A = np.ascontiguousarray(_A)
cdef double[::1] B = np.ascontiguousarray(_B)
cdef double[::1] C = np.ascontiguousarray(_C)
cdef double[::1] E3 = np.ascontiguousarray(_E3)
cdef double[::1] E5 = np.ascontiguousarray(_E5)

cdef double SAFETY = 0.9
cdef double MIN_FACTOR = 0.2
cdef double MAX_FACTOR = 10.0
cdef double ERROR_EXPONENT = -1.0 / 8.0
cdef long MAX_STEPS = 1000000
cdef double SCALING_THRESHOLD = 30.0


cdef inline double complex _q_eval(double x, double x_lo, double dxb, Py_ssize_t mq,
                                   double complex[::1] c0, double complex[::1] c1,
                                   double complex[::1] c2, double complex[::1] c3):
    cdef Py_ssize_t j = <Py_ssize_t>((x - x_lo) / dxb)
    if j < 0:
        j = 0
    elif j >= mq:
        j = mq - 1
    cdef double u = x - (x_lo + j * dxb)
    return ((c0[j] * u + c1[j]) * u + c2[j]) * u + c3[j]


cdef void _rhs(double x, Py_ssize_t m,
               double complex[::1] c0, double complex[::1] c1,
               double complex[::1] c2, double complex[::1] c3,
               double x_lo, double dxb, Py_ssize_t mq,
               double[::1] rt, double[::1] inv_rt,
               double complex[::1] base, double[::1] two_kap,
               double complex[::1] vv, double complex[::1] out):
    cdef double complex qx = _q_eval(x, x_lo, dxb, mq, c0, c1, c2, c3)
    cdef Py_ssize_t i
    for i in range(m):
        out[i] = rt[i] * vv[m + i]
        out[m + i] = (qx * inv_rt[i] + base[i]) * vv[i] - two_kap[i] * vv[m + i]


def propagate(rho, y0, dy0, double x0, double x1, coeffs, breaks,
              double rtol=1e-12, double atol=1e-12):
    """Advance y and y' from x0 to x1 for every rho at once.

    Identical contract to the NumPy backend; see _propagate_py.propagate.
    """
    rho_a = np.ascontiguousarray(np.atleast_1d(np.asarray(rho, dtype=complex)))
    y0_a = np.array(np.broadcast_to(np.asarray(y0, dtype=complex), rho_a.shape))
    dy0_a = np.array(np.broadcast_to(np.asarray(dy0, dtype=complex), rho_a.shape))
    cdef double T = fabs(x1 - x0)
    if T == 0.0:
        return y0_a.copy(), dy0_a.copy()
    cdef double d = 1.0 if x1 >= x0 else -1.0

    c_arr = np.ascontiguousarray(np.asarray(coeffs, dtype=complex))
    b_arr = np.ascontiguousarray(np.asarray(breaks, dtype=float))
    cdef double complex[::1] c0 = c_arr[0]
    cdef double complex[::1] c1 = c_arr[1]
    cdef double complex[::1] c2 = c_arr[2]
    cdef double complex[::1] c3 = c_arr[3]
    cdef Py_ssize_t mq = b_arr.size - 1
    cdef double x_lo = b_arr[0]
    cdef double dxb = (b_arr[mq] - x_lo) / mq

    cdef Py_ssize_t m = rho_a.size
    cdef Py_ssize_t n2 = 2 * m
    cdef double complex[::1] rho_v = rho_a
    cdef double complex[::1] y0_v = y0_a
    cdef double complex[::1] dy0_v = dy0_a

    rt_np = np.empty(m, dtype=float)
    kap_np = np.empty(m, dtype=float)
    cdef double[::1] rt = rt_np
    cdef double[::1] kap = kap_np
    inv_rt_np = np.empty(m, dtype=float)
    two_kap_np = np.empty(m, dtype=float)
    cdef double[::1] inv_rt = inv_rt_np
    cdef double[::1] two_kap = two_kap_np
    base_np = np.empty(m, dtype=complex)
    cdef double complex[::1] base = base_np

    cdef Py_ssize_t i, j, s
    cdef double rho_mag, rho_max = 1.0
    for i in range(m):
        rho_mag = abs(rho_v[i])
        if rho_mag > rho_max:
            rho_max = rho_mag
        rt[i] = rho_mag if rho_mag > 1.0 else 1.0
        inv_rt[i] = 1.0 / rt[i]
        kap[i] = fabs(rho_v[i].imag) if fabs(rho_v[i].imag) * T > SCALING_THRESHOLD else 0.0
        two_kap[i] = 2.0 * kap[i]
        base[i] = -(rho_v[i] * rho_v[i] + kap[i] * kap[i]) * inv_rt[i]

    v_np = np.empty(n2, dtype=complex)
    v_new_np = np.empty(n2, dtype=complex)
    vs_np = np.empty(n2, dtype=complex)
    fcur_np = np.empty(n2, dtype=complex)
    f_new_np = np.empty(n2, dtype=complex)
    K_np = np.empty((13, n2), dtype=complex)
    cdef double complex[::1] v = v_np
    cdef double complex[::1] v_new = v_new_np
    cdef double complex[::1] vs = vs_np
    cdef double complex[::1] fcur = fcur_np
    cdef double complex[::1] f_new = f_new_np
    cdef double complex[:, ::1] K = K_np

    for i in range(m):
        v[i] = rt[i] * y0_v[i]
        v[m + i] = d * dy0_v[i] - kap[i] * y0_v[i]

    cdef double max_step = 0.5 * np.pi / rho_max
    if max_step > T:
        max_step = T

    # initial step a la Hairer: probe the local derivative scale
    _rhs(x0, m, c0, c1, c2, c3, x_lo, dxb, mq, rt, inv_rt, base, two_kap, v, fcur)
    cdef double d0 = 0.0, d1 = 0.0, d2 = 0.0, sc, av, anv, h0, h1
    for i in range(n2):
        sc = atol + abs(v[i]) * rtol
        d0 += (v[i].real**2 + v[i].imag**2) / (sc * sc)
        d1 += (fcur[i].real**2 + fcur[i].imag**2) / (sc * sc)
    d0 = sqrt(d0 / n2)
    d1 = sqrt(d1 / n2)
    h0 = 1e-6 if (d0 < 1e-5 or d1 < 1e-5) else 0.01 * d0 / d1
    if h0 > T:
        h0 = T
    for i in range(n2):
        vs[i] = v[i] + h0 * fcur[i]
    _rhs(x0 + d * h0, m, c0, c1, c2, c3, x_lo, dxb, mq, rt, inv_rt, base,
         two_kap, vs, f_new)
    for i in range(n2):
        sc = atol + abs(v[i]) * rtol
        av = abs(f_new[i] - fcur[i])
        d2 += av * av / (sc * sc)
    d2 = sqrt(d2 / n2) / h0
    if d1 <= 1e-15 and d2 <= 1e-15:
        h1 = 1e-6 if 1e-6 > h0 * 1e-3 else h0 * 1e-3
    else:
        h1 = pow(0.01 / (d1 if d1 > d2 else d2), 0.125)
    cdef double h_abs = 100 * h0
    if h1 < h_abs:
        h_abs = h1
    if T < h_abs:
        h_abs = T
    if max_step < h_abs:
        h_abs = max_step

    cdef double t = 0.0, t_new, h, min_step, err_norm, e5, e3, factor, ts
    cdef double complex acc5, acc3, acc, zz, gr
    cdef long nsteps = 0
    cdef bint step_rejected

    while t < T:
        nsteps += 1
        if nsteps > MAX_STEPS:
            raise RuntimeError("propagate: step budget exhausted")
        min_step = 10.0 * fabs(nextafter(t, INFINITY) - t)
        if h_abs < min_step:
            h_abs = min_step
        if h_abs > max_step:
            h_abs = max_step
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

            for i in range(n2):
                K[0, i] = fcur[i]
            for s in range(1, 12):
                ts = t + C[s] * h
                for i in range(n2):
                    acc = 0
                    for j in range(s):
                        acc = acc + A[s, j] * K[j, i]
                    vs[i] = v[i] + h * acc
                _rhs(x0 + d * ts, m, c0, c1, c2, c3, x_lo, dxb, mq, rt,
                     inv_rt, base, two_kap, vs, K[s])
            for i in range(n2):
                acc = 0
                for j in range(12):
                    acc = acc + B[j] * K[j, i]
                v_new[i] = v[i] + h * acc
            _rhs(x0 + d * t_new, m, c0, c1, c2, c3, x_lo, dxb, mq, rt,
                 inv_rt, base, two_kap, v_new, f_new)
            for i in range(n2):
                K[12, i] = f_new[i]

            e5 = 0.0
            e3 = 0.0
            for i in range(n2):
                av = abs(v[i])
                anv = abs(v_new[i])
                sc = atol + rtol * (av if av > anv else anv)
                acc5 = 0
                acc3 = 0
                for j in range(13):
                    acc5 = acc5 + E5[j] * K[j, i]
                    acc3 = acc3 + E3[j] * K[j, i]
                e5 += (acc5.real**2 + acc5.imag**2) / (sc * sc)
                e3 += (acc3.real**2 + acc3.imag**2) / (sc * sc)
            if e5 == 0.0 and e3 == 0.0:
                err_norm = 0.0
            else:
                err_norm = h * e5 / sqrt((e5 + 0.01 * e3) * n2)

            if err_norm < 1.0:
                if err_norm == 0.0:
                    factor = MAX_FACTOR
                else:
                    factor = SAFETY * pow(err_norm, ERROR_EXPONENT)
                    if factor > MAX_FACTOR:
                        factor = MAX_FACTOR
                if step_rejected and factor > 1.0:
                    factor = 1.0
                h_abs = h * factor
                break
            factor = SAFETY * pow(err_norm, ERROR_EXPONENT)
            if factor < MIN_FACTOR:
                factor = MIN_FACTOR
            h_abs = h * factor
            step_rejected = True

        t = t_new
        for i in range(n2):
            v[i] = v_new[i]
            fcur[i] = f_new[i]

    y1_np = np.empty(m, dtype=complex)
    dy1_np = np.empty(m, dtype=complex)
    cdef double complex[::1] y1 = y1_np
    cdef double complex[::1] dy1 = dy1_np
    for i in range(m):
        gr = exp(kap[i] * T)
        zz = v[i] * inv_rt[i]
        y1[i] = zz * gr
        dy1[i] = d * (v[m + i] + kap[i] * zz) * gr
    return y1_np, dy1_np
