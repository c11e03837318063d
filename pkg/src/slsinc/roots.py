"""Zero location for analytic functions supplied as batched callables.

Every routine here takes a function f that accepts an ndarray of points
and returns the values at all of them in one call; the expensive
characteristic functions built on ODE propagation or long series are
cheap per extra point, so all refinement logic is written to evaluate
points in bulk.
"""

import numpy as np

# slightly off-center split fractions so that subdivision lines don't land
# on the real axis (or other symmetry lines) where zeros like to sit
_SPLIT_X = 0.531
_SPLIT_Y = 0.477


def _corners(z0, z1):
    z0 = complex(z0)
    z1 = complex(z1)
    x0, x1 = sorted((z0.real, z1.real))
    y0, y1 = sorted((z0.imag, z1.imag))
    return x0, x1, y0, y1


def _winding_once(f, x0, x1, y0, y1, per_edge, min_len, sample_spacing):
    corners = [complex(x0, y0), complex(x1, y0), complex(x1, y1), complex(x0, y1)]
    pieces = []
    for i in range(4):
        a, b = corners[i], corners[(i + 1) % 4]
        n = per_edge
        if sample_spacing is not None:
            n = max(n, int(np.ceil(abs(b - a) / sample_spacing)))
        pieces.append(a + (b - a) * (np.arange(n) / n))
    za = np.concatenate(pieces)
    fa = np.asarray(f(za))
    if np.any(np.abs(fa) < 1e-290):
        return None
    zb = np.roll(za, -1)
    fb = np.roll(fa, -1)
    total = 0.0
    for _ in range(200):
        dphi = np.angle(fb / fa)
        ok = np.abs(dphi) < 0.5 * np.pi
        total += float(dphi[ok].sum())
        if ok.all():
            turns = total / (2.0 * np.pi)
            n = int(round(turns))
            if abs(turns - n) > 0.25:
                return None
            return n
        za, zb = za[~ok], zb[~ok]
        fa, fb = fa[~ok], fb[~ok]
        if np.any(np.abs(zb - za) < min_len):
            return None  # phase still jumping on a tiny segment: zero on contour
        zm = 0.5 * (za + zb)
        fm = np.asarray(f(zm))
        if np.any(np.abs(fm) < 1e-290):
            return None
        za = np.concatenate([za, zm])
        zb = np.concatenate([zm, zb])
        fa = np.concatenate([fa, fm])
        fb = np.concatenate([fm, fb])
    return None


def winding_count(f, z0, z1, per_edge=16, retries=5, sample_spacing=None):
    """Number of zeros of f (with multiplicity) inside a rectangle.

    z0, z1 are opposite corners. The boundary polyline is refined until
    consecutive phase increments stay below pi/2; if a zero sits on (or
    hugs) the contour the rectangle is puffed out by ~1e-8 of its
    diagonal and the count is retried. Phase refinement cannot detect a
    full turn hiding between two samples, so when zeros are known to be
    roughly `d` apart pass sample_spacing <= d/2 to seed long edges
    densely enough.
    """
    x0, x1, y0, y1 = _corners(z0, z1)
    diag = float(np.hypot(x1 - x0, y1 - y0))
    if diag == 0.0:
        raise ValueError("degenerate rectangle")
    min_len = 1e-13 * diag
    for attempt in range(retries + 1):
        pad = attempt * 1e-8 * diag
        n = _winding_once(f, x0 - pad, x1 + pad, y0 - pad, y1 + pad,
                          per_edge, min_len, sample_spacing)
        if n is not None:
            return n
    raise RuntimeError("winding_count: boundary phase did not settle "
                       "(zero on the contour?)")


def _secant_batch(f, z_start, spread, tol, max_iter=80):
    """Lockstep complex secant from a batch of starting guesses."""
    z0 = np.asarray(z_start, dtype=complex)
    z1 = z0 + spread
    f0 = np.asarray(f(z0))
    f1 = np.asarray(f(z1))
    out = z1.copy()
    active = np.ones(z0.shape, dtype=bool)
    for _ in range(max_iter):
        df = f1 - f0
        stuck = np.abs(df) == 0.0
        step = np.where(stuck, 0.0, f1 * (z1 - z0) / np.where(stuck, 1.0, df))
        z2 = z1 - step
        done = (np.abs(z2 - z1) < tol) | stuck
        out[active] = z2
        newly = active.copy()
        newly[active] = done
        active[newly] = False
        if not active.any():
            break
        keep = ~done
        z0, z1 = z1[keep], z2[keep]
        f0 = f1[keep]
        f1 = np.asarray(f(z1))
    return out


def locate_zeros(f, z0, z1, tol=1e-10, max_depth=40, sample_spacing=None):
    """All zeros of an analytic f inside the rectangle with corners z0, z1.

    Quadrisects by winding count until each live box holds one zero and
    is small, then polishes every zero with a lockstep secant iteration
    down to |dz| < tol. Boxes that refuse to split (multiple zeros
    within ~10*tol of each other) are reported as their center repeated
    by multiplicity. Returns a complex array sorted by real part.
    """
    x0, x1, y0, y1 = _corners(z0, z1)
    total = winding_count(f, complex(x0, y0), complex(x1, y1),
                          sample_spacing=sample_spacing)
    if total == 0:
        return np.empty(0, dtype=complex)

    stack = [(x0, x1, y0, y1, total, 0)]
    singles = []
    spreads = []
    clustered = []
    while stack:
        bx0, bx1, by0, by1, cnt, depth = stack.pop()
        diag = float(np.hypot(bx1 - bx0, by1 - by0))
        center = complex(0.5 * (bx0 + bx1), 0.5 * (by0 + by1))
        if cnt == 1 and diag <= 1e3 * tol:
            singles.append(center)
            spreads.append(0.25 * diag * (0.8 + 0.6j))
            continue
        if diag <= 10 * tol or depth >= max_depth:
            clustered.extend([center] * cnt)
            continue
        xm = bx0 + _SPLIT_X * (bx1 - bx0)
        ym = by0 + _SPLIT_Y * (by1 - by0)
        found = 0
        for cx0, cx1, cy0, cy1 in ((bx0, xm, by0, ym), (xm, bx1, by0, ym),
                                   (bx0, xm, ym, by1), (xm, bx1, ym, by1)):
            c = winding_count(f, complex(cx0, cy0), complex(cx1, cy1),
                              sample_spacing=sample_spacing)
            if c > 0:
                stack.append((cx0, cx1, cy0, cy1, c, depth + 1))
                found += c
            if found == cnt:
                break

    if singles:
        polished = _secant_batch(f, np.array(singles), np.array(spreads), tol)
        pad = 1e3 * tol
        inside = ((polished.real >= x0 - pad) & (polished.real <= x1 + pad)
                  & (polished.imag >= y0 - pad) & (polished.imag <= y1 + pad))
        polished = polished[inside]
    else:
        polished = np.empty(0, dtype=complex)

    zeros = np.concatenate([polished, np.asarray(clustered, dtype=complex)])
    order = np.lexsort((zeros.imag, zeros.real))
    return zeros[order]


def real_zeros(f, a, b, step, tol=1e-12, max_iter=100):
    """Simple real zeros of a real-valued f on [a, b] by scan + Illinois.

    The grid pitch `step` must be finer than the closest zero spacing or
    sign-change detection will skip pairs; even-order zeros are invisible
    to this routine by construction.
    """
    n = max(2, int(np.ceil((b - a) / step)) + 1)
    xs = np.linspace(a, b, n)
    fs = np.asarray(f(xs), dtype=float)
    exact = xs[fs == 0.0]
    sgn = np.sign(fs)
    idx = np.nonzero(sgn[:-1] * sgn[1:] < 0)[0]
    lo, hi = xs[idx].copy(), xs[idx + 1].copy()
    flo, fhi = fs[idx].copy(), fs[idx + 1].copy()
    side = np.zeros(idx.size, dtype=np.int8)
    for _ in range(max_iter):
        active = np.nonzero((hi - lo) > tol * (1.0 + np.abs(lo)))[0]
        if active.size == 0:
            break
        l, h = lo[active], hi[active]
        fl, fh = flo[active], fhi[active]
        x = h - fh * (h - l) / (fh - fl)
        mid = 0.5 * (l + h)
        bad = ~((x > l) & (x < h))
        x[bad] = mid[bad]
        fx = np.asarray(f(x), dtype=float)
        on_lo_side = np.sign(fx) == np.sign(fl)
        hit = fx == 0.0
        sub = active[on_lo_side & ~hit]
        lo[sub] = x[on_lo_side & ~hit]
        flo[sub] = fx[on_lo_side & ~hit]
        rep = side[sub] == -1
        fhi[sub[rep]] *= 0.5
        side[sub] = -1
        sub = active[~on_lo_side & ~hit]
        hi[sub] = x[~on_lo_side & ~hit]
        fhi[sub] = fx[~on_lo_side & ~hit]
        rep = side[sub] == 1
        flo[sub[rep]] *= 0.5
        side[sub] = 1
        sub = active[hit]
        lo[sub] = x[hit]
        hi[sub] = x[hit]
    return np.sort(np.concatenate([exact, 0.5 * (lo + hi)]))
