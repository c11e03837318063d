"""Cardinal (sinc) series representations of Sturm-Liouville solutions.

Each basic solution (S, phi, psi, T and their x-derivatives) is written as a
closed-form head plus a sinc sampling series whose coefficients are solution
values on an arithmetic grid of rho sample points.  Two families exist: the
plain L2 forms, and the W21 forms that pull two more leading terms out of the
series and gain rho^-2 / rho^-3 tail decay in exchange.

Twelve kinds are supported (left anchor y=x, right anchor y=x-L):

    S_L2, dS, T_L2, dT        half-integer samples (2n+1)pi/(2|y|)
    Phi_L2, dPhi, Psi_L2, dPsi integer samples n*pi/|y|, n=0..N-1
    S_W21, T_W21              half-integer samples, extra 1/rho^2 leading terms
    Phi_W21, Psi_W21          integer samples n=1..N

All evaluation is vectorized over rho and numerically stable at the removable
points (the sample points themselves and rho=0).  The only genuine
singularity is the 1/rho^2 pole that the *truncated* S_W21/T_W21 sums carry;
its coefficient is `pole_residue()` and eval returns the finite part at
exactly rho=0.
"""

import numpy as np

from . import ode
from .core import Potential, SLProblem

KINDS = ("S_L2", "dS", "T_L2", "dT", "Phi_L2", "dPhi", "Psi_L2", "dPsi",
         "S_W21", "T_W21", "Phi_W21", "Psi_W21")

_LEFT = frozenset(("S_L2", "dS", "Phi_L2", "dPhi", "S_W21", "Phi_W21"))
_HALF = frozenset(("S_L2", "dS", "T_L2", "dT", "S_W21", "T_W21"))
_START1 = frozenset(("Phi_W21", "Psi_W21"))
_W21 = frozenset(("S_W21", "T_W21", "Phi_W21", "Psi_W21"))

_LEADING_KEYS = {
    "S_L2": (), "Phi_L2": (), "T_L2": (), "Psi_L2": (),
    "dS": ("omega",), "dPhi": ("omega_h",),
    "dT": ("omega_L",), "dPsi": ("omega_H",),
    "S_W21": ("omega", "q_plus"), "Phi_W21": ("omega_h", "q_h"),
    "T_W21": ("omega_L", "q_L"), "Psi_W21": ("omega_H", "q_LH"),
}

MAX_SAMPLE_RHO = 1e6   # refuse anchors so close to the degenerate endpoint
                       # that the sample points run off to absurd frequencies

_SMALL = 0.5           # |rho*y| below which the series-head cancellations
                       # switch to their Taylor-stable forms


# ---------------------------------------------------------------------------
# elementary special functions, complex-safe

def sinc(z):
    """Normalized sinc: sin(pi z)/(pi z), 1 at 0.  Complex-safe."""
    z = np.asarray(z, dtype=complex)
    w = np.pi * z
    small = np.abs(w) < 1e-4
    out = np.empty_like(w)
    ws = w[small]
    out[small] = 1.0 - ws * ws / 6.0 * (1.0 - ws * ws / 20.0)
    wb = w[~small]
    out[~small] = np.sin(wb) / wb
    return out if out.ndim else out[()]


# Taylor coefficients of j1(z)/z = sum c_k z^(2k); c_k = (-1)^k (2k+2)/(2k+3)!
_J1_OVER_COEFFS = [1.0 / 3, -1.0 / 30, 1.0 / 840, -1.0 / 45360,
                   1.0 / 3991680, -1.0 / 518918400, 1.0 / 93405312000]


def _j1_over(z):
    # j1(z)/z, stable near 0 (limit 1/3)
    z = np.asarray(z, dtype=complex)
    small = np.abs(z) < _SMALL
    out = np.empty_like(z)
    zs2 = z[small] ** 2
    acc = np.zeros_like(zs2)
    for c in reversed(_J1_OVER_COEFFS):
        acc = acc * zs2 + c
    out[small] = acc
    zb = z[~small]
    out[~small] = (sinc(zb / np.pi) - np.cos(zb)) / zb ** 2
    return out


def j1(z):
    """Spherical Bessel j1, via (sinc(z/pi)-cos z)/z with a Taylor series
    taking over for small |z| where the subtraction would cancel."""
    z = np.asarray(z, dtype=complex)
    out = z * _j1_over(z)
    return out if out.ndim else out[()]


def zj1(z):
    """z*j1(z) = sinc(z/pi) - cos(z), computed from whichever side is stable."""
    z = np.asarray(z, dtype=complex)
    small = np.abs(z) < _SMALL
    out = np.empty_like(z)
    zs = z[small]
    out[small] = zs * zs * _j1_over(zs)
    zb = z[~small]
    out[~small] = sinc(zb / np.pi) - np.cos(zb)
    return out if out.ndim else out[()]


def sin_over_rho(rho, y):
    """sin(rho*y)/rho = y*sinc(rho*y/pi); finite (= y) at rho=0."""
    return y * sinc(np.asarray(rho, dtype=complex) * y / np.pi)


def j1_scaled(rho, y):
    """(y/rho)*j1(rho*y) = y^2 * j1(u)/u at u=rho*y; finite (= y^2/3) at 0."""
    return y * y * _j1_over(np.asarray(rho, dtype=complex) * y)


def _c2(u):
    # (1 - cos u)/u^2, limit 1/2
    u = np.asarray(u, dtype=complex)
    small = np.abs(u) < 0.25
    out = np.empty_like(u)
    us2 = u[small] ** 2
    acc = np.zeros_like(us2)
    for c in (1.0 / 3628800, -1.0 / 40320, 1.0 / 720, -1.0 / 24, 1.0 / 2):
        acc = acc * us2 + c
    out[small] = acc
    ub = u[~small]
    out[~small] = (1.0 - np.cos(ub)) / ub ** 2
    return out


def _s3(u):
    # (u - sin u)/u^3, limit 1/6
    u = np.asarray(u, dtype=complex)
    small = np.abs(u) < 0.25
    out = np.empty_like(u)
    us2 = u[small] ** 2
    acc = np.zeros_like(us2)
    for c in (1.0 / 39916800, -1.0 / 362880, 1.0 / 5040, -1.0 / 120, 1.0 / 6):
        acc = acc * us2 + c
    out[small] = acc
    ub = u[~small]
    out[~small] = (ub - np.sin(ub)) / ub ** 3
    return out


# ---------------------------------------------------------------------------
# the two sinc-pair basis families
#
# Integer family (phi/psi kinds):   B_n(rho;y) = sinc(b-n) + sinc(b+n),
# b = rho*y/pi.  Half-integer family (S/T kinds): the series bracket
# sinc(a-(2n+1)) + sinc(a+(2n+1)), a = 2*rho*y/pi, always appears divided by
# 2*rho*sin(rho*y); the product form below cancels that prefactor exactly, so
# there is nothing to evaluate at the removable points.

def sinc_pair(rho, y, ns):
    """B_n(rho;y): matrix of sinc(rho y/pi - n) + sinc(rho y/pi + n),
    shape (len(ns), len(rho))."""
    rho = np.atleast_1d(np.asarray(rho, dtype=complex))
    ns = np.asarray(ns)[:, None]
    b = rho[None, :] * y / np.pi
    return sinc(b - ns) + sinc(b + ns)


def sinc_pair_half(rho, y, ns):
    """F_n(rho;y): the half-integer sinc bracket including its 1/(2 rho
    sin(rho y)) prefactor, in the cancelled pole-free form

        F_n = (2y(-1)^n/pi) * sinc((a-(2n+1))/2) / (a+(2n+1)),   a=2 rho y/pi

    with a sign-normalized to Re a >= 0 (F_n is even in rho).  Finite
    everywhere: 4y/(pi^2 (2n+1)^2) at rho=0 and (-1)^n y/((2n+1)pi) at the
    sample point rho=(2n+1)pi/(2|y|).  Shape (len(ns), len(rho))."""
    rho = np.atleast_1d(np.asarray(rho, dtype=complex))
    m = 2 * np.asarray(ns)[:, None] + 1
    a = 2.0 * rho[None, :] * y / np.pi
    flip = (a.real < 0) | ((a.real == 0) & (a.imag < 0))
    a = np.where(flip, -a, a)
    sign = np.where(m % 4 == 1, 1.0, -1.0)   # (-1)^n
    return (2.0 * y / np.pi) * sign * sinc((a - m) / 2.0) / (a + m)


def _pair_half_zero(y, ns):
    # F_n(0;y)
    m = 2 * np.asarray(ns) + 1
    return 4.0 * y / (np.pi ** 2 * m.astype(float) ** 2)


def _pair_div_rho2(rho, y, ns):
    # C_n(rho;y) = B_n(rho;y)/rho^2 for n>=1, stable for small rho through
    # C_n = (-1)^n 2 (y/pi)^2 sinc(b)/(b^2-n^2); equals -2(-1)^n y^2/(pi n)^2
    # at rho=0.
    rho = np.atleast_1d(np.asarray(rho, dtype=complex))
    ns = np.asarray(ns)
    b = rho * y / np.pi
    small = np.abs(b) <= 0.5
    nn = ns[:, None]
    sign = np.where(nn % 2 == 0, 1.0, -1.0)
    out = np.empty((ns.size, rho.size), dtype=complex)
    bs = b[small]
    out[:, small] = sign * 2.0 * (y / np.pi) ** 2 * sinc(bs)[None, :] \
        / (bs[None, :] ** 2 - nn.astype(float) ** 2)
    rb = rho[~small]
    out[:, ~small] = sinc_pair(rb, y, ns) / rb[None, :] ** 2
    return out


def _pair_half_diff(rho, y, ns):
    # G_n(rho;y) = (F_n(rho;y) - F_n(0;y))/rho^2, stable for |rho*y| < _SMALL:
    # G_n = (-4y^3/pi^2) (4/pi^2 - m^2 c2(rho y)) / (m^2 (a^2 - m^2)).
    rho = np.atleast_1d(np.asarray(rho, dtype=complex))
    m = (2 * np.asarray(ns)[:, None] + 1).astype(float)
    a2 = (2.0 * rho[None, :] * y / np.pi) ** 2
    c2 = _c2(rho * y)[None, :]
    return (-4.0 * y ** 3 / np.pi ** 2) * (4.0 / np.pi ** 2 - m ** 2 * c2) \
        / (m ** 2 * (a2 - m ** 2))


def sample_points(kind, x, L, count):
    """The rho sample grid a representation of this kind at anchor x uses."""
    if kind not in KINDS:
        raise ValueError("unknown representation kind %r" % (kind,))
    span = x if kind in _LEFT else L - x
    if not span > 0:
        raise ValueError("anchor x=%g degenerate for kind %s" % (x, kind))
    if kind in _HALF:
        ns = np.arange(count)
        pts = (2 * ns + 1) * np.pi / (2.0 * span)
    elif kind in _START1:
        pts = np.arange(1, count + 1) * np.pi / span
    else:
        pts = np.arange(count) * np.pi / span
    if pts.size and pts[-1] > MAX_SAMPLE_RHO:
        raise ValueError("sample points exceed %g; anchor x=%g is too close "
                         "to the degenerate endpoint" % (MAX_SAMPLE_RHO, x))
    return pts


class CardinalRep:
    """A truncated cardinal-series representation at a fixed anchor point.

    Holds the coefficient vector, the closed-form leading scalars the kind
    needs (omega(x), q_plus(x), ... as applicable), and evaluates the partial
    sum anywhere in the complex rho plane.
    """

    def __init__(self, kind, x, L, coeffs, leading=None):
        if kind not in KINDS:
            raise ValueError("unknown representation kind %r" % (kind,))
        leading = dict(leading or {})
        missing = [k for k in _LEADING_KEYS[kind] if k not in leading]
        if missing:
            raise ValueError("kind %s needs leading scalars %s" % (kind, missing))
        self.kind = kind
        self.x = float(x)
        self.L = float(L)
        self.coeffs = np.array(coeffs, dtype=complex)
        if self.coeffs.ndim != 1:
            raise ValueError("coeffs must be a vector")
        self.leading = leading
        self.coeffs.flags.writeable = False

    @property
    def N(self):
        return self.coeffs.size

    def sample_points(self):
        return sample_points(self.kind, self.x, self.L, self.N)

    def _ns(self):
        return np.arange(1, self.N + 1) if self.kind in _START1 \
            else np.arange(self.N)

    def pole_residue(self):
        """Coefficient of the 1/rho^2 pole the truncated sum carries.

        Nonzero only for S_W21/T_W21 (it tends to 0 as N grows); all other
        kinds evaluate to entire functions.
        """
        if self.kind == "S_W21":
            y = self.x
            return (-self.leading["omega"] + self.leading["q_plus"] * y
                    - np.sum(self.coeffs * _pair_half_zero(y, self._ns())))
        if self.kind == "T_W21":
            y = self.x - self.L
            return (self.leading["omega_L"] + self.leading["q_L"] * y
                    - np.sum(self.coeffs * _pair_half_zero(y, self._ns())))
        return 0.0 + 0.0j

    def eval(self, rho):
        """Value of the truncated representation at rho (scalar or array)."""
        scalar = np.isscalar(rho) or np.ndim(rho) == 0
        rho = np.atleast_1d(np.asarray(rho, dtype=complex))
        out = getattr(self, "_eval_" + self.kind)(rho)
        return out[0] if scalar else out

    # individual kinds --------------------------------------------------

    def _eval_S_L2(self, rho):
        y = self.x
        return sin_over_rho(rho, y) + self.coeffs @ sinc_pair_half(rho, y, self._ns())

    def _eval_dS(self, rho):
        y = self.x
        return (np.cos(rho * y) + self.leading["omega"] * sin_over_rho(rho, y)
                + self.coeffs @ sinc_pair_half(rho, y, self._ns()))

    def _eval_T_L2(self, rho):
        y = self.x - self.L
        return sin_over_rho(rho, y) + self.coeffs @ sinc_pair_half(rho, y, self._ns())

    def _eval_dT(self, rho):
        y = self.L - self.x
        return (np.cos(rho * y) + self.leading["omega_L"] * sin_over_rho(rho, y)
                + self.coeffs @ sinc_pair_half(rho, y, self._ns()))

    def _eval_Phi_L2(self, rho):
        y = self.x
        return (np.cos(rho * y) - sinc(rho * y / np.pi)
                + self.coeffs @ sinc_pair(rho, y, self._ns()))

    def _eval_dPhi(self, rho):
        y = self.x
        return (-rho * np.sin(rho * y)
                - self.leading["omega_h"] * zj1(rho * y)
                + self.coeffs @ sinc_pair(rho, y, self._ns()))

    def _eval_Psi_L2(self, rho):
        y = self.x - self.L
        return (np.cos(rho * y) - sinc(rho * y / np.pi)
                + self.coeffs @ sinc_pair(rho, y, self._ns()))

    def _eval_dPsi(self, rho):
        y = self.x - self.L
        return (-rho * np.sin(rho * y)
                + self.leading["omega_H"] * zj1(rho * y)
                + self.coeffs @ sinc_pair(rho, y, self._ns()))

    def _eval_Phi_W21(self, rho):
        y = self.x
        return (np.cos(rho * y)
                + self.leading["omega_h"] * sin_over_rho(rho, y)
                - self.leading["q_h"] * j1_scaled(rho, y)
                - self.coeffs @ _pair_div_rho2(rho, y, self._ns()))

    def _eval_Psi_W21(self, rho):
        y = self.x - self.L
        return (np.cos(rho * y)
                + self.leading["omega_H"] * sin_over_rho(rho, self.L - self.x)
                - self.leading["q_LH"] * j1_scaled(rho, y)
                - self.coeffs @ _pair_div_rho2(rho, y, self._ns()))

    def _eval_sw21_common(self, rho, y, w_lead, q_lead):
        # shared S_W21/T_W21 evaluator: w_lead multiplies cos/rho^2 and
        # q_lead multiplies sin/rho^3
        ns = self._ns()
        out = np.empty_like(rho)
        small = np.abs(rho * y) < _SMALL
        if np.any(small):
            rs = rho[small]
            delta = self.pole_residue()
            head = y * sinc(rs * y / np.pi) \
                - w_lead * y ** 2 * _c2(rs * y) \
                - q_lead * y ** 3 * _s3(rs * y) \
                - self.coeffs @ _pair_half_diff(rs, y, ns)
            pole = np.zeros_like(rs)
            nz = rs != 0
            pole[nz] = delta / rs[nz] ** 2   # finite part only at rho=0
            out[small] = head + pole
        if np.any(~small):
            rb = rho[~small]
            out[~small] = (sin_over_rho(rb, y)
                           + w_lead * np.cos(rb * y) / rb ** 2
                           + q_lead * sin_over_rho(rb, y) / rb ** 2
                           - (self.coeffs @ sinc_pair_half(rb, y, ns)) / rb ** 2)
        return out

    def _eval_S_W21(self, rho):
        return self._eval_sw21_common(rho, self.x,
                                      -self.leading["omega"],
                                      self.leading["q_plus"])

    def _eval_T_W21(self, rho):
        return self._eval_sw21_common(rho, self.x - self.L,
                                      self.leading["omega_L"],
                                      self.leading["q_L"])


def leading_scalars(kind, problem, x):
    """Closed-form scalars a representation kind pulls out of the series."""
    if isinstance(problem, Potential):
        pot, h, H = problem, None, None
    else:
        pot, h, H = problem.potential, problem.h, problem.H
    keys = _LEADING_KEYS[kind]
    if not keys:
        return {}
    out = {}
    om = pot.omega(x)
    om_L = pot.omega_L(x)
    if "omega" in keys:
        out["omega"] = om
    if "omega_L" in keys:
        out["omega_L"] = om_L
    if "omega_h" in keys:
        if h is None:
            raise ValueError("kind %s needs a Robin condition at 0" % kind)
        out["omega_h"] = h + om
    if "omega_H" in keys:
        if H is None:
            raise ValueError("kind %s needs a Robin condition at L" % kind)
        out["omega_H"] = H + om_L
    if "q_plus" in keys:
        out["q_plus"] = (pot.q(x) + pot.q(0.0)) / 4.0 - om ** 2 / 2.0
    if "q_h" in keys:
        out["q_h"] = (pot.q(x) - pot.q(0.0)) / 4.0 - om ** 2 / 2.0 - h * om
    if "q_L" in keys:
        out["q_L"] = (pot.q(x) + pot.q(pot.L)) / 4.0 - om_L ** 2 / 2.0
    if "q_LH" in keys:
        out["q_LH"] = (pot.q(x) - pot.q(pot.L)) / 4.0 - om_L ** 2 / 2.0 - H * om_L
    return out


_BASE_SOLUTION = {
    "S_L2": ("S", 0), "dS": ("S", 1), "T_L2": ("T", 0), "dT": ("T", 1),
    "Phi_L2": ("phi", 0), "dPhi": ("phi", 1), "Psi_L2": ("psi", 0),
    "dPsi": ("psi", 1), "S_W21": ("S", 0), "T_W21": ("T", 0),
    "Phi_W21": ("phi", 0), "Psi_W21": ("psi", 0),
}


def build_rep(kind, problem, x, N, rtol=ode.DEFAULT_RTOL, atol=ode.DEFAULT_ATOL):
    """Construct a CardinalRep by sampling the base solution.

    `problem` is an SLProblem (or a bare Potential for the S/T kinds).  The
    kind's base solution is integrated once at all N sample points; the
    coefficients then come from the exact algebraic inversion of the series
    at those points.
    """
    if isinstance(problem, Potential):
        pot = problem
    else:
        pot = problem.potential
    if kind in _W21 and pot.regularity != "W21":
        raise ValueError("kind %s needs a W21-regular potential" % kind)
    L = pot.L
    if kind in _LEFT:
        if not 0.0 < x <= L:
            raise ValueError("left-anchored kinds need x in (0, L]")
    else:
        if not 0.0 <= x < L:
            raise ValueError("right-anchored kinds need x in [0, L)")
    pts = sample_points(kind, x, L, N)
    lead = leading_scalars(kind, problem, x)
    base, want_deriv = _BASE_SOLUTION[kind]
    vals, dvals = ode.solution(base, problem, pts, x, rtol=rtol, atol=atol)
    samp = dvals if want_deriv else vals
    span = x if kind in _LEFT else L - x
    ns = np.arange(1, N + 1) if kind in _START1 else np.arange(N)
    sign = np.where(ns % 2 == 0, 1.0, -1.0)

    if kind == "S_L2":
        coeffs = sign * (2 * ns + 1) * np.pi / x * samp - 2.0
    elif kind == "dS":
        coeffs = sign * (2 * ns + 1) * np.pi / x * samp - 2.0 * lead["omega"]
    elif kind == "T_L2":
        coeffs = sign * (2 * ns + 1) * np.pi / (x - L) * samp - 2.0
    elif kind == "dT":
        coeffs = sign * (2 * ns + 1) * np.pi / (L - x) * samp - 2.0 * lead["omega_L"]
    elif kind == "Phi_L2":
        coeffs = samp - sign
        coeffs[0] = samp[0] / 2.0
    elif kind == "dPhi":
        coeffs = samp - sign * lead["omega_h"]
        coeffs[0] = samp[0] / 2.0
    elif kind == "Psi_L2":
        coeffs = samp - sign
        coeffs[0] = samp[0] / 2.0
    elif kind == "dPsi":
        coeffs = samp + sign * lead["omega_H"]
        coeffs[0] = samp[0] / 2.0
    elif kind == "S_W21":
        coeffs = -2.0 * sign * pts ** 3 * samp + 2.0 * pts ** 2 + 2.0 * lead["q_plus"]
    elif kind == "T_W21":
        coeffs = 2.0 * sign * pts ** 3 * samp + 2.0 * pts ** 2 + 2.0 * lead["q_L"]
    elif kind == "Phi_W21":
        coeffs = pts ** 2 * (sign - samp) + sign * lead["q_h"]
    else:  # Psi_W21
        coeffs = pts ** 2 * (sign - samp) + sign * lead["q_LH"]
    return CardinalRep(kind, x, L, coeffs, lead)


def amplitude_bound(epsilon, x, C=0.0, M=1.0):
    """Worst-case effect of perturbing every series coefficient by epsilon.

    Valid for 0 < epsilon <= min(x/pi, pi/x, 1/sqrt(e)); the perturbation of
    the evaluated series anywhere in the strip |Im rho| <= C is at most

        4 (sqrt(3) e + sqrt(2) M e^(1/4)) epsilon log(1/epsilon) e^(C x).
    """
    limit = min(x / np.pi, np.pi / x, 1.0 / np.sqrt(np.e))
    if not 0.0 < epsilon <= limit:
        raise ValueError("epsilon must lie in (0, %g]" % limit)
    return (4.0 * (np.sqrt(3.0) * np.e + np.sqrt(2.0) * M * np.exp(0.25))
            * epsilon * np.log(1.0 / epsilon) * np.exp(C * x))
