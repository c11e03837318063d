"""Problem data types shared across the package.

A Sturm-Liouville problem

    -y'' + q(x) y = rho^2 y   on (0, L)

is described by a complex-valued potential sampled on a uniform grid plus a
boundary condition at each endpoint (Dirichlet, or Robin y' - c*y = 0 at the
left / y' + c*y = 0 at the right). Spectra are finite sets of square roots
rho_k of eigenvalues, kept sorted by real part.
"""

import numpy as np
from scipy.interpolate import CubicSpline

DUPLICATE_TOL = 1e-10


class Potential:
    """Complex potential q on [0, L], sampled uniformly and interpolated.

    Parameters
    ----------
    L : float
        Interval length, > 0.
    samples : array_like
        Complex values q(x_i) on the uniform grid x_i = i*L/M_x,
        i = 0..M_x, so len(samples) == M_x + 1 with M_x >= 8.
    regularity : str
        'L2' or 'W21'. The W21 tag asserts q' in L2(0, L), which the
        higher-order series representations require.
    """

    def __init__(self, L, samples, regularity="W21"):
        L = float(L)
        if not L > 0.0:
            raise ValueError("interval length must be positive, got %r" % L)
        samples = np.asarray(samples, dtype=complex)
        if samples.ndim != 1 or samples.size < 9:
            raise ValueError("need at least 9 uniform samples (M_x >= 8)")
        if not np.all(np.isfinite(samples)):
            raise ValueError("potential samples must be finite")
        if regularity not in ("L2", "W21"):
            raise ValueError("regularity must be 'L2' or 'W21'")
        self.L = L
        self.samples = samples
        self.regularity = regularity
        self.M_x = samples.size - 1
        self.grid = np.linspace(0.0, L, samples.size)
        self._spline = CubicSpline(self.grid, samples)
        self._omega_spline = self._spline.antiderivative()

    @classmethod
    def from_callable(cls, q, L, M_x=2048, regularity="W21"):
        """Sample a callable q on M_x+1 uniform points of [0, L]."""
        x = np.linspace(0.0, float(L), int(M_x) + 1)
        return cls(L, np.asarray(q(x), dtype=complex), regularity)

    def q(self, x):
        """Interpolated potential value(s) at x (piecewise cubic)."""
        return self._spline(x)

    def omega(self, x):
        """omega(x) = (1/2) * integral_0^x q."""
        return 0.5 * self._omega_spline(x)

    @property
    def omega_total(self):
        """omega = (1/2) * integral_0^L q."""
        return 0.5 * complex(self._omega_spline(self.L))

    def omega_L(self, x):
        """omega_L(x) = (1/2) * integral_x^L q."""
        return self.omega_total - self.omega(x)

    def spline_coefficients(self):
        """(coeffs, breakpoints) of the interpolant, for the propagation kernel."""
        return self._spline.c, self.grid

    def __repr__(self):
        return "Potential(L=%g, M_x=%d, regularity=%s)" % (self.L, self.M_x, self.regularity)


class BoundaryCondition:
    """Endpoint condition: Dirichlet y=0, or Robin with coefficient c.

    Robin means y'(0) - c*y(0) = 0 at the left endpoint and
    y'(L) + c*y(L) = 0 at the right one (c = h resp. c = H). Neumann is
    Robin with c = 0.
    """

    def __init__(self, kind, coefficient=None):
        if kind not in ("dirichlet", "robin"):
            raise ValueError("kind must be 'dirichlet' or 'robin'")
        if kind == "robin":
            if coefficient is None:
                raise ValueError("robin condition needs a coefficient")
            coefficient = complex(coefficient)
        elif coefficient is not None:
            raise ValueError("dirichlet condition takes no coefficient")
        self.kind = kind
        self.coefficient = coefficient

    @classmethod
    def dirichlet(cls):
        return cls("dirichlet")

    @classmethod
    def robin(cls, c):
        return cls("robin", c)

    @classmethod
    def neumann(cls):
        return cls("robin", 0.0)

    def __repr__(self):
        if self.kind == "dirichlet":
            return "BoundaryCondition(dirichlet)"
        return "BoundaryCondition(robin, %r)" % self.coefficient


class SLProblem:
    """A potential plus one boundary condition at each endpoint."""

    def __init__(self, potential, bc_left, bc_right):
        self.potential = potential
        self.bc_left = bc_left
        self.bc_right = bc_right

    @property
    def L(self):
        return self.potential.L

    @property
    def h(self):
        """Left Robin coefficient, or None for a Dirichlet left end."""
        return self.bc_left.coefficient

    @property
    def H(self):
        """Right Robin coefficient, or None for a Dirichlet right end."""
        return self.bc_right.coefficient

    def __repr__(self):
        return "SLProblem(%r, left=%r, right=%r)" % (self.potential, self.bc_left, self.bc_right)


def _sorted_rhos(rhos):
    rhos = np.atleast_1d(np.asarray(rhos, dtype=complex))
    order = np.lexsort((rhos.imag, rhos.real))
    return rhos[order]


class Spectrum:
    """A finite, sorted set of square-root eigenvalues rho_k.

    Values are sorted by real part (ties by imaginary part). Two entries
    closer than 1e-10 are rejected as duplicates. `origin` records where
    the data came from: 'exact', 'noisy' or 'completed'. `L` optionally
    records the interval length of the problem the spectrum belongs to;
    the fitting routines need it and pick it up from here when present.
    """

    def __init__(self, rhos, origin="exact", noise_level=None, seed=None,
                 L=None):
        rhos = _sorted_rhos(rhos)
        if rhos.size == 0:
            raise ValueError("spectrum must contain at least one value")
        if rhos.size > 1 and np.min(np.abs(np.diff(rhos))) < DUPLICATE_TOL:
            raise ValueError("spectrum contains duplicate entries (within %g)" % DUPLICATE_TOL)
        if origin not in ("exact", "noisy", "completed"):
            raise ValueError("origin must be 'exact', 'noisy' or 'completed'")
        self.rhos = rhos
        self.origin = origin
        self.noise_level = noise_level
        self.seed = seed
        self.L = None if L is None else float(L)

    def __len__(self):
        return self.rhos.size

    def __iter__(self):
        return iter(self.rhos)

    def __getitem__(self, k):
        return self.rhos[k]

    @property
    def lambdas(self):
        """Eigenvalues lambda_k = rho_k^2."""
        return self.rhos**2

    def __repr__(self):
        return "Spectrum(n=%d, origin=%s)" % (len(self), self.origin)


class OmegaConstants:
    """The three integral constants omega, omega_H = omega + H, omega_h = omega + h."""

    def __init__(self, omega=None, omega_H=None, omega_h=None):
        self.omega = None if omega is None else complex(omega)
        self.omega_H = None if omega_H is None else complex(omega_H)
        self.omega_h = None if omega_h is None else complex(omega_h)

    def H(self):
        if self.omega is None or self.omega_H is None:
            return None
        return self.omega_H - self.omega

    def h(self):
        if self.omega is None or self.omega_h is None:
            return None
        return self.omega_h - self.omega

    def __repr__(self):
        return "OmegaConstants(omega=%r, omega_H=%r, omega_h=%r)" % (
            self.omega, self.omega_H, self.omega_h)


def sqrt_lambda(lam):
    """Square root branch with Re rho >= 0 (and Im rho >= 0 on Re rho = 0).

    Works on scalars and arrays; scalars come back as complex.
    """
    lam = np.asarray(lam, dtype=complex)
    rho = np.sqrt(lam)
    flip = (rho.real < 0.0) | ((rho.real == 0.0) & (rho.imag < 0.0))
    rho = np.where(flip, -rho, rho)
    if rho.ndim == 0:
        return complex(rho)
    return rho


def add_noise(spectrum, level, seed=0):
    """Perturb each rho_k by level * u_k, u_k uniform on the complex unit disk.

    Deterministic for a given seed. Returns a new Spectrum tagged 'noisy'.
    """
    level = float(level)
    if level < 0.0:
        raise ValueError("noise level must be >= 0")
    rng = np.random.default_rng(seed)
    n = len(spectrum)
    radius = np.sqrt(rng.uniform(size=n))
    angle = rng.uniform(0.0, 2.0 * np.pi, size=n)
    u = radius * np.exp(1j * angle)
    return Spectrum(spectrum.rhos + level * u, origin="noisy",
                    noise_level=level, seed=seed, L=spectrum.L)
