"""Quantum particle in a square box with gravity along ``y``.

The problem separates into an infinite-well mode along ``x`` and an Airy
mode along ``y``. With ``R = (hbar^2 / (2 m^2 g))^(1/3)`` and
``z = y/R - eps`` the ``y`` equation is Airy's, and eigenvalues ``eps``
are the roots of the boundary determinant
``Ai(-eps) Bi(L/R - eps) - Bi(-eps) Ai(L/R - eps)``.

Two families of modes are offered for every state:

* ``Method.PAPER_APPROX`` uses the closed-form approximations (WKB in the
  low-energy regime, a Taylor-expanded phase condition in the high-energy
  regime) with their closed-form normalizations;
* ``Method.EXACT_ROOT`` refines the actual determinant root and
  normalizes the wavefunction numerically.
"""

import enum
import math
from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import brentq

from . import specialfn
from .classical import bin_probabilities
from .errors import DomainError, RegimeError
from .quadrature import adaptive_simpson

_GL_ORDER = 24
_GL_NODES, _GL_WEIGHTS = np.polynomial.legendre.leggauss(_GL_ORDER)


def _positive(name, value):
    value = float(value)
    if not (math.isfinite(value) and value > 0):
        raise DomainError(f"{name} must be finite and > 0, got {value!r}")
    return value


def _positive_int(name, value):
    if isinstance(value, bool) or int(value) != value or value < 1:
        raise DomainError(f"{name} must be a positive integer, got {value!r}")
    return int(value)


@dataclass(frozen=True)
class QuantumConfig:
    hbar: float = 1.0
    mass: float = 1.0
    gravity: float = 1.0
    side: float = 1.0

    def __post_init__(self):
        for name in ("hbar", "mass", "gravity", "side"):
            object.__setattr__(self, name, _positive(name, getattr(self, name)))

    @classmethod
    def from_scale(cls, scale, side=1.0, hbar=1.0, mass=1.0):
        """Config whose gravitational length ``R`` equals ``scale``."""
        scale = _positive("scale", scale)
        return cls(hbar=hbar, mass=mass, gravity=hbar ** 2 / (2.0 * mass ** 2 * scale ** 3),
                   side=side)

    @property
    def scale(self):
        """Gravitational length ``R``."""
        return (self.hbar ** 2 / (2.0 * self.mass ** 2 * self.gravity)) ** (1.0 / 3.0)

    @property
    def e1(self):
        """Ground-state energy of the gravity-free well of width ``L``."""
        return math.pi ** 2 * self.hbar ** 2 / (2.0 * self.mass * self.side ** 2)

    @property
    def ell(self):
        """Box height in units of ``R``."""
        return self.side / self.scale

    @property
    def mgl(self):
        return self.mass * self.gravity * self.side

    def energy(self, eps):
        return self.hbar ** 2 * eps / (2.0 * self.mass * self.scale ** 2)

    def eps_of(self, energy):
        return 2.0 * self.mass * self.scale ** 2 * energy / self.hbar ** 2


# ---------------------------------------------------------------------------
# x direction


@dataclass(frozen=True)
class ModeX:
    n: int
    energy: float
    side: float

    def __call__(self, x):
        x = np.asarray(x, dtype=float)
        inside = (x >= 0) & (x <= self.side)
        val = np.where(inside, math.sqrt(2.0 / self.side) * np.sin(self.n * math.pi * x / self.side), 0.0)
        return float(val) if val.ndim == 0 else val


def x_mode(config, n):
    """Infinite-well mode ``sqrt(2/L) sin(n pi x / L)`` with energy ``n^2 E1``."""
    n = _positive_int("n", n)
    return ModeX(n=n, energy=n * n * config.e1, side=config.side)


# ---------------------------------------------------------------------------
# y direction


class Regime(enum.Enum):
    LOW = "low"
    HIGH = "high"


class Method(enum.Enum):
    PAPER_APPROX = "approx"
    EXACT_ROOT = "exact"


@dataclass(frozen=True)
class ModeY:
    """One ``y`` eigenstate ``norm * (alpha Ai(z) + beta Bi(z))``, ``z = y/R - eps``.

    ``coeff_ratio`` is ``beta / alpha`` (the ``c2/c1`` of the general
    solution). ``ordinal`` is the 1-based position in the exact spectrum
    when known.
    """

    regime: Regime
    index: int
    eps: float
    energy: float
    coeff_ratio: float
    norm: float
    method: Method
    scale: float
    side: float
    alpha: float = 1.0
    beta: float = 0.0
    ordinal: int = None
    extra: dict = field(default_factory=dict, compare=False)

    @property
    def z_floor(self):
        return -self.eps

    @property
    def z_ceiling(self):
        return self.side / self.scale - self.eps

    @property
    def turning_point(self):
        return self.scale * self.eps

    def _u(self, z):
        ai, aip, bi, bip = specialfn.airy(z)
        return self.alpha * ai + self.beta * bi, self.alpha * aip + self.beta * bip

    def __call__(self, y):
        y = np.asarray(y, dtype=float)
        inside = (y >= 0) & (y <= self.side)
        z = np.where(inside, y, 0.0) / self.scale - self.eps
        u, _ = self._u(z)
        val = np.where(inside, self.norm * u, 0.0)
        return float(val) if val.ndim == 0 else val

    def derivative(self, y):
        """``dY/dy`` inside the box."""
        y = np.asarray(y, dtype=float)
        _, up = self._u(y / self.scale - self.eps)
        val = self.norm * up / self.scale
        return float(val) if np.ndim(val) == 0 else val

    def boundary_slopes(self):
        """``du/dz`` of the unnormalized combination at floor and ceiling."""
        _, up = self._u(np.array([self.z_floor, self.z_ceiling]))
        return float(up[0]), float(up[1])


def _gauss_integrate(f, a, b, panels):
    edges = np.linspace(a, b, panels + 1)
    half = 0.5 * np.diff(edges)
    mids = 0.5 * (edges[1:] + edges[:-1])
    x = (mids[:, None] + half[:, None] * _GL_NODES[None, :]).ravel()
    w = (half[:, None] * _GL_WEIGHTS[None, :]).ravel()
    return float(np.dot(w, f(x)))


def _panels(config, eps):
    return int(8 + math.ceil(config.ell * max(1.0, math.sqrt(max(eps, 0.0)))))


def wkb_low_eps(k):
    """WKB eigenvalue ``(3 pi / 2 (k - 1/4))^(2/3)`` of the floor-only problem."""
    k = _positive_int("k", k)
    return (1.5 * math.pi * (k - 0.25)) ** (2.0 / 3.0)


def det_boundary(config, eps):
    """Boundary determinant; vanishes exactly at the eigenvalues ``eps``.

    Divided by the lengths of the vectors ``(Ai, Bi)`` at floor and ceiling,
    so the value is the sine of the angle between them: it lies in
    ``[-1, 1]`` however large ``Bi`` is at the ceiling, and roots and signs
    are those of the raw determinant.
    """
    eps = np.asarray(eps, dtype=float)
    if np.any(eps <= 0):
        raise DomainError("eps must be > 0")
    ai_m, _, bi_m, _ = specialfn.airy(-eps)
    ai_p, _, bi_p, _ = specialfn.airy(config.ell - eps)
    val = (ai_m * bi_p - bi_m * ai_p) / (np.hypot(ai_m, bi_m) * np.hypot(ai_p, bi_p))
    return float(val) if np.ndim(val) == 0 else val


def scan_step(config):
    """Scan step small enough that no two eigenvalues share a bracket."""
    return min(0.05, (math.pi * config.scale / config.side) ** 2 / 4.0)


def _exact_roots(config, eps_max, eps_min=0.0):
    step = scan_step(config)
    start = max(eps_min, 0.0)
    n = int(math.ceil((eps_max - start) / step))
    if n < 1:
        return np.empty(0)
    grid = start + step * np.arange(1, n + 1)
    grid[-1] = min(grid[-1], eps_max)
    grid = np.concatenate([[start + 0.5 * step if start == 0.0 else start], grid])
    grid = np.unique(grid)
    vals = det_boundary(config, grid)
    roots = []
    f = lambda e: det_boundary(config, e)  # noqa: E731
    for i in range(grid.size - 1):
        a, b = grid[i], grid[i + 1]
        fa, fb = vals[i], vals[i + 1]
        if fa == 0.0:
            roots.append(a)
        elif fa * fb < 0:
            roots.append(brentq(f, a, b, xtol=1e-14, rtol=4 * np.finfo(float).eps, maxiter=200))
    if vals[-1] == 0.0:
        roots.append(grid[-1])
    roots = np.array([r for r in roots if 0.0 < r <= eps_max])
    return np.unique(roots)


def exact_eigenvalues(config, eps_max):
    """Sorted roots of :func:`det_boundary` in ``(0, eps_max]`` without building modes."""
    if eps_max <= 0:
        return np.empty(0)
    return _exact_roots(config, float(eps_max))


def _regime_of(config, eps):
    return Regime.LOW if eps < config.ell else Regime.HIGH


def _exact_mode(config, eps, ordinal, regime=None, index=None):
    ell = config.ell
    z_m, z_p = -eps, ell - eps
    ai_m, _, bi_m, _ = specialfn.airy(z_m)
    ai_p, _, bi_p, _ = specialfn.airy(z_p)
    # Pin the node at whichever wall gives the better-conditioned pair:
    # the ceiling while Bi is growing there, the floor otherwise.
    if z_p > 0:
        alpha, beta = 1.0, -ai_p / bi_p
    else:
        scale = max(abs(ai_m), abs(bi_m))
        alpha, beta = bi_m / scale, -ai_m / scale
    regime = regime or _regime_of(config, eps)
    R = config.scale

    def u2(z):
        ai, _, bi, _ = specialfn.airy(z)
        return (alpha * ai + beta * bi) ** 2

    integral = R * _gauss_integrate(u2, z_m, z_p, _panels(config, eps))
    norm = 1.0 / math.sqrt(integral)
    ratio = beta / alpha if alpha != 0 else math.inf
    return ModeY(regime=regime, index=index or ordinal, eps=float(eps),
                 energy=config.energy(eps), coeff_ratio=ratio, norm=norm,
                 method=Method.EXACT_ROOT, scale=R, side=config.side,
                 alpha=alpha, beta=beta, ordinal=ordinal)


def exact_spectrum(config, eps_max):
    """All eigenmodes with ``0 < eps <= eps_max``, ascending, as ``EXACT_ROOT`` modes."""
    eps_max = _positive("eps_max", eps_max)
    roots = _exact_roots(config, eps_max)
    return [_exact_mode(config, e, i + 1) for i, e in enumerate(roots)]


def _nearest_root(config, target):
    margin = max(1.0, 4.0 * scan_step(config))
    roots = _exact_roots(config, target + margin)
    if roots.size == 0:
        raise RegimeError(f"no eigenvalue near eps={target!r}")
    i = int(np.argmin(np.abs(roots - target)))
    return roots[i], i + 1


def low_mode(config, k, method=Method.PAPER_APPROX):
    """Low-energy mode ``k`` whose turning point lies below the ceiling."""
    k = _positive_int("k", k)
    method = Method(method)
    R = config.scale
    if method is Method.PAPER_APPROX:
        eps = wkb_low_eps(k)
    else:
        target = -specialfn.ai_negative_zeros(k)[-1]
        eps, ordinal = _nearest_root(config, target)
    if R * eps >= config.side:
        raise RegimeError(
            f"turning point R*eps={R * eps:.6g} is not below L={config.side:.6g}; "
            "use high_mode or exact_spectrum for this state")
    if method is Method.EXACT_ROOT:
        return _exact_mode(config, eps, ordinal, regime=Regime.LOW, index=k)
    _, aip, _, _ = specialfn.airy(-eps)
    norm = 1.0 / math.sqrt(R * aip * aip)
    return ModeY(regime=Regime.LOW, index=k, eps=eps, energy=config.energy(eps),
                 coeff_ratio=0.0, norm=norm, method=method, scale=R, side=config.side)


def _taylor_eps(config, r):
    ratio = config.scale / config.side
    return (r * r * math.pi ** 2 * ratio ** 2 / 4.0
            * (1.0 + math.sqrt(1.0 + 1.0 / (ratio ** 3 * math.pi ** 2 * r * r))) ** 2)


def min_high_index(config, margin=1.0):
    """Smallest ``r`` whose Taylor eigenvalue satisfies ``L/R - eps < -margin``."""
    r = 1
    while config.ell - _taylor_eps(config, r) >= -margin:
        r += 1
    return r


def taylor_high_eps(config, r):
    """High-energy eigenvalue from the second-order expanded phase condition."""
    r = _positive_int("r", r)
    eps = _taylor_eps(config, r)
    if config.ell - eps >= -1.0:
        raise RegimeError(
            f"r={r} gives L/R - eps = {config.ell - eps:.4g} >= -1; "
            f"the smallest admissible r for this config is {min_high_index(config)}")
    return eps


def taylor_high_energy(config, r):
    """Energy of :func:`taylor_high_eps` written through ``E1`` and ``m g L``."""
    r = _positive_int("r", r)
    taylor_high_eps(config, r)
    e1 = config.e1
    return r * r * e1 / 4.0 * (1.0 + math.sqrt(1.0 + config.mgl / (e1 * r * r))) ** 2


def high_mode(config, r, method=Method.PAPER_APPROX):
    """High-energy mode ``r`` (particle reaches the ceiling).

    ``PAPER_APPROX`` combines ``Ai - (Ai_-/Bi_-) Bi`` at the Taylor
    eigenvalue and uses the closed-form derivative normalization, so the
    node at the floor is exact and the one at the ceiling approximate.
    ``EXACT_ROOT`` picks the determinant root nearest to the Taylor value.
    """
    r = _positive_int("r", r)
    method = Method(method)
    eps = taylor_high_eps(config, r)
    R = config.scale
    if method is Method.EXACT_ROOT:
        root, ordinal = _nearest_root(config, eps)
        return _exact_mode(config, root, ordinal, regime=Regime.HIGH, index=r)
    ai_m, aip_m, bi_m, bip_m = specialfn.airy(-eps)
    _, aip_p, _, bip_p = specialfn.airy(config.ell - eps)
    c = -ai_m / bi_m
    denom = R * ((aip_m + c * bip_m) ** 2 - (aip_p + c * bip_p) ** 2)
    if denom <= 0:
        raise RegimeError(f"closed-form normalization is not positive for r={r}")
    return ModeY(regime=Regime.HIGH, index=r, eps=eps, energy=config.energy(eps),
                 coeff_ratio=c, norm=1.0 / math.sqrt(denom), method=method, scale=R,
                 side=config.side, alpha=1.0, beta=c)


def _ceiling_fraction(mode):
    """``u'(ceiling)^2 / (u'(floor)^2 - u'(ceiling)^2)``."""
    s_floor, s_ceil = mode.boundary_slopes()
    return s_ceil ** 2 / (s_floor ** 2 - s_ceil ** 2)


def ji_plus(config, mode):
    """Dimensionless ceiling term of a high-energy mode.

    Equal to ``R^3 (dY/dy)^2`` at ``y = L`` for an exactly normalized
    eigenmode.
    """
    if mode.regime is not Regime.HIGH:
        raise DomainError("ji_plus is defined for high-energy modes only")
    return _ceiling_fraction(mode)


# ---------------------------------------------------------------------------
# moments


class Source(enum.Enum):
    CLOSED_FORM = "closed_form"
    QUADRATURE = "quadrature"


@dataclass(frozen=True)
class MomentsReport:
    mean: float
    stddev: float
    ji_plus: float = 0.0
    source: Source = Source.CLOSED_FORM
    zeroth: float = 1.0


def qm_moments_x(n, L):
    """Well-mode moments: mean ``L/2``, spread ``L/(2 sqrt 3) sqrt(1 - 6/(pi n)^2)``."""
    n = _positive_int("n", n)
    L = _positive("L", L)
    std = L / (2.0 * math.sqrt(3.0)) * math.sqrt(1.0 - 6.0 / (math.pi ** 2 * n * n))
    return MomentsReport(mean=L / 2.0, stddev=std)


_SPREAD = 2.0 * math.sqrt(5.0) / 15.0


def moments_from_ceiling_term(config, eps, ji):
    """Closed-form mean and spread of a mode with nodes at both walls.

    With ``w = m g L / E_y``:
    mean = 2/3 E_y/(mg) - L/3 * ji and
    spread = 2 sqrt(5)/15 * E_y/(mg) * sqrt(1 + 2 w ji - 9/4 w^2 ji - 5/4 (w ji)^2).
    """
    height = config.scale * eps  # E_y / (m g)
    w = config.side / height
    mean = 2.0 / 3.0 * height - config.side / 3.0 * ji
    radicand = 1.0 + 2.0 * w * ji - 2.25 * w * w * ji - 1.25 * (w * ji) ** 2
    return mean, _SPREAD * height * math.sqrt(max(radicand, 0.0))


def qm_moments_y(config, mode):
    """Closed-form ``<y>`` and ``Delta y`` of a ``y`` mode."""
    if mode.method is Method.PAPER_APPROX and mode.regime is Regime.LOW:
        height = config.scale * mode.eps
        return MomentsReport(mean=2.0 / 3.0 * height, stddev=_SPREAD * height)
    ji = _ceiling_fraction(mode)
    mean, std = moments_from_ceiling_term(config, mode.eps, ji)
    return MomentsReport(mean=mean, stddev=std, ji_plus=ji)


def qm_moments_quadrature(config, mode, tol=1e-10):
    """Moments of ``|mode|^2`` over ``[0, L]`` by adaptive Simpson.

    ``mode`` may be any callable wavefunction on the box (a :class:`ModeY`
    or a :class:`ModeX` used as a gravity-free surrogate). Moments are
    divided by the computed zeroth moment, which is reported as well.
    """
    L = config.side
    panels = 16 + 4 * int(getattr(mode, "index", getattr(mode, "n", 1)))

    def weight(y):
        return np.asarray(mode(y)) ** 2

    m0 = adaptive_simpson(weight, 0.0, L, tol=tol, initial_intervals=panels)
    m1 = adaptive_simpson(lambda y: y * weight(y), 0.0, L, tol=tol, initial_intervals=panels)
    m2 = adaptive_simpson(lambda y: y * y * weight(y), 0.0, L, tol=tol, initial_intervals=panels)
    mean = m1 / m0
    var = m2 / m0 - mean * mean
    ji = _ceiling_fraction(mode) if getattr(mode, "regime", None) is Regime.HIGH else 0.0
    return MomentsReport(mean=mean, stddev=math.sqrt(max(var, 0.0)), ji_plus=ji,
                         source=Source.QUADRATURE, zeroth=m0)


# ---------------------------------------------------------------------------
# densities


def density_grid(config, n, mode, nx, ny):
    """``|X_n(x)|^2 |Y(y)|^2`` on the uniform ``nx`` by ``ny`` lattice over the box.

    Returns ``(x, y, rho)`` with ``rho[j, i]`` at ``(x[i], y[j])``.
    """
    nx = _positive_int("nx", nx)
    ny = _positive_int("ny", ny)
    if nx < 2 or ny < 2:
        raise DomainError("grid needs at least 2 points per axis")
    L = config.side
    x = np.linspace(0.0, L, nx)
    y = np.linspace(0.0, L, ny)
    px = x_mode(config, n)(x) ** 2
    py = np.asarray(mode(y)) ** 2
    return x, y, py[:, None] * px[None, :]


def grid_probability(x, y, rho):
    """Riemann sum of a density grid."""
    return float(rho.sum() * (x[1] - x[0]) * (y[1] - y[0]))


def coarse_grained(mode, edges):
    """Probability of ``|mode|^2`` in each band ``[edges[i], edges[i+1]]``."""
    per_band = 4 + 2 * int(getattr(mode, "index", 1))
    w = lambda y: np.asarray(mode(y)) ** 2  # noqa: E731
    masses = np.array([_gauss_integrate(w, a, b, per_band) for a, b in zip(edges[:-1], edges[1:])])
    return masses / masses.sum()


def correspondence(config, mode, bins=10):
    """Compare coarse-grained ``|Y|^2`` with the classical density of the same energy.

    The classical density uses the turning height ``h = E_y / (m g)``.
    Returns ``(edges, p_quantum, p_classical, l1_distance)``.
    """
    bins = _positive_int("bins", bins)
    edges = np.linspace(0.0, config.side, bins + 1)
    pq = coarse_grained(mode, edges)
    h = mode.energy / (config.mass * config.gravity)
    pc = bin_probabilities(edges, h, config.side)
    return edges, pq, pc, float(np.abs(pq - pc).sum())
