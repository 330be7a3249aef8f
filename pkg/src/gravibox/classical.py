"""Classical particle in a square box with gravity along ``y``.

Coordinates: the box is ``[0, L]^2``, the floor is ``y = 0`` and gravity
points towards it. Corners are labelled ``A = (0, 0)``, ``B = (L, 0)``
(floor) and ``C = (L, L)``, ``D = (0, L)`` (ceiling).
"""

import enum
import math
import warnings
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from .errors import DomainError

CORNER_TOL = 1e-9
RATIONAL_TOL = 1e-9
# A real number is always within 1/p^2 of some q/p, so a match must also
# beat that bound by this factor to count as rational.
DIRICHLET_GAP = 1e-3
DEFAULT_MAX_DENOMINATOR = 10_000


def _positive(name, value):
    value = float(value)
    if not (math.isfinite(value) and value > 0):
        raise DomainError(f"{name} must be finite and > 0, got {value!r}")
    return value


@dataclass(frozen=True)
class LaunchSpec:
    """Initial conditions of one billiard run.

    The particle starts on the floor at ``x0`` with total energy ``energy``
    and launch angle ``angle`` measured from the positive ``x`` axis.
    """

    x0: float
    energy: float
    angle: float
    mass: float = 1.0
    gravity: float = 1.0
    side: float = 1.0

    def __post_init__(self):
        for name in ("energy", "mass", "gravity", "side"):
            object.__setattr__(self, name, _positive(name, getattr(self, name)))
        x0 = float(self.x0)
        if not (math.isfinite(x0) and 0.0 <= x0 <= self.side):
            raise DomainError(f"x0 must lie in [0, {self.side}], got {x0!r}")
        angle = float(self.angle)
        if not (0.0 < angle < math.pi):
            raise DomainError(f"angle must lie in (0, pi), got {angle!r}")
        object.__setattr__(self, "x0", x0)
        object.__setattr__(self, "angle", angle)
        if not (math.isfinite(self.h) and self.h > 0):
            raise DomainError("maximal height is not finite and positive")

    @classmethod
    def natural(cls, x0, energy, angle):
        """Launch in natural units ``m = g = L = 1``."""
        return cls(x0=x0, energy=energy, angle=angle)

    @property
    def h(self):
        return h_max(self)

    @property
    def speed(self):
        return math.sqrt(2.0 * self.energy / self.mass)


def h_max(spec):
    """Maximal height ``E sin^2(phi) / (m g)`` ignoring the ceiling."""
    return spec.energy * math.sin(spec.angle) ** 2 / (spec.mass * spec.gravity)


def is_vertical(spec, tol=1e-12):
    return abs(math.cos(spec.angle)) < tol


def delta_x(spec, y):
    """Signed horizontal distance between the two crossings of height ``y``.

    Negative for leftward launches. ``delta_x(spec, L)`` is 0 whenever the
    particle cannot reach the ceiling (``h <= L``).
    """
    y = float(y)
    h = spec.h
    if y == spec.side and h <= spec.side:
        return 0.0
    if y < 0 or y > h:
        raise DomainError(f"height {y!r} outside [0, h={h!r}]")
    if is_vertical(spec):
        return 0.0
    radicand = max(0.0, 1.0 - y / h)
    return (2.0 * spec.energy / (spec.mass * spec.gravity)
            * math.sin(2.0 * spec.angle) * math.sqrt(radicand))


def unfolded_advance(spec):
    """Signed unfolded ``x`` advance between consecutive floor bounces."""
    return delta_x(spec, 0.0) - delta_x(spec, spec.side)


# ---------------------------------------------------------------------------
# Event-driven simulation


class Wall(enum.Enum):
    FLOOR = "floor"
    CEILING = "ceiling"
    LEFT = "left"
    RIGHT = "right"
    CORNER = "corner"


@dataclass(frozen=True)
class FlightSegment:
    """One free-flight arc between two wall events."""

    start: tuple
    x_direction: int
    x_span: float
    apex_height: float
    wall_hit: Wall
    duration: float
    start_velocity: tuple
    end: tuple
    end_velocity: tuple
    corner: str = None

    def position(self, tau, gravity):
        """Point on this arc ``tau`` time units after its start."""
        x, y = self.start
        vx, vy = self.start_velocity
        return x + vx * tau, y + vy * tau - 0.5 * gravity * tau * tau


@dataclass(frozen=True)
class Trajectory:
    spec: LaunchSpec
    segments: tuple

    @property
    def terminated_at_corner(self):
        return bool(self.segments) and self.segments[-1].wall_hit is Wall.CORNER

    def event_energies(self):
        """Total energy at the end of every segment."""
        m, g = self.spec.mass, self.spec.gravity
        return np.array([0.5 * m * (s.end_velocity[0] ** 2 + s.end_velocity[1] ** 2)
                         + m * g * s.end[1] for s in self.segments])

    def floor_events(self):
        return [s for s in self.segments if s.wall_hit is Wall.FLOOR]


def _time_to_floor(y, vy, g):
    disc = math.sqrt(vy * vy + 2.0 * g * y)
    if vy >= 0:
        return (vy + disc) / g
    return 2.0 * y / (disc - vy) if y > 0 else 0.0


def _time_to_ceiling(y, vy, g, side):
    if vy <= 0:
        return math.inf
    gap = side - y
    disc2 = vy * vy - 2.0 * g * gap
    if disc2 <= 0:
        return math.inf
    return 2.0 * gap / (vy + math.sqrt(disc2))


def _corner_label(x, y, side):
    if y <= side / 2:
        return "A" if x <= side / 2 else "B"
    return "D" if x <= side / 2 else "C"


def simulate(spec, max_events, corner_tol=CORNER_TOL):
    """Propagate the particle through ``max_events`` wall collisions.

    Reflections are specular: side walls flip ``vx``, floor and ceiling
    flip ``vy``. A collision with both coordinates within
    ``corner_tol * L`` of a wall ends the run with a ``CORNER`` segment.
    """
    if isinstance(max_events, bool) or int(max_events) != max_events or max_events < 1:
        raise DomainError("max_events must be a positive integer")
    L, g = spec.side, spec.gravity
    band = corner_tol * L
    v = spec.speed
    x, y = spec.x0, 0.0
    vx, vy = v * math.cos(spec.angle), v * math.sin(spec.angle)
    if is_vertical(spec):
        vx = 0.0
    segments = []
    for _ in range(int(max_events)):
        if vx > 0:
            t_side = (L - x) / vx
        elif vx < 0:
            t_side = x / -vx
        else:
            t_side = math.inf
        t_floor = _time_to_floor(y, vy, g)
        t_ceil = _time_to_ceiling(y, vy, g, L)
        t = min(t_side, t_floor, t_ceil)
        nx = x + vx * t
        ny = y + vy * t - 0.5 * g * t * t
        nvy = vy - g * t
        apex = y + vy * vy / (2 * g) if 0 < vy and vy / g <= t else max(y, ny)
        if t == t_side:
            nx = L if vx > 0 else 0.0
            wall = Wall.RIGHT if vx > 0 else Wall.LEFT
        elif t == t_floor:
            ny = 0.0
            wall = Wall.FLOOR
        else:
            ny = L
            wall = Wall.CEILING
        near_x = min(nx, L - nx) <= band
        near_y = min(ny, L - ny) <= band
        corner = None
        if near_x and near_y:
            wall = Wall.CORNER
            corner = _corner_label(nx, ny, L)
        segments.append(FlightSegment(
            start=(x, y), x_direction=int(math.copysign(1, vx)) if vx else 0,
            x_span=abs(vx) * t, apex_height=min(apex, L), wall_hit=wall, duration=t,
            start_velocity=(vx, vy), end=(nx, ny), end_velocity=(vx, nvy), corner=corner,
        ))
        if wall is Wall.CORNER:
            break
        x, y, vy = nx, ny, nvy
        if wall in (Wall.LEFT, Wall.RIGHT):
            vx = -vx
        else:
            vy = -vy
    return Trajectory(spec=spec, segments=tuple(segments))


def fold(u, side):
    """Map an unfolded coordinate back into ``[0, side]``."""
    r = np.mod(u, 2.0 * side)
    return np.where(r > side, 2.0 * side - r, r)


def unfolded_position(spec, t):
    """Closed-form position at time ``t`` via unfolding.

    The horizontal motion is uniform in the unfolded picture and the
    vertical motion is a bounce between floor and ceiling of period
    ``2 * t_top``; no event detection is involved.
    """
    t = np.asarray(t, dtype=float)
    L, g = spec.side, spec.gravity
    v = spec.speed
    vx = 0.0 if is_vertical(spec) else v * math.cos(spec.angle)
    vy0 = v * math.sin(spec.angle)
    reach = vy0 * vy0 - 2 * g * L
    t_top = (vy0 - math.sqrt(reach)) / g if reach > 0 else vy0 / g
    s = np.mod(t, 2 * t_top)
    s = np.where(s > t_top, 2 * t_top - s, s)
    y = vy0 * s - 0.5 * g * s * s
    return fold(spec.x0 + vx * t, L), y


# ---------------------------------------------------------------------------
# Orbit classification


class Verdict(enum.Enum):
    PERIODIC = "periodic"
    APERIODIC = "aperiodic"
    CORNER_HIT = "corner_hit"


@dataclass(frozen=True)
class OrbitClass:
    """Outcome of :func:`classify_orbit`.

    ``PERIODIC`` carries coprime ``p`` (floor bounces per period) and ``q``
    (double box widths travelled per period); a vertical launch is
    ``PERIODIC`` with ``p = 1``, ``q = None`` and ``vertical = True``.
    ``APERIODIC`` means no rational ``q/p`` with ``p <= max_denominator``
    matched the bounce ratio; floating point cannot certify irrationality.
    """

    verdict: Verdict
    p: int = None
    q: int = None
    vertical: bool = False
    ratio: float = None
    corner: str = None
    bounce_index: int = None
    extra: dict = field(default_factory=dict, compare=False)

    def describe(self):
        if self.verdict is Verdict.PERIODIC:
            if self.vertical:
                return "periodic,vertical,p=1"
            return f"periodic,p={self.p},q={self.q}"
        if self.verdict is Verdict.CORNER_HIT:
            return f"corner_hit,corner={self.corner},bounce={self.bounce_index}"
        return "aperiodic"


def bounce_ratio(spec):
    """``|delta_x(0) - delta_x(L)| / (2 L)``."""
    return abs(unfolded_advance(spec)) / (2.0 * spec.side)


def _near_integer(value, tol):
    return abs(value - round(value)) <= tol


def corner_hit(spec, n_bounces, corner_tol=CORNER_TOL):
    """First floor/ceiling bounce that lands on a corner, or ``None``.

    Floor bounce ``n >= 1`` lands at unfolded ``x0 + n D`` and, when the
    ceiling is reached, ceiling bounce ``n >= 0`` at ``x0 + (n + 1/2) D``.
    Returns ``(corner_label, bounce_index)`` with bounces counted in time
    order over floor and ceiling together.
    """
    L = spec.side
    D = unfolded_advance(spec)
    ceiling = spec.h > L
    index = 0
    for n in range(n_bounces + 1):
        if ceiling:
            u = spec.x0 + (n + 0.5) * D
            index += 1
            if _near_integer(u / L, corner_tol):
                x = float(fold(u, L))
                return _corner_label(x, L, L), index
        if n + 1 > n_bounces:
            break
        u = spec.x0 + (n + 1) * D
        index += 1
        if _near_integer(u / L, corner_tol):
            x = float(fold(u, L))
            return _corner_label(x, 0.0, L), index
    return None


def classify_orbit(spec, max_denominator=DEFAULT_MAX_DENOMINATOR, tol=RATIONAL_TOL,
                   corner_tol=CORNER_TOL):
    """Decide whether the launch produces a periodic orbit.

    The bounce ratio ``rho = |D| / (2 L)``, with ``D = delta_x(0) -
    delta_x(L)``, is matched to its best rational approximation ``q / p``
    with ``p <= max_denominator`` (continued fractions). A match within
    ``tol * max(1, rho)`` whose error is also below ``DIRICHLET_GAP / p^2``
    (relative) is periodic unless a bounce within the period lands on a
    corner. The second test keeps large ``max_denominator`` values from
    turning every irrational ratio into a long "period".
    """
    if isinstance(max_denominator, bool) or int(max_denominator) < 1:
        raise DomainError("max_denominator must be a positive integer")
    L = spec.side
    if is_vertical(spec):
        if min(spec.x0, L - spec.x0) <= corner_tol * L:
            label = _corner_label(spec.x0, 0.0, L)
            return OrbitClass(Verdict.CORNER_HIT, corner=label, bounce_index=1, ratio=0.0)
        return OrbitClass(Verdict.PERIODIC, p=1, q=None, vertical=True, ratio=0.0)
    rho = bounce_ratio(spec)
    frac = Fraction(rho).limit_denominator(int(max_denominator))
    err = abs(rho - float(frac))
    scale = max(1.0, rho)
    matched = (frac.numerator >= 1 and err <= tol * scale
               and err * frac.denominator ** 2 <= DIRICHLET_GAP * scale)
    horizon = frac.denominator if matched else int(max_denominator)
    hit = corner_hit(spec, horizon, corner_tol)
    if hit is not None:
        return OrbitClass(Verdict.CORNER_HIT, corner=hit[0], bounce_index=hit[1], ratio=rho)
    if matched:
        return OrbitClass(Verdict.PERIODIC, p=frac.denominator, q=frac.numerator, ratio=rho)
    return OrbitClass(Verdict.APERIODIC, ratio=rho)


# ---------------------------------------------------------------------------
# Probability density and moments


class SingularityWarning(UserWarning):
    """A density was evaluated at the integrable turning-point singularity."""


def normalization(h, L):
    """Constant ``N`` making ``N / sqrt(h - y)`` integrate to one over the box."""
    h = _positive("h", h)
    L = _positive("L", L)
    if h < L:
        return 1.0 / (2.0 * L * math.sqrt(h))
    # sqrt(h) - sqrt(h - L) rationalized against cancellation
    return (math.sqrt(h) + math.sqrt(h - L)) / (2.0 * L * L)


def density(y, h, L, singular_tol=1e-12):
    """Classical position density ``N / sqrt(h - y)`` (per unit area).

    Zero above the turning height. Points within ``singular_tol * h`` of the
    singularity are still evaluated (``inf`` exactly at ``y = h``) but raise
    a :class:`SingularityWarning`; never integrate this by sampling.
    """
    n = normalization(h, L)
    arr = np.asarray(y, dtype=float)
    if np.any(~np.isfinite(arr)) or np.any(arr < 0) or np.any(arr > L):
        raise DomainError(f"y must lie in [0, L={L!r}]")
    gap = h - arr
    if h <= L and np.any(np.abs(gap) <= singular_tol * h):
        warnings.warn("density evaluated at the turning-point singularity",
                      SingularityWarning, stacklevel=2)
    with np.errstate(divide="ignore"):
        out = np.where(gap > 0, n / np.sqrt(np.where(gap > 0, gap, 1.0)), 0.0)
        out = np.where(gap == 0, np.inf, out)
    return float(out) if arr.ndim == 0 else out


def total_probability(h, L):
    """Closed-form integral of :func:`density` over the box."""
    n = normalization(h, L)
    top = min(h, L)
    return 2.0 * L * n * (math.sqrt(h) - math.sqrt(h - top))


def bin_probabilities(edges, h, L):
    """Probability mass of each ``[edges[i], edges[i+1]]`` band (closed form)."""
    e = np.clip(np.asarray(edges, dtype=float), 0.0, min(h, L))
    n = normalization(h, L)
    return 2.0 * L * n * (np.sqrt(h - e[:-1]) - np.sqrt(h - e[1:]))


def moments_x(L):
    """Mean, second moment and standard deviation along ``x``."""
    L = _positive("L", L)
    return L / 2.0, L * L / 3.0, L / (2.0 * math.sqrt(3.0))


@dataclass(frozen=True)
class ClassicalMomentsY:
    mean: float
    second_moment: float
    stddev: float
    j_correction: float


def j_correction(h, L):
    """Ceiling correction ``J(L, h)`` to the squared spread; 0 for ``h <= L``."""
    if h <= L:
        return 0.0
    c = math.sqrt(1.0 - L / h)
    d = (L / h) / (1.0 + c)      # 1 - c without cancellation
    q = d / c                    # sqrt(h/(h-L)) - 1
    return L * (8.0 * h * q + L * (4.0 - 9.0 * (q + 1.0))) / (4.0 * h * h * q * q)


def moments_y(h, L):
    """Closed-form moments of the classical density along ``y``.

    For ``h <= L`` the ceiling is never reached: mean ``2h/3``, second
    moment ``8h^2/15``. For ``h > L`` everything is written through
    ``c = sqrt(1 - L/h)`` and ``d = 1 - c = (L/h)/(1 + c)`` so that no
    difference of nearly equal numbers appears at large ``h``:

    mean = (a + L)/3 and second moment = a^2 (4/3 - d + d^2/5), with
    a = h d = L/(1 + c).
    """
    h = _positive("h", h)
    L = _positive("L", L)
    return _moments_below(h) if h <= L else _moments_above(h, L)


def _moments_below(h):
    return ClassicalMomentsY(mean=2.0 * h / 3.0, second_moment=8.0 * h * h / 15.0,
                             stddev=2.0 * h / (3.0 * math.sqrt(5.0)), j_correction=0.0)


def _moments_above(h, L):
    c = math.sqrt(1.0 - L / h)
    a = L / (1.0 + c)
    d = a / h
    mean = (a + L) / 3.0
    second = a * a * (4.0 / 3.0 - d + d * d / 5.0)
    return ClassicalMomentsY(mean=mean, second_moment=second,
                             stddev=math.sqrt(max(second - mean * mean, 0.0)),
                             j_correction=j_correction(h, L))
