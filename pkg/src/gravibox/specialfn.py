"""Airy functions, their negative zeros and antiderivative identities.

Evaluation strategy
-------------------
* ``|z| <= 8``: Taylor expansion about the nearest node of a grid with
  spacing 0.5. Node values are produced once, at import, from the
  Maclaurin series carried out in 60-digit decimal arithmetic, so the
  cancellation that ruins a double-precision Maclaurin sum for ``Ai`` at
  positive ``z`` never reaches the returned values. Each local Taylor
  step has ``|z - z0| <= 0.25`` and is well conditioned.
* ``z > 8`` and ``z < -8``: the standard asymptotic expansions in
  ``zeta = 2/3 |z|**1.5``. At the switch point ``zeta > 15``, where the
  smallest series term is below ``1e-13``.

The positive support ends at ``z = 100`` because ``Bi`` overflows double
precision shortly after; the negative support ends at ``z = -1e4``.
"""

import enum
import math
from dataclasses import dataclass
from decimal import Decimal, localcontext

import numpy as np

from .errors import DomainError, RangeError

Z_MIN = -1.0e4
Z_MAX = 100.0
SWITCH = 8.0

_NODE_STEP = 0.5
_TAYLOR_TERMS = 30
_ASYMPTOTIC_TERMS = 40
_SQRT_PI = math.sqrt(math.pi)

# Ai(0), Ai'(0), Bi(0), Bi'(0) to 45 digits.
_AI0 = "0.355028053887817239260063186004183176397979174"
_AIP0 = "-0.258819403792806798405183560189203963479091138"
_BI0 = "0.614926627446000735150922369093613553594728189"
_BIP0 = "0.448288357353826357914823710398828390866226799"


def _maclaurin_node(z, y0, yp0, digits=60):
    """Value and slope at ``z`` of the Airy-equation solution with data (y0, yp0) at 0."""
    with localcontext() as ctx:
        ctx.prec = digits
        z = Decimal(z)
        eps = Decimal(10) ** (-digits + 5)
        a = [Decimal(y0), Decimal(yp0), Decimal(0)]
        value = a[0] + a[1] * z
        slope = a[1]
        power = z  # z**(n-1) for the term being added
        n = 2
        quiet = 0
        while quiet < 4:
            if n >= 3:
                a.append(a[n - 3] / (n * (n - 1)))
            term = a[n] * power * z
            dterm = n * a[n] * power
            value += term
            slope += dterm
            power *= z
            small = abs(term) <= eps * (abs(value) + 1) and abs(dterm) <= eps * (abs(slope) + 1)
            quiet = quiet + 1 if small else 0
            n += 1
        return float(value), float(slope)


def _build_nodes():
    nodes = np.arange(-SWITCH, SWITCH + 0.5 * _NODE_STEP, _NODE_STEP)
    table = np.empty((nodes.size, 4))
    for i, z0 in enumerate(nodes):
        ai, aip = _maclaurin_node(repr(float(z0)), _AI0, _AIP0)
        bi, bip = _maclaurin_node(repr(float(z0)), _BI0, _BIP0)
        table[i] = ai, aip, bi, bip
    return nodes, table


_NODES, _NODE_VALUES = _build_nodes()


def _asymptotic_coefficients(count):
    u = np.empty(count)
    u[0] = 1.0
    for k in range(1, count):
        u[k] = u[k - 1] * (6 * k - 5) * (6 * k - 3) * (6 * k - 1) / ((2 * k - 1) * 216.0 * k)
    k = np.arange(count)
    v = -(6 * k + 1) / (6 * k - 1) * u
    return u, v


_U, _V = _asymptotic_coefficients(_ASYMPTOTIC_TERMS)


def _taylor(z):
    idx = np.rint((z + SWITCH) / _NODE_STEP).astype(int)
    z0 = _NODES[idx]
    d = z - z0
    base = _NODE_VALUES[idx]
    out = np.empty((4, z.size))
    for col in (0, 2):
        a_prev2 = np.zeros_like(z)      # a[n-1] while computing a[n+1]
        a_prev = base[:, col].copy()    # a[n]
        a_cur = base[:, col + 1].copy()  # a[n+1]
        value = a_prev + a_cur * d
        slope = a_cur.copy()
        dpow = d.copy()  # d**n for n = 1
        # a[n+2] = (z0 a[n] + a[n-1]) / ((n+2)(n+1))
        for n in range(0, _TAYLOR_TERMS):
            a_next = (z0 * a_prev + a_prev2) / ((n + 2) * (n + 1))
            slope = slope + (n + 2) * a_next * dpow
            dpow = dpow * d
            value = value + a_next * dpow
            a_prev2, a_prev, a_cur = a_prev, a_cur, a_next
        out[col] = value
        out[col + 1] = slope
    return out


def _series(zeta, coeffs, alternate, start=0, stride=1):
    """Sum ``coeffs[start::stride] * (+-1)**k / zeta**(start + stride*k)``."""
    sel = coeffs[start::stride]
    k = np.arange(sel.size)
    power = start + stride * k
    sign = (-1.0) ** k if alternate else np.ones_like(sel)
    terms = sign[None, :] * sel[None, :] * np.exp(-np.log(zeta)[:, None] * power[None, :])
    # Stop before the asymptotic series starts to grow again.
    mags = np.abs(terms)
    growing = np.zeros_like(mags, dtype=bool)
    growing[:, 1:] = mags[:, 1:] > mags[:, :-1]
    cut = np.cumsum(growing, axis=1) > 0
    terms[cut] = 0.0
    return terms.sum(axis=1)


def _asymptotic_positive(z):
    zeta = 2.0 / 3.0 * z * np.sqrt(z)
    q = z ** 0.25
    su = _series(zeta, _U, alternate=False)
    sv = _series(zeta, _V, alternate=False)
    sua = _series(zeta, _U, alternate=True)
    sva = _series(zeta, _V, alternate=True)
    decay = np.exp(-zeta)
    grow = np.exp(zeta)
    ai = decay / (2.0 * _SQRT_PI * q) * sua
    aip = -q * decay / (2.0 * _SQRT_PI) * sva
    bi = grow / (_SQRT_PI * q) * su
    bip = q * grow / _SQRT_PI * sv
    return np.vstack([ai, aip, bi, bip])


def _asymptotic_negative(z):
    x = -z
    zeta = 2.0 / 3.0 * x * np.sqrt(x)
    q = x ** 0.25
    u_even = _series(zeta, _U, alternate=True, start=0, stride=2)
    u_odd = _series(zeta, _U, alternate=True, start=1, stride=2)
    v_even = _series(zeta, _V, alternate=True, start=0, stride=2)
    v_odd = _series(zeta, _V, alternate=True, start=1, stride=2)
    c = np.cos(zeta - math.pi / 4.0)
    s = np.sin(zeta - math.pi / 4.0)
    ai = (c * u_even + s * u_odd) / (_SQRT_PI * q)
    bi = (-s * u_even + c * u_odd) / (_SQRT_PI * q)
    aip = q / _SQRT_PI * (s * v_even - c * v_odd)
    bip = q / _SQRT_PI * (c * v_even + s * v_odd)
    return np.vstack([ai, aip, bi, bip])


def _check_support(z):
    if not np.all(np.isfinite(z)):
        raise DomainError("Airy functions need finite arguments")
    if np.any(z < Z_MIN) or np.any(z > Z_MAX):
        bad = z[(z < Z_MIN) | (z > Z_MAX)].flat[0]
        raise RangeError(f"argument {bad!r} outside supported range [{Z_MIN}, {Z_MAX}]")


def airy(z):
    """Vectorized ``(Ai, Ai', Bi, Bi')`` of real ``z``, same order as scipy.

    Returns four float arrays shaped like ``z`` (floats for scalar input).
    """
    arr = np.asarray(z, dtype=float)
    flat = arr.ravel()
    _check_support(flat)
    out = np.empty((4, flat.size))
    inner = np.abs(flat) <= SWITCH
    if np.any(inner):
        out[:, inner] = _taylor(flat[inner])
    pos = flat > SWITCH
    if np.any(pos):
        out[:, pos] = _asymptotic_positive(flat[pos])
    neg = flat < -SWITCH
    if np.any(neg):
        out[:, neg] = _asymptotic_negative(flat[neg])
    if arr.ndim == 0:
        return tuple(float(v[0]) for v in out)
    return tuple(v.reshape(arr.shape) for v in out)


@dataclass(frozen=True)
class AiryEval:
    """Ai, Bi and their derivatives at one real argument."""

    ai: float
    bi: float
    ai_prime: float
    bi_prime: float

    @property
    def wronskian(self):
        return self.ai * self.bi_prime - self.ai_prime * self.bi


def airy_eval(z):
    """Evaluate all four Airy values at a single real ``z``.

    Raises :class:`DomainError` for non-finite input and :class:`RangeError`
    outside ``[Z_MIN, Z_MAX]``.
    """
    try:
        z = float(z)
    except (TypeError, ValueError) as exc:
        raise DomainError(f"not a real number: {z!r}") from exc
    ai, aip, bi, bip = airy(z)
    return AiryEval(ai=ai, bi=bi, ai_prime=aip, bi_prime=bip)


def airy_osc_approx(x):
    """Leading-order oscillatory forms of ``Ai`` and ``Bi`` for ``x < 0``.

    ``Ai(x) ~ sin(2/3 (-x)^1.5 + pi/4) / (sqrt(pi) (-x)^0.25)`` and the same
    with cosine for ``Bi``. The relative error at local extrema is a few
    percent at ``x = -1`` (the worst supported point) and falls below one
    percent by ``x = -2``.
    """
    arr = np.asarray(x, dtype=float)
    if not np.all(np.isfinite(arr)) or np.any(arr >= 0):
        raise DomainError("oscillatory approximation needs x < 0")
    m = -arr
    phase = 2.0 / 3.0 * m ** 1.5 + math.pi / 4.0
    amp = 1.0 / (_SQRT_PI * m ** 0.25)
    ai, bi = amp * np.sin(phase), amp * np.cos(phase)
    if arr.ndim == 0:
        return float(ai), float(bi)
    return ai, bi


class AntiderivKind(enum.Enum):
    """The nine Airy-product integrals with known antiderivatives."""

    I1 = "Ai^2"
    I2 = "Bi^2"
    I3 = "Ai*Bi"
    I4 = "z*Ai^2"
    I5 = "z*Ai*Bi"
    I6 = "z*Bi^2"
    I7 = "z^2*Ai^2"
    I8 = "z^2*Ai*Bi"
    I9 = "z^2*Bi^2"


def _quadratic_antiderivatives(z, f, fp, g, gp):
    """Antiderivatives of f*g, z*f*g, z^2*f*g for solutions f, g of y'' = z y."""
    zeroth = z * f * g - fp * gp
    first = (2 * z * z * f * g + f * gp + fp * g - 2 * z * fp * gp) / 6.0
    second = ((z ** 3 - 1) * f * g + z * (f * gp + fp * g) - z * z * fp * gp) / 5.0
    return zeroth, first, second


_KIND_LAYOUT = {
    AntiderivKind.I1: ("aa", 0), AntiderivKind.I2: ("bb", 0), AntiderivKind.I3: ("ab", 0),
    AntiderivKind.I4: ("aa", 1), AntiderivKind.I5: ("ab", 1), AntiderivKind.I6: ("bb", 1),
    AntiderivKind.I7: ("aa", 2), AntiderivKind.I8: ("ab", 2), AntiderivKind.I9: ("bb", 2),
}


def airy_antideriv(kind, z):
    """Closed-form antiderivative of the Airy product named by ``kind`` at ``z``.

    The symmetric bilinear form used here reproduces each of the nine
    published identities term by term (for ``Ai*Bi`` the ``z`` and ``z^2``
    variants are the polarizations of the squared forms).
    """
    kind = AntiderivKind(kind) if not isinstance(kind, AntiderivKind) else kind
    ai, aip, bi, bip = airy(z)
    pair, order = _KIND_LAYOUT[kind]
    zz = np.asarray(z, dtype=float)
    if pair == "aa":
        forms = _quadratic_antiderivatives(zz, ai, aip, ai, aip)
    elif pair == "bb":
        forms = _quadratic_antiderivatives(zz, bi, bip, bi, bip)
    else:
        forms = _quadratic_antiderivatives(zz, ai, aip, bi, bip)
    value = forms[order]
    return float(value) if np.ndim(value) == 0 else value


def antideriv_integrand(kind, z):
    """The integrand whose antiderivative :func:`airy_antideriv` returns."""
    kind = AntiderivKind(kind) if not isinstance(kind, AntiderivKind) else kind
    ai, _, bi, _ = airy(z)
    pair, order = _KIND_LAYOUT[kind]
    product = {"aa": ai * ai, "bb": bi * bi, "ab": ai * bi}[pair]
    value = np.asarray(z, dtype=float) ** order * product
    return float(value) if np.ndim(value) == 0 else value


def _ai_and_slope(z):
    ai, aip, _, _ = airy(z)
    return ai, aip


def ai_negative_zeros(count, scan_step=0.1, xtol=1e-12):
    """First ``count`` zeros of Ai on the negative axis, in decreasing order.

    Sign changes are located on a grid of spacing ``scan_step`` (zeros of
    Ai are more than 1.5 apart, so no bracket can hold two), bisected to
    ``xtol`` and polished with one Newton step.
    """
    if isinstance(count, bool) or int(count) != count or count < 1:
        raise DomainError(f"count must be a positive integer, got {count!r}")
    count = int(count)
    # |a_j| < (3 pi (4j - 1) / 8)**(2/3) + 1 comfortably bounds the search.
    z_end = -((3 * math.pi * (4 * count - 1) / 8) ** (2 / 3) + 1.0)
    n_steps = int(math.ceil(-z_end / scan_step)) + 1
    grid = -scan_step * np.arange(n_steps)
    values = airy(grid)[0]
    zeros = []
    for i in range(n_steps - 1):
        if len(zeros) == count:
            break
        fa, fb = values[i], values[i + 1]
        if fa == 0.0:
            zeros.append(float(grid[i]))
            continue
        if fa * fb > 0:
            continue
        hi, lo = float(grid[i]), float(grid[i + 1])
        f_hi = fa
        while hi - lo > xtol:
            mid = 0.5 * (lo + hi)
            fm = _ai_and_slope(mid)[0]
            if fm == 0.0:
                lo = hi = mid
                break
            if (fm > 0) == (f_hi > 0):
                hi, f_hi = mid, fm
            else:
                lo = mid
        root = 0.5 * (lo + hi)
        f, fp = _ai_and_slope(root)
        if fp != 0.0:
            root -= f / fp
        zeros.append(root)
    return zeros
