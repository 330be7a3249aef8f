import math

import mpmath as mp
import numpy as np
import pytest
from scipy import special

from gravibox import DomainError, RangeError
from gravibox.quadrature import adaptive_simpson
from gravibox.specialfn import (
    AntiderivKind, Z_MAX, Z_MIN, ai_negative_zeros, airy, airy_antideriv, airy_eval,
    airy_osc_approx, antideriv_integrand,
)

mp.mp.dps = 30


def _mp_airy(z):
    z = mp.mpf(z)
    return (float(mp.airyai(z)), float(mp.airyai(z, 1)),
            float(mp.airybi(z)), float(mp.airybi(z, 1)))


def test_values_at_origin():
    ai, aip, bi, bip = airy(0.0)
    assert ai == pytest.approx(0.355028053887817239260063186004, abs=1e-15)
    assert aip == pytest.approx(-0.258819403792806798405183560189, abs=1e-15)
    assert bi == pytest.approx(0.614926627446000735150922369094, abs=1e-15)
    assert bip == pytest.approx(0.448288357353826357914823710399, abs=1e-15)


@pytest.mark.parametrize("z", [-9000.0, -300.0, -30.0, -8.01, -7.99, -3.3, -0.2, 0.7, 5.5,
                               7.99, 8.01, 20.0, 60.0])
def test_matches_mpmath(z):
    got = airy(z)
    ref = _mp_airy(z)
    # Ai, Ai' decay and Bi, Bi' grow for z > 0; oscillate with envelope below.
    if z > 0:
        for g, r in zip(got, ref):
            assert g == pytest.approx(r, rel=1e-10)
    else:
        env = 1.0 / (math.sqrt(math.pi) * (-z) ** 0.25)
        env_p = (-z) ** 0.25 / math.sqrt(math.pi)
        for g, r, e in zip(got, ref, (env, env_p, env, env_p)):
            assert abs(g - r) <= 1e-10 * max(e, 1.0)


def test_agrees_with_scipy_on_a_grid():
    z = np.linspace(-20, 20, 801)
    ours = np.array(airy(z))
    ref = np.array(special.airy(z))
    scale = np.maximum(1.0, np.abs(ref))
    assert np.max(np.abs(ours - ref) / scale) < 1e-9


def test_wronskian_random(rng):
    z = rng.uniform(-30, 10, 10_000)
    ai, aip, bi, bip = airy(z)
    w = ai * bip - aip * bi
    assert np.max(np.abs(w - 1 / math.pi)) < 1e-10


def test_continuity_across_switch():
    for edge in (-8.0, 8.0):
        below = np.array(airy(np.nextafter(edge, -math.inf)))
        above = np.array(airy(np.nextafter(edge, math.inf)))
        assert np.all(np.abs(below - above) <= 1e-11 * np.maximum(1, np.abs(below)))


def test_scalar_and_array_shapes():
    assert isinstance(airy(1.0)[0], float)
    out = airy(np.zeros((3, 2)))
    assert all(a.shape == (3, 2) for a in out)


def test_airy_eval_and_errors():
    ev = airy_eval(-2.0)
    assert ev.wronskian == pytest.approx(1 / math.pi, abs=1e-14)
    with pytest.raises(RangeError):
        airy_eval(Z_MAX * 1.5)
    with pytest.raises(RangeError):
        airy_eval(Z_MIN * 1.5)
    with pytest.raises(DomainError):
        airy_eval(float("nan"))
    with pytest.raises(DomainError):
        airy(np.array([0.0, math.inf]))


def test_osc_approx_improves_with_depth():
    errs = []
    for x in (-1.0, -4.0, -50.0):
        ai, _, bi, _ = airy(x)
        a, b = airy_osc_approx(x)
        errs.append(max(abs(a - ai), abs(b - bi)) * (-x) ** 0.25)
    assert errs[0] > errs[1] > errs[2]
    assert errs[2] < 1e-3
    # against the largest |Ai| on the negative axis (0.53566 at z = -1.0188)
    peak = abs(airy(-1.0187929716474710)[0])
    assert abs(airy_osc_approx(-4.0)[0] - airy(-4.0)[0]) / peak <= 0.01
    ai, _, bi, _ = airy(-50.0)
    a, b = airy_osc_approx(-50.0)
    assert abs(a / ai - 1) < 1e-3 and abs(b / bi - 1) < 1e-3
    assert abs(airy_osc_approx(-1.0)[0] / airy(-1.0)[0] - 1) < 0.05
    with pytest.raises(DomainError):
        airy_osc_approx(0.5)


def test_negative_zeros_match_reference():
    zeros = ai_negative_zeros(12)
    ref = special.ai_zeros(12)[0]
    assert np.allclose(zeros, ref, atol=1e-11, rtol=0)
    assert float(mp.airyaizero(10)) == pytest.approx(zeros[9], abs=1e-11)


def test_negative_zeros_contract():
    assert ai_negative_zeros(1)[0] == pytest.approx(-2.338107410459767, abs=1e-12)
    assert abs(airy(-2.3381074)[0]) < 1e-6
    z = ai_negative_zeros(12)
    assert all(a - b > 1 for a, b in zip(z[:3], z[1:3]))
    assert all(a > b for a, b in zip(z, z[1:]))
    for j in range(3, 13):
        approx = -(3 * math.pi * (4 * j - 1) / 8) ** (2 / 3)
        assert abs(approx / z[j - 1] - 1) < 0.01
    with pytest.raises(DomainError):
        ai_negative_zeros(0)


def test_negative_zeros_against_dense_scan():
    z = np.linspace(-12, 0, 120_001)
    ai = airy(z)[0]
    changes = np.count_nonzero(np.sign(ai[:-1]) != np.sign(ai[1:]))
    found = [x for x in ai_negative_zeros(20) if x > -12]
    assert changes == len(found)


@pytest.mark.parametrize("kind", list(AntiderivKind))
def test_antiderivative_derivative(kind):
    z = np.linspace(-7.5, 1.5, 37)
    h = 1e-3
    F = lambda t: airy_antideriv(kind, t)  # noqa: E731
    fd = (8 * (F(z + h) - F(z - h)) - (F(z + 2 * h) - F(z - 2 * h))) / (12 * h)
    assert np.allclose(fd, antideriv_integrand(kind, z), atol=1e-7, rtol=1e-7)


@pytest.mark.parametrize("kind", list(AntiderivKind))
def test_antiderivative_difference_matches_mpmath(kind):
    pair, power = {"I1": ("aa", 0), "I2": ("bb", 0), "I3": ("ab", 0), "I4": ("aa", 1),
                   "I5": ("ab", 1), "I6": ("bb", 1), "I7": ("aa", 2), "I8": ("ab", 2),
                   "I9": ("bb", 2)}[kind.name]
    f = {"aa": lambda t: mp.airyai(t) ** 2, "bb": lambda t: mp.airybi(t) ** 2,
         "ab": lambda t: mp.airyai(t) * mp.airybi(t)}[pair]
    a, b = -5.25, 1.75
    ref = float(mp.quad(lambda t: t ** power * f(t), [a, -2, 0, b]))
    got = airy_antideriv(kind, b) - airy_antideriv(kind, a)
    assert got == pytest.approx(ref, abs=1e-11, rel=1e-11)


def test_antiderivative_by_simpson():
    got = airy_antideriv(AntiderivKind.I7, 0.0) - airy_antideriv(AntiderivKind.I7, -2.0)
    oracle = adaptive_simpson(lambda z: antideriv_integrand("z^2*Ai^2", z), -2.0, 0.0, tol=1e-12)
    assert got == pytest.approx(0.48614919379114266586, abs=1e-12)
    assert oracle == pytest.approx(got, abs=1e-11)
    assert airy_antideriv("Ai^2", 0.0) == pytest.approx(-0.06698748377966397414, abs=1e-15)
