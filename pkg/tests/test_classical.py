import math
import warnings

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from scipy import integrate

from gravibox import DomainError
from gravibox.classical import (
    LaunchSpec, SingularityWarning, Verdict, Wall, bin_probabilities, classify_orbit,
    delta_x, density, fold, moments_x, moments_y, normalization, simulate,
    total_probability, unfolded_advance, unfolded_position,
)

from orbit_cases import irrational_cases, rational_cases, spec_with_ratio


def quad_moment(k, h, L):
    """``int_0^min(h,L) y^k N / sqrt(h - y) dy * L`` with the singular weight handled by QUADPACK."""
    n = normalization(h, L)
    if h <= L:
        val, _ = integrate.quad(lambda y: y ** k, 0.0, h, weight="alg", wvar=(0.0, -0.5),
                                epsabs=0, epsrel=1e-13)
    else:
        val, _ = integrate.quad(lambda y: y ** k / math.sqrt(h - y), 0.0, L,
                                epsabs=0, epsrel=1e-13)
    return L * n * val


def test_launch_spec_validation():
    with pytest.raises(DomainError):
        LaunchSpec.natural(1.5, 1.0, 0.5)
    with pytest.raises(DomainError):
        LaunchSpec.natural(0.5, -1.0, 0.5)
    with pytest.raises(DomainError):
        LaunchSpec.natural(0.5, 1.0, math.pi)
    spec = LaunchSpec(x0=0.0, energy=2.0, angle=math.pi / 6, mass=2.0, gravity=4.0, side=3.0)
    assert spec.h == pytest.approx(2.0 * 0.25 / 8.0)


def test_delta_x_values():
    spec = LaunchSpec.natural(0.3, 1.0, math.pi / 4)
    assert delta_x(spec, 0.0) == pytest.approx(2.0)
    assert delta_x(spec, 1.0) == 0.0
    left = LaunchSpec.natural(0.3, 1.0, 3 * math.pi / 4)
    assert delta_x(left, 0.0) == pytest.approx(-2.0)
    high = LaunchSpec.natural(0.3, 4.0, math.pi / 4)
    assert delta_x(high, 1.0) == pytest.approx(8.0 * math.sqrt(0.5))
    with pytest.raises(DomainError):
        delta_x(spec, 0.9)


def test_corner_launch():
    out = classify_orbit(LaunchSpec.natural(0.0, 1.0, math.pi / 4))
    assert out.verdict is Verdict.CORNER_HIT
    assert out.describe() == "corner_hit,corner=A,bounce=1"
    tr = simulate(LaunchSpec.natural(0.0, 1.0, math.pi / 4), 10)
    assert tr.terminated_at_corner


def test_vertical_is_periodic():
    out = classify_orbit(LaunchSpec.natural(0.4, 0.5, math.pi / 2))
    assert out.verdict is Verdict.PERIODIC and out.vertical
    assert out.describe() == "periodic,vertical,p=1"
    tr = simulate(LaunchSpec.natural(0.4, 0.5, math.pi / 2), 4)
    assert [s.wall_hit for s in tr.segments] == [Wall.FLOOR] * 4
    assert all(s.end[0] == 0.4 for s in tr.segments)


def test_simple_periodic_example():
    # h = 1/2, floor spacing 2 = 2L: one floor bounce per two box widths
    out = classify_orbit(LaunchSpec.natural(0.25, 1.0, math.pi / 4))
    assert (out.verdict, out.p, out.q) == (Verdict.PERIODIC, 1, 1)


@pytest.mark.parametrize("case", range(50))
def test_rational_cases_periodic(case):
    spec, frac = rational_cases()[case]
    out = classify_orbit(spec)
    assert (out.verdict, out.p, out.q) == (Verdict.PERIODIC, frac.denominator, frac.numerator)
    tr = simulate(spec, 4 * (frac.denominator + frac.numerator) + 10)
    floor = tr.floor_events()
    end = floor[frac.denominator - 1]
    assert abs(end.end[0] - spec.x0) < 1e-8 * spec.side
    assert math.copysign(1, end.end_velocity[0]) == math.copysign(1, math.cos(spec.angle))
    # and not earlier
    for seg in floor[:frac.denominator - 1]:
        assert abs(seg.end[0] - spec.x0) > 1e-6


@pytest.mark.parametrize("case", range(50))
def test_irrational_cases_aperiodic(case):
    spec = irrational_cases()[case]
    assert classify_orbit(spec, max_denominator=10_000).verdict is Verdict.APERIODIC


def test_irrational_with_huge_denominator():
    spec = spec_with_ratio(math.sqrt(2) / 2, 0.9, 0.3, ceiling=False)
    assert classify_orbit(spec, max_denominator=10 ** 6).verdict is Verdict.APERIODIC


def test_rational_with_large_denominator():
    spec = spec_with_ratio(1234 / 4321, 0.9, 0.3, ceiling=False)
    out = classify_orbit(spec, max_denominator=10 ** 6)
    assert (out.verdict, out.p, out.q) == (Verdict.PERIODIC, 4321, 1234)


def test_small_max_denominator_demotes():
    spec, frac = rational_cases()[-1]
    assert frac.denominator > 3
    assert classify_orbit(spec, max_denominator=3).verdict is Verdict.APERIODIC


@settings(max_examples=60, deadline=None)
@given(x0=st.floats(0.01, 0.99), energy=st.floats(0.2, 6.0), angle=st.floats(0.1, math.pi - 0.1))
def test_simulation_matches_unfolding(x0, energy, angle):
    spec = LaunchSpec.natural(x0, energy, angle)
    tr = simulate(spec, 30)
    t = 0.0
    for seg in tr.segments:
        if seg.wall_hit is Wall.CORNER:
            break
        mid = t + 0.5 * seg.duration
        t += seg.duration
        ux, uy = unfolded_position(spec, np.array([mid, t]))
        px, py = seg.position(0.5 * seg.duration, spec.gravity)
        assert ux[0] == pytest.approx(px, abs=1e-9)
        assert uy[0] == pytest.approx(py, abs=1e-9)
        assert ux[1] == pytest.approx(seg.end[0], abs=1e-9)
        assert uy[1] == pytest.approx(seg.end[1], abs=1e-9)
    energies = tr.event_energies()
    assert np.max(np.abs(energies - energy)) < 1e-12 * max(1.0, energy)


def test_energy_drift_long_run():
    tr = simulate(LaunchSpec.natural(0.3, 3.7, 1.1), 1000)
    assert np.max(np.abs(tr.event_energies() / 3.7 - 1)) < 1e-12


def test_density_flattens_at_high_energy():
    rho = density(np.linspace(0, 1, 101), 1e6, 1.0)
    assert np.max(np.abs(rho - 1.0)) < 1e-6


def test_fold():
    assert np.allclose(fold(np.array([0.25, 1.25, 2.25, -0.25, 3.0]), 1.0),
                       [0.25, 0.75, 0.25, 0.25, 1.0])


def test_floor_spacing_matches_advance():
    spec = LaunchSpec.natural(0.1, 3.0, 1.0)
    tr = simulate(spec, 60)
    t_floor = np.cumsum([s.duration for s in tr.segments])[
        [i for i, s in enumerate(tr.segments) if s.wall_hit is Wall.FLOOR]]
    period = t_floor[1] - t_floor[0]
    vx = spec.speed * math.cos(spec.angle)
    assert vx * period == pytest.approx(unfolded_advance(spec), rel=1e-12)


def test_density_normalization_random(rng):
    for h, L in zip(rng.uniform(0.01, 20, 100), rng.uniform(0.1, 5, 100)):
        assert quad_moment(0, h, L) == pytest.approx(1.0, abs=1e-7)
        assert total_probability(h, L) == pytest.approx(1.0, abs=1e-12)


def test_density_shape_and_singularity():
    y = np.array([0.0, 0.25, 0.5, 0.75, 1.0])
    with pytest.warns(SingularityWarning):
        rho = density(y, 0.5, 1.0)
    assert np.isinf(rho[2]) and rho[3] == 0 and rho[4] == 0
    assert rho[0] == pytest.approx(1 / (2 * 0.5))
    with warnings.catch_warnings():
        warnings.simplefilter("error")
        high = density(y, 2.0, 1.0)
    assert high[0] == pytest.approx(0.8535533905932738, rel=1e-14)
    with pytest.raises(DomainError):
        density(1.5, 2.0, 1.0)


def test_bin_probabilities_sum():
    for h in (0.3, 1.0, 4.0):
        p = bin_probabilities(np.linspace(0, 1, 11), h, 1.0)
        assert p.sum() == pytest.approx(1.0, abs=1e-13)
        assert np.all(p >= 0)


@pytest.mark.parametrize("ratio", [0.1, 0.5, 0.99, 1.01, 2.0, 10.0, 1e3])
@pytest.mark.parametrize("L", [1.0, 2.5])
def test_moments_vs_quadrature(ratio, L):
    h = ratio * L
    m = moments_y(h, L)
    m0, m1, m2 = (quad_moment(k, h, L) for k in range(3))
    mean = m1 / m0
    assert m.mean == pytest.approx(mean, rel=1e-7)
    assert m.second_moment == pytest.approx(m2 / m0, rel=1e-7)
    assert m.stddev == pytest.approx(math.sqrt(m2 / m0 - mean * mean), rel=1e-7)


def test_moment_spot_value():
    assert moments_y(2.0, 1.0).mean == pytest.approx(0.528595479208968317, rel=1e-13)


def test_moments_continuous_at_ceiling():
    below, at, above = moments_y(1 - 1e-12, 1.0), moments_y(1.0, 1.0), moments_y(1 + 1e-12, 1.0)
    assert at.mean == 2.0 / 3.0
    assert above.mean == pytest.approx(at.mean, abs=1e-5)
    assert below.stddev == pytest.approx(above.stddev, abs=1e-5)
    assert at.j_correction == 0.0


def test_large_h_limit():
    m = moments_y(1e4, 1.0)
    assert m.mean == pytest.approx(0.5, abs=1e-4)
    assert m.stddev == pytest.approx(1 / (2 * math.sqrt(3)), abs=1e-3)
    assert moments_x(1.0)[2] == pytest.approx(1 / (2 * math.sqrt(3)))
