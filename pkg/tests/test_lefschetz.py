import math

import mpmath
import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from zetaforge.errors import DomainError, InsufficientDataError
from zetaforge.lefschetz import (
    BumpFunction,
    bump_transform,
    bump_transforms,
    laplace_identity_check,
    laplace_lhs,
    laplace_rhs,
    lhs_trace,
    rhs_orbits,
    spectral_tail_estimate,
)
from zetaforge.orbits import OrbitTable, primitive_orbits
from zetaforge.spectra import SpectrumSet, model_spectra

K = 2000 * math.pi


def mp_transform(bump, rho, pieces=40):
    a, b = bump.support
    w = mpmath.mpf(bump.half_width)

    def f(t):
        u = (t - bump.center) / w
        return 0 if abs(u) >= 1 else mpmath.exp(-1 / (1 - u * u) + rho * t)

    return complex(mpmath.quad(f, mpmath.linspace(a, b, pieces + 1)))


def test_bump_validation():
    with pytest.raises(DomainError):
        BumpFunction(0.2, 0.3)
    with pytest.raises(DomainError):
        BumpFunction(1.0, 0.0)


def test_bump_profile():
    b = BumpFunction(2.0, 0.4)
    assert b(2.0) == pytest.approx(math.exp(-1))
    assert b(1.6) == 0 and b(2.5) == 0


@pytest.mark.parametrize("m", [1, 2, 3, 6])
def test_bump_derivatives_against_finite_differences(m):
    b = BumpFunction(2.0, 0.4)
    t = np.linspace(1.7, 2.3, 7)
    h = 1e-5
    lower = b.derivative(t - h, m - 1)
    upper = b.derivative(t + h, m - 1)
    exact = b.derivative(t, m)
    np.testing.assert_allclose(exact, (upper - lower) / (2 * h), rtol=1e-5, atol=1e-6 * np.max(np.abs(exact)))


def test_transform_at_zero_is_mass():
    b = BumpFunction(2.0, 0.4)
    mass = bump_transform(b, 0)
    assert 0 < mass.real < 2 * 0.4 and mass.imag == 0
    assert mass == pytest.approx(mp_transform(b, 0), abs=1e-13)


@pytest.mark.parametrize("rho", [1.5, -0.96 + 40j, 0.96 + 300j, 2j * math.pi * 1000])
def test_transform_against_adaptive_quadrature(rho):
    b = BumpFunction(2.0, 0.3)
    bound = 1e-12 * math.exp(abs(rho.real) * 2.3) if isinstance(rho, complex) else 1e-12 * math.exp(1.5 * 2.3)
    pieces = 800 if abs(rho) > 1000 else 40
    assert abs(bump_transform(b, rho) - mp_transform(b, rho, pieces)) <= bound


def test_transform_linearity():
    b = BumpFunction(2.0, 0.4)
    rhos = np.array([0.5, 1j, -1 + 30j])
    t = np.linspace(1.6, 2.4, 3001)
    # scaling phi by 2 doubles the pairing
    np.testing.assert_allclose(2 * bump_transforms(b, rhos),
                               [np.trapezoid(2 * b(t) * np.exp(r * t), t) for r in rhos], atol=1e-9)


def test_transform_decays_fast():
    assert abs(bump_transform(BumpFunction(2.0, 0.4), 2j * math.pi * 200)) <= 1e-10


@pytest.mark.parametrize("c", [1.0, 2.0, 3.0])
def test_trace_formula_cross_sides(cat, c):
    b = BumpFunction(c, 0.3)
    lhs, tail = lhs_trace(cat, b, K)
    rhs = rhs_orbits(cat, b)
    assert abs(lhs - rhs) <= 1e-6
    assert tail < 1e-6


def test_trace_formula_wider_bump(cat):
    b = BumpFunction(2.0, 0.4)
    lhs, _ = lhs_trace(cat, b, K)
    assert rhs_orbits(cat, b) == pytest.approx(-5 * math.exp(-1), abs=1e-15)
    assert abs(lhs - rhs_orbits(cat, b)) < 1e-6


def test_exact_orbit_side(cat):
    assert rhs_orbits(cat, BumpFunction(3.0, 0.4)) == pytest.approx(-16 * math.exp(-1), abs=1e-15)
    assert rhs_orbits(cat, BumpFunction(0.5, 0.2)) == 0


def test_no_orbit_lengths_in_support(cat):
    lhs, _ = lhs_trace(cat, BumpFunction(0.5, 0.2), K)
    assert abs(lhs) < 1e-6


def test_raising_cutoff_is_stable(cat):
    b = BumpFunction(2.0, 0.4)
    lhs1, tail = lhs_trace(cat, b, K)
    lhs2, _ = lhs_trace(cat, b, 2 * K)
    assert abs(lhs1 - lhs2) <= max(tail, 1e-12)


def test_insufficient_cutoff(cat):
    with pytest.raises(InsufficientDataError):
        lhs_trace(cat, BumpFunction(2.0, 0.3), 50.0, tol=1e-8)


@given(st.floats(0.5, 4.0), st.floats(0.05, 0.4), st.floats(-3, 3))
def test_orbit_side_linear_and_additive(c, w, scale):
    from zetaforge.orbits import MappingTorusModel
    cat = MappingTorusModel((2, 1, 1, 1))
    if c - w <= 0:
        return
    b = BumpFunction(c, w)
    far = BumpFunction(c + 2 * w + 0.5, w)
    one = rhs_orbits(cat, b)
    two = rhs_orbits(cat, far)
    assert scale * one == pytest.approx(scale * one)
    # disjoint supports: pairing with the sum is the sum of pairings
    table = primitive_orbits(cat, 8)
    both = sum(r.count * r.length * r.index * (b(k * r.length) + far(k * r.length))
               for r in table.rows for k in range(1, 10))
    assert both == pytest.approx(one + two, abs=1e-12)


def test_tail_estimate_decreases_with_cutoff(cat):
    spectra = model_spectra(cat)
    b = BumpFunction(2.0, 0.3)
    t1 = spectral_tail_estimate(spectra, b, K)
    t2 = spectral_tail_estimate(spectra, b, 2 * K)
    assert t2 < t1 / 20


@pytest.mark.parametrize("s,z", [(2.0, 2.0), (1.5, 3.0), (2 + 1j, 2.5 - 0.5j)])
def test_laplace_identity(cat, s, z):
    chk = laplace_identity_check(cat, s, z, 60)
    assert chk.difference <= 1e-7
    assert chk.difference <= 10 * (chk.tail_bound + chk.lhs_error) + 1e-9


def test_laplace_residual_tracks_entropy_rate(cat):
    table = primitive_orbits(cat, 40)
    lhs, _ = laplace_lhs(model_spectra(cat), 1.5, 3.0)
    res = [abs(lhs - laplace_rhs(table, 1.5, 3.0, L)) for L in (10, 20, 30)]
    # leading dropped iterate ~ e^{-(s-h) n} n^{z-1}
    rate = math.exp(-(1.5 - math.log((3 + math.sqrt(5)) / 2)) * 10)
    assert res[1] / res[0] == pytest.approx(rate * (21 / 11) ** 2, rel=0.3)
    assert res[2] / res[1] == pytest.approx(rate * (31 / 21) ** 2, rel=0.3)


def test_laplace_trivial_sides(cat):
    assert laplace_rhs(OrbitTable(cat, (), 60), 2, 2, 60) == 0
    empty = [SpectrumSet(degree=p) for p in (0, 1, 2)]
    assert laplace_lhs(empty, 2, 2) == (0, 0)


def test_laplace_domain(cat):
    with pytest.raises(DomainError):
        laplace_identity_check(cat, 2, 0.5)
    with pytest.raises(DomainError):
        laplace_identity_check(cat, 0.5, 2)
