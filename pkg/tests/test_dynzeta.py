import cmath
import math

import pytest
from hypothesis import given
from hypothesis import strategies as st

from zetaforge.dynzeta import (
    ZetaValue,
    argument_principle,
    closed_form_log_derivative,
    closed_form_zeta,
    euler_product,
    log_derivative,
)
from zetaforge.errors import DomainError, InsufficientDataError, PoleError
from zetaforge.orbits import MappingTorusModel, OrbitTable, primitive_orbits, trace_power

LAM = (3 + math.sqrt(5)) / 2
H = math.log(LAM)


@pytest.fixture(scope="module")
def table(cat):
    return primitive_orbits(cat, 70)


def test_empty_table(cat):
    empty = OrbitTable(cat, (), 80)
    assert euler_product(empty, 2, 60).value == 1
    assert log_derivative(empty, 2, 60) == 0


def test_euler_matches_closed_form(cat, table):
    zv = euler_product(table, 2, 40)
    assert abs(zv.value - closed_form_zeta(cat, 2)) < 1e-10


def test_truncation_within_tail_bound(cat, table):
    for s in (2, 1.2 + 1j, 1.05 - 0.3j):
        short, long = euler_product(table, s, 40), euler_product(table, s, 50)
        assert abs(short.value - long.value) <= short.tail_bound
        assert abs(short.value - closed_form_zeta(cat, s)) <= short.tail_bound + 1e-12


def test_error_shrinks_with_length(cat, table):
    s = 1.1
    errs = [abs(euler_product(table, s, L).value - closed_form_zeta(cat, s)) for L in (10, 20, 30, 40)]
    assert errs == sorted(errs, reverse=True)


def test_log_against_trace_series(cat):
    series = -sum(math.exp(-2 * n) / n * (trace_power(cat, n) - 2) for n in range(1, 61))
    assert cmath.log(closed_form_zeta(cat, 2)) == pytest.approx(series, abs=1e-12)


@given(st.floats(1.1, 4.0), st.floats(-6, 6))
def test_conjugation(re, im):
    cat = MappingTorusModel((2, 1, 1, 1))
    s = complex(re, im)
    assert closed_form_zeta(cat, s.conjugate()) == pytest.approx(closed_form_zeta(cat, s).conjugate())


def test_closed_form_limits(cat):
    assert closed_form_zeta(cat, 40) == pytest.approx(1, abs=1e-15)
    # zero at s = log(lambda), pole at s = 0
    for eps in (1e-3, 1e-6):
        assert abs(closed_form_zeta(cat, H + eps)) < 10 * eps
        assert abs(1 / closed_form_zeta(cat, eps)) < 10 * eps
    with pytest.raises(PoleError):
        closed_form_zeta(cat, 2j * math.pi)


def test_log_derivative_finite_difference(cat, table):
    h = 1e-5
    fd = (cmath.log(euler_product(table, 2 + h, 60).value)
          - cmath.log(euler_product(table, 2 - h, 60).value)) / (2 * h)
    assert abs(log_derivative(table, 2, 60) - fd) < 1e-7


def test_log_derivative_closed_form(cat, table):
    x = math.exp(-2.5)
    exact = LAM * x / (1 - LAM * x) + x / LAM / (1 - x / LAM) - 2 * x / (1 - x)
    assert closed_form_log_derivative(cat, 2.5) == pytest.approx(exact, abs=1e-15)
    assert abs(log_derivative(table, 2.5, 60) - exact) < 1e-9


@pytest.mark.parametrize("center,radius,order", [(0.0, 0.5, -2), (H, 0.3, 1), (-H, 0.3, 1), (2j * math.pi, 0.5, -2)])
def test_winding_recovers_orders(cat, center, radius, order):
    assert abs(argument_principle(cat, center, radius) - order) < 1e-3


def test_domain_and_table_errors(cat, table):
    with pytest.raises(DomainError):
        euler_product(table, 1.0, 40)
    with pytest.raises(InsufficientDataError):
        euler_product(primitive_orbits(cat, 10), 2, 20)
    with pytest.raises(ValueError):
        ZetaValue(1, 1.0, -1.0)


@pytest.mark.parametrize("matrix", [(1, 1, 1, 0), (-2, -1, -1, -1), (2, 1, 1, 0)])
def test_per_iterate_index_models(matrix):
    model = MappingTorusModel(matrix, 1.0, per_iterate_index=True)
    tab = primitive_orbits(model, 50)
    s = 3.0 + 0.5j
    zv = euler_product(tab, s, 50)
    assert abs(zv.value - closed_form_zeta(model, s)) < 1e-12
    x = cmath.exp(-s)
    h = 1e-6
    fd = (cmath.log(closed_form_zeta(model, s + h)) - cmath.log(closed_form_zeta(model, s - h))) / (2 * h)
    assert abs(log_derivative(tab, s, 50) - fd) < 1e-8
    assert abs(closed_form_log_derivative(model, s) - fd) < 1e-8
    assert abs(x) < 1
