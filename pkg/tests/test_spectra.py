import math

import pytest
from hypothesis import given
from hypothesis import strategies as st

from zetaforge.errors import DomainError, TieError, UnsupportedModelError
from zetaforge.orbits import MappingTorusModel
from zetaforge.spectra import (
    APSpectrum,
    SpectrumSet,
    default_cutoff,
    enumerate_window,
    mapping_torus_spectrum,
    model_spectra,
    truncate,
)

TWO_PI = 2 * math.pi
INTEGERS = SpectrumSet((APSpectrum(0.0, TWO_PI),), (), 0)


def test_truncate_splits_at_cutoff():
    below, upper, lower = truncate(INTEGERS, 7.0)
    assert sorted(r.imag for r, _ in below.elements) == pytest.approx([-TWO_PI, 0.0, TWO_PI])
    assert upper[0].first == pytest.approx(2j * TWO_PI)
    assert lower[0].first == pytest.approx(-2j * TWO_PI)
    assert upper[0].direction == 1 and lower[0].direction == -1


def test_truncate_rejects_ties():
    with pytest.raises(TieError):
        truncate(INTEGERS, TWO_PI)
    with pytest.raises(TieError):
        truncate(SpectrumSet((), ((3j, 1),)), 3.0)
    with pytest.raises(DomainError):
        truncate(INTEGERS, 0.0)


def test_extras_beyond_cutoff_become_isolated_tails():
    spec = SpectrumSet((), ((1 + 10j, 2), (0.5j, 1), (-20j, 1)))
    below, upper, lower = truncate(spec, 5.0)
    assert below.elements == ((0.5j, 1),)
    assert upper[0].isolated and upper[0].multiplicity == 2
    assert lower[0].isolated


def test_window_includes_ties():
    assert len(enumerate_window(INTEGERS, TWO_PI)) == 3


@given(st.floats(-50, 50))
def test_default_cutoff_clears_everything(im_s):
    spec = SpectrumSet((APSpectrum(0.3 + 2j, 1.5), APSpectrum(-1.0, TWO_PI)), ((4 + 9j, 1),))
    T = default_cutoff(spec, complex(1, im_s))
    assert T > abs(im_s) + 1 and T > 9 + 1
    truncate(spec, T)


@given(st.lists(st.tuples(st.complex_numbers(max_magnitude=100), st.integers(1, 5)), max_size=4),
       st.floats(0.1, 10), st.integers(0, 2))
def test_dict_round_trip(extras, spacing, degree):
    spec = SpectrumSet((APSpectrum(1 - 2j, spacing, 2),), tuple(extras), degree)
    assert SpectrumSet.from_dict(spec.to_dict()) == spec


def test_conjugate_and_shift():
    spec = SpectrumSet((APSpectrum(0.5 + 1j, 2.0),), ((3 - 1j, 1),), 1)
    c = spec.conjugate()
    assert c.progressions[0].base == 0.5 - 1j and c.extras == ((3 + 1j, 1),)
    sh = spec.shifted(1j)
    assert sh.progressions[0].base == 0.5 + 2j


def test_validation():
    with pytest.raises(DomainError):
        APSpectrum(0, -1.0)
    with pytest.raises(DomainError):
        SpectrumSet(degree=3)
    with pytest.raises(DomainError):
        SpectrumSet(extras=((1j, 0),))
    assert SpectrumSet().is_empty and SpectrumSet().is_finite


def test_cat_model_spectra(cat):
    s0, s1, s2 = model_spectra(cat)
    h = math.log((3 + math.sqrt(5)) / 2)
    assert [p.base for p in s0.progressions] == [0]
    assert sorted(p.base.real for p in s1.progressions) == pytest.approx([-h, h])
    assert all(p.spacing == pytest.approx(TWO_PI) for p in s1.progressions)
    assert (s0.degree, s1.degree, s2.degree) == (0, 1, 2)


def test_return_time_scales_spectrum():
    spec = mapping_torus_spectrum(MappingTorusModel((2, 1, 1, 1), 2.0), 1)
    assert spec.progressions[0].spacing == pytest.approx(math.pi)
    assert spec.progressions[0].base.real == pytest.approx(math.log((3 + math.sqrt(5)) / 2) / 2)


def test_spectra_need_positive_eigenvalues():
    flip = MappingTorusModel((-2, -1, -1, -1), per_iterate_index=True)
    with pytest.raises(UnsupportedModelError):
        mapping_torus_spectrum(flip, 1)
