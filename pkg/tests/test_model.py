import numpy as np
import pytest
from hypothesis import given, strategies as st

from smw.model import (
    ChPolySpec, DomainError, Mode, Potential, SourceSpec, UnsupportedError, WeightScheme,
    check_sizes, complex_exp, weight_bosonic, weight_fermionic,
)

TINY = 1e-14  # epsilon must be positive; this stands in for epsilon = 0


@pytest.mark.parametrize("pot,x,expected", [
    (Potential.gaussian(), 0.0, 1.0),
    (Potential.gaussian(), 2.0, np.exp(-2.0)),
    (Potential((0, 0, 0, 0, 1), 2.0), 1.0, np.exp(-0.5)),
])
def test_weight_bosonic_values(pot, x, expected):
    assert weight_bosonic(pot, x) == pytest.approx(expected, rel=1e-15)


def test_weight_fermionic_values():
    g = Potential.gaussian()
    assert weight_fermionic(g, WeightScheme(epsilon=TINY), 0.0) == pytest.approx(1.0, abs=1e-13)
    w = weight_fermionic(g, WeightScheme(epsilon=1e-3), 1.0)
    assert w == pytest.approx(np.exp(-(1 + 1e-3j) ** 2 / 2), rel=1e-15)
    custom = WeightScheme(Mode.CUSTOM_FERMIONIC, Potential((0, 0, -1)), TINY)
    assert weight_fermionic(g, custom, 1.0) == pytest.approx(np.exp(-1.0), rel=1e-12)


@given(st.floats(-3, 3))
def test_flip_sign_weight_continuous_in_epsilon(y):
    g = Potential.gaussian()
    w3 = weight_fermionic(g, WeightScheme(epsilon=1e-3), y)
    w6 = weight_fermionic(g, WeightScheme(epsilon=1e-6), y)
    assert abs(w6 - weight_bosonic(g, y)) < abs(w3 - weight_bosonic(g, y)) + 1e-15
    assert abs(w6 - weight_bosonic(g, y)) <= 1e-5


def test_potential_validation():
    with pytest.raises(DomainError):
        Potential((1.0,))
    with pytest.raises(DomainError):
        Potential((0, 0, 0.5), hbar=0.0)
    assert Potential((0, 0, 0.5, 0, 0)).degree == 2
    assert Potential.gaussian().is_gaussian and not Potential.quartic().is_gaussian


def test_scheme_validation():
    with pytest.raises(UnsupportedError):
        WeightScheme(Mode.FRESNEL)
    with pytest.raises(DomainError):
        WeightScheme(Mode.CUSTOM_FERMIONIC)
    with pytest.raises(DomainError):
        WeightScheme(Mode.CUSTOM_FERMIONIC, Potential((0, 0, 1)))  # must fall to -inf
    with pytest.raises(DomainError):
        WeightScheme(epsilon=0.0)


def test_specs_and_sizes():
    src = SourceSpec((0.1, 0.2), (0.3,))
    assert (src.N, src.M) == (2, 1)
    with pytest.raises(DomainError):
        SourceSpec((0.1, 0.1), ())
    ch = ChPolySpec((0.5j,), ())
    assert (ch.p, ch.q) == (1, 0)
    check_sizes(1, 1, 0, 0)
    check_sizes(1, 2, 1, 0)  # N + p = M + q is allowed
    with pytest.raises(DomainError):
        check_sizes(0, 1, 0, 0)


def test_complex_exp_clips_overflow():
    assert np.isfinite(complex_exp(1e4 + 1j))
    assert complex_exp(0.5j) == pytest.approx(np.exp(0.5j))
