import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from smw import quad
from smw.model import DomainError, Potential, WeightScheme
from smw.quad import AuxKernels, QuadratureRule

from conftest import rel

TS = QuadratureRule(quad.TANH_SINH, 160)


def test_rule_validation_and_weight_sum():
    with pytest.raises(DomainError):
        QuadratureRule(order=4)
    with pytest.raises(DomainError):
        QuadratureRule("simpson")
    assert quad.hermite_raw_weight_sum(80) == pytest.approx(math.sqrt(math.pi), rel=1e-12)


@pytest.mark.parametrize("kind", [quad.GH, quad.TANH_SINH])
def test_rules_integrate_gaussian(kind):
    x, w = QuadratureRule(kind, 120).mapped(0.3, 1.0)
    assert np.sum(w * np.exp(-(x - 0.3) ** 2)) == pytest.approx(math.sqrt(math.pi), rel=1e-12)


@pytest.mark.parametrize("k,lam,v", [(0, 5, 1), (3, 2, 8), (1, 1j, 1j)])
def test_p_func(k, lam, v):
    assert quad.p_func(k, lam) == v


def test_p_func_derivatives():
    assert quad.p_func(3, 2.0, 1) == 12
    assert quad.p_func(2, 2.0, 3) == 0


def test_q_examples(gauss):
    assert gauss.q(0, 0.0) == pytest.approx(math.sqrt(2 * math.pi), rel=1e-14)
    assert abs(gauss.q(1, 0.0)) < 1e-14
    assert gauss.q(0, 1.0) == pytest.approx(math.sqrt(2 * math.pi) * math.exp(0.5), rel=1e-13)


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 8), st.floats(-3, 3), st.sampled_from([0.5, 1.0, 2.0]))
def test_q_closed_form(k, a, hbar):
    kern = AuxKernels(Potential.gaussian(hbar))
    exact = quad.gaussian_q(k, a, hbar)
    # odd moments vanish at a = 0, so measure the error against the moment scale
    scale = max(abs(exact), abs(quad.gaussian_q(0, a, hbar)) * hbar ** (k / 2))
    assert abs(kern.q(k, a) - exact) <= 1e-8 * scale


@pytest.mark.parametrize("k", [0, 1, 3])
def test_q_derivative_recursion(gauss, k):
    a = 0.4
    exact = gauss.q(k + 1, a)
    errs = []
    for h in (1e-3, 5e-4):
        fd = (gauss.q(k, a + h) - gauss.q(k, a - h)) / (2 * h)
        errs.append(abs(fd - exact))
    assert errs[1] / abs(exact) < 1e-6
    assert 3.0 < errs[0] / errs[1] < 5.0


def test_r_at_origin(gauss):
    assert gauss.r(0, 0, 0.0, 0.0) == pytest.approx(1j * math.pi**1.5, rel=1e-10)


def test_r_equal_arguments_imaginary_only_at_origin(gauss):
    assert abs(gauss.r(0, 0, 0.0, 0.0).real) < 1e-8
    # away from the origin the symmetric point carries a real part
    assert abs(gauss.r(0, 0, 0.3, 0.3).real) > 1e-2


@pytest.mark.parametrize("a,b", [(0.5, 0.1), (-0.3, 0.2), (0.0, -0.6)])
def test_r_closed_form(gauss, a, b):
    assert rel(gauss.r(0, 0, a, b), quad.gaussian_r(a, b)) < 1e-6


def test_r_derivative_fd(gauss):
    a, b, h = 0.5, 0.1, 1e-4
    fd = (gauss.r(0, 0, a + h, b) - gauss.r(0, 0, a - h, b)) / (2 * h)
    assert rel(gauss.r(1, 0, a, b), fd) < 1e-6


def test_r_source_derivatives_sum(gauss):
    # (d_a + d_b) R inserts x - y, which cancels the kernel
    a, b = 0.3, -0.2
    lhs = gauss.r(1, 0, a, b) + gauss.r(0, 1, a, b)
    assert rel(lhs, gauss.q(0, a) * gauss.q_fermionic(0, b)) < 1e-10


def test_s_left_asymptotics(gauss):
    T = 1e3
    v = gauss.s_left(0.2, 1j * T)
    assert abs(v * (-1j * T) / gauss.q(0, 0.2) - 1) < 1e-2


def test_s_left_symmetry(gauss):
    assert abs(gauss.s_left(0.0, 1j).real) < 1e-8


@pytest.mark.parametrize("a,mu", [(0.2, 1j), (-0.4, 0.3 - 0.8j), (0.1, 0.5 + 0.2j)])
def test_s_left_closed_form(gauss, a, mu):
    assert rel(gauss.s_left(a, mu), quad.gaussian_s_left(a, mu)) < 1e-7


@pytest.mark.parametrize("lam,b", [(2.0, 0.1), (0.3 - 0.5j, -0.2)])
def test_s_right_closed_form(gauss, lam, b):
    assert rel(gauss.s_right(lam, b), quad.gaussian_s_right(lam, b)) < 1e-7


def _two_rules(kern):
    return kern, kern.with_rule(TS)


@pytest.mark.parametrize("pot", [Potential.gaussian(), Potential.quartic()], ids=["gauss", "quartic"])
def test_gauss_hermite_vs_tanh_sinh(pot):
    gh, ts = _two_rules(AuxKernels(pot))
    pairs = [
        (gh.q(0, 0.3), ts.q(0, 0.3)),
        (gh.q(3, -0.5), ts.q(3, -0.5)),
        (gh.q_fermionic(2, 0.2), ts.q_fermionic(2, 0.2)),
        (gh.r(0, 0, 0.5, 0.1), ts.r(0, 0, 0.5, 0.1)),
        (gh.r(1, 1, 0.2, -0.3), ts.r(1, 1, 0.2, -0.3)),
        (gh.s_left(0.2, 0.3 + 1j), ts.s_left(0.2, 0.3 + 1j)),
        (gh.s_right(2.0, 0.1), ts.s_right(2.0, 0.1)),
        (gh.s_right(0.1 - 0.6j, -0.2, 1, 0), ts.s_right(0.1 - 0.6j, -0.2, 1, 0)),
    ]
    for x, y in pairs:
        assert rel(x, y) <= 1e-7


def test_r_tilde():
    assert quad.r_tilde(3, 1) == 0.5
    assert quad.r_tilde(0, 1j) == pytest.approx(1j)
    with pytest.raises(DomainError):
        quad.r_tilde(1, 1)


@given(st.complex_numbers(max_magnitude=5), st.complex_numbers(max_magnitude=5))
def test_r_tilde_antisymmetric(l, m):
    if abs(l - m) > 1e-3:
        assert quad.r_tilde(l, m) == pytest.approx(-quad.r_tilde(m, l))


def test_weighted_kernels(gauss):
    assert quad.weighted_kernels(gauss, "P", 0, 0.0) == 1
    # flip-sign: w_B(1) w_F(i) = e^{-1/2} e^{+1/2}
    assert quad.weighted_kernels(gauss, "Rt", 1.0, 1j) == pytest.approx(1 / (1 - 1j), rel=1e-12)
    assert quad.weighted_kernels(gauss, "Q", 2, 0.3) == gauss.q(2, 0.3)
    with pytest.raises(DomainError):
        quad.weighted_kernels(gauss, "X", 0)
    assert quad.weighted_sign(1, 0, 0, 1) == 1 and quad.weighted_sign(0, 1, 0, 0) == -1


def test_cache_bit_identical():
    k = AuxKernels(Potential.quartic())
    first = k.r(0, 0, 0.3, -0.1)
    fresh = AuxKernels(Potential.quartic()).r(0, 0, 0.3, -0.1)
    assert first == k.r(0, 0, 0.3, -0.1) == fresh


@pytest.mark.parametrize("eps", [1e-2, 1e-3])
def test_epsilon_independent_identity(eps):
    k = AuxKernels(Potential.gaussian(), WeightScheme(epsilon=eps))
    a, b = 0.3, -0.2
    assert rel(k.r(1, 0, a, b) + k.r(0, 1, a, b), k.q(0, a) * k.q_fermionic(0, b)) < 1e-10


def test_gaussian_moment():
    assert quad.gaussian_moment(4, 0.0, 1.0) == 3
    assert quad.gaussian_moment(2, 1.0, 2.0) == 3
