import numpy as np
import pytest

from smw import oracle
from smw.model import ChPolySpec, DomainError, Potential, SourceSpec, UnsupportedError
from smw.partition import psi, z_source

from conftest import rel


def test_eigenvalue_integral_n1_is_q0(gauss):
    assert rel(oracle.eigenvalue_integral(gauss, SourceSpec((0.3,), ())), gauss.q(0, 0.3)) < 1e-13


def test_eigenvalue_integral_11(gauss):
    src = SourceSpec((0.3,), (-0.2,))
    assert rel(oracle.eigenvalue_integral(gauss, src), z_source(gauss, src).value) <= 1e-6


def test_eigenvalue_integral_21_chpoly(gauss):
    src, ch = SourceSpec((0.3, -0.25), (0.1,)), ChPolySpec((0.45 + 0.3j,), ())
    assert rel(oracle.eigenvalue_integral(gauss, src, ch), psi(gauss, src, ch).value) <= 1e-5


def test_eigenvalue_integral_limits(gauss):
    assert oracle.eigenvalue_integral(gauss, SourceSpec((), ())) == 1
    with pytest.raises(UnsupportedError):
        oracle.eigenvalue_integral(gauss, SourceSpec((0.1, 0.2, 0.3, 0.4), (0.5,)))


def test_eigenvalue_integral_deterministic(gauss):
    src = SourceSpec((0.3, -0.25), (0.1,))
    assert oracle.eigenvalue_integral(gauss, src) == oracle.eigenvalue_integral(gauss, src)


def test_contour_levels_respect_poles(gauss):
    src, ch = SourceSpec((0.3,), (-0.2,)), ChPolySpec((0.4 + 0.2j,), (0.1 + 0.3j, -0.1 - 0.3j))
    X, Y = oracle.contour_levels(gauss, src, ch)
    assert -0.3 < X < 0.3 and X < Y < 0.2


def test_hciz_zero_source_exact():
    est = oracle.haar_hciz_mc([0.0, 0.0], [0.5, -0.2], samples=1000)
    assert est.mean == 1 and est.stderr == 0


def test_hciz_example():
    exact = oracle.hciz_closed_form([1.0, 0.0], [1.0, 0.0])
    assert exact == pytest.approx(np.e - 1, rel=1e-14)
    est = oracle.haar_hciz_mc([1.0, 0.0], [1.0, 0.0], samples=20_000, seed=1)
    assert est.zscore(exact) < 3


@pytest.mark.parametrize("x,a", [([0.4, -0.3], [0.7, -0.2]), ([0.5, 0.1, -0.4], [0.6, -0.1, -0.5])])
def test_hciz_vs_closed_form(x, a):
    est = oracle.haar_hciz_mc(x, a, samples=100_000, seed=0)
    assert est.zscore(oracle.hciz_closed_form(x, a)) < 3


def test_hciz_haar_invariance():
    one = oracle.haar_hciz_mc([1.0, 0.0], [1.0, 0.0], samples=20_000, seed=4)
    two = oracle.haar_hciz_mc([1.0, 0.0], [0.0, 1.0], samples=20_000, seed=5)
    assert abs(one.mean - two.mean) < 3 * np.hypot(one.stderr, two.stderr)


def test_hciz_stderr_scaling():
    small = oracle.haar_hciz_mc([0.4, -0.3], [0.7, -0.2], samples=10_000, seed=2)
    large = oracle.haar_hciz_mc([0.4, -0.3], [0.7, -0.2], samples=100_000, seed=2)
    assert large.stderr * np.sqrt(10) == pytest.approx(small.stderr, rel=0.1)


def test_mc_bit_reproducible():
    x, a = [0.4, -0.3, 0.1], [0.7, -0.2, 0.05]
    assert oracle.haar_hciz_mc(x, a, 5000, seed=9) == oracle.haar_hciz_mc(x, a, 5000, seed=9)
    g = Potential.gaussian()
    assert oracle.hermitian_mc(g, [0.3], samples=3000, seed=1) == oracle.hermitian_mc(g, [0.3], samples=3000, seed=1)


def test_haar_unitaries_are_unitary():
    u = oracle.haar_unitaries(3, 10, oracle._rng(0))
    eye = np.einsum("kij,kil->kjl", u.conj(), u)
    assert np.allclose(eye, np.eye(3)[None])


def test_hciz_domain():
    with pytest.raises(DomainError):
        oracle.haar_hciz_mc([0.1, 0.1], [0.2, 0.3])
    with pytest.raises(DomainError):
        oracle.haar_hciz_mc([0.1], [0.2])


def test_hermitian_mc_reweight_ratio(gauss):
    a = 0.3
    est = oracle.hermitian_mc(gauss.potential, [a], samples=50_000, seed=0, tilt="reweight")
    assert est.zscore(gauss.q(0, a) / gauss.q(0, 0.0)) < 3


def test_hermitian_mc_quadratic_chpoly(gauss):
    lam = 0.6
    src, ch = SourceSpec((0.0, 0.1), ()), ChPolySpec((lam,), ())
    brute = oracle.eigenvalue_integral(gauss, src, ch) / oracle.eigenvalue_integral(gauss, src)
    est = oracle.hermitian_mc(gauss.potential, [0.0, 0.1], ch, samples=50_000, seed=0)
    assert est.zscore(brute) < 3


def test_hermitian_mc_inverse(gauss):
    mu = 0.2 + 1j
    src, ch = SourceSpec((0.3,), ()), ChPolySpec((), (mu,))
    est = oracle.hermitian_mc(gauss.potential, [0.3], ch, samples=50_000, seed=0)
    assert est.zscore(psi(gauss, src, ch).value / gauss.q(0, 0.3)) < 3


def test_hermitian_mc_rejects():
    g = Potential.gaussian()
    with pytest.raises(UnsupportedError):
        oracle.hermitian_mc(Potential.quartic(), [0.1])
    with pytest.raises(DomainError):
        oracle.hermitian_mc(g, [0.1], tilt="other")
    with pytest.raises(DomainError):
        oracle.hermitian_mc(g, [0.1], ChPolySpec((), (0.5,)))
