import numpy as np
import pytest

from smw import detkit, oracle, partition
from smw.model import ChPolySpec, DomainError, Potential, SourceSpec
from smw.partition import (
    c_nm, c_nmpq, phi, psi, psi_limit, psi_tilde, z_nn_kernel, z_source, z_source_limit, z_tilde,
)
from smw.quad import AuxKernels

from conftest import rel


def test_z_source_small_cases(gauss):
    assert z_source(gauss, SourceSpec((0.3,), ())).value == pytest.approx(gauss.q(0, 0.3), rel=1e-15)
    a, b = 0.3, -0.2
    z11 = z_source(gauss, SourceSpec((a,), (b,))).value
    assert z11 == pytest.approx((a - b) * gauss.r(0, 0, a, b), rel=1e-14)


def test_z_source_vs_oracle_21(gauss):
    src = SourceSpec((0.4, -0.2), (0.1,))
    assert rel(z_source(gauss, src).value, oracle.eigenvalue_integral(gauss, src)) <= 1e-6


def test_z_source_rejects_bad_sizes(gauss):
    with pytest.raises(DomainError):
        z_source(gauss, SourceSpec((0.3,), (0.1, 0.2)))


def test_z_nn_kernel(gauss):
    src = SourceSpec((0.3,), (-0.2,))
    r = z_nn_kernel(gauss, src)
    assert r.value == pytest.approx(z_source(gauss, src).value, rel=1e-13)
    assert r.checks["giambelli"] <= 1e-10
    with pytest.raises(DomainError):
        z_nn_kernel(gauss, SourceSpec((0.3, 0.1), (0.2,)))


@pytest.mark.slow
def test_z_nn_kernel_22_vs_oracle(gauss):
    src = SourceSpec((0.3, -0.25), (0.1, -0.4))
    r = z_nn_kernel(gauss, src)
    assert rel(r.value, z_source(gauss, src).value) < 1e-12
    assert rel(r.value, oracle.eigenvalue_integral(gauss, src)) <= 1e-5


def test_psi_reduces_to_z_source(gauss):
    src = SourceSpec((0.3, -0.1), (0.2,))
    assert psi(gauss, src, ChPolySpec()).value == pytest.approx(z_source(gauss, src).value, rel=1e-15)


def test_psi_vs_oracle_1111(gauss):
    src, ch = SourceSpec((0.3,), (-0.2,)), ChPolySpec((0.45 + 0.3j,), (0.1 + 0.6j,))
    assert rel(psi(gauss, src, ch).value, oracle.eigenvalue_integral(gauss, src, ch)) <= 1e-5


def test_psi_vs_gue_mc(gauss):
    a, lam = 0.3, 0.7
    est = oracle.hermitian_mc(gauss.potential, [a], ChPolySpec((lam,), ()), samples=20_000, seed=3)
    normalized = psi(gauss, SourceSpec((a,), ()), ChPolySpec((lam,), ())).value / gauss.q(0, a)
    assert est.zscore(normalized) < 3


def test_phi_single_lambda(gauss):
    src, ch = SourceSpec((0.3,), ()), ChPolySpec((1.0,), ())
    r = phi(gauss, src, ch)
    assert r.value == pytest.approx(psi(gauss, src, ch).value * np.exp(-0.5), rel=1e-12)


@pytest.mark.parametrize("seed", range(6))
def test_phi_dual_path(gauss, seed):
    rng = np.random.default_rng(seed)
    N, M = int(rng.integers(1, 3)), int(rng.integers(0, 2))
    p, q = int(rng.integers(0, 2)), int(rng.integers(0, 2))
    if N + p < M + q:
        p += 1
    src = SourceSpec(tuple(rng.uniform(-0.5, 0.5, N) + 0.2 * np.arange(N)),
                     tuple(rng.uniform(-0.5, 0.5, M) - 0.7))
    ch = ChPolySpec(tuple(rng.uniform(-0.5, 0.5, p) - 0.4j),
                    tuple(rng.uniform(-0.5, 0.5, q) + 0.6j))
    assert phi(gauss, src, ch).checks["dual_path"] <= 1e-8


def test_phi_weights_vanish_at_root(gauss):
    src = SourceSpec((0.3,), ())
    ratios = []
    for d in (1e-1, 1e-2, 1e-3):
        ch = ChPolySpec((d,), (-d + 1e-3j,))
        ratios.append(abs(phi(gauss, src, ch).value / psi(gauss, src, ch).value - 1))
    assert ratios[0] > ratios[1] > ratios[2] and ratios[2] < 1e-3


def test_cauchy_factorization():
    rng = np.random.default_rng(7)
    for N, M, p, q in [(2, 1, 1, 1), (3, 1, 1, 2), (1, 1, 2, 0), (2, 2, 1, 1)]:
        z = rng.normal(size=N + M + p + q) + 1j * rng.normal(size=N + M + p + q)
        x, y, lam, mu = np.split(z, np.cumsum([N, M, p]))
        full = detkit.cauchy_delta(np.r_[x, lam], np.r_[y, mu])
        ratio = (np.prod(lam[:, None] - x[None]) / np.prod(lam[:, None] - y[None])
                 * np.prod(mu[:, None] - y[None]) / np.prod(mu[:, None] - x[None]))
        fact = detkit.cauchy_delta(x, y) * detkit.cauchy_delta(lam, mu) * ratio
        assert rel(full, partition.chpoly_sign(N, M, p, q) * fact) <= 1e-9


def test_permutation_invariance(gauss):
    a, b = (0.3, -0.1, 0.45), (0.2, -0.5)
    lam, mu = (0.1 - 0.4j,), (0.2 + 0.6j, -0.3 + 0.8j)
    base = psi(gauss, SourceSpec(a, b), ChPolySpec(lam, mu)).value
    rng = np.random.default_rng(0)
    for _ in range(5):
        pa, pb, pm = rng.permutation(3), rng.permutation(2), rng.permutation(2)
        v = psi(gauss, SourceSpec(tuple(np.take(a, pa)), tuple(np.take(b, pb))),
                ChPolySpec(lam, tuple(np.take(mu, pm)))).value
        assert rel(v, base) <= 1e-10


def test_z_tilde_small(gauss):
    a = 0.3
    assert z_tilde(gauss, 1, 0, a, 0.0) == pytest.approx(gauss.q(0, a), rel=1e-15)
    assert c_nm(1, 0, a, 0.0) == 1 and c_nm(2, 0, a, 0.0) == 1
    w = gauss.q(0, a) * gauss.q(2, a) - gauss.q(1, a) ** 2
    assert z_tilde(gauss, 2, 0, a, 0.0) == pytest.approx(w, rel=1e-13)


@pytest.mark.parametrize("N,M", [(2, 1), (2, 2), (3, 1)])
def test_z_tilde_limit(gauss, N, M):
    a, b = 0.3, -0.2
    assert rel(c_nm(N, M, a, b) * z_tilde(gauss, N, M, a, b), z_source_limit(gauss, N, M, a, b)) <= 1e-4


def test_z_limit_convergence_order(gauss):
    N, M, a, b = 2, 1, 0.3, -0.2
    target = c_nm(N, M, a, b) * z_tilde(gauss, N, M, a, b)
    errs = []
    for d in (0.1, 0.05):
        src = SourceSpec(a + d * partition.split_offsets(N), b + d * partition.split_offsets(M))
        errs.append(abs(z_source(gauss, src).value - target))
    assert np.log2(errs[0] / errs[1]) >= 1


def test_psi_tilde_small(gauss):
    a, b, lam, mu = 0.3, -0.2, 0.45 + 0.3j, 0.1 + 0.6j
    assert psi_tilde(gauss, 2, 1, 0, 0, a, b, lam, mu) == pytest.approx(z_tilde(gauss, 2, 1, a, b), rel=1e-14)
    assert psi_tilde(gauss, 0, 0, 1, 0, a, b, lam, mu) == 1


@pytest.mark.parametrize("sizes", [(1, 0, 1, 1), (1, 1, 1, 1), (2, 1, 1, 0)])
def test_psi_tilde_limit(gauss, sizes):
    a, b, lam, mu = 0.3, -0.2, 0.45 + 0.3j, 0.1 + 0.6j
    approx = c_nmpq(*sizes, a, b, lam, mu) * psi_tilde(gauss, *sizes, a, b, lam, mu)
    assert rel(approx, psi_limit(gauss, *sizes, a, b, lam, mu)) <= 1e-4


def test_quartic_limit():
    k = AuxKernels(Potential.quartic())
    a, b = 0.3, -0.2
    assert rel(c_nm(2, 2, a, b) * z_tilde(k, 2, 2, a, b), z_source_limit(k, 2, 2, a, b)) <= 1e-4


def test_richardson_exact_for_polynomials():
    h = [0.1, 0.05, 0.025]
    vals = [3 + 2 * x - x * x for x in h]
    assert partition.richardson_limit(vals, h) == pytest.approx(3)
