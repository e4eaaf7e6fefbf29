"""Partition-function and correlator determinants.

Every determinant is a :class:`~smw.detkit.BlockDetSpec`.  The layout follows the
source-parameter convention: rows are the monomial block, then one row per
fermionic source b_j, then one row per inverse characteristic polynomial mu_beta;
columns are the bosonic sources a_i followed by the characteristic polynomial
arguments lambda_alpha.

Normalization: ``value = determinant / prefactor`` where the prefactor is the
block-form Cauchy determinant of the parameters, so that ``value`` equals the
eigenvalue integral with the product-form Jacobian exactly.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import detkit
from .detkit import BlockDetSpec, barnes_g, cauchy_delta, cauchy_sign
from .model import ChPolySpec, DomainError, SourceSpec, check_sizes
from .quad import AuxKernels, p_func, r_tilde, weighted_kernels, weighted_sign


@dataclass
class PartitionResult:
    value: complex
    prefactor: complex
    determinant: complex
    conditioning: float
    checks: dict = field(default_factory=dict)


def _result(spec: BlockDetSpec, prefactor: complex, **checks) -> PartitionResult:
    d, cond = detkit.block_determinant_with_diagnostic(spec)
    return PartitionResult(d / prefactor, prefactor, d, cond, dict(checks))


def chpoly_sign(N: int, M: int, p: int, q: int) -> int:
    """Sign between the product-form Cauchy determinant of the merged variables and
    Delta_{N,M} * Delta_{p,q} * (characteristic polynomial ratio)."""
    return -1 if (N * p + M * q + N * q) % 2 else 1


def psi_prefactor(src: SourceSpec, ch: ChPolySpec) -> complex:
    N, M, p, q = src.N, src.M, ch.p, ch.q
    return (
        cauchy_sign(N + p, M + q) * chpoly_sign(N, M, p, q)
        * cauchy_delta(src.a, src.b) * cauchy_delta(ch.lam, ch.mu)
    )


# -- external source only -------------------------------------------------------

def source_spec(kern: AuxKernels, src: SourceSpec) -> BlockDetSpec:
    a, b = src.a, src.b

    def entry(rl, r, cl, c):
        if rl == "mono":
            return kern.q(r, a[c])
        return kern.r(0, 0, a[c], b[r])

    return BlockDetSpec(
        (("mono", src.N - src.M), ("b", src.M)), (("a", src.N),), entry
    )


def z_source(kern: AuxKernels, src: SourceSpec) -> PartitionResult:
    check_sizes(src.N, src.M)
    pref = cauchy_sign(src.N, src.M) * cauchy_delta(src.a, src.b)
    return _result(source_spec(kern, src), pref)


def z_hermitian(kern: AuxKernels, a) -> PartitionResult:
    """Ordinary Hermitian matrix model with source (the M = 0 case)."""
    return z_source(kern, SourceSpec(a, ()))


def z_nn_kernel(kern: AuxKernels, src: SourceSpec) -> PartitionResult:
    """U(N|N) partition function as a determinant of the U(1|1) kernel R(a;b).

    ``checks['giambelli']`` holds the largest relative mismatch between
    R(a_i;b_j)*(a_i - b_j) and the independently assembled Z_{1,1}(a_i, b_j).
    """
    if src.N != src.M:
        raise DomainError("z_nn_kernel needs N == M")
    n = src.N
    kmat = np.array([[kern.r(0, 0, ai, bj) for bj in src.b] for ai in src.a], dtype=complex)
    worst = 0.0
    for i, ai in enumerate(src.a):
        for j, bj in enumerate(src.b):
            z11 = z_source(kern, SourceSpec((ai,), (bj,))).value
            lhs = kmat[i, j] * (ai - bj)
            worst = max(worst, abs(lhs - z11) / max(abs(z11), 1e-300))
    spec = BlockDetSpec((("b", n),), (("a", n),), lambda rl, r, cl, c: kmat[c, r])
    pref = cauchy_sign(n, n) * cauchy_delta(src.a, src.b)
    return _result(spec, pref, giambelli=worst)


# -- characteristic polynomials -------------------------------------------------

def psi_spec(kern: AuxKernels, src: SourceSpec, ch: ChPolySpec, weighted: bool = False) -> BlockDetSpec:
    N, M, p, q = src.N, src.M, ch.p, ch.q
    a, b, lam, mu = src.a, src.b, ch.lam, ch.mu
    if weighted:
        s = weighted_sign(N, M, p, q)

        def entry(rl, r, cl, c):
            if rl == "mono":
                return weighted_kernels(kern, "Q", r, a[c], sign=s) if cl == "a" else weighted_kernels(kern, "P", r, lam[c], sign=s)
            if rl == "b":
                return weighted_kernels(kern, "R", a[c], b[r]) if cl == "a" else weighted_kernels(kern, "SR", lam[c], b[r])
            return weighted_kernels(kern, "SL", a[c], mu[r]) if cl == "a" else weighted_kernels(kern, "Rt", lam[c], mu[r])
    else:

        def entry(rl, r, cl, c):
            if rl == "mono":
                return kern.q(r, a[c]) if cl == "a" else p_func(r, lam[c])
            if rl == "b":
                return kern.r(0, 0, a[c], b[r]) if cl == "a" else kern.s_right(lam[c], b[r])
            return kern.s_left(a[c], mu[r]) if cl == "a" else r_tilde(lam[c], mu[r])

    return BlockDetSpec(
        (("mono", N + p - M - q), ("b", M), ("mu", q)),
        (("a", N), ("lam", p)),
        entry,
    )


def psi(kern: AuxKernels, src: SourceSpec, ch: ChPolySpec) -> PartitionResult:
    """Average of prod Sdet(lam - Z) / prod Sdet(mu - Z) with external source."""
    check_sizes(src.N, src.M, ch.p, ch.q)
    return _result(psi_spec(kern, src, ch), psi_prefactor(src, ch))


def psi_hermitian(kern: AuxKernels, a, lam) -> PartitionResult:
    """Characteristic polynomials in the Hermitian model (M = q = 0)."""
    return psi(kern, SourceSpec(a, ()), ChPolySpec(lam, ()))


def psi_inverse(kern: AuxKernels, a, mu) -> PartitionResult:
    """Inverse characteristic polynomials in the Hermitian model (M = p = 0)."""
    return psi(kern, SourceSpec(a, ()), ChPolySpec((), mu))


def psi_ratio(kern: AuxKernels, a, lam, mu) -> PartitionResult:
    """Characteristic polynomial ratio in the Hermitian model (M = 0)."""
    return psi(kern, SourceSpec(a, ()), ChPolySpec(lam, mu))


def phi(kern: AuxKernels, src: SourceSpec, ch: ChPolySpec) -> PartitionResult:
    """Psi times prod w_B(lam) prod w_F(mu), assembled from the weighted kernels.

    ``checks['dual_path']`` is the relative difference to psi times the weights.
    """
    check_sizes(src.N, src.M, ch.p, ch.q)
    res = _result(psi_spec(kern, src, ch, weighted=True), psi_prefactor(src, ch))
    weights = np.prod([kern.wb(l) for l in ch.lam]) * np.prod([kern.wf(m) for m in ch.mu])
    direct = psi(kern, src, ch).value * weights
    res.checks["dual_path"] = abs(res.value - direct) / max(abs(direct), abs(res.value), 1e-300)
    res.checks["psi_times_weights"] = complex(direct)
    return res


# -- equal-parameter (Wronskian) forms ---------------------------------------------

def _shift_col(group):
    def rule(rl, r, cl, c):
        return [(1.0, (rl, r, cl, c + 1))] if cl == group else []
    return rule


def _shift_row(group):
    def rule(rl, r, cl, c):
        return [(1.0, (rl, r + 1, cl, c))] if rl == group else []
    return rule


def z_tilde_spec(kern: AuxKernels, N: int, M: int, a, b) -> BlockDetSpec:
    check_sizes(N, M)

    def entry(rl, r, cl, c):
        if rl == "mono":
            return kern.q(c + r, a)
        return kern.r(c, r, a, b)

    return BlockDetSpec(
        (("mono", N - M), ("b", M)),
        (("a", N),),
        entry,
        {"a": _shift_col("a"), "b": _shift_row("b")},
    )


def z_tilde(kern: AuxKernels, N: int, M: int, a, b) -> complex:
    return detkit.block_determinant(z_tilde_spec(kern, N, M, a, b))


def _vandermonde_limit_sign(n: int, k: int) -> int:
    # det(d_i^{l-1}) vs prod_{i<j}(d_i - d_j) over the full size n, corrected by
    # the monomial-row orientation of the block Cauchy determinant (size k)
    e = n * (n - 1) // 2 - k * (k - 1) // 2
    return -1 if e % 2 else 1


def c_nm(N: int, M: int, a, b) -> complex:
    """Constant with Z_{N,M}(a..a; b..b) = c_nm * z_tilde."""
    sign = _vandermonde_limit_sign(N, N - M)
    return sign * complex(a - b) ** (N * M) / (barnes_g(N + 1) * barnes_g(M + 1))


def psi_tilde_spec(kern: AuxKernels, N: int, M: int, p: int, q: int, a, b, lam, mu) -> BlockDetSpec:
    check_sizes(N, M, p, q)

    def entry(rl, r, cl, c):
        if rl == "mono":
            return kern.q(c + r, a) if cl == "a" else p_func(r, lam, c)
        if rl == "b":
            return kern.r(c, r, a, b) if cl == "a" else kern.s_right(lam, b, c, r)
        return kern.s_left(a, mu, c, r) if cl == "a" else r_tilde(lam, mu, c, r)

    return BlockDetSpec(
        (("mono", N + p - M - q), ("b", M), ("mu", q)),
        (("a", N), ("lam", p)),
        entry,
        {
            "a": _shift_col("a"),
            "lam": _shift_col("lam"),
            "b": _shift_row("b"),
            "mu": _shift_row("mu"),
        },
    )


def psi_tilde(kern: AuxKernels, N: int, M: int, p: int, q: int, a, b, lam, mu) -> complex:
    return detkit.block_determinant(psi_tilde_spec(kern, N, M, p, q, a, b, lam, mu))


def c_nmpq(N: int, M: int, p: int, q: int, a, b, lam, mu) -> complex:
    """Constant with Psi at coincident parameters = c_nmpq * psi_tilde."""
    k = N + p - M - q
    e = (
        N * (N - 1) // 2 + p * (p - 1) // 2
        - k * (k - 1) // 2 - (M + q) * (M + q - 1) // 2 + M * (M - 1) // 2 + q * (q - 1) // 2
    )
    sign = (-1 if e % 2 else 1) * chpoly_sign(N, M, p, q)
    return (
        sign * complex(a - b) ** (N * M) * complex(lam - mu) ** (p * q)
        / (barnes_g(N + 1) * barnes_g(M + 1) * barnes_g(p + 1) * barnes_g(q + 1))
    )


def richardson_limit(values, steps) -> complex:
    """Polynomial extrapolation to step 0 (Neville) from samples at the given steps."""
    v = [complex(x) for x in values]
    h = list(steps)
    n = len(v)
    for m in range(1, n):
        for i in range(n - m):
            v[i] = (h[i] * v[i + 1] - h[i + m] * v[i]) / (h[i] - h[i + m])
    return v[0]


def split_offsets(n: int) -> np.ndarray:
    """Distinct centered offsets used to approach the equal-parameter point."""
    return np.arange(n) - (n - 1) / 2.0


def _limit(fn, deltas):
    # centered offsets make every odd power sum vanish, so the error is even in delta
    vals = [fn(d) for d in deltas]
    return richardson_limit(vals, [d * d for d in deltas])


def z_source_limit(kern: AuxKernels, N: int, M: int, a, b, deltas=(0.1, 0.05, 0.025, 0.0125)) -> complex:
    def at(d):
        return z_source(kern, SourceSpec(a + d * split_offsets(N), b + d * split_offsets(M))).value
    return _limit(at, deltas)


def psi_limit(kern: AuxKernels, N: int, M: int, p: int, q: int, a, b, lam, mu, deltas=(0.1, 0.05, 0.025, 0.0125)) -> complex:
    def at(d):
        src = SourceSpec(a + d * split_offsets(N), b + d * split_offsets(M))
        ch = ChPolySpec(lam + d * split_offsets(p), mu + d * split_offsets(q))
        return psi(kern, src, ch).value
    return _limit(at, deltas)
