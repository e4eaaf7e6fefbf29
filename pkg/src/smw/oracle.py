"""Independent reference values: brute-force eigenvalue quadrature and Monte Carlo."""
from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np

from .detkit import barnes_g, cauchy_delta, det, vandermonde
from .model import (
    ChPolySpec, DomainError, Potential, SourceSpec, UnsupportedError, check_sizes, complex_exp,
)
from .quad import AuxKernels, QuadratureRule

MAX_DIM = 4


@dataclass(frozen=True)
class McEstimate:
    mean: complex
    stderr: float
    samples: int
    seed: int

    def zscore(self, target) -> float:
        if self.stderr == 0:
            return 0.0 if self.mean == target else np.inf
        return float(abs(self.mean - target) / self.stderr)


def eigenvalue_integral(kern: AuxKernels, src: SourceSpec, ch: Optional[ChPolySpec] = None, order: Optional[int] = None) -> complex:
    """Tensor-product quadrature of the eigenvalue representation.

    Integrates prod w_B(x_i) e^{x_i a_i} prod w_F(y_j) e^{-y_j b_j} Delta_{N,M}(x;y)
    times prod_alpha [prod_i (lam_alpha - x_i) / prod_j (lam_alpha - y_j)]
    times prod_beta [prod_j (mu_beta - y_j) / prod_i (mu_beta - x_i)],
    divided by Delta_{N,M}(a;b).
    """
    ch = ch or ChPolySpec()
    N, M = src.N, src.M
    check_sizes(N, M, ch.p, ch.q)
    if N + M > MAX_DIM:
        raise UnsupportedError(f"eigenvalue_integral is capped at N+M <= {MAX_DIM}")
    if N + M == 0:
        return 1.0 + 0j
    if order is None and N + M <= 3:
        order = max(kern.rule.order, 120)
    if order is not None:
        kern = kern.with_rule(QuadratureRule(kern.rule.kind, order))
    lam = np.asarray(ch.lam, dtype=complex)
    mu = np.asarray(ch.mu, dtype=complex)

    X, Y = contour_levels(kern, src, ch)
    nodes, gains = [], []
    for ai in src.a:
        x, w = kern.bosonic_nodes(ai, X)
        nodes.append(x)
        gains.append(w * complex_exp(kern.log_wb(x) + x * ai))
    for bj in src.b:
        y, w = kern.fermionic_nodes(bj, Y)
        nodes.append(y)
        gains.append(w * complex_exp(kern.log_wf(y) - y * bj))

    d = N + M
    total = 0j
    # chunk over the first variable to bound memory
    for i0 in range(len(nodes[0])):
        shape = [1] * (d - 1)
        vars_ = [np.asarray(nodes[0][i0])]
        weight = gains[0][i0]
        for k in range(1, d):
            sh = list(shape)
            sh[k - 1] = -1
            vars_.append(nodes[k].reshape(sh))
            weight = weight * gains[k].reshape(sh)
        xs, ys = vars_[:N], vars_[N:]
        f = weight
        for i in range(N):
            for j in range(i + 1, N):
                f = f * (xs[i] - xs[j])
        for i in range(M):
            for j in range(i + 1, M):
                f = f * (ys[i] - ys[j])
        for xi in xs:
            for yj in ys:
                f = f / (xi - yj)
        for l in lam:
            for xi in xs:
                f = f * (l - xi)
            for yj in ys:
                f = f / (l - yj)
        for m in mu:
            for yj in ys:
                f = f * (m - yj)
            for xi in xs:
                f = f / (m - xi)
        total += complex(np.sum(f))
    return total / cauchy_delta(src.a, src.b)


def contour_levels(kern: AuxKernels, src: SourceSpec, ch: ChPolySpec, grid: int = 81) -> tuple[float, float]:
    """Common imaginary parts (X, Y) for the x and y contours.

    The undeformed contours are Im x = 0 and Im y = epsilon.  Deformation keeps
    every pole on its original side: lower mu < X < upper mu, X < Y, and lam
    below/above epsilon stays below/above Y.  Within the allowed box the levels
    maximize the smallest pole distance, measured in units of the weight width.
    """
    eps = kern.epsilon
    sdx = min([kern.bosonic_profile(a)[1] for a in src.a] or [1.0])
    sdy = min([kern.fermionic_profile(b)[1] for b in src.b] or [1.0])
    s = kern.contour_shift
    mus = [m.imag for m in ch.mu]
    lams = [l.imag for l in ch.lam]
    if any(v == eps for v in lams):
        raise DomainError("lambda lies on the fermionic contour")
    xs = np.linspace(-s * sdx, s * sdx, grid) if src.N else np.array([0.0])
    ys = eps + (np.linspace(-s * sdy, s * sdy, grid) if src.M else np.array([0.0]))
    X, Y = np.meshgrid(xs, ys, indexing="ij")
    gap = np.full(X.shape, np.inf)
    if src.N:
        for m in mus:
            side = np.sign(m)  # pole above (+) or below (-) the real axis
            gap = np.minimum(gap, np.where(side * (m - X) > 0, abs(m - X) / sdx, -np.inf))
    if src.M:
        for l in lams:
            side = np.sign(l - eps)
            gap = np.minimum(gap, np.where(side * (l - Y) > 0, abs(l - Y) / sdy, -np.inf))
    if src.N and src.M:
        gap = np.minimum(gap, np.where(Y > X, (Y - X) / min(sdx, sdy), -np.inf))
    # prefer the smallest deformation among near-optimal levels
    best = gap.max()
    if not np.isfinite(best):
        return float(-s * sdx), float(eps + s * sdy)
    cost = np.abs(X) / sdx + np.abs(Y - eps) / sdy
    ok = gap >= best - 1e-9
    i = np.argmin(np.where(ok, cost, np.inf))
    return float(X.flat[i]), float(Y.flat[i])


# -- Monte Carlo ---------------------------------------------------------------------

def _rng(seed: int, block: int = 0) -> np.random.Generator:
    # counter-based stream: the block index selects an independent counter range
    return np.random.Generator(np.random.Philox(key=seed & (2**64 - 1), counter=[0, 0, block, 0]))


def _estimate(values: np.ndarray, seed: int) -> McEstimate:
    n = len(values)
    mean = complex(values.mean())
    if n < 2:
        return McEstimate(mean, 0.0, n, seed)
    var = float(np.var(values.real, ddof=1) + np.var(values.imag, ddof=1))
    return McEstimate(mean, float(np.sqrt(var / n)), n, seed)


def haar_unitaries(n: int, count: int, rng: np.random.Generator) -> np.ndarray:
    """Haar-distributed U(n) samples via QR with the phase of diag(R) removed."""
    z = (rng.standard_normal((count, n, n)) + 1j * rng.standard_normal((count, n, n))) / np.sqrt(2)
    qm, rm = np.linalg.qr(z)
    d = np.diagonal(rm, axis1=1, axis2=2)
    return qm * (d / np.abs(d))[:, None, :]


def hciz_closed_form(x, a) -> float:
    """det(e^{x_i a_j}) / (Delta(x) Delta(a)) times prod_{k<N} k!."""
    x = np.asarray(x, dtype=float)
    a = np.asarray(a, dtype=float)
    n = len(x)
    return complex(
        det(np.exp(np.outer(x, a))) / (vandermonde(x) * vandermonde(a)) * barnes_g(n + 1)
    ).real


def haar_hciz_mc(x, a, samples: int = 100_000, seed: int = 0, block_size: int = 10_000) -> McEstimate:
    x = np.asarray(x, dtype=float)
    a = np.asarray(a, dtype=float)
    n = len(x)
    if n not in (2, 3) or len(a) != n:
        raise DomainError("haar_hciz_mc supports N = 2 or 3 with len(x) == len(a)")
    if np.all(x == 0):
        return McEstimate(1.0 + 0j, 0.0, samples, seed)
    if len(set(x)) != n or len(set(a)) != n:
        raise DomainError("x and a must have distinct entries")
    vals = []
    for block, start in enumerate(range(0, samples, block_size)):
        count = min(block_size, samples - start)
        u = haar_unitaries(n, count, _rng(seed, block))
        # Tr X U A U^dagger = sum_ij x_i |U_ij|^2 a_j
        vals.append(np.exp(np.einsum("i,kij,j->k", x, np.abs(u) ** 2, a)))
    return _estimate(np.concatenate(vals), seed)


def _gue(n: int, count: int, hbar: float, rng: np.random.Generator) -> np.ndarray:
    # density proportional to exp(-Tr X^2 / (2 hbar))
    g = rng.standard_normal((count, n, n)) + 1j * rng.standard_normal((count, n, n))
    h = (g + np.conj(np.swapaxes(g, 1, 2))) / 2.0
    return h * np.sqrt(hbar)


def hermitian_mc(pot: Potential, a, ch: Optional[ChPolySpec] = None, samples: int = 100_000,
                 seed: int = 0, tilt: str = "shift", block_size: int = 10_000) -> McEstimate:
    """Monte Carlo over the Gaussian Hermitian ensemble with source A = diag(a).

    ``tilt='shift'`` samples X = hbar*A + GUE, the exact tilted measure, so the
    estimate is the normalized average of the characteristic polynomial factors.
    ``tilt='reweight'`` samples the untilted ensemble and averages e^{Tr XA} times
    those factors, which estimates Z(a)/Z(0).
    """
    if not pot.is_gaussian:
        raise UnsupportedError("hermitian_mc needs the Gaussian potential")
    a = np.asarray(a, dtype=float)
    n = len(a)
    if not 1 <= n <= 4:
        raise DomainError("hermitian_mc supports 1 <= N <= 4")
    if tilt not in ("shift", "reweight"):
        raise DomainError("tilt must be 'shift' or 'reweight'")
    ch = ch or ChPolySpec()
    lam = np.asarray(ch.lam, dtype=complex)
    mu = np.asarray(ch.mu, dtype=complex)
    if np.any(mu.imag == 0):
        raise DomainError("inverse characteristic polynomials need Im mu != 0")
    hbar = pot.hbar
    vals = []
    for block, start in enumerate(range(0, samples, block_size)):
        count = min(block_size, samples - start)
        x = _gue(n, count, hbar, _rng(seed, block))
        if tilt == "shift":
            x = x + hbar * np.diag(a)[None]
        ev = np.linalg.eigvalsh(x)
        f = np.ones(count, dtype=complex)
        for l in lam:
            f *= np.prod(l - ev, axis=1)
        for m in mu:
            f /= np.prod(m - ev, axis=1)
        if tilt == "reweight":
            f *= np.exp(np.einsum("kii,i->k", x, a).real)
        vals.append(f)
    return _estimate(np.concatenate(vals), seed)
