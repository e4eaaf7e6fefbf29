"""Bilinear (Hirota / Toda) identities for the Wronskian-type determinants.

Every identity is checked in bilinear form, lhs = rhs, which is the Toda
equation multiplied through by the square of the central tau function.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .detkit import block_determinant_with_diagnostic, det, jacobi_residual, leibniz_derivative
from .model import DomainError
from .partition import psi_tilde_spec, z_tilde_spec
from .quad import AuxKernels

EXACT = "exact-leibniz"
FD = "finite-difference"
FLOOR = 1e-30
CONDITION_LIMIT = 1e13
FD_STEP = 0.005


@dataclass
class BilinearResidual:
    equation: str
    lhs: complex = 0j
    rhs: complex = 0j
    residual: float = 0.0
    method: str = EXACT
    sizes: tuple = ()
    skipped: Optional[str] = None
    inconclusive: bool = False
    extra: dict = field(default_factory=dict)

    @property
    def applicable(self) -> bool:
        return self.skipped is None

    def passed(self, tol: float) -> bool:
        return self.skipped is None and not self.inconclusive and self.residual <= tol


def _make(eq, lhs, rhs, method, sizes, **kw) -> BilinearResidual:
    lhs, rhs = complex(lhs), complex(rhs)
    res = abs(lhs - rhs) / max(abs(lhs), abs(rhs), FLOOR)
    return BilinearResidual(eq, lhs, rhs, float(res), method, tuple(sizes), **kw)


def _skip(eq, reason, method, sizes) -> BilinearResidual:
    return BilinearResidual(eq, method=method, sizes=tuple(sizes), skipped=reason, residual=math.nan)


def _valid(N, M, p=0, q=0) -> bool:
    return min(N, M, p, q) >= 0 and N + p >= M + q


# -- finite differences ----------------------------------------------------------

def fd_first(f, x, h=FD_STEP):
    """Fourth-order central difference."""
    return (8 * (f(x + h) - f(x - h)) - (f(x + 2 * h) - f(x - 2 * h))) / (12 * h)


def fd_second(f, x, h=FD_STEP):
    def d2(s):
        return (f(x + s) - 2 * f(x) + f(x - s)) / (s * s)
    return (4 * d2(h / 2) - d2(h)) / 3


def fd_mixed(f, x, y, h=FD_STEP):
    def dxy(s):
        return (f(x + s, y + s) - f(x + s, y - s) - f(x - s, y + s) + f(x - s, y - s)) / (4 * s * s)
    return (4 * dxy(h / 2) - dxy(h)) / 3


# -- tau function for the external source ------------------------------------------

class _ZTau:
    """Z~_{N,M}(a,b) with derivatives by either method."""

    def __init__(self, kern, a, b, method):
        if method not in (EXACT, FD):
            raise DomainError(f"unknown derivative method {method!r}")
        self.kern, self.a, self.b, self.method = kern, a, b, method

    def value(self, N, M, a=None, b=None):
        a = self.a if a is None else a
        b = self.b if b is None else b
        return block_determinant_with_diagnostic(z_tilde_spec(self.kern, N, M, a, b))

    def d(self, N, M, params):
        if self.method == EXACT:
            spec = z_tilde_spec(self.kern, N, M, self.a, self.b)
            return leibniz_derivative(spec, params if len(params) > 1 else params[0])
        f = lambda x, y: self.value(N, M, x, y)[0]
        if params == ("a",):
            return fd_first(lambda x: f(x, self.b), self.a)
        if params == ("b",):
            return fd_first(lambda y: f(self.a, y), self.b)
        if params == ("a", "a"):
            return fd_second(lambda x: f(x, self.b), self.a)
        if params == ("a", "b"):
            return fd_mixed(f, self.a, self.b)
        raise DomainError(f"unsupported derivative {params}")


def toda_2d_residual(kern: AuxKernels, N: int, M: int, a, b, method: str = EXACT) -> BilinearResidual:
    """Z~_{N+1,M+1} Z~_{N-1,M-1} = Z~ d_a d_b Z~ - d_a Z~ d_b Z~ at site (N, M)."""
    sizes = (N, M)
    if not (M >= 1 and N >= M):
        return _skip("toda2d", "needs N >= M >= 1 so that (N-1, M-1) is a valid site", method, sizes)
    t = _ZTau(kern, a, b, method)
    z, cond = t.value(N, M)
    lhs = t.value(N + 1, M + 1)[0] * t.value(N - 1, M - 1)[0]
    rhs = z * t.d(N, M, ("a", "b")) - t.d(N, M, ("a",)) * t.d(N, M, ("b",))
    return _make("toda2d", lhs, rhs, method, sizes, inconclusive=cond > CONDITION_LIMIT,
                 extra={"conditioning": cond})


def toda_1d_residual(kern: AuxKernels, N: int, M: int, a, b, method: str = EXACT) -> BilinearResidual:
    """Z~_{N+1,M} Z~_{N-1,M} = Z~ d_a^2 Z~ - (d_a Z~)^2 at site (N, M).

    ``extra['wronskian_jacobi']`` is the residual of the Jacobi identity on the
    matrix of Z~_{N+1,M} with the last two monomial rows and the last two
    columns removed, which is the relation the equation is derived from.  For
    M >= 1 the minor without the second-to-last monomial row is not d_a Z~, so
    the literal equation is expected to hold only when M = 0.
    """
    sizes = (N, M)
    if not (N >= 1 and _valid(N - 1, M) and N - M >= 1):
        return _skip("toda1d", "needs N - M >= 1 so that (N-1, M) is a valid site", method, sizes)
    t = _ZTau(kern, a, b, method)
    z, cond = t.value(N, M)
    lhs = t.value(N + 1, M)[0] * t.value(N - 1, M)[0]
    da = t.d(N, M, ("a",))
    rhs = z * t.d(N, M, ("a", "a")) - da * da
    big = z_tilde_spec(kern, N + 1, M, a, b).matrix()
    K = N + 1 - M
    jr = jacobi_residual(big, (K, K - 1), (N + 1, N))
    scale = max(abs(det(big)) * abs(t.value(N - 1, M)[0]), FLOOR)
    return _make("toda1d", lhs, rhs, method, sizes, inconclusive=cond > CONDITION_LIMIT,
                 extra={"conditioning": cond, "wronskian_jacobi": float(abs(jr) / scale)})


# -- characteristic polynomial bilinear equations ----------------------------------------

def psi_bilinear_residuals(kern: AuxKernels, N, M, p, q, a, b, lam, mu) -> list:
    """(eq1)-(eq6) in their literal form plus the (lam, mu) Toda form of (eq1)."""

    def spec(n, m, pp, qq):
        return psi_tilde_spec(kern, n, m, pp, qq, a, b, lam, mu)

    def val(*s):
        return block_determinant_with_diagnostic(spec(*s))[0]

    def d(s, params):
        return leibniz_derivative(spec(*s), params if len(params) > 1 else params[0])

    def jacobi_eq(name, big, small, mid, x, y):
        if not all(_valid(*s) for s in (big, small, mid)):
            return _skip(name, f"size tuple out of range: {big}, {small}, {mid}", EXACT, big)
        v = val(*mid)
        lhs = val(*big) * val(*small)
        rhs = v * d(mid, (x, y)) - d(mid, (x,)) * d(mid, (y,))
        return _make(name, lhs, rhs, EXACT, big)

    s = (N, M, p, q)
    out = [
        jacobi_eq("eq1", s, (N, M, p - 2, q - 2), (N, M, p - 1, q - 1), "lam", "mu"),
        jacobi_eq("eq2", s, (N - 2, M, p, q - 2), (N - 1, M, p, q - 1), "a", "mu"),
        jacobi_eq("eq3", s, (N, M - 2, p - 2, q), (N, M - 1, p - 1, q), "lam", "b"),
        jacobi_eq("eq4", s, (N - 2, M - 2, p, q), (N - 1, M - 1, p, q), "a", "b"),
    ]

    # (eq5): Psi~ Psi~_{p-2} = (p-1) [Psi~_{p-1} d_a d_lam (lam Psi~_{p-1}) - d_lam Psi~_{p-1} lam d_a Psi~_{p-1}]
    mid, small = (N, M, p - 1, q), (N, M, p - 2, q)
    if p < 2 or not all(_valid(*t) for t in (s, mid, small)):
        out.append(_skip("eq5", f"size tuple out of range: {small}", EXACT, s))
    else:
        v, va, vl, val_ = val(*mid), d(mid, ("a",)), d(mid, ("lam",)), d(mid, ("a", "lam"))
        rhs = (p - 1) * (v * (va + lam * val_) - vl * lam * va)
        out.append(_make("eq5", val(*s) * val(*small), rhs, EXACT, s))

    # (eq6): Psi~ Psi~_{N-2} = p [Psi~_{N-1} lam d_a^2 Psi~_{p-1} - d_a Psi~_{p-1} lam d_a Psi~_{p-1}]
    small, mid_n, mid_p = (N - 2, M, p, q), (N - 1, M, p, q), (N, M, p - 1, q)
    if p < 1 or not all(_valid(*t) for t in (s, small, mid_n, mid_p)):
        out.append(_skip("eq6", f"size tuple out of range: {small} or {mid_p}", EXACT, s))
    else:
        va = d(mid_p, ("a",))
        rhs = p * (val(*mid_n) * lam * d(mid_p, ("a", "a")) - va * lam * va)
        out.append(_make("eq6", val(*s) * val(*small), rhs, EXACT, s))

    # 2D Toda in (lam, mu) from (eq1): Psi~_{p+1,q+1} Psi~_{p-1,q-1} = Psi~ d_l d_m Psi~ - d_l Psi~ d_m Psi~
    out.append(jacobi_eq("eq1-toda2d", (N, M, p + 1, q + 1), (N, M, p - 1, q - 1), s, "lam", "mu"))
    return out


# -- monomial identity --------------------------------------------------------------

def _mono_deriv(power, order, x):
    if order > power:
        return 0.0
    return math.factorial(power) / math.factorial(power - order) * x ** (power - order)


def monomial_det_identity(N: int, M: int, x) -> BilinearResidual:
    """det with rows x^N .. x^{N+M-2}, x^{N+M} (derivative orders 0..M-1) = M x det(x^{N+i-1})^{(j-1)}."""
    if M < 1 or N < 0:
        raise DomainError("monomial identity needs M >= 1 and N >= 0")
    if x == 0:
        raise DomainError("monomial identity needs x != 0")
    powers = list(range(N, N + M - 1)) + [N + M]
    lhs = det(np.array([[_mono_deriv(k, j, x) for j in range(M)] for k in powers]))
    base = det(np.array([[_mono_deriv(N + i, j, x) for j in range(M)] for i in range(M)]))
    return _make("monomial-id", lhs, M * x * base, EXACT, (N, M))
