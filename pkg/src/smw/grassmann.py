"""Exact finite Grassmann algebra, supermatrices and the direct U(1|1) integral.

Elements are sparse maps from generator subsets (bit masks, ascending order) to
coefficients.  Coefficients may be numpy arrays, which lets a single algebraic
expansion be evaluated on a whole quadrature grid at once.
"""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass

import numpy as np

from .model import DomainError, UnsupportedError

MAX_GENERATORS = 16


def _popcount(x: int) -> int:
    return bin(x).count("1")


def merge_sign(s: int, t: int) -> int:
    """Sign of e_S e_T -> e_{S|T}: (-1)^{#(i in S, j in T, i > j)}."""
    n = 0
    tt = t
    while tt:
        low = tt & -tt
        j = low.bit_length() - 1
        n += _popcount(s >> (j + 1))
        tt ^= low
    return -1 if n & 1 else 1


def _is_zero(c) -> bool:
    return not np.any(c)


class GrassmannElement:
    __slots__ = ("n", "terms")

    def __init__(self, n: int, terms=None):
        if not 0 <= n <= MAX_GENERATORS:
            raise DomainError(f"generator count must be in 0..{MAX_GENERATORS}")
        self.n = n
        self.terms = {}
        for mask, c in (terms or {}).items():
            if mask >> n:
                raise DomainError("mask uses a generator outside the algebra")
            if not _is_zero(c):
                self.terms[int(mask)] = c

    # -- constructors --------------------------------------------------------------
    @classmethod
    def scalar(cls, n, c):
        return cls(n, {0: c})

    @classmethod
    def generator(cls, n, i, c=1.0):
        if not 0 <= i < n:
            raise DomainError("generator index out of range")
        return cls(n, {1 << i: c})

    @classmethod
    def _coerce(cls, n, other):
        if isinstance(other, GrassmannElement):
            if other.n != n:
                raise DomainError("elements belong to different algebras")
            return other
        return cls.scalar(n, other)

    # -- arithmetic ---------------------------------------------------------------
    def __add__(self, other):
        other = self._coerce(self.n, other)
        out = dict(self.terms)
        for m, c in other.terms.items():
            out[m] = out[m] + c if m in out else c
        return GrassmannElement(self.n, out)

    __radd__ = __add__

    def __neg__(self):
        return GrassmannElement(self.n, {m: -c for m, c in self.terms.items()})

    def __sub__(self, other):
        return self + (-self._coerce(self.n, other))

    def __rsub__(self, other):
        return self._coerce(self.n, other) - self

    def __mul__(self, other):
        other = self._coerce(self.n, other)
        out = {}
        for s, cs in self.terms.items():
            for t, ct in other.terms.items():
                if s & t:
                    continue
                m = s | t
                v = merge_sign(s, t) * cs * ct
                out[m] = out[m] + v if m in out else v
        return GrassmannElement(self.n, out)

    def __rmul__(self, other):
        return self._coerce(self.n, other) * self

    def __truediv__(self, other):
        if isinstance(other, GrassmannElement):
            return self * other.inverse()
        return GrassmannElement(self.n, {m: c / other for m, c in self.terms.items()})

    def __eq__(self, other):
        other = self._coerce(self.n, other)
        keys = set(self.terms) | set(other.terms)
        return all(np.array_equal(self.terms.get(k, 0), other.terms.get(k, 0)) for k in keys)

    def __repr__(self):
        if not self.terms:
            return "0"
        parts = []
        for m in sorted(self.terms, key=lambda m: (_popcount(m), m)):
            gens = "".join(f"θ{i}" for i in range(self.n) if m >> i & 1)
            parts.append(f"({self.terms[m]}){gens}")
        return " + ".join(parts)

    # -- structure ---------------------------------------------------------------
    @property
    def body(self):
        return self.terms.get(0, 0.0)

    def soul(self):
        return GrassmannElement(self.n, {m: c for m, c in self.terms.items() if m})

    def grade_part(self, parity: int):
        return GrassmannElement(self.n, {m: c for m, c in self.terms.items() if _popcount(m) % 2 == parity})

    @property
    def is_even(self) -> bool:
        return all(_popcount(m) % 2 == 0 for m in self.terms)

    @property
    def is_odd(self) -> bool:
        return all(_popcount(m) % 2 == 1 for m in self.terms)

    def close_to(self, other, tol=0.0) -> bool:
        other = self._coerce(self.n, other)
        keys = set(self.terms) | set(other.terms)
        return all(np.all(np.abs(np.asarray(self.terms.get(k, 0)) - np.asarray(other.terms.get(k, 0))) <= tol) for k in keys)

    # -- functions of nilpotent elements -----------------------------------------------
    def _series(self, coeffs):
        """sum_k coeffs[k] * soul^k (finite: soul^{n+1} = 0)."""
        s = self.soul()
        out = GrassmannElement.scalar(self.n, coeffs[0])
        power = GrassmannElement.scalar(self.n, 1.0)
        for k in range(1, len(coeffs)):
            power = power * s
            if not power.terms:
                break
            out = out + power * coeffs[k]
        return out

    def exp(self):
        if not self.is_even:
            raise DomainError("exp is defined here for even elements")
        e0 = np.exp(self.body)
        return self._series([e0 / math.factorial(k) for k in range(self.n // 2 + 1)])

    def inverse(self):
        b = self.body
        if np.any(np.asarray(b) == 0):
            raise DomainError("element with vanishing body is not invertible")
        if not self.is_even:
            raise DomainError("inverse is defined here for even elements")
        return self._series([(-1) ** k / b ** (k + 1) for k in range(self.n // 2 + 1)])


def berezin_integrate(g: GrassmannElement, generators) -> GrassmannElement:
    """Iterated Berezin integral over the given generators.

    Each integration uses int dθ θ h = h for θ-free h (θ moved to the left), and
    generators are integrated from the highest index down, so that
    int dθ2 dθ1 (θ1 θ2) = -1.
    """
    gens = sorted(set(int(i) for i in generators), reverse=True)
    for i in gens:
        if not 0 <= i < g.n:
            raise DomainError("generator index out of range")
    out = g
    for i in gens:
        bit = 1 << i
        terms = {}
        for m, c in out.terms.items():
            if m & bit:
                sign = -1 if _popcount(m & (bit - 1)) & 1 else 1
                terms[m ^ bit] = sign * c
        out = GrassmannElement(g.n, terms)
    return out


# -- supermatrices ------------------------------------------------------------------

def _object_block(block, shape=None):
    if isinstance(block, np.ndarray) and block.dtype == object:
        out = block
    else:
        rows = [list(r) for r in block]
        out = np.empty((len(rows), len(rows[0]) if rows else 0), dtype=object)
        for i, r in enumerate(rows):
            for j, v in enumerate(r):
                out[i, j] = v
    if shape is not None:
        if out.size == 0:
            out = np.empty(shape, dtype=object)
        if out.shape != shape:
            raise DomainError(f"block has shape {out.shape}, expected {shape}")
    return out


def _elements(n, block, parity, shape=None):
    """Object array of elements; parity 0 = even entries, 1 = odd entries."""
    block = _object_block(block, shape)
    out = np.empty(block.shape, dtype=object)
    for idx, v in np.ndenumerate(block):
        e = GrassmannElement._coerce(n, 0.0 if v is None else v)
        if parity == 0 and not e.is_even:
            raise DomainError("diagonal blocks need even entries")
        if parity == 1 and not e.is_odd:
            raise DomainError("off-diagonal blocks need odd entries")
        out[idx] = e
    return out


def _matmul(x, y, n):
    r = np.empty((x.shape[0], y.shape[1]), dtype=object)
    for i in range(x.shape[0]):
        for j in range(y.shape[1]):
            acc = GrassmannElement(n)
            for k in range(x.shape[1]):
                acc = acc + x[i, k] * y[k, j]
            r[i, j] = acc
    return r


def even_det(m, n) -> GrassmannElement:
    """Determinant of a matrix of mutually commuting (even) elements."""
    size = m.shape[0]
    if size == 0:
        return GrassmannElement.scalar(n, 1.0)
    total = GrassmannElement(n)
    for perm in itertools.permutations(range(size)):
        inv = sum(1 for i in range(size) for j in range(i + 1, size) if perm[i] > perm[j])
        term = GrassmannElement.scalar(n, -1.0 if inv & 1 else 1.0)
        for i, p in enumerate(perm):
            term = term * m[i, p]
        total = total + term
    return total


def even_inverse(m, n):
    """Inverse of an even matrix via the adjugate."""
    size = m.shape[0]
    d = even_det(m, n)
    dinv = d.inverse()
    out = np.empty_like(m)
    for i in range(size):
        for j in range(size):
            minor = np.delete(np.delete(m, j, axis=0), i, axis=1)
            out[i, j] = even_det(minor, n) * dinv * (-1.0 if (i + j) & 1 else 1.0)
    return out


@dataclass
class SuperMatrix:
    """[[A, B], [C, D]] with A (N x N), D (M x M) even and B, C odd."""

    n: int
    A: np.ndarray
    B: np.ndarray
    C: np.ndarray
    D: np.ndarray

    def __post_init__(self):
        self.A = _elements(self.n, self.A, 0)
        self.D = _elements(self.n, self.D, 0)
        N, M = self.A.shape[0], self.D.shape[0]
        self.B = _elements(self.n, self.B, 1, (N, M))
        self.C = _elements(self.n, self.C, 1, (M, N))
        if self.A.shape != (N, N) or self.D.shape != (M, M):
            raise DomainError("diagonal blocks must be square")

    @property
    def shape(self):
        return self.A.shape[0], self.D.shape[0]

    @classmethod
    def numeric(cls, n, A, D, B=None, C=None):
        A = np.asarray(A, dtype=complex).reshape(len(A), -1)
        D = np.asarray(D, dtype=complex).reshape(len(D), -1)
        N, M = A.shape[0], D.shape[0]
        B = np.zeros((N, M), dtype=object) if B is None else B
        C = np.zeros((M, N), dtype=object) if C is None else C
        return cls(n, A.astype(object), B, C, D.astype(object))

    def __matmul__(self, other: "SuperMatrix") -> "SuperMatrix":
        n = self.n
        A = _add(_matmul(self.A, other.A, n), _matmul(self.B, other.C, n))
        B = _add(_matmul(self.A, other.B, n), _matmul(self.B, other.D, n))
        C = _add(_matmul(self.C, other.A, n), _matmul(self.D, other.C, n))
        D = _add(_matmul(self.C, other.B, n), _matmul(self.D, other.D, n))
        return SuperMatrix(n, A, B, C, D)

    def __sub__(self, other: "SuperMatrix") -> "SuperMatrix":
        return SuperMatrix(self.n, _add(self.A, -1 * other.A), _add(self.B, -1 * other.B),
                           _add(self.C, -1 * other.C), _add(self.D, -1 * other.D))

    def scaled_identity(self, lam) -> "SuperMatrix":
        N, M = self.shape
        return SuperMatrix.numeric(self.n, lam * np.eye(N), lam * np.eye(M))


def _add(x, y):
    out = np.empty_like(x)
    for idx in np.ndindex(x.shape):
        out[idx] = x[idx] + y[idx]
    return out


def supertrace(m: SuperMatrix) -> GrassmannElement:
    out = GrassmannElement(m.n)
    for i in range(m.A.shape[0]):
        out = out + m.A[i, i]
    for j in range(m.D.shape[0]):
        out = out - m.D[j, j]
    return out


def sdet(m: SuperMatrix) -> GrassmannElement:
    """det(A - B D^{-1} C) / det(D)."""
    n = m.n
    if m.D.shape[0] and np.any(np.asarray(even_det(m.D, n).body) == 0):
        raise DomainError("fermion-fermion block is singular")
    Dinv = even_inverse(m.D, n) if m.D.shape[0] else m.D
    schur = _add(m.A, -1 * _matmul(_matmul(m.B, Dinv, n), m.C, n)) if m.D.shape[0] else m.A
    return even_det(schur, n) * even_det(m.D, n).inverse()


# -- direct U(1|1) integral -------------------------------------------------------------

def z11_expansion(kern, a, b, fermionic: bool = True):
    """Quadrature nodes and the expanded integrand e^{-Str((IZ)^2)/(2 hbar) + Str ZC}.

    Z = [[x, xi], [xibar, y]] with source C = diag(a, b).  The flip-sign
    convention rotates the fermion-fermion direction, hence I = diag(1, i).
    Returns (wx, wy, element) with element coefficients on the (x, y) grid.
    """
    pot = kern.potential
    if not pot.is_gaussian:
        raise UnsupportedError("z11_direct needs the Gaussian potential")
    if kern.scheme.mode.value != "flip-sign":
        raise UnsupportedError("z11_direct needs the flip-sign scheme")
    x, wx = kern.bosonic_nodes(a, 0.0)
    y, wy = kern.fermionic_nodes(b, kern.epsilon)
    X = x[:, None] + 0j * y[None, :]
    Y = y[None, :] + 0j * x[:, None]
    n = 2
    xi = GrassmannElement.generator(n, 0) if fermionic else GrassmannElement(n)
    xib = GrassmannElement.generator(n, 1) if fermionic else GrassmannElement(n)
    Z = SuperMatrix(n, [[X]], [[xi]], [[xib]], [[Y]])
    I = SuperMatrix.numeric(n, [[1.0]], [[1j]])
    C = SuperMatrix.numeric(n, [[a]], [[b]])
    IZ = I @ Z
    action = supertrace(IZ @ IZ) * (-0.5 / pot.hbar) + supertrace(Z @ C)
    return wx, wy, action.exp()


def z11_direct(kern, a, b, fermionic: bool = True) -> complex:
    """Z_{1,1} from the flat supermatrix integral.

    The Grassmann generators are integrated exactly, x and y by quadrature.
    ``fermionic=False`` drops the odd blocks, leaving two decoupled integrals.
    """
    wx, wy, w = z11_expansion(kern, a, b, fermionic)
    if fermionic:
        w = berezin_integrate(w, [0, 1])
    return complex(np.sum(wx[:, None] * wy[None, :] * np.asarray(w.body)))
