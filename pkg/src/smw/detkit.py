"""Determinant infrastructure.

Vandermonde and generalized Cauchy determinants, declarative block determinants
with exact Leibniz derivatives, the Desnanot-Jacobi identity and Barnes G.

Sign conventions
----------------
``vandermonde(x) = prod_{i<j} (x_i - x_j)``, which equals ``det(x_i**(n-j))``
(descending powers).  The block form of the generalized Cauchy determinant,
rows ``x_i**(k-1)`` (k = 1..N-M) followed by rows ``1/(x_i - y_j)``, equals the
product form times :func:`cauchy_sign`.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Mapping, Sequence

import numpy as np
import scipy.linalg

from .model import DomainError

EntryKey = tuple  # (row_label, row_index, col_label, col_index)


def vandermonde(x) -> complex:
    x = np.asarray(x, dtype=complex)
    out = 1.0 + 0j
    for i in range(len(x)):
        for j in range(i + 1, len(x)):
            out *= x[i] - x[j]
    return out


def vandermonde_det(x) -> complex:
    """Determinant path for :func:`vandermonde`: det(x_i**(n-j))."""
    x = np.asarray(x, dtype=complex)
    n = len(x)
    if n == 0:
        return 1.0 + 0j
    return det(x[:, None] ** np.arange(n - 1, -1, -1)[None, :])


def cauchy_sign(N: int, M: int) -> int:
    """Sign relating the block and product forms of the Cauchy determinant."""
    K = N - M
    return -1 if (K * (K - 1) // 2 + M * (M - 1) // 2) % 2 else 1


def cauchy_delta(x, y) -> complex:
    """Delta_N(x) Delta_M(y) / prod_{i,j} (x_i - y_j)."""
    x = np.asarray(x, dtype=complex)
    y = np.asarray(y, dtype=complex)
    diff = x[:, None] - y[None, :]
    if np.any(diff == 0):
        raise DomainError("coincident x_i and y_j")
    return vandermonde(x) * vandermonde(y) / np.prod(diff)


def cauchy_block_matrix(x, y) -> np.ndarray:
    """Rows x_i**(k-1), k=1..N-M, then rows 1/(x_i - y_j); columns indexed by i."""
    x = np.asarray(x, dtype=complex)
    y = np.asarray(y, dtype=complex)
    N, M = len(x), len(y)
    if N < M:
        raise DomainError("cauchy block needs N >= M")
    diff = x[None, :] - y[:, None]
    if np.any(diff == 0):
        raise DomainError("coincident x_i and y_j")
    mono = x[None, :] ** np.arange(N - M)[:, None]
    return np.vstack([mono, 1.0 / diff])


def cauchy_delta_det(x, y) -> complex:
    """Determinant path for :func:`cauchy_delta` (sign-corrected block form)."""
    N, M = len(x), len(y)
    if N == 0:
        return 1.0 + 0j
    return cauchy_sign(N, M) * det(cauchy_block_matrix(x, y))


def det(a: np.ndarray) -> complex:
    a = np.asarray(a, dtype=complex)
    if a.shape[0] == 0:
        return 1.0 + 0j
    if a.shape[0] == 1:
        return complex(a[0, 0])
    return complex(np.linalg.det(a))


def det_with_diagnostic(a: np.ndarray) -> tuple[complex, float]:
    """Determinant by partial-pivoted LU plus the pivot ratio max|u_ii|/min|u_ii|."""
    a = np.asarray(a, dtype=complex)
    n = a.shape[0]
    if n == 0:
        return 1.0 + 0j, 1.0
    lu, piv = scipy.linalg.lu_factor(a, check_finite=True)
    diag = np.diag(lu)
    swaps = int(np.sum(piv != np.arange(n)))
    value = complex(np.prod(diag)) * (-1) ** swaps
    absd = np.abs(diag)
    ratio = float(absd.max() / absd.min()) if absd.min() > 0 else math.inf
    return value, ratio


@dataclass(frozen=True)
class BlockDetSpec:
    """A square matrix described by labelled row/column groups.

    ``entry`` maps ``(row_label, r, col_label, c)`` to a complex number, with
    ``r`` and ``c`` counted from 0 inside their group.  ``derivative_rules``
    maps a parameter name to a function of the same key returning a list of
    ``(coefficient, key)`` pairs such that
    ``d entry(key) / d param = sum coefficient * entry(key')``; an empty list
    means the entry does not depend on the parameter.
    """

    row_groups: tuple
    column_groups: tuple
    entry: Callable[..., complex]
    derivative_rules: Mapping[str, Callable] = field(default_factory=dict)

    def __post_init__(self):
        object.__setattr__(self, "row_groups", tuple((lab, int(n)) for lab, n in self.row_groups))
        object.__setattr__(self, "column_groups", tuple((lab, int(n)) for lab, n in self.column_groups))
        if any(n < 0 for _, n in self.row_groups + self.column_groups):
            raise DomainError("negative group size")
        if self.size != sum(n for _, n in self.column_groups):
            raise DomainError("block determinant spec is not square")

    @property
    def size(self) -> int:
        return sum(n for _, n in self.row_groups)

    def row_keys(self):
        return [(lab, r) for lab, n in self.row_groups for r in range(n)]

    def column_keys(self):
        return [(lab, c) for lab, n in self.column_groups for c in range(n)]

    def matrix(self) -> np.ndarray:
        rows, cols = self.row_keys(), self.column_keys()
        out = np.empty((len(rows), len(cols)), dtype=complex)
        for i, (rl, r) in enumerate(rows):
            for j, (cl, c) in enumerate(cols):
                out[i, j] = self.entry(rl, r, cl, c)
        return out

    def _expand(self, terms, param):
        rule = self.derivative_rules.get(param)
        if rule is None:
            raise DomainError(f"no derivative rule for parameter {param!r}")
        out = []
        for coeff, key in terms:
            for c2, key2 in rule(*key):
                out.append((coeff * c2, tuple(key2)))
        return out

    def derived_row(self, i: int, params: Sequence[str]) -> np.ndarray:
        """Row i with every entry differentiated by each parameter in turn."""
        rl, r = self.row_keys()[i]
        out = np.zeros(self.size, dtype=complex)
        for j, (cl, c) in enumerate(self.column_keys()):
            terms = [(1.0, (rl, r, cl, c))]
            for param in params:
                terms = self._expand(terms, param)
            out[j] = sum(coeff * self.entry(*key) for coeff, key in terms)
        return out


def block_determinant(spec: BlockDetSpec) -> complex:
    return det(spec.matrix())


def block_determinant_with_diagnostic(spec: BlockDetSpec) -> tuple[complex, float]:
    return det_with_diagnostic(spec.matrix())


def leibniz_derivative(spec: BlockDetSpec, parameter, order: int = 1) -> complex:
    """Exact derivative of the determinant, row by row.

    ``parameter`` is a single name (``order`` 1 or 2) or a pair of names for a
    mixed second derivative.
    """
    if isinstance(parameter, str):
        params = [parameter] * order
    else:
        params = list(parameter)
    if len(params) not in (1, 2):
        raise DomainError("only first and second derivatives are supported")
    for p in params:
        if p not in spec.derivative_rules:
            raise DomainError(f"no derivative rule for parameter {p!r}")
    base = spec.matrix()
    n = base.shape[0]
    if n == 0:
        return 0j

    cache = {}

    def drow(i, ps):
        k = (i, ps)
        if k not in cache:
            cache[k] = spec.derived_row(i, ps)
        return cache[k]

    total = 0j
    if len(params) == 1:
        for i in range(n):
            row = drow(i, (params[0],))
            if not row.any():
                continue
            m = base.copy()
            m[i] = row
            total += det(m)
        return total

    p1, p2 = params
    for i in range(n):
        row = drow(i, (p1, p2))
        if row.any():
            m = base.copy()
            m[i] = row
            total += det(m)
    for i in range(n):
        r1 = drow(i, (p1,))
        if not r1.any():
            continue
        for j in range(n):
            if j == i:
                continue
            r2 = drow(j, (p2,))
            if not r2.any():
                continue
            m = base.copy()
            m[i] = r1
            m[j] = r2
            total += det(m)
    return total


def minor(a: np.ndarray, rows: Sequence[int], cols: Sequence[int]) -> complex:
    """Determinant after deleting the given rows and columns (0-based)."""
    a = np.asarray(a)
    keep_r = [i for i in range(a.shape[0]) if i not in set(rows)]
    keep_c = [j for j in range(a.shape[1]) if j not in set(cols)]
    return det(a[np.ix_(keep_r, keep_c)])


def jacobi_residual(a: np.ndarray, rows: tuple, cols: tuple) -> complex:
    """D*D(i,j;k,l) - [D(i;k)D(j;l) - D(i;l)D(j;k)] for 1-based rows (i,j), cols (k,l).

    The plain form holds when (i, j) and (k, l) are in the same relative order;
    otherwise the bracket changes sign, which is accounted for here.
    """
    a = np.asarray(a, dtype=complex)
    if a.shape[0] < 2 or a.shape[0] != a.shape[1]:
        raise DomainError("jacobi identity needs a square matrix of size >= 2")
    i, j = (r - 1 for r in rows)
    k, l = (c - 1 for c in cols)
    if i == j or k == l:
        raise DomainError("rows and columns must be distinct")
    sign = 1 if (i < j) == (k < l) else -1
    lhs = det(a) * minor(a, (i, j), (k, l))
    rhs = minor(a, (i,), (k,)) * minor(a, (j,), (l,)) - minor(a, (i,), (l,)) * minor(a, (j,), (k,))
    return lhs - sign * rhs


def barnes_g(n: int) -> float:
    """G(n) = prod_{i=0}^{n-2} i! for positive integers."""
    if n < 1 or int(n) != n:
        raise DomainError("barnes_g needs a positive integer")
    return float(math.prod(math.factorial(i) for i in range(int(n) - 1)))
