"""Potentials, weight schemes and the parameter records shared by every module.

The bosonic weight is ``exp(-W(x)/hbar)``.  The fermionic weight depends on the
regularization mode:

* ``flip-sign``: ``exp(-W(y)/hbar)``, i.e. the sign of the fermionic potential is
  flipped so the integral converges (the ``diag(1, i)`` insertion trick).
* ``custom-fermionic``: ``exp(+W_F(y)/hbar)`` with a user supplied ``W_F`` that
  tends to minus infinity at both ends of the real line.

Fermionic variables live on the contour ``y + i*epsilon``.
"""
from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from typing import Optional, Sequence

import numpy as np


class SmwError(Exception):
    """Base class for workbench errors."""


class DomainError(SmwError, ValueError):
    """Arguments outside the domain of a formula (coincident poles, bad sizes)."""


class AccuracyError(SmwError, ArithmeticError):
    """A quadrature rule did not resolve its integrand."""


class UnsupportedError(SmwError, NotImplementedError):
    """Requested mode exists by name only."""


class Mode(str, Enum):
    FLIP_SIGN = "flip-sign"
    CUSTOM_FERMIONIC = "custom-fermionic"
    # named for completeness; imaginary coupling is not implemented
    FRESNEL = "fresnel"


@dataclass(frozen=True)
class Potential:
    """W(x) = sum_k coefficients[k] x**k with coupling hbar."""

    coefficients: tuple
    hbar: float = 1.0

    def __post_init__(self):
        c = tuple(float(v) for v in self.coefficients)
        while len(c) > 1 and c[-1] == 0.0:
            c = c[:-1]
        object.__setattr__(self, "coefficients", c)
        if len(c) < 2:
            raise DomainError("potential must have degree >= 1")
        if not self.hbar > 0:
            raise DomainError("hbar must be positive")

    @classmethod
    def gaussian(cls, hbar=1.0):
        return cls((0.0, 0.0, 0.5), hbar)

    @classmethod
    def quartic(cls, g=1.0, hbar=1.0, mass=0.0):
        return cls((0.0, 0.0, 0.5 * mass, 0.0, g), hbar)

    @property
    def degree(self) -> int:
        return len(self.coefficients) - 1

    @property
    def leading(self) -> float:
        return self.coefficients[-1]

    @property
    def is_confining(self) -> bool:
        return self.degree % 2 == 0 and self.leading > 0

    @property
    def is_gaussian(self) -> bool:
        c = self.coefficients
        return self.degree == 2 and c[1] == 0.0 and c[2] == 0.5

    @property
    def is_even(self) -> bool:
        return all(v == 0.0 for v in self.coefficients[1::2])

    def __call__(self, x):
        # Horner; works for scalars and complex arrays
        x = np.asarray(x)
        out = np.zeros_like(x, dtype=np.result_type(x, float))
        for c in reversed(self.coefficients):
            out = out * x + c
        return out if out.ndim else out[()]

    def derivative(self, x, order=1):
        c = np.polynomial.polynomial.polyder(self.coefficients, order)
        return np.polynomial.polynomial.polyval(x, c)

    def negated(self) -> "Potential":
        return Potential(tuple(-v for v in self.coefficients), self.hbar)

    def saddle(self, tilt: float = 0.0, sign: int = 1) -> tuple[float, float]:
        """Location and width of the peak of exp(-sign*W(x)/hbar + tilt*x) on the real line.

        Used only to center quadrature rules; ``sign=-1`` describes a potential that
        is already inverted (the custom fermionic case).
        """
        h = self.hbar
        dw = np.polynomial.polynomial.polyder(self.coefficients)
        # stationary points: sign*W'(x)/hbar = tilt
        eq = np.array(dw, dtype=float) * sign
        eq[0] -= tilt * h
        roots = np.polynomial.polynomial.polyroots(eq) if len(eq) > 1 else np.array([])
        real = [r.real for r in np.atleast_1d(roots) if abs(r.imag) < 1e-9 * (1 + abs(r.real))]
        if not real:
            return 0.0, self.natural_scale()
        logw = [-sign * self(r) / h + tilt * r for r in real]
        x0 = float(real[int(np.argmax(logw))])
        curv = sign * self.derivative(x0, 2) / h
        width = 1.0 / np.sqrt(curv) if curv > 1e-12 else self.natural_scale()
        return x0, float(min(width, 10 * self.natural_scale()))

    def natural_scale(self) -> float:
        """Length on which W/hbar changes by O(1) at large |x|."""
        return float((self.hbar / abs(self.leading)) ** (1.0 / self.degree))


@dataclass(frozen=True)
class WeightScheme:
    mode: Mode = Mode.FLIP_SIGN
    fermionic_potential: Optional[Potential] = None
    epsilon: float = 1e-3

    def __post_init__(self):
        object.__setattr__(self, "mode", Mode(self.mode))
        if not self.epsilon > 0:
            raise DomainError("epsilon must be positive")
        if self.mode is Mode.FRESNEL:
            raise UnsupportedError("imaginary coupling (fresnel mode) is not implemented")
        if self.mode is Mode.CUSTOM_FERMIONIC:
            wf = self.fermionic_potential
            if wf is None:
                raise DomainError("custom-fermionic mode needs a fermionic potential")
            if not (wf.degree % 2 == 0 and wf.leading < 0):
                raise DomainError("fermionic potential must tend to -inf on both sides")

    def fermionic_exponent(self, pot: Potential, z):
        """Log of the fermionic weight at complex z (no contour shift applied)."""
        if self.mode is Mode.FLIP_SIGN:
            return -pot(z) / pot.hbar
        wf = self.fermionic_potential
        return wf(z) / wf.hbar

    def effective_fermionic_potential(self, pot: Potential) -> Potential:
        """P with fermionic weight exp(-P(z)/P.hbar)."""
        if self.mode is Mode.FLIP_SIGN:
            return pot
        return self.fermionic_potential.negated()


@dataclass(frozen=True)
class SourceSpec:
    a: tuple = ()
    b: tuple = ()

    def __post_init__(self):
        object.__setattr__(self, "a", tuple(complex(v) for v in self.a))
        object.__setattr__(self, "b", tuple(complex(v) for v in self.b))
        _check_distinct(self.a, "a")
        _check_distinct(self.b, "b")
        for ai in self.a:
            for bj in self.b:
                if ai == bj:
                    raise DomainError("source eigenvalues a_i and b_j must differ")

    @property
    def N(self) -> int:
        return len(self.a)

    @property
    def M(self) -> int:
        return len(self.b)


@dataclass(frozen=True)
class ChPolySpec:
    lam: tuple = ()
    mu: tuple = ()

    def __post_init__(self):
        object.__setattr__(self, "lam", tuple(complex(v) for v in self.lam))
        object.__setattr__(self, "mu", tuple(complex(v) for v in self.mu))
        _check_distinct(self.lam, "lambda")
        _check_distinct(self.mu, "mu")
        for m in self.mu:
            if m.imag == 0:
                raise DomainError("mu must have a nonzero imaginary part")
            if m in self.lam:
                raise DomainError("lambda and mu must differ")

    @property
    def p(self) -> int:
        return len(self.lam)

    @property
    def q(self) -> int:
        return len(self.mu)


def _check_distinct(values: Sequence[complex], name: str):
    if len(set(values)) != len(values):
        raise DomainError(f"{name} values must be pairwise distinct")


def check_sizes(N: int, M: int, p: int = 0, q: int = 0):
    if min(N, M, p, q) < 0:
        raise DomainError("negative size")
    if N + p < M + q:
        raise DomainError(f"need N+p >= M+q, got N={N}, M={M}, p={p}, q={q}")


def weight_bosonic(pot: Potential, x):
    """exp(-W(x)/hbar), evaluated through its logarithm; underflows to 0."""
    logw = -np.real(pot(x)) / pot.hbar
    with np.errstate(under="ignore", over="ignore"):
        return np.exp(np.minimum(logw, 700.0))


def weight_fermionic(pot: Potential, scheme: WeightScheme, y):
    """Fermionic weight on the shifted contour y + i*epsilon."""
    z = np.asarray(y) + 1j * scheme.epsilon
    return complex_exp(scheme.fermionic_exponent(pot, z))


def complex_exp(logw):
    """exp of a complex log-weight with the modulus clipped against overflow."""
    logw = np.asarray(logw, dtype=complex)
    with np.errstate(under="ignore", over="ignore"):
        out = np.exp(np.minimum(logw.real, 700.0)) * np.exp(1j * logw.imag)
    return out if out.ndim else complex(out)


DEFAULT_SCHEME = WeightScheme()
