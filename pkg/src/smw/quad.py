"""Auxiliary functions P, Q, R, S_L, S_R, R-tilde and their parameter derivatives.

All integrals are one- or two-dimensional quadratures against the bosonic weight
``exp(-W(x)/hbar)`` and the fermionic weight of the active scheme, with the
Laplace kernels ``exp(x*a)`` and ``exp(-y*b)``.  Derivatives with respect to the
parameters are realized by inserting monomials (or higher pole powers) under the
integral sign.

Contours
--------
Bosonic variables x run along the real line and fermionic variables y along
``R + i*epsilon``, so the kernel ``1/(x - y)`` never vanishes.  The integrands
are entire apart from these poles, so each contour may be translated vertically
as long as no pole is crossed; the rules below push x down and y up by about
one weight width.  This leaves every integral unchanged while keeping the
nearest singularity far from the nodes, which is what makes 80-point rules
accurate to ~1e-12 even for epsilon = 1e-3.
"""
from __future__ import annotations

import math
import threading
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Optional

import numpy as np
from scipy.special import wofz

from .model import (
    AccuracyError,
    DomainError,
    Potential,
    WeightScheme,
    complex_exp,
)

TAIL_TOLERANCE = 1e-10

GH = "gauss-hermite-mapped"
TANH_SINH = "tanh-sinh"
POLE_ORDER_FACTOR = 3


@dataclass(frozen=True)
class QuadratureRule:
    """A rule on the real line, mapped by x = center + scale*t.

    For ``gauss-hermite-mapped`` the Hermite weight exp(-t**2) is divided back
    out of the weights, so the rule integrates f(x) dx directly.  ``tanh-sinh``
    uses the double-exponential substitution t -> sinh(pi/2 sinh t).
    """

    kind: str = GH
    order: int = 80
    center: float = 0.0
    scale: float = 1.0

    def __post_init__(self):
        if self.kind not in (GH, TANH_SINH):
            raise DomainError(f"unknown quadrature kind {self.kind!r}")
        if self.order < 8:
            raise DomainError("quadrature order must be >= 8")

    def reference(self):
        return _reference_nodes(self.kind, self.order)

    def mapped(self, center=None, scale=None):
        t, w = self.reference()
        c = self.center if center is None else center
        s = self.scale if scale is None else scale
        return c + s * t, s * w


@lru_cache(maxsize=None)
def _reference_nodes(kind, order):
    if kind == GH:
        t, w = np.polynomial.hermite.hermgauss(order)
        w = np.exp(np.log(w) + t * t)
    else:
        n = order // 2
        h = 2.6 / n
        s = np.arange(-n, n + 1) * h
        u = 0.5 * np.pi * np.sinh(s)
        t = np.sinh(u)
        w = h * 0.5 * np.pi * np.cosh(s) * np.cosh(u)
    t.setflags(write=False)
    w.setflags(write=False)
    return t, w


def hermite_raw_weight_sum(order: int) -> float:
    """Sum of the unmapped Gauss-Hermite weights (equals sqrt(pi))."""
    return float(np.polynomial.hermite.hermgauss(order)[1].sum())


@lru_cache(maxsize=4096)
def weight_profile(coefficients: tuple, hbar: float, tilt: float) -> tuple[float, float]:
    """Mean and standard deviation of exp(-W(x)/hbar + tilt*x) on the real line."""
    pot = Potential(coefficients, hbar)
    x0, width = pot.saddle(tilt)
    span = 14.0 * max(width, pot.natural_scale())
    x = np.linspace(x0 - span, x0 + span, 6001)
    logg = -pot(x) / hbar + tilt * x
    g = np.exp(logg - logg.max())
    z = g.sum()
    mean = float((x * g).sum() / z)
    sd = float(np.sqrt(((x - mean) ** 2 * g).sum() / z))
    return mean, sd


def _check_tail(contrib: np.ndarray, what: str):
    a = np.abs(contrib)
    total = a.sum()
    if not np.isfinite(total):
        raise AccuracyError(f"{what}: non-finite integrand")
    if total == 0:
        return
    tail = a[:2].sum() + a[-2:].sum()
    if tail > TAIL_TOLERANCE * total:
        raise AccuracyError(f"{what}: tail mass {tail / total:.2e} exceeds {TAIL_TOLERANCE:g}")


def _key(*vals):
    out = []
    for v in vals:
        if isinstance(v, (complex, float, int, np.number)):
            c = complex(v)
            out.append((c.real, c.imag))
        else:
            out.append(v)
    return tuple(out)


@dataclass(eq=False)
class AuxKernels:
    """Evaluators for the auxiliary functions with a value cache.

    ``contour_shift`` is the vertical displacement of the integration contours in
    units of the weight width (0 keeps x on the real axis and y on R + i*eps).
    ``None`` picks 1.0 for quadratic potentials and 0.5 otherwise; higher-degree
    weights grow quickly off the real axis.
    """

    potential: Potential
    scheme: WeightScheme = field(default_factory=WeightScheme)
    rule: QuadratureRule = field(default_factory=QuadratureRule)
    contour_shift: Optional[float] = None
    check_tails: bool = True
    _cache: dict = field(default_factory=dict, repr=False)
    _lock: threading.Lock = field(default_factory=threading.Lock, repr=False)

    def __post_init__(self):
        self.fermionic_potential = self.scheme.effective_fermionic_potential(self.potential)
        if self.contour_shift is None:
            deg = max(self.potential.degree, self.fermionic_potential.degree)
            self.contour_shift = 1.0 if deg <= 2 else 0.5

    @property
    def epsilon(self) -> float:
        return self.scheme.epsilon

    def with_rule(self, rule: QuadratureRule) -> "AuxKernels":
        return AuxKernels(self.potential, self.scheme, rule, self.contour_shift, self.check_tails)

    def with_scheme(self, scheme: WeightScheme) -> "AuxKernels":
        return AuxKernels(self.potential, scheme, self.rule, self.contour_shift, self.check_tails)

    # -- caching -------------------------------------------------------------
    def _cached(self, key, compute):
        try:
            return self._cache[key]
        except KeyError:
            pass
        value = compute()
        with self._lock:
            return self._cache.setdefault(key, value)

    # -- weights -------------------------------------------------------------
    def log_wb(self, z):
        return -self.potential(z) / self.potential.hbar

    def log_wf(self, z):
        fp = self.fermionic_potential
        return -fp(z) / fp.hbar

    def wb(self, z):
        """Bosonic weight at a complex point (no contour shift)."""
        return complex_exp(self.log_wb(z))

    def wf(self, z):
        """Fermionic weight at a complex point (no contour shift)."""
        return complex_exp(self.log_wf(z))

    # -- contours ------------------------------------------------------------
    def bosonic_profile(self, a):
        pot = self.potential
        return weight_profile(pot.coefficients, pot.hbar, float(np.real(a)))

    def fermionic_profile(self, b):
        fp = self.fermionic_potential
        return weight_profile(fp.coefficients, fp.hbar, -float(np.real(b)))

    @property
    def pole_rule(self) -> QuadratureRule:
        """Finer rule for one-dimensional integrands with a nearby pole."""
        return QuadratureRule(self.rule.kind, POLE_ORDER_FACTOR * self.rule.order)

    def bosonic_nodes(self, a, shift=0.0, rule=None):
        """Nodes and weights for x on R + i*shift."""
        center, sd = self.bosonic_profile(a)
        x, w = (rule or self.rule).mapped(center, sd)
        return x + 1j * shift, w

    def fermionic_nodes(self, b, height, rule=None):
        """Nodes and weights for y on R + i*height."""
        center, sd = self.fermionic_profile(b)
        y, w = (rule or self.rule).mapped(center, sd)
        return y + 1j * height, w

    def bosonic_shift(self, a, obstacles=()):
        """Imaginary part of the (lowered) x contour, stopping short of ``obstacles``."""
        sd = self.bosonic_profile(a)[1]
        return _safe_offset(0.0, -1, self.contour_shift * sd, obstacles)

    def fermionic_height(self, b, obstacles=()):
        sd = self.fermionic_profile(b)[1]
        return _safe_offset(self.epsilon, +1, self.contour_shift * sd, obstacles)

    # -- one-dimensional integrals --------------------------------------------
    def _bosonic_integral(self, a, factor, what, shift=0.0, rule=None):
        x, w = self.bosonic_nodes(a, shift, rule)
        contrib = w * complex_exp(self.log_wb(x) + x * a) * factor(x)
        if self.check_tails:
            _check_tail(contrib, what)
        return complex(contrib.sum())

    def _fermionic_integral(self, b, factor, what, height, rule=None):
        y, w = self.fermionic_nodes(b, height, rule)
        contrib = w * complex_exp(self.log_wf(y) - y * b) * factor(y)
        if self.check_tails:
            _check_tail(contrib, what)
        return complex(contrib.sum())

    def q(self, k: int, a) -> complex:
        """Q_k(a) = int x^k w_B(x) e^{xa} dx."""
        k = _order(k)
        return self._cached(
            _key("Q", k, a),
            lambda: self._bosonic_integral(a, lambda x: x**k, "Q"),
        )

    def q_fermionic(self, k: int, b) -> complex:
        """int (-y)^k w_F(y) e^{-yb} dy = d^k/db^k of the fermionic partition integral."""
        k = _order(k)
        return self._cached(
            _key("F", k, b),
            lambda: self._fermionic_integral(
                b, lambda y: (-y) ** k, "F", self.fermionic_height(b)
            ),
        )

    def s_left(self, a, mu, i: int = 0, beta: int = 0) -> complex:
        """d^i/da^i d^beta/dmu^beta of S_L(a;mu) = int w_B(x) e^{xa} / (x - mu) dx."""
        i, beta = _order(i), _order(beta)
        mu = complex(mu)
        if mu.imag == 0:
            raise DomainError("s_left needs Im(mu) != 0")

        def compute():
            sd = self.bosonic_profile(a)[1]
            # move x away from the pole; nothing else obstructs a bosonic contour
            shift = -math.copysign(self.contour_shift * sd, mu.imag)
            return self._bosonic_integral(
                a,
                lambda x: x**i * math.factorial(beta) / (x - mu) ** (beta + 1),
                "S_L",
                shift,
                self.pole_rule,
            )

        return self._cached(_key("SL", i, beta, a, mu), compute)

    def s_right(self, lam, b, alpha: int = 0, j: int = 0) -> complex:
        """d^alpha/dlam^alpha d^j/db^j of S_R(lam;b) = int w_F(y) e^{-yb} / (lam - y) dy."""
        alpha, j = _order(alpha), _order(j)
        lam = complex(lam)
        if lam.imag == self.epsilon:
            raise DomainError("lambda lies on the fermionic contour")

        def compute():
            sd = self.fermionic_profile(b)[1]
            step = self.contour_shift * sd
            height = _safe_offset(self.epsilon, 1 if lam.imag < self.epsilon else -1, step, ())
            coeff = (-1) ** alpha * math.factorial(alpha)
            return self._fermionic_integral(
                b,
                lambda y: (-y) ** j * coeff / (lam - y) ** (alpha + 1),
                "S_R",
                height,
                self.pole_rule,
            )

        return self._cached(_key("SR", alpha, j, lam, b), compute)

    # -- the double integral R ----------------------------------------------------
    def _r_grid(self, a, b):
        def compute():
            xs = self.bosonic_shift(a)
            yh = self.fermionic_height(b)
            x, wx = self.bosonic_nodes(a, xs)
            y, wy = self.fermionic_nodes(b, yh)
            gx = wx * complex_exp(self.log_wb(x) + x * a)
            gy = wy * complex_exp(self.log_wf(y) - y * b)
            if self.check_tails:
                _check_tail(gx, "R (x marginal)")
                _check_tail(gy, "R (y marginal)")
            kern = 1.0 / (x[:, None] - y[None, :])
            return x, y, gx, gy, kern

        return self._cached(_key("Rgrid", a, b), compute)

    def r(self, i: int, j: int, a, b) -> complex:
        """R^{(i,j)}(a;b) = int int x^i (-y)^j w_B(x) w_F(y) e^{xa - yb} / (x - y)."""
        i, j = _order(i), _order(j)

        def compute():
            x, y, gx, gy, kern = self._r_grid(a, b)
            return complex((gx * x**i) @ kern @ (gy * (-y) ** j))

        return self._cached(_key("R", i, j, a, b), compute)


def _safe_offset(start, direction, step, obstacles):
    """start + direction*d with d <= step, stopping halfway before any obstacle."""
    d = step
    for o in obstacles:
        gap = (o - start) * direction
        if gap > 0:
            d = min(d, 0.5 * gap)
    return start + direction * max(d, 0.0)


def _order(k):
    k = int(k)
    if k < 0:
        raise DomainError("derivative order must be nonnegative")
    return k


# -- public function-style API ---------------------------------------------------

def p_func(k: int, lam, alpha: int = 0) -> complex:
    """d^alpha/dlam^alpha of lam**k."""
    k, alpha = _order(k), _order(alpha)
    if alpha > k:
        return 0j
    return math.factorial(k) // math.factorial(k - alpha) * complex(lam) ** (k - alpha)


def q_func(kern: AuxKernels, k: int, a) -> complex:
    return kern.q(k, a)


def r_func(kern: AuxKernels, i: int, j: int, a, b) -> complex:
    return kern.r(i, j, a, b)


def s_left(kern: AuxKernels, a, mu, i: int = 0, beta: int = 0) -> complex:
    return kern.s_left(a, mu, i, beta)


def s_right(kern: AuxKernels, lam, b, alpha: int = 0, j: int = 0) -> complex:
    return kern.s_right(lam, b, alpha, j)


def r_tilde(lam, mu, alpha: int = 0, beta: int = 0) -> complex:
    """d^alpha/dlam^alpha d^beta/dmu^beta of 1/(lam - mu)."""
    alpha, beta = _order(alpha), _order(beta)
    d = complex(lam) - complex(mu)
    if d == 0:
        raise DomainError("r_tilde: lambda equals mu")
    return (-1) ** alpha * math.factorial(alpha + beta) / d ** (alpha + beta + 1)


def weighted_kernels(kern: AuxKernels, name: str, *args, sign: int = 1) -> complex:
    """Auxiliary functions of the weighted correlator Phi.

    ``name`` is one of P, Q, R, Rt, SL, SR with the same arguments as the plain
    functions (P: k, lam; Q: k, a; R: a, b; Rt: lam, mu; SL: a, mu; SR: lam, b).
    The factor exp(+W(mu)/hbar) of the formal model is the fermionic weight of the
    active scheme.  ``sign=-1`` selects the lower-sign variants of P and Q, which
    carry fermionic weights and the kernel exp(-x*a).
    """
    if sign not in (1, -1):
        raise DomainError("sign must be +1 or -1")
    if name == "P":
        k, lam = args
        w = kern.wb(lam) if sign > 0 else kern.wf(lam)
        return p_func(k, lam) * w
    if name == "Q":
        k, a = args
        if sign > 0:
            return kern.q(k, a)
        # int x^k w_F(x) e^{-xa} dx = (-1)^k * int (-x)^k ...
        return (-1) ** k * kern.q_fermionic(k, a)
    if name == "R":
        a, b = args
        return kern.r(0, 0, a, b)
    if name == "Rt":
        lam, mu = args
        return r_tilde(lam, mu) * kern.wb(lam) * kern.wf(mu)
    if name == "SL":
        a, mu = args
        return kern.s_left(a, mu) * kern.wf(mu)
    if name == "SR":
        lam, b = args
        return kern.s_right(lam, b) * kern.wb(lam)
    raise DomainError(f"unknown kernel {name!r}")


def weighted_sign(N: int, M: int, p: int, q: int) -> int:
    """Upper sign when the monomial block sits on the bosonic side (N+p >= M+q)."""
    return 1 if N + p >= M + q else -1


# -- Gaussian closed forms (W = x^2/2, flip-sign, epsilon -> 0+) -----------------

def gaussian_moment(k: int, mean, var) -> complex:
    """E[X^k] for X ~ Normal(mean, var) (complex mean allowed)."""
    m_prev, m = 0j, 1.0 + 0j
    for n in range(k):
        m_prev, m = m, mean * m + n * var * m_prev
    return m


def gaussian_q(k: int, a, hbar: float = 1.0) -> complex:
    a = complex(a)
    return math.sqrt(2 * math.pi * hbar) * np.exp(hbar * a * a / 2) * gaussian_moment(k, hbar * a, hbar)


def gaussian_r(a, b, hbar: float = 1.0) -> complex:
    a, b = complex(a), complex(b)
    return (
        1j * math.pi**1.5 * math.sqrt(hbar)
        * np.exp(hbar * (a * a + b * b) / 2)
        * wofz(-math.sqrt(hbar) * (a + b) / 2)
    )


def gaussian_s_left(a, mu, hbar: float = 1.0) -> complex:
    a, mu = complex(a), complex(mu)
    z = (mu - hbar * a) / math.sqrt(2 * hbar)
    pref = np.exp(hbar * a * a / 2)
    if mu.imag > 0:
        return 1j * math.pi * pref * wofz(z)
    return -1j * math.pi * pref * wofz(-z)


def gaussian_s_right(lam, b, hbar: float = 1.0) -> complex:
    """Valid when Im(lam) lies below the fermionic contour."""
    lam, b = complex(lam), complex(b)
    return 1j * math.pi * np.exp(hbar * b * b / 2) * wofz(-(lam + hbar * b) / math.sqrt(2 * hbar))
