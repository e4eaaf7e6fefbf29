"""Source / characteristic-polynomial duality and the Fourier web of kernels."""
from __future__ import annotations

import warnings
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np
from scipy import integrate

from . import detkit
from .model import ChPolySpec, DomainError, Potential, SourceSpec, UnsupportedError, WeightScheme
from .partition import psi, psi_spec
from .quad import AuxKernels, p_func, r_tilde


@dataclass
class DualityReport:
    lhs: complex
    rhs: complex
    sign: int
    residual: float
    extra: dict = field(default_factory=dict)


def _report(lhs, rhs, sign=1, **extra) -> DualityReport:
    lhs, rhs = complex(lhs), complex(rhs)
    scale = max(abs(lhs), abs(rhs))
    res = abs(lhs - sign * rhs) / scale if scale > 0 else 0.0
    return DualityReport(lhs, rhs, sign, float(res), extra)


# -- transpose duality -------------------------------------------------------------

def check_transpose_duality(kern: AuxKernels, src: SourceSpec, ch: ChPolySpec) -> DualityReport:
    """Same determinant with the (a | lam) columns and (b | mu) rows swapped.

    Moving p columns past N and q rows past M gives the sign (-1)^{Np+Mq}.
    """
    spec = psi_spec(kern, src, ch)
    m = spec.matrix()
    N, M, p, q = src.N, src.M, ch.p, ch.q
    K = N + p - M - q
    cols = list(range(N, N + p)) + list(range(N))
    rows = list(range(K)) + list(range(K + M, K + M + q)) + list(range(K, K + M))
    lhs = detkit.det(m)
    rhs = detkit.det(m[np.ix_(rows, cols)])
    sign = -1 if (N * p + M * q) % 2 else 1
    return _report(lhs, rhs, sign)


# -- Gaussian self-duality -------------------------------------------------------

def dual_arguments(src: SourceSpec, ch: ChPolySpec, hbar: float):
    """Arguments of the dual correlator in the unit-coupling Gaussian model.

    Rescaling to unit coupling, the bosonic pair (a, lam) is exchanged with a
    rotation by i and the fermionic pair (b, mu) with a reflection.
    """
    r = np.sqrt(hbar)
    dsrc = SourceSpec(tuple(1j * l / r for l in ch.lam), tuple(-m / r for m in ch.mu))
    dch = ChPolySpec(tuple(1j * a * r for a in src.a), tuple(-b * r for b in src.b))
    return dsrc, dch


def _normalized(kern: AuxKernels, src: SourceSpec, ch: ChPolySpec) -> complex:
    # strip the source Gaussians exp(hbar*s^2/2) that every source contributes
    h = kern.potential.hbar
    s2 = sum(a * a for a in src.a) + sum(b * b for b in src.b)
    return psi(kern, src, ch).value * np.exp(-h * s2 / 2)


def _gaussian_pair(src: SourceSpec, ch: ChPolySpec, hbar: float, epsilon: float):
    scheme = WeightScheme(epsilon=epsilon)
    k = AuxKernels(Potential.gaussian(hbar), scheme)
    k1 = AuxKernels(Potential.gaussian(1.0), scheme)
    dsrc, dch = dual_arguments(src, ch, hbar)
    return _normalized(k, src, ch), _normalized(k1, dsrc, dch)


def reference_point(N: int, M: int, p: int, q: int):
    """Fixed calibration point per size tuple (upper-half-plane mu, lower-half-plane b)."""
    a = tuple(0.15 + 0.2 * i for i in range(N))
    b = tuple(-0.1 - 0.2 * j - 0.6j for j in range(M))
    lam = tuple(0.45 - 0.25 * i for i in range(p))
    mu = tuple(0.05 + 0.2 * j + 0.7j for j in range(q))
    return a, b, lam, mu


@lru_cache(maxsize=None)
def calibration_constant(N: int, M: int, p: int, q: int, hbar: float = 1.0, epsilon: float = 1e-3) -> complex:
    a, b, lam, mu = reference_point(N, M, p, q)
    lhs, rhs = _gaussian_pair(SourceSpec(a, b), ChPolySpec(lam, mu), hbar, epsilon)
    if rhs == 0:
        raise DomainError("dual correlator vanishes at the calibration point")
    return complex(lhs / rhs)


def check_gaussian_self_duality(N, M, p, q, a, b, lam, mu, potential: Potential = None,
                                scheme: WeightScheme = None) -> DualityReport:
    """Psi_{N,M;p,q}(a,b;lam,mu) against the dual Psi_{p,q;N,M} at the dual arguments.

    Each side is divided by its source Gaussians; the remaining constant is
    calibrated once per size tuple at :func:`reference_point`.
    """
    potential = potential or Potential.gaussian()
    scheme = scheme or WeightScheme()
    if not potential.is_gaussian:
        raise UnsupportedError("self-duality check needs the Gaussian potential")
    if scheme.mode.value != "flip-sign":
        raise UnsupportedError("self-duality check needs the flip-sign scheme")
    src, ch = SourceSpec(a, b), ChPolySpec(lam, mu)
    if (src.N, src.M, ch.p, ch.q) != (N, M, p, q):
        raise DomainError("argument lengths do not match (N, M, p, q)")
    if N + M + p + q == 0:
        return _report(1.0, 1.0, 1, constant=1.0)
    c = calibration_constant(N, M, p, q, potential.hbar, scheme.epsilon)
    lhs, rhs = _gaussian_pair(src, ch, potential.hbar, scheme.epsilon)
    return _report(lhs, c * rhs, 1, constant=c)


# -- Fourier web ----------------------------------------------------------------------

SPAN = 14.0  # integration half-width in units of the weight width


def _cquad(f, lo, hi) -> complex:
    opts = dict(limit=400, epsabs=1e-14, epsrel=1e-11)
    with warnings.catch_warnings():
        # QUADPACK flags roundoff once it reaches machine precision; harmless here
        warnings.simplefilter("ignore", integrate.IntegrationWarning)
        re = integrate.quad(lambda t: np.real(f(t)), lo, hi, **opts)[0]
        im = integrate.quad(lambda t: np.imag(f(t)), lo, hi, **opts)[0]
    return complex(re, im)


def _laplace_real(kern: AuxKernels, g, a) -> complex:
    """int over real lam of e^{lam a} g(lam), centered on the bosonic weight."""
    c, sd = kern.bosonic_profile(a)
    return _cquad(lambda l: np.exp(l * a) * g(l), c - SPAN * sd, c + SPAN * sd)


def _laplace_fermionic(kern: AuxKernels, g, b, pole=None) -> complex:
    """int over mu on R + i*eps of e^{-mu b} g(mu), times 1/(pole - mu) if a pole is given.

    A pole close to the contour is handled by subtracting g at the pole and
    integrating 1/(pole - mu) in closed form.
    """
    c, sd = kern.fermionic_profile(b)
    eps = kern.epsilon
    lo, hi = c - SPAN * sd, c + SPAN * sd

    def h(m):
        return np.exp(-m * b) * g(m)

    if pole is None:
        return _cquad(lambda t: h(t + 1j * eps), lo, hi)
    pole = complex(pole)
    hp = h(pole)
    t0 = pole - 1j * eps  # pole in the real-t coordinate
    smooth = _cquad(lambda t: (h(t + 1j * eps) - hp) / (t0 - t), lo, hi)
    # int_lo^hi dt/(t0 - t); t0 - t never crosses the branch cut as Im t0 != 0
    return smooth + hp * (np.log(t0 - lo) - np.log(t0 - hi))


def arrow_rt_to_sl(kern, a, mu) -> DualityReport:
    """FT_lam of R~(lam;mu) w_B(lam) w_F(mu) = S_L(a;mu) w_F(mu)."""
    wmu = kern.wf(mu)
    lhs = _laplace_real(kern, lambda l: r_tilde(l, mu) * kern.wb(l) * wmu, a)
    return _report(lhs, kern.s_left(a, mu) * wmu, arrow="Rt->SL")


def arrow_rt_to_sr(kern, lam, b) -> DualityReport:
    """FT_mu (kernel e^{-mu b}) of R~(lam;mu) w_B(lam) w_F(mu) = S_R(lam;b) w_B(lam)."""
    wl = kern.wb(lam)
    if complex(lam).imag == kern.epsilon:
        raise DomainError("lambda lies on the fermionic contour")
    lhs = _laplace_fermionic(kern, lambda m: wl * kern.wf(m), b, pole=lam)
    return _report(lhs, kern.s_right(lam, b) * wl, arrow="Rt->SR")


def arrow_sr_to_r(kern, a, b) -> DualityReport:
    """FT_lam of S_R(lam;b) w_B(lam) = R(a;b)."""
    lhs = _laplace_real(kern, lambda l: kern.s_right(l, b) * kern.wb(l), a)
    return _report(lhs, kern.r(0, 0, a, b), arrow="SR->R")


def arrow_p_to_q(kern, k, a) -> DualityReport:
    """FT_lam of P_k(lam) w_B(lam) = Q_k(a)."""
    lhs = _laplace_real(kern, lambda l: p_func(k, l) * kern.wb(l), a)
    return _report(lhs, kern.q(k, a), arrow="P->Q")


def arrow_composed(kern, a, b) -> DualityReport:
    """R~ -> S_L -> R: FT_mu of S_L(a;mu) w_F(mu) over the fermionic contour equals R(a;b)."""
    lhs = _laplace_fermionic(kern, lambda m: kern.s_left(a, m) * kern.wf(m), b)
    return _report(lhs, kern.r(0, 0, a, b), arrow="Rt->SL->R")


def check_fourier_web(kern: AuxKernels, samples: int = 10, seed: int = 0, composed: bool = True) -> list:
    """Residual reports for every arrow on seeded argument tuples."""
    rng = np.random.default_rng(seed)
    out = []
    for _ in range(samples):
        a, b, lam = rng.uniform(-0.5, 0.5, 3)
        mu = complex(rng.uniform(-0.5, 0.5), rng.choice([-1, 1]) * rng.uniform(0.5, 1.5))
        k = int(rng.integers(0, 4))
        out.append(arrow_rt_to_sl(kern, a, mu))
        out.append(arrow_rt_to_sr(kern, lam, b))
        out.append(arrow_sr_to_r(kern, a, b))
        out.append(arrow_p_to_q(kern, k, a))
        if composed:
            out.append(arrow_composed(kern, a, b))
    return out
