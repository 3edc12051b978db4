"""Hurwitz-type spectral zeta functions xi(s, z) = sum_rho (s - rho)^(-z).

Three independent evaluation paths:

* ``xi_direct``: the defining series for Re z > 1, summed over |Im rho| <= K
  with an Euler-Maclaurin correction for the discarded tails;
* ``xi_continued``: Mellin transform of the theta series of the eigenvalues
  beyond a cutoff T, split at t = 1, with the small-t asymptotic expansion
  integrated in closed form; valid for all z except the pole z = 1;
* ``xi_hurwitz``: reduction of every progression to two Hurwitz zeta values.

Powers use the branch w^(-z) = |w|^(-z) exp(-i z Arg w), -pi < Arg w <= pi.
"""
from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .errors import DomainError, PoleError
from .orbits import MappingTorusModel, topological_entropy
from .spectra import (
    HalfProgression,
    SpectrumSet,
    default_cutoff,
    model_spectra,
    truncate,
)
from .specfun import (
    EULER_GAMMA,
    _EM_COEF,
    _adaptive,
    bernoulli_numbers,
    hurwitz_zeta,
    integrate_ray,
    pochhammer,
    principal_log,
    principal_power,
    rgamma,
)

PATHS = ("direct_series", "theta_continuation", "hurwitz_closed_form")
DEFAULT_ORDER = 8
_SERIES_TERMS = 48
_QUAD_TOL = 1e-14
_QUAD_REL = 1e-13
SINGULAR_DISTANCE = 1e-6


@dataclass(frozen=True)
class XiEvaluation:
    value: complex
    error_bound: float
    path: str
    s: complex
    z: complex

    def __post_init__(self):
        if self.path not in PATHS:
            raise ValueError(f"unknown path {self.path!r}")
        if not self.error_bound >= 0:
            raise ValueError("error_bound must be non-negative")


@dataclass(frozen=True)
class AsymptoticExpansion:
    """V(t) ~ a/t + sum_k b[k] t^k + sum_k c[k] t^(2k+1) log t as t -> 0.

    For arithmetic-progression spectra every integer power appears in b and
    the log coefficients c vanish.
    """
    a: complex
    b: tuple[complex, ...]
    c: tuple[complex, ...]
    order: int


# ---------------------------------------------------------------------------
# small-t expansion of e^{ct} / (1 - e^{-sigma t})
# ---------------------------------------------------------------------------

@lru_cache(maxsize=None)
def _bernoulli_plus_over_factorial(m: int) -> tuple[float, ...]:
    # B_n^+ / n!, B_1^+ = +1/2: Laurent coefficients of x/(1 - e^{-x})
    bs = bernoulli_numbers(m)
    out = [float(b / math.factorial(n)) for n, b in enumerate(bs)]
    if m >= 1:
        out[1] = 0.5
    return tuple(out)


def _expansion(c: complex, spacing: float, isolated: bool, m: int) -> tuple[complex, np.ndarray]:
    """(a, beta) with e^{ct} g(t) = a/t + sum_{k=0}^{m} beta_k t^k + ...

    g(t) = 1/(1 - e^{-spacing t}), or g = 1 for an isolated eigenvalue.
    """
    ex = np.empty(m + 2, dtype=complex)
    ex[0] = 1.0
    for j in range(1, m + 2):
        ex[j] = ex[j - 1] * c / j
    if isolated:
        return 0j, ex[: m + 1].copy()
    bp = _bernoulli_plus_over_factorial(m + 1)
    # g(t) = sum_{n>=0} bp[n] spacing^(n-1) t^(n-1)
    gcoef = np.array([bp[n] * spacing ** (n - 1) for n in range(m + 2)])
    beta = np.empty(m + 1, dtype=complex)
    for k in range(m + 1):
        # coefficient of t^k: sum_j ex[j] * gcoef[k - j + 1]
        beta[k] = np.dot(ex[: k + 2], gcoef[k + 1::-1][: k + 2])
    return complex(gcoef[0]), beta


class _HalfTail:
    """Theta function and Mellin pieces for one half-progression."""

    def __init__(self, hp: HalfProgression, s: complex, order: int):
        self.hp = hp
        self.order = order
        self.direction = hp.direction
        self.c = hp.direction * 1j * (hp.first - s)
        self.decay = -self.c.real
        if not self.decay > 0:
            raise DomainError("theta series does not decay; raise the cutoff T")
        self.a, beta = _expansion(self.c, hp.spacing, hp.isolated, _SERIES_TERMS)
        self.beta = beta[: order + 1]
        self.beta_rest = beta[order + 1:]
        # split point of the Mellin integral; pulled below 1 when |c| is large
        # so that beta_k t0^k stays O(1) and the pieces do not cancel
        self.t0 = min(1.0, 4.0 / max(abs(self.c), 1e-300))
        t_s = 6.0 / max(abs(self.c), 1e-300)
        if not hp.isolated:
            t_s = min(t_s, 2.0 / hp.spacing)
        self.t_series = min(self.t0, t_s)

    def theta(self, t):
        t = np.asarray(t, dtype=float)
        e = np.exp(self.c * t)
        if self.hp.isolated:
            return e
        return e / (-np.expm1(-self.hp.spacing * t))

    def remainder(self, t):
        """theta(t) - a/t - sum_{k<=order} beta_k t^k."""
        t = np.asarray(t, dtype=float)
        out = np.empty(t.shape, dtype=complex)
        small = t < self.t_series
        if np.any(small):
            ts = t[small]
            acc = np.zeros(ts.shape, dtype=complex)
            # Horner on the tail coefficients, then shift by t^(order+1)
            for b in self.beta_rest[::-1]:
                acc = acc * ts + b
            out[small] = acc * ts ** (self.order + 1)
        big = ~small
        if np.any(big):
            tb = t[big]
            poly = np.zeros(tb.shape, dtype=complex)
            for b in self.beta[::-1]:
                poly = poly * tb + b
            out[big] = self.theta(tb) - self.a / tb - poly
        return out

    def mellin_remainder(self, z: complex, tol: float):
        """J(z) = int_0^t0 R(t) t^(z-1) dt + int_t0^inf theta(t) t^(z-1) dt."""
        if z.real <= -(self.order + 1):
            raise DomainError(f"asymptotic order {self.order} too low for Re z = {z.real}")
        zm1 = z - 1.0
        head = _adaptive(lambda t: self.remainder(t) * np.exp(zm1 * np.log(t)), 0.0, self.t0,
                         tol, _QUAD_REL, 4000)
        tail = integrate_ray(lambda t: self.theta(t) * np.exp(zm1 * np.log(t)), self.t0, math.inf,
                             tol, rel_tol=_QUAD_REL, decay_rate=self.decay)
        return head.value + tail.value, head.error_estimate + tail.error_estimate

    def xi(self, z: complex, tol: float) -> tuple[complex, float]:
        """Contribution of this half-progression to xi(s, z), and an error bound."""
        if z == 1 and not self.hp.isolated:
            raise PoleError("xi has a pole at z = 1")
        pref = cmath.exp(self.direction * 0.5j * math.pi * z) * self.hp.multiplicity
        rg = rgamma(z)
        acc = 0j
        lt0 = math.log(self.t0)
        if not self.hp.isolated:
            acc += self.a * rg * cmath.exp((z - 1.0) * lt0) / (z - 1.0)
        for k, b in enumerate(self.beta):
            acc += b * pochhammer(z, k) * rgamma(z + k + 1) * cmath.exp((z + k) * lt0)
        err = 0.0
        if rg != 0:
            j, err = self.mellin_remainder(z, tol)
            acc += rg * j
            err *= abs(rg)
        return pref * acc, abs(pref) * err

    def value_at_zero(self) -> complex:
        return self.hp.multiplicity * self.beta[0]

    def derivative_at_zero(self, tol: float) -> tuple[complex, float]:
        # d/dz at 0 of e^{+-i pi z/2} [a rg(z) t0^(z-1)/(z-1)
        #   + sum beta_k (z)_k rg(z+k+1) t0^(z+k) + rg(z) J(z)], using rg'(0) = 1
        j, err = self.mellin_remainder(0j, tol)
        t0 = self.t0
        d = -self.a / t0 + self.beta[0] * (EULER_GAMMA + math.log(t0)) + j
        d += sum(self.beta[k] * t0 ** k / k for k in range(1, len(self.beta)))
        d += self.direction * 0.5j * math.pi * self.beta[0]
        return self.hp.multiplicity * d, self.hp.multiplicity * err


def _check_off_spectrum(elements, s: complex):
    for r, _ in elements:
        if abs(s - r) < SINGULAR_DISTANCE:
            raise DomainError(f"s = {s} lies on (or within 1e-6 of) the eigenvalue {r}")


def _tails(spec: SpectrumSet, s: complex, T: float | None, order: int):
    s = complex(s)
    if T is None:
        T = default_cutoff(spec, s)
    if not abs(s.imag) < T:
        raise DomainError(f"|Im s| = {abs(s.imag)} must be below the cutoff T = {T}")
    below, upper, lower = truncate(spec, T)
    _check_off_spectrum(below.elements, s)
    tails = [_HalfTail(hp, s, order) for hp in upper + lower]
    return below, tails, T


# ---------------------------------------------------------------------------
# public operations
# ---------------------------------------------------------------------------

def theta_series_V(spec: SpectrumSet, T: float, t: float, *, lower: bool = False) -> complex:
    """V(t) = sum_{Im rho > T} exp(i rho t), in closed form per progression.

    With ``lower=True`` the mirror series sum_{Im rho < -T} exp(-i rho t).
    """
    if not t > 0:
        raise DomainError("t must be positive")
    _, upper, low = truncate(spec, T)
    out = 0j
    for hp in (low if lower else upper):
        e = cmath.exp(hp.direction * 1j * hp.first * t)
        if not hp.isolated:
            e /= -math.expm1(-hp.spacing * t)
        out += hp.multiplicity * e
    return out


def asymptotic_coefficients(spec: SpectrumSet, T: float, N: int = DEFAULT_ORDER) -> AsymptoticExpansion:
    """Small-t expansion of V(t): a = sum mult/spacing, b from Bernoulli numbers."""
    if not 0 <= N <= 16:
        raise DomainError("order N must lie in [0, 16]")
    _, upper, _ = truncate(spec, T)
    a = 0j
    b = np.zeros(N + 1, dtype=complex)
    for hp in upper:
        ai, beta = _expansion(1j * hp.first, hp.spacing, hp.isolated, N)
        a += hp.multiplicity * ai
        b += hp.multiplicity * beta
    return AsymptoticExpansion(a, tuple(complex(x) for x in b), (0j,) * (N + 1), N)


def xi_direct(spec: SpectrumSet, s: complex, z: complex, K: float | None = None, *,
              margin: float = 0.5, tail: str = "euler-maclaurin") -> XiEvaluation:
    """Defining series over |Im rho| <= K plus tail handling.

    ``tail="euler-maclaurin"`` adds the Euler-Maclaurin sum of the discarded
    tails (8 Bernoulli terms) and bounds the error by the next term;
    ``tail="none"`` returns the bare partial sum with an integral bound on
    the tails.
    """
    s = complex(s)
    z = complex(z)
    if z.real < 1.0 + margin:
        raise DomainError(f"direct series needs Re z >= {1 + margin}")
    if tail not in ("euler-maclaurin", "none"):
        raise ValueError(f"unknown tail mode {tail!r}")
    if K is None:
        K = abs(s.imag) + 1.0 + max([0.0] + [abs(p.base.imag) for p in spec.progressions])
        K += 200.0 * max([0.0] + [p.spacing for p in spec.progressions])
    if K <= abs(s.imag):
        raise DomainError("cutoff K must exceed |Im s|")
    _check_off_spectrum(spec.extras, s)
    total = 0j
    err = 0.0
    if spec.extras:
        rs = np.array([r for r, _ in spec.extras])
        ms = np.array([m for _, m in spec.extras])
        total += complex(np.sum(ms * principal_power(s - rs, z)))
    for p in spec.progressions:
        k_lo = math.ceil((-K - p.base.imag) / p.spacing)
        k_hi = math.floor((K - p.base.imag) / p.spacing)
        ks = np.arange(k_lo, k_hi + 1)
        w = s - p.base
        terms = w - 1j * p.spacing * ks
        if np.any(np.abs(terms) < SINGULAR_DISTANCE):
            raise DomainError(f"s = {s} lies on the spectrum")
        total += p.multiplicity * complex(np.sum(principal_power(terms, z)))
        for k0, B in ((k_hi + 1, -1j * p.spacing), (1 - k_lo, 1j * p.spacing)):
            x0 = w + B * k0
            if tail == "none":
                dist = max(abs(x0) - 0.0, 1e-300)
                bound = abs(principal_power(x0, z)) + dist ** (1 - z.real) / ((z.real - 1) * p.spacing)
                err += p.multiplicity * bound
                continue
            v, e = _em_tail(x0, B, z)
            total += p.multiplicity * v
            err += p.multiplicity * e
    return XiEvaluation(total, err, "direct_series", s, z)


def _em_tail(x0: complex, B: complex, z: complex) -> tuple[complex, float]:
    """sum_{j>=0} (x0 + B j)^(-z) by Euler-Maclaurin, with an error bound."""
    logx = complex(principal_log(x0))
    f0 = cmath.exp(-z * logx)
    out = -x0 * f0 / ((1.0 - z) * B) + 0.5 * f0
    # f^(m)(0) = (-1)^m (z)_m B^m x0^(-z-m); odd m = 2j-1 gives -(z)_m B^m ...
    poch = z
    bpow = B
    xpow = f0 / x0
    nxt = 0.0
    for j in range(1, len(_EM_COEF) + 1):
        deriv = -poch * bpow * xpow
        term = -_EM_COEF[j - 1] * deriv
        out += term
        nxt = abs(term)
        poch *= (z + 2 * j - 1) * (z + 2 * j)
        bpow *= B * B
        xpow /= x0 * x0
    # the last included term bounds the remainder once terms are decreasing
    return out, nxt + 1e-16 * abs(out)


def xi_continued(spec: SpectrumSet, s: complex, z: complex, T: float | None = None, *,
                 order: int = DEFAULT_ORDER, tol: float = _QUAD_TOL) -> XiEvaluation:
    """Meromorphic continuation in z through the theta-series Mellin transform.

    finite part  sum_{|Im rho| <= T} (s - rho)^(-z)
    + for each tail beyond T: e^{+-i pi z/2}/Gamma(z) * [a t0^(z-1)/(z-1)
      + sum_k beta_k t0^(z+k)/(z+k) + int_0^t0 (theta - expansion) t^(z-1) dt
      + int_t0^inf theta t^(z-1) dt].

    The split point t0 is 1 unless the tail's exponential rate |c| exceeds 4,
    in which case t0 = 4/|c|.
    """
    s = complex(s)
    z = complex(z)
    below, tails, _ = _tails(spec, s, T, order)
    total = 0j
    err = 0.0
    if below.elements:
        rs = np.array([r for r, _ in below.elements])
        ms = np.array([m for _, m in below.elements])
        total += complex(np.sum(ms * principal_power(s - rs, z)))
    for tl in tails:
        v, e = tl.xi(z, tol)
        total += v
        err += e
    return XiEvaluation(total, err, "theta_continuation", s, z)


def xi_plus(spec: SpectrumSet, s: complex, z: complex, T: float | None = None, *,
            order: int = DEFAULT_ORDER, tol: float = _QUAD_TOL) -> complex:
    """The component sum_{Im rho > T} (s - rho)^(-z), continued in z.

    Has the simple pole a*i/(z-1) at z = 1.
    """
    _, tails, _ = _tails(spec, complex(s), T, order)
    return sum((tl.xi(complex(z), tol)[0] for tl in tails if tl.direction > 0), 0j)


def xi_hurwitz(spec: SpectrumSet, s: complex, z: complex) -> XiEvaluation:
    """Closed form through Hurwitz zeta values.

    For a progression with w = s - base and q = i w/spacing the upper tail is
    spacing^(-z) e^{i pi z/2} zeta_H(z, q + k+) and the lower one
    spacing^(-z) e^{-i pi z/2} zeta_H(z, k- - q); the shifts k+, k- make
    both Hurwitz parameters have positive real part, and the finitely many
    terms between them are summed directly.
    """
    s = complex(s)
    z = complex(z)
    _check_off_spectrum(spec.extras, s)
    total = 0j
    for r, m in spec.extras:
        total += m * principal_power(s - r, z)
    for p in spec.progressions:
        w = s - p.base
        q = 1j * w / p.spacing
        kp = math.floor(-q.real) + 1
        km = math.floor(q.real) + 1
        ks = np.arange(-(km - 1), kp)
        mids = w - 1j * p.spacing * ks
        if np.any(np.abs(mids) < SINGULAR_DISTANCE):
            raise DomainError(f"s = {s} lies on the spectrum")
        acc = complex(np.sum(principal_power(mids, z))) if len(ks) else 0j
        scale = p.spacing ** (-z)
        acc += scale * cmath.exp(0.5j * math.pi * z) * hurwitz_zeta(z, q + kp)
        acc += scale * cmath.exp(-0.5j * math.pi * z) * hurwitz_zeta(z, km - q)
        total += p.multiplicity * acc
    return XiEvaluation(complex(total), 1e-12 * abs(total), "hurwitz_closed_form", s, z)


def xi_at_zero(spec: SpectrumSet, s: complex, T: float | None = None) -> complex:
    """xi(s, 0); zero for any spectrum made only of full progressions."""
    below, tails, _ = _tails(spec, complex(s), T, DEFAULT_ORDER)
    return sum(m for _, m in below.elements) + sum((tl.value_at_zero() for tl in tails), 0j)


def xi_derivative_at_zero(spec: SpectrumSet, s: complex, T: float | None = None, *,
                          order: int = DEFAULT_ORDER, tol: float = _QUAD_TOL) -> complex:
    """d/dz xi(s, z) at z = 0, from the continued representation.

    Since 1/Gamma(z) vanishes at 0 only J(0) is needed from the quadratures;
    the closed-form terms are differentiated exactly.
    """
    s = complex(s)
    below, tails, _ = _tails(spec, s, T, order)
    d = 0j
    if below.elements:
        rs = np.array([r for r, _ in below.elements])
        ms = np.array([m for _, m in below.elements])
        d -= complex(np.sum(ms * principal_log(s - rs)))
    for tl in tails:
        d += tl.derivative_at_zero(tol)[0]
    return d


def xi_derivative_hurwitz(spec: SpectrumSet, s: complex, h: float = 1e-5) -> complex:
    """Central difference of xi_hurwitz at z = 0 with one Richardson step."""
    def cd(step):
        return (xi_hurwitz(spec, s, step).value - xi_hurwitz(spec, s, -step).value) / (2 * step)

    return (4.0 * cd(h / 2) - cd(h)) / 3.0


def det_infinity(spec: SpectrumSet, s: complex, *, normalized: bool = False,
                 T: float | None = None) -> complex:
    """Zeta-regularised determinant det(s - Theta) = exp(-d/dz xi(s, 0)).

    ``normalized=True`` gives det((s - Theta)/(2 pi)), which differs by the
    factor (2 pi)^(-xi(s, 0)); for full progressions xi(s, 0) = 0.
    """
    s = complex(s)
    if spec.is_empty:
        return 1 + 0j
    out = cmath.exp(-xi_derivative_at_zero(spec, s, T))
    if normalized:
        out *= (2 * math.pi) ** (-xi_at_zero(spec, s, T))
    return out


def det_closed_form(spec: SpectrumSet, s: complex, *, symmetric: bool = False) -> complex:
    """prod_prog (1 - exp(-2 pi (s - base)/spacing))^mult * prod_extras (s - rho)^mult.

    Valid when Re(s - base) > 0 for every progression. ``symmetric=True``
    uses 2 sinh(pi w/spacing) per progression instead, which differs by the
    exponential prefactor exp(pi w/spacing).
    """
    s = complex(s)
    out = 1 + 0j
    for p in spec.progressions:
        w = s - p.base
        if not w.real > 0:
            raise DomainError("closed form needs Re(s - base) > 0")
        x = 2 * math.pi * w / p.spacing
        f = -cmath.exp(-x) + 1
        if symmetric:
            f *= cmath.exp(x / 2)
        out *= f ** p.multiplicity
    for r, m in spec.extras:
        out *= (s - r) ** m
    return out


def singular_points_near(model: MappingTorusModel, s: complex, radius: float = SINGULAR_DISTANCE) -> bool:
    """True when s is within `radius` of a model eigenvalue or of 2 pi i Z/ell."""
    ell = model.return_time
    spacing = 2 * math.pi / ell
    h = math.log(model.leading_eigenvalue) / ell
    for base in (0.0, h, -h):
        k = round((s.imag) / spacing)
        for kk in (k - 1, k, k + 1):
            if abs(s - (base + 1j * spacing * kk)) < radius:
                return True
    return False


def alternating_det_product(model: MappingTorusModel, s: complex, *, normalized: bool = False,
                            symmetric: bool = False, closed_form: bool = False,
                            margin: float = 0.0) -> complex:
    """det(s - Theta | H^1) / (det(s - Theta | H^0) det(s - Theta | H^2)).

    ``closed_form=True`` assembles the closed-form determinants instead of
    the continuation path (``symmetric`` then selects the 2 sinh variant).
    """
    s = complex(s)
    h = topological_entropy(model)
    if not s.real > h + margin:
        raise DomainError(f"Re s = {s.real} must exceed the entropy {h} (+{margin})")
    if singular_points_near(model, s):
        raise DomainError(f"s = {s} is within 1e-6 of a singular point")
    spectra = model_spectra(model)
    if closed_form:
        dets = [det_closed_form(sp, s, symmetric=symmetric) for sp in spectra]
    else:
        dets = [det_infinity(sp, s, normalized=normalized) for sp in spectra]
    return dets[1] / (dets[0] * dets[2])
