"""Trace-formula checks pairing model spectra against closed-orbit data.

Two certificates:

* bump test functions on (0, inf): the alternating spectral sum
  sum_i (-1)^i sum_rho int phi(t) e^{rho t} dt equals the orbit sum
  sum_gamma l(gamma) eps sum_k phi(k l(gamma));
* the Laplace-transformed version at (s, z): Gamma(z) times the alternating
  spectral zeta equals the weighted Dirichlet series over orbit iterates.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from numpy.polynomial import Polynomial

from . import _kernels
from .errors import DomainError, InsufficientDataError
from .orbits import (
    MappingTorusModel,
    OrbitTable,
    det_one_minus_power,
    primitive_orbits,
    topological_entropy,
)
from .spectra import SpectrumSet, enumerate_window, model_spectra
from .specfun import gamma
from .speczeta import xi_direct

TAIL_ORDER = 6
# frequency beyond which the bump's Fourier transform is below ~1e-16, in units of 1/w
_BAND_LIMIT = 1000.0


@dataclass(frozen=True)
class BumpFunction:
    """exp(-1/(1 - u^2)) for |u| < 1, u = (t - center)/half_width."""
    center: float
    half_width: float

    def __post_init__(self):
        if not self.half_width > 0:
            raise DomainError("half_width must be positive")
        if not self.center - self.half_width > 0:
            raise DomainError("bump support must lie in t > 0 (center - half_width > 0)")

    @property
    def support(self) -> tuple[float, float]:
        return self.center - self.half_width, self.center + self.half_width

    def __call__(self, t):
        u = (np.asarray(t, dtype=float) - self.center) / self.half_width
        out = np.zeros(u.shape)
        inside = np.abs(u) < 1
        out[inside] = np.exp(-1.0 / (1.0 - u[inside] ** 2))
        return out if out.ndim else float(out)

    def derivative(self, t, m: int):
        """m-th derivative, via g^(m)(u) = Q_m(u) (1 - u^2)^(-2m) g(u)."""
        w = self.half_width
        u = (np.asarray(t, dtype=float) - self.center) / w
        out = np.zeros(u.shape)
        inside = np.abs(u) < 1
        ui = u[inside]
        q = _bump_polys(m)[m]
        one = 1.0 - ui ** 2
        out[inside] = q(ui) * one ** (-2 * m) * np.exp(-1.0 / one) / w ** m
        return out


@lru_cache(maxsize=None)
def _bump_polys(m: int) -> tuple[Polynomial, ...]:
    u = Polynomial([0.0, 1.0])
    one = 1 - u ** 2
    qs = [Polynomial([1.0])]
    for j in range(m):
        q = qs[-1]
        qs.append(q.deriv() * one ** 2 + 4 * j * u * one * q - 2 * u * q)
    return tuple(qs)


def _nodes(bump: BumpFunction, max_freq: float) -> tuple[np.ndarray, np.ndarray]:
    # trapezoid on the open support; the bump and all its derivatives vanish at
    # both ends, so the rule converges as fast as the Fourier transform decays
    a, b = bump.support
    step = 2 * math.pi / (max_freq + _BAND_LIMIT / bump.half_width)
    n = max(64, int(math.ceil((b - a) / step)))
    t = np.linspace(a, b, n + 1)[1:-1]
    weights = bump(t) * ((b - a) / n)
    return t, weights


def bump_transforms(bump: BumpFunction, rhos) -> np.ndarray:
    """int phi(t) exp(rho t) dt for every rho in `rhos`."""
    rhos = np.atleast_1d(np.asarray(rhos, dtype=complex))
    fmax = float(np.max(np.abs(rhos.imag))) if len(rhos) else 0.0
    t, wts = _nodes(bump, fmax)
    return _kernels.weighted_exp_sums(t, wts, rhos)


def bump_transform(bump: BumpFunction, rho: complex) -> complex:
    return complex(bump_transforms(bump, [rho])[0])


def _derivative_l1(bump: BumpFunction, alpha: float, m: int, n: int = 4001) -> float:
    # || d^m/dt^m (phi(t) e^{alpha t}) ||_1 by Leibniz and a fine trapezoid
    a, b = bump.support
    t = np.linspace(a, b, n)
    e = np.exp(alpha * t)
    acc = np.zeros_like(t)
    for j in range(m + 1):
        acc += math.comb(m, j) * bump.derivative(t, j) * alpha ** (m - j)
    return float(np.trapezoid(np.abs(acc * e), t))


def spectral_tail_estimate(spectra, bump: BumpFunction, K: float, m: int = TAIL_ORDER) -> float:
    """Bound on the eigenvalues with |Im rho| > K, by m-fold integration by parts.

    |int phi e^{rho t}| <= ||(phi e^{Re rho t})^(m)||_1 / |Im rho|^m, summed
    over each progression beyond K (sum_{k > K/sigma} (sigma k)^-m bounded
    by an integral).
    """
    total = 0.0
    for spec in spectra:
        for p in spec.progressions:
            c = _derivative_l1(bump, p.base.real, m)
            first = K - abs(p.base.imag)
            if first <= 0:
                return math.inf
            # both sides: 2 * [first^-m + int_first^inf y^-m dy / sigma]
            total += 2 * p.multiplicity * c * (first ** -m + first ** (1 - m) / ((m - 1) * p.spacing))
    return total


@dataclass(frozen=True)
class TraceCheck:
    bump: BumpFunction
    lhs: complex
    rhs: float
    tail_estimate: float

    @property
    def difference(self) -> float:
        return abs(self.lhs - self.rhs)


def lhs_trace_spectra(spectra, bump: BumpFunction, K: float,
                      tol: float | None = None) -> tuple[complex, float]:
    """Alternating sum over degrees of sum_{|Im rho| <= K} mult * transform."""
    tail = spectral_tail_estimate(spectra, bump, K)
    if tol is not None and tail > tol:
        raise InsufficientDataError(f"tail estimate {tail:.3g} exceeds tolerance {tol:.3g}; raise K")
    total = 0j
    for spec in spectra:
        window = enumerate_window(spec, K)
        if not window:
            continue
        rhos = np.array([r for r, _ in window])
        mult = np.array([m for _, m in window], dtype=float)
        total += (-1) ** spec.degree * complex(np.dot(mult, bump_transforms(bump, rhos)))
    return total, tail


def lhs_trace(model: MappingTorusModel, bump: BumpFunction, K: float,
              tol: float | None = None) -> tuple[complex, float]:
    return lhs_trace_spectra(model_spectra(model), bump, K, tol)


def rhs_orbits(model: MappingTorusModel, bump: BumpFunction, table: OrbitTable | None = None) -> float:
    """sum over orbits and iterates k of count * length * eps * phi(k * length)."""
    a, b = bump.support
    if table is None:
        table = primitive_orbits(model, max(1, math.ceil(b / model.return_time)))
    if table.max_length < b:
        raise InsufficientDataError(f"orbit table reaches length {table.max_length}, bump needs {b}")
    total = 0.0
    for r in table.rows:
        k_lo = max(1, math.floor(a / r.length))
        for k in range(k_lo, math.floor(b / r.length) + 1):
            x = k * r.length
            if a < x < b:
                total += r.count * r.length * r.index * bump(x)
    return total


def trace_check(model: MappingTorusModel, bump: BumpFunction, K: float) -> TraceCheck:
    lhs, tail = lhs_trace(model, bump, K)
    return TraceCheck(bump, lhs, rhs_orbits(model, bump), tail)


@dataclass(frozen=True)
class LaplaceCheck:
    s: complex
    z: complex
    lhs: complex
    rhs: complex
    lhs_error: float
    tail_bound: float

    @property
    def difference(self) -> float:
        return abs(self.lhs - self.rhs)


def laplace_lhs(spectra, s: complex, z: complex) -> tuple[complex, float]:
    """Gamma(z) * sum_i (-1)^i xi_i(s, z) via the direct series."""
    g = gamma(z)
    total = 0j
    err = 0.0
    for spec in spectra:
        if spec.is_empty:
            continue
        ev = xi_direct(spec, s, z)
        total += (-1) ** spec.degree * ev.value
        err += ev.error_bound
    return g * total, abs(g) * err


def laplace_rhs(table: OrbitTable, s: complex, z: complex, L: float) -> complex:
    """sum_gamma sum_n l eps exp(-n l s) (n l)^(z-1) over iterates with n l <= L."""
    if table.max_length < L - 1e-12:
        raise InsufficientDataError(f"orbit table reaches length {table.max_length}, need {L}")
    total = 0j
    for r in table.rows:
        if r.length > L:
            break
        n = np.arange(1, int(math.floor(L / r.length + 1e-12)) + 1)
        x = n * r.length
        total += r.count * r.length * r.index * complex(np.sum(np.exp(-s * x + (z - 1) * np.log(x))))
    return total


def _laplace_tail(model: MappingTorusModel, s: complex, z: complex, L: float) -> float:
    # iterate m of the map contributes |det(I - A^m)| ell |e^{-s m ell}| (m ell)^(Re z - 1)
    ell = model.return_time
    h = topological_entropy(model)
    n = math.floor(L / ell) + 1
    first = abs(det_one_minus_power(model, n)) * ell * math.exp(-s.real * n * ell) * (n * ell) ** (z.real - 1)
    r = math.exp(-(s.real - h) * ell) * ((n + 1) / n) ** max(z.real - 1, 0.0)
    if r >= 1:
        return math.inf
    return 2.0 * first / (1.0 - r)


def laplace_identity_check(model: MappingTorusModel, s: complex, z: complex, L: float = 60.0,
                           table: OrbitTable | None = None) -> LaplaceCheck:
    s, z = complex(s), complex(z)
    if not z.real > 1:
        raise DomainError("Laplace identity needs Re z > 1")
    if not s.real > topological_entropy(model):
        raise DomainError("Laplace identity needs Re s above the entropy")
    if table is None:
        table = primitive_orbits(model, math.floor(L / model.return_time + 1e-12))
    lhs, err = laplace_lhs(model_spectra(model), s, z)
    rhs = laplace_rhs(table, s, z, L)
    return LaplaceCheck(s, z, lhs, rhs, err, _laplace_tail(model, s, z, L))
