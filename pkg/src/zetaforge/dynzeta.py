"""Dynamical zeta function of the suspension flow.

zeta(s) = prod_gamma (1 - exp(-s l(gamma)))^(-eps_gamma) over primitive
closed orbits, together with a closed rational form in x = exp(-s ell) that
serves as an independent oracle.
"""
from __future__ import annotations

import cmath
import math
from dataclasses import dataclass

import numpy as np

from .errors import DomainError, InsufficientDataError, PoleError
from .orbits import MappingTorusModel, OrbitTable, det_one_minus_power, topological_entropy
from .specfun import clog1p

DEFAULT_MARGIN = 0.05


@dataclass(frozen=True)
class ZetaValue:
    value: complex
    truncation_length: float
    tail_bound: float

    def __post_init__(self):
        if not self.tail_bound >= 0:
            raise ValueError("tail_bound must be non-negative")


def _check_half_plane(model: MappingTorusModel, s: complex, margin: float) -> float:
    h = topological_entropy(model)
    if not s.real > h + margin:
        raise DomainError(f"Re s = {s.real:.6g} must exceed entropy + margin = {h + margin:.6g}")
    return h


def _tail_bound(model: MappingTorusModel, s: complex, L: float, h: float, value_abs: float) -> float:
    # log zeta beyond L is dominated by sum_{n >= n*} (F_n/n) |x|^n, F_n <= 2 lambda^n;
    # the terms shrink geometrically with ratio r = exp(-(Re s - h) ell)
    ell = model.return_time
    n_star = math.floor(L / ell) + 1
    F = abs(det_one_minus_power(model, n_star))
    C = 2.0 * F / n_star * math.exp(-s.real * n_star * ell)
    r = math.exp(-(s.real - h) * ell)
    return value_abs * math.expm1(C / (1.0 - r))


def euler_product(table: OrbitTable, s: complex, L: float, *,
                  margin: float = DEFAULT_MARGIN) -> ZetaValue:
    """Truncated Euler product over primitive orbits of length <= L."""
    s = complex(s)
    model = table.model
    h = _check_half_plane(model, s, margin)
    if table.max_length < L - 1e-12:
        raise InsufficientDataError(f"orbit table reaches length {table.max_length}, need {L}")
    if model.per_iterate_index:
        return _iterate_series(model, s, L, h)
    log_z = 0j
    for r in table.rows:
        if r.length > L:
            break
        log_z += -r.index * r.count * clog1p(-cmath.exp(-s * r.length))
    value = cmath.exp(log_z)
    return ZetaValue(value, float(L), _tail_bound(model, s, L, h, abs(value)))


def _iterate_series(model: MappingTorusModel, s: complex, L: float, h: float) -> ZetaValue:
    # varying orbit index: log zeta = sum_m det(I - A^m) x^m / m, signs per iterate
    ell = model.return_time
    x = cmath.exp(-s * ell)
    log_z = 0j
    m = 1
    while m * ell <= L:
        log_z += float(det_one_minus_power(model, m)) * x ** m / m
        m += 1
    value = cmath.exp(log_z)
    return ZetaValue(value, float(L), _tail_bound(model, s, L, h, abs(value)))


def _factors(model: MappingTorusModel):
    lam1, lam2 = model.eigenvalues
    return (lam1, lam2), (1.0, float(model.det))


def closed_form_zeta(model: MappingTorusModel, s: complex) -> complex:
    """(1 - lam1 x)(1 - lam2 x) / ((1 - x)(1 - det x)),  x = exp(-s ell).

    For det = 1 this is (1 - lam x)(1 - x/lam)/(1 - x)^2. Poles sit where
    x = 1 (or det x = 1); zeros at x = 1/lam1 and x = 1/lam2.
    """
    s = complex(s)
    x = cmath.exp(-s * model.return_time)
    num, den = _factors(model)
    d = 1.0 + 0j
    for c in den:
        f = 1.0 - c * x
        if abs(f) < 1e-14:
            raise PoleError(f"closed-form zeta has a pole at s = {s}")
        d *= f
    n = 1.0 + 0j
    for c in num:
        n *= 1.0 - c * x
    return n / d


def log_derivative(table: OrbitTable, s: complex, L: float, *,
                   margin: float = DEFAULT_MARGIN) -> complex:
    """zeta'/zeta(s) = -sum_gamma eps l sum_k exp(-s k l), iterates with k l <= L."""
    s = complex(s)
    model = table.model
    _check_half_plane(model, s, margin)
    if table.max_length < L - 1e-12:
        raise InsufficientDataError(f"orbit table reaches length {table.max_length}, need {L}")
    out = 0j
    if model.per_iterate_index:
        ell = model.return_time
        m = 1
        while m * ell <= L:
            out -= float(det_one_minus_power(model, m)) * ell * cmath.exp(-s * m * ell)
            m += 1
        return out
    for r in table.rows:
        if r.length > L:
            break
        k = np.arange(1, int(math.floor(L / r.length + 1e-12)) + 1)
        out -= r.index * r.count * r.length * complex(np.sum(np.exp(-s * r.length * k)))
    return out


def closed_form_log_derivative(model: MappingTorusModel, s: complex) -> complex:
    s = complex(s)
    ell = model.return_time
    x = cmath.exp(-s * ell)
    num, den = _factors(model)
    out = 0j
    for c in num:
        out += c * ell * x / (1.0 - c * x)
    for c in den:
        f = 1.0 - c * x
        if abs(f) < 1e-14:
            raise PoleError(f"log-derivative has a pole at s = {s}")
        out -= c * ell * x / f
    return out


def argument_principle(model: MappingTorusModel, center: complex, radius: float,
                       nodes: int = 512) -> complex:
    """(1/2 pi i) times the contour integral of zeta'/zeta around a circle.

    Counts zeros minus poles (with order) of the closed form inside the
    circle. Trapezoid rule, exponentially accurate for periodic integrands.
    """
    theta = 2 * np.pi * np.arange(nodes) / nodes
    pts = center + radius * np.exp(1j * theta)
    vals = np.array([closed_form_log_derivative(model, p) for p in pts])
    # ds = i r e^{i theta} d theta
    return complex(np.mean(vals * radius * np.exp(1j * theta)))
