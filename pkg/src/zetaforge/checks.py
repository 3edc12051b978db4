"""Headline numerical certificates, shared by the test suite and `selftest`.

Each check returns a CheckResult; none of them raises on a failed
comparison.
"""
from __future__ import annotations

import math
import time
from dataclasses import dataclass, field

import numpy as np

from .dynzeta import euler_product
from .lefschetz import BumpFunction, laplace_identity_check, trace_check
from .orbits import (
    MappingTorusModel,
    brute_force_primitive_counts,
    fixed_point_data,
    primitive_orbits,
    topological_entropy,
)
from .spectra import SpectrumSet, default_cutoff, model_spectra
from .specfun import gamma, hankel_extrapolate
from .speczeta import (
    alternating_det_product,
    asymptotic_coefficients,
    det_infinity,
    xi_continued,
    xi_derivative_at_zero,
    xi_derivative_hurwitz,
    xi_direct,
    xi_plus,
)

CAT = MappingTorusModel((2, 1, 1, 1), 1.0)


@dataclass(frozen=True)
class CheckResult:
    name: str
    passed: bool
    measured: float
    tolerance: float
    detail: dict = field(default_factory=dict)

    def line(self) -> str:
        flag = "PASS" if self.passed else "FAIL"
        return f"{flag}  {self.name:<28} measured={self.measured:.3e}  tol={self.tolerance:.1e}"


def s_grid(re_lo=1.2, re_hi=3.0, n_re=5, im_lo=-1.0, im_hi=1.0, n_im=3) -> list[complex]:
    return [complex(a, b) for a in np.linspace(re_lo, re_hi, n_re) for b in np.linspace(im_lo, im_hi, n_im)]


def check_determinant_identity(model=CAT, L: float = 60.0, tol: float = 1e-6,
                               time_limit: float = 60.0) -> CheckResult:
    t0 = time.perf_counter()
    table = primitive_orbits(model, math.floor(L / model.return_time))
    worst = 0.0
    for s in s_grid():
        det = alternating_det_product(model, s)
        ep = euler_product(table, s, L).value
        worst = max(worst, abs(det - ep) / abs(ep))
    wall = time.perf_counter() - t0
    return CheckResult("determinant-vs-euler", worst <= tol and wall <= time_limit, worst, tol,
                       {"wall_time": wall, "time_limit": time_limit, "points": 15})


def check_two_paths(tol: float = 1e-8) -> CheckResult:
    s_values = [1.5, 2.0, 2.5, 2 + 0.5j, 3.0]
    z_values = np.linspace(1.6, 3.0, 5)
    worst = 0.0
    for spec in model_spectra(CAT)[:2]:
        for s in s_values:
            for z in z_values:
                a = xi_direct(spec, s, z).value
                b = xi_continued(spec, s, z).value
                worst = max(worst, abs(a - b) / abs(a))
    return CheckResult("direct-vs-continued", worst <= tol, worst, tol)


def check_regular_at_zero(cauchy_tol: float = 1e-6, deriv_tol: float = 1e-8) -> CheckResult:
    steps = [1e-3 / 2 ** j for j in range(5)]
    cauchy = 0.0
    deriv = 0.0
    for spec in model_spectra(CAT)[:2]:
        for s in (1.5, 2.0, 2 + 0.5j):
            quotients = [(xi_continued(spec, s, h).value - xi_continued(spec, s, -h).value) / (2 * h)
                         for h in steps]
            cauchy = max(cauchy, max(abs(p - q) for p, q in zip(quotients, quotients[1:])))
            analytic = xi_derivative_at_zero(spec, s)
            deriv = max(deriv, abs(analytic - xi_derivative_hurwitz(spec, s)))
    ok = cauchy <= cauchy_tol and deriv <= deriv_tol
    return CheckResult("regularity-at-zero", ok, max(cauchy, deriv), cauchy_tol,
                       {"cauchy": cauchy, "cauchy_tol": cauchy_tol,
                        "derivative_vs_hurwitz": deriv, "derivative_tol": deriv_tol})


def check_residue(eps: float = 1e-3, tol: float = 1e-5, s: complex = 2.0) -> CheckResult:
    worst = 0.0
    symmetric = 0.0
    for spec in model_spectra(CAT)[:2]:
        T = default_cutoff(spec, s)
        a = asymptotic_coefficients(spec, T).a
        up = eps * xi_plus(spec, s, 1 + eps, T) - a * 1j
        down = -eps * xi_plus(spec, s, 1 - eps, T) - a * 1j
        worst = max(worst, abs(up))
        symmetric = max(symmetric, abs(up + down) / 2)
    # (z-1) xi+ = a i + (z-1) * (regular part), so the one-sided residual is O(eps)
    return CheckResult("residue-at-one", worst <= tol, worst, tol,
                       {"eps": eps, "symmetric_residual": symmetric})


def check_lefschetz(tol: float = 1e-6, K: float = 2000 * math.pi, w: float = 0.3) -> CheckResult:
    worst = 0.0
    exact_err = 0.0
    for c in (1.0, 2.0, 3.0):
        chk = trace_check(CAT, BumpFunction(c, w), K)
        worst = max(worst, chk.difference)
        n = int(c)
        t_n = 2 - fixed_point_data(CAT, n)[0] * fixed_point_data(CAT, n)[1]
        exact = (2 - t_n) * math.exp(-1.0)
        exact_err = max(exact_err, abs(chk.rhs - exact), abs(chk.lhs - exact))
    return CheckResult("lefschetz-bumps", worst <= tol and exact_err <= tol, max(worst, exact_err), tol,
                       {"lhs_vs_rhs": worst, "vs_exact": exact_err})


def check_hankel(tol: float = 1e-6) -> CheckResult:
    worst = 0.0
    for lam in (1.0, 2.0):
        for z in (0.3, 0.5 + 0.2j):
            target = lam ** (z - 1) / gamma(z)
            worst = max(worst, abs(hankel_extrapolate(lam, z) - target))
    return CheckResult("hankel-contour", worst <= tol, worst, tol)


def check_laplace(tol: float = 1e-7, L: float = 60.0) -> CheckResult:
    table = primitive_orbits(CAT, int(L))
    worst = 0.0
    for s, z in ((2.0, 2.0), (1.5, 3.0)):
        worst = max(worst, laplace_identity_check(CAT, s, z, L, table).difference)
    return CheckResult("laplace-identity", worst <= tol, worst, tol)


def check_orbit_counts(expected=(1, 2, 5, 10, 24, 50)) -> CheckResult:
    mobius = primitive_orbits(CAT, len(expected)).counts()
    brute = brute_force_primitive_counts(CAT, len(expected))
    ok = mobius == list(expected) == brute
    mismatches = sum(a != b for a, b in zip(mobius, expected)) + sum(a != b for a, b in zip(brute, expected))
    return CheckResult("orbit-counts", ok, float(mismatches), 0.0,
                       {"mobius": mobius, "brute_force": brute})


def check_entropy(tol: float = 1e-2, L: float = 40.0) -> CheckResult:
    F20 = fixed_point_data(CAT, 20)[0]
    gap = abs(math.log(F20) / 20 - topological_entropy(CAT))
    table = primitive_orbits(CAT, int(L) + 10)
    worst_ratio = 0.0
    for s in s_grid():
        short = euler_product(table, s, L)
        long = euler_product(table, s, L + 10)
        worst_ratio = max(worst_ratio, abs(short.value - long.value) / short.tail_bound)
    return CheckResult("entropy-consistency", gap <= tol and worst_ratio <= 1.0, gap, tol,
                       {"truncation_over_bound": worst_ratio})


def check_finite_reduction(tol: float = 1e-12, trials: int = 20, seed: int = 20240611) -> CheckResult:
    rng = np.random.default_rng(seed)
    worst = 0.0
    for _ in range(trials):
        size = int(rng.integers(1, 7))
        roots = rng.uniform(-3, 3, size) + 1j * rng.uniform(-3, 3, size)
        mults = rng.integers(1, 4, size)
        s = complex(rng.uniform(-3, 3), rng.uniform(-3, 3))
        while np.min(np.abs(s - roots)) < 0.1:
            s += 0.37
        spec = SpectrumSet(extras=tuple(zip(roots, mults)))
        exact = np.prod((s - roots) ** mults)
        worst = max(worst, abs(det_infinity(spec, s) - exact) / abs(exact))
    return CheckResult("finite-reduction", worst <= tol, worst, tol)


ALL_CHECKS = (
    check_determinant_identity,
    check_two_paths,
    check_regular_at_zero,
    check_residue,
    check_lefschetz,
    check_hankel,
    check_laplace,
    check_orbit_counts,
    check_entropy,
    check_finite_reduction,
)


def run_all() -> list[CheckResult]:
    return [fn() for fn in ALL_CHECKS]
