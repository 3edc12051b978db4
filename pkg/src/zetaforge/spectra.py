"""Spectra of the flow generator on reduced leafwise cohomology.

A spectrum is a finite union of arithmetic progressions
{base + i*spacing*k : k in Z} plus finitely many isolated eigenvalues, each
carried with an integer multiplicity.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import TYPE_CHECKING

from .errors import DomainError, TieError, UnsupportedModelError

if TYPE_CHECKING:
    from .orbits import MappingTorusModel

_TIE_TOL = 1e-12


@dataclass(frozen=True)
class APSpectrum:
    base: complex
    spacing: float
    multiplicity: int = 1

    def __post_init__(self):
        if not self.spacing > 0:
            raise DomainError("spacing must be positive")
        if self.multiplicity < 1:
            raise DomainError("multiplicity must be >= 1")
        object.__setattr__(self, "base", complex(self.base))
        object.__setattr__(self, "spacing", float(self.spacing))

    def eigenvalue(self, k: int) -> complex:
        return self.base + 1j * self.spacing * k


@dataclass(frozen=True)
class SpectrumSet:
    progressions: tuple[APSpectrum, ...] = ()
    extras: tuple[tuple[complex, int], ...] = ()
    degree: int = 0

    def __post_init__(self):
        if self.degree not in (0, 1, 2):
            raise DomainError("degree must be 0, 1 or 2")
        object.__setattr__(self, "progressions", tuple(self.progressions))
        extras = tuple((complex(r), int(m)) for r, m in self.extras)
        if any(m < 1 for _, m in extras):
            raise DomainError("extra multiplicities must be >= 1")
        object.__setattr__(self, "extras", extras)

    @property
    def is_empty(self) -> bool:
        return not self.progressions and not self.extras

    @property
    def is_finite(self) -> bool:
        return not self.progressions

    def conjugate(self) -> "SpectrumSet":
        return SpectrumSet(
            tuple(APSpectrum(p.base.conjugate(), p.spacing, p.multiplicity) for p in self.progressions),
            tuple((r.conjugate(), m) for r, m in self.extras),
            self.degree,
        )

    def shifted(self, delta: complex) -> "SpectrumSet":
        return SpectrumSet(
            tuple(APSpectrum(p.base + delta, p.spacing, p.multiplicity) for p in self.progressions),
            tuple((r + delta, m) for r, m in self.extras),
            self.degree,
        )

    def to_dict(self) -> dict:
        return {
            "degree": self.degree,
            "progressions": [
                {"base_re": p.base.real, "base_im": p.base.imag,
                 "spacing": p.spacing, "multiplicity": p.multiplicity}
                for p in self.progressions
            ],
            "extras": [{"re": r.real, "im": r.imag, "multiplicity": m} for r, m in self.extras],
        }

    @classmethod
    def from_dict(cls, data: dict) -> "SpectrumSet":
        return cls(
            tuple(APSpectrum(complex(p["base_re"], p["base_im"]), p["spacing"], p["multiplicity"])
                  for p in data.get("progressions", [])),
            tuple((complex(e["re"], e["im"]), e["multiplicity"]) for e in data.get("extras", [])),
            data["degree"],
        )


@dataclass(frozen=True)
class HalfProgression:
    """Eigenvalues beyond the cutoff on one side.

    Represents first + direction*i*spacing*j for j = 0, 1, ... (or only j = 0
    when `isolated`), each with the given multiplicity. `first_index` is the
    progression index k of `first` (0 for isolated eigenvalues).
    """
    first: complex
    spacing: float
    multiplicity: int
    direction: int
    first_index: int = 0
    isolated: bool = False


@dataclass(frozen=True)
class TruncatedSpectrum:
    elements: tuple[tuple[complex, int], ...]
    cutoff: float
    # geometric rate exp(-spacing*t) of each discarded progression's theta series
    tail_rates: tuple[float, ...] = field(default=())


def _index_range(p: APSpectrum, T: float) -> tuple[int, int]:
    lo = (-T - p.base.imag) / p.spacing
    hi = (T - p.base.imag) / p.spacing
    for x in (lo, hi):
        if abs(x - round(x)) * p.spacing < _TIE_TOL * max(1.0, T):
            raise TieError(f"cutoff T={T!r} coincides with an eigenvalue of {p}")
    return math.ceil(lo), math.floor(hi)


def truncate(spec: SpectrumSet, T: float):
    """Split a spectrum at |Im rho| = T.

    Returns (below, upper, lower): the finite part with |Im rho| <= T as a
    TruncatedSpectrum, and lists of HalfProgression above T and below -T.
    """
    if not T > 0:
        raise DomainError("cutoff T must be positive")
    elements: list[tuple[complex, int]] = []
    upper: list[HalfProgression] = []
    lower: list[HalfProgression] = []
    for p in spec.progressions:
        k_lo, k_hi = _index_range(p, T)
        elements.extend((p.eigenvalue(k), p.multiplicity) for k in range(k_lo, k_hi + 1))
        upper.append(HalfProgression(p.eigenvalue(k_hi + 1), p.spacing, p.multiplicity, +1, k_hi + 1))
        lower.append(HalfProgression(p.eigenvalue(k_lo - 1), p.spacing, p.multiplicity, -1, k_lo - 1))
    for r, m in spec.extras:
        if abs(abs(r.imag) - T) < _TIE_TOL * max(1.0, T):
            raise TieError(f"cutoff T={T!r} coincides with extra eigenvalue {r}")
        if r.imag > T:
            upper.append(HalfProgression(r, 1.0, m, +1, isolated=True))
        elif r.imag < -T:
            lower.append(HalfProgression(r, 1.0, m, -1, isolated=True))
        else:
            elements.append((r, m))
    rates = tuple(p.spacing for p in spec.progressions for _ in (0, 1))
    return TruncatedSpectrum(tuple(elements), T, rates), upper, lower


def enumerate_window(spec: SpectrumSet, K: float) -> list[tuple[complex, int]]:
    """All represented eigenvalues with |Im rho| <= K (ties included)."""
    out: list[tuple[complex, int]] = []
    for p in spec.progressions:
        k_lo = math.ceil((-K - p.base.imag) / p.spacing - 1e-12)
        k_hi = math.floor((K - p.base.imag) / p.spacing + 1e-12)
        out.extend((p.eigenvalue(k), p.multiplicity) for k in range(k_lo, k_hi + 1))
    out.extend((r, m) for r, m in spec.extras if abs(r.imag) <= K)
    return out


def default_cutoff(spec: SpectrumSet, s: complex = 0j) -> float:
    """Cutoff T for the continuation: the smallest multiple of the coarsest
    spacing exceeding max(spacing, |Im base|, |Im extra|, |Im s|) + 1, nudged
    by 1e-9 (further if that still lands on an eigenvalue)."""
    ims = [abs(complex(s).imag)]
    ims += [abs(p.base.imag) for p in spec.progressions]
    ims += [abs(r.imag) for r, _ in spec.extras]
    if spec.progressions:
        coarse = max(p.spacing for p in spec.progressions)
        x = max([coarse] + ims) + 1.0
        T = coarse * (math.floor(x / coarse) + 1)
    else:
        T = max(ims) + 1.0
    T += 1e-9
    for _ in range(100):
        try:
            truncate(spec, T)
            return T
        except TieError:
            T += 1e-6
    raise TieError("could not find a tie-free cutoff")


def mapping_torus_spectrum(model: "MappingTorusModel", p: int) -> SpectrumSet:
    """Generator spectrum in degree p for the suspension of a toral automorphism.

    Each eigenvalue mu of the induced map on degree-p fibre cohomology gives
    the progression (log mu + 2 pi i k)/ell.
    """
    if p not in (0, 1, 2):
        raise DomainError("degree must be 0, 1 or 2")
    if model.det != 1 or model.trace <= 2:
        raise UnsupportedModelError(
            "spectra need det = +1 and trace > 2 (positive real eigenvalues)")
    ell = model.return_time
    spacing = 2.0 * math.pi / ell
    if p == 1:
        h = math.log(model.leading_eigenvalue) / ell
        return SpectrumSet((APSpectrum(h, spacing), APSpectrum(-h, spacing)), (), 1)
    # degree 0: trivial action; degree 2: multiplication by det = +1
    return SpectrumSet((APSpectrum(0.0, spacing),), (), p)


def model_spectra(model: "MappingTorusModel") -> tuple[SpectrumSet, SpectrumSet, SpectrumSet]:
    return tuple(mapping_torus_spectrum(model, p) for p in (0, 1, 2))
