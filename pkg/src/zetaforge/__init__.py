"""Zeta-regularised determinants and dynamical zeta functions for suspension
flows of hyperbolic toral automorphisms."""

from .dynzeta import ZetaValue, closed_form_zeta, euler_product, log_derivative
from .errors import (
    ConvergenceError,
    DegenerateOrbitError,
    DomainError,
    InsufficientDataError,
    PoleError,
    TieError,
    UnsupportedModelError,
    ZetaForgeError,
)
from .orbits import MappingTorusModel, OrbitTable, primitive_orbits, topological_entropy
from .spectra import APSpectrum, SpectrumSet, mapping_torus_spectrum, model_spectra
from .speczeta import (
    XiEvaluation,
    alternating_det_product,
    det_infinity,
    xi_continued,
    xi_derivative_at_zero,
    xi_direct,
)

__version__ = "0.1.0"
