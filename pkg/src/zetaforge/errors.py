"""Exception types raised across zetaforge."""


class ZetaForgeError(Exception):
    """Base class for all library errors."""


class PoleError(ZetaForgeError, ValueError):
    """Evaluation requested at a pole."""


class DomainError(ZetaForgeError, ValueError):
    """Argument outside the supported domain."""


class ConvergenceError(ZetaForgeError, RuntimeError):
    """A numerical procedure did not reach its tolerance within budget."""


class TieError(ZetaForgeError, ValueError):
    """Spectral cutoff coincides with the imaginary part of an eigenvalue."""


class UnsupportedModelError(ZetaForgeError, ValueError):
    """Model outside the supported class (non-hyperbolic, bad determinant, ...)."""


class DegenerateOrbitError(ZetaForgeError, ValueError):
    """det(I - A^n) vanishes, so some closed orbit is degenerate."""


class InsufficientDataError(ZetaForgeError, ValueError):
    """Orbit table or spectral cutoff too short for the requested computation."""
