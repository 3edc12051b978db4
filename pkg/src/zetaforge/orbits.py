"""Closed orbits of suspensions of hyperbolic toral automorphisms.

Everything in this module that counts is exact integer arithmetic; floats
appear only in lengths and the entropy.
"""
from __future__ import annotations

import hashlib
import json
import logging
import math
import os
import tempfile
from dataclasses import dataclass
from functools import lru_cache
from pathlib import Path

import numpy as np

from . import _kernels
from .errors import DegenerateOrbitError, DomainError, InsufficientDataError, UnsupportedModelError

log = logging.getLogger(__name__)

CACHE_ENV = "ZETAFORGE_CACHE"
DEFAULT_CACHE_DIR = ".zetaforge-cache"


@dataclass(frozen=True)
class MappingTorusModel:
    """Suspension of x -> A x on the 2-torus with constant roof `return_time`.

    Models whose orbit index varies between iterates (det = -1, or
    trace < -2) are only accepted with ``per_iterate_index=True``.
    """
    matrix: tuple[int, int, int, int]
    return_time: float = 1.0
    per_iterate_index: bool = False

    def __post_init__(self):
        m = tuple(int(x) for x in self.matrix)
        if len(m) != 4 or any(a != b for a, b in zip(m, self.matrix)):
            raise UnsupportedModelError("matrix must be four integers a, b, c, d")
        object.__setattr__(self, "matrix", m)
        if not self.return_time > 0:
            raise UnsupportedModelError("return_time must be positive")
        object.__setattr__(self, "return_time", float(self.return_time))
        if abs(self.det) != 1:
            raise UnsupportedModelError(f"|det| must be 1, got {self.det}")
        if not self.is_hyperbolic:
            raise UnsupportedModelError(f"matrix {m} is not hyperbolic")
        if not self.constant_index and not self.per_iterate_index:
            raise UnsupportedModelError(
                "orbit index varies with the iterate for this matrix; "
                "pass per_iterate_index=True to accept it")

    @property
    def trace(self) -> int:
        return self.matrix[0] + self.matrix[3]

    @property
    def det(self) -> int:
        a, b, c, d = self.matrix
        return a * d - b * c

    @property
    def is_hyperbolic(self) -> bool:
        if self.det == 1:
            return abs(self.trace) > 2
        return self.trace != 0

    @property
    def constant_index(self) -> bool:
        return self.det == 1 and self.trace > 2

    @property
    def eigenvalues(self) -> tuple[float, float]:
        """Real eigenvalues, the expanding one first."""
        t, d = self.trace, self.det
        root = math.sqrt(t * t - 4 * d)
        lam = (abs(t) + root) / 2.0
        lam = math.copysign(lam, t) if t else lam
        return lam, d / lam

    @property
    def leading_eigenvalue(self) -> float:
        return abs(self.eigenvalues[0])

    def key(self) -> dict:
        return {"matrix": list(self.matrix), "return_time": self.return_time}


def trace_power(model: MappingTorusModel, n: int) -> int:
    """trace(A^n), exactly."""
    if n < 0:
        raise DomainError("n must be non-negative")
    return _trace_powers(model.trace, model.det, n)[n]


@lru_cache(maxsize=256)
def _trace_powers(trace: int, det: int, n: int) -> tuple[int, ...]:
    ts = [2, trace]
    for _ in range(n - 1):
        ts.append(trace * ts[-1] - det * ts[-2])
    return tuple(ts[: n + 1])


def det_one_minus_power(model: MappingTorusModel, n: int) -> int:
    """det(I - A^n) = 1 - trace(A^n) + det(A)^n."""
    return 1 - trace_power(model, n) + model.det ** n


def fixed_point_data(model: MappingTorusModel, n: int) -> tuple[int, int]:
    """(F_n, sign) with F_n = |det(I - A^n)| the number of fixed points of A^n."""
    if n < 1:
        raise DomainError("n must be >= 1")
    d = det_one_minus_power(model, n)
    if d == 0:
        raise DegenerateOrbitError(f"det(I - A^{n}) = 0")
    return abs(d), (1 if d > 0 else -1)


def mobius(n: int) -> int:
    if n < 1:
        raise DomainError("mobius needs n >= 1")
    out = 1
    p = 2
    while p * p <= n:
        if n % p == 0:
            n //= p
            if n % p == 0:
                return 0
            out = -out
        p += 1
    if n > 1:
        out = -out
    return out


def divisors(n: int) -> list[int]:
    small = [d for d in range(1, math.isqrt(n) + 1) if n % d == 0]
    return sorted(set(small + [n // d for d in small]))


@dataclass(frozen=True)
class OrbitRow:
    period: int
    length: float
    count: int
    index: int


@dataclass(frozen=True)
class OrbitTable:
    model: MappingTorusModel
    rows: tuple[OrbitRow, ...]
    max_period: int

    @property
    def max_length(self) -> float:
        return self.max_period * self.model.return_time

    def counts(self) -> list[int]:
        return [r.count for r in self.rows]

    def to_dict(self) -> dict:
        return {
            "model": self.model.key() | {"per_iterate_index": self.model.per_iterate_index},
            "max_period": self.max_period,
            "rows": [
                {"n": r.period, "length": r.length, "count": str(r.count), "index": r.index}
                for r in self.rows
            ],
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=1) + "\n"

    @classmethod
    def from_dict(cls, data: dict) -> "OrbitTable":
        m = data["model"]
        model = MappingTorusModel(tuple(m["matrix"]), m["return_time"],
                                  m.get("per_iterate_index", False))
        rows = tuple(OrbitRow(r["n"], float(r["length"]), int(r["count"]), int(r["index"]))
                     for r in data["rows"])
        return cls(model, rows, int(data["max_period"]))


def primitive_orbits(model: MappingTorusModel, max_period: int) -> OrbitTable:
    """Primitive orbit counts P_n by Mobius inversion n P_n = sum mu(n/d) F_d."""
    if max_period < 1:
        raise DomainError("max_period must be >= 1")
    F = {}
    sign = {}
    for n in range(1, max_period + 1):
        F[n], sign[n] = fixed_point_data(model, n)
    rows = []
    for n in range(1, max_period + 1):
        acc = sum(mobius(n // d) * F[d] for d in divisors(n))
        if acc < 0 or acc % n:
            raise ArithmeticError(f"Mobius inversion gave non-integral P_{n} = {acc}/{n}")
        rows.append(OrbitRow(n, n * model.return_time, acc // n, sign[n]))
    return OrbitTable(model, tuple(rows), max_period)


def topological_entropy(model: MappingTorusModel) -> float:
    """log of the leading eigenvalue modulus, per unit length."""
    t, d = model.trace, model.det
    return math.log((abs(t) + math.sqrt(t * t - 4 * d)) / 2.0) / model.return_time


def orbit_counting_function(table: OrbitTable, T: float) -> int:
    """N(T): primitive orbits with length <= T."""
    if T > table.max_length:
        raise InsufficientDataError("table shorter than T")
    return sum(r.count for r in table.rows if r.length <= T)


# ---------------------------------------------------------------------------
# brute-force lattice oracle
# ---------------------------------------------------------------------------

def _matrix_power(m: tuple[int, int, int, int], n: int) -> tuple[int, int, int, int]:
    a, b, c, d = 1, 0, 0, 1
    for _ in range(n):
        a, b, c, d = a * m[0] + b * m[2], a * m[1] + b * m[3], c * m[0] + d * m[2], c * m[1] + d * m[3]
    return a, b, c, d


def torus_fixed_points(model: MappingTorusModel, n: int) -> tuple[np.ndarray, int]:
    """Fixed points of A^n on the torus as numerators over D = |det(A^n - I)|.

    Scans all D^2 candidates (a, b)/D.
    """
    p = _matrix_power(model.matrix, n)
    m00, m01, m10, m11 = p[0] - 1, p[1], p[2], p[3] - 1
    D = abs(m00 * m11 - m01 * m10)
    if D == 0:
        raise DegenerateOrbitError(f"det(A^{n} - I) = 0")
    if D > 50_000:
        raise DomainError(f"brute force needs D^2 = {D}^2 lattice scans; too large")
    pts = _kernels.fixed_point_lattice(m00 % D, m01 % D, m10 % D, m11 % D, D)
    return pts, D


def brute_force_primitive_counts(model: MappingTorusModel, max_period: int) -> list[int]:
    """P_1..P_max_period by enumerating torus points and grouping into A-orbits."""
    a = tuple(int(x) for x in model.matrix)
    out = []
    for n in range(1, max_period + 1):
        pts, D = torus_fixed_points(model, n)
        if len(pts) != D:
            raise ArithmeticError(f"found {len(pts)} fixed points of A^{n}, expected {D}")
        periods = _kernels.minimal_periods(pts, a[0] % D, a[1] % D, a[2] % D, a[3] % D, D, n)
        exact = int(np.count_nonzero(periods == n))
        if exact % n:
            raise ArithmeticError("points of exact period n do not split into n-cycles")
        out.append(exact // n)
    return out


# ---------------------------------------------------------------------------
# on-disk cache
# ---------------------------------------------------------------------------

def cache_dir() -> Path:
    return Path(os.environ.get(CACHE_ENV, DEFAULT_CACHE_DIR))


def cache_key(model: MappingTorusModel, max_period: int) -> str:
    payload = json.dumps(
        {"matrix": list(model.matrix), "return_time": repr(model.return_time),
         "per_iterate_index": model.per_iterate_index, "max_period": max_period},
        sort_keys=True)
    return hashlib.sha256(payload.encode()).hexdigest()[:24]


def cached_primitive_orbits(model: MappingTorusModel, max_period: int,
                            directory: Path | None = None) -> tuple[OrbitTable, Path, bool]:
    """Load the orbit table from the cache or build and store it.

    Returns (table, path, hit). Writes go through a temp file and an atomic
    rename so concurrent writers never expose a partial file.
    """
    directory = Path(directory) if directory is not None else cache_dir()
    path = directory / f"orbits-{cache_key(model, max_period)}.json"
    if path.exists():
        log.info("orbit cache hit: %s", path)
        return OrbitTable.from_dict(json.loads(path.read_text())), path, True
    log.info("orbit cache miss: %s", path)
    table = primitive_orbits(model, max_period)
    directory.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=directory, prefix=".tmp-", suffix=".json")
    with os.fdopen(fd, "w") as fh:
        fh.write(table.to_json())
    os.replace(tmp, path)
    return table, path, False
