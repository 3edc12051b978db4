"""Hot inner loops, each in a numba and a pure-numpy flavour.

The backend is chosen once at import time from ZETAFORGE_BACKEND
("numba" or "numpy"). The default is numba when it imports, numpy otherwise.
Both flavours are always importable as NUMPY_KERNELS / NUMBA_KERNELS so
tests and the benchmark can compare them.
"""
from __future__ import annotations

import logging
import os
from types import SimpleNamespace

import numpy as np

log = logging.getLogger(__name__)


# ---------------------------------------------------------------------------
# numpy flavour
# ---------------------------------------------------------------------------

def np_fixed_point_lattice(m00, m01, m10, m11, D):
    """Integer pairs (a, b) in [0, D)^2 with M (a, b) = 0 mod D."""
    a = np.arange(D, dtype=np.int64)
    out = []
    # row-chunked to keep memory at O(D * chunk)
    chunk = max(1, min(D, 2_000_000 // max(D, 1)))
    for start in range(0, D, chunk):
        aa = a[start:start + chunk, None]
        ok = ((m00 * aa + m01 * a[None, :]) % D == 0) & ((m10 * aa + m11 * a[None, :]) % D == 0)
        ia, ib = np.nonzero(ok)
        out.append(np.stack([ia + start, ib], axis=1))
    if not out:
        return np.zeros((0, 2), dtype=np.int64)
    return np.concatenate(out).astype(np.int64)


def np_minimal_periods(points, a00, a01, a10, a11, D, n_max):
    """Least d <= n_max with A^d x = x mod D for each lattice point (0 if none)."""
    x0 = points[:, 0].copy()
    y0 = points[:, 1].copy()
    x, y = x0.copy(), y0.copy()
    out = np.zeros(len(points), dtype=np.int64)
    for d in range(1, n_max + 1):
        x, y = (a00 * x + a01 * y) % D, (a10 * x + a11 * y) % D
        hit = (out == 0) & (x == x0) & (y == y0)
        out[hit] = d
    return out


def np_weighted_exp_sums(nodes, weights, rhos):
    """out[r] = sum_j weights[j] * exp(rhos[r] * nodes[j])."""
    out = np.empty(len(rhos), dtype=np.complex128)
    # chunk over rhos; a full matrix can run to gigabytes
    step = max(1, 4_000_000 // max(len(nodes), 1))
    for start in range(0, len(rhos), step):
        r = rhos[start:start + step]
        out[start:start + step] = np.exp(np.outer(r, nodes)) @ weights
    return out


NUMPY_KERNELS = SimpleNamespace(
    name="numpy",
    fixed_point_lattice=np_fixed_point_lattice,
    minimal_periods=np_minimal_periods,
    weighted_exp_sums=np_weighted_exp_sums,
)


# ---------------------------------------------------------------------------
# numba flavour
# ---------------------------------------------------------------------------

def _build_numba():
    import numba

    @numba.njit(cache=True, nogil=True)
    def _lattice_scan(m00, m01, m10, m11, D, cap):
        # counts past `cap` without storing, so the caller can retry with the right size;
        # a buffer that grows inside the loop defeats numba's loop optimisation
        count = 0
        buf = np.empty((cap, 2), dtype=np.int64)
        m01 %= D
        m11 %= D
        for a in range(D):
            # residues of M (a, b) tracked incrementally in b, no division in the loop
            u = (m00 * a) % D
            v = (m10 * a) % D
            for b in range(D):
                if u == 0 and v == 0:
                    if count < cap:
                        buf[count, 0] = a
                        buf[count, 1] = b
                    count += 1
                u += m01
                if u >= D:
                    u -= D
                v += m11
                if v >= D:
                    v -= D
        return buf, count

    def nb_fixed_point_lattice(m00, m01, m10, m11, D):
        # D solutions exactly when D = |det M|
        buf, count = _lattice_scan(m00, m01, m10, m11, D, D)
        if count > D:
            buf, count = _lattice_scan(m00, m01, m10, m11, D, count)
        return buf[:count].copy()

    @numba.njit(cache=True, nogil=True)
    def nb_minimal_periods(points, a00, a01, a10, a11, D, n_max):
        out = np.zeros(points.shape[0], dtype=np.int64)
        for i in range(points.shape[0]):
            x0 = points[i, 0]
            y0 = points[i, 1]
            x, y = x0, y0
            for d in range(1, n_max + 1):
                x, y = (a00 * x + a01 * y) % D, (a10 * x + a11 * y) % D
                if x == x0 and y == y0:
                    out[i] = d
                    break
        return out

    @numba.njit(cache=True, nogil=True)
    def nb_weighted_exp_sums(nodes, weights, rhos):
        out = np.empty(rhos.shape[0], dtype=np.complex128)
        for r in range(rhos.shape[0]):
            rho = rhos[r]
            acc = 0j
            for j in range(nodes.shape[0]):
                acc += weights[j] * np.exp(rho * nodes[j])
            out[r] = acc
        return out

    return SimpleNamespace(
        name="numba",
        fixed_point_lattice=nb_fixed_point_lattice,
        minimal_periods=nb_minimal_periods,
        weighted_exp_sums=nb_weighted_exp_sums,
    )


try:
    NUMBA_KERNELS = _build_numba()
except ImportError:  # pragma: no cover - numba is optional
    NUMBA_KERNELS = None


def select_backend(name: str | None = None) -> SimpleNamespace:
    name = (name or os.environ.get("ZETAFORGE_BACKEND", "")).strip().lower()
    if name == "numpy":
        return NUMPY_KERNELS
    if name in ("", "numba"):
        if NUMBA_KERNELS is not None:
            return NUMBA_KERNELS
        if name == "numba":
            log.warning("numba requested but not importable; using numpy kernels")
        return NUMPY_KERNELS
    raise ValueError(f"unknown ZETAFORGE_BACKEND {name!r}")


KERNELS = select_backend()


def fixed_point_lattice(m00, m01, m10, m11, D):
    return KERNELS.fixed_point_lattice(np.int64(m00), np.int64(m01), np.int64(m10), np.int64(m11),
                                       np.int64(D))


def minimal_periods(points, a00, a01, a10, a11, D, n_max):
    return KERNELS.minimal_periods(np.ascontiguousarray(points, dtype=np.int64), np.int64(a00),
                                   np.int64(a01), np.int64(a10), np.int64(a11), np.int64(D),
                                   np.int64(n_max))


def weighted_exp_sums(nodes, weights, rhos):
    return KERNELS.weighted_exp_sums(np.ascontiguousarray(nodes, dtype=np.float64),
                                     np.ascontiguousarray(weights, dtype=np.float64),
                                     np.ascontiguousarray(rhos, dtype=np.complex128))
