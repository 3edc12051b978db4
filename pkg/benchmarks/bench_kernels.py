#!/usr/bin/env python3
"""Time the numba kernels against their numpy fallbacks.

The first numba call compiles (or loads from numba's on-disk cache), so it is
reported separately as `first`; `best` is the fastest of the remaining runs.

    python3 benchmarks/bench_kernels.py --repeat 5
"""
from __future__ import annotations

import argparse
import math
import time
from dataclasses import dataclass

import numpy as np

from zetaforge import _kernels
from zetaforge.lefschetz import BumpFunction, _nodes
from zetaforge.orbits import _matrix_power


@dataclass
class Timing:
    kernel: str
    backend: str
    first: float
    best: float


def lattice_case(n: int):
    p = _matrix_power((2, 1, 1, 1), n)
    m = (p[0] - 1, p[1], p[2], p[3] - 1)
    D = abs(m[0] * m[3] - m[1] * m[2])
    return tuple(np.int64(v % D) for v in m) + (np.int64(D),)


def periods_case(n: int):
    args = lattice_case(n)
    pts = _kernels.NUMPY_KERNELS.fixed_point_lattice(*args)
    D = args[-1]
    return (pts, np.int64(2), np.int64(1), np.int64(1), np.int64(1), D, np.int64(n))


def exp_sum_case(n_rho: int):
    bump = BumpFunction(2.0, 0.3)
    k = np.arange(-n_rho // 2, n_rho // 2)
    rhos = (0.96 + 2j * math.pi * k).astype(np.complex128)
    t, w = _nodes(bump, float(np.max(np.abs(rhos.imag))))
    return t, w, rhos


def time_call(fn, args, repeat: int) -> tuple[float, float, object]:
    t0 = time.perf_counter()
    out = fn(*args)
    first = time.perf_counter() - t0
    best = math.inf
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn(*args)
        best = min(best, time.perf_counter() - t0)
    return first, best, out


def same(a, b) -> bool:
    a, b = np.asarray(a), np.asarray(b)
    if a.dtype.kind == "c":
        return bool(np.allclose(a, b, rtol=1e-12, atol=1e-14 * np.max(np.abs(b))))
    return a.shape == b.shape and bool(np.array_equal(a, b))


def main(argv=None) -> int:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=3)
    ap.add_argument("--lattice-n", type=int, default=9, help="iterate for the D^2 lattice scan")
    ap.add_argument("--rhos", type=int, default=4000, help="eigenvalues in the bump transform")
    args = ap.parse_args(argv)

    if _kernels.NUMBA_KERNELS is None:
        print("numba is not importable; nothing to compare")
        return 1
    cases = {
        "fixed_point_lattice": lattice_case(args.lattice_n),
        "minimal_periods": periods_case(args.lattice_n),
        "weighted_exp_sums": exp_sum_case(args.rhos),
    }
    rows: list[Timing] = []
    for kernel, case in cases.items():
        outs = {}
        for ns in (_kernels.NUMBA_KERNELS, _kernels.NUMPY_KERNELS):
            first, best, outs[ns.name] = time_call(getattr(ns, kernel), case, args.repeat)
            rows.append(Timing(kernel, ns.name, first, best))
        if not same(outs["numba"], outs["numpy"]):
            print(f"MISMATCH in {kernel}")
            return 1

    print(f"{'kernel':<22}{'backend':<8}{'first [s]':>12}{'best [s]':>12}{'speedup':>9}")
    for i in range(0, len(rows), 2):
        nb, npy = rows[i], rows[i + 1]
        for r in (nb, npy):
            sp = f"{npy.best / nb.best:8.1f}x" if r is nb else ""
            print(f"{r.kernel:<22}{r.backend:<8}{r.first:12.4f}{r.best:12.4f}{sp:>9}")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
