"""Command-line front end.

Exit codes: 0 pass, 1 check failed, 2 config or model error,
3 degenerate orbit data, 4 numeric failure.
"""
from __future__ import annotations

import argparse
import logging
import math
import sys
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass
from pathlib import Path

import numpy as np

from . import checks, report
from .dynzeta import closed_form_zeta, euler_product, log_derivative
from .errors import (
    ConvergenceError,
    DegenerateOrbitError,
    DomainError,
    PoleError,
    UnsupportedModelError,
    ZetaForgeError,
)
from .lefschetz import BumpFunction, lhs_trace, rhs_orbits
from .orbits import (
    MappingTorusModel,
    cached_primitive_orbits,
    primitive_orbits,
    topological_entropy,
)
from .spectra import mapping_torus_spectrum
from .speczeta import (
    alternating_det_product,
    det_infinity,
    singular_points_near,
    xi_continued,
    xi_direct,
    xi_hurwitz,
)

log = logging.getLogger("zetaforge")

EXIT_OK, EXIT_FAIL, EXIT_CONFIG, EXIT_DEGENERATE, EXIT_NUMERIC = 0, 1, 2, 3, 4


class ConfigError(ZetaForgeError):
    pass


@dataclass
class RunConfig:
    matrix: tuple[int, int, int, int] = (2, 1, 1, 1)
    return_time: float = 1.0
    re_range: tuple[float, float] = (1.2, 3.0)
    im_range: tuple[float, float] = (-1.0, 1.0)
    points: tuple[int, int] = (5, 3)
    L: float = 60.0
    K: float = 2000 * math.pi
    T: float | None = None
    N: int = 8
    tol: float = 1e-6
    margin: float = 0.05
    per_iterate_index: bool = False
    normalized_det: bool = False
    out_dir: str = "."

    def model(self) -> MappingTorusModel:
        return MappingTorusModel(self.matrix, self.return_time, self.per_iterate_index)

    def grid(self) -> list[complex]:
        (a, b), (c, d), (n, m) = self.re_range, self.im_range, self.points
        return [complex(x, y) for x in np.linspace(a, b, n) for y in np.linspace(c, d, m)]

    def validate(self):
        if not self.tol > 0:
            raise ConfigError("tolerance must be positive")
        if min(self.points) < 1:
            raise ConfigError("grid needs at least one point per axis")
        if not self.L > 0:
            raise ConfigError("L must be positive")


def parse_matrix(text: str) -> tuple[int, int, int, int]:
    try:
        vals = tuple(int(v) for v in text.replace(" ", "").split(","))
    except ValueError:
        raise argparse.ArgumentTypeError(f"matrix must be four comma-separated integers, got {text!r}")
    if len(vals) != 4:
        raise argparse.ArgumentTypeError("matrix needs exactly four entries a,b,c,d")
    return vals


def parse_complex(text: str) -> complex:
    try:
        return complex(text.replace(" ", "").replace("i", "j"))
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a complex number: {text!r}")


# ---------------------------------------------------------------------------
# subcommands
# ---------------------------------------------------------------------------

def cmd_model(args) -> int:
    model = MappingTorusModel(args.matrix, args.ell, args.per_iterate_index)
    table, path, hit = cached_primitive_orbits(model, args.max_period)
    if hit:
        print(f"cache hit: {path}", file=sys.stderr)
    print(f"entropy {report.num(topological_entropy(model))!r}")
    print("orbit counts " + " ".join(str(c) for c in table.counts()[:10]))
    if args.out:
        report._atomic_write(Path(args.out), table.to_json())
        print(f"wrote {args.out}")
    return EXIT_OK


def cmd_spectral_zeta(args) -> int:
    model = MappingTorusModel(args.matrix, args.ell, args.per_iterate_index)
    degrees = [args.degree] if args.degree is not None else [0, 1, 2]
    rows = []
    for p in degrees:
        spec = mapping_torus_spectrum(model, p)
        if args.path == "direct":
            ev = xi_direct(spec, args.s, args.z)
        elif args.path == "hurwitz":
            ev = xi_hurwitz(spec, args.s, args.z)
        else:
            ev = xi_continued(spec, args.s, args.z, args.T, order=args.N)
        det = det_infinity(spec, args.s, normalized=args.normalized_det, T=args.T)
        rows.append({"degree": p, "xi": ev.value, "xi_error_bound": ev.error_bound,
                     "path": ev.path, "det": det})
    out = {"config": {"matrix": list(args.matrix), "ell": args.ell, "s": args.s, "z": args.z},
           "rows": rows}
    sys.stdout.write(report.dumps(out))
    return EXIT_OK


def cmd_dynamical_zeta(args) -> int:
    model = MappingTorusModel(args.matrix, args.ell, args.per_iterate_index)
    table, _, _ = cached_primitive_orbits(model, max(1, math.floor(args.L / model.return_time)))
    zv = euler_product(table, args.s, args.L)
    out = {
        "config": {"matrix": list(args.matrix), "ell": args.ell, "s": args.s, "L": args.L},
        "euler_product": zv.value,
        "tail_bound": zv.tail_bound,
        "closed_form": closed_form_zeta(model, args.s),
        "log_derivative": log_derivative(table, args.s, args.L),
    }
    sys.stdout.write(report.dumps(out))
    return EXIT_OK


def _verify_point(job):
    model, s, L, normalized = job
    t0 = time.perf_counter()
    try:
        table = primitive_orbits(model, max(1, math.floor(L / model.return_time)))
        det = alternating_det_product(model, s, normalized=normalized)
        zv = euler_product(table, s, L)
        cf = closed_form_zeta(model, s)
    except (ConvergenceError, ArithmeticError, ValueError) as exc:
        return {"s": s, "error": f"{type(exc).__name__}: {exc}"}
    return {
        "s": s,
        "det_product": det,
        "euler_product": zv.value,
        "closed_form": cf,
        "abs_diff": abs(det - zv.value),
        "rel_diff": abs(det - zv.value) / abs(zv.value),
        "tail_bounds": {"euler": zv.tail_bound},
        "wall_time": time.perf_counter() - t0,
    }


def cmd_verify(args) -> int:
    cfg = RunConfig(matrix=args.matrix, return_time=args.ell, re_range=tuple(args.re_range),
                    im_range=tuple(args.im_range), points=tuple(args.points), L=args.L,
                    tol=args.tol, margin=args.margin, per_iterate_index=args.per_iterate_index,
                    normalized_det=args.normalized_det, out_dir=args.out_dir)
    cfg.validate()
    model = cfg.model()
    h = topological_entropy(model)

    accepted, rejected = [], []
    for s in cfg.grid():
        if singular_points_near(model, s):
            rejected.append({"s": s, "reason": "within 1e-6 of a singular point"})
        elif s.real <= h + cfg.margin:
            rejected.append({"s": s, "reason": f"Re s <= entropy + margin = {h + cfg.margin:.6g}"})
        else:
            accepted.append(s)
    if not accepted:
        raise ConfigError(f"no grid point lies above entropy + margin = {h + cfg.margin:.6g}")
    jobs = [(model, s, cfg.L, cfg.normalized_det) for s in accepted]
    if args.workers > 1:
        with ProcessPoolExecutor(max_workers=args.workers) as pool:
            results = list(pool.map(_verify_point, jobs))
    else:
        results = [_verify_point(j) for j in jobs]

    rows = [r for r in results if "error" not in r]
    failures = [r for r in results if "error" in r]
    if not args.timings:
        for r in rows:
            r.pop("wall_time")
    worst = max((r["rel_diff"] for r in rows), default=math.nan)
    passed = not failures and bool(rows) and worst <= cfg.tol
    config = asdict(cfg)
    summary = {"max_rel_diff": worst, "tolerance": cfg.tol, "pass": passed,
               "points": len(rows), "rejected_points": rejected,
               "failed_points": [{"s": r["s"], "error": r["error"]} for r in failures]}
    out_dir = Path(cfg.out_dir)
    report.write_json(out_dir / "verify_report.json", {"config": config, "rows": rows, "summary": summary})
    report.write_csv(out_dir / "verify_grid.csv", rows)
    if args.svg:
        report.write_svg(out_dir / "verify_rel_diff.svg", rows, cfg.tol)
    for r in rejected:
        print(f"rejected s={r['s']}: {r['reason']}")
    for r in failures:
        print(f"failed s={r['s']}: {r['error']}")
    print(f"{'PASS' if passed else 'FAIL'} max rel_diff {worst:.3e} (tol {cfg.tol:.1e}) "
          f"over {len(rows)} points")
    if failures:
        return EXIT_NUMERIC
    return EXIT_OK if passed else EXIT_FAIL


def cmd_lefschetz(args) -> int:
    model = MappingTorusModel(args.matrix, args.ell, args.per_iterate_index)
    try:
        bumps = [BumpFunction(c, args.width) for c in args.centers]
    except DomainError as exc:
        raise ConfigError(str(exc))
    rows = []
    ok = True
    for b in bumps:
        lhs, tail = lhs_trace(model, b, args.K)
        rhs = rhs_orbits(model, b)
        diff = abs(lhs - rhs)
        good = diff <= args.tol
        ok &= good
        rows.append({"center": b.center, "half_width": b.half_width, "lhs": lhs, "rhs": rhs,
                     "diff": diff, "tail_estimate": tail, "pass": good})
        print(f"{'PASS' if good else 'FAIL'} c={b.center:g} w={b.half_width:g} "
              f"lhs={lhs.real:.12g} rhs={rhs:.12g} diff={diff:.2e}")
    out = {"config": {"matrix": list(args.matrix), "ell": args.ell, "K": args.K, "tol": args.tol},
           "rows": rows, "summary": {"pass": ok}}
    if args.out:
        report.write_json(args.out, out)
    return EXIT_OK if ok else EXIT_FAIL


def cmd_selftest(args) -> int:
    results = []
    for fn in checks.ALL_CHECKS:
        res = fn()
        print(res.line())
        results.append(res)
    n_pass = sum(r.passed for r in results)
    print(f"{n_pass}/{len(results)} checks passed")
    if args.out:
        report.write_json(args.out, {"rows": [asdict(r) for r in results],
                                     "summary": {"passed": n_pass, "total": len(results)}})
    return EXIT_OK if n_pass == len(results) else EXIT_FAIL


# ---------------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="zetaforge", description=(
        "Spectral and dynamical zeta functions of suspended toral automorphisms."))
    ap.add_argument("-v", "--verbose", action="store_true", help="log progress to stderr")
    sub = ap.add_subparsers(dest="command", required=True)

    def model_args(p):
        p.add_argument("--matrix", type=parse_matrix, default=(2, 1, 1, 1), help="a,b,c,d")
        p.add_argument("--ell", type=float, default=1.0, help="return time of the suspension")
        p.add_argument("--per-iterate-index", action="store_true",
                       help="accept models whose orbit index varies with the iterate")

    p = sub.add_parser("model", help="orbit table and entropy of a model")
    model_args(p)
    p.add_argument("--max-period", type=int, default=20)
    p.add_argument("--out", help="write the orbit table JSON here")
    p.set_defaults(func=cmd_model)

    p = sub.add_parser("spectral-zeta", help="xi(s, z) and det(s - Theta) per degree")
    model_args(p)
    p.add_argument("--s", type=parse_complex, required=True)
    p.add_argument("--z", type=parse_complex, default=2.0)
    p.add_argument("--degree", type=int, choices=(0, 1, 2))
    p.add_argument("--path", choices=("continued", "direct", "hurwitz"), default="continued")
    p.add_argument("--T", type=float, default=None, help="continuation cutoff")
    p.add_argument("--N", type=int, default=8, help="asymptotic subtraction order")
    p.add_argument("--normalized-det", action="store_true")
    p.set_defaults(func=cmd_spectral_zeta)

    p = sub.add_parser("dynamical-zeta", help="Euler product over closed orbits")
    model_args(p)
    p.add_argument("--s", type=parse_complex, required=True)
    p.add_argument("--L", type=float, default=60.0)
    p.set_defaults(func=cmd_dynamical_zeta)

    p = sub.add_parser("verify", help="determinant product vs Euler product over an s-grid")
    model_args(p)
    p.add_argument("--re-range", type=float, nargs=2, default=(1.2, 3.0))
    p.add_argument("--im-range", type=float, nargs=2, default=(-1.0, 1.0))
    p.add_argument("--points", type=int, nargs=2, default=(5, 3), metavar=("N_RE", "N_IM"))
    p.add_argument("--L", type=float, default=60.0)
    p.add_argument("--tol", type=float, default=1e-6)
    p.add_argument("--margin", type=float, default=0.05)
    p.add_argument("--normalized-det", action="store_true")
    p.add_argument("--workers", type=int, default=1)
    p.add_argument("--out-dir", default=".")
    p.add_argument("--svg", action="store_true", help="also plot rel_diff over the grid")
    p.add_argument("--timings", action="store_true",
                   help="record per-point wall time (reports are then not byte-stable)")
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("lefschetz", help="bump-function trace formula checks")
    model_args(p)
    p.add_argument("--centers", type=float, nargs="+", default=[1.0, 2.0, 3.0])
    p.add_argument("--width", type=float, default=0.3)
    p.add_argument("--K", type=float, default=2000 * math.pi)
    p.add_argument("--tol", type=float, default=1e-6)
    p.add_argument("--out")
    p.set_defaults(func=cmd_lefschetz)

    p = sub.add_parser("selftest", help="run the built-in oracle checks")
    p.add_argument("--out")
    p.set_defaults(func=cmd_selftest)
    return ap


def main(argv=None) -> int:
    ap = build_parser()
    args = ap.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return args.func(args)
    except (ConfigError, UnsupportedModelError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except DegenerateOrbitError as exc:
        print(f"degenerate: {exc}", file=sys.stderr)
        return EXIT_DEGENERATE
    except (DomainError, PoleError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (ZetaForgeError, ArithmeticError, ValueError) as exc:
        print(f"numeric failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC


if __name__ == "__main__":
    sys.exit(main())
