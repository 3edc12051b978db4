import json
import math

import pytest

from zetaforge import cli
from zetaforge.errors import ConvergenceError, DegenerateOrbitError
from zetaforge.report import CSV_HEADER


@pytest.fixture(autouse=True)
def cache_dir(tmp_path, monkeypatch):
    d = tmp_path / "cache"
    monkeypatch.setenv("ZETAFORGE_CACHE", str(d))
    return d


def run(capsys, *argv):
    code = cli.main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def test_model_counts_and_cache(tmp_path, capsys):
    target = tmp_path / "orbits.json"
    code, out, err = run(capsys, "model", "--matrix", "2,1,1,1", "--ell", "1",
                         "--max-period", "20", "--out", str(target))
    assert code == cli.EXIT_OK
    assert "orbit counts 1 2 5 10 24 50 120 270" in out
    assert "cache hit" not in err
    first = target.read_bytes()
    assert json.loads(first)

    code, out, err = run(capsys, "model", "--max-period", "20", "--out", str(target))
    assert code == cli.EXIT_OK
    assert "cache hit" in err
    assert target.read_bytes() == first


def test_model_entropy_printed(capsys):
    code, out, _ = run(capsys, "model", "--max-period", "4")
    h = float(out.split("entropy ")[1].split()[0])
    assert h == pytest.approx(math.log((3 + math.sqrt(5)) / 2), rel=1e-14)


@pytest.mark.parametrize("matrix", ["1,0,0,1", "2,0,0,1", "1,1,0,1"])
def test_model_rejects_bad_matrices(capsys, matrix):
    code, _, err = run(capsys, "model", "--matrix", matrix)
    assert code == cli.EXIT_CONFIG
    assert err.startswith("error:")


def test_bad_matrix_syntax_is_usage_error(capsys):
    with pytest.raises(SystemExit) as exc:
        cli.main(["model", "--matrix", "2,1,1"])
    assert exc.value.code == 2


def test_degenerate_orbits_exit_3(capsys, monkeypatch):
    def boom(*a, **k):
        raise DegenerateOrbitError("det(I - A^n) = 0")
    monkeypatch.setattr(cli, "cached_primitive_orbits", boom)
    code, _, err = run(capsys, "model")
    assert code == cli.EXIT_DEGENERATE
    assert "degenerate" in err


def test_verify_headline_grid(tmp_path, capsys):
    code, out, _ = run(capsys, "verify", "--out-dir", str(tmp_path), "--svg")
    assert code == cli.EXIT_OK
    assert out.strip().startswith("PASS")
    rep = json.loads((tmp_path / "verify_report.json").read_text())
    assert set(rep) == {"config", "rows", "summary"}
    assert rep["summary"]["pass"] is True and rep["summary"]["points"] == 15
    assert rep["summary"]["max_rel_diff"] <= 1e-6
    assert max(r["rel_diff"] for r in rep["rows"]) == rep["summary"]["max_rel_diff"]
    row = rep["rows"][0]
    assert {"s", "det_product", "euler_product", "closed_form", "abs_diff", "rel_diff",
            "tail_bounds"} <= set(row)
    lines = (tmp_path / "verify_grid.csv").read_text().splitlines()
    assert lines[0] == ",".join(CSV_HEADER)
    assert lines[0] == "s_re,s_im,det_product_re,det_product_im,euler_re,euler_im,rel_diff"
    assert len(lines) == 16
    svg = (tmp_path / "verify_rel_diff.svg").read_text()
    assert svg.startswith("<svg") and svg.count("<circle") == 15


def test_verify_reports_are_byte_stable(tmp_path, capsys):
    args = ("verify", "--points", "3", "2", "--out-dir", str(tmp_path))
    names = ("verify_report.json", "verify_grid.csv")
    assert run(capsys, *args)[0] == 0
    first = [(tmp_path / n).read_bytes() for n in names]
    assert run(capsys, *args, "--workers", "2")[0] == 0
    assert [(tmp_path / n).read_bytes() for n in names] == first


def test_verify_timings_flag(tmp_path, capsys):
    run(capsys, "verify", "--points", "1", "1", "--re-range", "2", "2", "--im-range", "0", "0",
        "--out-dir", str(tmp_path), "--timings")
    rep = json.loads((tmp_path / "verify_report.json").read_text())
    assert rep["rows"][0]["wall_time"] >= 0


def test_verify_tight_tolerance_fails(tmp_path, capsys):
    code, out, _ = run(capsys, "verify", "--tol", "1e-15", "--points", "3", "3",
                       "--out-dir", str(tmp_path))
    assert code == cli.EXIT_FAIL
    assert out.strip().splitlines()[-1].startswith("FAIL max rel_diff")
    rep = json.loads((tmp_path / "verify_report.json").read_text())
    assert rep["summary"]["pass"] is False
    assert rep["summary"]["max_rel_diff"] > 1e-15


def test_verify_rejects_points_near_singularities(tmp_path, capsys):
    h = math.log((3 + math.sqrt(5)) / 2)
    code, out, _ = run(capsys, "verify", "--re-range", str(h), "2.0", "--im-range", "0", "0",
                       "--points", "3", "1", "--out-dir", str(tmp_path))
    assert code == cli.EXIT_OK
    assert "rejected s=" in out
    rep = json.loads((tmp_path / "verify_report.json").read_text())
    assert len(rep["summary"]["rejected_points"]) == 1
    assert "singular" in rep["summary"]["rejected_points"][0]["reason"]
    assert rep["summary"]["points"] == 2


def test_verify_grid_below_entropy_is_config_error(tmp_path, capsys):
    code, _, err = run(capsys, "verify", "--re-range", "0.2", "0.9", "--out-dir", str(tmp_path))
    assert code == cli.EXIT_CONFIG
    assert "entropy" in err


def test_verify_nonpositive_tolerance(tmp_path, capsys):
    assert run(capsys, "verify", "--tol", "0", "--out-dir", str(tmp_path))[0] == cli.EXIT_CONFIG


def test_verify_numeric_failure_writes_partial_report(tmp_path, capsys, monkeypatch):
    real = cli.alternating_det_product

    def flaky(model, s, **kw):
        if s.imag > 0:
            raise ConvergenceError("quadrature stalled")
        return real(model, s, **kw)
    monkeypatch.setattr(cli, "alternating_det_product", flaky)
    code, out, _ = run(capsys, "verify", "--points", "2", "2", "--out-dir", str(tmp_path))
    assert code == cli.EXIT_NUMERIC
    assert "failed s=" in out
    rep = json.loads((tmp_path / "verify_report.json").read_text())
    assert rep["summary"]["points"] == 2
    assert len(rep["summary"]["failed_points"]) == 2


def test_lefschetz_command(tmp_path, capsys):
    target = tmp_path / "lef.json"
    code, out, _ = run(capsys, "lefschetz", "--out", str(target))
    assert code == cli.EXIT_OK
    assert out.count("PASS") == 3
    rep = json.loads(target.read_text())
    assert [r["center"] for r in rep["rows"]] == [1.0, 2.0, 3.0]
    for r in rep["rows"]:
        assert {"lhs", "rhs", "diff"} <= set(r)
    assert rep["rows"][1]["rhs"] == pytest.approx(-5 * math.exp(-1), abs=1e-12)


def test_lefschetz_support_must_be_positive(capsys):
    code, _, err = run(capsys, "lefschetz", "--centers", "0.2", "--width", "0.3")
    assert code == cli.EXIT_CONFIG


def test_lefschetz_tolerance_failure(capsys):
    code, out, _ = run(capsys, "lefschetz", "--centers", "2", "--tol", "1e-20")
    assert code == cli.EXIT_FAIL and out.startswith("FAIL")


def test_spectral_zeta_paths_agree(capsys):
    vals = {}
    for path in ("continued", "direct", "hurwitz"):
        code, out, _ = run(capsys, "spectral-zeta", "--s", "2", "--z", "2.5", "--degree", "1",
                           "--path", path)
        assert code == cli.EXIT_OK
        row = json.loads(out)["rows"][0]
        vals[path] = complex(row["xi"]["re"], row["xi"]["im"])
    assert abs(vals["continued"] - vals["hurwitz"]) <= 1e-10 * abs(vals["hurwitz"])
    assert abs(vals["direct"] - vals["hurwitz"]) <= 1e-8 * abs(vals["hurwitz"])


def test_spectral_zeta_all_degrees(capsys):
    code, out, _ = run(capsys, "spectral-zeta", "--s", "2+0.5i")
    rows = json.loads(out)["rows"]
    assert [r["degree"] for r in rows] == [0, 1, 2]
    assert all(r["path"] == "theta_continuation" for r in rows)


def test_spectral_zeta_pole(capsys):
    code, _, err = run(capsys, "spectral-zeta", "--s", "2", "--z", "1")
    assert code == cli.EXIT_CONFIG


def test_dynamical_zeta(capsys):
    code, out, _ = run(capsys, "dynamical-zeta", "--s", "2", "--L", "40")
    rep = json.loads(out)
    ep = complex(rep["euler_product"]["re"], rep["euler_product"]["im"])
    cf = complex(rep["closed_form"]["re"], rep["closed_form"]["im"])
    assert code == cli.EXIT_OK
    assert abs(ep - cf) <= 1e-12


def test_complex_parsing():
    assert cli.parse_complex("2+0.5i") == 2 + 0.5j
    assert cli.parse_complex(" 1 - 2j ") == 1 - 2j
    with pytest.raises(Exception):
        cli.parse_complex("two")


def test_selftest_reports_each_check(tmp_path, capsys):
    target = tmp_path / "self.json"
    code, out, _ = run(capsys, "selftest", "--out", str(target))
    lines = out.strip().splitlines()
    assert len(lines) == 11
    assert all(l.startswith(("PASS", "FAIL")) for l in lines[:10])
    rep = json.loads(target.read_text())
    n_pass = rep["summary"]["passed"]
    assert lines[-1] == f"{n_pass}/10 checks passed"
    assert code == (cli.EXIT_OK if n_pass == 10 else cli.EXIT_FAIL)
