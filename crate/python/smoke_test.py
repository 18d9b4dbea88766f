#!/usr/bin/env python3
"""Smoke test for the aode_solve_py extension module.

Builds the cdylib with cargo, loads it, and checks the JSON output of each
exposed function on small worked examples.

Usage: python3 python/smoke_test.py
"""

import json
import pathlib
import shutil
import subprocess
import sys
import tempfile

ROOT = pathlib.Path(__file__).resolve().parent.parent


def build_and_import():
    subprocess.run(
        ["cargo", "build", "-p", "aode-solve-py"], cwd=ROOT, check=True
    )
    src = ROOT / "target" / "debug" / "libaode_solve_py.so"
    if not src.exists():  # e.g. macOS
        src = ROOT / "target" / "debug" / "libaode_solve_py.dylib"
    tmp = tempfile.mkdtemp(prefix="aode_solve_py_")
    shutil.copy(src, pathlib.Path(tmp) / "aode_solve_py.so")
    sys.path.insert(0, tmp)
    import aode_solve_py

    return aode_solve_py


def main():
    m = build_and_import()

    # render: parse -> render round trip
    assert m.render("y'^2 + y^2 - 1") == "y^2 + y'^2 + (-1)"

    # solve: the circle equation gives cos(x) at (1, 0)
    rep = json.loads(m.solve("y'^2 + y^2 - 1", order="6"))
    consts = sorted(c["value"] for c in rep["constants"])
    assert consts == ["-1", "1"], consts
    cos = next(t for t in rep["at_zero"] if t["y0"] == "1" and t["p0"] == "0")
    assert cos["guarantee"]
    terms = {t["num"]: t["coeff"] for t in cos["series"]["terms"]}
    assert terms[0] == "1" and terms[2] == "-1/2" and terms[4] == "1/24"
    assert cos["series"]["ramification"] == 1

    # solve: ramified class for 4 y'^2 y = 1
    rep = json.loads(m.solve("4*y'^2*y - 1", order="2"))
    cls = rep["at_zero"][0]
    assert cls["series"]["ramification"] == 3
    assert cls["conjugacy_class"] is not None

    # generic: linear equation y' = y gives the exponential coefficients
    gens = json.loads(m.generic("y' - y", order="5"))
    assert gens[0]["coeffs"][:5] == ["_CC", "_CC", "1/2*_CC", "1/6*_CC", "1/24*_CC"]

    # prolong: extend 1 + x for y' = y to order 4
    ser = json.loads(m.prolong("y' - y", "1 + x", order="5"))
    terms = {t["num"]: t["coeff"] for t in ser["terms"]}
    assert terms[2] == "1/2" and terms[3] == "1/6" and terms[4] == "1/24"

    # algebraic: minimal polynomial decisions
    alg = json.loads(m.algebraic("y'^2 - y"))["algebraic"]
    assert alg["minimal_polynomial"] != "none"
    none = json.loads(m.algebraic("y' - y"))["algebraic"]
    assert none["minimal_polynomial"] == "none"

    # errors surface as ValueError
    try:
        m.solve("y'/y - 1")
    except ValueError as e:
        assert "not polynomial" in str(e)
    else:
        raise AssertionError("expected ValueError for a non-polynomial input")

    print("python smoke test: all checks passed")


if __name__ == "__main__":
    main()
