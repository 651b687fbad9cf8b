"""Smoke tests for the python bindings.

Run against the CMake build tree (PYTHONPATH pointing at the directory
holding the _delsarte extension) or an installed delsarte_ops wheel.
"""

import math
import tempfile

import pytest

try:
    import delsarte_ops as ops
except ImportError:
    import _delsarte as ops


def test_adjoint_scenario_passes():
    with tempfile.TemporaryDirectory() as out:
        report = ops.run("adjoint", out=out)
    assert report["overall"] is True
    assert report["records"]
    for record in report["records"]:
        assert record["pass"] is True


def test_unknown_subcommand_raises():
    with pytest.raises(ops.DelsarteError):
        with tempfile.TemporaryDirectory() as out:
            ops.run("frobnicate", out=out)


def test_single_soliton_matches_closed_form():
    sol = ops.kdv_soliton([1.0], [0.0], tlo=-0.1, thi=0.1, nt=3,
                          xlo=-20.0, xhi=20.0, nx=2049)
    nx = len(sol["x"])
    assert len(sol["u"]) == 3 * nx
    # middle time slice is t = 0: u = -2 sech^2(x)
    worst = 0.0
    for j in range(3, nx - 3):
        x = sol["x"][j]
        expect = -2.0 / math.cosh(x) ** 2
        worst = max(worst, abs(sol["u"][nx + j] - expect))
    assert worst < 1e-3
    for m in sol["mass"]:
        assert abs(m + 4.0) < 1e-3
    assert "u_t - 6 u u_x + u_xxx" in sol["convention"]


def test_dress_schrodinger_routes_agree():
    res = ops.dress_schrodinger("x^2 - 1", "exp(-x^2/2)", lambda_=0.0,
                                weight=1.0, xlo=-10.0, xhi=10.0, nx=8193)
    assert res["mismatch"] < 1e-3
    assert len(res["u_tilde"]) == len(res["x"])


def test_dress_schrodinger_rejects_stale_family():
    with pytest.raises(ops.DelsarteError):
        # cosine is not an eigenfunction of the shifted oscillator
        ops.dress_schrodinger("x^2 - 1", "cos(x)", lambda_=0.0,
                              weight=1.0, xlo=-10.0, xhi=10.0, nx=2049)
