# -*- coding: utf-8 -*-
# *************************************
# elastoslab: free-boundary elastodynamics laboratory
#
# Copyright (c) 2021 Calysto Developers
#
# *************************************

import pytest

from elastoslab import geometry
from elastoslab.verify import (
    CHECKS,
    CheckResult,
    SEEDED,
    check_boundary_norm,
    check_constraint_drift,
    check_elliptic_manufactured,
    check_equilibrium,
    check_force_oracle,
    check_ig0_round_trip,
    check_mollifier_loss,
    check_smoother,
    check_spectral_derivative,
    run_checks,
)


def test_check_names():
    names = [name for name, function in CHECKS]

    assert len(names) == len(set(names))
    with pytest.raises(ValueError):
        run_checks(n=8, names=["no_such_check"], quiet=True)


def test_check_result():
    result = CheckResult("demo", True, {"error": 1e-12}, "error <= 1e-10")

    assert result
    assert result.line().startswith("PASS demo")
    assert "error=1e-12" in result.line()
    assert result.to_json() == {
        "name": "demo",
        "passed": True,
        "measured": {"error": 1e-12},
        "criterion": "error <= 1e-10",
    }
    assert not CheckResult("demo", False, {}, "")


def test_cheap_checks_pass():
    assert check_spectral_derivative(16)
    assert check_boundary_norm(16)
    assert check_ig0_round_trip(8, count=4)
    assert check_force_oracle(16)


def test_equilibrium_check():
    result = check_equilibrium(16, T=0.02)

    assert result, result.line()
    assert result.measured["drift"] == 0.0
    assert result.measured["T"] >= 0.02


def test_force_oracle_catches_sign_flip(monkeypatch):
    elastic_force = geometry.elastic_force
    monkeypatch.setattr(geometry, "elastic_force", lambda G0, eta: elastic_force(G0, eta) * -1.0)

    result = check_force_oracle(16)

    assert not result
    assert result.measured["relative_error"] > 0.1


def test_run_checks():
    results = run_checks(n=16, names=["spectral_derivative", "boundary_norm"], show_progress=False, quiet=True)

    assert [result.name for result in results] == ["spectral_derivative", "boundary_norm"]
    assert all(results)


def test_raising_check_is_a_failure(monkeypatch):
    import elastoslab.verify as verify

    def broken(n):
        raise RuntimeError("boom")

    monkeypatch.setattr(verify, "CHECKS", [("broken", broken)])
    results = verify.run_checks(n=8, quiet=True)

    assert len(results) == 1
    assert not results[0]
    assert "boom" in results[0].criterion


def test_seeded_checks_take_a_seed():
    names = [name for name, function in CHECKS]

    assert set(SEEDED) <= set(names)
    results = run_checks(n=8, names=["ig0_round_trip"], seed=5, show_progress=False, quiet=True)
    assert results[0], results[0].line()


def test_elliptic_manufactured_rates():
    result = check_elliptic_manufactured(16)

    assert result.measured["laplace_rate"] >= 3.0
    assert result.measured["pressure_rate"] >= 3.0
    assert result.measured["pressure_error"] < 1e-4


def test_constraint_drift_short_run():
    result = check_constraint_drift(16, T=0.004, dt=2e-3, kappa=0.2)

    for name in ("J_minus_1", "div_A_v", "F_identity"):
        assert result.measured[name] <= 1e-4
        assert name + "_order" in result.measured


def test_mollifier_loss_slopes():
    result = check_mollifier_loss(seed=3)

    assert abs(result.measured["slope_s0"] + 1.0) <= 0.15
    assert abs(result.measured["noise_slope_s0"] + 1.0) <= 0.15


def test_smoother_is_bounded():
    result = check_smoother(16)

    assert result, result.line()
    assert result.measured["min_ratio"] > 0.5
