"""Smoke tests for the python bindings against the bundled scenarios."""

import os

import numpy as np
import pytest

cg = pytest.importorskip("circlegame")

SCENARIOS = os.environ.get("CIRCLEGAME_SCENARIO_DIR", "scenarios")


def scenario(name):
    return os.path.join(SCENARIOS, name)


def test_grid_nodes():
    x = cg.grid_nodes(512)
    assert x.shape == (512,)
    assert x[0] == 0.0
    assert abs(x[1] - 2.0 * np.pi / 512.0) < 1e-15
    with pytest.raises(Exception):
        cg.grid_nodes(7)


def test_solve_baseline():
    r = cg.solve(scenario("two_region_symmetric.json"))
    assert r["checks_passed"]
    assert len(r["alpha"]) == 2
    assert max(r["alpha_residual"]) < 1e-8

    b = r["nash"]["b"]
    assert np.allclose(b, 0.006339700317877683, atol=1e-12)

    # symmetric configuration: both players see the same shadow-cost shape
    a1, a2 = r["alpha"]
    assert np.max(np.abs(a1 - np.roll(a2, -256))) < 1e-10

    assert np.all(r["p_inf"] > 0.0)
    assert r["cooperative"] is not None
    assert np.all(r["nash"]["i"] > r["cooperative"]["i"])

    series = cg.alpha_series(np.pi, 1.0, 0.03, 0.2, 0.5, 64, 512)
    assert np.max(np.abs(series - a1)) < 1e-4


def test_advection_series_matches_solve():
    r = cg.solve(scenario("advection_eastward.json"))
    series = cg.alpha_series_advection(np.pi, 1.0, 0.03, 0.2, 0.5, -0.08, 64, 512)
    assert np.max(np.abs(series - r["alpha"][0])) < 1e-4


def test_simulate_fills_toward_steady_state():
    r = cg.simulate(scenario("two_region_symmetric.json"), T=5.0, dt=0.01, n_samples=10)
    assert r["p"].shape == (11, 512)
    assert np.all(np.diff(r["mass"]) > 0.0)  # filling up from an empty circle
    assert np.all(np.diff(r["gap"]) < 0.0)  # approaching the long-run profile
    assert r["p"].min() >= -1e-12


def test_welfare_entries():
    r = cg.solve(scenario("disutility_split.json"))
    w = r["welfare"]
    assert [e["player"] for e in w] == [1, 2]
    for e in w:
        assert e["v"] == e["q"] - e["alpha_inner"]
