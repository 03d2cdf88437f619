import math
import os
from pathlib import Path

import numpy as np
import pytest

import imcf_lab as lab

SCENARIOS = Path(os.environ.get("IMCF_SCENARIO_DIR", Path(__file__).resolve().parents[2] / "scenarios"))


def test_latitude_circle_geometry():
    c = lab.latitude_circle(math.pi / 6, 64)
    assert len(c) == 64
    pts = c.points
    assert pts.shape == (64, 3)
    np.testing.assert_allclose(np.linalg.norm(pts, axis=1), 1.0, atol=1e-14)
    assert c.length == pytest.approx(2 * math.pi * 0.5, rel=2e-3)
    assert lab.convexity_check(c)["is_convex"]


def test_curve_from_points_round_trip():
    c = lab.great_circle(32)
    d = lab.SphericalCurve(c.points)
    np.testing.assert_array_equal(c.points, d.points)


def test_closed_forms():
    assert lab.cone_flat_time(math.pi / 3) == pytest.approx(math.log(2.0), abs=1e-14)
    assert lab.equator_time(math.pi) == pytest.approx(math.log(2.0), abs=1e-14)
    assert lab.smoothing_time(lab.unit_cube()) == pytest.approx(math.log(4.0 / 3.0), abs=1e-12)


def test_cube_link_is_a_right_triangle():
    link = lab.vertex_link(lab.unit_cube(), 0, 96)
    assert link.length == pytest.approx(1.5 * math.pi, abs=1e-12)
    assert lab.hemisphere_report(link)["contained_in_open_hemisphere"]


def test_latitude_flow_obeys_the_length_law():
    out = lab.evolve_spherical(lab.latitude_circle(math.pi / 4, 64), t_end=0.1, snapshot_interval=0.05)
    t, length = out["t"], out["measure"]
    assert t[-1] == pytest.approx(0.1)
    np.testing.assert_allclose(np.log(length / length[0]), t, atol=1e-3)
    exact = lab.latitude_circle_exact(math.pi / 4, 0.1)
    z = out["snapshots"][-1].points[:, 2]
    assert np.max(np.abs(np.arccos(np.clip(z, -1, 1)) - exact)) < 1e-3


def test_sphere_area_grows_exponentially():
    out = lab.evolve_axisym(lab.sphere_profile(1.0, 64), t_end=0.05, snapshot_interval=0.05)
    area = out["measure"]
    assert math.log(area[-1] / area[0]) == pytest.approx(out["t"][-1], abs=1e-3)


def test_random_polygons_are_convex():
    for seed in range(5):
        c = lab.random_convex_polygon(seed, 128)
        assert lab.convexity_check(c)["is_convex"]
        assert c.length < 2 * math.pi


def test_config_round_trip_and_errors():
    cfg = lab.load_config(SCENARIOS / "wedge.yaml")
    assert cfg.scenario == "wedge"
    assert lab.parse_config(cfg.emit()) == cfg
    with pytest.raises(lab.UsageError, match="geometry"):
        lab.parse_config("name: x\nscenario: wedge\n")
    assert issubclass(lab.UsageError, lab.Error)


def test_run_wedge_scenario(tmp_path):
    cfg = lab.load_config(SCENARIOS / "wedge.yaml")
    rep = lab.run_scenario(cfg, tmp_path, SCENARIOS)
    assert rep["passed"]
    assert {c["name"] for c in rep["checks"]} >= {"wedge_classify", "area_comparison"}
    assert (tmp_path / "wedge" / "summary.json").is_file()


def test_battery_subset():
    rows = lab.run_battery("fast", only=[7, 8])
    assert [r["id"] for r in rows] == [7, 8]
    assert all(r["pass"] for r in rows)
    with pytest.raises(lab.UsageError):
        lab.run_battery("nightly")
