import math

import numpy as np
import pytest
from numpy.testing import assert_allclose

from coulomb_sites import DIAMOND_REFLECTIONS, V_STAR, diamond
from coulomb_sites.config import ConfigError, fixture_names, load_config, load_fixture, parse_config


def test_fixture_names():
    assert {"diamond_vstar", "diamond_vgc", "diamond_halffilling", "diamond_grid",
            "search_k6", "toy_k2"} <= set(fixture_names())


def test_diamond_fixture_full_precision():
    rc = load_fixture("diamond_vstar")
    assert rc.geometry_source == "diamond"
    assert_allclose(rc.config.points, diamond().points, rtol=0, atol=0)
    assert rc.config.points[4, 1] == math.sqrt(0.51)
    assert_allclose(rc.potential, V_STAR)
    assert rc.symmetry == [tuple(p) for p in DIAMOND_REFLECTIONS]


def test_half_filling_density():
    rc = load_fixture("diamond_halffilling")
    assert_allclose(rc.density, 0.5)


def test_inline_points():
    rc = parse_config("[geometry]\npoints = [[0, 0], [2, 0]]\nexponent = 2.0\n"
                      "[potential]\nvalues = [-1, -1]\n")
    assert rc.config.K == 2 and rc.config.exponent_s == 2.0
    assert rc.require_potential().tolist() == [-1.0, -1.0]


def test_exponent_override():
    assert load_fixture("toy_k2", exponent=3.0).config.exponent_s == 3.0


def test_search_geometry_source():
    rc = parse_config("[search]\nK = 6\ntrials = 5\n")
    assert rc.geometry_source == "search" and rc.config is None
    with pytest.raises(ConfigError):
        rc.require_geometry()


def _error(text):
    with pytest.raises(ConfigError) as exc:
        parse_config(text, "run.toml")
    return str(exc.value)


def test_potential_length_reports_line():
    msg = _error("[geometry]\npoints = [[0, 0], [1, 0]]\n\n[potential]\nvalues = [1, 2, 3]\n")
    assert msg.startswith("run.toml:5:")
    assert "expected 2" in msg


def test_coincident_points_report_line():
    msg = _error("# header\n[geometry]\npoints = [[0, 0], [0, 0]]\n")
    assert msg.startswith("run.toml:3:")


def test_two_geometry_sources():
    msg = _error("[geometry]\npoints = [[0, 0], [1, 0]]\n[geometry.diamond]\na = 0.7\n")
    assert "exactly one geometry source" in msg


def test_unknown_section():
    assert _error("[geometry]\npoints = [[0, 0], [1, 0]]\n[plot]\nx = 1\n").startswith("run.toml:3:")


def test_bad_permutation():
    msg = _error("[geometry]\npoints = [[0, 0], [1, 0]]\nsymmetry = [[0, 0]]\n")
    assert msg.startswith("run.toml:3:") and "permutation" in msg


def test_degenerate_diamond():
    msg = _error("[geometry.diamond]\na = 1.0\nb = 0.5\nh = 0.3\n")
    assert msg.startswith("run.toml:1: [geometry.diamond]")


def test_toml_syntax_error():
    assert "run.toml" in _error("[geometry\npoints = 1\n")


def test_missing_file(tmp_path):
    with pytest.raises(ConfigError):
        load_config(tmp_path / "nope.toml")


def test_unknown_fixture():
    with pytest.raises(ConfigError, match="available"):
        load_fixture("nope")


def test_non_numeric_values():
    assert "list of numbers" in _error("[geometry]\npoints = [[0, 0], [1, 0]]\n"
                                       "[potential]\nvalues = [\"a\", 1]\n")


def test_density_half_filling_without_geometry():
    assert "half_filling" in _error("[density]\nhalf_filling = true\n")


def test_load_config_roundtrip(tmp_path):
    path = tmp_path / "c.toml"
    path.write_text("[geometry]\npoints = [[0, 0, 0], [1, 0, 0]]\n[density]\nvalues = [0.5, 0.5]\n")
    rc = load_config(path)
    assert rc.source == str(path)
    assert_allclose(rc.require_density(), [0.5, 0.5])
    assert np.isfinite(rc.config.energies).all()
