"""Scenario file format and overrides."""

import numpy as np
import pytest

from intercell.config import (Scenario, dump_scenario, load_scenario,
                              with_overrides)


def test_defaults():
    s = Scenario()
    assert s.d_ref == 1400.0
    assert s.reuse == "FR1"
    assert s.layout().radius == 700.0


def test_validation():
    with pytest.raises(ValueError):
        Scenario(radius=-1.0)
    with pytest.raises(ValueError):
        Scenario(sigma_db=-3.0)
    with pytest.raises(ValueError, match="reuse"):
        Scenario(reuse="FR7")


def test_dump_load_roundtrip(tmp_path):
    s = Scenario(radius=650.0, gamma=3.7, d_ref_multiplier=1.5,
                 sigma_db=7.25, reuse="FR3", seed=99)
    path = tmp_path / "scenario.cfg"
    dump_scenario(s, path)
    assert load_scenario(path) == s


def test_roundtrip_preserves_awkward_floats(tmp_path):
    s = Scenario(gamma=np.nextafter(3.2, 4.0))
    path = tmp_path / "s.cfg"
    dump_scenario(s, path)
    assert load_scenario(path).gamma == s.gamma


def test_load_accepts_comments_and_blank_lines(tmp_path):
    path = tmp_path / "s.cfg"
    path.write_text(
        "# scenario\n\nradius = 700\ngamma = 3.2  # pathloss exponent\n"
        "d_ref_multiplier = 2\nsigma_db = 0\nreuse = FR1\nseed = 42\n")
    assert load_scenario(path) == Scenario()


def test_load_unknown_key_names_line(tmp_path):
    path = tmp_path / "s.cfg"
    path.write_text("radius = 700\nbogus = 1\n")
    with pytest.raises(ValueError, match=r":2: unknown key 'bogus'"):
        load_scenario(path)


def test_load_duplicate_key_names_line(tmp_path):
    path = tmp_path / "s.cfg"
    path.write_text("radius = 700\nradius = 650\n")
    with pytest.raises(ValueError, match=r":2: duplicate key"):
        load_scenario(path)


def test_load_unparseable_value_names_line_and_type(tmp_path):
    path = tmp_path / "s.cfg"
    path.write_text("radius = seven hundred\n")
    with pytest.raises(ValueError, match=r":1: cannot parse 'seven hundred' as float"):
        load_scenario(path)


def test_load_missing_equals_sign(tmp_path):
    path = tmp_path / "s.cfg"
    path.write_text("radius 700\n")
    with pytest.raises(ValueError, match=r":1: expected 'key = value'"):
        load_scenario(path)


def test_load_missing_fields_are_listed(tmp_path):
    path = tmp_path / "s.cfg"
    path.write_text("radius = 700\ngamma = 3.2\n")
    with pytest.raises(ValueError, match="missing required field"):
        load_scenario(path)


def test_with_overrides():
    s = Scenario()
    t = with_overrides(s, sigma_db=9.0, reuse="FR3")
    assert (t.sigma_db, t.reuse) == (9.0, "FR3")
    assert t.radius == s.radius
    assert with_overrides(s) is s
    assert with_overrides(s, sigma_db=None) is s


def test_lambdas_cached_and_readonly():
    s = Scenario()
    a = s.lambdas()
    b = Scenario().lambdas()
    assert a is b
    with pytest.raises(ValueError):
        a[0] = 0.0


def test_canonical_text_is_stable():
    text = Scenario().canonical_text()
    assert text.splitlines()[0] == "radius = 700"
    assert "reuse = FR1" in text
    assert Scenario().canonical_text() == text
