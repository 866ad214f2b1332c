"""Layout and sector checks against hand-computed geometry."""

import numpy as np
import pytest

from intercell.geometry import (NetworkLayout, sample_sector, sector_area,
                                sector_quadrature, sector_vertices)

R = 700.0


def test_nineteen_aps_origin_first():
    lay = NetworkLayout(R)
    assert lay.n_aps == 19
    assert np.all(lay.positions[0] == 0.0)


def test_ring_radii_and_counts():
    lay = NetworkLayout(R)
    r = np.hypot(*lay.positions.T)
    for target, count in ((np.sqrt(3.0) * R, 6), (3.0 * R, 6),
                          (2.0 * np.sqrt(3.0) * R, 6)):
        assert np.sum(np.isclose(r, target, rtol=1e-12)) == count


def test_invalid_radius_rejected():
    with pytest.raises(ValueError):
        NetworkLayout(0.0)


def test_fr1_is_everyone_but_the_serving_ap():
    idx = NetworkLayout(R).interferer_indices("FR1")
    assert list(idx) == list(range(1, 19))


def test_fr3_is_the_six_aps_at_3r():
    lay = NetworkLayout(R)
    idx = lay.interferer_indices("FR3")
    assert len(idx) == 6
    r = np.hypot(*lay.positions[idx].T)
    assert np.allclose(r, 3.0 * R, rtol=1e-12)


def test_unknown_reuse_rejected():
    with pytest.raises(ValueError):
        NetworkLayout(R).interferer_indices("FR2")


def test_distances_shape_and_values():
    lay = NetworkLayout(R)
    d = lay.distances(np.array([[0.0, 0.0]]))
    assert d.shape == (1, 19)
    assert d[0, 0] == 0.0
    assert d[0, 1] == pytest.approx(np.sqrt(3.0) * R, rel=1e-14)


def test_sector_area_is_one_twelfth_of_the_hexagon():
    hexagon = 3.0 * np.sqrt(3.0) / 2.0 * R * R
    assert sector_area(R) == pytest.approx(hexagon / 12.0, rel=1e-14)


def _barycentric(pts, v):
    t = np.linalg.solve(np.column_stack([v[1] - v[0], v[2] - v[0]]),
                        (pts - v[0]).T)
    return t.T


def test_quadrature_weights_and_support():
    pts, w = sector_quadrature(R, 64)
    assert w.sum() == pytest.approx(1.0, abs=1e-14)
    bc = _barycentric(pts, sector_vertices(R))
    assert np.all(bc >= 0.0) and np.all(bc.sum(axis=1) <= 1.0)


def test_quadrature_mean_square_radius():
    # uniform on a triangle with one vertex at the origin: E r^2 = 5 R^2/12
    pts, w = sector_quadrature(R, 256)
    assert (pts ** 2).sum(axis=1) @ w == pytest.approx(5.0 * R * R / 12.0,
                                                       rel=1e-5)


def test_sampler_agrees_with_the_same_moment():
    rng = np.random.default_rng(0)
    pts = sample_sector(R, 400_000, rng)
    est = np.mean((pts ** 2).sum(axis=1))
    assert est == pytest.approx(5.0 * R * R / 12.0, rel=5e-3)


def test_sampler_stays_inside_the_sector():
    rng = np.random.default_rng(1)
    bc = _barycentric(sample_sector(R, 10_000, rng), sector_vertices(R))
    assert np.all(bc >= -1e-12) and np.all(bc.sum(axis=1) <= 1.0 + 1e-12)


def test_symmetry_maps_permute_the_ap_set():
    lay = NetworkLayout(R)
    maps = lay.symmetry_maps()
    assert len(maps) == 12
    for mat in maps:
        mapped = lay.positions @ mat.T
        d = np.linalg.norm(mapped[:, None, :] - lay.positions[None, :, :],
                           axis=2)
        hits = np.isclose(d, 0.0, atol=1e-6 * R).sum(axis=1)
        assert np.all(hits == 1)


def test_symmetry_maps_are_isometries():
    for mat in NetworkLayout(R).symmetry_maps():
        assert np.allclose(mat @ mat.T, np.eye(2), atol=1e-12)
