"""Hexagonal 19-cell network layout and the canonical serving sector.

The serving access point sits at the origin of a two-ring hexagonal grid
(6 first-ring neighbours, 12 second-ring). Cells are regular hexagons of
corner radius R with a corner on the positive x axis, so the first-ring
neighbours sit at distance sqrt(3)*R along the corner bisectors. User
positions are drawn from one twelfth of the serving cell (a right triangle
between a corner bisector and the corner itself); every statistic of the
full cell equals its restriction to that sector by symmetry.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

SQRT3 = np.sqrt(3.0)


def _grid_positions(radius: float) -> np.ndarray:
    pts = [(0.0, 0.0)]
    for k in range(6):  # first ring, corner-bisector directions
        a = np.deg2rad(30.0 + 60.0 * k)
        pts.append((SQRT3 * radius * np.cos(a), SQRT3 * radius * np.sin(a)))
    for k in range(12):  # second ring alternates 3R and 2*sqrt(3)*R
        a = np.deg2rad(30.0 * k)
        d = 3.0 * radius if k % 2 == 0 else 2.0 * SQRT3 * radius
        pts.append((d * np.cos(a), d * np.sin(a)))
    return np.asarray(pts)


@dataclass(frozen=True)
class NetworkLayout:
    """Access-point positions for the 19-cell grid.

    Index 0 is the serving AP; 1..6 the first ring; 7..18 the second ring.
    """

    radius: float = 700.0
    positions: np.ndarray = field(init=False, repr=False)

    def __post_init__(self):
        if self.radius <= 0:
            raise ValueError("cell radius must be positive")
        object.__setattr__(self, "positions", _grid_positions(self.radius))

    @property
    def n_aps(self) -> int:
        return len(self.positions)

    def interferer_indices(self, reuse: str) -> np.ndarray:
        """AP indices transmitting co-channel for a reuse pattern.

        FR1 reuses every cell (all 18 neighbours interfere). FR3 keeps only
        the co-channel subset at distance sqrt(3*3)*R = 3R, which is the six
        second-ring APs on the corner directions.
        """
        if reuse == "FR1":
            return np.arange(1, self.n_aps)
        if reuse == "FR3":
            d = np.hypot(*self.positions.T)
            idx = np.nonzero(np.abs(d - 3.0 * self.radius) < 1e-9 * self.radius)[0]
            return idx
        raise ValueError(f"unknown reuse pattern {reuse!r} (expected FR1 or FR3)")

    def distances(self, points: np.ndarray, indices=None) -> np.ndarray:
        """Distances from each point (shape (k, 2)) to each listed AP."""
        points = np.atleast_2d(np.asarray(points, dtype=float))
        aps = self.positions if indices is None else self.positions[indices]
        return np.hypot(points[:, 0, None] - aps[None, :, 0],
                        points[:, 1, None] - aps[None, :, 1])

    # the grid is invariant under the dihedral group of order 12
    def symmetry_maps(self):
        maps = []
        for k in range(6):
            a = np.deg2rad(60.0 * k)
            rot = np.array([[np.cos(a), -np.sin(a)], [np.sin(a), np.cos(a)]])
            maps.append(rot)
            refl = np.array([[1.0, 0.0], [0.0, -1.0]])  # mirror across x axis
            maps.append(rot @ refl)
        return maps


def sector_vertices(radius: float) -> np.ndarray:
    """Vertices of the canonical sector triangle.

    Cell center, the corner on the x axis, and the midpoint of the hexagon
    edge leaving that corner counterclockwise. Area is 1/12 of the hexagon.
    """
    return np.array([
        [0.0, 0.0],
        [radius, 0.0],
        [0.75 * radius, SQRT3 * radius / 4.0],
    ])


def sector_area(radius: float) -> float:
    v = sector_vertices(radius)
    a, b = v[1] - v[0], v[2] - v[0]
    return 0.5 * abs(a[0] * b[1] - a[1] * b[0])


def sample_sector(radius: float, n: int, rng: np.random.Generator) -> np.ndarray:
    """Draw n points uniformly by area from the sector triangle."""
    v = sector_vertices(radius)
    r1 = np.sqrt(rng.random(n))
    r2 = rng.random(n)
    # standard affine warp of the unit square onto a triangle
    return (np.outer(r1 * (1.0 - r2), v[1]) + np.outer(r1 * r2, v[2]))


def sector_quadrature(radius: float, n: int = 512):
    """Midpoint-type quadrature over the sector, exact for area averages.

    Splits the triangle into n*n congruent subtriangles and returns their
    centroids with equal weights. The rule is second order; n=512 changes
    area averages of the path-loss kernel by ~2e-6 relative to n=256.
    """
    v = sector_vertices(radius)
    i, j = np.meshgrid(np.arange(n), np.arange(n), indexing="ij")
    keep = (i + j) < n
    iu, ju = i[keep], j[keep]
    # upward subtriangle centroids, then downward ones where they exist
    b1 = np.concatenate([(iu + 1.0 / 3.0), (i[(i + j) < n - 1] + 2.0 / 3.0)]) / n
    b2 = np.concatenate([(ju + 1.0 / 3.0), (j[(i + j) < n - 1] + 2.0 / 3.0)]) / n
    pts = np.outer(b1, v[1]) + np.outer(b2, v[2])
    w = np.full(len(pts), 1.0 / len(pts))
    return pts, w
