"""Three-factor downlink channel gain: path loss, Rayleigh fading, shadowing.

Power gains are normalized to the path loss at a reference distance d_ref,
so the gain from AP n to a user at distance r is

    g_n = (d_ref / r)**gamma * g_fading * g_shadow

with g_fading standard exponential (Rayleigh envelope) and g_shadow a
unit-mean lognormal whose dB standard deviation is sigma_db. All three
factors are independent across APs and draws.
"""

from __future__ import annotations

import numpy as np

from .geometry import NetworkLayout, sector_quadrature

# dB-to-natural-log conversion, 10/ln(10)
XI = 10.0 / np.log(10.0)


def natural_sigma(sigma_db: float) -> float:
    """Shadowing standard deviation of ln(gain) for a dB-domain spread."""
    if sigma_db < 0:
        raise ValueError("sigma_db must be nonnegative")
    return sigma_db / XI


def path_gain(distance, gamma: float, d_ref: float):
    """Normalized path-loss power gain (d_ref/r)**gamma."""
    return (d_ref / np.asarray(distance, dtype=float)) ** gamma


def sample_fading(shape, rng: np.random.Generator):
    return rng.exponential(1.0, size=shape)


def sample_shadowing(sigma_db: float, shape, rng: np.random.Generator):
    """Unit-mean lognormal shadowing; degenerates to 1 at sigma_db = 0."""
    s = natural_sigma(sigma_db)
    if s == 0.0:
        return np.ones(shape)
    return np.exp(rng.normal(-0.5 * s * s, s, size=shape))


def average_path_losses(layout: NetworkLayout, reuse: str, gamma: float,
                        d_ref: float, quad_n: int = 512,
                        indices=None) -> np.ndarray:
    """Per-interferer mean path gain over a user uniform in the sector.

    Returns the area average of (d_ref/r_n)**gamma for each co-channel AP
    of the reuse pattern (or the explicit AP `indices`, which then override
    `reuse`), in AP-index order. The user never leaves the serving cell, so
    every r_n is bounded away from zero and the average is finite for any
    gamma.
    """
    idx = layout.interferer_indices(reuse) if indices is None else \
        np.asarray(indices, dtype=np.intp)
    pts, w = sector_quadrature(layout.radius, quad_n)
    d = layout.distances(pts, idx)
    return path_gain(d, gamma, d_ref).T @ w
