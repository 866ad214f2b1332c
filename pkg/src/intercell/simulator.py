"""Brute-force Monte Carlo reference for the total interference gain.

Two samplers: the exact one places the user uniformly in the sector per
draw and applies the position-dependent path loss of every co-channel AP;
the approximate one replaces path loss by its positional average lambda_n
(the modeling shortcut whose quality the figures probe). Both stream in
fixed-size chunks with one RNG stream per chunk, so results are identical
for any thread count and memory stays flat at any draw count.

Raw moments are accumulated as per-chunk sums combined with math.fsum.
Draw counts up to the sorting threshold keep the full sample (sorted) for
exact quantiles and KS statistics; above it a fixed log-binned sketch
provides approximate quantiles.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from .config import Scenario
from .geometry import sample_sector
from .propagation import average_path_losses, natural_sigma, path_gain

CHUNK = 250_000
SORT_LIMIT = 10_000_000

# fixed sketch grid: 30 decades at 80 bins each
_SKETCH_EDGES = np.geomspace(1e-15, 1e15, 2401)


@dataclass(frozen=True)
class SimResult:
    n: int
    moment_sums: tuple  # fsum-combined sums of G, G^2, G^3
    counts: np.ndarray  # sketch counts, len(_SKETCH_EDGES) + 1 with flows
    sample: np.ndarray | None

    def moment(self, k: int) -> float:
        if not 1 <= k <= 3:
            raise ValueError("tracked moments are k = 1, 2, 3")
        return self.moment_sums[k - 1] / self.n

    @property
    def mean(self) -> float:
        return self.moment(1)

    def quantile(self, q: float) -> float:
        if not 0.0 < q < 1.0:
            raise ValueError("q must lie in (0, 1)")
        if self.sample is not None:
            return float(self.sample[min(int(q * self.n), self.n - 1)])
        c = np.cumsum(self.counts) / self.n
        i = int(np.searchsorted(c, q))
        # interpolate inside the bin, log scale; flows clamp to the grid ends
        if i == 0:
            return float(_SKETCH_EDGES[0])
        if i >= len(self.counts) - 1:
            return float(_SKETCH_EDGES[-1])
        lo, hi = _SKETCH_EDGES[i - 1], _SKETCH_EDGES[i]
        c0 = c[i - 1]
        frac = (q - c0) / max(c[i] - c0, 1e-300)
        return float(lo * (hi / lo) ** frac)

    def ks_distance(self, cdf) -> float:
        """Exact sup distance between the empirical cdf and a model cdf."""
        if self.sample is None:
            raise ValueError("KS needs the retained sample; draw fewer points")
        f = np.asarray(cdf(self.sample), dtype=float)
        i = np.arange(self.n, dtype=float)
        return float(np.max(np.maximum(f - i / self.n, (i + 1.0) / self.n - f)))


def _chunk_stream(seed: int, chunk_idx: int) -> np.random.Generator:
    ss = np.random.SeedSequence(entropy=seed, spawn_key=(chunk_idx,))
    return np.random.Generator(np.random.PCG64(ss))


def _run(scenario: Scenario, draws: int, seed: int, threads: int,
         exact: bool, interferers=None) -> SimResult:
    if draws < 1:
        raise ValueError("need at least one draw")
    layout = scenario.layout()
    if interferers is None:
        idx = layout.interferer_indices(scenario.reuse)
        lam = scenario.lambdas()
    else:
        idx = np.asarray(interferers, dtype=np.intp)
        lam = average_path_losses(layout, scenario.reuse, scenario.gamma,
                                  scenario.d_ref, indices=idx)
    sigma = natural_sigma(scenario.sigma_db)
    keep = draws <= SORT_LIMIT

    bounds = [(c * CHUNK, min((c + 1) * CHUNK, draws))
              for c in range(-(-draws // CHUNK))]

    def one_chunk(args):
        c, (lo, hi) = args
        m = hi - lo
        rng = _chunk_stream(seed, c)
        if len(idx) == 0:
            g = np.zeros(m)
        elif exact:
            pts = sample_sector(scenario.radius, m, rng)
            d = layout.distances(pts, idx)
            g = path_gain(d, scenario.gamma, scenario.d_ref)
            g *= rng.exponential(1.0, size=d.shape)
            if sigma > 0.0:
                g *= np.exp(rng.normal(-0.5 * sigma * sigma, sigma, size=d.shape))
            g = g.sum(axis=1)
        else:
            e = rng.exponential(1.0, size=(m, len(idx)))
            if sigma > 0.0:
                e *= np.exp(rng.normal(-0.5 * sigma * sigma, sigma, size=e.shape))
            g = e @ lam
        sums = (float(g.sum()), float((g * g).sum()), float((g * g * g).sum()))
        inner, _ = np.histogram(g, bins=_SKETCH_EDGES)
        counts = np.concatenate(([np.count_nonzero(g < _SKETCH_EDGES[0])], inner,
                                 [np.count_nonzero(g >= _SKETCH_EDGES[-1])]))
        return sums, counts, (g if keep else None)

    tasks = list(enumerate(bounds))
    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as ex:
            parts = list(ex.map(one_chunk, tasks))
    else:
        parts = [one_chunk(t) for t in tasks]

    m1 = math.fsum(p[0][0] for p in parts)
    m2 = math.fsum(p[0][1] for p in parts)
    m3 = math.fsum(p[0][2] for p in parts)
    counts = np.sum([p[1] for p in parts], axis=0)
    sample = None
    if keep:
        sample = np.concatenate([p[2] for p in parts])
        sample.sort()
    return SimResult(draws, (m1, m2, m3), counts, sample)


def simulate_exact(scenario: Scenario, draws: int, seed: int | None = None,
                   threads: int = 1, interferers=None) -> SimResult:
    """Sample G with per-draw user positions and exact path loss."""
    return _run(scenario, draws, scenario.seed if seed is None else seed,
                threads, exact=True, interferers=interferers)


def simulate_approx(scenario: Scenario, draws: int, seed: int | None = None,
                    threads: int = 1, interferers=None) -> SimResult:
    """Sample G with the position-averaged path losses lambda_n."""
    return _run(scenario, draws, scenario.seed if seed is None else seed,
                threads, exact=False, interferers=interferers)
