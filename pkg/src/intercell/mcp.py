"""Panel-based Monte Carlo combination of per-link typical sets.

The N interferer gains are represented by one shared typical set scaled by
each link's average path loss. The M strongest links (the compelled ones)
are combined exhaustively over their J intervals, giving J**M blocks of P
points each; every remaining link contributes, per block, one interval
drawn from a loaded distribution restricted to its first j_cut intervals.
Randomly permuting each interval before the element-wise block sum makes
the P pairings inside a block behave like independent draws.

Restricting the non-compelled draws to the j_cut head intervals removes a
little mass from their tails and overweights their heads; the closed-form
factors f_minus and f_plus rescale the compelled amplitudes so the weighted
mean of the panel is preserved exactly.

Iteration averaging happens on two levels. The panel's blocks are put in
canonical (sorted) order and averaged slot-wise into a running mean;
averaging sorted blocks converges to per-block quantile profiles, so the
within-block dispersion survives and the weighted mean is untouched (all
slots of a block share one weight). The histogram, however, is NOT read
off the averaged panel: slot averaging smooths away the across-iteration
variability of the random interval draws, which carries a visible part of
the distribution's spread. Instead, each iteration's panel is histogrammed
on fixed bin edges (chosen from the first iteration's weighted quantiles)
and the bin masses are averaged, which estimates the true draw mixture.

RNG streams are derived per (seed, iteration, role) with role 0 feeding
interval draws and role 1 permutations. Block sums never depend on the
permutations, so a mean-only run that touches just role 0 reproduces the
full run's weighted-mean trajectory exactly at a fraction of the cost.
"""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from itertools import product

import numpy as np

from .typical_set import PartitionSpec, TypicalSet, build_typical_set

DIVERGENCE_TOL = 0.02


@dataclass(frozen=True)
class McpConfig:
    m_compelled: int = 2
    j_cut: int = 3
    iterations: int = 20_000
    partition: PartitionSpec = field(default_factory=PartitionSpec)
    chunk: int = 64

    def __post_init__(self):
        if self.m_compelled < 1:
            raise ValueError("need at least one compelled link")
        # j_cut == J would leave no tail to reweight while the analytic
        # loading factor still assumes one, breaking mean preservation
        if not 1 <= self.j_cut < self.partition.j_intervals:
            raise ValueError("j_cut must leave at least one tail interval")
        if self.iterations < 1 or self.chunk < 1:
            raise ValueError("iterations and chunk must be positive")


def loaded_probabilities(masses: np.ndarray, j_cut: int):
    """Restriction of the interval masses to the first j_cut, renormalized."""
    head = np.asarray(masses, dtype=float)[:j_cut]
    alpha = 1.0 / head.sum()
    return alpha, alpha * head


def correction_factors(lambdas, m_compelled: int, j_cut: int):
    """Mean-preserving amplitude factors (f_minus, f_plus).

    With C the compelled and T the non-compelled path-loss sums and alpha
    the loading factor, f_plus = 1 + T/C recovers the tail mass the
    non-compelled links can never reach, and f_minus = 1 - (alpha-1) T/C
    compensates the head overweighting. Requires at least one non-compelled
    link; with none there is nothing to correct.
    """
    lam = np.sort(np.asarray(lambdas, dtype=float))[::-1]
    if not 1 <= m_compelled < len(lam):
        raise ValueError("m_compelled must satisfy 1 <= M < number of links")
    c = lam[:m_compelled].sum()
    if c <= 0:
        raise ValueError("compelled path-loss sum must be positive")
    t = lam[m_compelled:].sum()
    alpha = 1.0 / (1.0 - 10.0 ** -j_cut)
    f_minus = 1.0 - (alpha - 1.0) * t / c
    f_plus = 1.0 + t / c
    assert f_plus > 1.0 and f_minus <= 1.0
    return f_minus, f_plus


@dataclass(frozen=True)
class PanelSet:
    """J**M blocks of P amplitudes with per-block probability weights."""

    amplitudes: np.ndarray       # (B, P)
    block_weights: np.ndarray    # (B,), sums to 1
    combos: np.ndarray           # (B, M) interval index per compelled link

    @property
    def size(self) -> int:
        return self.amplitudes.size

    def element_weights(self) -> np.ndarray:
        p = self.amplitudes.shape[1]
        return np.repeat(self.block_weights / p, p)

    def weighted_mean(self) -> float:
        p = self.amplitudes.shape[1]
        return float(self.block_weights @ self.amplitudes.sum(axis=1) / p)

    def weighted_moment(self, k: int) -> float:
        p = self.amplitudes.shape[1]
        return float(self.block_weights @ (self.amplitudes ** k).sum(axis=1) / p)

    def ecdf(self):
        """Weighted ecdf knots (sorted amplitudes, cumulative mass)."""
        x = self.amplitudes.ravel()
        w = self.element_weights()
        order = np.argsort(x, kind="stable")
        return x[order], np.cumsum(w[order])


@dataclass(frozen=True)
class WeightedHistogram:
    edges: np.ndarray
    masses: np.ndarray

    @classmethod
    def from_weighted(cls, x, w, bins: int = 200, q_lo: float = 1e-4,
                      q_hi: float = 1.0 - 1e-6) -> "WeightedHistogram":
        """Log-spaced histogram between two weighted quantiles of the data."""
        x = np.asarray(x, dtype=float).ravel()
        w = np.asarray(w, dtype=float).ravel()
        order = np.argsort(x)
        xs, cw = x[order], np.cumsum(w[order])
        cw /= cw[-1]
        lo = xs[np.searchsorted(cw, q_lo)]
        hi = xs[min(np.searchsorted(cw, q_hi), len(xs) - 1)]
        if not 0.0 < lo < hi:
            raise ValueError("degenerate sample range for histogram")
        edges = np.geomspace(lo, hi, bins + 1)
        masses, _ = np.histogram(np.clip(x, lo, hi), bins=edges, weights=w)
        # clipping folds candidate outliers into the edge bins, keeping mass 1
        masses = masses / masses.sum()
        return cls(edges, masses)


def _tiled_identity(n_rows: int, p: int) -> np.ndarray:
    dtype = np.int16 if p < 2 ** 15 else np.int32
    return np.tile(np.arange(p, dtype=dtype), (n_rows, 1))


def _permutations(rng: np.random.Generator, n_rows: int, p: int) -> np.ndarray:
    idx = _tiled_identity(n_rows, p)
    rng.permuted(idx, axis=1, out=idx)
    return idx


def _draw_intervals(rng: np.random.Generator, n_links: int, n_blocks: int,
                    loaded_cum: np.ndarray) -> np.ndarray:
    u = rng.random((n_links, n_blocks))
    return np.searchsorted(loaded_cum, u, side="right").astype(np.intp)


def _gather_sum(acc, amps_by_link, rows_by_link, perms):
    """acc += sum over links of amps[link][rows[link], perm[link]], blockwise."""
    b, p = acc.shape
    for i, amps in enumerate(amps_by_link):
        perm = perms[i * b:(i + 1) * b]
        acc += amps[rows_by_link[i][:, None], perm]
    return acc


def combine_compelled(sets: list[TypicalSet], lambdas, f_minus: float,
                      f_plus: float, j_cut: int, rng: np.random.Generator) -> PanelSet:
    """Exhaustively combine the compelled links' intervals into blocks.

    sets and lambdas are index-aligned; amplitudes are scaled by each link's
    path loss, the first j_cut intervals additionally by f_minus and the
    rest by f_plus. Every interval is freshly permuted per use.
    """
    spec = sets[0].spec
    if any(s.spec != spec for s in sets):
        raise ValueError("all sets must share one partition")
    j, p = spec.j_intervals, spec.points_per_interval
    m = len(sets)
    amps = []
    for s, lam in zip(sets, lambdas):
        a = s.amplitudes * lam
        a[:j_cut] *= f_minus
        a[j_cut:] *= f_plus
        amps.append(a)
    combos = np.array(list(product(range(j), repeat=m)), dtype=np.intp)
    b = len(combos)
    acc = np.zeros((b, p))
    perms = _permutations(rng, m * b, p)
    _gather_sum(acc, amps, [combos[:, i] for i in range(m)], perms)
    d = spec.masses()
    weights = d[combos].prod(axis=1)
    return PanelSet(acc, weights, combos)


def add_noncompelled(panel: PanelSet, sets: list[TypicalSet], lambdas,
                     j_cut: int, rng_draw: np.random.Generator,
                     rng_perm: np.random.Generator) -> PanelSet:
    """Add one loaded-random interval per block from each remaining link.

    Draws all links' interval indices first (role-0 stream), then permutes
    (role-1 stream); block weights are untouched because the drawing itself
    carries the probabilities.
    """
    if not sets:
        return panel
    spec = sets[0].spec
    b, p = panel.amplitudes.shape
    _, loaded = loaded_probabilities(spec.masses(), j_cut)
    cum = np.cumsum(loaded)
    cum[-1] = 1.0
    rows = _draw_intervals(rng_draw, len(sets), b, cum)
    amps = [s.amplitudes * lam for s, lam in zip(sets, lambdas)]
    acc = panel.amplitudes.copy()
    perms = _permutations(rng_perm, len(sets) * b, p)
    _gather_sum(acc, amps, list(rows), perms)
    return PanelSet(acc, panel.block_weights, panel.combos)


def _stream(seed: int, iteration: int, role: int) -> np.random.Generator:
    ss = np.random.SeedSequence(entropy=seed, spawn_key=(iteration, role))
    return np.random.Generator(np.random.PCG64(ss))


@dataclass(frozen=True)
class McpResult:
    panel: PanelSet | None
    histogram: WeightedHistogram | None
    weighted_mean: float
    target_mean: float
    iterations: int
    mode: str

    @property
    def rel_deviation(self) -> float:
        return abs(self.weighted_mean - self.target_mean) / self.target_mean

    @property
    def diverged(self) -> bool:
        return self.rel_deviation > DIVERGENCE_TOL


def run_mcp(lambdas, sigma_db: float, config: McpConfig = McpConfig(),
            seed: int = 42, mode: str = "full", threads: int = 1,
            base_set: TypicalSet | None = None) -> McpResult:
    """Iterate the panel construction and average.

    mode "full" materializes the slot-averaged panel plus the histogram of
    per-iteration bin masses (see module docstring for why these differ);
    mode "mean" tracks only the weighted-mean trajectory, which is provably
    identical to the full mode's mean for the same seed (block sums are
    invariant under the within-block permutations).

    Iterations are processed in fixed-size chunks and the chunk partials
    are merged in chunk order, so the result does not depend on threads.
    """
    if mode not in ("full", "mean"):
        raise ValueError("mode must be 'full' or 'mean'")
    lam = np.sort(np.asarray(lambdas, dtype=float))[::-1]
    n = len(lam)
    m = config.m_compelled
    if not 1 <= m < n:
        raise ValueError("m_compelled must satisfy 1 <= M < number of links")
    spec = config.partition
    j, p = spec.j_intervals, spec.points_per_interval
    if base_set is None:
        base_set = build_typical_set(sigma_db, spec)
    if base_set.spec != spec:
        raise ValueError("base_set partition does not match the config")

    f_minus, f_plus = correction_factors(lam, m, config.j_cut)
    base = base_set.amplitudes
    comp = []
    for i in range(m):
        a = base * lam[i]
        a[:config.j_cut] *= f_minus
        a[config.j_cut:] *= f_plus
        comp.append(a)
    nonc = [base * lam[i] for i in range(m, n)]

    combos = np.array(list(product(range(j), repeat=m)), dtype=np.intp)
    b = len(combos)
    d = spec.masses()
    weights = d[combos].prod(axis=1)
    comp_rows = [combos[:, i] for i in range(m)]
    _, loaded = loaded_probabilities(d, config.j_cut)
    cum = np.cumsum(loaded)
    cum[-1] = 1.0

    # per-block compelled contribution to the block mean never changes
    comp_row_means = [a.mean(axis=1) for a in comp]
    comp_block_mean = sum(rm[combos[:, i]] for i, rm in enumerate(comp_row_means))
    nonc_row_means = np.array([a.mean(axis=1) for a in nonc])  # (N-M, J)

    def chunk_bounds(c):
        lo = c * config.chunk
        return lo, min(lo + config.chunk, config.iterations)

    n_chunks = -(-config.iterations // config.chunk)

    def one_panel(t):
        rows = _draw_intervals(_stream(seed, t, 0), n - m, b, cum)
        perms = _permutations(_stream(seed, t, 1), n * b, p)
        cur = np.zeros((b, p))
        _gather_sum(cur, comp, comp_rows, perms[:m * b])
        _gather_sum(cur, nonc, list(rows), perms[m * b:])
        return cur

    elem_w = np.repeat(weights / p, p)
    edges = None
    if mode == "full":
        # fixed histogram support, so per-iteration masses can be averaged
        edges = WeightedHistogram.from_weighted(
            one_panel(0).ravel(), elem_w).edges

    def full_chunk(c):
        lo, hi = chunk_bounds(c)
        acc = np.zeros((b, p))
        hacc = np.zeros(len(edges) - 1)
        for t in range(lo, hi):
            cur = one_panel(t)
            h, _ = np.histogram(np.clip(cur.ravel(), edges[0], edges[-1]),
                                bins=edges, weights=elem_w)
            hacc += h
            cur.sort(axis=1)  # canonical slot order, see module docstring
            acc += cur
        return acc, hacc

    def mean_chunk(c):
        lo, hi = chunk_bounds(c)
        total = 0.0
        for t in range(lo, hi):
            rows = _draw_intervals(_stream(seed, t, 0), n - m, b, cum)
            block_mean = comp_block_mean + nonc_row_means[
                np.arange(n - m)[:, None], rows].sum(axis=0)
            total += float(weights @ block_mean)
        return total

    work = full_chunk if mode == "full" else mean_chunk
    total = None

    def merge(acc, part):
        if acc is None:
            return part
        if mode == "full":
            return (acc[0] + part[0], acc[1] + part[1])
        return acc + part

    if threads > 1:
        # merge strictly in chunk order with a bounded submission window,
        # so memory stays flat and the result never depends on scheduling
        with ThreadPoolExecutor(max_workers=threads) as ex:
            pending = {}
            next_submit = 0
            for next_merge in range(n_chunks):
                while next_submit < min(next_merge + 2 * threads, n_chunks):
                    pending[next_submit] = ex.submit(work, next_submit)
                    next_submit += 1
                total = merge(total, pending.pop(next_merge).result())
    else:
        for c in range(n_chunks):
            total = merge(total, work(c))

    target = float(lam.sum())
    if mode == "full":
        amp_total, hist_total = total
        panel = PanelSet(amp_total / config.iterations, weights, combos)
        hist = WeightedHistogram(edges, hist_total / hist_total.sum())
        mean = panel.weighted_mean()
        return McpResult(panel, hist, mean, target, config.iterations, mode)
    mean = float(total) / config.iterations
    return McpResult(None, None, mean, target, config.iterations, mode)
