"""Acceptance checks, one test per item.

`pytest -v tests/test_acceptance.py` prints one pass/fail line per item.
Measured deviations and runtimes are printed inside each test so failing
items carry their numbers in the report. Two items probe fitted laws and
the averaged-gain shortcut against targets they cannot all reach; those
fail here by design rather than being patched over (see the assertion
messages for the measured gaps).

This suite builds production-scale quantile sets and runs seven-figure
draw counts; expect roughly a quarter hour on one core.
"""

import time

import numpy as np
import pytest
from scipy.integrate import quad

from intercell import cache, closed_form
from intercell.burr_model import ModelDomainError, model_for
from intercell.cli import main
from intercell.config import Scenario, with_overrides
from intercell.mcp import McpConfig, run_mcp
from intercell.simulator import (_SKETCH_EDGES, simulate_approx,
                                 simulate_exact)
from intercell.typical_set import PartitionSpec, build_typical_set

_SIGMAS = (0.0, 3.0, 6.0, 9.0, 12.0)
_SPEC = PartitionSpec(25, 900)

# reference average path losses for the default scenario, strongest first
_LAMBDA_TARGETS = np.array([6.467, 3.588, 1.708, 1.069, 0.767, 0.663,
                            0.568, 0.426, 0.316, 0.307, 0.260, 0.219,
                            0.188, 0.178, 0.158, 0.145, 0.118, 0.107])

_FR1 = Scenario(sigma_db=12.0, reuse="FR1")
_FR3 = Scenario(sigma_db=12.0, reuse="FR3")


@pytest.fixture(autouse=True)
def _isolated_cache(tmp_path, monkeypatch):
    monkeypatch.setenv(cache.ENV_VAR, str(tmp_path / "cache"))


@pytest.fixture(scope="session")
def production_sets():
    """Production-resolution quantile sets per shadowing spread, with build times."""
    out = {}
    for s in _SIGMAS:
        t0 = time.perf_counter()
        out[s] = (build_typical_set(s, _SPEC), time.perf_counter() - t0)
    return out


def test_01_average_path_losses():
    t0 = time.perf_counter()
    fr1 = np.sort(_FR1.lambdas())[::-1]
    fr3 = np.sort(_FR3.lambdas())[::-1]
    elapsed = time.perf_counter() - t0
    rel1 = np.abs(fr1 - _LAMBDA_TARGETS) / _LAMBDA_TARGETS
    # each FR3 value must match a distinct reference entry
    used, worst3 = [], 0.0
    for v in fr3:
        rel = np.abs(v - _LAMBDA_TARGETS) / _LAMBDA_TARGETS
        rel[used] = np.inf
        i = int(np.argmin(rel))
        used.append(i)
        worst3 = max(worst3, rel[i])
    print(f"FR1 worst rel {rel1.max():.2e}, FR3 worst rel {worst3:.2e}, "
          f"{elapsed:.2f}s")
    assert rel1.max() < 0.01, f"FR1 off by up to {rel1.max():.2%}"
    assert worst3 < 0.01, f"FR3 off by up to {worst3:.2%}"
    assert elapsed < 60.0


def test_02_exact_moments():
    for s in _SIGMAS:
        assert closed_form.single_moment(1, s) == pytest.approx(1.0, rel=1e-12)
    assert closed_form.single_moment(2, 0.0) == pytest.approx(2.0, rel=1e-12)
    assert closed_form.single_moment(3, 0.0) == pytest.approx(6.0, rel=1e-12)
    assert closed_form.single_moment(2, 12.0) == pytest.approx(4.138e3,
                                                               rel=1e-3)
    assert closed_form.single_moment(3, 12.0) == pytest.approx(53.127e9,
                                                               rel=1e-3)
    assert closed_form.multi_moment(1, _FR1.lambdas(), 12.0) == \
        pytest.approx(17.25, rel=1e-3)
    assert closed_form.multi_moment(1, _FR3.lambdas(), 12.0) == \
        pytest.approx(1.857, rel=1e-3)


def test_03_typical_set_accuracy(production_sets):
    for s in _SIGMAS:
        ts, secs = production_sets[s]
        rels = [abs(ts.weighted_moment(k) / closed_form.single_moment(k, s)
                    - 1.0) for k in (1, 2, 3)]
        print(f"sigma_db={s:g}: build {secs:.1f}s, "
              f"moment rels {rels[0]:.2e} {rels[1]:.2e} {rels[2]:.2e}")
        assert secs < 300.0, f"sigma_db={s:g} build took {secs:.0f}s"
        for k, rel in zip((1, 2, 3), rels):
            assert rel < 0.01, f"k={k} sigma_db={s:g}: rel {rel:.2e}"


def test_04_mcp_mean_convergence(production_sets):
    ts12 = production_sets[12.0][0]
    cfg = McpConfig(iterations=20_000, partition=_SPEC)
    r1 = run_mcp(_FR1.lambdas(), 12.0, cfg, seed=_FR1.seed, mode="mean",
                 base_set=ts12)
    r3 = run_mcp(_FR3.lambdas(), 12.0, cfg, seed=_FR3.seed, mode="mean",
                 base_set=ts12)
    t0 = time.perf_counter()
    desk = run_mcp(_FR1.lambdas(), 12.0,
                   McpConfig(iterations=2000, partition=_SPEC),
                   seed=7, mode="full", base_set=ts12)
    desk_secs = time.perf_counter() - t0
    print(f"20k iterations: FR1 mean {r1.weighted_mean:.4f} "
          f"(rel {r1.rel_deviation:.2e}), FR3 mean {r3.weighted_mean:.5f} "
          f"(rel {r3.rel_deviation:.2e}); 2k full run rel "
          f"{desk.rel_deviation:.2e} in {desk_secs:.0f}s")
    assert r1.rel_deviation < 0.015
    assert r3.rel_deviation < 0.005
    assert desk.rel_deviation < 0.03
    assert desk_secs < 600.0


def test_05_no_shadowing_consistency(production_sets):
    ts0 = production_sets[0.0][0]
    cfg = McpConfig(iterations=256, partition=_SPEC)
    sups = {}
    for sc in (with_overrides(_FR1, sigma_db=0.0),
               with_overrides(_FR3, sigma_db=0.0)):
        res = run_mcp(sc.lambdas(), 0.0, cfg, seed=42, mode="full",
                      base_set=ts0)
        h = res.histogram
        hist_cdf = np.concatenate(([0.0], np.cumsum(h.masses)))
        model_cdf = closed_form.hypoexp_cdf(h.edges, sc.lambdas())
        # interior edges: clipping makes the histogram cdf exact there
        sups[sc.reuse] = float(np.max(np.abs(hist_cdf - model_cdf)[1:-1]))
    print(f"sup cdf distance: FR1 {sups['FR1']:.4f}, FR3 {sups['FR3']:.4f}")
    for reuse, sup in sups.items():
        assert sup <= 0.02, f"{reuse}: sup {sup:.4f}"


def test_06_plain_mc_moment_collapse():
    sc = _FR1
    lam = float(sc.lambdas()[0])
    res = simulate_approx(sc, 10_000_000, seed=sc.seed, interferers=[1])
    exact = closed_form.single_moment(3, 12.0)
    est = res.moment(3) / lam ** 3
    print(f"sampled 3rd moment {est:.4g} vs exact {exact:.4g} "
          f"({est / exact:.1%} of exact)")
    assert est < 0.5 * exact


def test_07_fitted_model_checks():
    failures = []
    target1 = float(_FR1.lambdas().sum())
    ps = np.array([1e-6, 1e-3, 0.1, 0.5, 0.9, 1.0 - 1e-6])
    for s in _SIGMAS:
        rep = model_for("FR1", s, target1)
        m = rep.model
        total, _ = quad(m.truncated_pdf, 0.0, m.x_t,
                        points=[min(m.beta, m.x_t)], limit=400)
        rt = float(np.max(np.abs(m.cdf(m.quantile(ps)) - ps)))
        signed = (rep.truncated_mean - target1) / target1
        print(f"FR1 sigma_db={s:g}: integral {total:.9f}, roundtrip {rt:.1e}, "
              f"truncated mean {rep.truncated_mean:.3f} vs {target1:.3f} "
              f"({signed:+.1%})")
        if abs(total - 1.0) > 1e-6:
            failures.append(f"FR1 sigma_db={s:g}: integral {total:.9f}")
        if rt > 1e-10:
            failures.append(f"FR1 sigma_db={s:g}: roundtrip {rt:.1e}")
        if abs(signed) > 0.10:
            failures.append(f"FR1 sigma_db={s:g}: mean off by {signed:+.1%}")
    target3 = float(_FR3.lambdas().sum())
    for s in _SIGMAS:
        try:
            rep = model_for("FR3", s, target3)
            signed = (rep.truncated_mean - target3) / target3
            print(f"FR3 sigma_db={s:g}: truncated mean {rep.truncated_mean:.3f}"
                  f" vs {target3:.3f} ({signed:+.1%})")
        except ModelDomainError as err:
            # must be reported, not crash: a negative eta law lands here
            print(f"FR3 sigma_db={s:g}: model unavailable ({err})")
    assert not failures, "; ".join(failures)


def test_08_figure_data_vs_closed_form(tmp_path):
    sc0 = with_overrides(_FR1, sigma_db=0.0)
    lam = sc0.lambdas()
    strongest, weakest = int(np.argmax(lam)), int(np.argmin(lam))
    cases = [
        ("pdf_strongest_single", sc0, [1 + strongest], lam[[strongest]]),
        ("pdf_weakest_single", sc0, [1 + weakest], lam[[weakest]]),
        ("pdf_fr1", sc0, None, lam),
        ("pdf_fr3", with_overrides(_FR3, sigma_db=0.0), None, None),
    ]
    sups = {}
    for name, sc, interferers, lams in cases:
        if lams is None:
            lams = sc.lambdas()
        res = simulate_exact(sc, 10_000_000, seed=11, interferers=interferers)
        sups[name] = res.ks_distance(
            lambda x: closed_form.hypoexp_cdf(x, lams))
        xs = np.geomspace(res.quantile(1e-4), res.quantile(1.0 - 1e-5), 400)
        dens = res.counts[1:-1] / res.n / np.diff(_SKETCH_EDGES)
        mids = np.sqrt(_SKETCH_EDGES[:-1] * _SKETCH_EDGES[1:])
        sim_pdf = np.interp(xs, mids, dens)
        rows = np.column_stack([xs, sim_pdf, closed_form.hypoexp_pdf(xs, lams)])
        np.savetxt(tmp_path / f"{name}.csv", rows, delimiter=",",
                   header="x,pdf_sim,pdf_model", comments="")
        del res
    print("sup cdf distances: "
          + ", ".join(f"{k} {v:.4f}" for k, v in sups.items())
          + f"; CSVs in {tmp_path}")
    assert sups["pdf_fr3"] < sups["pdf_fr1"], "FR3 must sit closer than FR1"
    bad = {k: v for k, v in sups.items() if v >= 0.02}
    assert not bad, "averaged-gain closed form vs exact positions: " + \
        ", ".join(f"{k} sup {v:.4f}" for k, v in bad.items())


def test_09_determinism(tmp_path):
    cases = [
        ["layout"],
        ["lambdas", "--reuse", "FR3"],
        ["moments", "--k", "1,2,3", "--sigma-db", "0,12"],
        ["closed-form-pdf", "--grid", "log:0.5:60:50"],
        ["typical-set", "--sigma-db", "3", "--j", "4", "--p", "10",
         "--no-cache"],
        ["mcp", "--sigma-db", "0", "--j", "4", "--p", "10", "--m", "2",
         "--j-cut", "2", "--iterations", "20", "--no-cache"],
        ["model", "--params-only"],
        ["simulate", "--mode", "exact", "--draws", "5e4"],
    ]
    for argv in cases:
        a = tmp_path / (argv[0] + "-a.out")
        b = tmp_path / (argv[0] + "-b.out")
        assert main(argv + ["--out", str(a)]) == 0, argv
        assert main(argv + ["--out", str(b)]) == 0, argv
        assert a.read_bytes() == b.read_bytes(), f"{argv} not reproducible"

    ts = build_typical_set(3.0, PartitionSpec(4, 10))
    cfg = McpConfig(m_compelled=2, j_cut=2, iterations=40,
                    partition=PartitionSpec(4, 10), chunk=7)
    serial = run_mcp([3.0, 2.0, 1.0, 0.5], 3.0, cfg, seed=3, mode="mean",
                     base_set=ts)
    threaded = run_mcp([3.0, 2.0, 1.0, 0.5], 3.0, cfg, seed=3, mode="mean",
                       base_set=ts, threads=3)
    rel = abs(serial.weighted_mean - threaded.weighted_mean) \
        / serial.weighted_mean
    print(f"parallel vs serial weighted mean rel diff {rel:.2e}")
    assert rel <= 1e-9
