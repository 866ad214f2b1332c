"""Command-line interface: every subcommand emits CSV or JSON, never plots.

All randomness is controlled by the scenario seed (overridable with the
global --seed), and computations are chunked deterministically, so any
subcommand rerun with the same inputs produces byte-identical output files.
Diagnostics go to stderr; data goes to --out or stdout.
"""

from __future__ import annotations

import argparse
import json
import sys

import numpy as np

from . import burr_model, cache, closed_form, mcp, simulator, typical_set
from .config import Scenario, load_scenario, with_overrides


def _fmt(v) -> str:
    if isinstance(v, (float, np.floating)):
        return format(float(v), ".17g")
    return str(v)


def _emit_rows(out_path, header, rows):
    lines = [",".join(header)]
    lines += [",".join(_fmt(v) for v in row) for row in rows]
    text = "\n".join(lines) + "\n"
    if out_path:
        with open(out_path, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _parse_grid(spec: str) -> np.ndarray:
    parts = spec.split(":")
    log = parts and parts[0] == "log"
    if log:
        parts = parts[1:]
    if len(parts) != 3:
        raise argparse.ArgumentTypeError(
            f"grid must be 'lo:hi:n' or 'log:lo:hi:n', got {spec!r}")
    lo, hi, n = float(parts[0]), float(parts[1]), int(parts[2])
    if n < 2 or hi <= lo or (log and lo <= 0):
        raise argparse.ArgumentTypeError(f"bad grid {spec!r}")
    return np.geomspace(lo, hi, n) if log else np.linspace(lo, hi, n)


def _parse_float_list(spec: str) -> list:
    if ".." in spec:
        lo, hi = spec.split("..", 1)
        return [float(v) for v in range(int(lo), int(hi) + 1)]
    return [float(v) for v in spec.split(",")]


def _scenario(args) -> Scenario:
    base = load_scenario(args.scenario) if args.scenario else Scenario()
    return with_overrides(base, seed=args.seed,
                          sigma_db=getattr(args, "sigma_db", None),
                          reuse=getattr(args, "reuse", None))


def cmd_layout(args) -> int:
    lay = _scenario(args).layout()
    rows = [(i, p[0], p[1]) for i, p in enumerate(lay.positions)]
    _emit_rows(args.out, ("n", "x", "y"), rows)
    return 0


def cmd_lambdas(args) -> int:
    sc = _scenario(args)
    idx = sc.layout().interferer_indices(sc.reuse)
    lam = sc.lambdas()
    _emit_rows(args.out, ("n", "lambda"), zip(idx, lam))
    return 0


def cmd_moments(args) -> int:
    sc = _scenario(args)
    lam = sc.lambdas()
    rows = []
    for s in _parse_float_list(args.sigma_db_list):
        for k in [int(v) for v in args.k.split(",")]:
            rows.append((k, s, closed_form.single_moment(k, s),
                         closed_form.multi_moment(k, lam, s)))
    _emit_rows(args.out, ("k", "sigma_db", "single", "multi"), rows)
    return 0


def cmd_closed_form_pdf(args) -> int:
    sc = _scenario(args)
    lam = sc.lambdas()
    xs = args.grid
    _emit_rows(args.out, ("x", "pdf", "cdf"),
               zip(xs, closed_form.hypoexp_pdf(xs, lam),
                   closed_form.hypoexp_cdf(xs, lam)))
    return 0


def _typical_set_cached(sigma_db, spec, use_cache=True):
    label = f"typical-set v1|sigma_db={sigma_db:.17g}|J={spec.j_intervals}|P={spec.points_per_interval}"
    if use_cache:
        hit = cache.cache_get(label)
        if hit is not None:
            return typical_set.TypicalSet(sigma_db, spec, hit["amplitudes"],
                                          hit["masses"])
    ts = typical_set.build_typical_set(sigma_db, spec)
    if use_cache:
        cache.cache_put(label, {"amplitudes": ts.amplitudes, "masses": ts.masses})
    return ts


def cmd_typical_set(args) -> int:
    sc = _scenario(args)
    spec = typical_set.PartitionSpec(args.j, args.p)
    ts = _typical_set_cached(sc.sigma_db, spec, not args.no_cache)
    p = spec.points_per_interval
    rows = ((j + 1, ts.amplitudes[j, i], ts.masses[j] / p)
            for j in range(spec.j_intervals) for i in range(p))
    _emit_rows(args.out, ("interval_j", "amplitude", "probability"), rows)
    return 0


def cmd_mcp(args) -> int:
    sc = _scenario(args)
    spec = typical_set.PartitionSpec(args.j, args.p)
    cfg = mcp.McpConfig(m_compelled=args.m, j_cut=args.j_cut,
                        iterations=args.iterations, partition=spec)
    base = _typical_set_cached(sc.sigma_db, spec, not args.no_cache)
    res = mcp.run_mcp(sc.lambdas(), sc.sigma_db, cfg, seed=sc.seed,
                      mode=args.mode, threads=args.threads, base_set=base)
    print(f"weighted mean {res.weighted_mean:.10g} target {res.target_mean:.10g} "
          f"rel deviation {res.rel_deviation:.3e}", file=sys.stderr)
    if res.diverged:
        print(f"warning: mean deviates more than {mcp.DIVERGENCE_TOL:.0%} "
              "from the exact value", file=sys.stderr)
    if res.histogram is not None:
        h = res.histogram
        _emit_rows(args.out, ("bin_lo", "bin_hi", "mass"),
                   zip(h.edges[:-1], h.edges[1:], h.masses))
    return 0


def cmd_model(args) -> int:
    sc = _scenario(args)
    target = float(sc.lambdas().sum())
    try:
        report = burr_model.model_for(sc.reuse, sc.sigma_db, target)
    except burr_model.ModelDomainError as err:
        print(f"model unavailable for {sc.reuse} at sigma_db={sc.sigma_db:g}: {err}",
              file=sys.stderr)
        return 3
    m = report.model
    if args.params_only:
        payload = {"eta": m.eta, "alpha": m.alpha, "k": m.k, "beta": m.beta,
                   "x_t": m.x_t, "A": report.normalization}
        text = json.dumps(payload, sort_keys=True) + "\n"
        if args.out:
            with open(args.out, "w") as fh:
                fh.write(text)
        else:
            sys.stdout.write(text)
        return 0
    print(f"truncated mean {report.truncated_mean:.10g} target {target:.10g} "
          f"rel deviation {report.rel_deviation:.3e}", file=sys.stderr)
    xs = args.grid
    _emit_rows(args.out, ("x", "pdf", "cdf"),
               zip(xs, m.truncated_pdf(xs), m.truncated_cdf(xs)))
    return 0


def cmd_simulate(args) -> int:
    sc = _scenario(args)
    draws = int(float(args.draws))
    fn = simulator.simulate_exact if args.mode == "exact" else simulator.simulate_approx
    res = fn(sc, draws, threads=args.threads)
    print(f"n {res.n} mean {res.mean:.10g} m2 {res.moment(2):.10g} "
          f"m3 {res.moment(3):.10g}", file=sys.stderr)
    edges = simulator._SKETCH_EDGES
    inner = res.counts[1:-1]
    keep = inner > 0
    rows = zip(edges[:-1][keep], edges[1:][keep], inner[keep] / res.n)
    _emit_rows(args.out, ("bin_lo", "bin_hi", "mass"), rows)
    return 0


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="intercell",
                                 description="Intercell interference statistics")
    ap.add_argument("--scenario", help="scenario config file (key = value lines)")
    ap.add_argument("--seed", type=int, help="override the scenario seed")
    ap.add_argument("--threads", type=int, default=1)
    sub = ap.add_subparsers(dest="command", required=True)

    def add(name, fn, **kw):
        p = sub.add_parser(name, **kw)
        p.set_defaults(fn=fn)
        p.add_argument("--out", help="output file (default stdout)")
        return p

    add("layout", cmd_layout, help="AP positions")

    p = add("lambdas", cmd_lambdas, help="average path losses")
    p.add_argument("--reuse", choices=("FR1", "FR3"))

    p = add("moments", cmd_moments, help="exact raw moments")
    p.add_argument("--k", default="1,2,3")
    p.add_argument("--sigma-db", dest="sigma_db_list", default="0",
                   help="comma list or lo..hi integer range")
    p.add_argument("--reuse", choices=("FR1", "FR3"))

    p = add("closed-form-pdf", cmd_closed_form_pdf, help="no-shadowing pdf/cdf")
    p.add_argument("--grid", type=_parse_grid, required=True)
    p.add_argument("--reuse", choices=("FR1", "FR3"))

    p = add("typical-set", cmd_typical_set, help="single-link typical set")
    p.add_argument("--sigma-db", dest="sigma_db", type=float)
    p.add_argument("--j", type=int, default=25)
    p.add_argument("--p", type=int, default=900)
    p.add_argument("--no-cache", action="store_true")

    p = add("mcp", cmd_mcp, help="panel Monte Carlo")
    p.add_argument("--sigma-db", dest="sigma_db", type=float)
    p.add_argument("--reuse", choices=("FR1", "FR3"))
    p.add_argument("--iterations", type=int, default=20_000)
    p.add_argument("--mode", choices=("full", "mean"), default="full")
    p.add_argument("--m", type=int, default=2)
    p.add_argument("--j-cut", type=int, default=3)
    p.add_argument("--j", type=int, default=25)
    p.add_argument("--p", type=int, default=900)
    p.add_argument("--no-cache", action="store_true")

    p = add("model", cmd_model, help="fitted aggregate-gain model")
    p.add_argument("--sigma-db", dest="sigma_db", type=float)
    p.add_argument("--reuse", choices=("FR1", "FR3"))
    p.add_argument("--grid", type=_parse_grid)
    p.add_argument("--params-only", action="store_true")

    p = add("simulate", cmd_simulate, help="brute-force Monte Carlo")
    p.add_argument("--sigma-db", dest="sigma_db", type=float)
    p.add_argument("--reuse", choices=("FR1", "FR3"))
    p.add_argument("--mode", choices=("exact", "approx"), default="exact")
    p.add_argument("--draws", default="1e6")

    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    if args.command == "model" and not args.params_only and args.grid is None:
        print("model: --grid is required unless --params-only", file=sys.stderr)
        return 2
    try:
        return args.fn(args)
    except (ValueError, OSError) as err:
        print(f"error: {err}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
