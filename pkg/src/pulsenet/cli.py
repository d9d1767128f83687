"""Command-line front end: ``pulsenet {simulate,check,estimate,sweep}``.

Exit codes: 0 ok, 1 property violation, 2 config error, 3 run left
unclassified under ``--require-classified``.
"""
from __future__ import annotations

import argparse
import itertools
import json
import sys
from pathlib import Path

from . import analysis as an
from .config import (load_json, run_config_from_dict, sweep_spec_from_dict,
                     sweep_spec_to_dict)
from .engine import Simulator
from .errors import ConfigError, HypothesisError, InsufficientDataError
from .montecarlo import cells_to_csv, sweep
from .network import symmetric_pair
from .output import heatmap_svg, raster_svg
from .phase_model import RegionClass, classify_region

EXIT_OK, EXIT_VIOLATION, EXIT_CONFIG, EXIT_UNCLASSIFIED = 0, 1, 2, 3
PROPERTIES = ("theorem1", "p1", "p2", "p3")
A1_SKIP = "hypothesis (tau,eps) in A1 not met"


def run_simulation(cfg):
    """Simulate a run config; returns (result, classification, topology, phase map)."""
    pm = cfg.build_phase_map()
    topo = cfg.build_topology()
    tol = cfg.tolerances
    sim = Simulator(topo, pm, cfg.build_phases(topo.n), eta=tol.eta, tie_rule=cfg.tie_rule)
    res = sim.run(max_firings=cfg.budget.max_firings(topo.n), t_max=cfg.budget.t_max,
                  record_snapshots=True)
    cls = an.classify_run(res.log, res.snapshots, topo, tol.d_max, tol.snapshot_tol,
                          tol.transient_per_osc * topo.n)
    return res, cls, topo, pm


def _period_marks(cls, t_end):
    if not cls.periodic:
        return []
    marks, t = [], cls.onset_time if cls.sync_time is None else cls.sync_time
    while t <= t_end and len(marks) < 200:
        marks.append(t)
        t += cls.delta_t0
    return marks


def _write(out: Path, name: str, text: str):
    out.mkdir(parents=True, exist_ok=True)
    (out / name).write_text(text)


def _log_payload(res, fmt):
    if fmt == "json":
        return "firings.json", json.dumps([r._asdict() for r in res.log], indent=1) + "\n"
    return "firings.csv", res.log.to_csv()


def cmd_simulate(args, cfg) -> int:
    res, cls, topo, pm = run_simulation(cfg)
    report = an.AnalysisReport(cls, [], an.isi_summary(res.log))
    out = Path(args.out)
    name, text = _log_payload(res, args.format)
    _write(out, name, text)
    _write(out, "report.json", json.dumps(report.to_dict(), indent=2) + "\n")
    if args.svg:
        t_end = res.state.t_now
        _write(out, "raster.svg", raster_svg(res.log, 0.0, t_end, _period_marks(cls, t_end)))
    print(json.dumps(cls.to_dict()))
    if args.require_classified and cls.outcome == an.UNDECIDED:
        return EXIT_UNCLASSIFIED
    return EXIT_OK


def _pairs(topo):
    return [(i, j) for i, j in itertools.combinations(range(topo.n), 2)
            if symmetric_pair(topo, i, j)]


def property_reports(res, cls, topo, pm, cfg, wanted, override=False):
    region = classify_region(pm, cfg.tau, cfg.eps, cfg.tolerances.boundary_tol)
    tol = cfg.tolerances
    reports = []
    for prop in wanted:
        if region is not RegionClass.A1 and not override:
            reports.append(an.PropertyReport(prop, None, skipped=A1_SKIP))
            continue
        if prop == "theorem1":
            reports.append(an.check_theorem1(res.log, cfg.tau, region, override=True,
                                             slack=tol.isi_slack))
        elif prop in ("p1", "p2"):
            reports.append(_pair_report(prop, res, topo, tol))
        else:
            reports.append(_p3_report(cls, cfg, pm, region, tol))
    return region, reports


def _pair_report(prop, res, topo, tol):
    checked = 0
    for i, j in _pairs(topo):
        try:
            if prop == "p1":
                rep = an.check_firing_order(res.log, topo, i, j, tol.eta)
            else:
                rep = an.check_sync_persistence(res.log, res.snapshots, topo, i, j,
                                                tol.eta, tol.snapshot_tol)
        except InsufficientDataError:
            continue
        checked += 1
        if not rep.holds:
            return rep
    if not checked:
        reason = "no symmetric pair" if prop == "p1" else "no symmetric pair fired together"
        return an.PropertyReport(prop, None, skipped=reason)
    return an.PropertyReport(prop, True)


def _p3_report(cls, cfg, pm, region, tol):
    if not cls.synchronized:
        return an.PropertyReport("p3", None, skipped="run is not completely synchronized")
    if not cls.periodic:
        return an.PropertyReport("p3", None, skipped="period not determined within budget")
    if region is RegionClass.A1:
        return an.check_period_one_if_synced(cls, cfg.tau, cfg.eps, pm, tol.snapshot_tol)
    # outside A1 only the period can be compared
    ok = cls.d == 1
    return an.PropertyReport("p3", ok, None if ok else {"d": cls.d, "delta_t0": cls.delta_t0})


def cmd_check(args, cfg) -> int:
    wanted = args.properties.split(",") if args.properties else list(PROPERTIES)
    bad = [p for p in wanted if p not in PROPERTIES]
    if bad:
        raise ConfigError(f"--properties: unknown property {bad[0]!r}")
    res, cls, topo, pm = run_simulation(cfg)
    region, reports = property_reports(res, cls, topo, pm, cfg, wanted, args.override_region)
    report = an.AnalysisReport(cls, reports, an.isi_summary(res.log))
    payload = report.to_dict()
    payload["region"] = region.value
    text = json.dumps(payload, indent=2) + "\n"
    _write(Path(args.out), "check.json", text)
    sys.stdout.write(text)
    if any(r.holds is False for r in reports):
        return EXIT_VIOLATION
    if args.require_classified and cls.outcome == an.UNDECIDED:
        return EXIT_UNCLASSIFIED
    return EXIT_OK


def _cells_payload(cells, fmt):
    if fmt == "json":
        rows = [dict(tau=c.tau, eps=c.eps, N=c.n, samples=c.samples, sync=c.sync_count,
                     undecided=c.undecided_count, p_hat=c.p_hat, ci_low=c.ci_low,
                     ci_high=c.ci_high, region=c.region) for c in cells]
        return "json", json.dumps(rows, indent=1) + "\n"
    return "csv", cells_to_csv(cells)


def cmd_estimate(args, spec) -> int:
    cells = sweep(spec, workers=args.workers)
    ext, text = _cells_payload(cells, args.format)
    _write(Path(args.out), f"estimate.{ext}", text)
    sys.stdout.write(text)
    return EXIT_OK


def cmd_sweep(args, spec) -> int:
    cells = sweep(spec, workers=args.workers)
    out = Path(args.out)
    ext, text = _cells_payload(cells, args.format)
    _write(out, f"sweep.{ext}", text)
    for n in spec.ns:
        mine = [c for c in cells if c.n == n]
        a2 = [c for c in mine if c.region != RegionClass.A1.value]
        black = [c for c in a2 if c.p_hat > 0]
        stray = [c for c in mine if c.region == RegionClass.A1.value and c.p_hat > 0]
        frac = len(black) / len(a2) if a2 else 0.0
        print(f"N={n}: {len(black)}/{len(a2)} A2 cells with p_hat>0 ({frac:.3f}); "
              f"A1 cells with p_hat>0: {len(stray)}")
        if args.svg and spec.taus is not None:
            _write(out, f"heatmap_N{n}.svg", heatmap_svg(mine, spec.phase_map, f"N = {n}"))
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    shared = argparse.ArgumentParser(add_help=False)
    shared.add_argument("--config", required=True, help="JSON config or sweep spec")
    shared.add_argument("--seed", type=int, help="override the random seed")
    shared.add_argument("--out", default=".", help="output directory")
    shared.add_argument("--format", choices=("csv", "json"), default="csv")
    shared.add_argument("--svg", action="store_true", help="also emit SVG figures")
    shared.add_argument("--workers", type=int, default=1)
    shared.add_argument("--require-classified", action="store_true")
    shared.add_argument("--override-region", action="store_true",
                        help="check A1 properties outside A1")
    shared.add_argument("--dump-config", action="store_true",
                        help="print the normalized config and exit")

    parser = argparse.ArgumentParser(prog="pulsenet", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)
    sub.add_parser("simulate", parents=[shared], help="run one network and classify it")
    check = sub.add_parser("check", parents=[shared], help="check firing properties on a run")
    check.add_argument("--properties", help="comma list from theorem1,p1,p2,p3")
    sub.add_parser("estimate", parents=[shared], help="Monte Carlo estimate of P_N")
    sub.add_parser("sweep", parents=[shared], help="estimate P_N over a (tau, eps) grid")
    return parser


COMMANDS = {"simulate": cmd_simulate, "check": cmd_check,
            "estimate": cmd_estimate, "sweep": cmd_sweep}


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        raw = load_json(args.config)
        if args.command in ("simulate", "check"):
            cfg = run_config_from_dict(raw, args.seed)
            dumped = cfg.to_dict()
        else:
            cfg = sweep_spec_from_dict(raw, args.seed)
            dumped = sweep_spec_to_dict(cfg)
        if args.dump_config:
            print(json.dumps(dumped, indent=2))
            return EXIT_OK
        if args.workers < 1:
            raise ConfigError("--workers: must be at least 1")
        return COMMANDS[args.command](args, cfg)
    except (ConfigError, HypothesisError) as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
