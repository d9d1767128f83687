"""Monte Carlo estimation of the synchronized-basin fraction ``P_N(tau, eps)``.

Initial phases are drawn uniformly from (0, 1]^N; each sample is run until
it is classified (synchronized, periodic without synchronization) or the
budget runs out (undecided).  Every sample draws from its own seed stream
keyed by (seed, N, tau, eps, sample index), so estimates do not depend on
execution order or worker count.
"""
from __future__ import annotations

import csv
import io
import struct
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

import numpy as np
from scipy.stats import binomtest

from .analysis import RunClassification, RunMonitor
from .engine import Simulator
from .network import NetworkTopology, all_to_all
from .settings import Budget, Tolerances
from .phase_model import LIFPhaseMap, PhaseMap, classify_region

SYNCED = "synced"
NOT_SYNCED = "not_synced"
UNDECIDED = "undecided"


def midpoints(k: int) -> tuple[float, ...]:
    """``k`` cell midpoints of (0, 1)."""
    return tuple((i + 0.5) / k for i in range(k))


@dataclass(frozen=True)
class SweepSpec:
    """Cells to estimate: every (tau, eps) in ``points`` for every size in ``ns``.

    Build grids with :meth:`grid`; ``points`` keeps tau-major order.
    """

    points: tuple[tuple[float, float], ...]
    ns: tuple[int, ...]
    samples: int
    seed: int = 0
    budget: Budget = field(default_factory=Budget)
    tolerances: Tolerances = field(default_factory=Tolerances)
    current: float = 1.05
    taus: tuple[float, ...] | None = None
    epss: tuple[float, ...] | None = None

    def __post_init__(self):
        if not self.points or not self.ns:
            raise ValueError("sweep needs at least one (tau, eps) point and one network size")
        for tau, eps in self.points:
            if not (0.0 < tau < 1.0 and 0.0 < eps < 1.0):
                raise ValueError(f"point ({tau!r}, {eps!r}) outside (0, 1)^2")
        if self.samples < 1 or min(self.ns) < 2:
            raise ValueError("need samples >= 1 and network sizes >= 2")
        if not (self.budget.firings_per_osc > 0 and np.isfinite(self.budget.t_max)):
            raise ValueError("run budget must be finite")

    @classmethod
    def grid(cls, taus, epss, ns, samples, **kw) -> "SweepSpec":
        taus, epss = tuple(map(float, taus)), tuple(map(float, epss))
        ns = (ns,) if isinstance(ns, int) else tuple(ns)
        points = tuple((t, e) for t in taus for e in epss)
        return cls(points, ns, samples, taus=taus, epss=epss, **kw)

    @property
    def phase_map(self) -> PhaseMap:
        return LIFPhaseMap(self.current)


@dataclass(frozen=True)
class EstimateCell:
    tau: float
    eps: float
    n: int
    samples: int
    sync_count: int
    undecided_count: int
    p_hat: float
    ci_low: float
    ci_high: float
    region: str = ""

    @property
    def not_synced_count(self) -> int:
        return self.samples - self.sync_count - self.undecided_count


@dataclass(frozen=True)
class SampleResult:
    status: str
    classification: RunClassification


def _float_key(x: float) -> int:
    return struct.unpack("<Q", struct.pack("<d", float(x)))[0]


def sample_rng(seed: int, n: int, tau: float, eps: float, k: int) -> np.random.Generator:
    """Independent generator for sample ``k`` of the cell (n, tau, eps)."""
    ss = np.random.SeedSequence(seed, spawn_key=(n, _float_key(tau), _float_key(eps), k))
    return np.random.default_rng(ss)


def sample_phases(n: int, rng: np.random.Generator) -> np.ndarray:
    """I.i.d. uniform phases on (0, 1]."""
    return 1.0 - rng.random(n)


def classify_sample(topology: NetworkTopology, phases, phase_map: PhaseMap,
                    budget: Budget = Budget(), tol: Tolerances = Tolerances()) -> SampleResult:
    """Run one initial condition until it is classified or the budget is spent.

    Synchronization is final as soon as it is detected, so those runs stop
    early without determining their period.
    """
    sim = Simulator(topology, phase_map, phases, eta=tol.eta)
    mon = RunMonitor(topology, tol.d_max, tol.snapshot_tol,
                     tol.transient_per_osc * topology.n, stop_on_sync=True, eta=tol.eta)
    res = sim.run(max_firings=budget.max_firings(topology.n), t_max=budget.t_max, hook=mon)
    cls = mon.result(f"budget exhausted ({res.status})")
    if cls.synchronized:
        return SampleResult(SYNCED, cls)
    if cls.periodic:
        return SampleResult(NOT_SYNCED, cls)
    return SampleResult(UNDECIDED, cls)


def wilson_interval(successes: int, trials: int) -> tuple[float, float]:
    ci = binomtest(successes, trials).proportion_ci(0.95, method="wilson")
    return float(ci.low), float(ci.high)


def make_cell(tau, eps, n, statuses, region="") -> EstimateCell:
    samples = len(statuses)
    sync = sum(s == SYNCED for s in statuses)
    undecided = sum(s == UNDECIDED for s in statuses)
    lo, hi = wilson_interval(sync, samples)
    return EstimateCell(float(tau), float(eps), n, samples, sync, undecided,
                        sync / samples, lo, hi, region)


def _run_chunk(args) -> list[str]:
    tau, eps, n, ks, seed, budget, tol, current = args
    pm = LIFPhaseMap(current)
    top = all_to_all(n, tau, eps)
    out = []
    for k in ks:
        phases = sample_phases(n, sample_rng(seed, n, tau, eps, k))
        out.append(classify_sample(top, phases, pm, budget, tol).status)
    return out


def _chunks(items, size):
    return [items[i:i + size] for i in range(0, len(items), size)]


def _statuses(tasks, workers: int) -> list[list[str]]:
    """Run (cell, sample-chunk) tasks; results come back in task order."""
    if workers <= 1:
        return [_run_chunk(t) for t in tasks]
    with ProcessPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(_run_chunk, tasks))


def estimate_p(tau: float, eps: float, n: int, samples: int, seed: int = 0,
               budget: Budget = Budget(), tol: Tolerances = Tolerances(),
               current: float = 1.05, workers: int = 1) -> EstimateCell:
    """Estimate ``P_N(tau, eps)`` for all-to-all coupling with a Wilson 95% interval.

    Undecided samples stay in the denominator, so ``p_hat`` is a
    conservative lower estimate.
    """
    spec = SweepSpec(((tau, eps),), (n,), samples, seed, budget, tol, current)
    return sweep(spec, workers)[0]


def sweep(spec: SweepSpec, workers: int = 1, chunk: int = 50) -> list[EstimateCell]:
    """One :class:`EstimateCell` per (n, point), ordered by n then point."""
    pm = spec.phase_map
    cells = [(n, tau, eps) for n in spec.ns for tau, eps in spec.points]
    tasks, owner = [], []
    for c, (n, tau, eps) in enumerate(cells):
        for ks in _chunks(range(spec.samples), chunk):
            tasks.append((tau, eps, n, list(ks), spec.seed, spec.budget,
                          spec.tolerances, spec.current))
            owner.append(c)
    per_cell: list[list[str]] = [[] for _ in cells]
    for c, statuses in zip(owner, _statuses(tasks, workers)):
        per_cell[c].extend(statuses)
    return [make_cell(tau, eps, n, per_cell[c], classify_region(pm, tau, eps).value)
            for c, (n, tau, eps) in enumerate(cells)]


def grid_scan_two(tau: float, eps: float, resolution: int = 100,
                  budget: Budget = Budget(), tol: Tolerances = Tolerances(),
                  current: float = 1.05) -> float:
    """Synchronized fraction of a ``resolution``-square product grid over (0, 1]^2, N = 2.

    Deterministic counterpart of :func:`estimate_p`.  The two axes are offset
    by a quarter cell so no grid point lies on the diagonal, a null set
    whose points are all trivially synchronized.
    """
    pm = LIFPhaseMap(current)
    top = all_to_all(2, tau, eps)
    first = (np.arange(resolution) + 0.5) / resolution
    second = (np.arange(resolution) + 0.25) / resolution
    synced = 0
    for a in first:
        for b in second:
            synced += classify_sample(top, [a, b], pm, budget, tol).status == SYNCED
    return synced / resolution ** 2


CSV_FIELDS = ("tau", "eps", "N", "samples", "sync", "undecided", "p_hat", "ci_low", "ci_high", "region")


def cells_to_csv(cells) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(CSV_FIELDS)
    for c in cells:
        w.writerow([f"{c.tau:.12g}", f"{c.eps:.12g}", c.n, c.samples, c.sync_count,
                    c.undecided_count, f"{c.p_hat:.12g}", f"{c.ci_low:.12g}",
                    f"{c.ci_high:.12g}", c.region])
    return buf.getvalue()


