"""Analysis of firing logs: interspike intervals, firing properties, periodicity.

Periodicity is detected by recurrence of the full state (phases and pending
volleys) at firings of a reference oscillator.  Two equal phase vectors with
different spikes in flight evolve differently, so phases alone are not
enough.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Any, Sequence

import numpy as np

from .engine import DEFAULT_ETA, FiringLog, Simulator, Snapshot
from .errors import HypothesisError, InsufficientDataError
from .network import NetworkTopology, symmetric_pair
from .phase_model import PhaseMap, RegionClass, sync_isi

SNAPSHOT_TOL = 1e-7
ISI_SLACK = 1e-9
D_MAX = 64
TRANSIENT_FIRINGS_PER_OSC = 20

PERIODIC = "periodic"
SYNCHRONIZED = "synchronized"
UNDECIDED = "undecided"


@dataclass(frozen=True)
class RunClassification:
    """Outcome of a run.

    ``outcome`` is ``"periodic"``, ``"synchronized"`` (a completely
    synchronized solution, also periodic when ``d`` is set) or
    ``"undecided"``.  ``onset_index`` is the firing index M of the
    reference oscillator from which periodicity was verified.
    """

    outcome: str
    d: int | None = None
    delta_t0: float | None = None
    onset_index: int | None = None
    onset_time: float | None = None
    sync_time: float | None = None
    firings_per_period: tuple[int, ...] | None = None
    note: str = ""

    @property
    def periodic(self) -> bool:
        return self.d is not None

    @property
    def synchronized(self) -> bool:
        return self.outcome == SYNCHRONIZED

    def to_dict(self) -> dict[str, Any]:
        out = {"outcome": self.outcome, "d": self.d, "delta_t0": self.delta_t0,
               "onset_index": self.onset_index, "onset_time": self.onset_time,
               "sync_time": self.sync_time}
        if self.firings_per_period is not None:
            out["firings_per_period"] = list(self.firings_per_period)
        if self.note:
            out["note"] = self.note
        return out


@dataclass
class PropertyReport:
    property: str
    holds: bool
    witness: dict | None = None
    skipped: str | None = None

    def to_dict(self):
        out = {"id": self.property, "holds": self.holds, "witness": self.witness}
        if self.skipped:
            out["skipped"] = self.skipped
        return out


def interspike_intervals(log: FiringLog, i: int) -> np.ndarray:
    times = log.times(i)
    if times.size < 2:
        raise InsufficientDataError(f"oscillator {i} fired {times.size} time(s); need 2")
    return np.diff(times)


def isi_summary(log: FiringLog) -> dict[str, dict[str, float]]:
    out = {}
    for i in range(log.n):
        if log.count(i) < 2:
            continue
        isi = interspike_intervals(log, i)
        out[str(i)] = {"min": float(isi.min()), "max": float(isi.max()), "mean": float(isi.mean())}
    return out


def check_theorem1(log: FiringLog, tau: float, region: RegionClass,
                   override: bool = False, slack: float = ISI_SLACK) -> PropertyReport:
    """Every interspike interval must exceed the delay (A1 only)."""
    if region is not RegionClass.A1 and not override:
        raise HypothesisError(f"ISI lower bound assumes region A1, got {region.value}")
    for i in range(log.n):
        times = log.times(i)
        if times.size < 2:
            continue
        isi = np.diff(times)
        bad = np.flatnonzero(isi <= tau - slack)
        if bad.size:
            m = int(bad[0]) + 1
            return PropertyReport("theorem1", False, {
                "oscillator": i, "index": m, "t_m": float(times[m - 1]),
                "t_next": float(times[m]), "isi": float(isi[m - 1]), "tau": tau})
    return PropertyReport("theorem1", True)


def _require_symmetric(topology, i, j):
    if not symmetric_pair(topology, i, j):
        raise HypothesisError(f"oscillators {i} and {j} are not a symmetric pair")


def check_firing_order(log: FiringLog, topology: NetworkTopology, i: int, j: int,
                       eta: float = DEFAULT_ETA, start_time: float = 0.0) -> PropertyReport:
    """Firing order of a symmetric pair is preserved.

    For every index pair with ``t^a_m <= t^b_k`` (either role assignment),
    require ``t^a_{m+1} <= t^b_{k+1}``.  Checking the smallest such k is
    enough because firing times increase with the index.  Comparisons allow
    ``eta`` slack, so coincident firings count as ordered both ways.
    """
    _require_symmetric(topology, i, j)
    ti, tj = log.times(i), log.times(j)
    if ti.size < 2 or tj.size < 2:
        raise InsufficientDataError("each oscillator needs at least two firings")
    for a, b, ta, tb in ((i, j, ti, tj), (j, i, tj, ti)):
        first = int(np.searchsorted(ta, start_time - eta))
        ks = np.searchsorted(tb, ta[first:-1] - eta)
        for off, k in enumerate(ks):
            m = first + off
            if k + 1 >= tb.size:
                break
            if ta[m + 1] > tb[k + 1] + eta:
                return PropertyReport("p1", False, {
                    "i": a, "m_i": m + 1, "j": b, "m_j": int(k) + 1,
                    "t_i": float(ta[m]), "t_j": float(tb[k]),
                    "t_i_next": float(ta[m + 1]), "t_j_next": float(tb[k + 1])})
    return PropertyReport("p1", True)


def first_simultaneous(log: FiringLog, i: int, j: int, eta: float = DEFAULT_ETA):
    """Indices ``(m_i, m_j)`` (1-based) of the first coincident firing, or None."""
    ti, tj = log.times(i), log.times(j)
    if not ti.size or not tj.size:
        return None
    k = np.searchsorted(tj, ti - eta)
    ok = (k < tj.size)
    hits = np.flatnonzero(ok & (np.abs(tj[np.minimum(k, tj.size - 1)] - ti) <= eta))
    if not hits.size:
        return None
    m = int(hits[0])
    return m + 1, int(k[m]) + 1


def check_sync_persistence(log: FiringLog, snapshots: Sequence[Snapshot] | None,
                           topology: NetworkTopology, i: int, j: int,
                           eta: float = DEFAULT_ETA, tol: float = SNAPSHOT_TOL) -> PropertyReport:
    """Once a symmetric pair fires together it stays identical."""
    _require_symmetric(topology, i, j)
    hit = first_simultaneous(log, i, j, eta)
    if hit is None:
        raise InsufficientDataError(f"oscillators {i} and {j} never fire together")
    mi, mj = hit
    ti, tj = log.times(i)[mi - 1:], log.times(j)[mj - 1:]
    t0 = float(ti[0])
    k = min(ti.size, tj.size)
    bad = np.flatnonzero(np.abs(ti[:k] - tj[:k]) > eta)
    fire_fail = None
    if bad.size:
        b = int(bad[0])
        fire_fail = (min(ti[b], tj[b]), {
            "i": i, "m_i": mi, "j": j, "m_j": mj, "t_sync": t0,
            "i_index": mi + b, "t_i": float(ti[b]), "j_index": mj + b, "t_j": float(tj[b])})
    snap_fail = None
    for s in snapshots or ():
        if s.time < t0 - eta:
            continue
        if abs(s.phases[i] - s.phases[j]) > tol:
            snap_fail = (s.time, {"i": i, "m_i": mi, "j": j, "m_j": mj, "t_sync": t0,
                                  "time": s.time, "phi_i": float(s.phases[i]),
                                  "phi_j": float(s.phases[j])})
            break
    fails = [f for f in (fire_fail, snap_fail) if f is not None]
    if not fails:
        return PropertyReport("p2", True)
    return PropertyReport("p2", False, min(fails, key=lambda f: f[0])[1])


def is_synchronized(snap: Snapshot, topology: NetworkTopology, tol: float = SNAPSHOT_TOL) -> bool:
    """All phases equal and every oscillator faces the same pending input.

    Pending input is compared per volley as the total strength each
    oscillator will receive.  With normalized in-strengths such a state stays
    synchronized forever.
    """
    if np.ptp(snap.phases) > tol:
        return False
    return all(np.ptp(received) <= tol for _, _, received in snap.volleys)


def detect_complete_sync(snapshots: Sequence[Snapshot], topology: NetworkTopology,
                         tol: float = SNAPSHOT_TOL) -> RunClassification:
    for s in snapshots:
        if is_synchronized(s, topology, tol):
            return RunClassification(SYNCHRONIZED, sync_time=s.time, onset_time=s.time)
    return RunClassification(UNDECIDED, note="no synchronized snapshot")


def _snapshots_match(a: Snapshot, b: Snapshot, tol: float) -> bool:
    if len(a.volleys) != len(b.volleys):
        return False
    if np.max(np.abs(a.phases - b.phases)) > tol:
        return False
    for (oa, sa, _), (ob, sb, _) in zip(a.volleys, b.volleys):
        if sa != sb or abs(oa - ob) > tol:
            return False
    return True


def verify_periodic(log: FiringLog, t0: float, delta_t0: float, t_end: float,
                    tol: float = SNAPSHOT_TOL, eta: float = DEFAULT_ETA):
    """Per-oscillator firing counts in ``[t0, t0 + delta_t0)`` if
    ``t^i_{m+d_i} - t^i_m = delta_t0`` holds for all firings in ``[t0, t_end]``,
    else None."""
    counts = []
    for i in range(log.n):
        times = log.times(i)
        lo = int(np.searchsorted(times, t0 - eta))
        d_i = int(np.searchsorted(times, t0 + delta_t0 - eta)) - lo
        hi = int(np.searchsorted(times, t_end + eta))
        window = times[lo:hi]
        if d_i < 1 or window.size <= d_i:
            return None
        if np.max(np.abs(window[d_i:] - window[:-d_i] - delta_t0)) > tol:
            return None
        counts.append(d_i)
    return tuple(counts)


class RunMonitor:
    """Online classifier, usable as a :meth:`Simulator.run` hook.

    Records the first synchronized instant and searches for a recurrence of
    the snapshot taken at firings of oscillator ``ref``.  A recurrence is
    accepted once the log, extended by one further period, confirms the
    firing-time periodicity of every oscillator.
    """

    def __init__(self, topology: NetworkTopology, d_max: int = D_MAX,
                 tol: float = SNAPSHOT_TOL, skip_firings: int | None = None,
                 ref: int = 0, stop_on_sync: bool = False, eta: float = DEFAULT_ETA):
        self.topology = topology
        self.d_max = d_max
        self.tol = tol
        self.eta = eta
        self.skip_firings = (TRANSIENT_FIRINGS_PER_OSC * topology.n
                             if skip_firings is None else skip_firings)
        self.ref = ref
        self.stop_on_sync = stop_on_sync
        self.sync_time: float | None = None
        self.period: RunClassification | None = None
        self._ref_snaps: list[tuple[int, Snapshot]] = []
        self._pending: tuple | None = None

    def observe(self, snap: Snapshot, log: FiringLog) -> bool:
        """Feed the snapshot of one instant; True once classification is final."""
        if self.sync_time is None and is_synchronized(snap, self.topology, self.tol):
            self.sync_time = snap.time
            if self.stop_on_sync:
                return True
        if self._pending is not None:
            m, t0, t1, d = self._pending
            delta = float(t1 - t0)
            if snap.time < t1 + delta - self.eta:
                return False
            self._pending = None
            counts = verify_periodic(log, t0, delta, snap.time, self.tol, self.eta)
            if counts is not None:
                self.period = RunClassification(
                    PERIODIC, d=counts[self.ref], delta_t0=delta, onset_index=m,
                    onset_time=t0, firings_per_period=counts,
                    note="" if len(set(counts)) == 1 else "oscillators differ in firings per period")
                return True
        if self.ref not in snap.fired or len(log) < self.skip_firings:
            return False
        m = log.count(self.ref)
        for back, (m_old, old) in enumerate(reversed(self._ref_snaps), start=1):
            if _snapshots_match(old, snap, self.tol):
                self._pending = (m_old, old.time, snap.time, back)
                break
        self._ref_snaps.append((m, snap))
        if len(self._ref_snaps) > self.d_max:
            self._ref_snaps.pop(0)
        return False

    def __call__(self, sim: Simulator, records) -> bool:
        if not records:
            return False
        return self.observe(sim.snapshot(r.oscillator for r in records), sim.log)

    def result(self, budget_note: str = "budget exhausted") -> RunClassification:
        return combine(self.period, self.sync_time, budget_note)


def combine(period: RunClassification | None, sync_time: float | None,
            budget_note: str = "budget exhausted") -> RunClassification:
    if sync_time is not None:
        if period is None:
            return RunClassification(SYNCHRONIZED, sync_time=sync_time, onset_time=sync_time,
                                     note="period not determined within budget")
        return RunClassification(SYNCHRONIZED, d=period.d, delta_t0=period.delta_t0,
                                 onset_index=period.onset_index, onset_time=sync_time,
                                 sync_time=sync_time,
                                 firings_per_period=period.firings_per_period)
    if period is not None:
        return period
    return RunClassification(UNDECIDED, note=budget_note)


def detect_period(log: FiringLog, snapshots: Sequence[Snapshot], topology: NetworkTopology,
                  d_max: int = D_MAX, tol: float = SNAPSHOT_TOL,
                  skip_firings: int | None = None, ref: int = 0) -> RunClassification:
    """Smallest period d <= d_max found by snapshot recurrence, verified on the log."""
    mon = RunMonitor(topology, d_max, tol, skip_firings, ref)
    cumulative = np.cumsum([len(s.fired) for s in snapshots])
    view = _LogPrefix(log)
    for s, total in zip(snapshots, cumulative):
        view.upto = int(total)
        view.t = s.time
        if mon.observe(s, view) and mon.period is not None:
            return mon.period
    return RunClassification(UNDECIDED, note="no verified recurrence within the log")


class _LogPrefix:
    """Read-only view of the first ``upto`` records of a log (replay helper)."""

    def __init__(self, log: FiringLog):
        self._log = log
        self.n = log.n
        self.upto = 0
        self.t = 0.0

    def __len__(self):
        return self.upto

    def times(self, i):
        times = self._log.times(i)
        return times[:int(np.searchsorted(times, self.t, side="right"))]

    def count(self, i):
        return self.times(i).size


def classify_run(log: FiringLog, snapshots: Sequence[Snapshot], topology: NetworkTopology,
                 d_max: int = D_MAX, tol: float = SNAPSHOT_TOL,
                 skip_firings: int | None = None) -> RunClassification:
    period = detect_period(log, snapshots, topology, d_max, tol, skip_firings)
    sync = detect_complete_sync(snapshots, topology, tol)
    return combine(period if period.periodic else None, sync.sync_time)


def check_period_one_if_synced(classification: RunClassification, tau: float, eps: float,
                               phase_map: PhaseMap, tol: float = SNAPSHOT_TOL) -> PropertyReport:
    """A completely synchronized A1 solution has period one with the synchronous ISI."""
    if not classification.synchronized:
        raise HypothesisError("classification is not completely synchronized")
    if phase_map.f(tau) + eps >= 1.0:
        raise HypothesisError("period-one synchronization assumes region A1")
    if not classification.periodic:
        raise InsufficientDataError("period of the synchronized solution was not determined")
    expected = sync_isi(phase_map, tau, eps)
    ok = classification.d == 1 and abs(classification.delta_t0 - expected) <= tol
    witness = None if ok else {"d": classification.d, "delta_t0": classification.delta_t0,
                               "expected_delta_t0": expected}
    return PropertyReport("p3", ok, witness)


@dataclass
class AnalysisReport:
    classification: RunClassification
    properties: list[PropertyReport] = field(default_factory=list)
    isi: dict = field(default_factory=dict)

    def to_dict(self):
        return {"classification": self.classification.to_dict(),
                "properties": [p.to_dict() for p in self.properties],
                "isi_summary": self.isi}
