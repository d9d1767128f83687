"""Exact event-driven integration of delayed pulse coupling.

Between events every phase grows at unit rate, so the state is only touched
at firing instants and spike arrivals.  Because the delay is global, spikes
leave in time order and arrive in time order; in-flight spikes are kept as a
FIFO of volleys (all spikes emitted at one instant).

Events closer than ``eta`` in time are merged into one instant.  Inside an
instant the order is:

1. oscillators reaching threshold by free flow fire and reset to 0;
2. arriving strengths are summed per target and applied in one jump,
   ``phi <- f_inv(min(1, f(phi) + sum))``;
3. oscillators driven to threshold fire at the same instant.

Spikes emitted at an instant arrive ``tau > 0`` later, so step 3 never
cascades within the instant.  ``TieRule.ARRIVE_FIRST`` swaps steps 1 and 2
for oscillators at threshold: the arrival is absorbed by the cap and the
oscillator fires once.
"""
from __future__ import annotations

import csv
import enum
import io
import math
from collections import deque
from dataclasses import dataclass, field
from typing import Callable, NamedTuple

import numpy as np

from .errors import EngineConsistencyError, PhaseRangeError
from .network import NetworkTopology
from .phase_model import PhaseMap, RegionClass, classify_region

DEFAULT_ETA = 1e-9


class TieRule(enum.Enum):
    FIRE_FIRST = "fire_first"
    ARRIVE_FIRST = "arrive_first"


class Spike(NamedTuple):
    source: int
    emission_time: float
    arrival_time: float


@dataclass(frozen=True)
class Volley:
    """Spikes emitted together at ``emission_time`` by ``sources``.

    ``received[j]`` caches the total strength oscillator j gets on arrival.
    """

    emission_time: float
    arrival_time: float
    sources: tuple[int, ...]
    received: np.ndarray = field(compare=False, repr=False)


class FiringRecord(NamedTuple):
    time: float
    oscillator: int
    index: int


class FiringLog:
    """Firing records ``(t, i, m)``: oscillator i fires its m-th time at t.

    Records are sorted by time with ties broken by oscillator id; indices
    start at 1 for each oscillator.
    """

    def __init__(self, n: int):
        self.n = n
        self.records: list[FiringRecord] = []
        self._times: list[list[float]] = [[] for _ in range(n)]

    def append(self, rec: FiringRecord) -> None:
        self.records.append(rec)
        self._times[rec.oscillator].append(rec.time)

    def __len__(self):
        return len(self.records)

    def __iter__(self):
        return iter(self.records)

    def times(self, i: int) -> np.ndarray:
        """Firing times ``t^i_1, t^i_2, ...`` of oscillator ``i``."""
        return np.asarray(self._times[i])

    def time_of(self, i: int, m: int) -> float:
        return self._times[i][m - 1]

    def count(self, i: int) -> int:
        return len(self._times[i])

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["time", "oscillator", "index"])
        for t, i, m in self.records:
            w.writerow([f"{t:.12g}", i, m])
        return buf.getvalue()

    @classmethod
    def from_csv(cls, text: str, n: int | None = None) -> "FiringLog":
        rows = list(csv.DictReader(io.StringIO(text)))
        if n is None:
            n = 1 + max((int(r["oscillator"]) for r in rows), default=-1)
        log = cls(n)
        for r in rows:
            log.append(FiringRecord(float(r["time"]), int(r["oscillator"]), int(r["index"])))
        return log


@dataclass
class SimState:
    t_now: float
    phases: np.ndarray
    inflight: deque = field(default_factory=deque)
    firing_counts: np.ndarray | None = None

    def __post_init__(self):
        if self.firing_counts is None:
            self.firing_counts = np.zeros(len(self.phases), dtype=np.int64)

    @property
    def spikes(self) -> list[Spike]:
        return [Spike(s, v.emission_time, v.arrival_time)
                for v in self.inflight for s in v.sources]

    def copy(self) -> "SimState":
        return SimState(self.t_now, self.phases.copy(), deque(self.inflight),
                        self.firing_counts.copy())


@dataclass(frozen=True)
class EventBatch:
    time: float
    firing: tuple[int, ...]
    arrivals: tuple[Volley, ...]

    def __len__(self):
        return len(self.firing) + sum(len(v.sources) for v in self.arrivals)


@dataclass(frozen=True)
class Snapshot:
    """State right after an instant was processed.

    ``volleys`` holds ``(arrival offset from time, sources, received)`` for
    every pending volley; together with ``phases`` it determines the future.
    """

    time: float
    phases: np.ndarray
    volleys: tuple[tuple[float, tuple[int, ...], np.ndarray], ...]
    fired: tuple[int, ...]


@dataclass
class RunResult:
    log: FiringLog
    state: SimState
    snapshots: list[Snapshot]
    status: str  # "max_firings", "t_max" or "hook"


def check_initial_phases(phases, n: int) -> np.ndarray:
    arr = np.array(phases, dtype=float).ravel()
    if arr.shape != (n,):
        raise PhaseRangeError(f"expected {n} initial phases, got {arr.size}")
    if np.any(~(arr > 0.0)) or np.any(arr > 1.0):
        raise PhaseRangeError(f"initial phases must lie in (0, 1], got {arr.tolist()}")
    return arr


class Simulator:
    """Event-driven simulator for one network and one set of initial phases.

    Example::

        sim = Simulator(all_to_all(4, 0.9, 0.6), LIFPhaseMap(1.05), [0.1766, 0.4298, 0.4079, 0.7061])
        result = sim.run(max_firings=40)
    """

    def __init__(self, topology: NetworkTopology, phase_map: PhaseMap, phases,
                 eta: float = DEFAULT_ETA, tie_rule: TieRule = TieRule.FIRE_FIRST,
                 debug: bool = False):
        self.topology = topology
        self.phase_map = phase_map
        self.eta = eta
        self.tie_rule = TieRule(tie_rule)
        self.tau = topology.tau
        n = topology.n
        self.state = SimState(0.0, check_initial_phases(phases, n).copy())
        self.log = FiringLog(n)
        self._has_targets = np.asarray(topology.dense().sum(axis=1) > 0)
        self._debug_theorem1 = debug and (
            n == 1 or classify_region(phase_map, topology.tau, topology.eps) is RegionClass.A1)
        self._last_fire = np.full(n, -math.inf)

    @property
    def n(self) -> int:
        return self.topology.n

    def next_event(self) -> EventBatch:
        st = self.state
        t_flow = st.t_now + (1.0 - float(st.phases.max()))
        t = min(t_flow, st.inflight[0].arrival_time) if st.inflight else t_flow
        horizon = t + self.eta
        firing = np.flatnonzero(st.phases + (t - st.t_now) >= 1.0 - self.eta)
        arrivals = []
        for v in st.inflight:
            if v.arrival_time > horizon:
                break
            arrivals.append(v)
        return EventBatch(t, tuple(int(i) for i in firing), tuple(arrivals))

    def apply_batch(self, batch: EventBatch) -> list[FiringRecord]:
        st = self.state
        if batch.time < st.t_now:
            raise EngineConsistencyError("event batch lies in the past")
        phases = st.phases
        phases += batch.time - st.t_now
        st.t_now = t = batch.time
        n = self.n
        fired = np.zeros(n, dtype=bool)
        flow = list(batch.firing)
        if flow:
            fired[flow] = True
            phases[flow] = 0.0
        if batch.arrivals:
            for _ in batch.arrivals:
                st.inflight.popleft()
            received = batch.arrivals[0].received
            for v in batch.arrivals[1:]:
                received = received + v.received
            hit_mask = received > 0
            if self.tie_rule is TieRule.ARRIVE_FIRST and flow:
                # already at threshold: the cap absorbs the pulse
                hit_mask[flow] = False
            targets = np.flatnonzero(hit_mask)
            if targets.size:
                pm = self.phase_map
                y = pm._f(phases[targets]) + received[targets]
                new = np.where(y >= 1.0, 1.0, pm._f_inv(np.minimum(y, 1.0)))
                reach = new >= 1.0 - self.eta
                phases[targets] = new
                jumped = targets[reach]
                if np.any(fired[jumped]):
                    raise EngineConsistencyError(
                        f"oscillator fired twice at t={t!r}; same-instant cascade is impossible")
                fired[jumped] = True
                phases[jumped] = 0.0
        idx = np.flatnonzero(fired)
        records = []
        if idx.size:
            for i in idx:
                i = int(i)
                st.firing_counts[i] += 1
                rec = FiringRecord(t, i, int(st.firing_counts[i]))
                self.log.append(rec)
                records.append(rec)
            if self._debug_theorem1:
                gaps = t - self._last_fire[idx]
                assert np.all(gaps > self.tau - 1e-9), f"interspike interval <= tau at t={t}"
                self._last_fire[idx] = t
            if self._has_targets[idx].any():
                counts = np.zeros(n)
                counts[idx] = 1.0
                st.inflight.append(Volley(t, t + self.tau, tuple(int(i) for i in idx),
                                          self.topology.received(counts)))
        return records

    def step(self) -> list[FiringRecord]:
        return self.apply_batch(self.next_event())

    def snapshot(self, fired=()) -> Snapshot:
        st = self.state
        return Snapshot(st.t_now, st.phases.copy(),
                        tuple((v.arrival_time - st.t_now, v.sources, v.received) for v in st.inflight),
                        tuple(fired))

    def run(self, max_firings: int | None = None, t_max: float | None = None,
            hook: Callable[["Simulator", list[FiringRecord]], bool] | None = None,
            record_snapshots: bool = False) -> RunResult:
        """Advance until a stop criterion is met.

        ``hook(sim, records)`` is called after every instant and stops the
        run by returning True.  Snapshots, when recorded, are taken at the
        start of a fresh run and after every instant that contained a firing.
        """
        if max_firings is None and t_max is None and hook is None:
            raise ValueError("run needs at least one stop criterion")
        snapshots = [self.snapshot()] if record_snapshots and not self.log.records else []
        status = None
        while status is None:
            batch = self.next_event()
            if t_max is not None and batch.time > t_max:
                status = "t_max"
                break
            records = self.apply_batch(batch)
            if record_snapshots and records:
                snapshots.append(self.snapshot(r.oscillator for r in records))
            if hook is not None and hook(self, records):
                status = "hook"
            elif max_firings is not None and len(self.log) >= max_firings:
                status = "max_firings"
        return RunResult(self.log, self.state, snapshots, status)


def simulate(topology, phase_map, phases, **kwargs) -> RunResult:
    """One-shot convenience: build a :class:`Simulator` and run it."""
    sim_kw = {k: kwargs.pop(k) for k in ("eta", "tie_rule", "debug") if k in kwargs}
    return Simulator(topology, phase_map, phases, **sim_kw).run(**kwargs)
