from collections import deque

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import FIG1A_PHASES
from pulsenet.engine import (FiringLog, SimState, Simulator, TieRule, Volley, simulate)
from pulsenet.errors import PhaseRangeError
from pulsenet.network import NetworkTopology, all_to_all, custom_topology, random_topology
from pulsenet.phase_model import LIFPhaseMap

PM = LIFPhaseMap(1.05)


def single(phase, tau=0.5):
    return Simulator(custom_topology([[0.0]], tau, 0.3), PM, [phase])


def test_single_oscillator_first_firing_and_period():
    res = single(0.3).run(max_firings=4)
    np.testing.assert_allclose(res.log.times(0), [0.7, 1.7, 2.7, 3.7], atol=1e-12)


def test_single_oscillator_three_firings():
    res = single(0.5).run(max_firings=3)
    assert [r.time for r in res.log] == pytest.approx([0.5, 1.5, 2.5], abs=1e-12)
    assert res.status == "max_firings"


def test_phase_one_fires_at_zero():
    res = single(1.0).run(max_firings=1)
    assert res.log.records[0].time == 0.0


@pytest.mark.parametrize("phases", [[0.0], [1.2], [-0.1], [float("nan")]])
def test_initial_phase_range(phases):
    with pytest.raises(PhaseRangeError):
        single(0.5).__class__(custom_topology([[0.0]], 0.5, 0.3), PM, phases)


def test_initial_phase_count():
    with pytest.raises(PhaseRangeError):
        Simulator(all_to_all(3, 0.5, 0.3), PM, [0.5, 0.5])


def test_fig1a_initial_state(fig1_net, lif):
    sim = Simulator(fig1_net, lif, FIG1A_PHASES)
    assert sim.state.t_now == 0.0
    assert not sim.state.inflight
    np.testing.assert_array_equal(sim.state.phases, FIG1A_PHASES)


def test_next_event_flow():
    batch = single(0.25).next_event()
    assert batch.time == pytest.approx(0.75)
    assert batch.firing == (0,) and batch.arrivals == ()


def test_simultaneous_spikes_form_one_batch():
    sim = Simulator(all_to_all(3, 0.2, 0.3), PM, [0.5, 0.5, 0.2])
    recs = sim.step()
    assert [r.oscillator for r in recs] == [0, 1]
    batch = sim.next_event()
    assert batch.time == pytest.approx(0.7)
    assert len(batch.arrivals) == 1 and batch.arrivals[0].sources == (0, 1)
    assert len(batch) == 2


def test_volleys_within_eta_merge():
    net = all_to_all(3, 0.5, 0.3)
    sim = Simulator(net, PM, [0.2, 0.2, 0.2])
    recv = net.received(np.array([1.0, 0.0, 0.0]))
    sim.state.inflight = deque([Volley(-0.1, 0.4, (0,), recv),
                                Volley(-0.1 + 5e-10, 0.4 + 5e-10, (1,), net.received(np.array([0.0, 1.0, 0.0])))])
    batch = sim.next_event()
    assert len(batch.arrivals) == 2


def _coincidence(rule):
    # oscillator 0 fires at t=0; its spike reaches oscillator 1 at t=tau,
    # exactly when oscillator 1 reaches threshold by free flow
    tau, eps = 0.25, 0.4
    sim = Simulator(all_to_all(2, tau, eps), PM, [1.0, 1.0 - tau], tie_rule=rule)
    sim.step()
    batch = sim.next_event()
    assert batch.firing == (1,) and len(batch.arrivals) == 1
    recs = sim.apply_batch(batch)
    return recs, sim.state.phases[1]


def test_coincidence_fire_first():
    recs, phase = _coincidence(TieRule.FIRE_FIRST)
    assert [(r.oscillator, r.index) for r in recs] == [(1, 1)]
    assert phase == pytest.approx(PM.f_inv(0.4), abs=1e-12)


def test_coincidence_arrive_first():
    recs, phase = _coincidence(TieRule.ARRIVE_FIRST)
    assert [(r.oscillator, r.index) for r in recs] == [(1, 1)]
    assert phase == 0.0


def test_subthreshold_jump():
    tau, eps = 0.3, 0.2
    sim = Simulator(all_to_all(2, tau, eps), PM, [1.0, 0.05])
    sim.step()
    recs = sim.step()  # arrival at t = 0.3, oscillator 1 at phase 0.35
    assert recs == []
    assert sim.state.t_now == pytest.approx(0.3)
    assert sim.state.phases[1] == pytest.approx(PM.f_inv(PM.f(0.35) + eps), abs=1e-12)
    assert sim.state.phases[0] == pytest.approx(0.3)


def test_jump_to_threshold_fires_once_and_discards_excess():
    tau, eps = 0.3, 0.6
    sim = Simulator(all_to_all(2, tau, eps), PM, [1.0, 0.6])
    sim.step()
    recs = sim.step()  # phase 0.9 plus 0.6 in f-units overshoots threshold
    assert [(r.time, r.oscillator, r.index) for r in recs] == [(pytest.approx(0.3), 1, 1)]
    assert sim.state.phases[1] == 0.0
    assert len(sim.state.inflight) == 1


@pytest.mark.parametrize("tau, eps", [(0.9, 0.6), (0.55, 0.4), (0.3, 0.9)])
def test_a2_identical_phases_period_tau(tau, eps):
    res = simulate(all_to_all(5, tau, eps), PM, [0.37] * 5, max_firings=100)
    for i in range(5):
        isi = np.diff(res.log.times(i))[1:]
        np.testing.assert_allclose(isi, tau, atol=1e-9)


@settings(max_examples=200)
@given(phi=st.floats(0.0, 1.0), parts=st.lists(st.floats(1e-4, 0.5), min_size=1, max_size=6))
def test_sequential_jumps_equal_summed_jump(phi, parts):
    seq = phi
    for e in parts:
        seq = PM.jump(seq, e)
    y = PM.f(phi) + sum(parts)
    summed = 1.0 if y >= 1.0 else PM.f_inv(y)
    assert seq == pytest.approx(summed, abs=1e-10)


def test_engine_applies_summed_jump():
    net = all_to_all(4, 0.1, 0.6)
    sim = Simulator(net, PM, [1.0, 1.0, 1.0 - 1e-3, 0.05])
    sim.step()  # 0 and 1 fire at t=0
    sim.step()  # 2 fires at t=1e-3
    before = sim.state.phases[3] + (0.1 - sim.state.t_now)
    assert sim.step() == []  # the two-spike volley reaches 3 at t=0.1
    expected = PM.f_inv(PM.f(before) + 2 * 0.2)
    assert sim.state.phases[3] == pytest.approx(expected, abs=1e-12)


def test_determinism(fig1_net, lif):
    a = simulate(fig1_net, lif, FIG1A_PHASES, max_firings=500)
    b = simulate(fig1_net, lif, FIG1A_PHASES, max_firings=500)
    assert a.log.to_csv() == b.log.to_csv()
    assert a.log.records == b.log.records


def test_fig1a_order_violation_indices(fig1_net, lif):
    log = simulate(fig1_net, lif, FIG1A_PHASES, max_firings=40).log
    t = log.time_of
    assert t(0, 3) < t(1, 4) - 1e-7
    assert abs(t(0, 4) - t(1, 5)) <= 1e-9
    assert t(0, 5) > t(1, 6) + 1e-7


def test_log_invariants_and_causality():
    rng = np.random.default_rng(5)
    net = random_topology(6, 0.4, 0.5, rng)
    sim = Simulator(net, PM, 1.0 - rng.random(6))
    emitted = {}
    while len(sim.log) < 300:
        batch = sim.next_event()
        for v in batch.arrivals:
            assert v.arrival_time - v.emission_time == pytest.approx(net.tau, abs=1e-12)
            assert emitted[v.emission_time] == v.sources
            assert abs(v.arrival_time - batch.time) <= sim.eta
        recs = sim.apply_batch(batch)
        if recs:
            emitted[recs[0].time] = tuple(r.oscillator for r in recs)
        st_ = sim.state
        assert np.all((st_.phases >= 0) & (st_.phases < 1))
        for spike in st_.spikes:
            assert st_.t_now <= spike.arrival_time <= st_.t_now + net.tau + 1e-12
    recs = sim.log.records
    assert recs == sorted(recs, key=lambda r: (r.time, r.oscillator))
    for i in range(6):
        idx = [r.index for r in recs if r.oscillator == i]
        assert idx == list(range(1, len(idx) + 1))
        assert np.all(np.diff(sim.log.times(i)) > 0)


def test_free_run_oracle():
    n = 4
    phases = np.array([0.9, 0.55, 0.3, 0.125])
    free = NetworkTopology(np.zeros((n, n)), 0.5, 0.3)
    log = simulate(free, PM, phases, max_firings=40).log
    for i in range(n):
        times = log.times(i)
        np.testing.assert_allclose(times, (1 - phases[i]) + np.arange(times.size), atol=1e-12)


def test_debug_theorem1_assertion_quiet_in_a1():
    rng = np.random.default_rng(11)
    for _ in range(20):
        net = all_to_all(5, 0.2, 0.3)
        simulate(net, PM, 1.0 - rng.random(5), max_firings=200, debug=True)


def test_run_needs_stop_criterion():
    with pytest.raises(ValueError):
        single(0.5).run()


def test_t_max_and_hook_stops():
    res = single(0.5).run(t_max=3.0)
    assert res.status == "t_max" and res.log.times(0)[-1] <= 3.0
    calls = []
    res = single(0.5).run(hook=lambda sim, recs: calls.append(recs) or len(calls) >= 2)
    assert res.status == "hook" and len(res.log) == 2


def test_snapshots_recorded(fig1_net, lif):
    res = simulate(fig1_net, lif, FIG1A_PHASES, max_firings=20, record_snapshots=True)
    fired = sum(len(s.fired) for s in res.snapshots)
    assert fired == len(res.log)
    s = res.snapshots[0]
    assert all(0 < off <= 0.9 + 1e-12 for off, _, _ in s.volleys)


def test_csv_roundtrip(fig1_net, lif):
    log = simulate(fig1_net, lif, FIG1A_PHASES, max_firings=30).log
    text = log.to_csv()
    assert text.splitlines()[0] == "time,oscillator,index"
    assert text.splitlines()[1] == "0.2939,3,1"
    back = FiringLog.from_csv(text)
    assert [(r.oscillator, r.index) for r in back] == [(r.oscillator, r.index) for r in log]
    np.testing.assert_allclose([r.time for r in back], [r.time for r in log], rtol=1e-11)


def test_state_copy_is_independent():
    s = SimState(0.0, np.array([0.5]))
    c = s.copy()
    c.phases[0] = 0.9
    assert s.phases[0] == 0.5
