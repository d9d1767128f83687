import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy.integrate import solve_ivp

from pulsenet.errors import DomainError, ParameterError, PhaseMapError
from pulsenet.phase_model import (CustomPhaseMap, LIFPhaseMap, RegionClass, classify_region,
                                  phase_map_from_config, sync_isi, validate_phase_map)

# integrated from the ODE below with DOP853, rtol 1e-13, atol 1e-12
F_HALF = 0.8208712152521723
F_TENTH = 0.27559638864155467
F_09 = 0.9822058946652668


def integrate_lif(current, phis):
    c = math.log(current / (current - 1.0))
    sol = solve_ivp(lambda p, y: [-c * y[0] + current * c], (0.0, 1.0), [0.0],
                    method="DOP853", rtol=1e-13, atol=1e-12, t_eval=phis)
    return sol.y[0]


unit = st.floats(0.0, 1.0)


def test_boundary_values(lif):
    assert lif.f(0.0) == 0.0
    assert abs(lif.f(1.0) - 1.0) < 1e-12
    assert lif.f_inv(0.0) == 0.0
    assert abs(lif.f_inv(1.0) - 1.0) < 1e-12


def test_oracle_values(lif):
    assert lif.f(0.5) == pytest.approx(F_HALF, abs=1e-12)
    assert lif.f(0.1) == pytest.approx(F_TENTH, abs=1e-12)
    assert lif.f(0.9) == pytest.approx(F_09, abs=1e-12)
    assert lif.f_inv(0.82087) == pytest.approx(0.5, abs=1e-5)
    assert lif.f_inv(F_HALF) == pytest.approx(0.5, abs=1e-12)


@pytest.mark.parametrize("current", [1.05, 1.5, 3.0])
def test_closed_form_matches_ode(current):
    grid = np.linspace(0.0, 1.0, 1001)
    pm = LIFPhaseMap(current)
    assert np.max(np.abs(pm.f(grid) - integrate_lif(current, grid))) <= 1e-9


def test_vectorized(lif):
    x = np.array([0.0, 0.25, 1.0])
    np.testing.assert_allclose(lif.f_inv(lif.f(x)), x, atol=1e-12)


@pytest.mark.parametrize("bad", [-0.1, 1.0 + 1e-9, float("nan")])
def test_domain_errors(lif, bad):
    with pytest.raises(DomainError):
        lif.f(bad)
    with pytest.raises(DomainError):
        lif.f_inv(bad)


def test_slack_at_edges(lif):
    assert lif.f(1.0 + 1e-13) == pytest.approx(1.0, abs=1e-12)


def test_invalid_current():
    with pytest.raises(PhaseMapError):
        LIFPhaseMap(1.0)


@given(a=unit, b=unit)
def test_monotone(a, b):
    pm = LIFPhaseMap(1.05)
    if a < b:
        assert pm.f(a) < pm.f(b)


@given(x=unit)
def test_roundtrip(x):
    pm = LIFPhaseMap(1.05)
    assert abs(pm.f_inv(pm.f(x)) - x) <= 1e-10


@given(a=st.floats(0.0, 1.0), b=st.floats(0.0, 1.0))
def test_midpoint_concavity(a, b):
    pm = LIFPhaseMap(1.05)
    if b - a > 1e-6:
        assert pm.f((a + b) / 2) > (pm.f(a) + pm.f(b)) / 2


@settings(max_examples=300)
@given(delta=st.floats(0.01, 0.99), u=st.floats(0.0, 1.0), v=st.floats(0.0, 1.0))
def test_later_pulse_bigger_jump(delta, u, v):
    pm = LIFPhaseMap(1.05)
    top = pm.f_inv(1.0 - delta)
    t1, t2 = sorted((u * top, v * top))
    if t2 - t1 < 1e-6:
        return
    jump = lambda th: pm.f_inv(pm.f(th) + delta) - th
    assert jump(t1) < jump(t2)


@settings(max_examples=300)
@given(u=st.floats(0.0, 1.0), v=st.floats(0.0, 1.0), w=st.floats(0.01, 1.0))
def test_shift_contracts_f_difference(u, v, w):
    pm = LIFPhaseMap(1.05)
    t1, t2 = sorted((u, v))
    if t2 - t1 < 1e-6 or t2 > 0.99:
        return
    delta = w * (1.0 - t2)
    assert pm.f(t2) - pm.f(t1) > pm.f(t2 + delta) - pm.f(t1 + delta)


def test_custom_map_accepted():
    pm = CustomPhaseMap(lambda x: np.sin(np.pi * np.asarray(x) / 2),
                        lambda y: 2 * np.arcsin(np.asarray(y)) / np.pi,
                        lambda x: np.pi / 2 * np.cos(np.pi * np.asarray(x) / 2), name="sine")
    assert pm.f(1.0) == pytest.approx(1.0)
    assert pm.jump(0.5, 0.1) > 0.5


def test_custom_map_rejects_convex():
    with pytest.raises(PhaseMapError):
        CustomPhaseMap(lambda x: np.asarray(x) ** 2, np.sqrt, lambda x: 2 * np.asarray(x))


def test_custom_map_rejects_bad_inverse():
    with pytest.raises(PhaseMapError):
        CustomPhaseMap(lambda x: np.sqrt(x), lambda y: np.asarray(y),
                       lambda x: 0.5 / np.sqrt(np.maximum(x, 1e-12)))


def test_lif_passes_validation(lif):
    validate_phase_map(lif)


def test_from_config():
    assert phase_map_from_config({"kind": "lif", "I": 1.05}) == LIFPhaseMap(1.05)
    with pytest.raises(PhaseMapError):
        phase_map_from_config({"kind": "spline"})


def test_regions(lif):
    assert classify_region(lif, 0.9, 0.6) is RegionClass.A2_INTERIOR
    assert classify_region(lif, 0.1, 0.3) is RegionClass.A1
    tau = 0.3
    assert classify_region(lif, tau, 1.0 - lif.f(tau)) is RegionClass.A2_BOUNDARY
    assert classify_region(lif, tau, 1.0 - lif.f(tau) - 1e-6) is RegionClass.A1
    assert RegionClass.A2_BOUNDARY.in_a2 and not RegionClass.A1.in_a2


@pytest.mark.parametrize("tau, eps", [(0.0, 0.5), (1.0, 0.5), (0.5, 0.0), (0.5, 1.0)])
def test_region_parameter_errors(lif, tau, eps):
    with pytest.raises(ParameterError):
        classify_region(lif, tau, eps)


def test_sync_isi(lif):
    assert sync_isi(lif, 0.3, 0.0) == pytest.approx(1.0, abs=1e-15)
    assert sync_isi(lif, 0.1, 0.3) == pytest.approx(1.0 - (lif.f_inv(F_TENTH + 0.3) - 0.1), abs=1e-12)
    assert 0.0 < sync_isi(lif, 0.1, 0.3) < 1.0
    with pytest.raises(DomainError):
        sync_isi(lif, 0.9, 0.6)
