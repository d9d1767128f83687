"""Run budgets and numerical tolerances shared by the CLI and the estimators."""
from __future__ import annotations

from dataclasses import dataclass

from .analysis import D_MAX, ISI_SLACK, SNAPSHOT_TOL, TRANSIENT_FIRINGS_PER_OSC
from .engine import DEFAULT_ETA
from .phase_model import DEFAULT_BOUNDARY_TOL


@dataclass(frozen=True)
class Budget:
    """Stop after ``firings_per_osc * N`` firings or at ``t_max``, whichever comes first."""

    firings_per_osc: int = 500
    t_max: float = 200.0

    def max_firings(self, n: int) -> int:
        return self.firings_per_osc * n


@dataclass(frozen=True)
class Tolerances:
    eta: float = DEFAULT_ETA
    snapshot_tol: float = SNAPSHOT_TOL
    d_max: int = D_MAX
    transient_per_osc: int = TRANSIENT_FIRINGS_PER_OSC
    isi_slack: float = ISI_SLACK
    boundary_tol: float = DEFAULT_BOUNDARY_TOL
