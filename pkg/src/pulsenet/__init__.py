"""Event-driven simulation of pulse-coupled oscillators with delayed excitatory coupling."""
from .analysis import (RunClassification, RunMonitor, check_firing_order,
                       check_period_one_if_synced, check_sync_persistence, check_theorem1,
                       classify_run, detect_complete_sync, detect_period, interspike_intervals)
from .engine import FiringLog, Simulator, TieRule, simulate
from .montecarlo import SweepSpec, classify_sample, estimate_p, sweep
from .network import NetworkTopology, all_to_all, custom_topology, symmetric_pair
from .phase_model import CustomPhaseMap, LIFPhaseMap, RegionClass, classify_region, sync_isi
from .settings import Budget, Tolerances

__version__ = "0.1.0"
