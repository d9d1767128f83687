"""JSON configuration for single runs and sweeps.

Run config::

    {
      "phase_map": {"kind": "lif", "I": 1.05},
      "topology": {"topology": "all_to_all", "n": 4},
      "tau": 0.9, "eps": 0.6,
      "initial_phases": {"explicit": [0.1766, 0.4298, 0.4079, 0.7061]},
      "budget": {"firings_per_osc": 500, "t_max": 200.0},
      "tolerances": {"eta": 1e-9, "snapshot_tol": 1e-7, "d_max": 64, ...},
      "tie_rule": "fire_first"
    }

``initial_phases`` takes exactly one of ``explicit`` (list), ``identical``
(one value for every oscillator) or ``random`` (seed).  A topology may also
be ``{"topology": "matrix", "matrix": [[...], ...]}``.

Sweep config: ``n`` (int or list), either ``grid`` with ``taus``/``epss``
(lists, or ``{"num": k}`` for k cell midpoints of (0, 1)) or ``points``
(list of ``[tau, eps]``) or scalar ``tau``/``eps``, plus ``samples``,
``seed``, ``budget``, ``tolerances`` and ``phase_map``.
"""
from __future__ import annotations

import json
from dataclasses import asdict, dataclass, field, fields
from pathlib import Path

import numpy as np

from .engine import TieRule, check_initial_phases
from .errors import ConfigError, PulseNetError
from .montecarlo import SweepSpec, midpoints, sample_phases
from .network import NetworkTopology, topology_from_config
from .phase_model import PhaseMap, phase_map_from_config
from .settings import Budget, Tolerances

PHASE_MODES = ("explicit", "identical", "random")


def load_json(path) -> dict:
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise ConfigError(f"{path}: {exc.strerror}") from exc
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"{path}:{exc.lineno}:{exc.colno}: {exc.msg}") from exc
    if not isinstance(data, dict):
        raise ConfigError(f"{path}: top level must be a JSON object")
    return data


def _number(d: dict, key: str, path: str, kind=float, default=None):
    if key not in d:
        if default is None:
            raise ConfigError(f"{path}.{key}: missing required field")
        return default
    v = d[key]
    if isinstance(v, bool) or not isinstance(v, (int, float)):
        raise ConfigError(f"{path}.{key}: expected a number, got {v!r}")
    if kind is int and int(v) != v:
        raise ConfigError(f"{path}.{key}: expected an integer, got {v!r}")
    return kind(v)


def _dataclass_from(cls, d, path):
    if d is None:
        return cls()
    if not isinstance(d, dict):
        raise ConfigError(f"{path}: expected an object")
    known = {f.name: f for f in fields(cls)}
    unknown = set(d) - set(known)
    if unknown:
        raise ConfigError(f"{path}.{sorted(unknown)[0]}: unknown field")
    defaults = cls()
    kw = {}
    for name in d:
        kind = int if isinstance(getattr(defaults, name), int) else float
        kw[name] = _number(d, name, path, kind)
    try:
        return cls(**kw)
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"{path}: {exc}") from exc


@dataclass
class RunConfig:
    tau: float
    eps: float
    topology: dict
    initial_phases: dict
    phase_map: dict = field(default_factory=lambda: {"kind": "lif", "I": 1.05})
    budget: Budget = field(default_factory=Budget)
    tolerances: Tolerances = field(default_factory=Tolerances)
    tie_rule: str = TieRule.FIRE_FIRST.value

    def build_phase_map(self) -> PhaseMap:
        return phase_map_from_config(self.phase_map)

    def build_topology(self) -> NetworkTopology:
        return topology_from_config(self.topology, self.tau, self.eps)

    def build_phases(self, n: int) -> np.ndarray:
        (mode, value), = self.initial_phases.items()
        if mode == "explicit":
            return check_initial_phases(value, n)
        if mode == "identical":
            return check_initial_phases([value] * n, n)
        return sample_phases(n, np.random.default_rng(int(value)))

    def to_dict(self) -> dict:
        return {"phase_map": self.phase_map, "topology": self.topology,
                "tau": self.tau, "eps": self.eps, "initial_phases": self.initial_phases,
                "budget": asdict(self.budget), "tolerances": asdict(self.tolerances),
                "tie_rule": self.tie_rule}


def run_config_from_dict(d: dict, seed: int | None = None) -> RunConfig:
    """Validate a run config; ``seed`` replaces a random initial-phase seed."""
    allowed = {"phase_map", "topology", "tau", "eps", "initial_phases", "budget",
               "tolerances", "tie_rule"}
    unknown = set(d) - allowed
    if unknown:
        raise ConfigError(f"config.{sorted(unknown)[0]}: unknown field")
    tau = _number(d, "tau", "config")
    eps = _number(d, "eps", "config")
    topo = d.get("topology")
    if not isinstance(topo, dict):
        raise ConfigError("config.topology: expected an object")
    phases = d.get("initial_phases")
    if not isinstance(phases, dict) or len(phases) != 1 or next(iter(phases)) not in PHASE_MODES:
        raise ConfigError("config.initial_phases: give exactly one of "
                          + ", ".join(PHASE_MODES))
    phases = dict(phases)
    if "random" in phases and seed is not None:
        phases["random"] = seed
    tie = d.get("tie_rule", TieRule.FIRE_FIRST.value)
    if tie not in {t.value for t in TieRule}:
        raise ConfigError(f"config.tie_rule: unknown rule {tie!r}")
    cfg = RunConfig(tau, eps, dict(topo), phases, dict(d.get("phase_map") or {"kind": "lif", "I": 1.05}),
                    _dataclass_from(Budget, d.get("budget"), "config.budget"),
                    _dataclass_from(Tolerances, d.get("tolerances"), "config.tolerances"), tie)
    # surface model-range errors now, with the field they come from
    for builder, where in ((cfg.build_phase_map, "phase_map"), (cfg.build_topology, "topology")):
        try:
            builder()
        except PulseNetError as exc:
            raise ConfigError(f"config.{where}: {exc}") from exc
    try:
        cfg.build_phases(cfg.build_topology().n)
    except (PulseNetError, TypeError, ValueError) as exc:
        raise ConfigError(f"config.initial_phases: {exc}") from exc
    return cfg


def _axis(v, path):
    if isinstance(v, dict):
        return midpoints(int(_number(v, "num", path, int)))
    if not isinstance(v, list):
        raise ConfigError(f"{path}: expected a list or {{\"num\": k}}")
    return tuple(float(x) for x in v)


def sweep_spec_from_dict(d: dict, seed: int | None = None) -> SweepSpec:
    allowed = {"n", "grid", "points", "tau", "eps", "samples", "seed", "budget",
               "tolerances", "phase_map"}
    unknown = set(d) - allowed
    if unknown:
        raise ConfigError(f"spec.{sorted(unknown)[0]}: unknown field")
    ns = d.get("n")
    ns = [ns] if isinstance(ns, int) else ns
    if not isinstance(ns, list) or not all(isinstance(n, int) for n in ns):
        raise ConfigError("spec.n: expected an integer or a list of integers")
    taus = epss = None
    if "grid" in d:
        g = d["grid"]
        if not isinstance(g, dict):
            raise ConfigError("spec.grid: expected an object")
        taus, epss = _axis(g.get("taus"), "spec.grid.taus"), _axis(g.get("epss"), "spec.grid.epss")
        points = tuple((t, e) for t in taus for e in epss)
    elif "points" in d:
        try:
            points = tuple((float(t), float(e)) for t, e in d["points"])
        except (TypeError, ValueError) as exc:
            raise ConfigError("spec.points: expected a list of [tau, eps] pairs") from exc
    else:
        points = ((_number(d, "tau", "spec"), _number(d, "eps", "spec")),)
    pm = d.get("phase_map") or {"kind": "lif", "I": 1.05}
    if pm.get("kind", "lif") != "lif":
        raise ConfigError("spec.phase_map: sweeps support the lif phase map only")
    try:
        return SweepSpec(points, tuple(ns), _number(d, "samples", "spec", int),
                         seed if seed is not None else _number(d, "seed", "spec", int, 0),
                         _dataclass_from(Budget, d.get("budget"), "spec.budget"),
                         _dataclass_from(Tolerances, d.get("tolerances"), "spec.tolerances"),
                         float(pm.get("I", 1.05)), taus, epss)
    except ValueError as exc:
        raise ConfigError(f"spec: {exc}") from exc


def sweep_spec_to_dict(spec: SweepSpec) -> dict:
    out = {"n": list(spec.ns)}
    if spec.taus is not None:
        out["grid"] = {"taus": list(spec.taus), "epss": list(spec.epss)}
    else:
        out["points"] = [list(p) for p in spec.points]
    out.update(samples=spec.samples, seed=spec.seed, budget=asdict(spec.budget),
               tolerances=asdict(spec.tolerances),
               phase_map={"kind": "lif", "I": spec.current})
    return out
