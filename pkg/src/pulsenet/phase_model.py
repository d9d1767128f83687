"""Phase maps ``f`` and the (tau, eps) parameter partition.

A phase map is a concave, strictly increasing bijection of [0, 1] onto
itself.  Spikes act additively on ``f(phi)``, so the map fixes how much a
pulse advances an oscillator depending on where it sits in its cycle.
"""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .errors import DomainError, ParameterError, PhaseMapError

DOMAIN_SLACK = 1e-12
DEFAULT_BOUNDARY_TOL = 1e-9


def _check_unit(x, what):
    arr = np.asarray(x, dtype=float)
    if arr.size and (np.any(arr < -DOMAIN_SLACK) or np.any(arr > 1 + DOMAIN_SLACK)
                     or np.any(np.isnan(arr))):
        raise DomainError(f"{what} must lie in [0, 1], got {x!r}")
    return np.clip(arr, 0.0, 1.0)


def _ret(arr, like):
    return float(arr) if np.ndim(like) == 0 else arr


class PhaseMap:
    """Common interface: ``f``, ``f_inv`` and ``f_prime`` on [0, 1].

    All three accept floats or numpy arrays.  Subclasses implement the
    unchecked ``_f``/``_f_inv``/``_f_prime`` kernels; the public methods add
    domain checks.  The engine calls the kernels directly.
    """

    kind = "abstract"

    def _f(self, x):
        raise NotImplementedError

    def _f_inv(self, y):
        raise NotImplementedError

    def _f_prime(self, x):
        raise NotImplementedError

    def f(self, phi):
        return _ret(self._f(_check_unit(phi, "phi")), phi)

    def f_inv(self, y):
        return _ret(self._f_inv(_check_unit(y, "y")), y)

    def f_prime(self, phi):
        return _ret(self._f_prime(_check_unit(phi, "phi")), phi)

    def jump(self, phi, strength):
        """Phase after a pulse of total ``strength`` arrives at phase ``phi``.

        Returns 1.0 when the pulse reaches threshold.
        """
        y = self.f(phi) + strength
        if y >= 1.0:
            return 1.0
        return self.f_inv(y)

    def to_config(self) -> dict:
        raise NotImplementedError


@dataclass(frozen=True)
class LIFPhaseMap(PhaseMap):
    """Leaky integrate-and-fire map ``f(phi) = I (1 - exp(-c phi))``.

    This is the closed-form solution of ``df/dphi = -c f + I c`` with
    ``f(0) = 0`` and ``c = ln(I / (I - 1))``, which makes ``f(1) = 1``.
    """

    current: float = 1.05
    c: float = field(init=False, repr=False, compare=False)

    kind = "lif"

    def __post_init__(self):
        if not (self.current > 1.0 and math.isfinite(self.current)):
            raise PhaseMapError(f"LIF current I must exceed 1, got {self.current!r}")
        object.__setattr__(self, "c", math.log(self.current / (self.current - 1.0)))

    def _f(self, x):
        return self.current * -np.expm1(-self.c * x)

    def _f_inv(self, y):
        return -np.log1p(-y / self.current) / self.c

    def _f_prime(self, x):
        return self.current * self.c * np.exp(-self.c * x)

    def to_config(self):
        return {"kind": "lif", "I": self.current}


class CustomPhaseMap(PhaseMap):
    """User-supplied map.  Validated against the model assumptions on creation."""

    kind = "custom"

    def __init__(self, f: Callable, f_inv: Callable, f_prime: Callable, name="custom"):
        self._fn = f
        self._fn_inv = f_inv
        self._fn_prime = f_prime
        self.name = name
        validate_phase_map(self)

    def _f(self, x):
        return np.asarray(self._fn(x), dtype=float)

    def _f_inv(self, y):
        return np.asarray(self._fn_inv(y), dtype=float)

    def _f_prime(self, x):
        return np.asarray(self._fn_prime(x), dtype=float)

    def to_config(self):
        raise PhaseMapError("custom phase maps cannot be serialized to config")

    def __repr__(self):
        return f"CustomPhaseMap(name={self.name!r})"


def validate_phase_map(pm: PhaseMap, n_grid: int = 1001) -> None:
    """Raise :class:`PhaseMapError` unless ``pm`` satisfies the model assumptions."""
    if abs(float(pm._f(np.float64(0.0)))) > 1e-12 or abs(float(pm._f(np.float64(1.0))) - 1.0) > 1e-12:
        raise PhaseMapError("phase map must satisfy f(0) = 0 and f(1) = 1")
    x = np.linspace(0.0, 1.0, n_grid)
    y = pm._f(x)
    if not np.all(np.diff(y) > 0):
        raise PhaseMapError("phase map must be strictly increasing")
    if not np.all(pm._f_prime(x) > 0):
        raise PhaseMapError("phase map derivative must be positive")
    # midpoint concavity on neighbouring grid triples
    if not np.all(y[1:-1] > 0.5 * (y[:-2] + y[2:])):
        raise PhaseMapError("phase map must be strictly concave")
    if np.max(np.abs(pm._f_inv(y) - x)) > 1e-10:
        raise PhaseMapError("f_inv is not the inverse of f to 1e-10")


def phase_map_from_config(cfg: dict | None) -> PhaseMap:
    if cfg is None:
        return LIFPhaseMap()
    kind = cfg.get("kind", "lif")
    if kind != "lif":
        raise PhaseMapError(f"unknown phase map kind {kind!r}")
    return LIFPhaseMap(float(cfg.get("I", 1.05)))


class RegionClass(enum.Enum):
    A1 = "A1"
    A2_INTERIOR = "A2Interior"
    A2_BOUNDARY = "A2Boundary"

    @property
    def in_a2(self) -> bool:
        return self is not RegionClass.A1


def check_parameters(tau, eps):
    if not (0.0 < tau < 1.0):
        raise ParameterError(f"delay tau must lie in (0, 1), got {tau!r}")
    if not (0.0 < eps < 1.0):
        raise ParameterError(f"coupling eps must lie in (0, 1), got {eps!r}")


def classify_region(pm: PhaseMap, tau: float, eps: float,
                    boundary_tol: float = DEFAULT_BOUNDARY_TOL) -> RegionClass:
    """A1 if ``f(tau) + eps < 1``; A2 otherwise, split at the boundary curve."""
    check_parameters(tau, eps)
    gap = pm.f(tau) + eps - 1.0
    if gap < -boundary_tol:
        return RegionClass.A1
    if gap <= boundary_tol:
        return RegionClass.A2_BOUNDARY
    return RegionClass.A2_INTERIOR


def sync_isi(pm: PhaseMap, tau: float, eps: float) -> float:
    """Interspike interval of a completely synchronized A1 solution.

    After a common firing the volley returns at phase ``tau`` and jumps it
    to ``f_inv(f(tau) + eps)``; the cycle is shortened by that jump.
    """
    y = pm.f(tau) + eps
    if y >= 1.0:
        raise DomainError(f"f(tau) + eps = {y!r} >= 1: no A1 synchronous interval")
    return 1.0 - (pm.f_inv(y) - tau)
