"""Exception hierarchy shared by the package."""


class PulseNetError(Exception):
    """Base class for all package errors."""


class DomainError(PulseNetError, ValueError):
    """Argument lies outside the domain of a phase-map function."""


class ParameterError(PulseNetError, ValueError):
    """Model parameter (tau, eps, n, ...) outside its admissible range."""


class PhaseMapError(PulseNetError, ValueError):
    """A phase map violates f(0)=0, f(1)=1, monotonicity or concavity."""


class NormalizationError(PulseNetError, ValueError):
    def __init__(self, node, total, eps):
        self.node = node
        self.total = total
        self.eps = eps
        super().__init__(
            f"in-strengths of oscillator {node} sum to {total!r}, expected {eps!r}"
        )


class SelfCouplingError(PulseNetError, ValueError):
    def __init__(self, node):
        self.node = node
        super().__init__(f"oscillator {node} is coupled to itself")


class PhaseRangeError(PulseNetError, ValueError):
    """Initial phases must lie in (0, 1]."""


class HypothesisError(PulseNetError):
    """A property check was invoked where its hypothesis does not apply."""


class InsufficientDataError(PulseNetError):
    """The firing log is too short for the requested analysis."""


class EngineConsistencyError(PulseNetError, RuntimeError):
    """Internal invariant of the event engine broken; indicates a bug."""


class ConfigError(PulseNetError, ValueError):
    """Invalid run or sweep configuration."""
