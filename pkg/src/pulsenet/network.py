"""Coupling topology: strengths ``eps_ij`` from oscillator i to j, delay, total strength."""
from __future__ import annotations

import csv
import io
import json
from dataclasses import dataclass

import numpy as np
from scipy import sparse

from .errors import NormalizationError, ParameterError, SelfCouplingError
from .phase_model import check_parameters

NORM_TOL = 1e-12
SYMMETRY_TOL = 1e-12
DENSE_LIMIT = 1024


@dataclass(frozen=True, eq=False)
class NetworkTopology:
    """Validated, immutable coupling structure.

    ``weights[i, j]`` is the strength of the pulse oscillator i sends to j;
    a zero entry means j is not postsynaptic to i.  Column sums (the
    in-strength of each oscillator) all equal ``eps``.  Stored as a dense
    array up to 1024 oscillators and as CSR above.
    """

    weights: np.ndarray | sparse.csr_matrix
    tau: float
    eps: float
    kind: str = "custom"

    @property
    def n(self) -> int:
        return self.weights.shape[0]

    def dense(self) -> np.ndarray:
        if sparse.issparse(self.weights):
            return self.weights.toarray()
        return self.weights

    def strength(self, i: int, j: int) -> float:
        return float(self.weights[i, j])

    def presynaptic(self, i: int) -> np.ndarray:
        return np.flatnonzero(self.dense()[:, i] > 0)

    def postsynaptic(self, i: int) -> np.ndarray:
        return np.flatnonzero(self.dense()[i, :] > 0)

    def received(self, counts: np.ndarray) -> np.ndarray:
        """Total strength each oscillator receives from a volley.

        ``counts[s]`` is how many spikes of source s arrive together.
        """
        return np.asarray(self.weights.T @ counts).ravel()

    def to_config(self) -> dict:
        if self.kind == "all_to_all":
            return {"topology": "all_to_all", "n": self.n}
        return {"topology": "matrix", "matrix": self.dense().tolist()}

    def to_json(self) -> str:
        cfg = self.to_config()
        cfg.update(tau=self.tau, eps=self.eps)
        return json.dumps(cfg)

    def to_csv(self) -> str:
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        for row in self.dense():
            writer.writerow(repr(float(v)) for v in row)
        return buf.getvalue()


def _store(matrix: np.ndarray):
    if matrix.shape[0] > DENSE_LIMIT:
        return sparse.csr_matrix(matrix)
    matrix.setflags(write=False)
    return matrix


def all_to_all(n: int, tau: float, eps: float) -> NetworkTopology:
    """Complete graph, every off-diagonal strength equal to ``eps / (n - 1)``."""
    if n < 2:
        raise ParameterError(f"all-to-all coupling needs n >= 2, got {n}")
    check_parameters(tau, eps)
    w = np.full((n, n), eps / (n - 1))
    np.fill_diagonal(w, 0.0)
    return NetworkTopology(_store(w), float(tau), float(eps), kind="all_to_all")


def custom_topology(matrix, tau: float, eps: float) -> NetworkTopology:
    """Validate an explicit strength matrix.

    A single uncoupled oscillator (1x1 zero matrix) is admitted; for
    ``n >= 2`` every oscillator needs a nonempty presynaptic set whose
    strengths sum to ``eps``.
    """
    w = np.array(matrix, dtype=float)
    if w.ndim != 2 or w.shape[0] != w.shape[1] or w.shape[0] < 1:
        raise ParameterError(f"strength matrix must be square, got shape {w.shape}")
    check_parameters(tau, eps)
    if np.any(~np.isfinite(w)) or np.any(w < 0):
        raise ParameterError("strengths must be finite and nonnegative (excitatory coupling)")
    diag = np.flatnonzero(np.diag(w) != 0)
    if diag.size:
        raise SelfCouplingError(int(diag[0]))
    n = w.shape[0]
    if n > 1:
        totals = w.sum(axis=0)
        for i, total in enumerate(totals):
            if abs(total - eps) > NORM_TOL:
                raise NormalizationError(i, float(total), eps)
    return NetworkTopology(_store(w), float(tau), float(eps))


def topology_from_config(cfg: dict, tau: float, eps: float) -> NetworkTopology:
    kind = cfg.get("topology", "all_to_all")
    if kind == "all_to_all":
        return all_to_all(int(cfg["n"]), tau, eps)
    if kind == "matrix":
        return custom_topology(cfg["matrix"], tau, eps)
    raise ParameterError(f"unknown topology {kind!r}")


def topology_from_json(text: str) -> NetworkTopology:
    cfg = json.loads(text)
    return topology_from_config(cfg, cfg["tau"], cfg["eps"])


def symmetric_pair(topology: NetworkTopology, i: int, j: int) -> bool:
    """True when i and j are interchangeable: ``eps_ij = eps_ji`` and ``eps_ki = eps_kj``."""
    n = topology.n
    if not (0 <= i < n and 0 <= j < n):
        raise IndexError(f"oscillator index out of range for n={n}: ({i}, {j})")
    if i == j:
        raise ParameterError("symmetric_pair needs two distinct oscillators")
    w = topology.dense()
    if abs(w[i, j] - w[j, i]) > SYMMETRY_TOL:
        return False
    others = np.ones(n, dtype=bool)
    others[[i, j]] = False
    return bool(np.all(np.abs(w[others, i] - w[others, j]) <= SYMMETRY_TOL))


def random_topology(n: int, tau: float, eps: float, rng: np.random.Generator,
                    density: float = 0.6) -> NetworkTopology:
    """Random normalized topology with a nonempty presynaptic set per oscillator."""
    if n < 2:
        raise ParameterError("random topologies need n >= 2")
    mask = rng.random((n, n)) < density
    np.fill_diagonal(mask, False)
    for i in range(n):
        if not mask[:, i].any():
            mask[rng.choice([k for k in range(n) if k != i]), i] = True
    w = rng.random((n, n)) * mask
    w = w / w.sum(axis=0) * eps
    # absorb rounding of the column sums into the largest entry
    for i in range(n):
        k = int(np.argmax(w[:, i]))
        w[k, i] += eps - w[:, i].sum()
    return custom_topology(w, tau, eps)
