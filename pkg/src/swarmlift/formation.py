"""Rigidity-graph data model, relative positions, and distance-error signals.

A formation is described by an undirected graph over the vehicles plus one
desired distance per edge. Each edge is stored as an ordered (tail, head)
pair; the incidence matrix B has +1 at the tail row and -1 at the head row
of each column. The relative position of edge k is z_k = p_tail - p_head
and the stacked vector satisfies z = (B^T kron I2) p. Edge orientation is
a bookkeeping choice and does not affect the control behavior.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace

import numpy as np
from numpy.typing import NDArray

from .errors import CoincidentAgents, DimensionMismatch

# Below this separation the unit edge vector is numerically meaningless.
EPS_COINCIDENT = 1e-6


@dataclass(frozen=True)
class FormationGraph:
    """Undirected rigidity graph with ordered edges.

    Parameters:
        n: number of vehicles (graph vertices), 0-indexed elsewhere.
        edges: ordered (tail, head) vertex pairs, one per edge.
    """

    n: int
    edges: tuple[tuple[int, int], ...]

    def __post_init__(self):
        if self.n < 2:
            raise ValueError("a formation needs at least 2 vehicles")
        object.__setattr__(self, "edges", tuple(tuple(e) for e in self.edges))
        seen_pairs = set()
        for tail, head in self.edges:
            if not (0 <= tail < self.n and 0 <= head < self.n):
                raise ValueError(f"edge ({tail}, {head}) references a missing vertex")
            if tail == head:
                raise ValueError(f"self-loop at vertex {tail}")
            pair = (min(tail, head), max(tail, head))
            if pair in seen_pairs:
                raise ValueError(f"duplicate edge between {pair[0]} and {pair[1]}")
            seen_pairs.add(pair)
        if not self._connected():
            raise ValueError("formation graph is not connected")

    def _connected(self) -> bool:
        adj: list[list[int]] = [[] for _ in range(self.n)]
        for tail, head in self.edges:
            adj[tail].append(head)
            adj[head].append(tail)
        seen = {0}
        stack = [0]
        while stack:
            v = stack.pop()
            for w in adj[v]:
                if w not in seen:
                    seen.add(w)
                    stack.append(w)
        return len(seen) == self.n

    @property
    def n_edges(self) -> int:
        return len(self.edges)

    @property
    def incidence(self) -> NDArray[np.float64]:
        """n x |E| incidence matrix: +1 at tail(k), -1 at head(k)."""
        b = np.zeros((self.n, len(self.edges)))
        for k, (tail, head) in enumerate(self.edges):
            b[tail, k] = 1.0
            b[head, k] = -1.0
        return b

    def incident_edges(self, vertex: int) -> list[int]:
        """Edge indices touching ``vertex``."""
        return [k for k, (t, h) in enumerate(self.edges) if vertex in (t, h)]


@dataclass(frozen=True)
class FormationSpec:
    """Graph plus desired distances and the two guidance gains.

    gain_damping (c1, 1/s) multiplies the velocity term of the control law,
    gain_shape (c2, 1/s^2 per meter of error) the distance-error term.
    """

    graph: FormationGraph
    desired_distances: NDArray[np.float64]
    gain_damping: float = 0.17
    gain_shape: float = 0.55

    def __post_init__(self):
        d = np.asarray(self.desired_distances, dtype=np.float64)
        object.__setattr__(self, "desired_distances", d)
        if d.shape != (self.graph.n_edges,):
            raise DimensionMismatch(
                f"expected {self.graph.n_edges} desired distances, got {d.shape}"
            )
        if not np.all(d > 0):
            raise ValueError("desired distances must be positive")
        if self.gain_damping <= 0 or self.gain_shape <= 0:
            raise ValueError("gains must be positive")

    def with_distances(self, d) -> "FormationSpec":
        return replace(self, desired_distances=np.asarray(d, dtype=np.float64))


@dataclass(frozen=True)
class RelativeState:
    """Per-edge relative positions z_k, their norms, and errors e_k = |z_k| - d_k."""

    z: NDArray[np.float64]
    norms: NDArray[np.float64]
    errors: NDArray[np.float64]

    @property
    def unit(self) -> NDArray[np.float64]:
        """Unit edge vectors z_k / |z_k|."""
        return self.z / self.norms[:, None]


def relative_positions(spec: FormationSpec, positions) -> RelativeState:
    """Compute z, |z|, and e for every edge from stacked 2D positions.

    Args:
        spec: formation description.
        positions: (n, 2) vehicle positions in the navigation frame.

    Returns:
        RelativeState with z_k = p_tail(k) - p_head(k).

    Raises:
        CoincidentAgents: if any neighbor pair is closer than EPS_COINCIDENT.
        DimensionMismatch: wrong position count.
    """
    p = np.asarray(positions, dtype=np.float64)
    if p.shape != (spec.graph.n, 2):
        raise DimensionMismatch(f"expected ({spec.graph.n}, 2) positions, got {p.shape}")
    tails = np.array([t for t, _ in spec.graph.edges])
    heads = np.array([h for _, h in spec.graph.edges])
    z = p[tails] - p[heads]
    norms = np.linalg.norm(z, axis=1)
    if np.any(norms <= EPS_COINCIDENT):
        k = int(np.argmin(norms))
        raise CoincidentAgents(
            f"edge {k} endpoints {spec.graph.edges[k]} are {norms[k]:.2e} m apart"
        )
    return RelativeState(z=z, norms=norms, errors=norms - spec.desired_distances)


# The 4-vehicle, 6-edge square used throughout. Vehicle layout (top view):
# 1 top-right, 2 bottom-right, 3 bottom-left, 4 top-left; edges 2 and 5 are
# the diagonals. Stored 0-indexed.
_SQUARE_EDGES = ((0, 1), (1, 3), (2, 3), (0, 3), (0, 2), (1, 2))


def square_formation_spec(
    side: float = 1.0, gain_damping: float = 0.17, gain_shape: float = 0.55
) -> FormationSpec:
    """Standard 4-vehicle square: 4 sides plus both diagonals.

    Distances are set for a square of the given side (sides ``side``,
    diagonals ``side * sqrt(2)``).
    """
    graph = FormationGraph(n=4, edges=_SQUARE_EDGES)
    r2 = math.sqrt(2.0)
    d = side * np.array([1.0, r2, 1.0, 1.0, r2, 1.0])
    return FormationSpec(graph=graph, desired_distances=d,
                         gain_damping=gain_damping, gain_shape=gain_shape)


def square_positions(side: float = 1.0) -> NDArray[np.float64]:
    """Centered desired positions matching square_formation_spec ordering."""
    h = side / 2.0
    return np.array([[h, h], [h, -h], [-h, -h], [-h, h]])


def potential_energy(spec: FormationSpec, positions, velocities) -> float:
    """Kinetic plus shape-error energy of the formation.

    V = (1/2) sum |v_i|^2 + (c2/2) sum (|z_k| - d_k)^2.

    The kinetic term carries unit weight; with the standard damping law the
    resulting V is non-increasing along ideal trajectories (dV/dt =
    -c1 |v|^2), which is the property the tests pin down.
    """
    v = np.asarray(velocities, dtype=np.float64)
    if v.shape != (spec.graph.n, 2):
        raise DimensionMismatch(f"expected ({spec.graph.n}, 2) velocities, got {v.shape}")
    rel = relative_positions(spec, positions)
    return 0.5 * float(np.sum(v * v)) + 0.5 * spec.gain_shape * float(
        np.sum(rel.errors**2)
    )
