"""Eigenstate coupling graphs: construction, components, closed subspaces.

Vertices are the basis states of a model, edges the above-threshold
control matrix elements of the applied colors.  Transitive connectivity
of (a subset of) this graph is a necessary condition for
controllability; a severed rung turns the ladder into a finite closed
component plus an infinite remainder.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .fock import BasisState, SPIN_DOWN
from .model import FieldColor, SystemModel, build_control

__all__ = [
    "GraphEdge",
    "CouplingGraph",
    "build_graph",
    "connected_components",
    "is_transitively_connected",
    "closed_subspace",
]


@dataclass(frozen=True)
class GraphEdge:
    a: int
    b: int
    weight: float
    color: int  # index of the contributing color


@dataclass(frozen=True)
class CouplingGraph:
    vertices: tuple[BasisState, ...]
    edges: tuple[GraphEdge, ...]

    @property
    def vertex_count(self) -> int:
        return len(self.vertices)


def build_graph(
    model: SystemModel,
    colors: list[FieldColor],
    threshold: float = 1e-9,
) -> CouplingGraph:
    """One undirected edge per control matrix element above threshold,
    weighted by its magnitude at unit Rabi and tagged by color index."""
    if threshold <= 0:
        raise ValueError(f"threshold must be positive, got {threshold}")
    basis = model.basis
    vertices = tuple(basis.states())
    edges = []
    for ci, color in enumerate(colors):
        h = build_control(model, color)
        rows, cols = np.nonzero(np.abs(h) > threshold)
        for i, j in zip(rows, cols):
            if i < j:
                edges.append(GraphEdge(a=int(i), b=int(j), weight=float(abs(h[i, j])), color=ci))
    return CouplingGraph(vertices=vertices, edges=tuple(edges))


def connected_components(graph: CouplingGraph) -> list[set[int]]:
    """Vertex partition by transitive coupling, ordered by smallest
    contained index."""
    adjacency: dict[int, list[int]] = {v: [] for v in range(graph.vertex_count)}
    for e in graph.edges:
        adjacency[e.a].append(e.b)
        adjacency[e.b].append(e.a)
    seen = [False] * graph.vertex_count
    components = []
    for start in range(graph.vertex_count):
        if seen[start]:
            continue
        stack = [start]
        seen[start] = True
        comp = {start}
        while stack:
            v = stack.pop()
            for w in adjacency[v]:
                if not seen[w]:
                    seen[w] = True
                    comp.add(w)
                    stack.append(w)
        components.append(comp)
    return components


def is_transitively_connected(graph: CouplingGraph, subset) -> bool:
    """True iff every pair in the subset is directly or indirectly coupled."""
    subset = set(subset)
    if not subset:
        raise ValueError("subset must be nonempty")
    for comp in connected_components(graph):
        if subset & comp:
            return subset <= comp
    return False


def closed_subspace(
    model: SystemModel,
    colors: list[FieldColor],
    threshold: float = 1e-9,
) -> list[int] | None:
    """Indices of the finite component containing |all-down, 0>, or None.

    The component is computed on the union graph of all colors.  It
    counts as finite only if it stays clear of the top phonon level of
    the truncated basis, so that enlarging the cutoff cannot grow it:
    a component that touches the truncation edge is a numerical
    artifact, not a closed subsystem.
    """
    basis = model.basis
    graph = build_graph(model, colors, threshold=threshold)
    ground = basis.index(BasisState(spins=(SPIN_DOWN,) * basis.ion_count, phonon=0))
    for comp in connected_components(graph):
        if ground not in comp:
            continue
        top = max(basis.state(i).phonon for i in comp)
        if top >= basis.fock_cutoff - 1:
            return None
        return sorted(comp)
    return None
