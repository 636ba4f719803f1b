"""Stationary states of the search walk for exceptional marked configurations.

A stationary state here is a uniform background amplitude ``a`` on every arc,
except on arcs of selected edges between marked vertices, where both arcs
carry ``-a * l_e``.  It is fixed by ``S C Q`` whenever every marked vertex has
zero amplitude sum: then the query and the coin each flip the block's sign, and
the shift swaps equal partner amplitudes.  For a marked vertex ``v`` with
``d_v`` arcs, the zero-sum condition reads

    sum over corrected edges e at v of l_e  ==  d_v - (corrected edges at v)

so a single corrected edge of an equal-degree pair needs ``l = d - 1``, and a
clique of ``k`` marked vertices needs weights summing to the external degree
``d_v - (k - 1)`` at every member.
"""

from __future__ import annotations

import itertools
import json
from dataclasses import dataclass, field
from typing import Iterable, NamedTuple, Sequence

import numpy as np

from .errors import (DegreeMismatch, Infeasible, InvalidInput, NotAClique, NotAnEdge,
                     PartitionError, TooLarge)
from .graphs import Graph
from .walk import WalkState, _query_sign, _step, marked_arc_mask

DEFAULT_TOL = 1e-12
DEFAULT_SEARCH_CAP = 20


def _edge_key(u: int, v: int) -> tuple[int, int]:
    u, v = int(u), int(v)
    return (u, v) if u < v else (v, u)


@dataclass(frozen=True)
class MarkedConfig:
    """Marked vertex set with an optional declared decomposition into groups.

    A group of two vertices is a pair (must be an edge); a group of ``k >= 3``
    vertices is a clique (must be mutually adjacent).
    """

    marked: tuple[int, ...]
    partition: tuple[tuple[int, ...], ...] | None = None

    def __post_init__(self):
        object.__setattr__(self, "marked", tuple(int(v) for v in self.marked))
        if len(set(self.marked)) != len(self.marked):
            raise InvalidInput(f"marked vertices are not distinct: {self.marked}")
        if self.partition is not None:
            object.__setattr__(self, "partition",
                               tuple(tuple(int(v) for v in g) for g in self.partition))

    @staticmethod
    def group_kind(group: Sequence[int]) -> str:
        return "pair" if len(group) == 2 else "clique"

    def validate(self, graph: Graph) -> None:
        for v in self.marked:
            if not 0 <= v < graph.num_vertices:
                raise InvalidInput(f"marked vertex {v} out of range 0..{graph.num_vertices - 1}")
        if self.partition is not None:
            validate_partition(graph, self.marked, self.partition)

    def __len__(self) -> int:
        return len(self.marked)


def validate_partition(graph: Graph, marked: Sequence[int],
                       partition: Sequence[Sequence[int]], *,
                       require_equal_pairs: bool = False) -> None:
    seen: set[int] = set()
    mset = set(marked)
    for group in partition:
        group = tuple(group)
        if len(group) < 2:
            raise PartitionError(f"group {group} has fewer than two vertices", group)
        if len(set(group)) != len(group):
            raise PartitionError(f"group {group} repeats a vertex", group)
        if not set(group) <= mset:
            raise PartitionError(f"group {group} contains unmarked vertices", group)
        if seen & set(group):
            raise PartitionError(f"group {group} overlaps an earlier group", group)
        seen |= set(group)
        for u, v in itertools.combinations(group, 2):
            if not graph.has_edge(u, v):
                kind = "pair" if len(group) == 2 else "clique"
                raise PartitionError(f"{kind} {group}: vertices {u} and {v} are not adjacent",
                                     group)
        if require_equal_pairs and len(group) == 2:
            u, v = group
            if graph.degrees[u] != graph.degrees[v]:
                raise PartitionError(
                    f"pair {group} has unequal degrees "
                    f"({int(graph.degrees[u])}, {int(graph.degrees[v])})", group)
    if seen != mset:
        missing = sorted(mset - seen)
        raise PartitionError(f"partition does not cover marked vertices {missing}")


@dataclass(frozen=True)
class StationaryState:
    """Background amplitude ``baseline`` plus per-edge correction weights.

    Both arcs of a corrected edge ``e`` carry ``-baseline * corrections[e]``;
    edge keys are ``(u, v)`` with ``u < v``.
    """

    baseline: float
    corrections: dict[tuple[int, int], float] = field(default_factory=dict)

    def weight(self, u: int, v: int) -> float:
        return self.corrections[_edge_key(u, v)]

    def edges(self) -> list[tuple[int, int]]:
        return sorted(self.corrections)

    def amplitudes(self, graph: Graph) -> np.ndarray:
        amps = np.full(graph.num_arcs, float(self.baseline))
        for (u, v), l in self.corrections.items():
            amps[list(graph.edge_arcs(u, v))] = -self.baseline * l
        return amps

    def to_state(self, graph: Graph) -> WalkState:
        return WalkState(self.amplitudes(graph), graph)

    def merged(self, other: "StationaryState") -> "StationaryState":
        if other.baseline != self.baseline:
            raise InvalidInput("cannot merge stationary states with different baselines")
        clash = set(self.corrections) & set(other.corrections)
        if clash:
            raise InvalidInput(f"corrections collide on edges {sorted(clash)}")
        return StationaryState(self.baseline, {**self.corrections, **other.corrections})

    def to_dict(self) -> dict:
        return {
            "baseline": self.baseline,
            "corrections": [{"edge": list(e), "l": self.corrections[e]} for e in self.edges()],
        }

    def to_json(self, **kwargs) -> str:
        return json.dumps(self.to_dict(), **kwargs)

    @classmethod
    def from_dict(cls, doc: dict) -> "StationaryState":
        return cls(float(doc["baseline"]),
                   {_edge_key(*c["edge"]): float(c["l"]) for c in doc["corrections"]})


def default_baseline(graph: Graph) -> float:
    return 1.0 / np.sqrt(graph.num_arcs)


def _as_amplitudes(state, graph: Graph | None) -> tuple[np.ndarray, Graph]:
    if isinstance(state, WalkState):
        return state.amplitudes, state.graph
    if isinstance(state, StationaryState):
        if graph is None:
            raise InvalidInput("a graph is required to expand a StationaryState")
        return state.amplitudes(graph), graph
    if graph is None:
        raise InvalidInput("a graph is required for raw amplitude arrays")
    return np.asarray(state, dtype=np.float64), graph


# --- constructors -----------------------------------------------------------

def pair_state(graph: Graph, i: int, j: int, a: float | None = None, *,
               strict: bool = True) -> StationaryState:
    """Equal-degree adjacent pair: both facing arcs get ``-(d - 1) a``.

    With ``strict=False`` the degree check is skipped and ``l = d_i - 1`` is used
    regardless of ``d_j``; the result is then generally *not* stationary.
    """
    a = default_baseline(graph) if a is None else a
    if not graph.has_edge(i, j):
        raise NotAnEdge(f"vertices {i} and {j} are not adjacent")
    di, dj = int(graph.degrees[i]), int(graph.degrees[j])
    if strict and di != dj:
        raise DegreeMismatch(f"pair ({i}, {j}) has unequal degrees ({di}, {dj})")
    return StationaryState(a, {_edge_key(i, j): float(di - 1)})


def triangle_weights(di: float, dj: float, dk: float) -> tuple[float, float, float]:
    """Closed-form ``(l_ij, l_ik, l_jk)`` for a marked triangle with degrees ``d``."""
    return ((di + dj - dk) / 2 - 1,
            (di + dk - dj) / 2 - 1,
            (dj + dk - di) / 2 - 1)


def _require_clique(graph: Graph, vertices: Sequence[int]) -> None:
    if len(set(vertices)) != len(vertices):
        raise NotAClique(f"repeated vertex in {tuple(vertices)}")
    for u, v in itertools.combinations(vertices, 2):
        if not graph.has_edge(u, v):
            raise NotAClique(f"vertices {u} and {v} of {tuple(vertices)} are not adjacent")


def triangle_state(graph: Graph, i: int, j: int, k: int,
                   a: float | None = None) -> StationaryState:
    a = default_baseline(graph) if a is None else a
    _require_clique(graph, (i, j, k))
    d = graph.degrees
    lij, lik, ljk = triangle_weights(int(d[i]), int(d[j]), int(d[k]))
    return StationaryState(a, {_edge_key(i, j): lij, _edge_key(i, k): lik,
                               _edge_key(j, k): ljk})


def clique_weights(external: Sequence[float],
                   order: Sequence[int] | None = None) -> dict[tuple[int, int], float]:
    """Edge weights on a ``k``-clique whose weighted degree at member ``p`` is ``external[p]``.

    Repeatedly take the member with the smallest remaining requirement (ties by
    ``order``, default index), put all of it on the edge to the next smallest
    member and drop it; the final triangle is solved in closed form.  Keys are
    index pairs ``(p, q)``, ``p < q``; every clique edge is present.
    """
    k = len(external)
    if k < 2:
        raise InvalidInput("a clique needs at least two members")
    order = list(range(k)) if order is None else list(order)
    rest = [float(x) for x in external]
    weights = {(p, q): 0.0 for p, q in itertools.combinations(range(k), 2)}
    if k == 2:
        if rest[0] != rest[1]:
            raise DegreeMismatch(f"two-member clique needs equal requirements, got {rest}")
        weights[(0, 1)] = rest[0]
        return weights
    alive = list(range(k))
    while len(alive) > 3:
        alive.sort(key=lambda p: (rest[p], order[p]))
        p, q = alive[0], alive[1]
        weights[_edge_key(p, q)] = rest[p]
        rest[q] -= rest[p]
        rest[p] = 0.0
        alive.pop(0)
    x, y, z = alive
    weights[_edge_key(x, y)] = (rest[x] + rest[y] - rest[z]) / 2
    weights[_edge_key(x, z)] = (rest[x] + rest[z] - rest[y]) / 2
    weights[_edge_key(y, z)] = (rest[y] + rest[z] - rest[x]) / 2
    return weights


def clique_state(graph: Graph, clique: Sequence[int],
                 a: float | None = None) -> StationaryState:
    clique = [int(v) for v in clique]
    if len(clique) == 2:
        return pair_state(graph, clique[0], clique[1], a)
    a = default_baseline(graph) if a is None else a
    if len(clique) < 2:
        raise NotAClique("a clique needs at least two vertices")
    _require_clique(graph, clique)
    k = len(clique)
    external = [int(graph.degrees[v]) - (k - 1) for v in clique]
    w = clique_weights(external, order=clique)
    return StationaryState(a, {_edge_key(clique[p], clique[q]): l for (p, q), l in w.items()})


def partition_state(graph: Graph, marked: MarkedConfig,
                    a: float | None = None) -> StationaryState:
    """Union of per-group stationary corrections for a declared partition."""
    a = default_baseline(graph) if a is None else a
    if marked.partition is None:
        raise PartitionError("marked config has no declared partition")
    marked.validate(graph)
    validate_partition(graph, marked.marked, marked.partition, require_equal_pairs=True)
    out = StationaryState(a, {})
    for group in marked.partition:
        out = out.merged(clique_state(graph, group, a))
    return out


# --- verification -----------------------------------------------------------

@dataclass(frozen=True)
class ConditionResult:
    passed: bool
    worst: float


@dataclass(frozen=True)
class GeneralConditionsReport:
    unmarked_equal: ConditionResult
    marked_zero_sum: ConditionResult
    partners_equal: ConditionResult

    @property
    def passed(self) -> bool:
        return all(c.passed for c in (self.unmarked_equal, self.marked_zero_sum,
                                      self.partners_equal))

    def lines(self) -> list[str]:
        names = {"unmarked_equal": "unmarked amplitudes equal",
                 "marked_zero_sum": "marked vertex sums zero",
                 "partners_equal": "partner arcs equal"}
        return [f"{'PASS' if c.passed else 'FAIL'}  {names[k]:<26} worst={c.worst:.3e}"
                for k, c in self.__dict__.items()]


def check_general_conditions(state, marked, tol: float = DEFAULT_TOL, *,
                             graph: Graph | None = None) -> GeneralConditionsReport:
    """Diagnose the three sufficient conditions for ``CQ psi = psi`` and ``S psi = psi``.

    ``worst`` is the largest absolute violation: spread of unmarked amplitudes,
    largest marked-vertex block sum, largest partner-arc mismatch.
    """
    x, g = _as_amplitudes(state, graph)
    mask = marked_arc_mask(g, marked)
    unmarked = x[~mask]
    spread = float(unmarked.max() - unmarked.min()) if len(unmarked) else 0.0
    sums = np.add.reduceat(x, g.offsets[:-1])
    vmask = np.zeros(g.num_vertices, dtype=bool)
    vmask[[int(v) for v in getattr(marked, "marked", marked)]] = True
    zero_sum = float(np.abs(sums[vmask]).max()) if vmask.any() else 0.0
    asym = float(np.abs(x - x[g.partner]).max())
    return GeneralConditionsReport(
        ConditionResult(spread <= tol, spread),
        ConditionResult(zero_sum <= tol, zero_sum),
        ConditionResult(asym <= tol, asym),
    )


class StationarityCheck(NamedTuple):
    stationary: bool
    residual: float


def stationarity_residual(state, marked, *, graph: Graph | None = None) -> float:
    """``|| S C Q psi - psi ||``."""
    x, g = _as_amplitudes(state, graph)
    return float(np.linalg.norm(_step(g, x, _query_sign(g, marked)) - x))


def is_stationary(state, marked, tol: float = DEFAULT_TOL, *,
                  graph: Graph | None = None) -> StationarityCheck:
    """End-to-end check: apply one search step and compare, tolerance scaled by the norm."""
    x, g = _as_amplitudes(state, graph)
    res = stationarity_residual(x, marked, graph=g)
    scale = max(float(np.linalg.norm(x)), np.finfo(float).tiny)
    return StationarityCheck(res <= tol * scale, res)


# --- search and generic solve ----------------------------------------------

def _marked_adjacency(graph: Graph, marked: Sequence[int]) -> dict[int, set[int]]:
    mset = set(marked)
    return {v: {int(u) for u in graph.neighbors(v) if int(u) in mset} for v in marked}


def find_exceptional_partition(graph: Graph, marked: Iterable[int], *,
                               cap: int = DEFAULT_SEARCH_CAP
                               ) -> tuple[tuple[int, ...], ...] | None:
    """Exhaustive search for a cover of ``marked`` by equal-degree pairs and cliques.

    Groups are returned sorted; pairs are tried before larger cliques, so the
    first decomposition found prefers pairs.  ``None`` means no decomposition of
    this family exists.
    """
    marked = sorted({int(v) for v in getattr(marked, "marked", marked)})
    if len(marked) > cap:
        raise TooLarge(len(marked), cap)
    for v in marked:
        if not 0 <= v < graph.num_vertices:
            raise InvalidInput(f"marked vertex {v} out of range")
    if not marked:
        return ()
    adj = _marked_adjacency(graph, marked)
    deg = graph.degrees

    def groups_with(v: int, free: set[int]):
        cand = sorted(adj[v] & free)
        for u in cand:
            if deg[u] == deg[v]:
                yield (v, u)
        # cliques of size >= 3 containing v, by increasing size
        for size in range(2, len(cand) + 1):
            for combo in itertools.combinations(cand, size):
                if all(b in adj[a] for a, b in itertools.combinations(combo, 2)):
                    yield (v, *combo)

    def search(free: set[int]):
        if not free:
            return []
        v = min(free)
        for group in groups_with(v, free - {v}):
            rest = search(free - set(group))
            if rest is not None:
                return [tuple(sorted(group))] + rest
        return None

    found = search(set(marked))
    return None if found is None else tuple(found)


def solve_correction_weights(graph: Graph, marked: Iterable[int], a: float | None = None, *,
                             tol: float = 1e-9) -> StationaryState:
    """Stationary state from the zero-sum equations on the marked-induced subgraph.

    Every edge between two marked vertices is a variable ``l_e``; the equation
    at marked ``v`` is ``sum_e l_e = d_v - deg_M(v)``.  The minimum-norm
    least-squares solution is returned when it is exact (relative residual
    below ``tol``); otherwise ``Infeasible`` carries the residual.
    """
    a = default_baseline(graph) if a is None else a
    marked = sorted({int(v) for v in getattr(marked, "marked", marked)})
    adj = _marked_adjacency(graph, marked)
    edges = sorted({_edge_key(u, v) for u in marked for v in adj[u]})
    row = {v: r for r, v in enumerate(marked)}
    A = np.zeros((len(marked), len(edges)))
    for c, (u, v) in enumerate(edges):
        A[row[u], c] = A[row[v], c] = 1.0
    b = np.array([graph.degrees[v] - len(adj[v]) for v in marked], dtype=float)
    if edges:
        l, *_ = np.linalg.lstsq(A, b, rcond=None)
    else:
        l = np.zeros(0)
    residual = float(np.linalg.norm(A @ l - b))
    if residual > tol * max(1.0, float(np.linalg.norm(b))):
        raise Infeasible(residual)
    return StationaryState(a, {e: float(w) for e, w in zip(edges, l)})
