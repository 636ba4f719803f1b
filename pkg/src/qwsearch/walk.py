"""Coined walk state vectors and the search operators ``U = SC`` and ``U' = SCQ``.

Amplitudes are real: the Grover coin, flip-flop shift and sign-flip query are
all real-orthogonal, so starting from a real state nothing complex ever
appears.  A complex coin would need a different representation.
"""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path
from typing import Iterable

import numpy as np

from .errors import InvalidInput
from .graphs import Graph, same_graph

SINGLE_STEP_TOL = 1e-12
ACCUMULATED_TOL = 1e-10


@dataclass(frozen=True, eq=False)
class WalkState:
    amplitudes: np.ndarray
    graph: Graph

    def __post_init__(self):
        amps = np.asarray(self.amplitudes, dtype=np.float64)
        if amps.shape != (self.graph.num_arcs,):
            raise InvalidInput(
                f"state has shape {amps.shape}, graph has {self.graph.num_arcs} arcs")
        object.__setattr__(self, "amplitudes", amps)

    def norm(self) -> float:
        return float(np.linalg.norm(self.amplitudes))

    def with_amplitudes(self, amps: np.ndarray) -> "WalkState":
        return WalkState(amps, self.graph)

    def __len__(self) -> int:
        return len(self.amplitudes)


def marked_vertices(marked) -> tuple[int, ...]:
    """Vertex tuple from a ``MarkedConfig``, a plain iterable, or ``None``."""
    if marked is None:
        return ()
    verts = getattr(marked, "marked", marked)
    return tuple(int(v) for v in verts)


def marked_arc_mask(graph: Graph, marked) -> np.ndarray:
    verts = np.asarray(marked_vertices(marked), dtype=np.int64)
    if len(verts) and (verts.min() < 0 or verts.max() >= graph.num_vertices):
        bad = verts[(verts < 0) | (verts >= graph.num_vertices)][0]
        raise InvalidInput(f"marked vertex {int(bad)} out of range 0..{graph.num_vertices - 1}")
    vmask = np.zeros(graph.num_vertices, dtype=bool)
    vmask[verts] = True
    return vmask[graph.tail]


def uniform_state(graph: Graph) -> WalkState:
    return WalkState(np.full(graph.num_arcs, 1.0 / np.sqrt(graph.num_arcs)), graph)


def basis_state(graph: Graph, arc: int) -> WalkState:
    amps = np.zeros(graph.num_arcs)
    amps[arc] = 1.0
    return WalkState(amps, graph)


# Raw array kernels; the public functions below wrap them value-in/value-out.

def _coin(graph: Graph, x: np.ndarray) -> np.ndarray:
    d = graph.degrees
    if d[0] == d[-1] and np.all(d == d[0]):
        blocks = x.reshape(-1, int(d[0]))
        return (2.0 * blocks.mean(axis=1, keepdims=True) - blocks).ravel()
    means = np.add.reduceat(x, graph.offsets[:-1]) / d
    return 2.0 * means[graph.tail] - x


def _shift(graph: Graph, x: np.ndarray) -> np.ndarray:
    return x[graph.partner]


def _step(graph: Graph, x: np.ndarray, sign: np.ndarray | None) -> np.ndarray:
    if sign is not None:
        x = x * sign
    return _coin(graph, x)[graph.partner]


def _query_sign(graph: Graph, marked) -> np.ndarray | None:
    mask = marked_arc_mask(graph, marked)
    if not mask.any():
        return None
    return np.where(mask, -1.0, 1.0)


def apply_query(state: WalkState, marked) -> WalkState:
    """Negate every amplitude on arcs leaving a marked vertex."""
    mask = marked_arc_mask(state.graph, marked)
    return state.with_amplitudes(np.where(mask, -state.amplitudes, state.amplitudes))


def apply_coin(state: WalkState) -> WalkState:
    """Grover diffusion per vertex block: ``x_c -> 2 * mean(block) - x_c``."""
    return state.with_amplitudes(_coin(state.graph, state.amplitudes))


def apply_shift(state: WalkState) -> WalkState:
    """Flip-flop shift: swap each arc's amplitude with its partner arc."""
    return state.with_amplitudes(_shift(state.graph, state.amplitudes))


def step(state: WalkState, marked=None) -> WalkState:
    """One search step ``S C Q``; with no marked vertices this is ``U = S C``."""
    sign = _query_sign(state.graph, marked)
    return state.with_amplitudes(_step(state.graph, state.amplitudes, sign))


def evolve(state: WalkState, marked=None, steps: int = 1) -> WalkState:
    if steps < 0:
        raise InvalidInput(f"steps must be >= 0, got {steps}")
    g = state.graph
    sign = _query_sign(g, marked)
    x = state.amplitudes
    for _ in range(steps):
        x = _step(g, x, sign)
    return state.with_amplitudes(x)


def trajectory(state: WalkState, marked, steps: int) -> Iterable[np.ndarray]:
    """Yield the amplitude arrays of ``psi(0) .. psi(steps)``."""
    g = state.graph
    sign = _query_sign(g, marked)
    x = state.amplitudes
    yield x
    for _ in range(steps):
        x = _step(g, x, sign)
        yield x


def overlap(a: WalkState, b: WalkState) -> float:
    """``|<a|b>|``."""
    if not same_graph(a.graph, b.graph):
        raise InvalidInput("overlap of states on different graphs")
    return abs(float(np.dot(a.amplitudes, b.amplitudes)))


def marked_probability(state: WalkState, marked) -> float:
    """Total squared amplitude on arcs at marked vertices."""
    mask = marked_arc_mask(state.graph, marked)
    amps = state.amplitudes[mask]
    return float(np.dot(amps, amps))


def dense_operator(graph: Graph, marked=None) -> np.ndarray:
    """Explicit ``S C Q`` matrix built from the operator definitions.

    Independent of the arc-wise kernels above; intended as a test oracle for
    small graphs (memory is ``(2m)^2``).
    """
    A = graph.num_arcs
    S = np.zeros((A, A))
    S[graph.partner, np.arange(A)] = 1.0
    C = np.zeros((A, A))
    for v in range(graph.num_vertices):
        lo, hi = int(graph.offsets[v]), int(graph.offsets[v + 1])
        d = hi - lo
        C[lo:hi, lo:hi] = 2.0 / d * np.ones((d, d)) - np.eye(d)
    Q = np.diag(np.where(marked_arc_mask(graph, marked), -1.0, 1.0))
    return S @ C @ Q


def save_snapshot(state: WalkState, path: str | Path) -> None:
    """Text snapshot: ``#`` header lines, then one amplitude per line in arc order."""
    g = state.graph
    lines = [f"# family: {g.family}"]
    lines += [f"# {k}: {v}" for k, v in g.params]
    lines.append(f"# arcs: {g.num_arcs}")
    lines += [f"{x:.17g}" for x in state.amplitudes]
    Path(path).write_text("\n".join(lines) + "\n")


def load_snapshot(path: str | Path, graph: Graph) -> WalkState:
    header: dict[str, str] = {}
    values = []
    for line in Path(path).read_text().splitlines():
        if line.startswith("#"):
            key, _, val = line[1:].partition(":")
            header[key.strip()] = val.strip()
        elif line.strip():
            values.append(float(line))
    if int(header.get("arcs", len(values))) != graph.num_arcs:
        raise InvalidInput(f"snapshot has {header.get('arcs')} arcs, graph has {graph.num_arcs}")
    if header.get("family", graph.family) != graph.family:
        raise InvalidInput(f"snapshot is for a {header['family']} graph, not {graph.family}")
    return WalkState(np.array(values), graph)
