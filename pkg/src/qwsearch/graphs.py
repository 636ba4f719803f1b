"""Arc-indexed undirected graphs with flip-flop arc pairing.

The walk state lives on directed arcs ``(vertex, port)``.  Arcs are stored
contiguously per vertex: vertex ``v`` owns the flat indices
``offsets[v] .. offsets[v] + degrees[v] - 1`` and port ``c`` of ``v`` is arc
``offsets[v] + c``.  ``partner[a]`` is the reverse arc on the same edge, so the
flip-flop shift is the permutation ``x -> x[partner]``.

Port orderings are part of the public contract:

* torus grid: ``UP, DOWN, LEFT, RIGHT`` (0..3), vertex ``(x, y)`` has id ``x * side + y``;
* hypercube: port ``c`` flips bit ``c``;
* everything else: ascending neighbour id.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, NamedTuple, Sequence

import numpy as np

from .errors import InvalidInput, InvalidParameter

UP, DOWN, LEFT, RIGHT = 0, 1, 2, 3
GRID_PORT_NAMES = ("up", "down", "left", "right")


class ArcRef(NamedTuple):
    vertex: int
    port: int


def _frozen(arr) -> np.ndarray:
    arr = np.ascontiguousarray(arr, dtype=np.int64)
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True, eq=False)
class Graph:
    """Immutable arc-indexed graph.

    Attributes
    ----------
    degrees : (n,) int array
    offsets : (n + 1,) int array, prefix sums of ``degrees``
    tail : (2m,) int array, vertex owning each arc
    head : (2m,) int array, vertex each arc points to
    partner : (2m,) int array, reverse arc (fixed-point-free involution)
    family, params : provenance recorded in snapshots and harness output
    """

    degrees: np.ndarray
    offsets: np.ndarray
    tail: np.ndarray
    head: np.ndarray
    partner: np.ndarray
    family: str = "custom"
    params: tuple = field(default=())

    @property
    def num_vertices(self) -> int:
        return len(self.degrees)

    @property
    def num_arcs(self) -> int:
        return len(self.tail)

    @property
    def num_edges(self) -> int:
        return len(self.tail) // 2

    def arc(self, vertex: int, port: int) -> int:
        if not 0 <= port < self.degrees[vertex]:
            raise InvalidInput(f"port {port} out of range for vertex {vertex}")
        return int(self.offsets[vertex] + port)

    def arc_ref(self, arc: int) -> ArcRef:
        v = int(self.tail[arc])
        return ArcRef(v, int(arc - self.offsets[v]))

    def partner_ref(self, ref: ArcRef) -> ArcRef:
        return self.arc_ref(self.partner[self.arc(*ref)])

    def arcs_of(self, vertex: int) -> range:
        return range(int(self.offsets[vertex]), int(self.offsets[vertex + 1]))

    def neighbors(self, vertex: int) -> np.ndarray:
        return self.head[self.offsets[vertex]:self.offsets[vertex + 1]]

    def port_to(self, u: int, v: int) -> int | None:
        """Port at ``u`` whose arc points to ``v``, or ``None`` if not adjacent."""
        hits = np.flatnonzero(self.neighbors(u) == v)
        return int(hits[0]) if len(hits) else None

    def has_edge(self, u: int, v: int) -> bool:
        return self.port_to(u, v) is not None

    def edge_arcs(self, u: int, v: int) -> tuple[int, int]:
        """The two arcs ``(u -> v, v -> u)`` of an edge."""
        c = self.port_to(u, v)
        if c is None:
            raise InvalidInput(f"vertices {u} and {v} are not adjacent")
        a = int(self.offsets[u] + c)
        return a, int(self.partner[a])

    def edges(self) -> list[tuple[int, int]]:
        """Undirected edges ``(u, v)`` with ``u < v``, sorted."""
        mask = self.tail < self.head
        pairs = np.stack([self.tail[mask], self.head[mask]], axis=1)
        order = np.lexsort((pairs[:, 1], pairs[:, 0]))
        return [(int(u), int(v)) for u, v in pairs[order]]

    def describe(self) -> str:
        params = " ".join(f"{k}={v}" for k, v in self.params)
        return f"{self.family} {params}".strip()

    def __repr__(self) -> str:
        return (f"Graph({self.describe()!r}, n={self.num_vertices}, "
                f"m={self.num_edges})")


def same_graph(g: Graph, h: Graph) -> bool:
    return g is h or (
        np.array_equal(g.degrees, h.degrees)
        and np.array_equal(g.head, h.head)
        and np.array_equal(g.partner, h.partner)
    )


def _from_ports(neighbors: Sequence[Sequence[int]], family: str, params: tuple,
                partner: np.ndarray | None = None) -> Graph:
    """Assemble a Graph from per-vertex ordered neighbour lists.

    When ``partner`` is not supplied it is recovered by matching ``(u, v)``
    against ``(v, u)`` keys, which also rejects parallel edges.
    """
    n = len(neighbors)
    degrees = np.fromiter((len(nb) for nb in neighbors), dtype=np.int64, count=n)
    if n == 0:
        raise InvalidInput("graph has no vertices")
    if np.any(degrees == 0):
        v = int(np.flatnonzero(degrees == 0)[0])
        raise InvalidInput(f"vertex {v} is isolated")
    offsets = np.zeros(n + 1, dtype=np.int64)
    np.cumsum(degrees, out=offsets[1:])
    tail = np.repeat(np.arange(n, dtype=np.int64), degrees)
    head = np.fromiter((u for nb in neighbors for u in nb), dtype=np.int64,
                       count=int(offsets[-1]))
    if partner is None:
        partner = _match_partners(tail, head, n)
    return Graph(_frozen(degrees), _frozen(offsets), _frozen(tail), _frozen(head),
                 _frozen(partner), family, tuple(params))


def _match_partners(tail: np.ndarray, head: np.ndarray, n: int) -> np.ndarray:
    if np.any(tail == head):
        a = int(np.flatnonzero(tail == head)[0])
        raise InvalidInput(f"self-loop at vertex {int(tail[a])}")
    key = tail * n + head
    order = np.argsort(key, kind="stable")
    skey = key[order]
    dup = np.flatnonzero(skey[1:] == skey[:-1])
    if len(dup):
        a = order[dup[0]]
        raise InvalidInput(f"duplicate edge ({int(tail[a])}, {int(head[a])})")
    rev = head * n + tail
    pos = np.searchsorted(skey, rev)
    pos = np.minimum(pos, len(skey) - 1)
    if not np.array_equal(skey[pos], rev):
        raise InvalidInput("adjacency is not symmetric")
    return order[pos]


def build_torus_grid(side: int) -> Graph:
    """``side x side`` torus with ports ``(UP, DOWN, LEFT, RIGHT)``.

    UP moves ``y -> y + 1`` and RIGHT moves ``x -> x + 1``; the flip-flop
    partner of an UP arc is the DOWN arc of the vertex above, and so on.
    """
    if side < 3:
        raise InvalidParameter(f"torus side must be >= 3, got {side}")
    n = side
    x, y = np.divmod(np.arange(n * n, dtype=np.int64), n)
    vid = lambda xx, yy: (xx % n) * n + (yy % n)  # noqa: E731
    head = np.stack([vid(x, y + 1), vid(x, y - 1), vid(x - 1, y), vid(x + 1, y)], axis=1)
    # partner port: UP<->DOWN, LEFT<->RIGHT
    flip = np.array([DOWN, UP, RIGHT, LEFT], dtype=np.int64)
    partner = head * 4 + flip[None, :]
    degrees = np.full(n * n, 4, dtype=np.int64)
    offsets = np.arange(0, 4 * n * n + 1, 4, dtype=np.int64)
    return Graph(_frozen(degrees), _frozen(offsets),
                 _frozen(np.repeat(np.arange(n * n), 4)), _frozen(head.ravel()),
                 _frozen(partner.ravel()), "grid", (("side", n),))


def grid_vertex(side: int, x: int, y: int) -> int:
    return (x % side) * side + (y % side)


def grid_coords(side: int, v: int) -> tuple[int, int]:
    x, y = divmod(int(v), side)
    return x, y


def build_hypercube(dim: int) -> Graph:
    """``dim``-dimensional hypercube; port ``c`` flips bit ``c``."""
    if dim < 1:
        raise InvalidParameter(f"hypercube dimension must be >= 1, got {dim}")
    if dim * (1 << dim) >= np.iinfo(np.int64).max // 2:
        raise InvalidParameter(f"hypercube dimension {dim} overflows the arc index range")
    N = 1 << dim
    v = np.arange(N, dtype=np.int64)[:, None]
    bits = (np.int64(1) << np.arange(dim, dtype=np.int64))[None, :]
    head = v ^ bits
    partner = head * dim + np.arange(dim, dtype=np.int64)[None, :]
    degrees = np.full(N, dim, dtype=np.int64)
    offsets = np.arange(0, dim * N + 1, dim, dtype=np.int64)
    return Graph(_frozen(degrees), _frozen(offsets),
                 _frozen(np.repeat(np.arange(N), dim)), _frozen(head.ravel()),
                 _frozen(partner.ravel()), "hypercube", (("dim", dim),))


def build_complete(k: int) -> Graph:
    if k < 2:
        raise InvalidParameter(f"complete graph needs k >= 2, got {k}")
    nbrs = [[u for u in range(k) if u != v] for v in range(k)]
    return _from_ports(nbrs, "complete", (("k", k),))


def from_edge_list(edges: Iterable[tuple[int, int]], *, family: str = "edgelist",
                   params: tuple = ()) -> Graph:
    """Build a graph on vertices ``0..max_label`` from undirected edges.

    Ports at each vertex are assigned in ascending neighbour order.  Self-loops,
    duplicate edges, negative labels and isolated vertices raise ``InvalidInput``.
    """
    edges = [(int(u), int(v)) for u, v in edges]
    if not edges:
        raise InvalidInput("empty edge list")
    seen = set()
    for u, v in edges:
        if u < 0 or v < 0:
            raise InvalidInput(f"negative vertex label in edge ({u}, {v})")
        if u == v:
            raise InvalidInput(f"self-loop ({u}, {v})")
        key = (min(u, v), max(u, v))
        if key in seen:
            raise InvalidInput(f"duplicate edge ({u}, {v})")
        seen.add(key)
    n = max(max(e) for e in edges) + 1
    nbrs: list[list[int]] = [[] for _ in range(n)]
    for u, v in edges:
        nbrs[u].append(v)
        nbrs[v].append(u)
    for nb in nbrs:
        nb.sort()
    return _from_ports(nbrs, family, params)


def read_edge_list(path: str | Path) -> list[tuple[int, int]]:
    """Parse the ``u v`` per line text format (``#`` starts a comment)."""
    edges = []
    for lineno, line in enumerate(Path(path).read_text().splitlines(), 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        parts = line.split()
        if len(parts) != 2:
            raise InvalidInput(f"{path}:{lineno}: expected 'u v', got {line!r}")
        try:
            edges.append((int(parts[0]), int(parts[1])))
        except ValueError:
            raise InvalidInput(f"{path}:{lineno}: non-integer vertex in {line!r}") from None
    return edges


def write_edge_list(graph: Graph, path: str | Path) -> None:
    lines = [f"# {graph.describe()}"] + [f"{u} {v}" for u, v in graph.edges()]
    Path(path).write_text("\n".join(lines) + "\n")


def _is_connected(vertices: Sequence[int], edges: Sequence[tuple[int, int]]) -> bool:
    if not vertices:
        return False
    adj: dict[int, set[int]] = {v: set() for v in vertices}
    for u, v in edges:
        adj[u].add(v)
        adj[v].add(u)
    stack, seen = [vertices[0]], {vertices[0]}
    while stack:
        for w in adj[stack.pop()]:
            if w not in seen:
                seen.add(w)
                stack.append(w)
    return len(seen) == len(vertices)


def build_clique_gadget(marked_block: Sequence[tuple[int, int]],
                        attachments: Sequence[int], clique_size: int):
    """Marked block glued to fresh complete graphs.

    Marked vertices are ``0 .. len(attachments) - 1`` with the edges of
    ``marked_block`` among them.  Marked vertex ``v`` is linked to the first
    ``attachments[v]`` vertices of its own fresh ``K_clique_size``, so its degree
    is its block degree plus ``attachments[v]``.

    Returns ``(graph, MarkedConfig)`` with no declared partition.
    """
    from .stationary import MarkedConfig

    b = len(attachments)
    if clique_size < 3:
        raise InvalidParameter(f"clique_size must be >= 3, got {clique_size}")
    for v, t in enumerate(attachments):
        if t < 1:
            raise InvalidParameter(f"marked vertex {v}: attachment count must be >= 1, got {t}")
        if t > clique_size:
            raise InvalidParameter(
                f"marked vertex {v}: attachment count {t} exceeds clique_size {clique_size}")
    block = [(int(u), int(v)) for u, v in marked_block]
    for u, v in block:
        if not (0 <= u < b and 0 <= v < b):
            raise InvalidInput(f"block edge ({u}, {v}) references a vertex outside 0..{b - 1}")
    if not _is_connected(list(range(b)), block):
        raise InvalidInput("marked block is not connected")

    edges = list(block)
    nxt = b
    for v, t in enumerate(attachments):
        members = list(range(nxt, nxt + clique_size))
        edges += [(p, q) for i, p in enumerate(members) for q in members[i + 1:]]
        edges += [(v, members[i]) for i in range(t)]
        nxt += clique_size
    params = (("block", tuple(block)), ("attachments", tuple(attachments)),
              ("clique_size", clique_size))
    graph = from_edge_list(edges, family="gadget", params=params)
    return graph, MarkedConfig(tuple(range(b)))
