import collections
import dataclasses
import enum
from typing import Dict, FrozenSet, Iterable, List, Optional, Sequence, Tuple, Union

import networkx as nx

from edsolve.errors import EdsError


class Side(str, enum.Enum):
    X = "X"
    Y = "Y"

    def other(self) -> "Side":
        return Side.Y if self is Side.X else Side.X


class Reach(enum.Enum):
    UNREACHABLE = "unreachable"

    def __repr__(self) -> str:
        return "UNREACHABLE"


UNREACHABLE = Reach.UNREACHABLE
Distance = Union[int, Reach]


class GraphError(EdsError, ValueError):
    pass


class NotBipartite(GraphError):
    def __init__(self, cycle: Sequence[int]):
        self.cycle = tuple(cycle)
        super().__init__(f"graph is not bipartite, odd cycle: {list(self.cycle)}")


class SelfLoop(GraphError):
    def __init__(self, vertex: int):
        self.vertex = vertex
        super().__init__(f"self-loop at vertex {vertex}")


class VertexOutOfRange(GraphError):
    def __init__(self, vertex: int, n: int):
        self.vertex = vertex
        self.n = n
        super().__init__(f"vertex {vertex} is out of range for n={n}")


class EmptySources(GraphError):
    def __init__(self):
        super().__init__("distance levels need at least one source vertex")


@dataclasses.dataclass(frozen=True)
class BipartiteGraph:
    """
    Immutable bipartite graph with a proper two-colouring.

    Vertices are the integers 0..n-1. `adjacency[v]` is the ascending, duplicate-free
    tuple of neighbours of v and `side[v]` is the colour class of v. Build instances
    with `from_edge_list`, which also picks the canonical colouring (the lowest id of
    every component is on side X).
    """

    n: int
    adjacency: Tuple[Tuple[int, ...], ...]
    side: Tuple[Side, ...]

    _neighbor_sets: Tuple[FrozenSet[int], ...] = dataclasses.field(
        init=False, repr=False, compare=False
    )
    _nx_graph: nx.Graph = dataclasses.field(init=False, repr=False, compare=False)

    def __post_init__(self):
        assert len(self.adjacency) == self.n, "adjacency must have n rows"
        assert len(self.side) == self.n, "side must have n entries"
        object.__setattr__(
            self, "_neighbor_sets", tuple(frozenset(nbrs) for nbrs in self.adjacency)
        )
        graph = nx.Graph()
        graph.add_nodes_from(range(self.n))
        graph.add_edges_from(self.edges())
        object.__setattr__(self, "_nx_graph", nx.freeze(graph))

    @property
    def m(self) -> int:
        return sum(len(nbrs) for nbrs in self.adjacency) // 2

    def neighbors(self, v: int) -> Tuple[int, ...]:
        return self.adjacency[v]

    def neighbor_set(self, v: int) -> FrozenSet[int]:
        return self._neighbor_sets[v]

    def closed_neighborhood(self, v: int) -> FrozenSet[int]:
        return self._neighbor_sets[v] | {v}

    def second_neighborhood(self, v: int) -> FrozenSet[int]:
        """Vertices at distance exactly 2 from v."""
        first = self._neighbor_sets[v]
        second = set()
        for w in self.adjacency[v]:
            second.update(self._neighbor_sets[w])
        second.discard(v)
        return frozenset(second - first)

    def degree(self, v: int) -> int:
        return len(self.adjacency[v])

    def has_edge(self, u: int, v: int) -> bool:
        return v in self._neighbor_sets[u]

    def edges(self) -> List[Tuple[int, int]]:
        """All edges as (u, v) with u < v, in ascending order."""
        return [(u, v) for u in range(self.n) for v in self.adjacency[u] if u < v]

    def vertices_on(self, side: Side) -> List[int]:
        return [v for v in range(self.n) if self.side[v] is side]

    def to_networkx(self) -> nx.Graph:
        """A frozen networkx view of this graph; callers must not mutate it."""
        return self._nx_graph

    def induced_subgraph(
        self, vertices: Iterable[int]
    ) -> Tuple["BipartiteGraph", Tuple[int, ...]]:
        """
        Returns the subgraph induced by `vertices` and the new-to-old id mapping.

        Relabelling preserves order (new id i is the i-th smallest old id) and the
        side of every vertex is inherited from this graph.
        """
        old_ids = tuple(sorted(set(vertices)))
        for v in old_ids:
            self._check_vertex(v)
        new_id = {old: new for new, old in enumerate(old_ids)}
        adjacency = tuple(
            tuple(new_id[w] for w in self.adjacency[old] if w in new_id)
            for old in old_ids
        )
        side = tuple(self.side[old] for old in old_ids)
        return BipartiteGraph(len(old_ids), adjacency, side), old_ids

    def validate(self) -> None:
        """Checks every structural invariant; raises AssertionError on failure."""
        for u in range(self.n):
            nbrs = self.adjacency[u]
            assert list(nbrs) == sorted(set(nbrs)), f"neighbours of {u} not sorted"
            for w in nbrs:
                assert 0 <= w < self.n, f"neighbour {w} of {u} out of range"
                assert w != u, f"self-loop at {u}"
                assert u in self._neighbor_sets[w], f"edge {u}-{w} not symmetric"
                assert self.side[u] is not self.side[w], f"edge {u}-{w} is monochrome"

    def _check_vertex(self, v: int) -> None:
        if not 0 <= v < self.n:
            raise VertexOutOfRange(v, self.n)


@dataclasses.dataclass(frozen=True)
class ComponentPartition:
    component_id: Tuple[int, ...]
    members: Tuple[Tuple[int, ...], ...]

    def __len__(self) -> int:
        return len(self.members)


@dataclasses.dataclass(frozen=True)
class DistanceLevels:
    level: Tuple[Distance, ...]
    buckets: Tuple[FrozenSet[int], ...]

    @property
    def depth(self) -> int:
        return len(self.buckets) - 1

    def bucket(self, i: int) -> FrozenSet[int]:
        """N_i, or the empty set when i is past the last level."""
        if 0 <= i < len(self.buckets):
            return self.buckets[i]
        return frozenset()

    def union(self, *indices: int) -> FrozenSet[int]:
        out: FrozenSet[int] = frozenset()
        for i in indices:
            out = out | self.bucket(i)
        return out

    def at(self, v: int) -> Distance:
        return self.level[v]

    def is_at(self, v: int, *indices: int) -> bool:
        return self.level[v] in indices


def from_edge_list(n: int, edges: Iterable[Tuple[int, int]]) -> BipartiteGraph:
    """
    Builds a BipartiteGraph from an edge list.

    Duplicate edges are dropped silently. Raises SelfLoop, VertexOutOfRange or
    NotBipartite (with a canonical odd cycle as witness).
    """
    if n < 0:
        raise GraphError(f"vertex count must be non-negative, got {n}")
    neighbor_sets: List[set] = [set() for _ in range(n)]
    for u, v in edges:
        for x in (u, v):
            if not 0 <= x < n:
                raise VertexOutOfRange(x, n)
        if u == v:
            raise SelfLoop(u)
        neighbor_sets[u].add(v)
        neighbor_sets[v].add(u)
    adjacency = tuple(tuple(sorted(nbrs)) for nbrs in neighbor_sets)
    return BipartiteGraph(n, adjacency, _canonical_coloring(adjacency))


def _canonical_coloring(adjacency: Tuple[Tuple[int, ...], ...]) -> Tuple[Side, ...]:
    n = len(adjacency)
    side: List[Optional[Side]] = [None] * n
    parent: List[Optional[int]] = [None] * n
    for root in range(n):
        if side[root] is not None:
            continue
        side[root] = Side.X
        queue = collections.deque([root])
        while queue:
            u = queue.popleft()
            for w in adjacency[u]:
                if side[w] is None:
                    side[w] = side[u].other()  # type: ignore[union-attr]
                    parent[w] = u
                    queue.append(w)
    for u in range(n):
        for w in adjacency[u]:
            if u < w and side[u] is side[w]:
                raise NotBipartite(_odd_cycle(u, w, parent))
    return tuple(side)  # type: ignore[arg-type]


def _odd_cycle(u: int, w: int, parent: Sequence[Optional[int]]) -> Tuple[int, ...]:
    def to_root(v: int) -> List[int]:
        path = [v]
        while parent[path[-1]] is not None:
            path.append(parent[path[-1]])  # type: ignore[arg-type]
        return path

    path_u, path_w = to_root(u), to_root(w)
    on_w = set(path_w)
    lca = next(v for v in path_u if v in on_w)
    cycle = path_u[: path_u.index(lca) + 1] + path_w[: path_w.index(lca)][::-1]
    return canonical_cycle(cycle)


def canonical_cycle(cycle: Sequence[int]) -> Tuple[int, ...]:
    """Rotates a cycle to start at its lowest id, then towards the smaller neighbour."""
    start = cycle.index(min(cycle))
    rotated = list(cycle[start:]) + list(cycle[:start])
    if len(rotated) > 2 and rotated[-1] < rotated[1]:
        rotated = [rotated[0]] + rotated[1:][::-1]
    return tuple(rotated)


def distance(g: BipartiteGraph, u: int, v: int) -> Distance:
    g._check_vertex(u)
    g._check_vertex(v)
    try:
        return nx.shortest_path_length(g.to_networkx(), u, v)
    except nx.NetworkXNoPath:
        return UNREACHABLE


def components(g: BipartiteGraph) -> ComponentPartition:
    members = sorted(
        (tuple(sorted(c)) for c in nx.connected_components(g.to_networkx())),
        key=lambda c: c[0],
    )
    component_id = [0] * g.n
    for i, comp in enumerate(members):
        for v in comp:
            component_id[v] = i
    return ComponentPartition(tuple(component_id), tuple(members))


def distance_levels(g: BipartiteGraph, sources: Iterable[int]) -> DistanceLevels:
    sources = sorted(set(sources))
    if not sources:
        raise EmptySources()
    for v in sources:
        g._check_vertex(v)
    lengths: Dict[int, int] = nx.multi_source_dijkstra_path_length(
        g.to_networkx(), sources
    )
    level: List[Distance] = [UNREACHABLE] * g.n
    depth = max(lengths.values())
    buckets: List[set] = [set() for _ in range(depth + 1)]
    for v, d in lengths.items():
        level[v] = d
        buckets[d].add(v)
    return DistanceLevels(tuple(level), tuple(frozenset(b) for b in buckets))
