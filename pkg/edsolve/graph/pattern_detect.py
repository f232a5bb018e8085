"""
Induced-subgraph search for the shapes the solver reasons about: induced paths P_k,
induced six-cycles and the spider S(1,1,5).

All searches extend one vertex at a time and only accept a new vertex whose
neighbours among the already chosen vertices are exactly the expected ones, so every
yielded tuple is induced by construction. Results come out in lexicographic order of
their canonical vertex tuples.
"""

import dataclasses
import enum
import itertools
from typing import AbstractSet, Iterable, Iterator, List, Optional, Set, Tuple

from edsolve.graph.graph_core import BipartiteGraph

MAX_PATH_LENGTH = 8

# Spider S(1,1,5) on (u, w, w', v1, ..., v5): centre u, leaves w and w', tail v1..v5.
SPIDER_EDGES = ((0, 1), (0, 2), (0, 3), (3, 4), (4, 5), (5, 6), (6, 7))


class PatternKind(str, enum.Enum):
    PATH = "P"
    CYCLE6 = "C6"
    SPIDER115 = "S115"


@dataclasses.dataclass(frozen=True)
class InducedWitness:
    kind: PatternKind
    vertices: Tuple[int, ...]

    @property
    def name(self) -> str:
        if self.kind is PatternKind.PATH:
            return f"P{len(self.vertices)}"
        return self.kind.value

    def expected_edges(self) -> Set[Tuple[int, int]]:
        """Pattern edges as position pairs into `vertices`."""
        k = len(self.vertices)
        if self.kind is PatternKind.PATH:
            return {(i, i + 1) for i in range(k - 1)}
        if self.kind is PatternKind.CYCLE6:
            return {(i, i + 1) for i in range(k - 1)} | {(0, k - 1)}
        return set(SPIDER_EDGES)


def validate_witness(g: BipartiteGraph, witness: InducedWitness) -> bool:
    """True iff the vertices are distinct and induce exactly the pattern's edges."""
    vs = witness.vertices
    if len(set(vs)) != len(vs):
        return False
    if witness.kind is PatternKind.CYCLE6 and len(vs) != 6:
        return False
    if witness.kind is PatternKind.SPIDER115 and len(vs) != 8:
        return False
    expected = witness.expected_edges()
    for i, j in itertools.combinations(range(len(vs)), 2):
        if g.has_edge(vs[i], vs[j]) != ((i, j) in expected):
            return False
    return True


def _extensions(
    g: BipartiteGraph,
    chosen: List[int],
    chosen_set: Set[int],
    allowed: Optional[AbstractSet[int]],
) -> Iterator[int]:
    """Neighbours of the last chosen vertex that see no other chosen vertex."""
    last = chosen[-1]
    for w in g.neighbors(last):
        if w in chosen_set or (allowed is not None and w not in allowed):
            continue
        if len(g.neighbor_set(w) & chosen_set) == 1:
            yield w


def _grow_paths(
    g: BipartiteGraph,
    chosen: List[int],
    chosen_set: Set[int],
    k: int,
    allowed: Optional[AbstractSet[int]],
) -> Iterator[Tuple[int, ...]]:
    if len(chosen) == k:
        yield tuple(chosen)
        return
    for w in _extensions(g, chosen, chosen_set, allowed):
        chosen.append(w)
        chosen_set.add(w)
        yield from _grow_paths(g, chosen, chosen_set, k, allowed)
        chosen.pop()
        chosen_set.discard(w)


def iter_induced_paths(
    g: BipartiteGraph,
    k: int,
    vertices: Optional[Iterable[int]] = None,
    start: Optional[int] = None,
) -> Iterator[InducedWitness]:
    """
    Lazily yields every induced path on k vertices, once per undirected path.

    The reported orientation has its first endpoint smaller than its last one.
    `vertices` restricts the search to an induced subgraph, `start` pins the first
    vertex (the orientation rule still applies).
    """
    if not 1 <= k <= MAX_PATH_LENGTH:
        raise ValueError(f"path length must be in [1, {MAX_PATH_LENGTH}], got {k}")
    allowed = frozenset(vertices) if vertices is not None else None
    starts = range(g.n) if start is None else [start]
    for s in starts:
        if allowed is not None and s not in allowed:
            continue
        for path in _grow_paths(g, [s], {s}, k, allowed):
            if k == 1 or path[0] < path[-1]:
                yield InducedWitness(PatternKind.PATH, path)


def enumerate_induced_paths(
    g: BipartiteGraph,
    k: int,
    limit: Optional[int] = None,
    vertices: Optional[Iterable[int]] = None,
) -> List[InducedWitness]:
    return list(itertools.islice(iter_induced_paths(g, k, vertices), limit))


def iter_induced_c6(
    g: BipartiteGraph, vertices: Optional[Iterable[int]] = None
) -> Iterator[InducedWitness]:
    allowed = frozenset(vertices) if vertices is not None else None
    for a in range(g.n):
        if allowed is not None and a not in allowed:
            continue
        # Only vertices above `a` may appear so `a` is the cycle's minimum.
        above = frozenset(v for v in range(a + 1, g.n))
        if allowed is not None:
            above = above & allowed
        for path in _grow_paths(g, [a], {a}, 5, above):
            # Close the cycle with a sixth vertex adjacent to both path ends only.
            for z in g.neighbors(path[-1]):
                if z not in above or z in path or not g.has_edge(z, a):
                    continue
                if len(g.neighbor_set(z) & set(path)) != 2:
                    continue
                if path[1] < z:
                    yield InducedWitness(PatternKind.CYCLE6, path + (z,))


def find_induced_c6(
    g: BipartiteGraph, vertices: Optional[Iterable[int]] = None
) -> List[InducedWitness]:
    return list(iter_induced_c6(g, vertices))


def _spider_candidates(g: BipartiteGraph, u: int) -> Iterator[Tuple[int, ...]]:
    for tail in _grow_paths(g, [u], {u}, 6, None):
        tail_set = set(tail)
        leaves = [
            w
            for w in g.neighbors(u)
            if w not in tail_set and g.neighbor_set(w) & tail_set == {u}
        ]
        for w, w2 in itertools.combinations(leaves, 2):
            yield (u, w, w2) + tail[1:]


def find_s115(g: BipartiteGraph) -> Optional[InducedWitness]:
    """
    The lexicographically smallest induced S(1,1,5) as (u, w, w', v1, ..., v5), or None.

    u is the centre, w < w' its pendant leaves and v1..v5 the induced tail hanging
    off u. Leaves are automatically non-adjacent to each other since they share a
    colour class.
    """
    for u in range(g.n):
        if g.degree(u) < 3:
            continue
        best = min(_spider_candidates(g, u), default=None)
        if best is not None:
            return InducedWitness(PatternKind.SPIDER115, best)
    return None


def is_p8_free(
    g: BipartiteGraph, vertices: Optional[Iterable[int]] = None
) -> Tuple[bool, Optional[InducedWitness]]:
    witness = next(iter_induced_paths(g, 8, vertices), None)
    return witness is None, witness


def p4_structure(g: BipartiteGraph) -> Tuple[frozenset, frozenset]:
    """Midpoints and endpoints over all induced P4 of g."""
    midpoints: Set[int] = set()
    endpoints: Set[int] = set()
    for witness in iter_induced_paths(g, 4):
        a, b, c, d = witness.vertices
        midpoints.update((b, c))
        endpoints.update((a, d))
    return frozenset(midpoints), frozenset(endpoints)


def find_2d_pair_pattern(
    g: BipartiteGraph, solution: Iterable[int]
) -> Optional[InducedWitness]:
    """
    An induced P6 or C6 (v1..v6) with v2 and v5 both in `solution`, or None.

    Used to check that a solution found without the paired-P6 hypothesis really
    contains no such pattern.
    """
    chosen = sorted(set(solution))
    for a, b in itertools.combinations(chosen, 2):
        for p in g.neighbors(a):
            for q in g.neighbors(p):
                if q == a or not g.has_edge(q, b):
                    continue
                if g.has_edge(a, q) or g.has_edge(p, b):
                    continue
                for w1 in g.neighbors(a):
                    if w1 in (p, q):
                        continue
                    for w6 in g.neighbors(b):
                        if w6 in (p, q, w1):
                            continue
                        path = (w1, a, p, q, b, w6)
                        kind = (
                            PatternKind.CYCLE6
                            if g.has_edge(w1, w6)
                            else PatternKind.PATH
                        )
                        witness = InducedWitness(kind, path)
                        if validate_witness(g, witness):
                            return witness
    return None
