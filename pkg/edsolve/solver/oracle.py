"""
Exact e.d.s. search: D is an e.d.s. iff the closed neighbourhoods {N[v] : v in D}
partition V, so this is exact cover with one candidate set per vertex.

Vertex sets are Python ints used as bitsets. Both searches keep every undominated
vertex supplied with at least one admissible dominator (forward checking); a
dominator c is admissible while it is not Excluded and N[c] misses every dominated
vertex.
"""

import dataclasses
import logging
from typing import Iterator, List, Optional, Tuple

import dataclasses_json

from edsolve.errors import EdsError
from edsolve.graph.graph_core import BipartiteGraph
from edsolve.solver.eds_core import EdsSolution
from edsolve.solver.eds_core import StateMap

logger = logging.getLogger(__name__)

DEFAULT_SIZE_CAP = 4096
DEFAULT_COUNT_CAP = 30
HEURISTICS = ("lowest", "mrv")


class SizeCapExceeded(EdsError):
    def __init__(self, n: int, cap: int):
        self.n = n
        self.cap = cap
        super().__init__(f"graph with {n} vertices exceeds the oracle cap of {cap}")


@dataclasses.dataclass
class OracleResult(dataclasses_json.DataClassJsonMixin):
    solution: Optional[EdsSolution]
    explored_nodes: int = 0


class _Search:
    def __init__(self, g: BipartiteGraph, restrict: Optional[StateMap]):
        self.g = g
        self.full = (1 << g.n) - 1
        self.closed = [
            (1 << v) | sum(1 << w for w in g.neighbors(v)) for v in range(g.n)
        ]
        self.excluded = 0
        self.forced: Tuple[int, ...] = ()
        if restrict is not None:
            assert restrict.n == g.n, "restriction does not match the graph"
            self.forced = restrict.forced
            for v in restrict.excluded:
                self.excluded |= 1 << v
        self.explored = 0

    def start(self) -> Optional[int]:
        """Dominated set after taking every Forced vertex, or None on overlap."""
        dominated = 0
        for v in self.forced:
            if self.closed[v] & dominated:
                return None
            dominated |= self.closed[v]
        return dominated

    def admissible(self, c: int, dominated: int) -> bool:
        return not (self.excluded >> c) & 1 and not self.closed[c] & dominated

    def candidates(self, v: int, dominated: int, lowest: int = 0) -> List[int]:
        return [
            c
            for c in ((v,) + self.g.neighbors(v))
            if c >= lowest and self.admissible(c, dominated)
        ]

    def undominated(self, dominated: int) -> Iterator[int]:
        rest = self.full & ~dominated
        while rest:
            low = rest & -rest
            yield low.bit_length() - 1
            rest ^= low

    def dead_end(self, dominated: int, lowest: int = 0) -> bool:
        return any(
            not self.candidates(v, dominated, lowest)
            for v in self.undominated(dominated)
        )

    def lex_first(self) -> Optional[Tuple[int, ...]]:
        """
        Include-first search over vertex ids: decide 0, 1, 2, ... in order, trying
        "in D" before "not in D". The first complete cover found is the smallest in
        sorted-sequence order.
        """
        dominated = self.start()
        if dominated is None:
            return None
        stack: List[Tuple[int, int, Tuple[int, ...]]] = [(0, dominated, ())]
        while stack:
            nxt, dominated, chosen = stack.pop()
            self.explored += 1
            if dominated == self.full:
                return tuple(sorted(chosen + self.forced))
            if self.dead_end(dominated, nxt):
                continue
            v = nxt
            while v < self.g.n and not self.admissible(v, dominated):
                v += 1
            if v == self.g.n:
                continue
            stack.append((v + 1, dominated, chosen))
            stack.append((v + 1, dominated | self.closed[v], chosen + (v,)))
        return None

    def enumerate(self, heuristic: str) -> Iterator[Tuple[int, ...]]:
        """Every exact cover, branching on one undominated vertex at a time."""
        dominated = self.start()
        if dominated is None:
            return
        stack: List[Tuple[int, Tuple[int, ...]]] = [(dominated, ())]
        while stack:
            dominated, chosen = stack.pop()
            self.explored += 1
            if dominated == self.full:
                yield tuple(sorted(chosen + self.forced))
                continue
            options = [
                (v, self.candidates(v, dominated)) for v in self.undominated(dominated)
            ]
            if heuristic == "mrv":
                v, cands = min(options, key=lambda item: (len(item[1]), item[0]))
            else:
                v, cands = options[0]
                if any(not c for _, c in options):
                    continue
            for c in reversed(cands):
                stack.append((dominated | self.closed[c], chosen + (c,)))


def _check_size(g: BipartiteGraph, cap: int) -> None:
    if g.n > cap:
        raise SizeCapExceeded(g.n, cap)


def oracle_solve(
    g: BipartiteGraph,
    restrict: Optional[StateMap] = None,
    heuristic: str = "lowest",
    size_cap: int = DEFAULT_SIZE_CAP,
) -> OracleResult:
    """
    The lexicographically smallest e.d.s. of g that contains every Forced and no
    Excluded vertex of `restrict`, or a result with `solution=None`.

    With heuristic="mrv" every solution is enumerated with fewest-candidates
    branching and the smallest is returned: same answer, different explored_nodes.
    """
    if heuristic not in HEURISTICS:
        raise ValueError(f"unknown oracle heuristic {heuristic!r}")
    _check_size(g, size_cap)
    search = _Search(g, restrict)
    if heuristic == "lowest":
        best = search.lex_first()
    else:
        best = min(search.enumerate(heuristic), default=None)
    solution = EdsSolution(best) if best is not None else None
    logger.debug(
        f"oracle on n={g.n}: {'found' if solution else 'none'} "
        f"after {search.explored} nodes"
    )
    return OracleResult(solution=solution, explored_nodes=search.explored)


def oracle_enumerate(
    g: BipartiteGraph,
    restrict: Optional[StateMap] = None,
    heuristic: str = "lowest",
    size_cap: int = DEFAULT_SIZE_CAP,
) -> Iterator[EdsSolution]:
    if heuristic not in HEURISTICS:
        raise ValueError(f"unknown oracle heuristic {heuristic!r}")
    _check_size(g, size_cap)
    for found in _Search(g, restrict).enumerate(heuristic):
        yield EdsSolution(found)


def oracle_first(
    g: BipartiteGraph,
    restrict: Optional[StateMap] = None,
    size_cap: int = DEFAULT_SIZE_CAP,
) -> OracleResult:
    """
    Some e.d.s. under `restrict`, not necessarily the smallest one.

    Fewest-candidates branching refutes infeasible restrictions much faster than the
    lexicographic search; the answer is still deterministic.
    """
    _check_size(g, size_cap)
    search = _Search(g, restrict)
    found = next(search.enumerate("mrv"), None)
    solution = EdsSolution(found) if found is not None else None
    return OracleResult(solution=solution, explored_nodes=search.explored)


def oracle_count(g: BipartiteGraph, cap: int = DEFAULT_COUNT_CAP) -> int:
    """Number of distinct e.d.s. of g. Refuses graphs above `cap` vertices."""
    _check_size(g, cap)
    return sum(1 for _ in oracle_enumerate(g, size_cap=cap))
