import dataclasses
import enum
from typing import FrozenSet, Iterable, Iterator, List, Optional, Tuple

from edsolve.errors import EdsError
from edsolve.graph.graph_core import BipartiteGraph


class Label(str, enum.Enum):
    FREE = "free"
    FORCED = "forced"
    EXCLUDED = "excluded"


class ConflictReason(str, enum.Enum):
    ADJACENT_FORCED = "adjacent_forced"
    DISTANCE_VIOLATION = "distance_violation"
    FORCED_EXCLUDED_CLASH = "forced_excluded_clash"


class Conflict(EdsError):
    def __init__(self, reason: ConflictReason, vertices: Iterable[int]):
        self.reason = reason
        self.vertices = tuple(vertices)
        super().__init__(f"{reason.value}: {list(self.vertices)}")


@dataclasses.dataclass(frozen=True)
class EdsSolution:
    vertices: Tuple[int, ...]

    def __post_init__(self):
        assert list(self.vertices) == sorted(set(self.vertices)), (
            f"solution must be sorted and duplicate-free: {self.vertices}"
        )

    @classmethod
    def of(cls, vertices: Iterable[int]) -> "EdsSolution":
        return cls(tuple(sorted(set(vertices))))

    def __len__(self) -> int:
        return len(self.vertices)

    def __iter__(self) -> Iterator[int]:
        return iter(self.vertices)

    def __contains__(self, v: object) -> bool:
        return v in self.vertices

    def to_line(self) -> str:
        return " ".join(str(v) for v in self.vertices)


@dataclasses.dataclass(frozen=True)
class VerifyReport:
    valid: bool
    # (lowest violating vertex, number of its dominators in the candidate set)
    violation: Optional[Tuple[int, int]] = None

    def __post_init__(self):
        assert self.valid == (self.violation is None)


def dominator_counts(g: BipartiteGraph, d: Iterable[int]) -> List[int]:
    counts = [0] * g.n
    for v in d:
        counts[v] += 1
        for w in g.neighbors(v):
            counts[w] += 1
    return counts


def verify(g: BipartiteGraph, d: Iterable[int]) -> VerifyReport:
    for v in d:
        g._check_vertex(v)
    counts = dominator_counts(g, d)
    for v, count in enumerate(counts):
        if count != 1:
            return VerifyReport(valid=False, violation=(v, count))
    return VerifyReport(valid=True)


@dataclasses.dataclass(frozen=True)
class StateMap:
    """
    Per-vertex Free/Forced/Excluded labels. `basis` is the Forced set.

    Value semantics: `force` and `exclude` return a new StateMap, so branches can
    hold on to their own copy.
    """

    labels: Tuple[Label, ...]

    @classmethod
    def empty(cls, n: int) -> "StateMap":
        return cls((Label.FREE,) * n)

    @property
    def n(self) -> int:
        return len(self.labels)

    @property
    def basis(self) -> FrozenSet[int]:
        return frozenset(self.forced)

    @property
    def forced(self) -> Tuple[int, ...]:
        return tuple(v for v, label in enumerate(self.labels) if label is Label.FORCED)

    @property
    def excluded(self) -> FrozenSet[int]:
        return frozenset(
            v for v, label in enumerate(self.labels) if label is Label.EXCLUDED
        )

    def label(self, v: int) -> Label:
        return self.labels[v]

    def is_forced(self, v: int) -> bool:
        return self.labels[v] is Label.FORCED

    def is_excluded(self, v: int) -> bool:
        return self.labels[v] is Label.EXCLUDED

    def is_free(self, v: int) -> bool:
        return self.labels[v] is Label.FREE

    def with_labels(self, updates: Iterable[Tuple[int, Label]]) -> "StateMap":
        labels = list(self.labels)
        for v, label in updates:
            labels[v] = label
        return StateMap(tuple(labels))

    def validate(self, g: BipartiteGraph) -> None:
        """Checks the StateMap invariants against g; raises AssertionError."""
        assert self.n == g.n, "state and graph disagree on n"
        for u in self.forced:
            for w in g.neighbors(u):
                assert self.is_excluded(w), f"neighbour {w} of forced {u} not excluded"
            for w in g.second_neighborhood(u):
                assert not self.is_forced(w), f"forced {u} and {w} at distance 2"


def force(state: StateMap, g: BipartiteGraph, u: int) -> StateMap:
    """
    Puts u into the solution basis.

    N(u) and N^2(u) become Excluded: a neighbour of a solution vertex cannot be in
    the solution, and neither can anything at distance two. Raises Conflict when u is
    Excluded or a Forced vertex is within distance two.
    """
    g._check_vertex(u)
    if state.is_forced(u):
        return state
    if state.is_excluded(u):
        raise Conflict(ConflictReason.FORCED_EXCLUDED_CLASH, (u,))
    for w in g.neighbors(u):
        if state.is_forced(w):
            raise Conflict(ConflictReason.ADJACENT_FORCED, (u, w))
    second = g.second_neighborhood(u)
    for w in sorted(second):
        if state.is_forced(w):
            raise Conflict(ConflictReason.DISTANCE_VIOLATION, (u, w))
    updates = [(u, Label.FORCED)]
    updates.extend((w, Label.EXCLUDED) for w in g.neighbors(u))
    updates.extend((w, Label.EXCLUDED) for w in second)
    return state.with_labels(updates)


def exclude(state: StateMap, g: BipartiteGraph, u: int) -> StateMap:
    g._check_vertex(u)
    if state.is_excluded(u):
        return state
    if state.is_forced(u):
        raise Conflict(ConflictReason.FORCED_EXCLUDED_CLASH, (u,))
    return state.with_labels([(u, Label.EXCLUDED)])


def apply_all(
    state: StateMap,
    g: BipartiteGraph,
    forced: Iterable[int] = (),
    excluded: Iterable[int] = (),
) -> StateMap:
    """Forces then excludes the given vertices, stopping at the first Conflict."""
    for u in forced:
        state = force(state, g, u)
    for u in excluded:
        state = exclude(state, g, u)
    return state


def settled_and_residual(
    state: StateMap, g: BipartiteGraph
) -> Tuple[FrozenSet[int], FrozenSet[int]]:
    """
    Splits V into vertices dominated by the basis and the rest.

    Excluded vertices outside N[basis] are residual: they still need a dominator.
    """
    dominated = set()
    for u in state.forced:
        dominated.update(g.closed_neighborhood(u))
    residual = frozenset(v for v in range(g.n) if v not in dominated)
    return frozenset(dominated), residual
