"""
Rule engine over the distance levels N_0, N_1, ... of the current basis.

Forcing rules run to a fixpoint in `propagate`; the levels are recomputed after every
productive firing. Branching rules (`branch_candidates`) split an under-determined
structure into complete, mutually exclusive alternatives. `assert_structural_lemmas`
only reports.

Every forced vertex excludes N and N^2 of itself, so N_1 and N_2 are always
Excluded and a vertex of N_2 can only be dominated from N_3. Rules registered with
`hypothesis_only=True` are valid only when the basis grew from a (v2, v5) pair of an
induced P6 or C6 in an S(1,1,5)-free graph; the others hold for every e.d.s.
containing the basis.
"""

import dataclasses
import enum
import itertools
import logging
from typing import (
    Callable,
    Dict,
    FrozenSet,
    List,
    Optional,
    Sequence,
    Set,
    Tuple,
)

import networkx as nx

from edsolve.graph import graph_core
from edsolve.graph import pattern_detect
from edsolve.graph.graph_core import BipartiteGraph
from edsolve.graph.graph_core import DistanceLevels
from edsolve.graph.graph_core import Side
from edsolve.solver import eds_core
from edsolve.solver.eds_core import Conflict
from edsolve.solver.eds_core import StateMap

logger = logging.getLogger(__name__)


class RuleId(str, enum.Enum):
    R0 = "R0"  # two leaves on one vertex
    R1 = "R1"  # N_2 vertex without an N_3 dominator
    R2 = "R2"  # N_2 vertex with a single N_3 dominator
    R3 = "R3"  # N_3 vertex that can only dominate itself
    R4 = "R4"  # P4 hanging from N_2 into N_3/N_4
    R5 = "R5"  # isolated N_3 edges sharing N_2 neighbours
    B1 = "B1"  # P3 in N_3 u N_4 with an N_3 midpoint
    B2 = "B2"  # P4 in N_3 u N_4
    B3 = "B3"  # two isolated N_3 edges crossing two N_2 vertices


class AssertionId(str, enum.Enum):
    A1 = "A1"  # N_5 is empty
    A2 = "A2"  # N_4 is independent
    A3 = "A3"  # N_3 edges do not touch N_4
    A4 = "A4"  # no P6 alternating N_2/N_3
    A5 = "A5"  # same-side N_3 distance is 2 or 4 inside a residual component
    A6 = "A6"  # every residual component is P8-free


class ResultKind(str, enum.Enum):
    REDUCED = "reduced"
    INFEASIBLE = "infeasible"
    BRANCH = "branch"


@dataclasses.dataclass(frozen=True)
class Alternative:
    force: Tuple[int, ...] = ()
    exclude: Tuple[int, ...] = ()

    def apply(self, state: StateMap, g: BipartiteGraph) -> StateMap:
        return eds_core.apply_all(state, g, self.force, self.exclude)


@dataclasses.dataclass(frozen=True)
class Firing:
    """One productive rule application or branch choice, in application order."""

    rule: RuleId
    forced: Tuple[int, ...] = ()
    excluded: Tuple[int, ...] = ()
    witness: Tuple[int, ...] = ()

    def describe(self) -> str:
        parts = [self.rule.value]
        if self.forced:
            parts.append("+" + ",".join(map(str, self.forced)))
        if self.excluded:
            parts.append("-" + ",".join(map(str, self.excluded)))
        return " ".join(parts)


@dataclasses.dataclass(frozen=True)
class PropagationResult:
    kind: ResultKind
    state: Optional[StateMap] = None
    rule: Optional[RuleId] = None
    witness: Tuple[int, ...] = ()
    alternatives: Tuple[Alternative, ...] = ()
    firings: Tuple[Firing, ...] = ()

    @classmethod
    def reduced(
        cls, state: StateMap, firings: Sequence[Firing] = ()
    ) -> "PropagationResult":
        return cls(ResultKind.REDUCED, state=state, firings=tuple(firings))

    @classmethod
    def infeasible(
        cls, rule: RuleId, witness: Sequence[int], firings: Sequence[Firing] = ()
    ) -> "PropagationResult":
        return cls(
            ResultKind.INFEASIBLE,
            rule=rule,
            witness=tuple(witness),
            firings=tuple(firings),
        )

    @classmethod
    def branch(
        cls,
        rule: RuleId,
        state: StateMap,
        alternatives: Sequence[Alternative],
        witness: Sequence[int],
    ) -> "PropagationResult":
        assert alternatives, "a branch needs at least one alternative"
        assert len(set(alternatives)) == len(alternatives), "duplicate alternatives"
        return cls(
            ResultKind.BRANCH,
            state=state,
            rule=rule,
            witness=tuple(witness),
            alternatives=tuple(alternatives),
        )


@dataclasses.dataclass(frozen=True)
class AssertionReport:
    violations: Tuple[Tuple[AssertionId, Tuple[int, ...]], ...] = ()

    @property
    def ok(self) -> bool:
        return not self.violations

    def ids(self) -> List[AssertionId]:
        return [assertion for assertion, _ in self.violations]

    def describe(self) -> List[str]:
        return [f"{a.value}:{' '.join(map(str, w))}" for a, w in self.violations]


@dataclasses.dataclass(frozen=True)
class Deduction:
    forced: Tuple[int, ...] = ()
    excluded: Tuple[int, ...] = ()
    witness: Tuple[int, ...] = ()
    infeasible: bool = False


@dataclasses.dataclass(frozen=True)
class RuleContext:
    g: BipartiteGraph
    state: StateMap
    levels: Optional[DistanceLevels]
    hypothesis: bool

    @classmethod
    def build(
        cls, g: BipartiteGraph, state: StateMap, hypothesis: bool
    ) -> "RuleContext":
        basis = state.forced
        levels = graph_core.distance_levels(g, basis) if basis else None
        return cls(g, state, levels, hypothesis)

    def level(self, *indices: int) -> FrozenSet[int]:
        if self.levels is None:
            return frozenset()
        return self.levels.union(*indices)

    def at(self, v: int, *indices: int) -> bool:
        return self.levels is not None and self.levels.is_at(v, *indices)

    def alive_neighbors(self, v: int, *indices: int) -> List[int]:
        """Neighbours of v on the given levels that are not Excluded."""
        return [
            w
            for w in self.g.neighbors(v)
            if self.at(w, *indices) and not self.state.is_excluded(w)
        ]


ForcingRule = Callable[[RuleContext], Optional[Deduction]]
BranchingRule = Callable[
    [RuleContext], Optional[Tuple[List[Alternative], Tuple[int, ...]]]
]


class RuleRegistry:
    """
    Registry of forcing and branching rules, in registration order.

    Forcing rules map a RuleContext to a Deduction (or None); branching rules map it
    to (alternatives, witness) (or None).
    """

    _forcing: Dict[RuleId, Tuple[ForcingRule, bool]] = {}
    _branching: Dict[RuleId, Tuple[BranchingRule, bool]] = {}

    @classmethod
    def register(cls, rule_id: RuleId, hypothesis_only: bool = False):
        """Use a decorator to register forcing rules."""

        def wrapper(fn: ForcingRule) -> ForcingRule:
            cls._forcing[rule_id] = (fn, hypothesis_only)
            return fn

        return wrapper

    @classmethod
    def register_branching(cls, rule_id: RuleId, hypothesis_only: bool = False):
        """Use a decorator to register branching rules."""

        def wrapper(fn: BranchingRule) -> BranchingRule:
            cls._branching[rule_id] = (fn, hypothesis_only)
            return fn

        return wrapper

    @classmethod
    def forcing_rules(
        cls, hypothesis: bool, order: Optional[Sequence[RuleId]] = None
    ) -> List[Tuple[RuleId, ForcingRule]]:
        ids = [RuleId(r) for r in order] if order is not None else list(cls._forcing)
        for rule_id in ids:
            if rule_id not in cls._forcing:
                raise KeyError(f"Forcing rule '{rule_id}' not found in registry")
        return [
            (rule_id, cls._forcing[rule_id][0])
            for rule_id in ids
            if hypothesis or not cls._forcing[rule_id][1]
        ]

    @classmethod
    def branching_rules(
        cls, hypothesis: bool
    ) -> List[Tuple[RuleId, BranchingRule]]:
        return [
            (rule_id, fn)
            for rule_id, (fn, hypothesis_only) in cls._branching.items()
            if hypothesis or not hypothesis_only
        ]

    @classmethod
    def is_hypothesis_only(cls, rule_id: RuleId) -> bool:
        entry = cls._forcing.get(rule_id) or cls._branching.get(rule_id)
        if entry is None:
            raise KeyError(f"Rule '{rule_id}' not found in registry")
        return entry[1]


def _close(g: BipartiteGraph, a: int, b: int) -> bool:
    """dist(a, b) <= 2."""
    return a == b or g.has_edge(a, b) or bool(g.neighbor_set(a) & g.neighbor_set(b))


@RuleRegistry.register(RuleId.R0)
def leaf_pair_rule(ctx: RuleContext) -> Optional[Deduction]:
    g = ctx.g
    targets: List[int] = []
    witness: List[int] = []
    for y in range(g.n):
        if ctx.state.is_forced(y):
            continue
        leaves = [x for x in g.neighbors(y) if g.degree(x) == 1]
        if len(leaves) >= 2:
            targets.append(y)
            witness.extend((leaves[0], leaves[1], y))
    if not targets:
        return None
    return Deduction(forced=tuple(targets), witness=tuple(witness))


@RuleRegistry.register(RuleId.R1)
def n2_without_dominator_rule(ctx: RuleContext) -> Optional[Deduction]:
    for u in sorted(ctx.level(2)):
        if not ctx.alive_neighbors(u, 3):
            return Deduction(witness=(u,), infeasible=True)
    return None


@RuleRegistry.register(RuleId.R2)
def n2_single_dominator_rule(ctx: RuleContext) -> Optional[Deduction]:
    source: Dict[int, int] = {}
    for u in sorted(ctx.level(2)):
        candidates = ctx.alive_neighbors(u, 3)
        if len(candidates) == 1:
            source.setdefault(candidates[0], u)
    if not source:
        return None
    targets = sorted(source)
    for w, w2 in itertools.combinations(targets, 2):
        if _close(ctx.g, w, w2):
            return Deduction(witness=(w, w2), infeasible=True)
    return Deduction(
        forced=tuple(targets), witness=tuple(source[w] for w in targets)
    )


@RuleRegistry.register(RuleId.R3)
def n3_self_dominating_rule(ctx: RuleContext) -> Optional[Deduction]:
    targets = [
        w
        for w in sorted(ctx.level(3))
        if not ctx.state.is_forced(w) and not ctx.alive_neighbors(w, 3, 4)
    ]
    if not targets:
        return None
    for w, w2 in itertools.combinations(targets, 2):
        if _close(ctx.g, w, w2):
            common = sorted(ctx.g.neighbor_set(w) & ctx.g.neighbor_set(w2))
            return Deduction(witness=(w, w2, *common[:1]), infeasible=True)
    return Deduction(forced=tuple(targets), witness=tuple(targets))


@RuleRegistry.register(RuleId.R4, hypothesis_only=True)
def p4_forcing_rule(ctx: RuleContext) -> Optional[Deduction]:
    g = ctx.g
    for r2 in sorted(ctx.level(2)):
        for r3 in g.neighbors(r2):
            if not ctx.at(r3, 3):
                continue
            for r4 in g.neighbors(r3):
                if not ctx.at(r4, 3, 4):
                    continue
                for r5 in g.neighbors(r4):
                    if r5 == r3 or not ctx.at(r5, 3, 4, 5) or g.has_edge(r2, r5):
                        continue
                    return Deduction(
                        forced=(r4,), excluded=(r3,), witness=(r2, r3, r4, r5)
                    )
    return None


def isolated_n3_edges(ctx: RuleContext) -> List[Tuple[int, int]]:
    """
    Edges (x, y) of N_3, x on side X, with both ends Free and each end's only
    non-Excluded neighbour in N_3 u N_4 being the other end. Exactly one end of such
    an edge is in any e.d.s. extending the basis.
    """
    edges = []
    for x in sorted(ctx.level(3)):
        if ctx.g.side[x] is not Side.X or not ctx.state.is_free(x):
            continue
        nbrs = ctx.alive_neighbors(x, 3, 4)
        if len(nbrs) != 1:
            continue
        y = nbrs[0]
        if (
            ctx.at(y, 3)
            and ctx.state.is_free(y)
            and ctx.alive_neighbors(y, 3, 4) == [x]
        ):
            edges.append((x, y))
    return edges


def _edge_contacts(
    ctx: RuleContext, edges: Sequence[Tuple[int, int]]
) -> Tuple[Dict[int, FrozenSet[int]], Dict[int, FrozenSet[int]]]:
    """For every N_2 vertex, the indices of edges whose x (resp. y) end it touches."""
    x_contacts: Dict[int, Set[int]] = {}
    y_contacts: Dict[int, Set[int]] = {}
    for i, (x, y) in enumerate(edges):
        for u in ctx.g.neighbors(x):
            if ctx.at(u, 2):
                x_contacts.setdefault(u, set()).add(i)
        for u in ctx.g.neighbors(y):
            if ctx.at(u, 2):
                y_contacts.setdefault(u, set()).add(i)
    return (
        {u: frozenset(s) for u, s in x_contacts.items()},
        {u: frozenset(s) for u, s in y_contacts.items()},
    )


@RuleRegistry.register(RuleId.R5)
def isolated_edge_rule(ctx: RuleContext) -> Optional[Deduction]:
    edges = isolated_n3_edges(ctx)
    if len(edges) < 2:
        return None
    x_contacts, y_contacts = _edge_contacts(ctx, edges)

    def ends(indices):
        return tuple(v for i in sorted(indices) for v in edges[i])

    # near[u] holds edges touched at one end by u, far[u2] edges touched at the
    # other end by u2. `pick` is the position of the near end in (x, y).
    for near, far, pick in ((x_contacts, y_contacts, 0), (y_contacts, x_contacts, 1)):
        for u in sorted(near):
            shared_by = {u2: near[u] & far[u2] for u2 in sorted(far)}
            for u2, shared in shared_by.items():
                if len(shared) >= 3:
                    return Deduction(witness=(u, u2) + ends(shared), infeasible=True)
            pairs = [(u2, s) for u2, s in shared_by.items() if len(s) == 2]
            for (u2, s2), (u3, s3) in itertools.combinations(pairs, 2):
                if not s2 & s3:
                    return Deduction(
                        witness=(u, u2, u3) + ends(s2 | s3), infeasible=True
                    )
            for u2, s2 in pairs:
                rest = sorted(near[u] - s2)
                if rest:
                    edge = edges[rest[0]]
                    return Deduction(
                        forced=(edge[1 - pick],),
                        excluded=(edge[pick],),
                        witness=(u, u2) + ends(s2) + edge,
                    )
    return None


@RuleRegistry.register_branching(RuleId.B1)
def p3_midpoint_branch(
    ctx: RuleContext,
) -> Optional[Tuple[List[Alternative], Tuple[int, ...]]]:
    g = ctx.g
    n3 = sorted(ctx.level(3))
    for s in n3:
        if not ctx.state.is_free(s):
            continue
        nbrs = [w for w in g.neighbors(s) if ctx.at(w, 3, 4)]
        if len(nbrs) < 2:
            continue
        also_excluded: Tuple[int, ...] = ()
        if ctx.hypothesis:
            # An N_3 P3-midpoint in the solution is the only solution vertex of
            # N_3 on its side.
            also_excluded = tuple(
                v
                for v in n3
                if v != s and g.side[v] is g.side[s] and not ctx.state.is_excluded(v)
            )
        return (
            [Alternative(force=(s,), exclude=also_excluded), Alternative(exclude=(s,))],
            (nbrs[0], s, nbrs[1]),
        )
    return None


@RuleRegistry.register_branching(RuleId.B2)
def p4_branch(
    ctx: RuleContext,
) -> Optional[Tuple[List[Alternative], Tuple[int, ...]]]:
    g = ctx.g
    for a in sorted(ctx.level(3)):
        if not ctx.state.is_free(a):
            continue
        for b in g.neighbors(a):
            if not ctx.at(b, 3, 4):
                continue
            for c in g.neighbors(b):
                if c == a or not ctx.at(c, 3, 4):
                    continue
                for d in g.neighbors(c):
                    if d == b or not ctx.at(d, 3, 4) or g.has_edge(a, d):
                        continue
                    if not ctx.state.is_free(d):
                        continue
                    return (
                        [
                            Alternative(force=(a, d)),
                            Alternative(force=(a,), exclude=(d,)),
                            Alternative(exclude=(a,)),
                        ],
                        (a, b, c, d),
                    )
    return None


@RuleRegistry.register_branching(RuleId.B3)
def paired_edges_branch(
    ctx: RuleContext,
) -> Optional[Tuple[List[Alternative], Tuple[int, ...]]]:
    edges = isolated_n3_edges(ctx)
    if len(edges) < 2:
        return None
    x_contacts, y_contacts = _edge_contacts(ctx, edges)
    for u in sorted(x_contacts):
        for i, j in itertools.combinations(sorted(x_contacts[u]), 2):
            for u2 in sorted(y_contacts):
                if i in y_contacts[u2] and j in y_contacts[u2]:
                    (x1, y1), (x2, y2) = edges[i], edges[j]
                    return (
                        [Alternative(force=(x1, y2)), Alternative(force=(x2, y1))],
                        (u, u2, x1, y1, x2, y2),
                    )
    return None


def propagate(
    g: BipartiteGraph,
    state: StateMap,
    hypothesis: bool = True,
    rule_order: Optional[Sequence[RuleId]] = None,
) -> PropagationResult:
    """
    Applies forcing rules until none makes progress.

    After every productive firing the levels are rebuilt and the scan restarts from
    the first rule. A rule that proves infeasibility, or a deduction that clashes
    with the state, ends the run with an Infeasible result.
    """
    rules = RuleRegistry.forcing_rules(hypothesis, rule_order)
    firings: List[Firing] = []
    while True:
        ctx = RuleContext.build(g, state, hypothesis)
        for rule_id, rule in rules:
            deduction = rule(ctx)
            if deduction is None:
                continue
            if deduction.infeasible:
                logger.debug(f"{rule_id.value} infeasible at {deduction.witness}")
                return PropagationResult.infeasible(
                    rule_id, deduction.witness, firings
                )
            try:
                updated = eds_core.apply_all(
                    state, g, deduction.forced, deduction.excluded
                )
            except Conflict as e:
                logger.debug(f"{rule_id.value} deduction clashes: {e}")
                return PropagationResult.infeasible(
                    rule_id, deduction.witness + e.vertices, firings
                )
            if updated == state:
                continue
            firing = Firing(
                rule_id, deduction.forced, deduction.excluded, deduction.witness
            )
            logger.debug(f"fired {firing.describe()}")
            firings.append(firing)
            state = updated
            break
        else:
            return PropagationResult.reduced(state, firings)


def branch_candidates(
    g: BipartiteGraph, state: StateMap, hypothesis: bool = True
) -> PropagationResult:
    """The first branching structure in scan order, or Reduced when there is none."""
    ctx = RuleContext.build(g, state, hypothesis)
    if ctx.levels is None:
        return PropagationResult.reduced(state)
    for rule_id, rule in RuleRegistry.branching_rules(hypothesis):
        found = rule(ctx)
        if found is None:
            continue
        alternatives, witness = found
        return PropagationResult.branch(rule_id, state, alternatives, witness)
    return PropagationResult.reduced(state)


def partition_h1_h2(
    g: BipartiteGraph, levels: DistanceLevels
) -> Tuple[FrozenSet[int], FrozenSet[int]]:
    """H1 = ((N_2 u N_4) n X) u (N_3 n Y) and H2 = ((N_2 u N_4) n Y) u (N_3 n X)."""
    even = levels.union(2, 4)
    odd = levels.bucket(3)
    h1 = {v for v in even if g.side[v] is Side.X} | {
        v for v in odd if g.side[v] is Side.Y
    }
    h2 = {v for v in even if g.side[v] is Side.Y} | {
        v for v in odd if g.side[v] is Side.X
    }
    return frozenset(h1), frozenset(h2)


def residual_components(
    g: BipartiteGraph, levels: DistanceLevels
) -> List[Tuple[int, ...]]:
    """Components of G[N_2 u N_3 u N_4], each sorted, ordered by smallest member."""
    region = levels.union(2, 3, 4)
    sub = g.to_networkx().subgraph(region)
    return sorted(
        (tuple(sorted(c)) for c in nx.connected_components(sub)), key=lambda c: c[0]
    )


def assert_structural_lemmas(g: BipartiteGraph, state: StateMap) -> AssertionReport:
    """Checks the structure expected after a successful reduction; never mutates."""
    if not state.forced:
        return AssertionReport()
    levels = graph_core.distance_levels(g, state.forced)
    violations: List[Tuple[AssertionId, Tuple[int, ...]]] = []

    deep = sorted(v for i in range(5, levels.depth + 1) for v in levels.bucket(i))
    if deep:
        violations.append((AssertionId.A1, tuple(deep)))

    n3, n4 = levels.bucket(3), levels.bucket(4)
    n4_edge = next(
        ((u, w) for u in sorted(n4) for w in g.neighbors(u) if u < w and w in n4),
        None,
    )
    if n4_edge is not None:
        violations.append((AssertionId.A2, n4_edge))

    n3_touch = next(
        (
            (r, s, t)
            for r in sorted(n3)
            for s in g.neighbors(r)
            if r < s and s in n3
            for t in g.neighbors(r) + g.neighbors(s)
            if t in n4
        ),
        None,
    )
    if n3_touch is not None:
        violations.append((AssertionId.A3, n3_touch))

    alternating = ((2, 3) * 3, (3, 2) * 3)
    for witness in pattern_detect.iter_induced_paths(g, 6, levels.union(2, 3)):
        if tuple(levels.at(v) for v in witness.vertices) in alternating:
            violations.append((AssertionId.A4, witness.vertices))
            break

    components = residual_components(g, levels)
    for comp in components:
        bad = _same_side_distance_violation(g, n3, comp)
        if bad is not None:
            violations.append((AssertionId.A5, bad))
            break

    for comp in components:
        free, witness = pattern_detect.is_p8_free(g, comp)
        if not free:
            violations.append((AssertionId.A6, witness.vertices))
            break

    return AssertionReport(tuple(violations))


def _same_side_distance_violation(
    g: BipartiteGraph, n3: FrozenSet[int], comp: Sequence[int]
) -> Optional[Tuple[int, int]]:
    sub = g.to_networkx().subgraph(comp)
    members = sorted(v for v in comp if v in n3)
    for w, w2 in itertools.combinations(members, 2):
        if g.side[w] is not g.side[w2]:
            continue
        if nx.shortest_path_length(sub, w, w2) not in (2, 4):
            return (w, w2)
    return None
