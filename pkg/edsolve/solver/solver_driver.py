"""
Efficient domination on S(1,1,5)-free bipartite graphs, one component at a time.

Every component is tried in this order and the first verified answer wins:

  singleton: a vertex adjacent to the rest of the component.
  Branch A:  the solution avoids every P4 midpoint.
  Branch B:  two solution vertices sit at positions 2 and 5 of an induced P6 or
             C6; each such pair is taken as a hypothesis and reduced with the
             rules of `reduction_engine`.
  Branch C:  no such pair exists, so every induced P8 has its second and seventh
             vertex in the solution and no induced P7 has its third or fifth.

What the rules leave undominated is covered by the exact oracle, component by
component. Answers are verified before they are returned, so `solve` is sound on
any bipartite input; completeness is only promised for S(1,1,5)-free graphs.
"""

import dataclasses
import enum
import itertools
import logging
from typing import Iterator, List, Optional, Sequence, Set, Tuple

import dataclasses_json

from edsolve.errors import EdsError
from edsolve.graph import graph_core
from edsolve.graph import pattern_detect
from edsolve.graph.graph_core import BipartiteGraph
from edsolve.graph.pattern_detect import InducedWitness
from edsolve.solver import eds_core
from edsolve.solver import oracle
from edsolve.solver import reduction_engine as engine
from edsolve.solver.eds_core import Conflict
from edsolve.solver.eds_core import EdsSolution
from edsolve.solver.eds_core import Label
from edsolve.solver.eds_core import StateMap
from edsolve.solver.reduction_engine import AssertionId
from edsolve.solver.reduction_engine import Firing
from edsolve.solver.reduction_engine import ResultKind
from edsolve.solver.solver_config import SolverConfig

logger = logging.getLogger(__name__)

FORCE = "force"
EXCLUDE = "exclude"


class NotS115Free(EdsError):
    def __init__(self, witness: InducedWitness):
        self.witness = witness
        super().__init__(
            f"graph contains an induced S(1,1,5): {' '.join(map(str, witness.vertices))}"
        )


class BranchLabel(str, enum.Enum):
    SINGLETON = "singleton"
    A = "A"
    B = "B"
    C = "C"
    ORACLE = "oracle"
    NONE = "none"


@dataclasses.dataclass
class TraceStep(dataclasses_json.DataClassJsonMixin):
    op: str
    vertex: int


@dataclasses.dataclass
class ComponentTrace(dataclasses_json.DataClassJsonMixin):
    component_id: int
    vertices: List[int]
    branch: BranchLabel
    # All ids below are ids of the input graph.
    candidate: Optional[List[int]] = None
    rules_fired: List[str] = dataclasses.field(default_factory=list)
    steps: List[TraceStep] = dataclasses.field(default_factory=list)
    solution: Optional[List[int]] = None
    assertions: List[str] = dataclasses.field(default_factory=list)

    @property
    def solved(self) -> bool:
        return self.solution is not None


@dataclasses.dataclass
class SolveTrace(dataclasses_json.DataClassJsonMixin):
    n: int
    components: List[ComponentTrace] = dataclasses.field(default_factory=list)
    s115_witness: Optional[List[int]] = None


@dataclasses.dataclass
class SolveResult(dataclasses_json.DataClassJsonMixin):
    solution: Optional[EdsSolution]
    trace: SolveTrace


@dataclasses.dataclass
class CompareReport(dataclasses_json.DataClassJsonMixin):
    n: int
    m: int
    driver: Optional[List[int]]
    oracle: Optional[List[int]]
    driver_valid: bool
    agree: bool
    branches: List[str] = dataclasses.field(default_factory=list)
    # Number of distinct e.d.s., for graphs of at most oracle_count_cap vertices
    solutions: Optional[int] = None


@dataclasses.dataclass(frozen=True)
class _Leaf:
    state: StateMap
    firings: Tuple[Firing, ...]


@dataclasses.dataclass(frozen=True)
class _Attempt:
    """A verified component solution, in component-local ids."""

    branch: BranchLabel
    solution: Tuple[int, ...]
    steps: Tuple[Tuple[str, int], ...]
    firings: Tuple[Firing, ...] = ()
    candidate: Optional[Tuple[int, ...]] = None
    assertions: Tuple[str, ...] = ()

    def to_trace(self, component_id: int, ids: Sequence[int]) -> ComponentTrace:
        return ComponentTrace(
            component_id=component_id,
            vertices=list(ids),
            branch=self.branch,
            candidate=[ids[v] for v in self.candidate] if self.candidate else None,
            rules_fired=[f.describe() for f in self.firings],
            steps=[TraceStep(op, ids[v]) for op, v in self.steps],
            solution=sorted(ids[v] for v in self.solution),
            assertions=list(self.assertions),
        )


def _steps(
    forced: Sequence[int] = (), excluded: Sequence[int] = ()
) -> Tuple[Tuple[str, int], ...]:
    return tuple((FORCE, v) for v in forced) + tuple((EXCLUDE, v) for v in excluded)


def _firing_steps(firings: Sequence[Firing]) -> Tuple[Tuple[str, int], ...]:
    return tuple(step for f in firings for step in _steps(f.forced, f.excluded))


def iter_reduced_leaves(
    g: BipartiteGraph, state: StateMap, hypothesis: bool, depth_cap: int
) -> Iterator[_Leaf]:
    """
    Depth-first over propagate / branch_candidates, first alternative first.

    Yields every state where no forcing and no branching rule applies. A state at
    the depth cap is yielded as it is and left to the residual oracle.
    """
    stack: List[Tuple[StateMap, Tuple[Firing, ...], int]] = [(state, (), 0)]
    while stack:
        state, firings, depth = stack.pop()
        result = engine.propagate(g, state, hypothesis)
        firings = firings + result.firings
        if result.kind is ResultKind.INFEASIBLE:
            logger.debug(f"infeasible by {result.rule.value} at {result.witness}")
            continue
        assert result.state is not None
        split = engine.branch_candidates(g, result.state, hypothesis)
        if split.kind is ResultKind.REDUCED:
            yield _Leaf(result.state, firings)
            continue
        assert split.rule is not None
        if depth >= depth_cap:
            logger.warning(
                f"branch depth cap {depth_cap} reached at {split.rule.value} {split.witness}"
            )
            yield _Leaf(result.state, firings)
            continue
        children = []
        for alternative in split.alternatives:
            try:
                child = alternative.apply(result.state, g)
            except Conflict:
                continue
            logger.debug(
                f"entering {split.rule.value} +{alternative.force} -{alternative.exclude}"
            )
            choice = Firing(
                split.rule, alternative.force, alternative.exclude, split.witness
            )
            children.append((child, firings + (choice,), depth + 1))
        stack.extend(reversed(children))


def solve_residual(
    g: BipartiteGraph, state: StateMap, size_cap: int = oracle.DEFAULT_SIZE_CAP
) -> Optional[Tuple[int, ...]]:
    """
    The Forced vertices plus an exact cover of everything they leave undominated.

    Each component of the undominated part is solved separately. A vertex adjacent
    to a dominated vertex can never join the solution, so it is excluded there.
    """
    dominated, residual = eds_core.settled_and_residual(state, g)
    chosen = list(state.forced)
    if not residual:
        return tuple(sorted(chosen))
    rest, rest_ids = g.induced_subgraph(residual)
    for members in graph_core.components(rest).members:
        h, local_ids = rest.induced_subgraph(members)
        ids = [rest_ids[v] for v in local_ids]
        restrict = StateMap(
            tuple(
                Label.EXCLUDED
                if state.is_excluded(v) or g.neighbor_set(v) & dominated
                else Label.FREE
                for v in ids
            )
        )
        found = oracle.oracle_first(h, restrict, size_cap=size_cap).solution
        if found is None:
            return None
        chosen.extend(ids[v] for v in found)
    return tuple(sorted(chosen))


class ComponentSolver:
    def __init__(self, g: BipartiteGraph, config: SolverConfig):
        self.g = g
        self.config = config

    def solve(self) -> Optional[_Attempt]:
        stages = [(BranchLabel.SINGLETON, self.singleton)]
        if self.config.enable_branch_a:
            stages.append((BranchLabel.A, self.branch_a))
        if self.config.enable_branch_b:
            stages.append((BranchLabel.B, self.branch_b))
        if self.config.enable_branch_c:
            stages.append((BranchLabel.C, self.branch_c))
        for label, stage in stages:
            attempt = stage()
            if attempt is not None:
                logger.info(
                    f"component of {self.g.n} vertices solved by {label.value}"
                )
                return attempt
            logger.debug(f"{label.value} failed")
        return None

    def _finish(
        self,
        branch: BranchLabel,
        state: StateMap,
        steps: Tuple[Tuple[str, int], ...],
        firings: Tuple[Firing, ...] = (),
        candidate: Optional[Tuple[int, ...]] = None,
        assertions: Tuple[str, ...] = (),
    ) -> Optional[_Attempt]:
        solution = solve_residual(self.g, state, self.config.oracle_size_cap)
        if solution is None:
            return None
        report = eds_core.verify(self.g, solution)
        if not report.valid:
            logger.debug(f"{branch.value} produced an invalid set: {report.violation}")
            return None
        basis = state.basis
        steps = (
            steps
            + _firing_steps(firings)
            + _steps(tuple(v for v in solution if v not in basis))
        )
        return _Attempt(branch, solution, steps, firings, candidate, assertions)

    def singleton(self) -> Optional[_Attempt]:
        for v in range(self.g.n):
            if self.g.degree(v) == self.g.n - 1:
                return _Attempt(BranchLabel.SINGLETON, (v,), _steps((v,)))
        return None

    def branch_a(self) -> Optional[_Attempt]:
        midpoints, endpoints = pattern_detect.p4_structure(self.g)
        # An endpoint that is also a midpoint of another P4 is excluded, not forced.
        forced = sorted(endpoints - midpoints)
        excluded = sorted(midpoints)
        try:
            state = eds_core.apply_all(
                StateMap.empty(self.g.n), self.g, forced, excluded
            )
        except Conflict as e:
            logger.debug(f"A: P4 endpoints clash: {e}")
            return None
        result = engine.propagate(self.g, state, hypothesis=False)
        if result.kind is ResultKind.INFEASIBLE:
            return None
        assert result.state is not None
        return self._finish(
            BranchLabel.A, result.state, _steps(forced, excluded), result.firings
        )

    def hypotheses(self) -> Iterator[Tuple[InducedWitness, Tuple[int, int]]]:
        """(witness, (v2, v5)) for induced P6 then C6, each unordered pair once."""
        seen = set()
        p6 = (
            (w, [(w.vertices[1], w.vertices[4])])
            for w in pattern_detect.iter_induced_paths(self.g, 6)
        )
        c6 = (
            (w, [(w.vertices[i], w.vertices[i + 3]) for i in (1, 2, 0)])
            for w in pattern_detect.iter_induced_c6(self.g)
        )
        for witness, pairs in itertools.chain(p6, c6):
            for pair in pairs:
                key = frozenset(pair)
                if key in seen:
                    continue
                seen.add(key)
                yield witness, pair

    def branch_b(self) -> Optional[_Attempt]:
        candidates = itertools.islice(self.hypotheses(), self.config.max_candidates)
        for witness, pair in candidates:
            logger.debug(f"B: trying {pair} from {witness.name} {witness.vertices}")
            state = eds_core.apply_all(StateMap.empty(self.g.n), self.g, pair)
            leaves = iter_reduced_leaves(
                self.g,
                state,
                hypothesis=self.config.hypothesis_rules,
                depth_cap=self.config.branch_depth_cap,
            )
            for leaf in leaves:
                assertions: Tuple[str, ...] = ()
                if self.config.assert_lemmas:
                    report = engine.assert_structural_lemmas(self.g, leaf.state)
                    if not report.ok:
                        assertions = tuple(report.describe())
                        logger.warning(
                            f"structural checks failed under {pair}: {assertions}"
                        )
                        if self.config.strict and AssertionId.A6 in report.ids():
                            continue
                attempt = self._finish(
                    BranchLabel.B,
                    leaf.state,
                    _steps(pair),
                    leaf.firings,
                    witness.vertices,
                    assertions,
                )
                if attempt is not None:
                    return attempt
        return None

    def p8_and_p7_structure(self) -> Tuple[List[int], List[int]]:
        """
        (forced, excluded) when no solution has a (v2, v5) pair: the second and
        seventh vertex of every induced P8 are in, its four middle vertices and the
        third and fifth vertex of every induced P7 are out.
        """
        forced: Set[int] = set()
        excluded: Set[int] = set()
        for witness in pattern_detect.iter_induced_paths(self.g, 8):
            v = witness.vertices
            forced.update((v[1], v[6]))
            excluded.update(v[2:6])
        for witness in pattern_detect.iter_induced_paths(self.g, 7):
            excluded.update((witness.vertices[2], witness.vertices[4]))
        return sorted(forced), sorted(excluded)

    def branch_c(self) -> Optional[_Attempt]:
        # Only reached after the singleton stage, so every solution has two or more
        # vertices.
        forced, excluded = self.p8_and_p7_structure()
        try:
            state = eds_core.apply_all(
                StateMap.empty(self.g.n), self.g, forced, excluded
            )
        except Conflict as e:
            logger.debug(f"C: P8/P7 forcings clash: {e}")
            return None
        steps = _steps(forced, excluded)
        result = engine.propagate(self.g, state, hypothesis=False)
        if result.kind is ResultKind.INFEASIBLE:
            return None
        assert result.state is not None
        attempt = self._finish(BranchLabel.C, result.state, steps, result.firings)
        if attempt is None:
            return None
        if self.config.check_branch_c_consistency:
            pattern = pattern_detect.find_2d_pair_pattern(self.g, attempt.solution)
            if pattern is not None:
                logger.debug(f"C: solution contains {pattern.name} {pattern.vertices}")
                return None
        return attempt


def _oracle_attempt(g: BipartiteGraph, config: SolverConfig) -> Optional[_Attempt]:
    found = oracle.oracle_first(g, size_cap=config.oracle_size_cap).solution
    if found is None:
        return None
    logger.info(f"component of {g.n} vertices solved by the oracle fallback")
    return _Attempt(BranchLabel.ORACLE, found.vertices, _steps(found.vertices))


def solve(g: BipartiteGraph, config: Optional[SolverConfig] = None) -> SolveResult:
    """
    Some efficient dominating set of g, or None when the case analysis finds none.

    Raises NotS115Free in strict mode when g has an induced S(1,1,5). In permissive
    mode such an input is solved without the hypothesis-only rules, and with
    `oracle_fallback` every component left unsolved goes to the oracle whole.
    """
    config = config or SolverConfig()
    trace = SolveTrace(n=g.n)
    witness = pattern_detect.find_s115(g)
    if witness is not None:
        if config.strict:
            raise NotS115Free(witness)
        logger.warning(
            f"input has an induced S(1,1,5) {witness.vertices}; "
            "hypothesis-only rules are off"
        )
        trace.s115_witness = list(witness.vertices)
        if config.hypothesis_rules:
            config = dataclasses.replace(config, hypothesis_rules=False)

    chosen: List[int] = []
    for component_id, members in enumerate(graph_core.components(g).members):
        h, ids = g.induced_subgraph(members)
        attempt = ComponentSolver(h, config).solve()
        if attempt is None and witness is not None and config.oracle_fallback:
            attempt = _oracle_attempt(h, config)
        if attempt is None:
            logger.info(f"component {component_id} ({h.n} vertices) has no e.d.s.")
            trace.components.append(
                ComponentTrace(component_id, list(ids), BranchLabel.NONE)
            )
            return SolveResult(solution=None, trace=trace)
        trace.components.append(attempt.to_trace(component_id, ids))
        chosen.extend(ids[v] for v in attempt.solution)

    solution = EdsSolution.of(chosen)
    assert eds_core.verify(g, solution).valid, "component solutions do not combine"
    return SolveResult(solution=solution, trace=trace)


def replay(g: BipartiteGraph, trace: ComponentTrace) -> StateMap:
    """Reapplies the recorded steps of one component on g, from an empty state."""
    state = StateMap.empty(g.n)
    for step in trace.steps:
        if step.op == FORCE:
            state = eds_core.force(state, g, step.vertex)
        else:
            state = eds_core.exclude(state, g, step.vertex)
    return state


def solve_compare(
    g: BipartiteGraph, config: Optional[SolverConfig] = None
) -> CompareReport:
    config = config or SolverConfig()
    result = solve(g, config)
    driver = result.solution
    reference = oracle.oracle_solve(
        g, heuristic=config.oracle_heuristic, size_cap=config.oracle_size_cap
    ).solution
    driver_valid = driver is None or eds_core.verify(g, driver).valid
    if reference is not None:
        assert eds_core.verify(g, reference).valid
    solutions = None
    if g.n <= config.oracle_count_cap:
        solutions = oracle.oracle_count(g, cap=config.oracle_count_cap)
    return CompareReport(
        n=g.n,
        m=g.m,
        driver=list(driver.vertices) if driver is not None else None,
        oracle=list(reference.vertices) if reference is not None else None,
        driver_valid=driver_valid,
        agree=driver_valid and (driver is None) == (reference is None),
        branches=[c.branch.value for c in result.trace.components],
        solutions=solutions,
    )
