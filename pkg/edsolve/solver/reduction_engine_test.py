import numpy as np
import pytest

from edsolve.graph import graph_core
from edsolve.graph import pattern_detect
from edsolve.solver import eds_core
from edsolve.solver import oracle
from edsolve.solver import reduction_engine as engine
from edsolve.solver.eds_core import StateMap
from edsolve.solver.reduction_engine import AssertionId
from edsolve.solver.reduction_engine import ResultKind
from edsolve.solver.reduction_engine import RuleId
from edsolve.tools import harness


def _path(n):
    return graph_core.from_edge_list(n, [(i, i + 1) for i in range(n - 1)])


def _forced(g, *vertices):
    return eds_core.apply_all(StateMap.empty(g.n), g, forced=vertices)


def _random_bipartite(rng, max_n):
    n = int(rng.integers(2, max_n + 1))
    nx_count = int(rng.integers(1, n))
    p = float(rng.choice([0.2, 0.3, 0.4]))
    edges = [
        (x, y) for x in range(nx_count) for y in range(nx_count, n) if rng.random() < p
    ]
    return graph_core.from_edge_list(n, edges)


def _random_states(seed, count, max_n=11):
    """Random graphs with one random vertex forced."""
    rng = np.random.default_rng(seed)
    for _ in range(count):
        g = _random_bipartite(rng, max_n)
        yield g, _forced(g, int(rng.integers(g.n)))


def _solutions(g, state):
    return {s.vertices for s in oracle.oracle_enumerate(g, restrict=state)}


def _pair_states(count, seed):
    """(graph, state) with a (v2, v5) pair of an induced P6 or C6 forced."""
    for _, g in harness.compare_instances(count, seed=seed, max_n=12):
        if g is None:
            continue
        pairs = {
            frozenset((w.vertices[1], w.vertices[4]))
            for w in pattern_detect.iter_induced_paths(g, 6)
        }
        for w in pattern_detect.iter_induced_c6(g):
            v = w.vertices
            pairs.update(frozenset((v[i], v[i + 3])) for i in range(3))
        for pair in sorted(tuple(sorted(p)) for p in pairs):
            yield g, _forced(g, *pair)


# Three N_3 edges between N_2 vertices 2 and 5: 2 touches 6, 7, 8 and 5 touches
# 9, 10, 11. Basis {0, 3}.
_THREE_EDGES = [
    (0, 1), (1, 2), (3, 4), (4, 5),
    (2, 6), (2, 7), (2, 8),
    (6, 9), (7, 10), (8, 11),
    (5, 9), (5, 10), (5, 11),
]  # fmt: skip


# Crossing N_3 edges 6-8 and 7-9 between N_2 vertices 2 and 5. Basis {0, 3}.
_CROSSING_EDGES = [
    (0, 1), (1, 2), (3, 4), (4, 5),
    (2, 6), (2, 7), (6, 8), (7, 9), (5, 8), (5, 9),
]  # fmt: skip


def test_p6_pair_is_reduced_immediately():
    g = _path(6)
    state = _forced(g, 1, 4)
    result = engine.propagate(g, state)
    assert result.kind is ResultKind.REDUCED
    assert result.state == state
    assert result.firings == ()
    assert engine.branch_candidates(g, state).kind is ResultKind.REDUCED


def test_single_n3_dominator_is_forced():
    g = _path(4)
    result = engine.propagate(g, _forced(g, 0))
    assert result.kind is ResultKind.REDUCED
    assert result.state.forced == (0, 3)
    assert [f.rule for f in result.firings] == [RuleId.R2]
    assert result.firings[0].forced == (3,)


def test_n2_vertex_without_dominator_is_infeasible():
    g = _path(4)
    state = eds_core.exclude(_forced(g, 0), g, 3)
    result = engine.propagate(g, state)
    assert result.kind is ResultKind.INFEASIBLE
    assert result.rule is RuleId.R1
    assert result.witness == (2,)


def test_two_leaves_force_their_neighbour():
    g = graph_core.from_edge_list(4, [(0, 1), (0, 2), (0, 3)])
    result = engine.propagate(g, StateMap.empty(g.n))
    assert result.kind is ResultKind.REDUCED
    assert result.state.forced == (0,)
    assert result.firings[0].rule is RuleId.R0


def test_self_dominating_n3_vertices_sharing_a_neighbour():
    g = graph_core.from_edge_list(5, [(0, 1), (1, 2), (2, 3), (2, 4)])
    result = engine.propagate(g, _forced(g, 0), rule_order=[RuleId.R3])
    assert result.kind is ResultKind.INFEASIBLE
    assert result.rule is RuleId.R3
    assert result.witness == (3, 4, 2)
    # The full rule set reaches the same verdict through the leaf rule.
    assert engine.propagate(g, _forced(g, 0)).kind is ResultKind.INFEASIBLE
    assert oracle.oracle_solve(g, restrict=_forced(g, 0)).solution is None


def test_p4_rule_needs_hypothesis():
    g = _path(6)
    state = _forced(g, 0)
    result = engine.propagate(g, state, rule_order=[RuleId.R4])
    assert result.kind is ResultKind.REDUCED
    (firing,) = result.firings
    assert firing.rule is RuleId.R4
    assert firing.forced == (4,) and firing.excluded == (3,)
    assert firing.witness == (2, 3, 4, 5)

    plain = engine.propagate(g, state, hypothesis=False, rule_order=[RuleId.R4])
    assert plain.firings == ()
    assert engine.RuleRegistry.is_hypothesis_only(RuleId.R4)
    assert not engine.RuleRegistry.is_hypothesis_only(RuleId.R2)


def test_unknown_rule_order_entry():
    with pytest.raises(KeyError):
        engine.propagate(_path(4), StateMap.empty(4), rule_order=[RuleId.B1])


def test_three_crossing_edges_are_infeasible():
    g = graph_core.from_edge_list(12, _THREE_EDGES)
    state = _forced(g, 0, 3)
    result = engine.propagate(g, state)
    assert result.kind is ResultKind.INFEASIBLE
    assert result.rule is RuleId.R5
    assert oracle.oracle_solve(g, restrict=state).solution is None


def test_two_shared_edges_settle_the_third():
    edges = [e for e in _THREE_EDGES if e != (5, 11)] + [(4, 12), (12, 11)]
    g = graph_core.from_edge_list(13, edges)
    state = _forced(g, 0, 3)
    result = engine.propagate(g, state, rule_order=[RuleId.R5])
    assert result.kind is ResultKind.REDUCED
    (firing,) = result.firings
    assert firing.rule is RuleId.R5
    assert firing.forced == (11,) and firing.excluded == (8,)
    for solution in _solutions(g, state):
        assert 11 in solution and 8 not in solution


def test_crossing_edge_pair_branches_two_ways():
    g = graph_core.from_edge_list(10, _CROSSING_EDGES)
    state = _forced(g, 0, 3)
    reduced = engine.propagate(g, state)
    assert reduced.kind is ResultKind.REDUCED
    result = engine.branch_candidates(g, reduced.state)
    assert result.kind is ResultKind.BRANCH
    assert result.rule is RuleId.B3
    assert {frozenset(a.force) for a in result.alternatives} == {
        frozenset({6, 9}),
        frozenset({7, 8}),
    }
    assert _solutions(g, state) == {(0, 3, 6, 9), (0, 3, 7, 8)}


def test_p3_midpoint_branch_excludes_same_side_under_hypothesis():
    # 3 is an N_3 midpoint of 4-3-5; 6 is another N_3 vertex on the side of 3.
    edges = [(0, 1), (1, 2), (2, 3), (3, 4), (3, 5), (1, 7), (7, 6), (6, 8)]
    g = graph_core.from_edge_list(9, edges)
    state = _forced(g, 0)
    ctx = engine.RuleContext.build(g, state, hypothesis=True)
    alternatives, witness = engine.p3_midpoint_branch(ctx)
    assert witness == (4, 3, 5)
    assert alternatives[0].force == (3,)
    assert alternatives[0].exclude == (6,)
    assert alternatives[1] == engine.Alternative(exclude=(3,))

    ctx = engine.RuleContext.build(g, state, hypothesis=False)
    alternatives, _ = engine.p3_midpoint_branch(ctx)
    assert alternatives[0].exclude == ()


def test_reduction_preserves_solutions_in_any_rule_order():
    rng = np.random.default_rng(53)
    orders = [
        None,
        [RuleId.R5, RuleId.R3, RuleId.R2, RuleId.R1, RuleId.R0],
        [RuleId.R3, RuleId.R0, RuleId.R5, RuleId.R1, RuleId.R2],
    ]
    for g, state in _random_states(seed=59, count=80):
        expected = _solutions(g, state)
        for order in orders:
            if order is not None:
                order = [order[i] for i in rng.permutation(len(order))]
            result = engine.propagate(g, state, hypothesis=False, rule_order=order)
            if result.kind is ResultKind.INFEASIBLE:
                assert not expected, g.edges()
            else:
                assert _solutions(g, result.state) == expected, g.edges()


def test_hypothesis_reduction_preserves_solutions_in_any_rule_order():
    # R4 stays behind R0 to R3: it assumes every N_2 vertex has two candidates.
    rng = np.random.default_rng(71)
    first = [RuleId.R0, RuleId.R1, RuleId.R2, RuleId.R3]
    checked = 0
    for g, state in _pair_states(count=30, seed=73):
        expected = _solutions(g, state)
        for r5_at in (0, 2, 5):
            order = [first[i] for i in rng.permutation(len(first))] + [RuleId.R4]
            order.insert(r5_at, RuleId.R5)
            result = engine.propagate(g, state, hypothesis=True, rule_order=order)
            if result.kind is ResultKind.INFEASIBLE:
                assert not expected, (g.edges(), state.forced)
            else:
                kept = _solutions(g, result.state)
                assert kept == expected, (g.edges(), state.forced)
            checked += 1
    assert checked > 0


def test_reduced_states_have_supplied_levels():
    for g, state in _random_states(seed=61, count=80, max_n=14):
        result = engine.propagate(g, state, hypothesis=False)
        if result.kind is not ResultKind.REDUCED:
            continue
        ctx = engine.RuleContext.build(g, result.state, hypothesis=False)
        for u in ctx.level(2):
            assert len(ctx.alive_neighbors(u, 3)) >= 2
        for w in ctx.level(3):
            assert ctx.alive_neighbors(w, 3, 4)


def _branch_states(hypothesis):
    g = graph_core.from_edge_list(10, _CROSSING_EDGES)
    states = [(g, _forced(g, 0, 3))]
    states.extend(_pair_states(count=40, seed=67))
    for g, state in states:
        reduced = engine.propagate(g, state, hypothesis=hypothesis)
        if reduced.kind is not ResultKind.REDUCED:
            continue
        result = engine.branch_candidates(g, reduced.state, hypothesis=hypothesis)
        if result.kind is ResultKind.BRANCH:
            yield g, reduced.state, result.alternatives


def _alternative_solutions(g, state, alternative):
    try:
        return _solutions(g, alternative.apply(state, g))
    except eds_core.Conflict:
        return set()


def test_branch_alternatives_split_the_solutions():
    seen = 0
    for g, state, alternatives in _branch_states(hypothesis=False):
        seen += 1
        expected = _solutions(g, state)
        parts = [_alternative_solutions(g, state, a) for a in alternatives]
        assert set().union(*parts) == expected, g.edges()
        assert sum(len(p) for p in parts) == len(expected), g.edges()
    assert seen > 0


def _admits(alternative, solution):
    return set(alternative.force) <= set(solution) and not set(
        alternative.exclude
    ) & set(solution)


def test_hypothesis_alternatives_are_exclusive():
    seen = 0
    for g, state, alternatives in _branch_states(hypothesis=True):
        seen += 1
        for solution in _solutions(g, state):
            assert sum(_admits(a, solution) for a in alternatives) <= 1, g.edges()
    assert seen > 0


def test_p4_branch_is_a_complete_three_way_split():
    # 3-4-5-6 runs through N_3 and N_4 of basis {0}; 5 is also adjacent to 2.
    edges = [(0, 1), (1, 2), (2, 3), (3, 4), (4, 5), (2, 5), (5, 6)]
    g = graph_core.from_edge_list(7, edges)
    state = _forced(g, 0)
    ctx = engine.RuleContext.build(g, state, hypothesis=True)
    alternatives, witness = engine.p4_branch(ctx)
    assert witness == (3, 4, 5, 6)
    assert alternatives == [
        engine.Alternative(force=(3, 6)),
        engine.Alternative(force=(3,), exclude=(6,)),
        engine.Alternative(exclude=(3,)),
    ]
    expected = _solutions(g, state)
    assert expected == {(0, 3, 6)}
    parts = [_alternative_solutions(g, state, a) for a in alternatives]
    assert parts == [{(0, 3, 6)}, set(), set()]


def test_partition_h1_h2():
    g = _path(8)
    levels = graph_core.distance_levels(g, [0])
    h1, h2 = engine.partition_h1_h2(g, levels)
    assert h1 == {2, 3, 4}
    assert h2 == frozenset()

    for g, state in _random_states(seed=71, count=30):
        levels = graph_core.distance_levels(g, state.forced)
        h1, h2 = engine.partition_h1_h2(g, levels)
        assert not h1 & h2
        assert h1 | h2 == levels.union(2, 3, 4)


def test_assertions_quiet_on_p6_pair():
    g = _path(6)
    assert engine.assert_structural_lemmas(g, _forced(g, 1, 4)).ok
    assert engine.assert_structural_lemmas(g, StateMap.empty(6)).ok


def test_assertion_deep_level():
    g = _path(6)
    report = engine.assert_structural_lemmas(g, _forced(g, 0))
    assert (AssertionId.A1, (5,)) in report.violations


def test_assertion_n4_edge():
    g = _path(10)
    report = engine.assert_structural_lemmas(g, _forced(g, 0, 9))
    assert report.violations == ((AssertionId.A2, (4, 5)),)
    assert report.describe() == ["A2:4 5"]


def test_assertions_on_long_alternating_residual():
    # Hub 1 joins every second vertex of the path 2..9 to the basis {0}.
    edges = [(0, 1), (1, 2), (1, 4), (1, 6), (1, 8)] + [(i, i + 1) for i in range(2, 9)]
    g = graph_core.from_edge_list(10, edges)
    report = engine.assert_structural_lemmas(g, _forced(g, 0))
    ids = report.ids()
    assert AssertionId.A4 in ids
    assert (AssertionId.A5, (3, 9)) in report.violations
    witness = dict(report.violations)[AssertionId.A6]
    assert pattern_detect.validate_witness(
        g, pattern_detect.InducedWitness(pattern_detect.PatternKind.PATH, witness)
    )


def test_firing_describe():
    firing = engine.Firing(RuleId.R4, forced=(4,), excluded=(3,))
    assert firing.describe() == "R4 +4 -3"
