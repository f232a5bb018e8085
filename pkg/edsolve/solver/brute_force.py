"""Test-only ground truth: tries every vertex subset. Keep n small."""

from typing import List, Optional, Tuple

from edsolve.graph.graph_core import BipartiteGraph

MAX_BRUTE_FORCE_N = 18


def all_efficient_dominating_sets(g: BipartiteGraph) -> List[Tuple[int, ...]]:
    """Every e.d.s. of g as a sorted tuple, in lexicographic order."""
    assert g.n <= MAX_BRUTE_FORCE_N, f"brute force refuses n={g.n}"
    closed = [
        (1 << v) | sum(1 << w for w in g.neighbors(v)) for v in range(g.n)
    ]
    full = (1 << g.n) - 1
    found = []
    for mask in range(1 << g.n):
        covered = 0
        ok = True
        for v in range(g.n):
            if mask >> v & 1:
                if covered & closed[v]:
                    ok = False
                    break
                covered |= closed[v]
        if ok and covered == full:
            found.append(tuple(v for v in range(g.n) if mask >> v & 1))
    return sorted(found)


def smallest_efficient_dominating_set(g: BipartiteGraph) -> Optional[Tuple[int, ...]]:
    found = all_efficient_dominating_sets(g)
    return found[0] if found else None
