"""
Seeded instance generators.

All randomness comes from `numpy.random.default_rng(seed)` (PCG64). Edge draws are
taken for every X-Y pair in X-major order, so the same GenSpec always produces the
same graph.
"""

import dataclasses
import enum
import logging
from typing import List, Optional, Tuple

import numpy as np
import simple_parsing
from simple_parsing import helpers

from edsolve.errors import EdsError
from edsolve.graph import graph_core
from edsolve.graph import pattern_detect
from edsolve.graph.graph_core import BipartiteGraph
from edsolve.solver import eds_core
from edsolve.solver.eds_core import EdsSolution

logger = logging.getLogger(__name__)

FAMILIES = ("path", "cycle", "star", "complete_bipartite", "spider115")


class BadParameter(EdsError, ValueError):
    pass


class TriesExhausted(EdsError):
    def __init__(self, tries: int):
        self.tries = tries
        super().__init__(f"no S(1,1,5)-free graph found in {tries} tries")


class GenKind(str, enum.Enum):
    RANDOM = "random"
    S115FREE = "s115free"
    PLANTED = "planted"
    FAMILY = "family"


@dataclasses.dataclass
class GenSpec(helpers.Serializable):
    kind: str = simple_parsing.choice(*(k.value for k in GenKind), default="random")
    """Which generator to run."""
    nx: int = 5
    """Number of X vertices (random, s115free)."""
    ny: int = 5
    """Number of Y vertices (random, s115free)."""
    p: float = 0.3
    """Edge probability per X-Y pair (random, s115free)."""
    nd: int = 3
    """Planted solution size (planted)."""
    spread: int = 2
    """Private neighbours of every planted vertex (planted)."""
    extra_p: float = 0.1
    """Probability of each allowed extra edge between non-solution vertices (planted)."""
    family: str = simple_parsing.choice(*FAMILIES, default="path")
    """Named family (family)."""
    n: int = 6
    """Vertex count of the family graph (family)."""
    seed: int = 0
    max_tries: int = 1000
    """Rejection sampling budget (s115free)."""

    def __post_init__(self):
        try:
            self.kind = GenKind(self.kind).value
        except ValueError:
            raise BadParameter(f"unknown generator kind {self.kind!r}")
        for name in ("p", "extra_p"):
            value = getattr(self, name)
            if not 0.0 <= value <= 1.0:
                raise BadParameter(f"{name} must be in [0, 1], got {value}")
        for name in ("nx", "ny", "spread", "n", "max_tries"):
            if getattr(self, name) < 0:
                raise BadParameter(f"{name} must be non-negative")
        if self.nd < 1:
            raise BadParameter(f"nd must be at least 1, got {self.nd}")

    @property
    def gen_kind(self) -> GenKind:
        return GenKind(self.kind)


def _check_probability(p: float) -> None:
    if not 0.0 <= p <= 1.0:
        raise BadParameter(f"probability must be in [0, 1], got {p}")


def _sample(
    rng: np.random.Generator, nx: int, ny: int, p: float
) -> BipartiteGraph:
    draws = rng.random((nx, ny))
    xs, ys = np.nonzero(draws < p)
    edges = [(int(x), nx + int(y)) for x, y in zip(xs, ys)]
    return graph_core.from_edge_list(nx + ny, edges)


def gen_random(nx: int, ny: int, p: float, seed: int) -> BipartiteGraph:
    """X = 0..nx-1, Y = nx..nx+ny-1; every X-Y pair is an edge with probability p."""
    _check_probability(p)
    return _sample(np.random.default_rng(seed), nx, ny, p)


def gen_s115_free(
    nx: int, ny: int, p: float, seed: int, max_tries: int = 1000
) -> Tuple[BipartiteGraph, int]:
    """The first sample without an induced S(1,1,5), and the number of samples drawn."""
    _check_probability(p)
    rng = np.random.default_rng(seed)
    for tries in range(1, max_tries + 1):
        g = _sample(rng, nx, ny, p)
        if pattern_detect.find_s115(g) is None:
            return g, tries
    logger.warning(f"gen_s115_free({nx}, {ny}, {p}, seed={seed}) exhausted")
    raise TriesExhausted(max_tries)


def gen_planted(
    nd: int, spread: int, extra_p: float, seed: int
) -> Tuple[BipartiteGraph, EdsSolution]:
    """
    A graph with a known e.d.s. of size nd.

    Planted vertices alternate sides and each gets `spread` private neighbours on
    the other side. Extra edges join private neighbours of different planted
    vertices only, so every vertex keeps exactly one planted dominator. Vertex ids
    are shuffled at the end.
    """
    if nd < 1:
        raise BadParameter(f"nd must be at least 1, got {nd}")
    _check_probability(extra_p)
    rng = np.random.default_rng(seed)

    n = nd * (1 + spread)
    # side parity: planted i sits on side i % 2, its neighbours on the other one.
    parity = [i % 2 for i in range(nd)]
    owner: List[int] = []
    edges: List[Tuple[int, int]] = []
    for i in range(nd):
        for _ in range(spread):
            v = nd + len(owner)
            owner.append(i)
            parity.append(1 - i % 2)
            edges.append((i, v))
    for u in range(nd, n):
        for v in range(u + 1, n):
            if parity[u] == parity[v] or owner[u - nd] == owner[v - nd]:
                continue
            if rng.random() < extra_p:
                edges.append((u, v))

    relabel = [int(x) for x in rng.permutation(n)]
    g = graph_core.from_edge_list(n, [(relabel[u], relabel[v]) for u, v in edges])
    planted = EdsSolution.of(relabel[i] for i in range(nd))
    assert eds_core.verify(g, planted).valid, "planted set does not verify"
    return g, planted


def gen_family(name: str, n: int) -> BipartiteGraph:
    if name == "path":
        if n < 1:
            raise BadParameter(f"path needs at least one vertex, got {n}")
        return graph_core.from_edge_list(n, [(i, i + 1) for i in range(n - 1)])
    if name == "cycle":
        if n < 4 or n % 2:
            raise BadParameter(f"a bipartite cycle needs an even n >= 4, got {n}")
        return graph_core.from_edge_list(n, [(i, (i + 1) % n) for i in range(n)])
    if name == "star":
        if n < 1:
            raise BadParameter(f"star needs at least one vertex, got {n}")
        return graph_core.from_edge_list(n, [(0, i) for i in range(1, n)])
    if name == "complete_bipartite":
        a = (n + 1) // 2
        return graph_core.from_edge_list(
            n, [(x, y) for x in range(a) for y in range(a, n)]
        )
    if name == "spider115":
        return graph_core.from_edge_list(8, pattern_detect.SPIDER_EDGES)
    raise BadParameter(f"unknown family {name!r}, expected one of {FAMILIES}")


def generate(spec: GenSpec) -> Tuple[BipartiteGraph, Optional[EdsSolution]]:
    """Runs the generator named by spec.kind; the planted kind also returns its set."""
    if spec.gen_kind is GenKind.RANDOM:
        return gen_random(spec.nx, spec.ny, spec.p, spec.seed), None
    if spec.gen_kind is GenKind.S115FREE:
        g, tries = gen_s115_free(spec.nx, spec.ny, spec.p, spec.seed, spec.max_tries)
        logger.info(f"S(1,1,5)-free sample after {tries} tries")
        return g, None
    if spec.gen_kind is GenKind.PLANTED:
        return gen_planted(spec.nd, spec.spread, spec.extra_p, spec.seed)
    return gen_family(spec.family, spec.n), None
