import numpy as np
import pytest

from edsolve.data import generators
from edsolve.graph import graph_core
from edsolve.graph import pattern_detect
from edsolve.solver import eds_core


def test_gen_random_extremes():
    assert generators.gen_random(3, 3, 1.0, seed=1).m == 9
    assert generators.gen_random(3, 3, 0.0, seed=1).m == 0


def test_gen_random_is_deterministic():
    first = generators.gen_random(6, 7, 0.4, seed=5)
    second = generators.gen_random(6, 7, 0.4, seed=5)
    assert first.edges() == second.edges()
    assert first.n == 13
    for u, v in first.edges():
        assert u < 6 <= v


def test_gen_random_bad_probability():
    with pytest.raises(generators.BadParameter):
        generators.gen_random(2, 2, 1.5, seed=0)


def test_gen_s115_free_small_sides_never_contain_the_spider():
    # The spider splits 3/5 between its colour classes.
    _, tries = generators.gen_s115_free(4, 4, 0.9, seed=3)
    assert tries == 1


def test_gen_s115_free():
    g, tries = generators.gen_s115_free(5, 5, 0.3, seed=11)
    assert tries >= 1
    assert pattern_detect.find_s115(g) is None


def test_gen_s115_free_exhausted():
    with pytest.raises(generators.TriesExhausted):
        generators.gen_s115_free(5, 5, 0.3, seed=11, max_tries=0)


def test_gen_planted_star():
    g, planted = generators.gen_planted(1, 3, 0.5, seed=2)
    assert len(planted) == 1
    (center,) = planted.vertices
    assert g.degree(center) == 3
    assert g.m == 3


def test_gen_planted_two_stars():
    g, planted = generators.gen_planted(2, 2, 0.0, seed=4)
    assert len(planted) == 2
    assert g.m == 4
    assert len(graph_core.components(g)) == 2
    assert eds_core.verify(g, planted).valid


def test_gen_planted_always_verifies():
    rng = np.random.default_rng(7)
    for seed in range(200):
        nd = int(rng.integers(1, 7))
        spread = int(rng.integers(0, 4))
        g, planted = generators.gen_planted(nd, spread, float(rng.random()), seed)
        assert g.n == nd * (1 + spread)
        assert eds_core.verify(g, planted).valid


def test_gen_planted_bad_size():
    with pytest.raises(generators.BadParameter):
        generators.gen_planted(0, 2, 0.1, seed=0)


@pytest.mark.parametrize(
    "name, n, m",
    [
        ("path", 6, 5),
        ("cycle", 6, 6),
        ("star", 4, 3),
        ("complete_bipartite", 6, 9),
        ("spider115", 0, 7),
    ],
)
def test_gen_family(name, n, m):
    assert generators.gen_family(name, n).m == m


def test_gen_family_shapes():
    assert generators.gen_family("path", 6).edges() == [(i, i + 1) for i in range(5)]
    assert generators.gen_family("star", 5).degree(0) == 4
    spider = generators.gen_family("spider115", 8)
    assert pattern_detect.find_s115(spider).vertices == tuple(range(8))


@pytest.mark.parametrize(
    "name, n", [("cycle", 5), ("cycle", 2), ("path", 0), ("wheel", 6)]
)
def test_gen_family_bad_parameters(name, n):
    with pytest.raises(generators.BadParameter):
        generators.gen_family(name, n)


def test_gen_spec():
    spec = generators.GenSpec(kind="planted", nd=2, spread=1, seed=9)
    assert spec.kind == "planted"
    assert spec.gen_kind is generators.GenKind.PLANTED
    assert generators.GenSpec(kind=generators.GenKind.PLANTED).kind == "planted"
    g, planted = generators.generate(spec)
    assert eds_core.verify(g, planted).valid

    g, planted = generators.generate(generators.GenSpec(kind="family", family="cycle"))
    assert planted is None
    assert g.m == 6

    with pytest.raises(generators.BadParameter):
        generators.GenSpec(p=-0.1)
    with pytest.raises(generators.BadParameter):
        generators.GenSpec(kind="lattice")
