import random

import pytest
from hypothesis import given, strategies as st

from twisted_strata import A0, AmbientSpace, Decoration, GraphError, TwistedGraph, canonical_form, validate
from twisted_strata import oracles
from twisted_strata.enumerate import random_decoration, random_graph
from twisted_strata.graph import (ambient_from_json, ambient_to_json, first_betti, graph_from_json,
                                  graph_to_json, relabel, vertex_ambient)

from conftest import loop

AMBIENTS = [
    AmbientSpace(1, (("1", 1),), A0.one),
    AmbientSpace(0, (("1", 2), ("2", 1), ("3", 3)), A0.zero),
    AmbientSpace(2, (), A0.one),
    AmbientSpace(1, (("1", 1), ("2", 3)), A0.zero),
    AmbientSpace(2, (("1", 2),), A0.zero),
]


def random_decorated(seed):
    rng = random.Random(seed)
    amb = rng.choice(AMBIENTS)
    g = random_graph(amb, rng, rng.randint(0, 3), 3)
    return amb, g, random_decoration(g, rng, rng.randint(0, 2))


def test_loop_graph_is_valid(m11):
    for r in (1, 2, 5):
        assert validate(loop(r), m11).ok
        assert first_betti(loop(r)) == 1


def test_unbalanced_node(m11):
    g = graph_from_json({"vertices": [{"g": 0, "a": "1"}],
                         "half_edges": [{"v": 0, "m": 1}, {"v": 0, "m": 3}, {"v": 0, "m": 2}],
                         "edges": [[1, 2]], "legs": {"1": 0}}, A0)
    assert "unbalanced node" in validate(g, m11).codes()


def test_unstable_zero_vertex():
    amb = AmbientSpace(1, (("1", 1),), A0.one)
    g = TwistedGraph.build([(0, A0.one), (1, A0.zero)], {"1": 0}, [(0, 1, 1)])
    assert validate(g, amb).ok
    bad = TwistedGraph.build([(0, A0.zero), (1, A0.one)], {"1": 1}, [(0, 1, 1)])
    assert "unstable vertex" in validate(bad, amb).codes()


def test_value_one_vertex_may_be_unstable():
    amb = AmbientSpace(0, (), A0.one)
    assert validate(TwistedGraph.trivial(amb), amb).ok


@pytest.mark.parametrize("graph, code", [
    (TwistedGraph.build([(0, A0.one)], {"1": 0}, []), "genus"),
    (TwistedGraph.build([(0, A0.one), (1, A0.one)], {"1": 0}, []), "disconnected"),
    (TwistedGraph.build([(1, A0.zero)], {"1": 0}, []), "value sum"),
    (TwistedGraph.build([(1, A0.one)], {"1": 0}, [], leg_twists={"1": 2}), "twist"),
    (TwistedGraph.build([(1, A0.one)], {"2": 0}, []), "legs"),
])
def test_violations_are_named(m11, graph, code):
    assert code in validate(graph, m11).codes()
    with pytest.raises(GraphError, match=code):
        validate(graph, m11).raise_if_bad()


def test_malformed_involution(m11):
    g = TwistedGraph(loop(1).vertices, loop(1).half_edges, (0, 2, 0), loop(1).legs)
    assert not validate(g, m11).ok


def test_loop_flip_is_an_automorphism(m11):
    cf = canonical_form(loop(2))
    assert cf.automorphisms == 2
    h, k = loop(2).edges()[0]
    assert canonical_form(loop(2), Decoration.make({h: 1})).key == canonical_form(loop(2), Decoration.make({k: 1})).key
    assert canonical_form(loop(2), Decoration.make({h: 1})).automorphisms == 1


def test_parallel_edges_automorphisms():
    g = TwistedGraph.build([(0, A0.zero), (0, A0.one)], {"1": 0}, [(0, 1, 2), (0, 1, 2)])
    assert canonical_form(g).automorphisms == 2
    g2 = TwistedGraph.build([(0, A0.zero), (0, A0.one)], {"1": 0}, [(0, 1, 2), (0, 1, 3)])
    assert canonical_form(g2).automorphisms == 1


@given(st.integers(0, 10**6))
def test_automorphism_count_matches_brute_force(seed):
    _, g, d = random_decorated(seed)
    assert canonical_form(g, d).automorphisms == len(oracles.automorphisms(g, d))


@given(st.integers(0, 10**6), st.randoms(use_true_random=False))
def test_key_is_invariant_under_relabelling(seed, rnd):
    _, g, d = random_decorated(seed)
    vperm = list(range(g.n_vertices))
    hperm = list(range(len(g.half_edges)))
    rnd.shuffle(vperm)
    rnd.shuffle(hperm)
    g2, d2 = relabel(g, d, vperm, hperm)
    a, b = canonical_form(g, d), canonical_form(g2, d2)
    assert a.key == b.key
    assert a.graph == b.graph and a.decoration == b.decoration
    assert a.automorphisms == b.automorphisms


@given(st.integers(0, 10**6))
def test_canonical_form_is_idempotent_and_valid(seed):
    amb, g, d = random_decorated(seed)
    cf = canonical_form(g, d)
    assert validate(cf.graph, amb).ok
    again = canonical_form(cf.graph, cf.decoration)
    assert again.graph == cf.graph and again.decoration == cf.decoration and again.key == cf.key


def test_decorations_distinguish_strata():
    g = TwistedGraph.build([(0, A0.zero), (0, A0.one)], {"1": 0}, [(0, 1, 2), (0, 1, 2)])
    k1 = canonical_form(g, Decoration.make(kappa={(0, 1): 1})).key
    k2 = canonical_form(g, Decoration.make(kappa={(1, 1): 1})).key
    assert k1 != k2


@given(st.integers(0, 10**6))
def test_json_round_trip(seed):
    amb, g, _ = random_decorated(seed)
    assert graph_from_json(graph_to_json(g), amb.spec) == g
    assert ambient_from_json(ambient_to_json(amb)) == amb


def test_vertex_ambient_labels_edges():
    g = TwistedGraph.build([(0, A0.one), (1, A0.zero)], {"1": 0}, [(0, 1, 3)])
    amb = vertex_ambient(g, 1)
    assert amb.g == 1 and amb.a == A0.zero
    assert amb.markings == (("~2", 3),)
