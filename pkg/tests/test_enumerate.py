import io
import json
import random

import pytest
from hypothesis import given, strategies as st

from twisted_strata import A0, AmbientSpace, TwistedGraph, canonical_form, validate
from twisted_strata import oracles
from twisted_strata.enumerate import (EnumBounds, degenerations, enumerate_graphs, enumerate_strata,
                                      random_graph, write_json_lines)
from twisted_strata.selfcheck import random_ambient


def keys(graphs):
    return [canonical_form(g).key for g in graphs]


def test_bounds_are_checked(m11):
    with pytest.raises(ValueError):
        EnumBounds(-1, 1)
    with pytest.raises(ValueError):
        EnumBounds(1, 0)
    with pytest.raises(ValueError):
        EnumBounds(1, 1).check(AmbientSpace(0, (("1", 3), ("2", 1), ("3", 1)), A0.one))


def test_no_edges_gives_trivial_graph(m11):
    out = enumerate_graphs(m11, EnumBounds(0, 5))
    assert len(out) == 1 and out[0].is_trivial()


@pytest.mark.parametrize("r", [1, 2, 3, 4])
def test_one_edge_count(m11, r):
    # per twist: a loop plus four ways to split off a genus-one vertex
    assert len(enumerate_graphs(m11, EnumBounds(1, r))) == 5 * r + 1


@pytest.mark.parametrize("amb,edges,bound", [
    (AmbientSpace(1, (("1", 1),), A0.one), 2, 2),
    (AmbientSpace(0, (("1", 1), ("2", 1), ("3", 2), ("4", 1)), A0.one), 2, 2),
    (AmbientSpace(2, (), A0.one), 2, 1),
    (AmbientSpace(1, (("1", 2), ("2", 1)), A0.zero), 2, 2),
])
def test_agrees_with_degeneration_closure(amb, edges, bound):
    assert keys(enumerate_graphs(amb, EnumBounds(edges, bound))) == \
        keys(oracles.graphs_by_degeneration(amb, edges, bound))


def test_sorted_canonical_and_valid(m11):
    out = enumerate_graphs(m11, EnumBounds(2, 2))
    ks = keys(out)
    assert ks == sorted(set(ks))
    for g in out:
        assert canonical_form(g).graph == g
        assert validate(g, m11).ok


@given(st.integers(0, 10**6))
def test_monotone_in_bounds(seed):
    rng = random.Random(seed)
    amb = random_ambient(rng, max_genus=1, max_twist=2)
    small = set(keys(enumerate_graphs(amb, EnumBounds(1, 2))))
    assert small <= set(keys(enumerate_graphs(amb, EnumBounds(2, 2))))
    assert small <= set(keys(enumerate_graphs(amb, EnumBounds(1, 3))))


def test_codim_zero_is_fundamental_class(m11):
    out = enumerate_strata(m11, EnumBounds(3, 3, 2), 0)
    assert len(out) == 1 and out[0].graph.is_trivial() and out[0].decoration.is_unit


def test_trivial_graph_codim_one(m04):
    out = enumerate_strata(m04, EnumBounds(0, 1, 1), 1)
    assert len(out) == 5  # psi_1..psi_4 and kappa_1
    assert all(s.codim == 1 for s in out)


def test_codim_one_with_boundary(m11):
    out = enumerate_strata(m11, EnumBounds(1, 2, 1), 1)
    boundary = [s for s in out if not s.graph.is_trivial()]
    assert len(out) == 12 and len(boundary) == 10
    assert {canonical_form(s.graph).key for s in boundary} == \
        set(keys(enumerate_graphs(m11, EnumBounds(1, 2)))) - {canonical_form(TwistedGraph.trivial(m11)).key}


def test_degenerations_add_one_edge(m11):
    g = random_graph(m11, random.Random(1), 1, 2)
    for d in degenerations(g, m11, [1, 2]):
        assert d.n_edges == g.n_edges + 1 and validate(d, m11).ok


def test_json_lines(m11):
    buf = io.StringIO()
    n = write_json_lines(enumerate_strata(m11, EnumBounds(1, 2, 1), 1), buf)
    lines = buf.getvalue().splitlines()
    assert n == len(lines) == 12
    for line in lines:
        obj = json.loads(line)
        assert obj["codim"] == 1 and "graph" in obj
