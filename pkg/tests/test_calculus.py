import random
from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from twisted_strata import (A0, AmbientSpace, Decoration, GraphError, TautClass, TwistedGraph,
                            fundamental_class, kappa_class, make_class, psi_class, vertex_ambient)
from twisted_strata import oracles
from twisted_strata.calculus import (AStructure, ForgetfulError, GenericPair, boundary_divisor, excess,
                                     forgetful_comparison, generic_pairs, identity_structure, product,
                                     pullback_gluing, pushforward_forgetful, pushforward_gluing,
                                     structure_problems)
from twisted_strata.enumerate import random_decoration, random_graph
from twisted_strata.selfcheck import banana, expected_loop_square, random_ambient
from twisted_strata.strata import check_well_formed

from conftest import loop


def separating(amb_a_leg=A0.one, amb_a_other=A0.one):
    return TwistedGraph.build([(0, amb_a_leg), (1, amb_a_other)], {"1": 0}, [(0, 1, 1)])


# -- pullback -------------------------------------------------------------------------

def test_pullback_along_identity_is_identity(m11):
    d = Decoration.make({1: 2}, {(0, 1): 1})
    assert pullback_gluing(identity_structure(loop(2)), d) == {d: 1}


def _collapse(gamma, target):
    leg = dict(gamma.legs)
    return AStructure(gamma, target, (0,) * gamma.n_vertices,
                      tuple(leg[l] for l, _ in sorted(target.legs, key=lambda p: p[1])))


def test_pullback_kappa_sums_over_fibre(m11):
    G, A = separating(), TwistedGraph.trivial(m11)
    f = _collapse(G, A)
    assert structure_problems(f) == []
    assert pullback_gluing(f, Decoration.make(kappa={(0, 1): 1})) == {
        Decoration.make(kappa={(0, 1): 1}): 1, Decoration.make(kappa={(1, 1): 1}): 1}


def test_pullback_kappa_square_is_multinomial(m11):
    f = _collapse(separating(), TwistedGraph.trivial(m11))
    assert pullback_gluing(f, Decoration.make(kappa={(0, 1): 2})) == {
        Decoration.make(kappa={(0, 1): 2}): 1,
        Decoration.make(kappa={(0, 1): 1, (1, 1): 1}): 2,
        Decoration.make(kappa={(1, 1): 2}): 1}


def test_pullback_psi_goes_to_image(m11):
    f = _collapse(separating(), TwistedGraph.trivial(m11))
    assert pullback_gluing(f, Decoration.make({0: 3})) == {Decoration.make({0: 3}): 1}


def test_structure_problems_detects_wrong_genus(m11):
    G = separating()
    f = AStructure(G, G, (0, 1), (0, 1, 2))
    assert structure_problems(f) == []
    bad = AStructure(G, TwistedGraph.trivial(m11), (0, 0), (1,))
    assert structure_problems(bad)


# -- excess ---------------------------------------------------------------------------

def test_excess_without_common_edges_is_one():
    g = loop(2)
    pair = GenericPair(g, identity_structure(g), identity_structure(g), ())
    assert excess(pair) == {Decoration(): 1}


def test_excess_one_edge(m11):
    g = loop(3)
    (h, k), = g.edges()
    pair = GenericPair(g, identity_structure(g), identity_structure(g), ((h, k),))
    assert excess(pair) == {Decoration.make({h: 1}): Fraction(-1, 3), Decoration.make({k: 1}): Fraction(-1, 3)}


def test_excess_two_edges():
    g = TwistedGraph.build([(0, A0.zero), (0, A0.one)], {"1": 0}, [(0, 1, 2), (0, 1, 3)])
    (h, k), (p, q) = g.edges()
    pair = GenericPair(g, identity_structure(g), identity_structure(g), ((h, k), (p, q)))
    sixth = Fraction(1, 6)
    assert excess(pair) == {Decoration.make({a: 1, b: 1}): sixth for a in (h, k) for b in (p, q)}


# -- generic pairs ------------------------------------------------------------------------

def test_trivial_pairs(m11):
    t = TwistedGraph.trivial(m11)
    pairs = generic_pairs(t, t, m11)
    assert len(pairs) == 1 and pairs[0].graph.is_trivial()
    for B in (loop(2), separating()):
        pairs = generic_pairs(t, B, m11)
        assert len(pairs) == 1 and pairs[0].common_edges == ()
        assert pairs[0].graph.n_edges == B.n_edges


@pytest.mark.parametrize("r", [1, 2, 3])
def test_loop_self_pairs_match_oracle(m11, r):
    impl = generic_pairs(loop(r), loop(r), m11)
    ref = oracles.generic_pairs(loop(r), loop(r), m11)
    assert oracles.implementation_keys(impl) == ref
    assert len(ref) == 10
    assert len({key for key, _ in ref}) == 3
    for p in impl:
        assert structure_problems(p.f_a) == [] and structure_problems(p.f_b) == []


@given(st.integers(0, 10**6))
def test_generic_pairs_match_oracle(seed):
    rng = random.Random(seed)
    amb = random_ambient(rng, max_genus=1, max_twist=3)
    A = random_graph(amb, rng, rng.randint(0, 1), 3)
    B = random_graph(amb, rng, rng.randint(0, 2 - A.n_edges), 3)
    assert oracles.implementation_keys(generic_pairs(A, B, amb)) == oracles.generic_pairs(A, B, amb)


# -- product ---------------------------------------------------------------------------------

def test_unit_and_psi_square(m11):
    one = fundamental_class(m11)
    x = psi_class(m11, "1") + make_class(loop(2), Decoration(), m11, 3)
    assert one * x == x == x * one
    assert psi_class(m11, "1") * psi_class(m11, "1") == psi_class(m11, "1", 2)


@pytest.mark.parametrize("r", [1, 2, 3])
def test_loop_square(m11, r):
    L = make_class(loop(r), Decoration(), m11)
    sq = L * L
    assert sq == expected_loop_square(r)
    assert sq.codim == 2
    assert sq.coefficient(banana(A0.zero, A0.one, r)) == 4
    assert sq.coefficient(banana(A0.one, A0.zero, r)) == 0  # the other vertex would be unstable


def _pure(rng, amb, edges, degree, twist_bound=4):
    g = random_graph(amb, rng, rng.randint(0, edges), twist_bound)
    return make_class(g, random_decoration(g, rng, rng.randint(0, degree)), amb)


@given(st.integers(0, 10**6))
def test_product_commutes_and_grades(seed):
    rng = random.Random(seed)
    amb = random_ambient(rng)
    x, y = _pure(rng, amb, 2, 2), _pure(rng, amb, 2, 2)
    xy = product(x, y)
    assert xy == product(y, x)
    if xy:
        assert xy.codim == x.codim + y.codim
    check_well_formed(xy)


@given(st.integers(0, 10**6))
def test_product_is_associative_on_samples(seed):
    rng = random.Random(seed)
    amb = random_ambient(rng, max_genus=1)
    x, y, z = (_pure(rng, amb, 1, 1) for _ in range(3))
    assert (x * y) * z == x * (y * z)


@given(st.integers(0, 10**6))
def test_untwisted_specialization(seed):
    rng = random.Random(seed)
    amb = random_ambient(rng, max_twist=1)
    x, y = _pure(rng, amb, 2, 1, 1), _pure(rng, amb, 2, 1, 1)
    assert product(x, y) == oracles.untwisted_product(x, y)


def test_product_parallel_matches_serial(m11):
    rng = random.Random(3)
    x = sum((_pure(rng, m11, 2, 1) for _ in range(3)), TautClass(m11))
    y = sum((_pure(rng, m11, 2, 1) for _ in range(2)), TautClass(m11))
    assert product(x, y, jobs=2) == product(x, y)


# -- gluing pushforward --------------------------------------------------------------------------

def _ones(skeleton):
    return [fundamental_class(vertex_ambient(skeleton, v)) for v in range(skeleton.n_vertices)]


def test_gluing_trivial_skeleton_is_identity(m11):
    x = psi_class(m11, "1", 2) + kappa_class(m11, 1)
    assert pushforward_gluing(TwistedGraph.trivial(m11), m11, [x]) == x


@pytest.mark.parametrize("r", [1, 2, 3, 4])
def test_gluing_one_edge_factor(r):
    amb = AmbientSpace(0, (("1", 1), ("2", 1)), A0.one)
    sk = TwistedGraph.build([(0, A0.one), (0, A0.one)], {"1": 0, "2": 1}, [(0, 1, r)])
    assert pushforward_gluing(sk, amb, _ones(sk)) == make_class(sk, Decoration(), amb, Fraction(1, r))


def test_gluing_interface_mismatch():
    amb = AmbientSpace(0, (("1", 1), ("2", 1)), A0.one)
    sk = TwistedGraph.build([(0, A0.one), (0, A0.one)], {"1": 0, "2": 1}, [(0, 1, 2)])
    wrong = AmbientSpace(0, (("1", 1), ("~2", 3)), A0.one)
    with pytest.raises(GraphError):
        pushforward_gluing(sk, amb, [fundamental_class(wrong), fundamental_class(vertex_ambient(sk, 1))])
    with pytest.raises(GraphError):
        pushforward_gluing(sk, amb, _ones(sk)[:1])


@given(st.integers(0, 10**6))
def test_projection_formula(seed):
    rng = random.Random(seed)
    amb = random_ambient(rng)
    if not amb.markings:
        return
    A = random_graph(amb, rng, rng.randint(0, 3), 4)
    label = rng.choice(amb.labels)
    leg_vertex = A.half_edges[A.leg_map[label]].v
    classes = []
    for v in range(A.n_vertices):
        av = vertex_ambient(A, v)
        classes.append(psi_class(av, label) if v == leg_vertex else fundamental_class(av))
    glued = pushforward_gluing(A, amb, classes)
    m = 1
    for h, _ in A.edges():
        m *= A.half_edges[h].m
    assert product(make_class(A, Decoration(), amb), psi_class(amb, label)) == glued * m


# -- forgetful pushforward ----------------------------------------------------------------------

def test_kappa_from_psi_powers():
    for base in (AmbientSpace(0, (("1", 1), ("2", 2), ("3", 3)), A0.zero), AmbientSpace(2, (), A0.one)):
        amb = base.with_marking("p")
        for m in range(5):
            assert pushforward_forgetful(psi_class(amb, "p", m + 1), "p") == kappa_class(base, m)


def test_fundamental_class_pushes_to_zero(m11):
    assert not pushforward_forgetful(fundamental_class(m11.with_marking("p")), "p")


def test_psi_of_other_marking_pushes_to_one(m11):
    amb = m11.with_marking("p")
    assert pushforward_forgetful(psi_class(amb, "1"), "p") == fundamental_class(m11)


def test_psi_pushforward_carries_the_twist():
    base = AmbientSpace(1, (("1", 3),), A0.one)
    amb = base.with_marking("p")
    assert pushforward_forgetful(psi_class(amb, "1"), "p") == fundamental_class(base) * 3


def test_comparison_classes(m11):
    amb = m11.with_marking("p")
    assert forgetful_comparison(amb, ("kappa", 1), "p") == kappa_class(amb, 1) - psi_class(amb, "p")
    D = boundary_divisor(amb, "1", "p")
    assert len(D) == 1
    assert forgetful_comparison(amb, ("psi", "1"), "p") == psi_class(amb, "1") - D


def test_forgetful_errors(m11):
    amb = m11.with_marking("p", 2)
    with pytest.raises(ForgetfulError):
        pushforward_forgetful(psi_class(amb, "p"), "p")
    with pytest.raises(ForgetfulError):
        pushforward_forgetful(psi_class(m11, "1"), "q")
    with pytest.raises(ForgetfulError):
        forgetful_comparison(amb, ("psi", "1"), "p")


@given(st.integers(0, 10**6))
def test_pulled_back_classes_push_to_zero(seed):
    rng = random.Random(seed)
    base = random_ambient(rng, max_genus=1)
    amb = base.with_marking("p")
    gens = [("psi", l) for l in base.labels] + [("kappa", j) for j in (0, 1, 2)]
    x = fundamental_class(amb)
    for _ in range(rng.randint(1, 2)):
        x = x * forgetful_comparison(amb, rng.choice(gens), "p")
    assert not pushforward_forgetful(x, "p")


def test_unstable_vertex_rules(m11):
    # the point on a rational value-0 bubble at the leg
    amb = m11.with_marking("p")
    G = TwistedGraph.build([(1, A0.one), (0, A0.zero)], {"1": 1, "p": 1}, [(0, 1, 1)])
    assert pushforward_forgetful(make_class(G, Decoration(), amb), "p") == fundamental_class(m11)
    bubble_half = [h for h in G.half_edges_at(1) if G.leg_label(h) is None][0]
    assert not pushforward_forgetful(make_class(G, Decoration.make({bubble_half: 1}), amb), "p")
    assert not pushforward_forgetful(make_class(G, Decoration.make(kappa={(1, 1): 1}), amb), "p")


def test_kappa0_substitute_mode(m11):
    amb = m11.with_marking("p")
    assert pushforward_forgetful(psi_class(amb, "p"), "p", kappa0="substitute") == fundamental_class(m11)
    with pytest.raises(ForgetfulError):
        pushforward_forgetful(psi_class(amb, "p"), "p", kappa0="numeric")
