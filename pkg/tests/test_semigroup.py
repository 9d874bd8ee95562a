from math import comb, prod

import pytest
from hypothesis import given, strategies as st

from twisted_strata import A0, FreeMonoid, SemigroupError, SemigroupSpec, decompose
from twisted_strata.semigroup import total, value_from_json


def test_a0_addition_table():
    z, o = A0.zero, A0.one
    assert z + z == z
    assert z + o == o + z == o
    assert o + o == o


def test_a0_decompose_counts():
    assert decompose(A0.zero, 3) == [(A0.zero,) * 3]
    ones = decompose(A0.one, 3)
    assert len(ones) == 7
    assert all(total(t, A0) == A0.one for t in ones)


def test_free_decompose_example():
    F = FreeMonoid(2)
    a = F.value((2, 1))
    parts = decompose(a, 2)
    assert len(parts) == 6
    assert len(set(parts)) == 6


@given(st.lists(st.integers(0, 3), min_size=1, max_size=3), st.integers(1, 3))
def test_free_decompose_is_complete_and_exact(coords, k):
    F = FreeMonoid(len(coords))
    a = F.value(tuple(coords))
    parts = decompose(a, k)
    assert len(set(parts)) == len(parts) == prod(comb(c + k - 1, k - 1) for c in coords)
    assert all(total(p, F) == a for p in parts)


@given(st.integers(1, 4))
def test_a0_decompose_sums(k):
    for a in (A0.zero, A0.one):
        assert all(total(p, A0) == a for p in decompose(a, k))


def test_mixed_semigroups_rejected():
    with pytest.raises(SemigroupError):
        A0.one + FreeMonoid(1).zero


def test_bad_values_rejected():
    with pytest.raises(SemigroupError):
        A0.value(2)
    with pytest.raises(SemigroupError):
        FreeMonoid(2).value((1, -1))
    with pytest.raises(SemigroupError):
        FreeMonoid(2).value((1,))


def test_spec_parse_and_json():
    assert SemigroupSpec.parse("a0") == A0
    assert SemigroupSpec.parse("free:3") == FreeMonoid(3)
    with pytest.raises(SemigroupError):
        SemigroupSpec.parse("cyclic:2")
    for a in (A0.zero, A0.one):
        assert value_from_json(a.to_json(), A0) == a
    b = FreeMonoid(2).value((3, 0))
    assert value_from_json(b.to_json(), FreeMonoid(2)) == b
