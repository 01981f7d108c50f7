import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from adelekit import GF, P1, Divisor
from adelekit.adeles import (
    AdeleError,
    Adele,
    Skyscraper,
    alternating_differential,
    apply_cosimplicial,
    codegeneracy,
    coface,
    diag,
    extend_by_zero,
    from_components,
    module_adele,
    LineBundle,
    pattern_kind,
    random_adele,
    restrict,
    supported,
)

X = P1(GF(5))
t = X.t
seeds = st.integers(0, 10_000)


def test_pattern_kinds():
    assert [pattern_kind(X, c) for c in X.chain_types(1)] == ["O", "A", "F"]


def test_diag_records_defects_at_poles():
    f = X.rat(1) / X.rat(t + 1)
    a = diag(f, 0, X)
    assert [(str(x), v) for _, x, v in a.defects()] == [("t+1", -1)]
    assert diag(X.rat(t + 1), 0, X).defects() == [(X.chain_types(0)[0], X.inf, -1)]
    assert not diag(3, 0, X).defects()


@settings(max_examples=30, deadline=None)
@given(seeds, st.integers(0, 2))
def test_coface_identities(seed, n):
    a = random_adele(X, n, random.Random(seed))
    for j in range(n + 2):
        for i in range(j):
            assert coface(coface(a, i), j) == coface(coface(a, j - 1), i)
    for i in range(n + 1):
        assert codegeneracy(coface(a, i), i) == a
        assert codegeneracy(coface(a, i + 1), i) == a


@settings(max_examples=30, deadline=None)
@given(seeds, seeds)
def test_cofaces_are_ring_homs(s1, s2):
    a, b = random_adele(X, 1, random.Random(s1)), random_adele(X, 1, random.Random(s2))
    for i in range(3):
        assert coface(a * b, i) == coface(a, i) * coface(b, i)
        assert coface(a + b, i) == coface(a, i) + coface(b, i)


def test_apply_cosimplicial_agrees_with_coface():
    a = random_adele(X, 1, random.Random(3))
    assert apply_cosimplicial(a, (0, 2)) == coface(a, 1)
    assert apply_cosimplicial(a, (1, 2)) == coface(a, 0)


@settings(max_examples=20, deadline=None)
@given(seeds)
def test_differential_squares_to_zero(seed):
    a = random_adele(X, 0, random.Random(seed))
    assert alternating_differential(alternating_differential(a)).is_zero()


def test_diag_is_a_cocycle():
    assert alternating_differential(diag(X.rat(t**2) / X.rat(t + 3), 0, X)).is_zero()


def test_restrict_then_extend():
    rng = random.Random(9)
    a = random_adele(X, 1, rng)
    S = {X.point("t"), X.point("t+1")}
    e = extend_by_zero(restrict(a, S))
    assert restrict(e, S) == restrict(a, S)
    assert e.removed == frozenset()
    with pytest.raises(AdeleError):
        restrict(a, {X.eta})


def test_open_mismatch_is_rejected():
    a = random_adele(X, 0, random.Random(1))
    with pytest.raises(AdeleError):
        restrict(a, {X.point("t")}) + a


def test_module_adele_enforces_twist():
    D = Divisor({X.point("t"): 1})
    xx = X.pattern("(x)")
    ok = module_adele(LineBundle(D), 0, {xx: ({X.point("t"): X.rat(1) / X.rat(t)}, 0)}, X)
    assert isinstance(ok, Adele)
    with pytest.raises(AdeleError):
        module_adele(LineBundle(Divisor()), 0, {xx: ({X.point("t"): X.rat(1) / X.rat(t)}, 0)}, X)


def test_skyscraper_adele_is_constant():
    sky = Skyscraper(((X.point("t"), 2),))
    a = module_adele(sky, 0, {X.point("t"): (1, 3)})
    assert a.coface(0).codegeneracy(0) == a
    with pytest.raises(AdeleError):
        module_adele(sky, 0, {X.point("t+1"): (1,)})


@settings(max_examples=20, deadline=None)
@given(seeds)
def test_json_roundtrip(seed):
    a = random_adele(X, 1, random.Random(seed), series_prob=0.3, prec=6)
    assert Adele.from_json(X, a.to_json()) == a


@settings(max_examples=20, deadline=None)
@given(seeds, seeds)
def test_supported_projection(s1, s2):
    Z = {X.point("t"), X.inf}
    a, b = random_adele(X, 1, random.Random(s1)), random_adele(X, 1, random.Random(s2))
    pa = supported(a, Z)
    assert supported(pa, Z) == pa
    assert supported(a * b, Z) == pa * supported(b, Z)
    for i in range(3):
        assert supported(coface(pa, i), Z) == supported(coface(a, i), Z)
