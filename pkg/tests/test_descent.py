import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from adelekit import GF, P1, SpecZ
from adelekit.adeles import from_components, make_component
from adelekit.descent import (
    Cocycle,
    DescentError,
    accept_level0,
    coboundary,
    degree_of,
    from_weil,
    gauge_act,
    gauge_equivalent,
    glue,
    idele,
    product_of_residue_fields,
    random_gauge,
    random_idele,
    twist_gluing,
    validate,
    validate_family,
    weil_reduce,
)

X = P1(GF(5))
t = X.t


def corrupt(phi):
    e = phi.entries[0][0]
    xx = X.pattern("(x,x)")
    comps = dict(e.comp)
    comps[xx] = make_component(X, {X.point("t+1"): X.rat(3)}, e[xx].default)
    rows = [list(r) for r in phi.entries]
    rows[0][0] = from_components(X, 1, comps)
    return Cocycle(X, phi.rank, rows)


def test_weil_cocycle_validates_and_gauge_preserves():
    rng = random.Random(0)
    phi = from_weil(random_idele(X, 2, rng))
    psi = gauge_act(random_gauge(X, 2, rng), phi)
    assert validate(phi).ok and validate(psi).ok
    assert glue(phi).invariants() == glue(psi).invariants()
    assert gauge_equivalent(phi, psi) == "yes"


def test_corrupted_entry_has_witness():
    phi = from_weil(random_idele(X, 2, random.Random(0)))
    v = validate(corrupt(phi))
    assert v.status == "invalid"
    assert v.witness["chain"] == "(x,x,eta)"
    assert v.witness["point"] == "t+1"
    assert v.witness["entry"] == [0, 0]


def test_splitting_distinguishes_equal_degree():
    split = glue(from_weil(idele(X, {"inf": [[X.rat(1) / X.rat(t), 0], [0, X.rat(t)]]})))
    triv = glue(from_weil(idele(X, {"inf": [[1, 0], [0, 1]]})))
    assert split.degree() == triv.degree() == 0
    assert split.splitting_type() == (1, -1)
    assert triv.splitting_type() == (0, 0)
    assert (split.h0(-1), triv.h0(-1)) == (1, 0)
    assert gauge_equivalent(from_weil(split.gluing), from_weil(triv.gluing)) == "no"


def test_non_unit_tail_is_rejected():
    with pytest.raises(DescentError):
        from_weil(idele(X, {}, tail_matrix=[[X.rat(t)]]))


@settings(max_examples=10, deadline=None)
@given(st.integers(0, 10_000), st.integers(1, 2))
def test_coboundaries_are_trivial(seed, n):
    rng = random.Random(seed)
    phi = coboundary(random_gauge(X, n, rng))
    assert validate(phi).ok
    assert glue(phi).splitting_type() == (0,) * n


@settings(max_examples=10, deadline=None)
@given(st.integers(0, 10_000), st.integers(-2, 2))
def test_twist_shifts_splitting(seed, m):
    gl = random_idele(X, 2, random.Random(seed))
    B = glue(from_weil(gl))
    tw = glue(from_weil(twist_gluing(gl, m)))
    assert tw.degree() == B.degree() + 2 * m
    assert tw.splitting_type() == tuple(a + m for a in B.splitting_type())
    assert sum(B.splitting_type()) == B.degree() == degree_of(gl)


def test_degree_additive_under_products():
    a = idele(X, {"t": [[X.rat(t) ** 2]]})
    b = idele(X, {"t+1": [[X.rat(1) / X.rat(t + 1)]], "inf": [[X.rat(t) ** 3]]})
    ab = idele(X, {"t": [[X.rat(t) ** 2]], "t+1": [[X.rat(1) / X.rat(t + 1)]], "inf": [[X.rat(t) ** 3]]})
    assert degree_of(ab) == degree_of(a) + degree_of(b)


def test_weil_normal_form():
    L = glue(from_weil(idele(X, {"t+1": [[X.rat(t + 1) ** 3]], "t^2+2": [[1 / X.rat(t**2 + 2)]]})))
    dc = weil_reduce(L)
    assert dc.degree == L.degree() == 1
    assert dc.to_json()["normal_form"] == "t^1 at t=0"
    assert dc.log[-1]["certified"]


def test_json_roundtrip():
    phi = from_weil(random_idele(X, 2, random.Random(4)))
    again = Cocycle.from_json(phi.to_json())
    assert validate(again).ok
    assert glue(again).invariants() == glue(phi).invariants()


def test_product_of_residue_fields():
    fam = product_of_residue_fields(SpecZ())
    assert accept_level0(fam)["accepted"]
    v = validate_family(fam, max_support=4)
    assert v.status == "invalid"
    assert v.witness
