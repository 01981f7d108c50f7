import itertools

import pytest
from hypothesis import given
from hypothesis import strategies as st

from adelekit import GF, P1, FinitePoset, SpecZ
from adelekit.scheme import apply_map, contract_chain, degeneracy, face, model_from_descriptor, monotone_maps

X = P1(GF(5))


def test_curve_chain_patterns():
    assert [str(c).replace("eta", "e") for c in X.chain_types(1)] == ["(x,x)", "(x,e)", "(e,e)"]
    assert len(X.chain_types(3)) == 5
    for c in X.chain_types(2):
        assert all(X.leq(a, b) for a, b in zip(c, c[1:]))


def test_pattern_parser_rejects_decreasing():
    with pytest.raises(ValueError):
        X.pattern("(eta,x)")


def test_closed_points_enumeration():
    pts = X.first_points(8)
    assert str(pts[0]) == "inf"
    assert [X.degree(p) for p in pts] == [1] * 6 + [2] * 2
    assert sum(1 for _ in itertools.islice(SpecZ().closed_points(), 4)) == 4
    assert [p.label for p in SpecZ().first_points(4)] == [2, 3, 5, 7]


def test_point_must_be_irreducible():
    with pytest.raises(ValueError):
        X.point("t^2+1")  # (t+2)(t+3) over F5
    assert X.degree(X.point("t^2+2")) == 2


@given(st.integers(1, 4), st.data())
def test_face_degeneracy_shapes(n, data):
    P = FinitePoset.chain(4)
    c = data.draw(st.sampled_from(P.chain_types(n)))
    i = data.draw(st.integers(0, n))
    assert face(c, i).level == n - 1
    assert face(degeneracy(c, i), i) == c
    assert face(degeneracy(c, i), i + 1) == c


def test_face_index_errors():
    c = X.chain_types(1)[0]
    with pytest.raises(IndexError):
        face(c, 2)
    with pytest.raises(IndexError):
        face(X.chain_types(0)[0], 0)


def test_monotone_maps_count():
    # C(n+k+1, k+1)
    assert len(list(monotone_maps(1, 2))) == 6
    assert len(list(monotone_maps(2, 3))) == 20


def test_apply_map_matches_faces():
    c = FinitePoset.chain(4).chain_types(2)[5]
    assert apply_map(c, (0, 2)) == face(c, 1)
    assert apply_map(c, (0, 0, 1, 2)) == degeneracy(c, 0)


def test_contract_chain():
    P = FinitePoset.chain(3)
    top = P.eta
    c = P.chain_types(2)[1]
    assert contract_chain(c, (0, 0, 1), top, P).points[-1] == top
    assert contract_chain(c, (0, 0, 0), top, P) == c
    with pytest.raises(ValueError):
        contract_chain(c, (1, 0, 0), top)


def test_poset_axioms_and_maximum():
    P = FinitePoset(5, [(0, 2), (1, 2), (0, 3), (2, 4), (3, 4)])
    assert P.check_order_axioms()
    assert P.eta.label == 4
    assert P.dimension == 2
    V = FinitePoset(3, [(0, 2), (1, 2)])
    assert V.eta.label == 2
    assert FinitePoset(2, []).eta is None
    with pytest.raises(ValueError):
        FinitePoset(2, [(0, 1), (1, 0)])


def test_descriptors_roundtrip():
    for m in [X, SpecZ(), FinitePoset.chain(3)]:
        again = model_from_descriptor(m.descriptor())
        assert again.descriptor() == m.descriptor()
    assert model_from_descriptor("fp4chain").n == 4
