import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from adelekit import GF, P1, QQ, Divisor, SpecZ
from adelekit.adeles import LineBundle, Skyscraper
from adelekit.cohomology import (
    AdelicWindowModule,
    ConstantModule,
    WindowPolicy,
    adelic_cohomology,
    cech_cohomology,
    dold_kan,
    initial_window,
    resolution_check,
    riemann_roch_basis,
)

X = P1(GF(5))


def O(n, model=X):
    return LineBundle(Divisor({model.inf: n}) if n else Divisor())


def test_constant_module():
    for mode in ("normalized", "alternating"):
        C = dold_kan(ConstantModule(GF(5)), mode, top=3)
        C.check_d2()
        assert C.cohomology() == {0: 1, 1: 0, 2: 0}


@pytest.mark.parametrize("n", [-3, -1, 0, 1, 3])
def test_line_bundles_match_cech(n):
    rep = adelic_cohomology(X, O(n))
    assert rep.stabilized
    assert rep.dims == cech_cohomology(X, O(n)).dims == {0: max(n + 1, 0), 1: max(-n - 1, 0)}


def test_divisor_at_finite_points():
    D = Divisor.parse(X, "2*[t]-[inf]+[t^2+2]")
    assert adelic_cohomology(X, LineBundle(D)).dims == {0: 4, 1: 0}
    D = Divisor.parse(X, "-2*[t+1]-[t^2+2]")
    assert adelic_cohomology(X, LineBundle(D)).dims == {0: 0, 1: 3}


def test_alternating_agrees_with_normalized():
    for n in (-2, 1):
        a = adelic_cohomology(X, O(n), WindowPolicy(mode="alternating"))
        assert a.dims == adelic_cohomology(X, O(n)).dims


def test_window_complex_is_a_complex():
    D = Divisor({X.inf: 2})
    M = AdelicWindowModule(X, D, initial_window(X, D, None), None, None)
    for mode in ("normalized", "alternating"):
        dold_kan(M, mode, top=2).check_d2()


def test_skyscrapers():
    sky = Skyscraper(((X.inf, 1), (X.point("t^2+2"), 2)))
    assert adelic_cohomology(X, sky).dims == {0: 5, 1: 0}
    assert cech_cohomology(X, sky).dims == {0: 5, 1: 0}


def test_rationals():
    Q = P1(QQ)
    assert adelic_cohomology(Q, O(-3, Q)).dims == {0: 0, 1: 2}


def test_spec_z():
    assert adelic_cohomology(SpecZ(), LineBundle(Divisor())).dims == {0: 1, 1: 0}
    with pytest.raises(ValueError):
        adelic_cohomology(SpecZ(), LineBundle(Divisor({SpecZ().point(3): 1})))


def test_non_stabilization_is_reported():
    rep = adelic_cohomology(X, O(4), WindowPolicy(max_rounds=1))
    assert not rep.stabilized
    assert rep.dims == {}
    assert len(rep.windows_used) == 1


def test_representatives():
    rep = adelic_cohomology(X, O(-3), representatives=True)
    assert len(rep.representatives["H1"]) == 2
    rep = adelic_cohomology(X, O(2), representatives=True)
    assert len(rep.representatives["H0"]) == 3


def test_riemann_roch_basis_size():
    for n in range(-2, 4):
        assert len(riemann_roch_basis(X, Divisor({X.point("t"): n}))) == max(n + 1, 0)


def test_uniformizer_choice_is_invisible():
    x = X.point("t")
    D = Divisor({x: -3})
    alt = {x: X.rat(X.t + X.t**2), X.inf: X.rat(1) / X.rat(X.t + 1)}
    a = adelic_cohomology(X, LineBundle(D), WindowPolicy(uniformizers=alt))
    assert a.dims == adelic_cohomology(X, LineBundle(D)).dims == {0: 0, 1: 2}


@settings(max_examples=5, deadline=None)
@given(st.integers(-3, 3), st.integers(0, 1000))
def test_sampled_cocycles_are_explained(d, seed):
    rep = resolution_check(X, Divisor({X.inf: d}), samples=4, seed=seed)
    assert rep.ok, rep.unexplained
