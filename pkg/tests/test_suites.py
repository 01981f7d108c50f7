import json

import pytest

from adelekit import FinitePoset
from adelekit.cli import canonical_json
from adelekit.demos import run_demos
from adelekit.suites import ChainModule, SUITES, cosimplicial_suite, homotopy_suite, run_suite


def test_small_suites_pass():
    for name, kw in [("cosimplicial", {"samples": 5, "max_level": 2}),
                     ("flasque", {"samples": 10, "kernels": 5}),
                     ("homotopy", {"max_level": 2}),
                     ("descent", {"samples": 3, "ranks": (1, 2), "orbit": 2, "twists": (-1, 1)}),
                     ("weil", {"samples": 5})]:
        rep = run_suite(name, seed=3, **kw)
        assert rep.passed, rep.first_failure()
    assert set(SUITES) == {"cosimplicial", "flasque", "homotopy", "descent", "weil"}


def test_report_is_deterministic_json():
    a = canonical_json(cosimplicial_suite(seed=5, samples=4, max_level=2).to_json())
    b = canonical_json(cosimplicial_suite(seed=5, samples=4, max_level=2).to_json())
    assert a == b
    assert json.loads(a)["seed"] == 5


def test_chain_module_homotopy_contracts():
    rep = homotopy_suite(seed=0, max_level=3, posets=[FinitePoset.chain(3)])
    assert rep.passed
    M = ChainModule(FinitePoset.chain(3))
    assert M.dim(0) == 3


def test_poset_without_maximum_is_rejected():
    with pytest.raises(ValueError):
        homotopy_suite(seed=0, max_level=2, posets=[FinitePoset(2, [])])


def test_failure_has_witness():
    from adelekit.suites import _Checker

    chk = _Checker("always fails")
    chk.check(False, lambda: {"why": "forced"})
    res = chk.result()
    assert not res.passed and res.witness == {"why": "forced"}


def test_demos():
    ds = run_demos()
    assert [d["name"] for d in ds] == ["curve-diagram", "skyscraper-rigidity", "adelic-vs-cech",
                                       "prod-Fp-not-descent", "weil-reduction"]
    assert all(d["passed"] for d in ds)
    canonical_json(ds)
