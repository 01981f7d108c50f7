import json
import random
import subprocess
import sys

import pytest

from adelekit import P1
from adelekit import cli
from adelekit.cohomology import CohomologyReport
from adelekit.descent import from_weil, gauge_act, random_gauge, random_idele


def run(capsys, *argv):
    code = cli.main(list(argv))
    out = capsys.readouterr().out
    return code, (json.loads(out) if out.strip() else None)


@pytest.fixture(scope="module")
def cocycles(tmp_path_factory):
    d = tmp_path_factory.mktemp("cocycles")
    X = P1("f5")
    rng = random.Random(0)
    phi = from_weil(random_idele(X, 2, rng))
    psi = gauge_act(random_gauge(X, 2, rng), phi)
    line = from_weil(random_idele(X, 1, rng))
    paths = {}
    for name, c in [("a", phi), ("b", psi), ("line", line)]:
        p = d / f"{name}.json"
        p.write_text(json.dumps(c.to_json()))
        paths[name] = str(p)
    bad = json.loads(open(paths["a"]).read())
    xx = bad["entries"][0][0]["components"]["(x,x)"]
    xx["exceptions"]["t+1"] = {"num": "3", "den": "1"}
    p = d / "bad.json"
    p.write_text(json.dumps(bad))
    paths["bad"] = str(p)
    return paths


def test_cohomology_with_oracle(capsys):
    code, out = run(capsys, "cohomology", "--sheaf", "O(3)", "--oracle", "cech")
    assert code == 0
    assert out["dims"] == {"0": 4, "1": 0}
    assert out["diff"] == []


def test_cohomology_skyscraper_and_divisor(capsys):
    assert run(capsys, "cohomology", "--sheaf", "sky(t,2)")[1]["dims"] == {"0": 2, "1": 0}
    assert run(capsys, "cohomology", "--sheaf", "O(2*[t]-[inf])")[1]["dims"] == {"0": 2, "1": 0}
    assert run(capsys, "cohomology", "--sheaf", "O", "--model", "z")[1]["dims"] == {"0": 1, "1": 0}


def test_unstabilized_exit_code(capsys):
    code, out = run(capsys, "cohomology", "--sheaf", "O(4)", "--max-rounds", "1")
    assert code == 2
    assert out["stabilized"] is False


def test_oracle_mismatch_exit_code(capsys, monkeypatch):
    monkeypatch.setattr(cli, "cech_cohomology",
                        lambda m, s: CohomologyReport({0: 9, 1: 0}, True, [], method="cech"))
    code, out = run(capsys, "cohomology", "--sheaf", "O(1)", "--oracle", "cech")
    assert code == 3
    assert out["diff"][0]["degree"] == "0"


def test_glue_and_splitting(capsys, cocycles):
    code, out = run(capsys, "glue", "--cocycle", cocycles["a"])
    assert code == 0 and out["validation"]["status"] == "valid"
    assert sum(out["bundle"]["splitting_type"]) == out["bundle"]["degree"]
    code, out = run(capsys, "glue", "--cocycle", cocycles["line"])
    assert out["weil"]["degree"] == out["bundle"]["degree"]
    code, out = run(capsys, "splitting", "--cocycle", cocycles["b"])
    assert code == 0 and set(out["h0_profile"]) == {str(m) for m in range(-3, 4)}


def test_invalid_cocycle(capsys, cocycles):
    code, out = run(capsys, "glue", "--cocycle", cocycles["bad"], "--check-only")
    assert code == 1
    assert out["validation"]["witness"]["chain"] == "(x,x,eta)"


def test_equiv(capsys, cocycles):
    assert run(capsys, "equiv", cocycles["a"], cocycles["b"])[1] == {"equivalent": "yes"}


def test_suite_command(capsys):
    code, out = run(capsys, "suite", "weil", "--samples", "3", "--seed", "2")
    assert code == 0 and out["suite"] == "weil"


def test_suite_failure_exit(capsys, monkeypatch):
    from adelekit import suites

    def broken(name, seed=0, **kw):
        rep = suites.SuiteReport(name, seed)
        rep.results.append(suites.PropertyResult("p", False, 1, {"x": 1}, 0.0))
        return rep

    monkeypatch.setattr(suites, "run_suite", broken)
    code, out = run(capsys, "suite", "weil")
    assert code == 1
    assert out["first_failure"]["witness"] == {"x": 1}


def test_output_is_byte_identical(tmp_path):
    outs = []
    for k in range(2):
        p = tmp_path / f"r{k}.json"
        assert cli.main(["suite", "cosimplicial", "--samples", "3", "--seed", "7", "--out", str(p)]) == 0
        outs.append(p.read_bytes())
    assert outs[0] == outs[1]


def test_bad_sheaf_is_an_error(capsys):
    assert cli.main(["cohomology", "--sheaf", "E(2)"]) == 1


def test_canonical_json_rejects_floats():
    with pytest.raises(TypeError):
        cli.canonical_json({"a": 0.5})


def test_console_entry_point():
    r = subprocess.run([sys.executable, "-m", "adelekit.cli", "paper-demos"], capture_output=True, text=True)
    assert r.returncode == 0
    assert len(json.loads(r.stdout)["demos"]) == 5
