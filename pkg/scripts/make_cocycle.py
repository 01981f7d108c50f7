"""Write sample cocycle JSON files for the glue/splitting/equiv commands.

    python3 scripts/make_cocycle.py OUTDIR [--seed 0] [--rank 2]

Produces weil.json (a Weil datum), gauged.json (the same bundle moved by a
random gauge), other.json (an unrelated bundle) and bad.json (a corrupted
copy that fails validation).
"""

import argparse
import json
import pathlib
import random

from adelekit import P1
from adelekit.adeles import from_components, make_component
from adelekit.descent import Cocycle, from_weil, gauge_act, random_gauge, random_idele


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("outdir")
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--rank", type=int, default=2)
    ap.add_argument("--field", default="f5")
    a = ap.parse_args()
    X = P1(a.field)
    rng = random.Random(a.seed)
    out = pathlib.Path(a.outdir)
    out.mkdir(parents=True, exist_ok=True)
    phi = from_weil(random_idele(X, a.rank, rng))
    psi = gauge_act(random_gauge(X, a.rank, rng), phi)
    other = from_weil(random_idele(X, a.rank, rng))
    e = phi.entries[0][0]
    xx = X.pattern("(x,x)")
    comps = dict(e.comp)
    comps[xx] = make_component(X, {X.point("t+1"): X.rat(3)}, e[xx].default)
    rows = [list(r) for r in phi.entries]
    rows[0][0] = from_components(X, 1, comps)
    bad = Cocycle(X, a.rank, rows)
    for name, c in [("weil", phi), ("gauged", psi), ("other", other), ("bad", bad)]:
        (out / f"{name}.json").write_text(json.dumps(c.to_json(), sort_keys=True, indent=2) + "\n")
        print(out / f"{name}.json")


if __name__ == "__main__":
    main()
