"""adelekit command line.

    adelekit cohomology --sheaf "O(3)" --field f5 --oracle cech
    adelekit glue --cocycle phi.json [--check-only]
    adelekit splitting --cocycle phi.json
    adelekit equiv a.json b.json
    adelekit suite cosimplicial --seed 7
    adelekit paper-demos

Output is canonical JSON (sorted keys, integers and strings only).
"""

from __future__ import annotations

import argparse
import json
import os
import re
import sys
from dataclasses import dataclass

from .adeles import LineBundle, Skyscraper
from .cohomology import WindowPolicy, adelic_cohomology, cech_cohomology
from .descent import Cocycle, DescentError, gauge_equivalent, glue, validate, weil_reduce
from .local import DEFAULT_PRECISION, Divisor, PrecisionError
from .scheme import P1, FinitePoset, SpecZ, model_from_descriptor

EXIT_OK, EXIT_FAIL, EXIT_UNSTABLE, EXIT_MISMATCH = 0, 1, 2, 3


@dataclass
class RunConfig:
    model: str = "p1"
    field: str = "f5"
    precision: int | None = None
    max_rounds: int | None = None
    seed: int = 0
    out: str | None = None

    def build_model(self):
        if self.model.lower() == "p1":
            return P1(self.field)
        return model_from_descriptor(self.model)

    def apply_precision(self):
        if self.precision is not None:
            os.environ["ADELEKIT_PRECISION"] = str(self.precision)


def canonical_json(obj) -> str:
    _reject_floats(obj)
    return json.dumps(obj, sort_keys=True, indent=2, ensure_ascii=False) + "\n"


def _reject_floats(obj):
    if isinstance(obj, float):
        raise TypeError("floats are not allowed in reports")
    if isinstance(obj, dict):
        for v in obj.values():
            _reject_floats(v)
    elif isinstance(obj, (list, tuple)):
        for v in obj:
            _reject_floats(v)


def emit(cfg: RunConfig, obj):
    text = canonical_json(obj)
    if cfg.out:
        with open(cfg.out, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


_SKY = re.compile(r"sky\((.*)\)$")
_O = re.compile(r"O(?:\((.*)\))?$")


def parse_sheaf(model, s: str):
    """``O``, ``O(3)``, ``O(2*[t]-[inf])`` or ``sky(t,2;inf,1)``."""
    s = s.strip()
    m = _SKY.match(s)
    if m:
        fibres = []
        for part in filter(None, m.group(1).split(";")):
            label, _, d = part.rpartition(",")
            fibres.append((model.point(label.strip()), int(d)))
        return Skyscraper(tuple(sorted(fibres, key=lambda fd: fd[0].sort_key())))
    m = _O.match(s)
    if m:
        return LineBundle(Divisor.parse(model, m.group(1) or "0"))
    raise ValueError(f"cannot parse sheaf {s!r}")


def _dims(d):
    return {str(k): v for k, v in sorted(d.items())}


# ---------------------------------------------------------------------------
# commands


def cmd_cohomology(cfg: RunConfig, args) -> int:
    model = cfg.build_model()
    sheaf = parse_sheaf(model, args.sheaf)
    policy = WindowPolicy(max_rounds=cfg.max_rounds, precision=cfg.precision, mode=args.mode)
    rep = adelic_cohomology(model, sheaf, policy)
    out = rep.to_json()
    out["sheaf"] = args.sheaf
    code = EXIT_OK if rep.stabilized else EXIT_UNSTABLE
    if args.oracle == "cech":
        if not isinstance(model, P1):
            raise SystemExit("the Cech oracle is available on P1 only")
        ref = cech_cohomology(model, sheaf)
        diff = [{"degree": str(k), "adelic": rep.dims.get(k), "cech": ref.dims.get(k)}
                for k in sorted(set(rep.dims) | set(ref.dims)) if rep.dims.get(k) != ref.dims.get(k)]
        out["oracle"] = {"method": "cech", "dims": _dims(ref.dims)}
        out["diff"] = diff
        if rep.stabilized and diff:
            code = EXIT_MISMATCH
    emit(cfg, out)
    return code


def _load_cocycle(cfg: RunConfig, path):
    with open(path, encoding="utf-8") as fh:
        d = json.load(fh)
    model = model_from_descriptor(d["model"]) if "model" in d else cfg.build_model()
    return Cocycle.from_json(d, model)


def cmd_glue(cfg: RunConfig, args) -> int:
    phi = _load_cocycle(cfg, args.cocycle)
    v = validate(phi)
    out = {"validation": v.to_json()}
    if v.ok and not args.check_only:
        B = glue(phi)
        out["bundle"] = B.invariants()
        if B.rank == 1 and isinstance(phi.model, P1):
            out["weil"] = weil_reduce(B).to_json()
    emit(cfg, out)
    return EXIT_OK if v.ok else EXIT_FAIL


def cmd_splitting(cfg: RunConfig, args) -> int:
    phi = _load_cocycle(cfg, args.cocycle)
    v = validate(phi)
    if not v.ok:
        emit(cfg, {"validation": v.to_json()})
        return EXIT_FAIL
    B = glue(phi)
    emit(cfg, {"rank": B.rank, "degree": B.degree(), "splitting_type": list(B.splitting_type()),
               "h0_profile": {str(m): h for m, h in B.h0_profile(-3, 3).items()}})
    return EXIT_OK


def cmd_equiv(cfg: RunConfig, args) -> int:
    a, b = _load_cocycle(cfg, args.a), _load_cocycle(cfg, args.b)
    for phi in (a, b):
        if not validate(phi).ok:
            emit(cfg, {"validation": phi.validated.to_json()})
            return EXIT_FAIL
    emit(cfg, {"equivalent": gauge_equivalent(a, b)})
    return EXIT_OK


def cmd_suite(cfg: RunConfig, args) -> int:
    from .suites import run_suite

    kw = {}
    model = cfg.build_model() if args.model_given else None
    if args.name in ("cosimplicial", "flasque", "descent", "weil") and args.samples is not None:
        kw["samples"] = args.samples
    if args.name == "descent" and args.rank is not None:
        kw["ranks"] = (args.rank,)
    if args.name == "homotopy" and model is not None:
        if not isinstance(model, FinitePoset) or model.eta is None:
            raise SystemExit("suite homotopy needs a finite poset with a maximum, e.g. --model fp4chain")
        kw["posets"] = [model]
    elif args.name == "cosimplicial" and isinstance(model, FinitePoset):
        kw["poset"] = model
    elif model is not None and isinstance(model, P1):
        kw["model"] = model
    rep = run_suite(args.name, seed=cfg.seed, **kw)
    out = rep.to_json()
    bad = rep.first_failure()
    if bad is not None:
        out["first_failure"] = bad.to_json()
    emit(cfg, out)
    return EXIT_OK if rep.passed else EXIT_FAIL


def cmd_demos(cfg: RunConfig, args) -> int:
    from .demos import run_demos

    demos = run_demos()
    for d in demos:
        mark = "PASS" if d["passed"] else "FAIL"
        print(f"[{mark}] {d['name']}: {d['statement']}", file=sys.stderr)
    emit(cfg, {"demos": demos})
    return EXIT_OK if all(d["passed"] for d in demos) else EXIT_FAIL


# ---------------------------------------------------------------------------
# argument parsing


def _common() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(add_help=False)
    p.add_argument("--model", default=None, help="p1 (default), z, fp<N>chain, or a JSON descriptor")
    p.add_argument("--field", default="f5", help="base field of P1: f<p> or q")
    p.add_argument("--precision", type=int, default=None,
                   help=f"series precision N (default $ADELEKIT_PRECISION or {DEFAULT_PRECISION})")
    p.add_argument("--max-rounds", type=int, default=None, help="cap on window growth rounds")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", default=None, help="write the JSON report here instead of stdout")
    return p


def build_parser() -> argparse.ArgumentParser:
    common = _common()
    ap = argparse.ArgumentParser(prog="adelekit", description="Adelic cohomology and descent on curves.")
    ap.add_argument("--paper-demos", action="store_true", help="run the curated worked examples")
    sub = ap.add_subparsers(dest="cmd")

    p = sub.add_parser("cohomology", parents=[common], help="sheaf cohomology from the adelic complex")
    p.add_argument("--sheaf", required=True, help='e.g. "O(3)", "O(2*[t]-[inf])", "sky(t,2;inf,1)"')
    p.add_argument("--oracle", choices=["cech"], default=None)
    p.add_argument("--mode", choices=["normalized", "alternating"], default="normalized")
    p.set_defaults(fn=cmd_cohomology)

    p = sub.add_parser("glue", parents=[common], help="validate a cocycle and describe its bundle")
    p.add_argument("--cocycle", required=True)
    p.add_argument("--check-only", action="store_true")
    p.set_defaults(fn=cmd_glue)

    p = sub.add_parser("splitting", parents=[common], help="splitting type of a bundle on P1")
    p.add_argument("--cocycle", required=True)
    p.set_defaults(fn=cmd_splitting)

    p = sub.add_parser("equiv", parents=[common], help="gauge equivalence of two cocycles")
    p.add_argument("a")
    p.add_argument("b")
    p.set_defaults(fn=cmd_equiv)

    p = sub.add_parser("suite", parents=[common], help="property suites")
    p.add_argument("name", choices=["cosimplicial", "flasque", "homotopy", "descent", "weil"])
    p.add_argument("--samples", type=int, default=None)
    p.add_argument("--rank", type=int, default=None)
    p.set_defaults(fn=cmd_suite)

    p = sub.add_parser("paper-demos", parents=[common], help="run the curated worked examples")
    p.set_defaults(fn=cmd_demos)
    return ap


def main(argv=None) -> int:
    ap = build_parser()
    args = ap.parse_args(argv)
    if args.paper_demos and args.cmd is None:
        args = ap.parse_args(["paper-demos"])
    if args.cmd is None:
        ap.print_help(sys.stderr)
        return EXIT_FAIL
    args.model_given = args.model is not None
    cfg = RunConfig(model=args.model or "p1", field=args.field, precision=args.precision,
                    max_rounds=args.max_rounds, seed=args.seed, out=args.out)
    cfg.apply_precision()
    try:
        return args.fn(cfg, args)
    except (DescentError, PrecisionError, ValueError) as e:
        print(f"adelekit: error: {e}", file=sys.stderr)
        return EXIT_FAIL


if __name__ == "__main__":
    sys.exit(main())
