"""Property suites: cosimplicial identities, flasqueness, homotopy contraction, descent.

Each suite returns a :class:`SuiteReport` with one :class:`PropertyResult`
per property.  A failing property carries the first witness found.
"""

from __future__ import annotations

import itertools
import random
import time
from dataclasses import dataclass, field

from . import linalg as la
from .adeles import (
    Adele,
    codegeneracy,
    coface,
    diag,
    extend_by_zero,
    random_adele,
    random_function,
    restrict,
)
from .cohomology import CosimplicialModule, dold_kan
from .descent import (
    degree_of,
    from_weil,
    gauge_act,
    gauge_equivalent,
    glue,
    random_gauge,
    random_idele,
    twist_gluing,
    validate,
    weil_reduce,
    Bundle,
)
from .fields import GF
from .poly import Poly
from .scheme import P1, ChainType, FinitePoset, apply_map, contract_chain, degeneracy, face, monotone_maps

SUITES = ("cosimplicial", "flasque", "homotopy", "descent", "weil")


@dataclass
class PropertyResult:
    name: str
    passed: bool
    checked: int = 0
    witness: dict | None = None
    seconds: float = 0.0

    def to_json(self):
        # timings stay out of the report so that reruns are byte-identical
        out = {"name": self.name, "passed": self.passed, "checked": self.checked}
        if self.witness is not None:
            out["witness"] = self.witness
        return out


@dataclass
class SuiteReport:
    suite: str
    seed: int
    results: list = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return all(r.passed for r in self.results)

    def first_failure(self):
        return next((r for r in self.results if not r.passed), None)

    def to_json(self):
        return {"suite": self.suite, "seed": self.seed, "passed": self.passed,
                "results": [r.to_json() for r in self.results]}


class _Checker:
    """Counts checks and keeps the first failure."""

    def __init__(self, name):
        self.name = name
        self.count = 0
        self.witness = None
        self.t0 = time.perf_counter()

    def check(self, ok, witness_fn):
        self.count += 1
        if not ok and self.witness is None:
            self.witness = witness_fn()
        return ok

    def result(self):
        return PropertyResult(self.name, self.witness is None, self.count, self.witness,
                              time.perf_counter() - self.t0)


# ---------------------------------------------------------------------------
# chain-indexed cosimplicial module of a finite poset


class ChainModule(CosimplicialModule):
    """k^{chains of level n}: functions on chains, pulled back along faces."""

    def __init__(self, poset: FinitePoset, field=None):
        self.poset = poset
        self.field = field or GF(5)
        self._chains = {}

    def chains(self, n):
        if n not in self._chains:
            cs = self.poset.chain_types(n)
            self._chains[n] = (cs, {c: i for i, c in enumerate(cs)})
        return self._chains[n]

    def dim(self, n):
        return len(self.chains(n)[0])

    def _pullback(self, n_src, n_tgt, op):
        f = self.field
        src_idx = self.chains(n_src)[1]
        tgt = self.chains(n_tgt)[0]
        M = la.zeros(f, len(tgt), len(src_idx))
        for r, c in enumerate(tgt):
            M[r][src_idx[op(c)]] = f.one
        return M

    def coface(self, n, i):
        return self._pullback(n, n + 1, lambda c: face(c, i))

    def codegeneracy(self, n, i):
        return self._pullback(n, n - 1, lambda c: degeneracy(c, i))

    def homotopy(self, n):
        """H: C^n -> C^(n-1), (Hf)(c) = (-1)^n f(h(c, c_last)) with h = contract_chain.

        Satisfies dH + Hd = id - ev_max on the alternating complex.
        """
        f = self.field
        eta = self.poset.eta
        src_idx = self.chains(n)[1]
        tgt = self.chains(n - 1)[0]
        sign = f.one if n % 2 == 0 else f.neg(f.one)
        M = la.zeros(f, len(tgt), len(src_idx))
        for r, c in enumerate(tgt):
            long = degeneracy(c, c.level)
            alpha = (0,) * (len(long) - 1) + (1,)
            M[r][src_idx[contract_chain(long, alpha, eta, self.poset)]] = sign
        return M


def _matmul(f, A, B):
    if not A or not B:
        return la.zeros(f, len(A), len(B[0]) if B else 0)
    Bt = list(zip(*B))
    return [[_dot(f, row, col) for col in Bt] for row in A]


def _dot(f, a, b):
    acc = f.zero
    for x, y in zip(a, b):
        if x != f.zero and y != f.zero:
            acc = f.add(acc, f.mul(x, y))
    return acc


def _eye(f, n):
    return [[f.one if i == j else f.zero for j in range(n)] for i in range(n)]


def default_poset():
    """Five elements, two minimal, a top element; not a chain."""
    return FinitePoset(5, [(0, 2), (1, 2), (0, 3), (2, 4), (3, 4)])


def posets_with_maximum():
    out = [FinitePoset.chain(k) for k in range(3, 7)]
    out.append(FinitePoset(3, [(0, 2), (1, 2)]))
    out.append(FinitePoset(4, [(0, 1), (0, 2), (1, 3), (2, 3)]))
    out.append(default_poset())
    out.append(FinitePoset(6, [(0, 3), (1, 3), (1, 4), (2, 4), (3, 5), (4, 5)]))
    return out


# ---------------------------------------------------------------------------
# cosimplicial suite


def _simplicial_identities(chk_faces, chk_mixed, chk_degen, chains_by_level):
    """The five families on chains (faces delete, degeneracies repeat)."""
    for n, chains in chains_by_level.items():
        for c in chains:
            for j in range(n + 1):
                for i in range(j):
                    if n >= 2:
                        chk_faces.check(face(face(c, j), i) == face(face(c, i), j - 1),
                                        lambda: {"chain": str(c), "i": i, "j": j, "family": "d_i d_j"})
            for j in range(n + 1):
                s = degeneracy(c, j)
                for i in range(n + 2):
                    lhs = face(s, i)
                    if i < j:
                        rhs = degeneracy(face(c, i), j - 1) if n >= 1 else None
                        fam = "d_i s_j (i<j)"
                    elif i in (j, j + 1):
                        rhs = c
                        fam = "d_j s_j = d_j+1 s_j = id"
                    else:
                        rhs = degeneracy(face(c, i - 1), j)
                        fam = "d_i s_j (i>j+1)"
                    if rhs is not None:
                        chk_mixed[fam].check(lhs == rhs, lambda: {"chain": str(c), "i": i, "j": j, "family": fam})
                for i in range(j + 1):
                    chk_degen.check(degeneracy(degeneracy(c, j), i) == degeneracy(degeneracy(c, i), j + 1),
                                    lambda: {"chain": str(c), "i": i, "j": j, "family": "s_i s_j"})


def _cosimplicial_adele_identities(a: Adele, chk):
    """Cosimplicial identities for one adele of level n."""
    n = a.level
    wit = lambda fam, i, j: (lambda: {"family": fam, "level": n, "i": i, "j": j, "adele": a.to_json()})
    for j in range(n + 2):
        for i in range(j):
            chk["d^j d^i = d^i d^(j-1)"].check(coface(coface(a, i), j) == coface(coface(a, j - 1), i),
                                               wit("d^j d^i", i, j))
    for j in range(n + 1):
        d = coface(a, j)
        chk["s^j d^j = s^j d^(j+1) = id"].check(codegeneracy(d, j) == a, wit("s^j d^j", j, j))
        chk["s^j d^j = s^j d^(j+1) = id"].check(codegeneracy(coface(a, j + 1), j) == a, wit("s^j d^j+1", j, j))
        for i in range(n + 2):
            if i < j and n >= 1:
                chk["s^j d^i = d^i s^(j-1)"].check(codegeneracy(coface(a, i), j) == coface(codegeneracy(a, j - 1), i),
                                                   wit("s^j d^i", i, j))
            elif i > j + 1:
                chk["s^j d^i = d^(i-1) s^j"].check(codegeneracy(coface(a, i), j) == coface(codegeneracy(a, j), i - 1),
                                                   wit("s^j d^i", i, j))
    if n >= 2:
        for j in range(n - 1):
            for i in range(j + 1):
                chk["s^j s^i = s^i s^(j+1)"].check(
                    codegeneracy(codegeneracy(a, i), j) == codegeneracy(codegeneracy(a, j + 1), i), wit("s^j s^i", i, j))


def cosimplicial_suite(seed: int = 0, samples: int = 100, max_level: int = 3, model=None, poset=None) -> SuiteReport:
    rng = random.Random(seed)
    model = model or P1("f5")
    poset = poset or default_poset()
    report = SuiteReport("cosimplicial", seed)
    # chains of a finite poset, exhaustively
    chk_faces = _Checker("poset: d_i d_j = d_(j-1) d_i")
    fams = ["d_i s_j (i<j)", "d_j s_j = d_j+1 s_j = id", "d_i s_j (i>j+1)"]
    chk_mixed = {f: _Checker("poset: " + f) for f in fams}
    chk_degen = _Checker("poset: s_i s_j = s_(j+1) s_i")
    _simplicial_identities(chk_faces, chk_mixed, chk_degen,
                           {n: poset.chain_types(n) for n in range(max_level + 1)})
    report.results += [chk_faces.result()] + [chk_mixed[f].result() for f in fams] + [chk_degen.result()]
    chk = _Checker("poset: order axioms")
    chk.check(poset.check_order_axioms(), lambda: {"poset": poset.descriptor()})
    report.results.append(chk.result())
    # the same identities on the chain-indexed module, as matrices
    report.results.append(_module_identities(ChainModule(poset), max_level))
    # adeles over the curve
    names = ["d^j d^i = d^i d^(j-1)", "s^j d^i = d^i s^(j-1)", "s^j d^j = s^j d^(j+1) = id",
             "s^j d^i = d^(i-1) s^j", "s^j s^i = s^i s^(j+1)"]
    chk = {k: _Checker("adeles: " + k) for k in names}
    for level in range(max_level + 1):
        for _ in range(samples):
            _cosimplicial_adele_identities(random_adele(model, level, rng), chk)
    report.results += [chk[k].result() for k in names]
    return report


def _module_identities(M: CosimplicialModule, max_level):
    f = M.field
    chk = _Checker("poset module: cosimplicial identities (matrices)")
    d = lambda n, i: M.coface(n, i)  # level n -> n+1
    s = lambda n, i: M.codegeneracy(n, i)  # level n -> n-1
    for n in range(max_level + 1):
        for j in range(n + 2):
            for i in range(j):
                chk.check(_matmul(f, d(n + 1, j), d(n, i)) == _matmul(f, d(n + 1, i), d(n, j - 1)),
                          lambda: {"family": "d^j d^i", "level": n, "i": i, "j": j})
        for j in range(n + 1):
            eye = _eye(f, M.dim(n))
            chk.check(_matmul(f, s(n + 1, j), d(n, j)) == eye and _matmul(f, s(n + 1, j), d(n, j + 1)) == eye,
                      lambda: {"family": "s^j d^j", "level": n, "j": j})
            for i in range(n + 2):
                if i < j and n >= 1:
                    chk.check(_matmul(f, s(n + 1, j), d(n, i)) == _matmul(f, d(n - 1, i), s(n, j - 1)),
                              lambda: {"family": "s^j d^i (i<j)", "level": n, "i": i, "j": j})
                elif i > j + 1:
                    chk.check(_matmul(f, s(n + 1, j), d(n, i)) == _matmul(f, d(n - 1, i - 1), s(n, j)),
                              lambda: {"family": "s^j d^i (i>j+1)", "level": n, "i": i, "j": j})
        if n >= 2:
            for j in range(n - 1):
                for i in range(j + 1):
                    chk.check(_matmul(f, s(n - 1, j), s(n, i)) == _matmul(f, s(n - 1, i), s(n, j + 1)),
                              lambda: {"family": "s^j s^i", "level": n, "i": i, "j": j})
    return chk.result()


# ---------------------------------------------------------------------------
# flasque / lache suite


def random_opens(model, rng, count=5, pool=None):
    pool = pool or model.first_points(8)
    return [frozenset(rng.sample(pool, rng.randint(1, 3))) for _ in range(count)]


def flasque_suite(seed: int = 0, samples: int = 100, kernels: int = 50, model=None) -> SuiteReport:
    rng = random.Random(seed)
    model = model or P1("f5")
    opens = random_opens(model, rng)
    pool = model.first_points(8)
    report = SuiteReport("flasque", seed)
    sec = _Checker("restrict . extend_by_zero = id")
    diff = _Checker("extend_by_zero(restrict(a)) differs from a only at S")
    lin = _Checker("extend_by_zero is linear over global functions")
    for k in range(samples):
        S = opens[k % len(opens)]
        level = rng.randint(0, 2)
        a = random_adele(model, level, rng, pool)
        s = restrict(a, S)
        e = extend_by_zero(s)
        sec.check(restrict(e, S) == s, lambda: {"removed": sorted(map(str, S)), "section": s.to_json()})
        diff.check(_agrees_off(model, a, e, S), lambda: {"removed": sorted(map(str, S)), "adele": a.to_json()})
        r = random_function(model, rng, rng.sample(pool, 2))
        lhs = extend_by_zero(restrict(diag(r, level, model), S) * s)
        rhs = diag(r, level, model) * e
        lin.check(lhs == rhs, lambda: {"removed": sorted(map(str, S)), "r": str(r), "section": s.to_json()})
    report.results += [sec.result(), diff.result(), lin.result()]
    ker = _Checker("kernels of 2x3 adelic maps over U extend to X")
    for k in range(kernels):
        S = opens[k % len(opens)]
        level = rng.randint(0, 1)
        F = [[random_adele(model, level, rng, pool) for _ in range(3)] for _ in range(2)]
        FU = [[restrict(a, S) for a in row] for row in F]
        for _ in range(2):
            v = _kernel_element(model, FU, rng, pool, S, level)
            zero_on_u = all(_dot_adeles(row, v).is_zero() for row in FU)
            ext = [extend_by_zero(x) for x in v]
            ok = zero_on_u and all(_dot_adeles(row, ext).is_zero() for row in F) \
                and all(restrict(e, S) == x for e, x in zip(ext, v))
            ker.check(ok, lambda: {"removed": sorted(map(str, S)), "kernel": [x.to_json() for x in v]})
    report.results.append(ker.result())
    report.results.append(flatness_check(model, rng))
    return report


def flatness_check(model, rng, samples: int = 20, pool=None) -> PropertyResult:
    """0 -> k[t]/(h) --g--> k[t]/(gh) -> k[t]/(g) -> 0 stays exact after completing at x.

    Completion sends k[t]/(f) to O_x / pi^v(f); the maps are computed from
    expansions and checked with exact ranks.
    """
    from .cohomology import local_digits

    pool = pool or [p for p in model.first_points(6) if p != model.inf]
    chk = _Checker("completion preserves short exact sequences of k[t]-modules")
    f = model.field
    for _ in range(samples):
        x = rng.choice(pool)
        pi = x.label
        g = pi ** rng.randint(0, 2) * _coprime(model, rng, pi)
        h = pi ** rng.randint(0, 2) * _coprime(model, rng, pi)
        a, b = _poly_val(h, pi), _poly_val(g, pi)
        d = x.residue_degree
        gr = model.rat(g)
        # columns: images of the basis c * pi^j of O/pi^a under multiplication by g
        cols = []
        for j in range(a):
            for c in range(d):
                e = model.rat(Poly.monomial(f, c)) * model.rat(pi) ** j
                digs = local_digits(model, gr * e, x, 0, a + b)
                cols.append([v for dv in digs for v in dv])
        M = la.transpose(cols, (a + b) * d) if cols else []
        injective = la.rank(f, cols) == a * d if cols else True
        # projection to O/pi^b keeps the first b digits: it kills the image
        killed = all(all(v == f.zero for v in col[: b * d]) for col in cols)
        middle = (a + b) * d - b * d == (la.rank(f, cols) if cols else 0)
        chk.check(injective and killed and middle,
                  lambda: {"point": str(x), "g": str(g), "h": str(h), "matrix_rows": len(M)})
    return chk.result()


def _coprime(model, rng, pi):
    f = model.field
    while True:
        q = Poly(f, [f.random_element(rng) for _ in range(rng.randint(1, 3))])
        if q and (q % pi):
            return q


def _poly_val(p, pi):
    v = 0
    while p and not (p % pi):
        p = p // pi
        v += 1
    return v


def _agrees_off(model, a, e, S):
    """a and e agree at every point outside S and in the F-pattern."""
    for (c, va), (_, ve) in zip(a.components, e.components):
        if not hasattr(va, "exceptions"):
            if va != ve:
                return False
            continue
        pts = (set(va.points()) | set(ve.points())) - set(S)
        for x in pts:
            from .adeles import compare_values
            if not compare_values(model, x, va.value_at(model, x), ve.value_at(model, x)).consistent:
                return False
        if va.default != ve.default:
            return False
        for x in S:
            if not ve.value_at(model, x) == 0:
                return False
    return True


def _dot_adeles(row, vec):
    acc = None
    for a, b in zip(row, vec):
        t = a * b
        acc = t if acc is None else acc + t
    return acc


def _kernel_element(model, F, rng, pool, S, level):
    """Cross product of the two rows, scaled by a random adele: F v = 0 exactly."""
    (a, b, c), (d, e, f) = F
    r = restrict(random_adele(model, level, rng, pool), S)
    return [(b * f - c * e) * r, (c * d - a * f) * r, (a * e - b * d) * r]


# ---------------------------------------------------------------------------
# homotopy suite


def homotopy_suite(seed: int = 0, max_level: int = 3, posets=None) -> SuiteReport:
    posets = posets or posets_with_maximum()
    report = SuiteReport("homotopy", seed)
    sq = _Checker("contraction squares h(c.f, alpha.f) = h(c, alpha).f")
    ends = _Checker("alpha = 0 gives c, alpha = 1 gives the constant chain")
    coh = _Checker("normalized complex has cohomology only in degree 0")
    htp = _Checker("dH + Hd = id - ev_max on the alternating complex")
    for P in posets:
        eta = P.eta
        if eta is None:
            raise ValueError(f"{P!r} has no maximum; the contraction needs one")
        for n in range(max_level + 1):
            for c in P.chain_types(n):
                for alpha in _alphas(n):
                    h = contract_chain(c, alpha, eta, P)
                    for k in range(max_level + 1):
                        for fmap in monotone_maps(k, n):
                            lhs = contract_chain(apply_map(c, fmap), tuple(alpha[j] for j in fmap), eta, P)
                            sq.check(lhs == apply_map(h, fmap),
                                     lambda: {"poset": P.descriptor(), "chain": str(c), "alpha": list(alpha),
                                              "f": list(fmap)})
                ends.check(contract_chain(c, (0,) * (n + 1), eta, P) == c
                           and contract_chain(c, (1,) * (n + 1), eta, P) == ChainType((eta,) * (n + 1)),
                           lambda: {"poset": P.descriptor(), "chain": str(c)})
        M = ChainModule(P)
        dims = dold_kan(M, "normalized", top=max_level).cohomology()
        want = {k: (1 if k == 0 else 0) for k in dims}
        coh.check(dims == want, lambda: {"poset": P.descriptor(), "dims": dims})
        htp.check(_homotopy_identity(M, max_level), lambda: {"poset": P.descriptor()})
    report.results += [sq.result(), ends.result(), coh.result(), htp.result()]
    return report


def _alphas(n):
    return [tuple([0] * (n + 1 - k) + [1] * k) for k in range(n + 2)]


def _alt(M, n):
    f = M.field
    D = la.zeros(f, M.dim(n + 1), M.dim(n))
    for i in range(n + 2):
        D = la.matadd(f, D, M.coface(n, i), 1 if i % 2 == 0 else -1)
    return D


def _homotopy_identity(M: ChainModule, top) -> bool:
    f = M.field
    eta_idx = M.chains(0)[1][ChainType((M.poset.eta,))]
    for n in range(top):
        lhs = _matmul(f, M.homotopy(n + 1), _alt(M, n))
        if n >= 1:
            lhs = la.matadd(f, lhs, _matmul(f, _alt(M, n - 1), M.homotopy(n)), 1)
        want = _eye(f, M.dim(n))
        if n == 0:
            for r in range(M.dim(0)):
                want[r][eta_idx] = f.sub(want[r][eta_idx], f.one)
        if lhs != want:
            return False
    return True


# ---------------------------------------------------------------------------
# descent suite


def random_cocycle(model, rank, rng, pool=None):
    """A validated cocycle: a random Weil datum moved by a random gauge."""
    phi = from_weil(random_idele(model, rank, rng, pool))
    return gauge_act(random_gauge(model, rank, rng, pool), phi)


def descent_suite(seed: int = 0, samples: int = 50, ranks=(1, 2, 3), orbit: int = 5, twists=range(-3, 4),
                  model=None) -> SuiteReport:
    rng = random.Random(seed)
    model = model or P1("f5")
    report = SuiteReport("descent", seed)
    valid = _Checker("sampled cocycles validate")
    inv = _Checker("invariants constant on gauge orbits")
    split = _Checker("sum of splitting type = degree")
    tw = _Checker("twist-shift law")
    cob = _Checker("coboundaries validate and glue to the trivial bundle")
    for k in range(samples):
        n = ranks[k % len(ranks)]
        # base point of the orbit: a Weil cocycle; the other members are gauged copies
        phi = from_weil(random_idele(model, n, rng))
        v = validate(phi)
        if not valid.check(v.ok, lambda: {"validation": v.to_json(), "cocycle": phi.to_json()}):
            continue
        B = glue(phi)
        ref = B.invariants()
        for _ in range(orbit - 1):
            psi = gauge_act(random_gauge(model, n, rng), phi)
            other = glue(psi).invariants()
            inv.check(other == ref, lambda: {"cocycle": phi.to_json(), "invariants": [ref, other]})
        a = ref["splitting_type"]
        split.check(sum(a) == ref["degree"], lambda: {"splitting_type": a, "degree": ref["degree"]})
        for m in twists:
            E = Bundle(from_weil(twist_gluing(B.gluing, m)))
            want = [ai + m for ai in a]
            ok = E.degree() == ref["degree"] + n * m and list(E.splitting_type()) == want
            tw.check(ok, lambda: {"cocycle": phi.to_json(), "m": m, "degree": E.degree(),
                                  "splitting_type": list(E.splitting_type()), "expected": want})
        g = random_gauge(model, n, rng)
        from .descent import coboundary
        c = coboundary(g)
        ok = validate(c).ok and glue(c).splitting_type() == (0,) * n
        cob.check(ok, lambda: {"rank": n})
    report.results += [valid.result(), inv.result(), split.result(), tw.result(), cob.result()]
    return report


def weil_suite(seed: int = 0, samples: int = 30, model=None) -> SuiteReport:
    rng = random.Random(seed)
    model = model or P1("f5")
    report = SuiteReport("weil", seed)
    red = _Checker("rank-1 ideles reduce to t^d with d = degree")
    eq = _Checker("gauge_equivalent agrees with equality of degrees")
    items = []
    for _ in range(samples):
        gl = random_idele(model, 1, rng, points=3)
        phi = from_weil(gl)
        B = glue(phi)
        dc = weil_reduce(B)
        d = degree_of(gl)
        red.check(dc.degree == d and dc.log[-1].get("certified"), lambda: {"idele": phi.to_json(), "degree": d})
        items.append((phi, d))
    for (p, d), (q, e) in itertools.combinations(items, 2):
        ans = gauge_equivalent(p, q)
        eq.check(ans == ("yes" if d == e else "no"), lambda: {"degrees": [d, e], "answer": ans})
    report.results += [red.result(), eq.result()]
    return report


def run_suite(name: str, seed: int = 0, **kw) -> SuiteReport:
    fn = {"cosimplicial": cosimplicial_suite, "flasque": flasque_suite, "homotopy": homotopy_suite,
          "descent": descent_suite, "weil": weil_suite}.get(name)
    if fn is None:
        raise ValueError(f"unknown suite {name!r}; choose from {', '.join(SUITES)}")
    return fn(seed=seed, **kw)
