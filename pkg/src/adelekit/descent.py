"""Adelic descent data for vector bundles.

Conventions (everything else follows from these):

* a level-1 cocycle is an invertible matrix phi of level-1 adeles; on a
  chain (c0, c1) it reads phi(c0, c1), and the cocycle identity is
  ``phi(c0, c2) = phi(c1, c2) * phi(c0, c1)``, i.e.
  ``d1(phi) = d0(phi) * d2(phi)`` in GL_n of level-2 adeles;
* gauge by g in GL_n(A^0) acts as ``d0(g) * phi * d1(g)^-1``, so on the
  mixed pattern ``phi_(x,eta) -> g_eta * phi_(x,eta) * g_x^-1``;
* sections are row vectors w in F^n with ``w * phi_x`` integral at every x,
  and degree is ``sum_x v_x(det phi_x) deg x``.  Gluing ``diag(pi_0)``
  therefore gives O(1): two sections, degree one.
"""

from __future__ import annotations

import itertools
import random
from dataclasses import dataclass, field
from fractions import Fraction

from .adeles import (
    Adele,
    AdeleError,
    ComponentData,
    coface,
    diag,
    from_components,
    make_component,
    pattern_kind,
    random_function,
    tail,
    value_valuation,
    value_to_json,
)
from .cohomology import Gluing, WindowPolicy, _window_dims, adelic_cohomology, initial_window, _rat_inverse
from .local import Comparison, Divisor, LocalSeries, PrecisionError, expand
from .poly import Poly, Rat
from .scheme import P1, SpecZ, model_from_descriptor


class DescentError(ValueError):
    pass


# ---------------------------------------------------------------------------
# small matrix algebra over mixed values


def _mat_mul(A, B):
    n, m, p = len(A), len(B), len(B[0])
    return [[sum((A[i][k] * B[k][j] for k in range(1, m)), A[i][0] * B[0][j]) for j in range(p)] for i in range(n)]


def _det(M):
    n = len(M)
    if n == 1:
        return M[0][0]
    if n == 2:
        return M[0][0] * M[1][1] - M[0][1] * M[1][0]
    acc = None
    for j in range(n):
        minor = [row[:j] + row[j + 1:] for row in M[1:]]
        term = M[0][j] * _det(minor)
        if j % 2:
            term = -term
        acc = term if acc is None else acc + term
    return acc


def _inverse_values(model, M, x=None):
    """Inverse of a matrix of Rat/Fraction/LocalSeries values."""
    if all(not isinstance(v, LocalSeries) for row in M for v in row):
        if not _det(M):
            raise ZeroDivisionError("singular matrix")
        return _rat_inverse(model, M)
    n = len(M)
    d = _det(M)
    if not isinstance(d, LocalSeries):
        d = expand(d, x, None, model)
    dinv = d.inverse()
    if n == 1:
        return [[dinv]]
    adj = [[None] * n for _ in range(n)]
    for i in range(n):
        for j in range(n):
            minor = [row[:j] + row[j + 1:] for k, row in enumerate(M) if k != i]
            c = _det(minor)
            adj[j][i] = c if (i + j) % 2 == 0 else -c
    return [[adj[i][j] * dinv for j in range(n)] for i in range(n)]


def _is_identity(model, M):
    n = len(M)
    res = Comparison.EQUAL
    for i in range(n):
        for j in range(n):
            want = model.rat(1 if i == j else 0)
            v = M[i][j]
            if isinstance(v, LocalSeries):
                res = res & v.compare(want)
            elif v != want:
                return Comparison.NOT_EQUAL
    return res


# ---------------------------------------------------------------------------
# matrices of adeles


def adele_matrix(model, level, per_pattern: dict, keep_units=True):
    """Build a matrix of adeles from ``{pattern: (local: {x: M}, tail M)}``.

    F-patterns take a plain matrix.  For closed patterns the points where
    the tail leaves GL_n(O_x) are kept as explicit exceptions.
    """
    pats = model.chain_types(level)
    n = None
    comps = {}
    for c in pats:
        spec = per_pattern[c]
        if pattern_kind(model, c) == "F":
            n = len(spec)
            comps[c] = spec
            continue
        local, T = spec
        n = len(T)
        keep = set(local) | (_tail_bad_points(model, T) if keep_units else set())
        entries = []
        for i in range(n):
            row = []
            for j in range(n):
                exc = {x: (local[x][i][j] if x in local else T[i][j]) for x in keep}
                row.append(make_component(model, exc, tail(model, T[i][j]), keep=keep))
            entries.append(row)
        comps[c] = entries
    out = []
    for i in range(n):
        row = []
        for j in range(n):
            data = {c: (comps[c][i][j]) for c in pats}
            row.append(from_components(model, level, data))
        out.append(row)
    return out


def _tail_bad_points(model, T) -> set:
    pts = set()
    for row in T:
        for v in row:
            pts |= set(model.poles(v))
    d = _det(T)
    if not d:
        raise DescentError("default tail matrix is singular")
    pts |= set(model.poles(1 / d if not isinstance(d, Rat) else d.inverse()))
    return pts


def pattern_matrix(entries, pattern):
    """Matrix of the components of ``entries`` at a pattern."""
    return [[a[pattern] for a in row] for row in entries]


def _points_of(model, M) -> set:
    pts = set()
    for row in M:
        for cd in row:
            if isinstance(cd, ComponentData):
                pts |= set(cd.points())
    return pts


def _values_at(model, M, x):
    return [[cd.value_at(model, x) for cd in row] for row in M]


def _tail_of(model, M):
    return [[cd.default.value(model) for cd in row] for row in M]


def matrix_product(A, B):
    n, m, p = len(A), len(B), len(B[0])
    out = []
    for i in range(n):
        row = []
        for j in range(p):
            acc = A[i][0] * B[0][j]
            for k in range(1, m):
                acc = acc + A[i][k] * B[k][j]
            row.append(acc)
        out.append(row)
    return out


def matrix_inverse(model, A):
    """Inverse in GL_n of adeles, pattern by pattern and point by point."""
    level = A[0][0].level
    per = {}
    for c in model.chain_types(level):
        M = pattern_matrix(A, c)
        if pattern_kind(model, c) == "F":
            per[c] = _inverse_values(model, M)
            continue
        pts = _points_of(model, M)
        T = _tail_of(model, M)
        Tinv = _inverse_values(model, T)
        local = {x: _inverse_values(model, _values_at(model, M, x), x) for x in pts}
        per[c] = (local, Tinv)
    return adele_matrix(model, level, per)


def matrix_coface(A, i):
    return [[coface(a, i) for a in row] for row in A]


def identity_matrix(model, n, level):
    return [[diag(1 if i == j else 0, level, model) for j in range(n)] for i in range(n)]


# ---------------------------------------------------------------------------
# cocycles


@dataclass
class Validation:
    status: str  # "valid" | "invalid" | "indeterminate" | "unchecked"
    precision: int | None = None
    witness: dict | None = None

    @property
    def ok(self):
        return self.status == "valid"

    def to_json(self):
        out = {"status": self.status}
        if self.precision is not None:
            out["precision"] = self.precision
        if self.witness is not None:
            out["witness"] = self.witness
        return out


@dataclass
class Cocycle:
    model: object
    rank: int
    entries: list  # rank x rank matrix of level-1 Adeles
    validated: Validation = field(default_factory=lambda: Validation("unchecked"))

    def mixed(self):
        return pattern_matrix(self.entries, self.model.pattern("(x,eta)"))

    def gluing(self) -> Gluing:
        M = self.mixed()
        T = _tail_of(self.model, M)
        # entries are canonicalized one by one; points where only det(T) fails
        # to be a unit have to be added back
        pts = _points_of(self.model, M) | _tail_bad_points(self.model, T)
        local = {x: _values_at(self.model, M, x) for x in pts}
        return Gluing(self.model, self.rank, local, T)

    def to_json(self):
        return {
            "rank": self.rank,
            "entries": [[a.to_json() for a in row] for row in self.entries],
            "model": self.model.descriptor(),
        }

    @classmethod
    def from_json(cls, d, model=None):
        model = model or model_from_descriptor(d.get("model", "p1"))
        entries = [[Adele.from_json(model, a) for a in row] for row in d["entries"]]
        n = d.get("rank", len(entries))
        if len(entries) != n or any(len(r) != n for r in entries):
            raise DescentError("entries are not a rank x rank matrix")
        for row in entries:
            for a in row:
                if a.level != 1:
                    raise DescentError("cocycle entries must be level-1 adeles")
        return cls(model, n, entries)


def validate(phi: Cocycle, N: int | None = None) -> Validation:
    """Check d1(phi) = d0(phi) * d2(phi) at every level-2 pattern."""
    model = phi.model
    try:
        p0 = matrix_coface(phi.entries, 0)
        p1 = matrix_coface(phi.entries, 1)
        p2 = matrix_coface(phi.entries, 2)
        rhs = matrix_product(p0, p2)
    except PrecisionError as e:
        phi.validated = Validation("indeterminate", N, {"reason": str(e)})
        return phi.validated
    for c in model.chain_types(1):
        try:
            _check_invertible(model, pattern_matrix(phi.entries, c))
        except ZeroDivisionError as e:
            phi.validated = Validation("invalid", N, {"chain": str(c), "reason": f"not invertible: {e}"})
            return phi.validated
        except PrecisionError as e:
            phi.validated = Validation("indeterminate", N, {"chain": str(c), "reason": str(e)})
            return phi.validated
    # chains through eta first: these carry the gluing identity proper
    for c in reversed(model.chain_types(2)):
        for i in range(phi.rank):
            for j in range(phi.rank):
                a, b = p1[i][j][c], rhs[i][j][c]
                cmp = _compare_component(model, c, a, b)
                if cmp is Comparison.NOT_EQUAL:
                    w = {"chain": str(c), "entry": [i, j]}
                    w.update(_component_diff(model, c, a, b))
                    phi.validated = Validation("invalid", N, w)
                    return phi.validated
    phi.validated = Validation("valid", N)
    return phi.validated


def _check_invertible(model, M):
    if isinstance(M[0][0], ComponentData):
        for x in _points_of(model, M):
            _inverse_values(model, _values_at(model, M, x), x)
        _inverse_values(model, _tail_of(model, M))
    else:
        _inverse_values(model, M)


def _compare_component(model, c, a, b):
    from .adeles import compare_components

    if pattern_kind(model, c) == "F":
        return Comparison.EQUAL if a == b else Comparison.NOT_EQUAL
    return compare_components(model, a, b)


def _component_diff(model, c, a, b):
    if pattern_kind(model, c) == "F":
        return {"lhs": value_to_json(a), "rhs": value_to_json(b)}
    for x in sorted(set(a.points()) | set(b.points()), key=lambda p: p.sort_key()):
        va, vb = a.value_at(model, x), b.value_at(model, x)
        from .adeles import compare_values

        if compare_values(model, x, va, vb) is Comparison.NOT_EQUAL:
            return {"point": str(x), "lhs": value_to_json(va), "rhs": value_to_json(vb)}
    return {"point": "default", "lhs": value_to_json(a.default.value(model)),
            "rhs": value_to_json(b.default.value(model))}


# ---------------------------------------------------------------------------
# Weil data


def _check_idele(g: Gluing):
    model = g.model
    T = g.tail
    bad = _tail_bad_points(model, T)
    missing = [x for x in bad if x not in g.local]
    if missing:
        raise DescentError(f"non-unit default tail at {', '.join(map(str, missing))}")
    for x, M in g.local.items():
        _inverse_values(model, M, x)


def from_weil(g: Gluing) -> Cocycle:
    """Weil datum g in GL_n(A) -> cocycle with identity F- and O-parts."""
    _check_idele(g)
    model, n = g.model, g.rank
    eye = [[model.rat(1 if i == j else 0) for j in range(n)] for i in range(n)]
    per = {}
    for c in model.chain_types(1):
        k = pattern_kind(model, c)
        if k == "F":
            per[c] = eye
        elif k == "O":
            per[c] = ({}, eye)
        else:
            per[c] = (dict(g.local), g.tail)
    phi = Cocycle(model, n, adele_matrix(model, 1, per))
    return phi


def to_weil(phi: Cocycle) -> Gluing:
    return phi.gluing()


def idele(model, local: dict, tail_matrix=None) -> Gluing:
    """Convenience constructor: ``{point: matrix}`` over an identity tail."""
    local = {model.point(x) if not hasattr(x, "kind") else x: [[model.rat(v) if not isinstance(v, LocalSeries) else v
                                                                 for v in row] for row in M]
             for x, M in local.items()}
    n = len(next(iter(local.values()))) if local else len(tail_matrix)
    if tail_matrix is None:
        tail_matrix = [[model.rat(1 if i == j else 0) for j in range(n)] for i in range(n)]
    return Gluing(model, n, local, [[model.rat(v) for v in row] for row in tail_matrix])


# ---------------------------------------------------------------------------
# gauge action


def gauge_act(g, phi: Cocycle) -> Cocycle:
    """d0(g) * phi * d1(g)^-1 for g a GL_n matrix of level-0 adeles."""
    model = phi.model
    g0 = matrix_coface(g, 0)
    g1inv = matrix_inverse(model, matrix_coface(g, 1))
    return Cocycle(model, phi.rank, matrix_product(matrix_product(g0, phi.entries), g1inv))


def coboundary(g) -> Cocycle:
    model = g[0][0].model
    n = len(g)
    return gauge_act(g, Cocycle(model, n, identity_matrix(model, n, 1)))


def random_invertible_rat(model, n, rng, pool, max_pole=1):
    while True:
        M = [[random_function(model, rng, rng.sample(pool, 1), max_pole) for _ in range(n)] for _ in range(n)]
        if _det(M):
            return M


def _random_unit(model, rng, x):
    """A global function with v_x = 0."""
    while True:
        pts = [p for p in model.first_points(6) if p != x]
        u = random_function(model, rng, rng.sample(pts, 1), 1)
        if u and model.valuation(u, x) == 0:
            return u


def _random_integral(model, rng, x):
    while True:
        pts = [p for p in model.first_points(6) if p != x]
        u = random_function(model, rng, rng.sample(pts, 1), 1)
        if model.valuation(u, x) >= 0:
            return u


def random_gl_integral(model, n, rng, x):
    """Random element of GL_n(O_x) with global-function entries: L * diag(units) * U."""
    one, zero = model.rat(1), model.rat(0)
    L = [[one if i == j else (_random_integral(model, rng, x) if i > j else zero) for j in range(n)] for i in range(n)]
    U = [[_random_unit(model, rng, x) if i == j else (_random_integral(model, rng, x) if i < j else zero)
          for j in range(n)] for i in range(n)]
    return _mat_mul(L, U)


def random_gauge(model, n, rng, pool=None):
    """Random g in GL_n(A^0): F-part over F, O-part units at a few points."""
    pool = pool or model.first_points(5)
    g_eta = random_invertible_rat(model, n, rng, pool)
    pts = rng.sample(pool, rng.randint(1, 2))
    eye = [[model.rat(1 if i == j else 0) for j in range(n)] for i in range(n)]
    # constant invertible tail; integral and unit everywhere
    while True:
        if isinstance(model, SpecZ):
            T = eye
            break
        T = [[model.rat(model.field.random_element(rng)) for _ in range(n)] for _ in range(n)]
        if _det(T):
            break
    local = {x: random_gl_integral(model, n, rng, x) for x in pts}
    per = {}
    for c in model.chain_types(0):
        per[c] = g_eta if pattern_kind(model, c) == "F" else (local, T)
    return adele_matrix(model, 0, per)


def random_idele(model, n, rng, pool=None, points=2, max_pole=2) -> Gluing:
    pool = pool or model.first_points(5)
    local = {}
    for x in rng.sample(pool, rng.randint(1, points)):
        while True:
            M = [[random_function(model, rng, [x], max_pole) for _ in range(n)] for _ in range(n)]
            if _det(M):
                break
        local[x] = M
    eye = [[model.rat(1 if i == j else 0) for j in range(n)] for i in range(n)]
    return Gluing(model, n, local, eye)


# ---------------------------------------------------------------------------
# bundles


def degree_of(gl: Gluing) -> int:
    model = gl.model
    d = 0
    for x, M in gl.local.items():
        det = _det(M)
        v = value_valuation(model, det, x)
        if not isinstance(v, int):
            raise PrecisionError(f"determinant at {x} indistinguishable from 0")
        d += v * x.residue_degree
    return d


def twist_gluing(gl: Gluing, m: int) -> Gluing:
    """E(m): multiply the local matrix at infinity by pi_inf^m."""
    model = gl.model
    if m == 0:
        return gl
    x = model.inf
    s = model.uniformizer(x) ** m
    M = gl.at(x)
    local = dict(gl.local)
    local[x] = [[v * s for v in row] for row in M]
    return Gluing(model, gl.rank, local, gl.tail)


@dataclass
class Bundle:
    cocycle: Cocycle
    _cache: dict = field(default_factory=dict)

    @property
    def model(self):
        return self.cocycle.model

    @property
    def rank(self):
        return self.cocycle.rank

    @property
    def gluing(self) -> Gluing:
        if "gluing" not in self._cache:
            self._cache["gluing"] = self.cocycle.gluing()
        return self._cache["gluing"]

    def degree(self) -> int:
        if "degree" not in self._cache:
            self._cache["degree"] = degree_of(self.gluing)
        return self._cache["degree"]

    def h0(self, m: int = 0) -> int:
        """dim H^0(E(m)) from a single window wide enough for all sections."""
        key = ("h0", m)
        if key not in self._cache:
            D = Divisor({self.model.inf: m})
            w = initial_window(self.model, D, self.gluing)
            dims, _, _ = _window_dims(self.model, D, self.gluing, w, "normalized", None, top=1)
            self._cache[key] = dims[0]
        return self._cache[key]

    def cohomology(self, m: int = 0, policy=None):
        key = ("coh", m)
        if key not in self._cache:
            self._cache[key] = adelic_cohomology(self.model, (self.gluing, Divisor({self.model.inf: m})), policy)
        return self._cache[key]

    def twist(self, m: int) -> Bundle:
        return Bundle(from_weil(twist_gluing(self.gluing, m)))

    def h0_profile(self, lo: int, hi: int) -> dict:
        return {m: self.h0(m) for m in range(lo, hi + 1)}

    def splitting_type(self) -> tuple:
        if "split" not in self._cache:
            self._cache["split"] = splitting_type(self)
        return self._cache["split"]

    def invariants(self) -> dict:
        out = {"rank": self.rank, "degree": self.degree()}
        if isinstance(self.model, P1):
            out["splitting_type"] = list(self.splitting_type())
            rep = self.cohomology()
            out["h0"], out["h1"] = rep.dims.get(0), rep.dims.get(1)
        return out


def glue(phi: Cocycle, N: int | None = None) -> Bundle:
    if phi.validated.status == "unchecked":
        validate(phi, N)
    if phi.validated.status != "valid":
        raise DescentError(f"cannot glue: cocycle is {phi.validated.status}: {phi.validated.witness}")
    B = phi.__dict__.get("_bundle")
    if B is None:
        B = phi.__dict__["_bundle"] = Bundle(phi)
    return B


class SplittingError(ArithmeticError):
    pass


def splitting_type(B: Bundle) -> tuple:
    """Invert m -> h0(E(m)) = sum_i max(a_i + m + 1, 0)."""
    if not isinstance(B.model, P1):
        raise DescentError("splitting type is defined on P^1 only")
    n = B.rank
    d = B.degree()
    m = 0
    steps = 0
    while B.h0(m) > 0:
        m -= 1
        steps += 1
        if steps > 200:
            raise SplittingError("h0 never vanishes under negative twists")
    lo = m  # h0(lo) = 0: every a_i <= -lo - 1
    counts = {}
    prev_delta = 0
    m = lo + 1
    while prev_delta < n:
        delta = B.h0(m) - B.h0(m - 1)  # #{i : a_i >= -m}
        if delta < prev_delta or delta > n:
            raise SplittingError(f"profile not realizable at twist {m}: delta {delta} after {prev_delta}")
        if delta > prev_delta:
            counts[-m] = delta - prev_delta
        prev_delta = delta
        m += 1
        if m - lo > 400:
            raise SplittingError("profile does not saturate")
    a = tuple(sorted((k for k, c in counts.items() for _ in range(c)), reverse=True))
    if sum(a) != d:
        raise SplittingError(f"splitting {a} does not sum to degree {d}")
    return a


# ---------------------------------------------------------------------------
# equivalence and Weil reduction


def gauge_equivalent(phi: Cocycle, psi: Cocycle, search_cap: int = 3) -> str:
    if phi.rank != psi.rank:
        raise DescentError("rank mismatch")
    for c in (phi, psi):
        if c.validated.status == "unchecked":
            validate(c)
        if c.validated.status != "valid":
            raise DescentError("gauge_equivalent needs validated cocycles")
    model = phi.model
    if isinstance(model, P1):
        return "yes" if glue(phi).splitting_type() == glue(psi).splitting_type() else "no"
    if phi.rank == 1:
        g = _rank1_search(model, phi.gluing(), psi.gluing(), search_cap)
        return "yes" if g is not None else "indeterminate"
    return "indeterminate"


def _rank1_search(model, a: Gluing, b: Gluing, cap):
    """Find q in F^x with b = q * a * u for a unit idele u, exponents bounded by cap."""
    pts = sorted(set(a.local) | set(b.local), key=lambda x: x.sort_key())
    tau = b.tail[0][0] / a.tail[0][0]
    rho = {x: b.at(x)[0][0] / a.at(x)[0][0] for x in pts}
    q0 = tau
    for x in pts:
        e = value_valuation(model, rho[x], x) - model.valuation(tau, x)
        if not isinstance(e, int) or abs(e) > cap:
            return None
        q0 = q0 * model.uniformizer(x) ** e
    for s in (1, -1):
        q = q0 * s
        r = tau / q
        off = (set(model.poles(r)) | set(model.zeros(r))) - set(pts)
        if all(value_valuation(model, rho[x] / q, x) == 0 for x in pts) and not off:
            return q
    return None


@dataclass
class DoubleCoset:
    representative: Gluing
    degree: int
    log: list

    def to_json(self):
        return {"degree": self.degree, "normal_form": f"t^{self.degree} at t=0", "log": self.log}


def weil_reduce(B: Bundle) -> DoubleCoset:
    """Rank-1 idele on P^1 -> t^d at the point t=0, with the moves used."""
    model = B.model
    if B.rank != 1 or not isinstance(model, P1):
        raise DescentError("weil_reduce handles rank-1 bundles on P^1")
    g = B.gluing
    zero = model.point("t")
    d = B.degree()
    vals = {x: value_valuation(model, g.at(x)[0][0], x) for x in g.local}
    f = model.rat(model.t) ** d
    for x, v in vals.items():
        if x != model.inf and v:
            f = f * model.uniformizer(x) ** (-v)
    log = [{"move": "F", "by": str(f)}]
    moved = {x: [[f * g.at(x)[0][0]]] for x in set(g.local) | {zero}}
    # after the F-move every local value is a unit except t^d at 0
    units = {}
    for x, M in moved.items():
        target = model.rat(model.t) ** d if x == zero else model.rat(1)
        u = M[0][0] / target
        if value_valuation(model, u, x) != 0:
            raise DescentError(f"F-move left valuation {value_valuation(model, u, x)} at {x}")
        units[x] = u
    tail_u = f * g.tail[0][0]
    log.append({"move": "O", "units": {str(x): value_to_json(u) for x, u in sorted(units.items(), key=lambda kv: kv[0].sort_key())},
                "default": value_to_json(tail_u)})
    rep = Gluing(model, 1, {zero: [[model.rat(model.t) ** d]]} if d else {}, [[model.rat(1)]])
    # certify: gauge by (g_eta = f, g_x = units) maps the input to the normal form
    per = {}
    for c in model.chain_types(0):
        per[c] = [[f]] if pattern_kind(model, c) == "F" else ({x: [[u]] for x, u in units.items()}, [[tail_u]])
    gauge = adele_matrix(model, 0, per)
    out = gauge_act(gauge, B.cocycle)
    nf = from_weil(rep)
    same = out.entries[0][0].compare(nf.entries[0][0]).consistent
    log.append({"certified": bool(same)})
    if not same:
        raise DescentError("Weil reduction did not reach the normal form")
    return DoubleCoset(rep, d, log)


# ---------------------------------------------------------------------------
# level-0 module families over prod_x O_x (the prod F_p example)


@dataclass(frozen=True)
class LocalComplex:
    """Perfect complex over O_x: free of rank r plus torsion (O/pi^e)^s.

    Torsion has the two-term resolution O --pi^e--> O, amplitude [-1, 0];
    ``amplitude`` may be widened to model unbounded families.
    """

    free_rank: int = 0
    torsion: tuple = ()  # ((exponent, multiplicity), ...)
    amplitude: tuple = (0, 0)

    def is_zero(self):
        return self.free_rank == 0 and not self.torsion

    def killed_by_valuation(self, v) -> bool:
        """Does an element of valuation v annihilate the torsion part?"""
        return all(v >= e for e, _ in self.torsion)

    def to_json(self):
        return {"free_rank": self.free_rank, "torsion": [list(t) for t in self.torsion],
                "amplitude": list(self.amplitude)}


RESIDUE_FIELD = LocalComplex(0, ((1, 1),), (-1, 0))
ZERO_COMPLEX = LocalComplex()


@dataclass(frozen=True)
class TailRule:
    """Local complex at every non-exceptional closed point."""

    kind: str  # "zero" | "residue" | "free" | "unbounded"
    rank: int = 0

    def at(self, x, index: int = 0) -> LocalComplex:
        if self.kind == "zero":
            return ZERO_COMPLEX
        if self.kind == "free":
            return LocalComplex(self.rank)
        if self.kind == "residue":
            return RESIDUE_FIELD
        # amplitude grows along the enumeration of points
        return LocalComplex(0, ((1, 1),), (-1 - index, 0))

    def amplitude_bound(self):
        if self.kind == "unbounded":
            return None
        return self.at(None).amplitude


@dataclass
class ModuleFamily:
    model: object
    exceptions: dict  # Point -> LocalComplex
    default: TailRule
    eta_rank: int = 0

    def component(self, x, index=0):
        return self.exceptions.get(x) or self.default.at(x, index)

    def amplitude_report(self, probe: int = 50):
        """(bounded, bound or witness) on exceptions plus the tail rule."""
        amps = [c.amplitude for c in self.exceptions.values()]
        tb = self.default.amplitude_bound()
        if tb is None:
            pts = self.model.first_points(probe)
            widths = [(str(x), -self.default.at(x, i).amplitude[0]) for i, x in enumerate(pts)]
            return False, {"reason": "tail amplitude grows without bound", "samples": widths[-3:]}
        amps.append(tb)
        lo = min(a[0] for a in amps)
        hi = max(a[1] for a in amps)
        return True, [lo, hi]


def accept_level0(fam: ModuleFamily) -> dict:
    """Level-0 representability: a uniform amplitude bound is required."""
    ok, info = fam.amplitude_report()
    if not ok:
        raise DescentError(f"not globally bounded: {info}")
    return {"accepted": True, "amplitude": info}


def validate_family(fam: ModuleFamily, max_support: int = 6, max_exponent: int = 3) -> Validation:
    """Descent check for a level-0 family: the generic fibre must match.

    Over the mixed pattern, M_x (x) A must agree with M_eta (x) A.  Free
    ranks must equal ``eta_rank``; torsion dies after inverting a global
    annihilator f, which must kill every torsion component.  For each
    support bound S (the first k primes/points) we look for f supported in
    S; failure is witnessed by a point q outside S where f is a unit while
    the component is nonzero.
    """
    model = fam.model
    pts = model.first_points(max_support + 8)
    for i, x in enumerate(pts):
        c = fam.component(x, i)
        if c.free_rank != fam.eta_rank:
            return Validation("invalid", None, {"point": str(x), "reason": "free rank differs from the generic rank"})
    witnesses = []
    for k in range(max_support + 1):
        S = pts[:k]
        found = None
        for exps in itertools.product(range(max_exponent + 1), repeat=k):
            f = model.rat(1)
            for x, e in zip(S, exps):
                f = f * model.uniformizer(x) ** e
            if all(fam.component(x, i).killed_by_valuation(model.valuation(f, x)) for i, x in enumerate(pts)):
                found = f
                break
        if found is not None:
            return Validation("valid", None, {"annihilator": value_to_json(found), "support_bound": [str(x) for x in S]})
        q_index, q = next((i, x) for i, x in enumerate(pts) if x not in S and not fam.component(x, i).killed_by_valuation(0))
        witnesses.append({"support_bound": [str(x) for x in S], "survives_at": str(q),
                          "reason": f"every f supported in the bound is a unit at {q}, and the component at {q} is nonzero"})
    if _tail_has_torsion(fam):
        return Validation("invalid", None, {"reason": "no rational annihilator within any finite support bound",
                                            "bounds": witnesses})
    return Validation("indeterminate", None, {"bounds": witnesses})


def _tail_has_torsion(fam):
    return bool(fam.default.at(None, 0).torsion)


def product_of_residue_fields(model=None) -> ModuleFamily:
    """prod_p F_p over Spec Z: residue field everywhere, zero generic fibre."""
    return ModuleFamily(model or SpecZ(), {}, TailRule("residue"), 0)
