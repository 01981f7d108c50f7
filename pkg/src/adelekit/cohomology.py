"""Cochain complexes from windowed cosimplicial modules, and their cohomology.

A *window* (support S, pole bound B, precision N) cuts each level of the
adelic module of a sheaf on P^1 down to a finite-dimensional space:

* ``(eta,...,eta)``: the Riemann-Roch space L(B)^n;
* ``(x,...,x)``: digits ``[-D_x, N)`` at each x in S (the twisted lattice);
* mixed patterns: digits ``[-P_x, N)`` at each x in S.

Outside S every component is pinned to the image of the global part, so
the window complex computes H^0 exactly once B >= D, and H^1 once deg B is
past the Riemann-Roch threshold.  The stabilization loop detects this by
requiring two consecutive rounds to agree.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from fractions import Fraction

from . import linalg as la
from .adeles import (
    Adele,
    ComponentData,
    LineBundle,
    Skyscraper,
    alternating_differential,
    from_components,
    make_component,
    pattern_kind,
    random_function,
    tail,
    value_valuation,
)
from .local import AtLeast, Divisor, LocalSeries, coord, digits_wrt, expand
from .poly import Poly, Rat
from .scheme import P1, ChainType, SpecZ, degeneracy, face


class WindowError(ValueError):
    pass


# ---------------------------------------------------------------------------
# windows and reports


@dataclass(frozen=True)
class Window:
    support: tuple
    pole_bound: Divisor
    precision: int

    def to_json(self):
        return {
            "support": [str(x) for x in self.support],
            "pole_bound": str(self.pole_bound),
            "precision": self.precision,
        }


@dataclass
class CohomologyReport:
    dims: dict
    stabilized: bool
    windows_used: list = field(default_factory=list)
    representatives: dict | None = None
    method: str = "adelic"

    def to_json(self):
        out = {
            "dims": {str(k): v for k, v in sorted(self.dims.items())},
            "stabilized": self.stabilized,
            "windows_used": self.windows_used,
            "method": self.method,
        }
        if self.representatives is not None:
            out["representatives"] = self.representatives
        return out


@dataclass
class WindowPolicy:
    """Window growth: +1 on every support point and one new point per round."""

    max_rounds: int | None = None
    precision: int | None = None
    mode: str = "normalized"
    grow_support: bool = True
    uniformizers: dict | None = None


# ---------------------------------------------------------------------------
# cochain complexes


@dataclass
class CochainComplex:
    field: object
    dims: list
    diffs: list  # diffs[k]: dims[k+1] x dims[k]
    basis: list | None = None  # normalized mode: ambient columns spanning each degree

    def check_d2(self):
        for k in range(len(self.diffs) - 1):
            prod = la.matmul(self.field, self.diffs[k + 1], self.diffs[k])
            if not la.is_zero_matrix(self.field, prod):
                raise ArithmeticError(f"d^{k + 1} d^{k} != 0")
        return True

    def ranks(self):
        return [la.rank(self.field, d) if self.dims[k] and self.dims[k + 1] else 0
                for k, d in enumerate(self.diffs)]

    def cohomology(self) -> dict:
        """H^k for 0 <= k < len(diffs)."""
        r = self.ranks()
        out = {}
        for k in range(len(self.diffs)):
            out[k] = self.dims[k] - r[k] - (r[k - 1] if k else 0)
        return out


class CosimplicialModule:
    """Finite-dimensional cosimplicial vector space, levels 0..3."""

    field = None

    def dim(self, n: int) -> int:
        raise NotImplementedError

    def coface(self, n: int, i: int):
        raise NotImplementedError

    def codegeneracy(self, n: int, i: int):
        raise NotImplementedError


class ConstantModule(CosimplicialModule):
    """The constant cosimplicial object k: identity everywhere."""

    def __init__(self, field):
        self.field = field

    def dim(self, n):
        return 1

    def coface(self, n, i):
        return [[self.field.one]]

    def codegeneracy(self, n, i):
        return [[self.field.one]]


class PatternModule(CosimplicialModule):
    """Module over a curve model, organized by chain patterns.

    Subclasses give a dimension per pattern kind ("F", "O", "A") and the
    conversion matrices F->A and O->A; every other structure map between
    patterns of the same kind is the identity.
    """

    def __init__(self, model, field):
        self.model = model
        self.field = field
        self._conv = {}

    def kind_dim(self, kind: str) -> int:
        raise NotImplementedError

    def conversion(self, src: str, tgt: str):
        if src == tgt:
            return la.identity(self.field, self.kind_dim(src))
        key = (src, tgt)
        if key not in self._conv:
            self._conv[key] = self._make_conversion(src, tgt)
        return self._conv[key]

    def _make_conversion(self, src, tgt):
        raise NotImplementedError

    def _layout(self, n):
        cache = self.__dict__.setdefault("_layouts", {})
        if n not in cache:
            cache[n] = self._compute_layout(n)
        return cache[n]

    def _compute_layout(self, n):
        pats = self.model.chain_types(n)
        offs, pos = {}, 0
        for c in pats:
            offs[c] = pos
            pos += self.kind_dim(pattern_kind(self.model, c))
        return pats, offs, pos

    def dim(self, n):
        return self._layout(n)[2]

    def _assemble(self, n_src, n_tgt, src_of):
        f = self.field
        _, soffs, sdim = self._layout(n_src)
        tpats, toffs, tdim = self._layout(n_tgt)
        M = la.zeros(f, tdim, sdim)
        for c in tpats:
            s = src_of(c)
            ks, kt = pattern_kind(self.model, s), pattern_kind(self.model, c)
            blk = self.conversion(ks, kt)
            r0, c0 = toffs[c], soffs[s]
            for i, row in enumerate(blk):
                for j, v in enumerate(row):
                    if v != f.zero:
                        M[r0 + i][c0 + j] = v
        return M

    def coface(self, n, i):
        if not 0 <= i <= n + 1:
            raise IndexError(i)
        return self._assemble(n, n + 1, lambda c: face(c, i))

    def codegeneracy(self, n, i):
        if not 0 <= i <= n - 1:
            raise IndexError(i)
        return self._assemble(n, n - 1, lambda c: degeneracy(c, i))


def dold_kan(M: CosimplicialModule, mode: str = "normalized", top: int = 2) -> CochainComplex:
    """Cochain complex of M in degrees 0..top.

    ``alternating``: d = sum (-1)^i d^i on the full levels.
    ``normalized``: the same differential restricted to the intersection of
    the codegeneracy kernels.
    """
    f = M.field
    dims = [M.dim(n) for n in range(top + 1)]
    diffs = []
    for n in range(top):
        D = la.zeros(f, dims[n + 1], dims[n])
        for i in range(n + 2):
            Ci = M.coface(n, i)
            if len(Ci) != dims[n + 1] or (Ci and len(Ci[0]) != dims[n]):
                raise WindowError(f"coface {i} at level {n} does not match the window")
            D = la.matadd(f, D, Ci, 1 if i % 2 == 0 else -1)
        diffs.append(D)
    if mode == "alternating":
        C = CochainComplex(f, dims, diffs)
        C.check_d2()
        return C
    if mode != "normalized":
        raise ValueError(f"unknown mode {mode!r}")
    bases = []
    for n in range(top + 1):
        if n == 0:
            K = [[f.one if i == j else f.zero for j in range(dims[0])] for i in range(dims[0])]
            bases.append(_cols(K, dims[0]))
            continue
        S = []
        for i in range(n):
            S.extend(M.codegeneracy(n, i))
        bases.append(la.nullspace(f, S, dims[n]))
    ndiffs = []
    for n in range(top):
        src, tgt = bases[n], bases[n + 1]
        Y = la.sparse_apply(f, diffs[n], src)  # images, one per source basis vector
        X = _express(f, tgt, Y, dims[n + 1])
        ndiffs.append(X)
    C = CochainComplex(f, [len(b) for b in bases], ndiffs, bases)
    C.check_d2()
    return C


def _cols(K, n):
    return [[K[i][j] for i in range(n)] for j in range(len(K[0]) if K else 0)]


def _express(field, basis, vectors, dim):
    """Coordinates of each vector in ``basis`` (list of column vectors)."""
    nb = len(basis)
    if not vectors:
        return [[] for _ in range(nb)]
    if nb == 0:
        for v in vectors:
            if any(x != field.zero for x in v):
                raise ArithmeticError("image leaves the normalized subcomplex")
        return []
    A = [[basis[j][i] for j in range(nb)] + [v[i] for v in vectors] for i in range(dim)]
    R, piv = la.rref(field, A)
    if any(p >= nb for p in piv):
        raise ArithmeticError("image leaves the normalized subcomplex")
    X = la.zeros(field, nb, len(vectors))
    for r, p in enumerate(piv):
        for k in range(len(vectors)):
            X[p][k] = R[r][nb + k]
    return X


# ---------------------------------------------------------------------------
# P^1 geometry helpers


def riemann_roch_basis(model: P1, B: Divisor) -> list:
    """Basis of L(B) = {f : v_x(f) >= -B_x for all x} as global functions."""
    f = model.field
    h = Poly.const(f, 1)
    q = Poly.const(f, 1)
    for x, m in B.items():
        if x == model.inf:
            continue
        if m > 0:
            h = h * x.label**m
        elif m < 0:
            q = q * x.label ** (-m)
    top = h.degree + B(model.inf) - q.degree
    return [Rat(q * Poly.monomial(f, j), h) for j in range(top + 1)]


def _residue_vector(model, x, d) -> list:
    f = model.field
    k = x.residue_degree
    cs = list(d.coeffs) if isinstance(d, Poly) else [d]
    cs = [f.coerce(c) for c in cs] + [f.zero] * (k - len(cs))
    return cs[:k]


def _residue_basis(model, x) -> list:
    f = model.field
    return [Poly.monomial(f, c) for c in range(x.residue_degree)]


def local_digits(model, value, x, lo: int, hi: int, uniformizer=None) -> list:
    """Digits lo..hi-1 of a global function or series, as residue vectors."""
    if isinstance(value, LocalSeries):
        s = value
    else:
        v = model.valuation(value, x)
        if v >= hi:
            return [[model.field.zero] * x.residue_degree for _ in range(lo, hi)]
        extra = 0 if uniformizer is None else max(0, hi - lo)
        s = expand(value, x, hi + extra, model)
    if not s.is_zero() and s.val < lo:
        raise WindowError(f"value at {x} has a pole of order {-s.val} beyond the window ({-lo})")
    if s.is_zero():
        if s.prec < hi:
            raise WindowError(f"series at {x} known only to precision {s.prec}")
        return [[model.field.zero] * x.residue_degree for _ in range(lo, hi)]
    ds = digits_wrt(s, lo, hi, uniformizer)
    return [_residue_vector(model, x, d) for d in ds]


# ---------------------------------------------------------------------------
# gluing data for bundles


@dataclass
class Gluing:
    """Mixed-pattern transition matrix of a rank-n bundle, point by point.

    Sections of the glued bundle twisted by D are the row vectors w in F^n
    with ``w * local(x)`` in ``pi_x^(-D_x) O_x^n`` for every closed x.  Off
    ``points`` the matrix equals ``tail`` and lies in GL_n(O_x).
    """

    model: object
    rank: int
    local: dict  # Point -> matrix of values (Rat or LocalSeries)
    tail: list  # matrix of global functions

    @property
    def points(self):
        return sorted(self.local, key=lambda x: x.sort_key())

    def at(self, x):
        return self.local.get(x, self.tail)

    def smith(self, x):
        """(U, e) with local(x) = U * diag(unit * pi^e_k) * V, U and V in GL_n(O_x).

        In the coordinates w * U the section lattice at x is the box
        ``(wU)_k in pi^(-D_x - e_k) O_x``.  Off ``points`` the matrix is
        already in GL_n(O_x): U = 1, e = 0.
        """
        cache = self.__dict__.setdefault("_smith", {})
        if x not in cache:
            if x in self.local:
                cache[x] = local_smith(self.model, x, self.local[x])
            else:
                one, zero = self.model.rat(1), self.model.rat(0)
                eye = [[one if i == j else zero for j in range(self.rank)] for i in range(self.rank)]
                cache[x] = (eye, [0] * self.rank)
        return cache[x]

    def exponents(self, x) -> list:
        return self.smith(x)[1]


def _is_zero_value(v):
    return v.is_zero() if isinstance(v, LocalSeries) else not v


def local_smith(model, x, M):
    """Smith form over the completed local ring, tracking the left factor."""
    n = len(M)
    A = [list(r) for r in M]
    one, zero = model.rat(1), model.rat(0)
    U = [[one if i == j else zero for j in range(n)] for i in range(n)]
    exps = []
    for s in range(n):
        best = None
        for i in range(s, n):
            for j in range(s, n):
                if _is_zero_value(A[i][j]):
                    continue
                v = value_valuation(model, A[i][j], x)
                if best is None or v < best[0]:
                    best = (v, i, j)
        if best is None:
            raise ZeroDivisionError(f"matrix at {x} is singular at the available precision")
        v, i, j = best
        A[s], A[i] = A[i], A[s]
        for row in U:
            row[s], row[i] = row[i], row[s]
        for row in A:
            row[s], row[j] = row[j], row[s]
        p = A[s][s]
        for r in range(s + 1, n):
            if not _is_zero_value(A[r][s]):
                c = A[r][s] / p
                A[r] = [a - c * b for a, b in zip(A[r], A[s])]
                for row in U:
                    row[s] = row[s] + c * row[r]
        for j2 in range(s + 1, n):
            if not _is_zero_value(A[s][j2]):
                c = A[s][j2] / p
                for row in A:
                    row[j2] = row[j2] - c * row[s]
        exps.append(v)
    return U, exps


def _val_int(model, v, x):
    val = value_valuation(model, v, x)
    return val if isinstance(val, int) else 0


def _rat_inverse(model, M):
    n = len(M)
    A = [list(r) + [model.rat(1) if i == j else model.rat(0) for j in range(n)] for i, r in enumerate(M)]
    for col in range(n):
        piv = next(r for r in range(col, n) if A[r][col])
        A[col], A[piv] = A[piv], A[col]
        inv = 1 / A[col][col] if not isinstance(A[col][col], Rat) else A[col][col].inverse()
        A[col] = [v * inv for v in A[col]]
        for r in range(n):
            if r != col and A[r][col]:
                c = A[r][col]
                A[r] = [a - c * b for a, b in zip(A[r], A[col])]
    return [row[n:] for row in A]


def trivial_gluing(model, rank: int) -> Gluing:
    one, zero = model.rat(1), model.rat(0)
    return Gluing(model, rank, {}, [[one if i == j else zero for j in range(rank)] for i in range(rank)])


# ---------------------------------------------------------------------------
# windowed adelic modules


class AdelicWindowModule(PatternModule):
    """The window slice of A^*(E(D)) for E glued by ``gluing`` (O(D) if None).

    At each x in the support, coordinates are taken in the Smith frame of
    the gluing matrix, so that column k of the (x,...,x) slice holds digits
    ``[-(D_x + e_k), N)`` and the mixed slice holds ``[-P_xk, N)``.
    """

    def __init__(self, model: P1, D: Divisor, window: Window, gluing: Gluing | None = None,
                 uniformizers: dict | None = None):
        super().__init__(model, model.field)
        self.D = D
        self.window = window
        self.gluing = gluing or trivial_gluing(model, 1)
        self.n = self.gluing.rank
        self.uniformizers = uniformizers or {}
        S = window.support
        N = window.precision
        for x in D:
            if x not in S:
                raise WindowError(f"window support misses {x} in the twist")
        for x in self.gluing.points:
            if x not in S:
                raise WindowError(f"window support misses gluing point {x}")
        self.lat = {}  # (x, k) -> lattice start exponent D_x + e_k
        for x in S:
            for k, e in enumerate(self.gluing.exponents(x)):
                self.lat[(x, k)] = D(x) + e
                if N < -self.lat[(x, k)]:
                    raise WindowError(f"precision {N} below the lattice start at {x}")
        self.basis = riemann_roch_basis(model, Divisor({x: window.pole_bound(x) for x in S}))
        self.P = {key: max(window.pole_bound(key[0]), lat) for key, lat in self.lat.items()}

    def _blocks(self):
        for x in self.window.support:
            for k in range(self.n):
                yield x, k

    def kind_dim(self, kind):
        N = self.window.precision
        if kind == "F":
            return self.n * len(self.basis)
        if kind == "O":
            return sum((N + self.lat[b]) * b[0].residue_degree for b in self._blocks())
        return sum((N + self.P[b]) * b[0].residue_degree for b in self._blocks())

    def _a_index(self):
        N = self.window.precision
        off, pos = {}, 0
        for b in self._blocks():
            off[b] = pos
            pos += (N + self.P[b]) * b[0].residue_degree
        return off

    def _make_conversion(self, src, tgt):
        f = self.field
        S, N = self.window.support, self.window.precision
        aoff = self._a_index()
        M = la.zeros(f, self.kind_dim("A"), self.kind_dim(src))
        if (src, tgt) == ("O", "A"):
            col = 0
            for b in self._blocks():
                x = b[0]
                shift = (self.P[b] - self.lat[b]) * x.residue_degree
                for j in range((N + self.lat[b]) * x.residue_degree):
                    M[aoff[b] + shift + j][col] = f.one
                    col += 1
            return M
        if (src, tgt) == ("F", "A"):
            nb = len(self.basis)
            for i in range(self.n):
                for bi, g in enumerate(self.basis):
                    col = i * nb + bi
                    for x in S:
                        row = self.gluing.smith(x)[0][i]
                        for k in range(self.n):
                            val = self._entry(g, row[k], x, N)
                            if val is None:
                                continue
                            digs = local_digits(self.model, val, x, -self.P[(x, k)], N, self.uniformizers.get(x))
                            r = aoff[(x, k)]
                            for dv in digs:
                                for c in dv:
                                    if c != f.zero:
                                        M[r][col] = c
                                    r += 1
            return M
        raise WindowError(f"no structure map {src} -> {tgt}")

    def _entry(self, g, u, x, N):
        """g * u at x, or None when u is exactly 0."""
        if not isinstance(u, LocalSeries):
            if not u:
                return None
            if u == 1:
                return g
            if self.uniformizers.get(x) is not None:
                return g * u
        cache = self.__dict__.setdefault("_expanded", {})
        key = (id(g), x)
        if key not in cache:
            vg = self.model.valuation(g, x) if g else None
            cache[key] = expand(g, x, N, self.model) if vg is not None and vg < N else None
        sg = cache[key]
        if sg is None:
            return self.model.rat(0)
        need = N - sg.val  # u is integral, so this is enough for the product
        if isinstance(u, LocalSeries):
            if u.prec < need:
                raise WindowError(f"gluing entry at {x} known only to precision {u.prec}")
        else:
            if self.model.valuation(u, x) >= need:
                return self.model.rat(0)
            u = expand(u, x, need, self.model)
        return sg * u

    # decoding helpers ---------------------------------------------------
    def global_section(self, vec) -> list:
        """F-part coordinates -> row vector of global functions."""
        nb = len(self.basis)
        out = []
        for i in range(self.n):
            acc = self.model.rat(0)
            for b in range(nb):
                c = vec[i * nb + b]
                if c != self.field.zero:
                    acc = acc + self.basis[b] * c
            out.append(acc)
        return out

    def mixed_unit(self, index):
        """Mixed-slice unit vector ``index`` as (point, Smith column, global value)."""
        N = self.window.precision
        for b in self._blocks():
            x, k = b
            size = (N + self.P[b]) * x.residue_degree
            if index < size:
                j, c = divmod(index, x.residue_degree)
                d = _residue_basis(self.model, x)[c]
                u = self.uniformizers.get(x) or self.model.uniformizer(x)
                val = coord(self.model, x).local_to_global(d) * self.model.rat(u) ** (j - self.P[b])
                return x, k, val
            index -= size
        raise IndexError(index)


def _times(model, g, v, x, N):
    if isinstance(v, LocalSeries):
        gv = model.valuation(g, x)
        if gv == float("inf"):
            return model.rat(0)
        return expand(g, x, max(N - v.val, gv + 1), model) * v
    return g * v


class SkyscraperModule(PatternModule):
    """Only the (x,...,x) pattern is nonzero; all maps are identities."""

    def __init__(self, model, sheaf: Skyscraper):
        super().__init__(model, model.field)
        self.sheaf = sheaf

    def kind_dim(self, kind):
        return self.sheaf.total_dimension() if kind == "O" else 0

    def _make_conversion(self, src, tgt):
        return la.zeros(self.field, self.kind_dim(tgt), self.kind_dim(src))


# ---------------------------------------------------------------------------
# adelic cohomology with stabilization


def _normalize_sheaf(model, sheaf):
    if isinstance(sheaf, LineBundle):
        return sheaf.D, None
    if isinstance(sheaf, Gluing):
        return Divisor(), sheaf
    if isinstance(sheaf, tuple) and len(sheaf) == 2 and isinstance(sheaf[0], Gluing):
        return sheaf[1], sheaf[0]
    raise TypeError(f"unsupported sheaf {sheaf!r}")


def _window_dims(model, D, gluing, window, mode, uniformizers, want_reps=False, top=2):
    # top=1 suffices for H^0 = ker d0
    M = AdelicWindowModule(model, D, window, gluing, uniformizers)
    C = dold_kan(M, mode, top=top)
    dims = C.cohomology()
    reps = None
    if want_reps:
        reps = _representatives(M, C, mode)
    return dims, reps, M


def _representatives(M: AdelicWindowModule, C: CochainComplex, mode):
    """H^0 as global row vectors; H^1 as single-digit mixed adele values."""
    f = M.field
    if mode != "normalized":
        C = dold_kan(M, "normalized", top=2)
    nF = M.kind_dim("F")
    pats = M.model.chain_types(0)
    offs, pos = {}, 0
    for c in pats:
        offs[c] = pos
        pos += M.kind_dim(pattern_kind(M.model, c))
    eta = ChainType((M.model.eta,))
    h0 = [M.global_section(v[offs[eta]: offs[eta] + nF]) for v in la.nullspace(f, C.diffs[0], C.dims[0])]
    # normalized level 1 is the mixed slice, with unit basis vectors in order
    n1 = C.dims[1]
    want = C.cohomology()[1]
    rows = la.transpose(C.diffs[0]) if C.dims[0] and n1 else []
    cur = la.rank(f, rows) if rows else 0
    h1 = []
    for j in range(n1):
        if len(h1) == want:
            break
        e = [f.one if i == j else f.zero for i in range(n1)]
        r = la.rank(f, rows + [e])
        if r > cur:
            rows.append(e)
            cur = r
            h1.append(M.mixed_unit(j))
    return {"H0": h0, "H1": h1}


def _next_point(model, S):
    for x in model.closed_points():
        if x not in S:
            return x


def initial_window(model, D: Divisor, gluing: Gluing | None, precision: int | None = None) -> Window:
    pts = set(D) | {model.inf}
    if gluing is not None:
        pts |= set(gluing.points)
    S = tuple(sorted(pts, key=lambda x: x.sort_key()))
    B = {x: D(x) for x in S}
    lows = [-D(x) for x in S]
    if gluing is not None:
        for x in S:
            es = gluing.exponents(x)
            B[x] = B[x] + max(es)
            lows += [-D(x) - e for e in es]
    N = max([1] + lows) if precision is None else precision
    return Window(S, Divisor(B), N)


def _grow(model, w: Window, grow_support: bool) -> Window:
    S = list(w.support)
    B = {x: w.pole_bound(x) + 1 for x in S}
    if grow_support:
        y = _next_point(model, S)
        S.append(y)
        B[y] = 0
    S = tuple(sorted(S, key=lambda x: x.sort_key()))
    return Window(S, Divisor(B), w.precision)


def adelic_cohomology(model, sheaf, policy: WindowPolicy | None = None, representatives: bool = False) -> CohomologyReport:
    """Cohomology dimensions of a sheaf from its windowed adelic complex."""
    policy = policy or WindowPolicy()
    if isinstance(model, SpecZ):
        return spec_z_cohomology(model, sheaf)
    if isinstance(sheaf, Skyscraper):
        trace = []
        prev = None
        M = SkyscraperModule(model, sheaf)
        for r in range(2):
            C = dold_kan(M, policy.mode, top=2)
            dims = C.cohomology()
            trace.append({"round": r, "dims": {str(k): v for k, v in dims.items()}})
            if dims == prev:
                break
            prev = dims
        reps = None
        if representatives:
            reps = {"H0": [[str(x), d] for x, d in sheaf.fibres], "H1": []}
        return CohomologyReport(dims, True, trace, reps)
    D, gluing = _normalize_sheaf(model, sheaf)
    w = initial_window(model, D, gluing, policy.precision)
    deg = abs(D.degree())
    extra = 0
    if gluing is not None:
        extra = sum(sum(abs(e) for e in gluing.exponents(x)) * x.residue_degree for x in gluing.points)
    cap = policy.max_rounds or deg + extra + 5
    trace = []
    prev = None
    for r in range(cap):
        dims, _, _ = _window_dims(model, D, gluing, w, policy.mode, policy.uniformizers)
        trace.append({"round": r, "window": w.to_json(), "dims": {str(k): v for k, v in dims.items()}})
        if dims == prev:
            reps = None
            if representatives:
                _, reps, _ = _window_dims(model, D, gluing, w, policy.mode, policy.uniformizers, True)
            return CohomologyReport(dims, True, trace, reps)
        prev = dims
        w = _grow(model, w, policy.grow_support)
    return CohomologyReport({}, False, trace)


# ---------------------------------------------------------------------------
# Cech oracle on the two-chart cover of P^1


def cech_cohomology(model: P1, sheaf) -> CohomologyReport:
    """Cech cohomology for U0 = P^1 - {inf}, U1 = P^1 - {0}.

    O(D) is first moved to O(deg D * [inf]) by the explicit isomorphism
    f -> f * prod_x pi_x^(D_x) (finite x); then the Cech complex of Laurent
    monomials is cut to a window wide enough to hold every class.
    """
    f = model.field
    if isinstance(sheaf, Skyscraper):
        zero_pt = model.point("t")
        c0 = c1 = c01 = 0
        rows = []
        for x, d in sheaf.fibres:
            dim = d * x.residue_degree
            in0 = x != model.inf
            in1 = x != zero_pt
            c0 += dim * in0
            c1 += dim * in1
            c01 += dim * (in0 and in1)
        # differential (a, b) -> b - a on each overlap block
        M = la.zeros(f, c01, c0 + c1)
        r = i0 = i1 = 0
        for x, d in sheaf.fibres:
            dim = d * x.residue_degree
            in0, in1 = x != model.inf, x != zero_pt
            for k in range(dim):
                if in0 and in1:
                    M[r][i0 + k] = f.neg(f.one)
                    M[r][c0 + i1 + k] = f.one
                    r += 1
            i0 += dim * in0
            i1 += dim * in1
        rk = la.rank(f, M) if c01 and (c0 + c1) else 0
        return CohomologyReport({0: c0 + c1 - rk, 1: c01 - rk}, True, [], method="cech")
    if not isinstance(sheaf, LineBundle):
        raise TypeError("Cech oracle supports O(D) and skyscrapers")
    n = sheaf.D.degree()
    W = abs(n) + 3
    # C0: t^j (j >= 0) on U0, t^(n-j) (j >= 0) on U1; C1: t^k for |k| <= W
    u0 = [j for j in range(0, W + 1)]
    u1 = [n - j for j in range(0, n + W + 1)]
    ks = list(range(-W, W + 1))
    kidx = {k: i for i, k in enumerate(ks)}
    M = la.zeros(f, len(ks), len(u0) + len(u1))
    for c, j in enumerate(u0):
        M[kidx[j]][c] = f.neg(f.one)
    for c, j in enumerate(u1):
        if j in kidx:
            M[kidx[j]][len(u0) + c] = f.one
    rk = la.rank(f, M)
    h0 = len(u0) + len(u1) - rk
    h1 = len(ks) - rk
    return CohomologyReport({0: h0, 1: h1}, True, [{"laurent_window": W}], method="cech")


# ---------------------------------------------------------------------------
# Spec Z


def polar_part(model, value, x):
    """Principal part at x of a global function, as a global function."""
    v = model.valuation(value, x)
    if v >= 0:
        return model.rat(0)
    s = expand(value, x, 0, model)
    return s.to_global()


def spec_z_h1_witness(model: SpecZ, alpha: ComponentData):
    """g in Q with g - alpha integral everywhere (partial fractions / CRT)."""
    g = Fraction(0)
    for x, v in alpha.exceptions:
        if isinstance(v, LocalSeries):
            if v.val < 0:
                g += v.truncate(0).to_global()
        else:
            g += polar_part(model, v, x)
    r = alpha.default.value(model)
    for x in model.poles(r):
        if x not in alpha.exc:
            g += polar_part(model, r, x)
    return g


def spec_z_cohomology(model: SpecZ, sheaf=None, samples: int = 20, seed: int = 0) -> CohomologyReport:
    """Ranks of H^0, H^1 of O on Spec Z.

    H^0 = ker(Q x prod Z_p -> A) is Z (rank 1); H^1 = 0 because every
    restricted-product element is a rational number plus an integral adele.
    Both are checked on seeded samples before reporting.
    """
    if sheaf is not None and not (isinstance(sheaf, LineBundle) and not sheaf.D):
        raise ValueError("only O is exposed on Spec Z")
    rng = random.Random(seed)
    pool = model.first_points(6)
    for _ in range(samples):
        alpha = _random_mixed(model, rng, pool)
        g = spec_z_h1_witness(model, alpha)
        h = make_component(model, {x: g - v for x, v in alpha.exceptions},
                           tail(model, g - alpha.default.value(model)))
        if any(_neg_val(model, v, x) for x, v in h.exceptions):
            raise ArithmeticError(f"partial-fraction step failed on {alpha}")
    return CohomologyReport({0: 1, 1: 0}, True, [{"samples": samples}], method="partial-fractions")


def _neg_val(model, v, x):
    val = value_valuation(model, v, x)
    return isinstance(val, int) and val < 0


def _random_mixed(model, rng, pool, twist=None, series_prob=0.0, prec=6):
    twist = twist or Divisor()
    exc = {}
    for x in rng.sample(pool, rng.randint(1, min(3, len(pool)))):
        g = random_function(model, rng, [x], 3)
        if series_prob and rng.random() < series_prob and g:
            v = model.valuation(g, x)
            g = expand(g, x, max(prec, v + 1, -twist(x) + 1), model)
        exc[x] = g
    r = random_function(model, rng, rng.sample(pool, 1), 1)
    return make_component(model, exc, tail(model, r), twist)


# ---------------------------------------------------------------------------
# resolution check


@dataclass
class ResolutionReport:
    samples: int
    coboundaries: int
    matched_h1: int
    unexplained: list
    h0: int
    h1: int

    @property
    def ok(self):
        return not self.unexplained

    def to_json(self):
        return {
            "samples": self.samples,
            "coboundaries": self.coboundaries,
            "matched_h1": self.matched_h1,
            "unexplained": self.unexplained,
            "h0": self.h0,
            "h1": self.h1,
        }


def resolution_check(model: P1, D: Divisor, samples: int = 20, seed: int = 0, series_prob: float = 0.2,
                     pool=None) -> ResolutionReport:
    """Explain sampled level-1 cocycles of A(O(D)) as coboundaries plus H^1.

    Each sample alpha is placed in the mixed pattern (a level-1 cocycle of
    the alternating complex).  A global f and H^1 coefficients c are solved
    for in a window; the explanation is then verified exactly with adeles:
    ``a - d(h, f) == sum c_i rep_i`` where h must be integral.
    """
    rng = random.Random(seed)
    rep = adelic_cohomology(model, LineBundle(D), representatives=True)
    reps = rep.representatives["H1"]
    pool = pool or model.first_points(5)
    cob = matched = 0
    bad = []
    for s in range(samples):
        alpha = _random_mixed(model, rng, pool, D, series_prob)
        a = from_components(model, 1, {model.pattern("(x,eta)"): alpha}, twist=D)
        if not alternating_differential(a).is_zero():
            bad.append({"sample": s, "reason": "not a cocycle"})
            continue
        sol = _explain(model, D, alpha, reps)
        if sol is None:
            bad.append({"sample": s, "reason": "no solution in window", "alpha": _cd_json(alpha)})
            continue
        g, coeffs = sol
        ok, why = _verify_explanation(model, D, a, alpha, g, coeffs, reps)
        if not ok:
            bad.append({"sample": s, "reason": why, "alpha": _cd_json(alpha)})
            continue
        if any(c != model.field.zero for c in coeffs):
            matched += 1
        else:
            cob += 1
    return ResolutionReport(samples, cob, matched, bad, rep.dims[0], rep.dims[1])


def _cd_json(cd: ComponentData):
    from .adeles import value_to_json

    return {"exceptions": {str(x): value_to_json(v) for x, v in cd.exceptions}, "default": cd.default.to_json()}


def _explain(model, D, alpha: ComponentData, reps):
    """Solve polar(f) + sum c_i polar(rep_i) = polar(alpha) in a window."""
    fld = model.field
    pts = set(alpha.points()) | set(D) | {model.inf} | {x for x, _, _ in reps}
    S = sorted(pts, key=lambda x: x.sort_key())
    B = {}
    for x in S:
        need = [D(x)]
        v = value_valuation(model, alpha.value_at(model, x), x)
        if isinstance(v, int):
            need.append(-v)
        for y, _, val in reps:
            if y == x:
                need.append(-model.valuation(val, x))
        B[x] = max(need)
    Bd = Divisor(B)
    if Bd.degree() < -1:
        B[model.inf] = B.get(model.inf, 0) + (-1 - Bd.degree())
        Bd = Divisor(B)
    basis = riemann_roch_basis(model, Bd)
    rows_for = []
    for x in S:
        lo, hi = -B[x], -D(x)
        if hi <= lo:
            continue
        rows_for.append((x, lo, hi))
    cols = []
    for g in basis:
        col = []
        for x, lo, hi in rows_for:
            for dv in local_digits(model, g, x, lo, hi):
                col.extend(dv)
        cols.append(col)
    for y, _, val in reps:
        col = []
        for x, lo, hi in rows_for:
            if x == y:
                for dv in local_digits(model, val, x, lo, hi):
                    col.extend(dv)
            else:
                col.extend([fld.zero] * ((hi - lo) * x.residue_degree))
        cols.append(col)
    rhs = []
    for x, lo, hi in rows_for:
        for dv in local_digits(model, alpha.value_at(model, x), x, lo, hi):
            rhs.extend(dv)
    if not rhs:
        return model.rat(0), [fld.zero] * len(reps)
    A = la.transpose(cols) if cols else [[] for _ in rhs]
    sol = la.solve(fld, A, rhs) if cols else (None if any(v != fld.zero for v in rhs) else [])
    if sol is None:
        return None
    g = model.rat(0)
    for c, b in zip(sol, basis):
        if c != fld.zero:
            g = g + b * c
    return g, sol[len(basis):]


def rep_adele(model, D, x, val):
    cd = make_component(model, {x: val}, tail(model, 0), D)
    return from_components(model, 1, {model.pattern("(x,eta)"): cd}, twist=D)


def _verify_explanation(model, D, a: Adele, alpha, g, coeffs, reps):
    fld = model.field
    target = from_components(model, 1, {}, twist=D)
    comb = {}
    for c, (x, _, val) in zip(coeffs, reps):
        if c != fld.zero:
            comb[x] = comb.get(x, model.rat(0)) + val * c
            target = target + rep_adele(model, D, x, val * c)
    # h = g + sum c_i rep_i - alpha must be integral (v_x >= -D_x everywhere)
    exc = {}
    for x in set(alpha.points()) | set(comb):
        exc[x] = _sub_value(model, x, g + comb.get(x, model.rat(0)), alpha.value_at(model, x))
    h = make_component(model, exc, tail(model, g - alpha.default.value(model)), D)
    for x, v in h.exceptions:
        val = value_valuation(model, v, x)
        if isinstance(val, AtLeast):
            if val.bound < -D(x):
                return False, f"precision too low to certify integrality at {x}"
        elif val < -D(x):
            return False, f"h not integral at {x}"
    b = from_components(model, 0, {model.pattern("(x)"): h, model.pattern("(eta)"): g}, twist=D)
    if b.defects():
        return False, "coboundary preimage leaves the lattice"
    diff = a - alternating_differential(b)
    if not diff.compare(target).consistent:
        return False, "a - d(b) differs from the H^1 combination"
    return True, ""


def _sub_value(model, x, g, v):
    if isinstance(v, LocalSeries):
        return expand(g, x, max(v.prec, model.valuation(g, x) + 1 if g else v.prec), model) - v if g else -v
    return g - v
