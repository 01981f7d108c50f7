"""The cosimplicial ring of adeles of a one-dimensional model.

Level-n adeles have one component per chain pattern (see
:meth:`CurveLike.chain_types`):

* ``(eta,...,eta)``: a global function (an element of F);
* ``(x,...,x)``: a family over all closed points in the completed local
  rings, given by finitely many exceptions over a default tail;
* mixed ``(x,...,x,eta,...,eta)``: a restricted-product element, again
  exceptions over an integral default tail.

Cofaces and codegeneracies act by chain reindexing: the component of
``coface(a, i)`` at a pattern ``c`` is the canonical image of ``a``'s
component at ``face(c, i)``.  All canonical maps between local factors are
inclusions, so on the finite presentation they are the identity on
exceptions and tails.
"""

from __future__ import annotations

import functools
import random
from dataclasses import dataclass, field, replace
from fractions import Fraction

from .local import Comparison, Divisor, LocalSeries, PrecisionError, expand, working_precision
from .poly import Poly, Rat
from .scheme import X, ChainType, CurveLike, Point, SpecZ, degeneracy, face


class AdeleError(ValueError):
    pass


# ---------------------------------------------------------------------------
# default tails


@dataclass(frozen=True)
class DefaultTail:
    """Value at all non-exceptional closed points: 0, 1 or a global r."""

    kind: str  # "zero" | "one" | "integral"
    r: object = None

    def value(self, model):
        if self.kind == "zero":
            return model.rat(0)
        if self.kind == "one":
            return model.rat(1)
        return self.r

    def to_json(self):
        if self.kind == "integral":
            return {"kind": "integral", "r": value_to_json(self.r)}
        return {"kind": self.kind}


def tail(model, r) -> DefaultTail:
    r = model.rat(r)
    if not r:
        return DefaultTail("zero")
    if r == model.rat(1):
        return DefaultTail("one")
    return DefaultTail("integral", r)


ZERO_TAIL = DefaultTail("zero")
ONE_TAIL = DefaultTail("one")


# ---------------------------------------------------------------------------
# value helpers


def value_to_json(v):
    if isinstance(v, LocalSeries):
        return v.to_json()
    if isinstance(v, Fraction) or isinstance(v, int):
        v = Fraction(v)
        return {"num": str(v.numerator), "den": str(v.denominator)}
    return v.to_json()


def value_from_json(model, d):
    if "prec" in d:
        return LocalSeries.from_json(model, d)
    if isinstance(model, SpecZ):
        return Fraction(int(d["num"]), int(d["den"]))
    return Rat.from_json(model.field, d)


def value_valuation(model, v, x):
    if isinstance(v, LocalSeries):
        return v.valuation()
    return model.valuation(v, x)


def _binop(model, x, a, b, op, prec):
    if isinstance(a, LocalSeries) or isinstance(b, LocalSeries):
        p = min(s.prec for s in (a, b) if isinstance(s, LocalSeries))
        a = a if isinstance(a, LocalSeries) else expand(a, x, max(p, _safe_prec(model, a, x, p)), model)
        b = b if isinstance(b, LocalSeries) else expand(b, x, max(p, _safe_prec(model, b, x, p)), model)
    return op(a, b)


def _safe_prec(model, f, x, p):
    v = model.valuation(f, x)
    return p if v == float("inf") else max(p, v + 1)


def compare_values(model, x, a, b) -> Comparison:
    if isinstance(a, LocalSeries) or isinstance(b, LocalSeries):
        d = _binop(model, x, a, b, lambda u, w: u - w, None)
        return Comparison.INDETERMINATE if d.is_zero() else Comparison.NOT_EQUAL
    return Comparison.EQUAL if a == b else Comparison.NOT_EQUAL


# ---------------------------------------------------------------------------
# restricted-product components


@dataclass(frozen=True)
class ComponentData:
    """Finite exceptions over a symbolic default tail."""

    exceptions: tuple  # sorted tuple of (Point, value)
    default: DefaultTail
    removed: frozenset = frozenset()

    @property
    def exc(self) -> dict:
        return dict(self.exceptions)

    def points(self) -> list:
        return [x for x, _ in self.exceptions]

    def value_at(self, model, x: Point):
        if x in self.removed:
            raise AdeleError(f"component undefined at removed point {x}")
        for y, v in self.exceptions:
            if y == x:
                return v
        return self.default.value(model)


def make_component(model, exceptions: dict, default: DefaultTail, twist: Divisor | None = None,
                   removed=frozenset(), keep=()) -> ComponentData:
    """Canonical ComponentData: the tail is valid off the exceptions.

    Points where the tail violates ``v_x >= -D_x`` become explicit
    exceptions; exceptions exactly equal to the tail are dropped.
    """
    twist = twist or Divisor()
    removed = frozenset(removed)
    r = default.value(model)
    exc = {x: v for x, v in exceptions.items() if x not in removed}
    bad = set()
    if r:
        cands = set(model.poles(r)) | {x for x, m in twist.items() if m < 0}
        bad = {x for x in cands if model.valuation(r, x) < -twist(x)}
    bad |= set(keep)
    for x in bad:
        if x not in exc and x not in removed:
            exc[x] = r
    exc = {
        x: v
        for x, v in exc.items()
        if x in bad or isinstance(v, LocalSeries) or v != r
    }
    items = tuple(sorted(exc.items(), key=lambda kv: kv[0].sort_key()))
    return ComponentData(items, default, removed)


def component_binop(model, a: ComponentData, b: ComponentData, op, twist=None) -> ComponentData:
    if a.removed != b.removed:
        raise AdeleError("components defined on different opens")
    pts = set(a.points()) | set(b.points())
    exc = {x: _binop(model, x, a.value_at(model, x), b.value_at(model, x), op, None) for x in pts}
    r = op(a.default.value(model), b.default.value(model))
    return make_component(model, exc, tail(model, r), twist, a.removed)


def compare_components(model, a: ComponentData, b: ComponentData) -> Comparison:
    if a.removed != b.removed:
        return Comparison.NOT_EQUAL
    if a.default.value(model) != b.default.value(model):
        return Comparison.NOT_EQUAL
    res = Comparison.EQUAL
    for x in set(a.points()) | set(b.points()):
        res = res & compare_values(model, x, a.value_at(model, x), b.value_at(model, x))
        if res is Comparison.NOT_EQUAL:
            break
    return res


# ---------------------------------------------------------------------------
# adeles


@functools.lru_cache(maxsize=4096)
def pattern_kind(model, c: ChainType) -> str:
    if all(p == model.eta for p in c):
        return "F"
    if all(p == X for p in c):
        return "O"
    return "A"


@dataclass(frozen=True)
class Adele:
    """Level-n adele (or element of the twisted module for O(D))."""

    model: CurveLike
    level: int
    components: tuple  # tuple of (ChainType, ComponentData | global function)
    twist: Divisor = field(default_factory=Divisor)
    removed: frozenset = frozenset()

    def __post_init__(self):
        pats = [c for c, _ in self.components]
        if pats != self.model.chain_types(self.level):
            raise AdeleError("component set does not match the level's chain patterns")

    @property
    def comp(self) -> dict:
        return dict(self.components)

    def __getitem__(self, pattern):
        if isinstance(pattern, str):
            pattern = self.model.pattern(pattern)
        return self.comp[pattern]

    # --- arithmetic ----------------------------------------------------
    def _zip(self, other, op, twist):
        if not isinstance(other, Adele):
            other = diag(self.model.rat(other), self.level, self.model, removed=self.removed)
        if other.level != self.level or other.model != self.model:
            raise AdeleError("level or model mismatch")
        if other.removed != self.removed:
            raise AdeleError("adeles defined on different opens")
        comps = []
        for (c, a), (_, b) in zip(self.components, other.components):
            if pattern_kind(self.model, c) == "F":
                comps.append((c, op(a, b)))
            else:
                comps.append((c, component_binop(self.model, a, b, op, twist)))
        return Adele(self.model, self.level, tuple(comps), twist, self.removed)

    def __add__(self, other):
        tw = self.twist if not isinstance(other, Adele) else _join_twist(self.twist, other.twist)
        return self._zip(other, lambda u, w: u + w, tw)

    __radd__ = __add__

    def __sub__(self, other):
        tw = self.twist if not isinstance(other, Adele) else _join_twist(self.twist, other.twist)
        return self._zip(other, lambda u, w: u - w, tw)

    def __neg__(self):
        return self * -1

    def __mul__(self, other):
        tw = self.twist + (other.twist if isinstance(other, Adele) else Divisor())
        return self._zip(other, lambda u, w: u * w, tw)

    __rmul__ = __mul__

    def compare(self, other: Adele) -> Comparison:
        """Componentwise comparison; decides equality through declared precision."""
        if self.level != other.level or self.removed != other.removed:
            return Comparison.NOT_EQUAL
        res = Comparison.EQUAL
        for (c, a), (_, b) in zip(self.components, other.components):
            if pattern_kind(self.model, c) == "F":
                res = res & (Comparison.EQUAL if a == b else Comparison.NOT_EQUAL)
            else:
                res = res & compare_components(self.model, a, b)
            if res is Comparison.NOT_EQUAL:
                return res
        return res

    def __eq__(self, other):
        if not isinstance(other, Adele):
            return NotImplemented
        return self.compare(other).consistent

    def __hash__(self):
        return hash((self.level, self.removed))

    def is_zero(self) -> bool:
        return self.compare(zero(self.model, self.level, removed=self.removed)).consistent

    def defects(self) -> list:
        """Where this element leaves the ring: non-integral (x,...,x) values."""
        out = []
        for c, a in self.components:
            if pattern_kind(self.model, c) != "O":
                continue
            for x, v in a.exceptions:
                val = value_valuation(self.model, v, x)
                if not isinstance(val, (int, float)) or val < -self.twist(x):
                    if isinstance(val, (int, float)):
                        out.append((c, x, val))
        return out

    def support(self) -> set:
        pts = set()
        for c, a in self.components:
            if isinstance(a, ComponentData):
                pts |= set(a.points())
        return pts

    # --- serialization -------------------------------------------------
    def to_json(self) -> dict:
        comps = {}
        for c, a in self.components:
            if isinstance(a, ComponentData):
                comps[str(c)] = {
                    "exceptions": {str(x): value_to_json(v) for x, v in a.exceptions},
                    "default": a.default.to_json(),
                }
            else:
                comps[str(c)] = value_to_json(a)
        out = {"level": self.level, "components": comps}
        if self.twist:
            out["twist"] = str(self.twist)
        if self.removed:
            out["removed"] = sorted(str(x) for x in self.removed)
        return out

    @classmethod
    def from_json(cls, model, d) -> Adele:
        level = d["level"]
        twist = Divisor.parse(model, d["twist"]) if d.get("twist") else Divisor()
        removed = frozenset(model.point(s) for s in d.get("removed", []))
        comps = []
        for c in model.chain_types(level):
            raw = d["components"][str(c)]
            if pattern_kind(model, c) == "F":
                comps.append((c, value_from_json(model, raw)))
            else:
                dj = raw["default"]
                dt = (
                    tail(model, value_from_json(model, dj["r"]))
                    if dj["kind"] == "integral"
                    else DefaultTail(dj["kind"])
                )
                exc = {model.point(k): value_from_json(model, v) for k, v in raw["exceptions"].items()}
                comps.append((c, make_component(model, exc, dt, twist if pattern_kind(model, c) == "A" else None, removed)))
        return cls(model, level, tuple(comps), twist, removed)


def _join_twist(a: Divisor, b: Divisor) -> Divisor:
    pts = set(a) | set(b)
    return Divisor({x: max(a(x), b(x)) for x in pts})


# ---------------------------------------------------------------------------
# constructors


def zero(model, level: int, twist=None, removed=frozenset()) -> Adele:
    return diag(0, level, model, twist, removed)


def one(model, level: int) -> Adele:
    return diag(1, level, model)


def diag(f, level: int, model: CurveLike, twist=None, removed=frozenset()) -> Adele:
    """The global function f placed in every component.

    Exceptions are exactly the poles of f (beyond the twist).  For
    non-constant f the ``(x,...,x)`` components sit in the ambient local
    fields at the poles; :meth:`Adele.defects` lists those points.
    """
    if level < 0:
        raise AdeleError("level must be non-negative")
    f = model.rat(f)
    twist = twist or Divisor()
    comps = []
    for c in model.chain_types(level):
        if pattern_kind(model, c) == "F":
            comps.append((c, f))
        else:
            comps.append((c, make_component(model, {}, tail(model, f), twist, removed)))
    return Adele(model, level, tuple(comps), twist, frozenset(removed))


def from_components(model, level: int, data: dict, twist=None, removed=frozenset()) -> Adele:
    """Build an adele from ``{pattern: value}``; missing patterns are 0.

    Closed-point patterns accept ``(exceptions_dict, tail_value)`` or a
    ready :class:`ComponentData`.
    """
    twist = twist or Divisor()
    comps = []
    for c in model.chain_types(level):
        v = data.get(c, data.get(str(c)))
        if pattern_kind(model, c) == "F":
            comps.append((c, model.rat(0) if v is None else model.rat(v)))
        else:
            if v is None:
                v = ({}, 0)
            if not isinstance(v, ComponentData):
                exc, r = v
                v = make_component(model, dict(exc), r if isinstance(r, DefaultTail) else tail(model, r),
                                   twist, removed)
            comps.append((c, v))
    return Adele(model, level, tuple(comps), twist, frozenset(removed))


# ---------------------------------------------------------------------------
# cosimplicial structure


def _convert(model, src_pattern, target_pattern, value, twist, removed):
    src_kind = pattern_kind(model, src_pattern)
    tgt_kind = pattern_kind(model, target_pattern)
    if src_kind == "F" and tgt_kind != "F":
        return make_component(model, {}, tail(model, value), twist, removed)
    return value


def coface(a: Adele, i: int) -> Adele:
    n = a.level
    if not 0 <= i <= n + 1:
        raise IndexError(f"coface index {i} out of range for level {n}")
    src = a.comp
    comps = []
    for c in a.model.chain_types(n + 1):
        s = face(c, i)
        comps.append((c, _convert(a.model, s, c, src[s], a.twist, a.removed)))
    return Adele(a.model, n + 1, tuple(comps), a.twist, a.removed)


def codegeneracy(a: Adele, i: int) -> Adele:
    n = a.level
    if n < 1 or not 0 <= i <= n - 1:
        raise IndexError(f"codegeneracy index {i} out of range for level {n}")
    src = a.comp
    comps = [(c, src[degeneracy(c, i)]) for c in a.model.chain_types(n - 1)]
    return Adele(a.model, n - 1, tuple(comps), a.twist, a.removed)


def apply_cosimplicial(a: Adele, f: tuple) -> Adele:
    """The map induced by an order-preserving f: [n] -> [m] (n = a.level)."""
    m = max(f) if f else 0
    comps = []
    src = a.comp
    for c in a.model.chain_types(m):
        s = ChainType(tuple(c[j] for j in f))
        comps.append((c, _convert(a.model, s, c, src[s], a.twist, a.removed)))
    return Adele(a.model, m, tuple(comps), a.twist, a.removed)


def alternating_differential(a: Adele) -> Adele:
    """sum_i (-1)^i coface_i(a)."""
    out = None
    for i in range(a.level + 2):
        term = coface(a, i)
        term = term if i % 2 == 0 else -term
        out = term if out is None else out + term
    return out


# ---------------------------------------------------------------------------
# opens and extension by zero


def restrict(a: Adele, S) -> Adele:
    """Restriction to U = X minus the finite set S of closed points."""
    S = frozenset(S)
    if any(not x.is_closed for x in S):
        raise AdeleError("U would be empty: only closed points may be removed")
    removed = a.removed | S
    comps = []
    for c, v in a.components:
        if isinstance(v, ComponentData):
            exc = {x: w for x, w in v.exceptions if x not in removed}
            v = make_component(a.model, exc, v.default, a.twist if pattern_kind(a.model, c) == "A" else None, removed)
        comps.append((c, v))
    return Adele(a.model, a.level, tuple(comps), a.twist, removed)


def extend_by_zero(a: Adele) -> Adele:
    """Section of restriction: components at removed points set to 0."""
    if not a.removed:
        return a
    comps = []
    z = a.model.rat(0)
    for c, v in a.components:
        if isinstance(v, ComponentData):
            exc = dict(v.exceptions)
            for x in a.removed:
                exc[x] = z
            v = make_component(a.model, exc, v.default, a.twist if pattern_kind(a.model, c) == "A" else None)
            # the zero exceptions must survive canonicalization
            exc_all = dict(v.exceptions)
            for x in a.removed:
                exc_all[x] = z
            v = ComponentData(tuple(sorted(exc_all.items(), key=lambda kv: kv[0].sort_key())), v.default)
        comps.append((c, v))
    return Adele(a.model, a.level, tuple(comps), a.twist, frozenset())


def supported(a: Adele, Z) -> Adele:
    """Projection onto A_{X,T} for T = the chains inside the finite closed set Z.

    Only all-closed patterns survive, and only at points of Z.  The
    structure maps of A_{X,T} are ``supported(coface(a, i), Z)``.
    """
    Z = frozenset(Z)
    if any(not x.is_closed for x in Z):
        raise AdeleError("Z must consist of closed points")
    model = a.model
    comps = []
    for c, v in a.components:
        if pattern_kind(model, c) != "O":
            comps.append((c, model.rat(0) if pattern_kind(model, c) == "F" else
                          make_component(model, {}, ZERO_TAIL, removed=a.removed)))
            continue
        exc = {x: v.value_at(model, x) for x in Z if x not in a.removed}
        comps.append((c, ComponentData(tuple(sorted(((x, w) for x, w in exc.items() if w != 0 or isinstance(w, LocalSeries)),
                                                    key=lambda kv: kv[0].sort_key())), ZERO_TAIL, a.removed)))
    return Adele(model, a.level, tuple(comps), a.twist, a.removed)


# ---------------------------------------------------------------------------
# sheaves


@dataclass(frozen=True)
class LineBundle:
    """O(D) for a divisor D."""

    D: Divisor

    def __str__(self):
        return f"O({self.D})"


@dataclass(frozen=True)
class Skyscraper:
    """Finitely supported sheaf: fibre kappa(x)^d at each listed point."""

    fibres: tuple  # sorted tuple of (Point, d)

    @property
    def support(self):
        return [x for x, _ in self.fibres]

    def total_dimension(self) -> int:
        return sum(d * x.residue_degree for x, d in self.fibres)

    def __str__(self):
        return "sky(" + ";".join(f"{x},{d}" for x, d in self.fibres) + ")"


@dataclass(frozen=True)
class SkyscraperAdele:
    """Level-n adele of a skyscraper: only the (x,...,x) pattern is nonzero."""

    sheaf: Skyscraper
    level: int
    data: tuple  # sorted tuple of (Point, tuple of residue elements)

    def coface(self, i):
        if not 0 <= i <= self.level + 1:
            raise IndexError(f"coface index {i} out of range")
        return replace(self, level=self.level + 1)

    def codegeneracy(self, i):
        if self.level < 1 or not 0 <= i <= self.level - 1:
            raise IndexError(f"codegeneracy index {i} out of range")
        return replace(self, level=self.level - 1)


def module_adele(sheaf, level: int, data, model: CurveLike | None = None):
    """Element of the level-n adelization of a sheaf.

    For ``LineBundle`` the data is ``{pattern: value}`` as for
    :func:`from_components`; every ``(x,...,x)`` value must satisfy the
    twisted bound ``v_x >= -D_x``.  For ``Skyscraper`` the data is
    ``{Point: fibre vector}``, which is carried unchanged at every level.
    """
    if isinstance(sheaf, Skyscraper):
        supp = set(sheaf.support)
        dims = dict(sheaf.fibres)
        for x, vec in data.items():
            if x not in supp:
                raise AdeleError(f"data at {x} outside the skyscraper support")
            if len(vec) != dims[x]:
                raise AdeleError(f"fibre at {x} has dimension {dims[x]}")
        items = tuple(sorted(((x, tuple(v)) for x, v in data.items()), key=lambda kv: kv[0].sort_key()))
        return SkyscraperAdele(sheaf, level, items)
    a = from_components(model, level, data, twist=sheaf.D)
    bad = a.defects()
    if bad:
        c, x, v = bad[0]
        raise AdeleError(f"component {c} at {x} has valuation {v} < {-sheaf.D(x)}")
    return a


# ---------------------------------------------------------------------------
# sampling


def random_function(model, rng: random.Random, points, max_pole: int = 2):
    """Random global function with poles only among ``points``."""
    if isinstance(model, SpecZ):
        num = rng.randint(-20, 20)
        den = 1
        for x in points:
            if x.label != "inf":
                den *= x.label ** rng.randint(0, max_pole)
        return Fraction(num, den)
    f = model.field
    t = model.t
    num_deg = 0
    den = Poly.const(f, 1)
    for x in points:
        k = rng.randint(0, max_pole)
        if x == model.inf:
            num_deg += k
        else:
            den = den * x.label**k
    num_deg += den.degree
    num = Poly(f, [f.random_element(rng) for _ in range(num_deg + 1)])
    return Rat(num, den)


def random_integral(model, rng, x: Point):
    """Random global function regular at x (a unit-or-not element of O_x)."""
    while True:
        pts = [p for p in model.first_points(6) if p != x]
        g = random_function(model, rng, rng.sample(pts, 2), 1)
        if model.valuation(g, x) >= 0:
            return g


def random_adele(model, level: int, rng: random.Random, pool=None, twist=None,
                 series_prob: float = 0.0, prec: int | None = None) -> Adele:
    """Random level-n adele with exceptions drawn from ``pool``."""
    pool = pool or model.first_points(5)
    twist = twist or Divisor()
    prec = prec or working_precision()
    data = {}
    for c in model.chain_types(level):
        kind = pattern_kind(model, c)
        if kind == "F":
            data[c] = random_function(model, rng, rng.sample(pool, min(2, len(pool))))
            continue
        exc = {}
        for x in rng.sample(pool, rng.randint(0, min(3, len(pool)))):
            if kind == "O":
                g = random_integral(model, rng, x) * model.uniformizer(x) ** (-twist(x))
            else:
                g = random_function(model, rng, [x], 3)
            if rng.random() < series_prob:
                v = model.valuation(g, x)
                g = expand(g, x, max(prec, (v if v != float("inf") else 0) + 1), model)
            exc[x] = g
        r = random_function(model, rng, rng.sample(pool, 1), 1)
        data[c] = (exc, r)
    return from_components(model, level, data, twist)
