"""Geometric bases: P^1 over an exact field, Spec Z, and finite posets.

Each model exposes its specialization order and the chains
``x_0 <= ... <= x_n`` that index adele components.  For the one-dimensional
arithmetic models the infinitely many closed points are never
materialized: level-n data is organized by *patterns* such as
``(x,x,eta)`` where ``x`` stands for an arbitrary closed point.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Iterator

from .fields import Field, field_from_descriptor
from .poly import Poly, Rat, factor, is_irreducible


@dataclass(frozen=True)
class Point:
    kind: str  # "generic" | "closed"
    label: object  # Poly, "inf", "eta", prime int, or poset element name
    residue_degree: int = 1

    def __str__(self):
        return str(self.label)

    def __repr__(self):
        return f"Point({self})"

    @property
    def is_closed(self) -> bool:
        return self.kind == "closed"

    def sort_key(self):
        lab = self.label
        if isinstance(lab, Poly):
            return (0, 1, lab.degree, tuple(str(c) for c in lab.coeffs[::-1]))
        if lab == "inf":
            return (0, 0, 0, ())
        if isinstance(lab, int):
            return (0, 2, lab, ())
        return (1 if self.kind == "generic" else 0, 3, 0, (str(lab),))


# placeholder used inside chain patterns for "an arbitrary closed point"
X = Point("closed", "x", 1)


@dataclass(frozen=True)
class ChainType:
    points: tuple

    @property
    def level(self) -> int:
        return len(self.points) - 1

    def __str__(self):
        return "(" + ",".join(str(p) for p in self.points) + ")"

    def __repr__(self):
        return f"ChainType{self}"

    def __iter__(self):
        return iter(self.points)

    def __len__(self):
        return len(self.points)

    def __getitem__(self, i):
        return self.points[i]

    def support(self) -> tuple:
        """The underlying strictly increasing chain (repeats removed)."""
        out = []
        for p in self.points:
            if not out or out[-1] != p:
                out.append(p)
        return tuple(out)

    def is_degenerate(self) -> bool:
        return len(self.support()) < len(self.points)


def face(c: ChainType, i: int) -> ChainType:
    """Delete entry ``i``."""
    if c.level < 1:
        raise IndexError("level-0 chains have no faces")
    if not 0 <= i <= c.level:
        raise IndexError(f"face index {i} out of range for level {c.level}")
    return ChainType(c.points[:i] + c.points[i + 1 :])


def degeneracy(c: ChainType, i: int) -> ChainType:
    """Repeat entry ``i``."""
    if not 0 <= i <= c.level:
        raise IndexError(f"degeneracy index {i} out of range for level {c.level}")
    return ChainType(c.points[: i + 1] + c.points[i:])


def apply_map(c: ChainType, f: tuple) -> ChainType:
    """Precompose the chain [n] -> |X| with an order-preserving f: [k] -> [n]."""
    return ChainType(tuple(c.points[j] for j in f))


def monotone_maps(k: int, n: int) -> Iterator[tuple]:
    """All order-preserving maps [k] -> [n] as tuples of images."""
    return itertools.combinations_with_replacement(range(n + 1), k + 1)


def contract_chain(c: ChainType, alpha, eta: Point, model=None) -> ChainType:
    """Contraction of a chain onto ``eta`` along ``alpha: [n] -> [1]``.

    Entries with ``alpha == 0`` are kept, the rest are replaced by ``eta``.
    """
    alpha = tuple(alpha)
    if len(alpha) != len(c):
        raise ValueError("alpha must have one entry per chain element")
    if any(a not in (0, 1) for a in alpha) or any(a > b for a, b in zip(alpha, alpha[1:])):
        raise ValueError(f"alpha {alpha} is not an order-preserving map to [1]")
    if model is not None and not all(model.leq(p, eta) for p in c.points):
        raise ValueError(f"{eta} is not an upper bound of {c}")
    return ChainType(tuple(p if a == 0 else eta for p, a in zip(c.points, alpha)))


class SchemeModel:
    kind: str
    dimension: int
    eta: Point

    def leq(self, x: Point, y: Point) -> bool:
        raise NotImplementedError

    def chain_types(self, n: int) -> list:
        raise NotImplementedError

    def descriptor(self) -> dict:
        raise NotImplementedError

    @property
    def arithmetic(self) -> bool:
        return self.kind in ("P1", "SpecDedekind")


class CurveLike(SchemeModel):
    """Shared structure of the one-dimensional models (P^1, Spec Z)."""

    dimension = 1

    def leq(self, x, y):
        return x == y or (x.is_closed and y == self.eta)

    def chain_types(self, n: int) -> list:
        if n < 0:
            raise ValueError("level must be non-negative")
        return [ChainType((X,) * a + (self.eta,) * (n + 1 - a)) for a in range(n + 1, -1, -1)]

    def pattern(self, s: str) -> ChainType:
        names = [p.strip() for p in s.strip().strip("()").split(",")]
        pts = []
        for name in names:
            if name == "x":
                pts.append(X)
            elif name in ("eta", "η"):
                pts.append(self.eta)
            else:
                raise ValueError(f"bad pattern entry {name!r}")
        c = ChainType(tuple(pts))
        if c not in self.chain_types(c.level):
            raise ValueError(f"{s!r} is not weakly increasing")
        return c

    # function-field interface (implemented by subclasses)
    def valuation(self, f, x: Point):
        raise NotImplementedError

    def poles(self, f) -> list:
        raise NotImplementedError

    def zeros(self, f) -> list:
        raise NotImplementedError

    def closed_points(self) -> Iterator[Point]:
        raise NotImplementedError

    def first_points(self, k: int) -> list:
        return list(itertools.islice(self.closed_points(), k))


INF_LABEL = "inf"


class P1(CurveLike):
    """The projective line over an exact base field."""

    kind = "P1"

    def __init__(self, field):
        self.field: Field = field_from_descriptor(field)
        self.eta = Point("generic", "eta", 1)
        self.inf = Point("closed", INF_LABEL, 1)
        self.t = Poly.t(self.field)

    def __eq__(self, other):
        return isinstance(other, P1) and other.field is self.field

    def __hash__(self):
        return hash(("P1", self.field.char))

    def __repr__(self):
        return f"P1({self.field!r})"

    def descriptor(self):
        return {"kind": "P1", "field": self.field.descriptor}

    # points -----------------------------------------------------------
    def point(self, label) -> Point:
        if isinstance(label, Point):
            return label
        if isinstance(label, str):
            s = label.strip()
            if s in ("inf", "∞"):
                return self.inf
            if s in ("eta", "η"):
                return self.eta
            label = Poly.parse(self.field, s)
        p = label.monic()
        if p.degree < 1 or not is_irreducible(p):
            raise ValueError(f"{label} is not irreducible")
        return Point("closed", p, p.degree)

    def closed_points(self):
        yield self.inf
        f = self.field
        if f.char:
            for d in itertools.count(1):
                for tail in itertools.product(range(f.char), repeat=d):
                    p = Poly(f, tuple(reversed(tail)) + (1,))
                    if d == 1 or is_irreducible(p):
                        yield Point("closed", p, d)
        else:
            yield Point("closed", self.t, 1)
            for a in itertools.count(1):
                for c in (a, -a):
                    yield Point("closed", self.t - c, 1)

    # function field -----------------------------------------------------
    def rat(self, f) -> Rat:
        if isinstance(f, Rat):
            return f
        if isinstance(f, Poly):
            return Rat(f)
        if isinstance(f, str):
            return Rat.parse(self.field, f)
        return Rat.const(self.field, f)

    def uniformizer(self, x: Point) -> Rat:
        return Rat(Poly.const(self.field, 1), self.t) if x == self.inf else Rat(x.label)

    def valuation(self, f, x: Point):
        f = self.rat(f)
        if not f:
            return float("inf")
        if x == self.inf:
            return f.den.degree - f.num.degree
        return _poly_val(f.num, x.label) - _poly_val(f.den, x.label)

    def poles(self, f) -> list:
        f = self.rat(f)
        pts = [Point("closed", g, g.degree) for g, _ in factor(f.den)]
        if f.num.degree > f.den.degree:
            pts.append(self.inf)
        return sorted(pts, key=Point.sort_key)

    def zeros(self, f) -> list:
        f = self.rat(f)
        if not f:
            raise ValueError("zero has no divisor")
        pts = [Point("closed", g, g.degree) for g, _ in factor(f.num)]
        if f.num.degree < f.den.degree:
            pts.append(self.inf)
        return sorted(pts, key=Point.sort_key)

    def degree(self, x: Point) -> int:
        return x.residue_degree


def _poly_val(p: Poly, q: Poly) -> int:
    v = 0
    while p:
        quo, rem = divmod(p, q)
        if rem:
            break
        p = quo
        v += 1
    return v


def _is_prime(n: int) -> bool:
    return n >= 2 and all(n % q for q in range(2, int(n**0.5) + 1))


def _prime_factors(n: int) -> list:
    n = abs(n)
    out, q = [], 2
    while q * q <= n:
        if n % q == 0:
            out.append(q)
            while n % q == 0:
                n //= q
        q += 1
    if n > 1:
        out.append(n)
    return out


class SpecZ(CurveLike):
    """Spec of the integers: closed points are primes, function field Q."""

    kind = "SpecDedekind"

    def __init__(self):
        self.eta = Point("generic", "eta", 1)
        self.field = None

    def __eq__(self, other):
        return isinstance(other, SpecZ)

    def __hash__(self):
        return hash("SpecZ")

    def __repr__(self):
        return "SpecZ()"

    def descriptor(self):
        return {"kind": "SpecDedekind", "ring": "Z"}

    def point(self, label) -> Point:
        if isinstance(label, Point):
            return label
        if isinstance(label, str) and label.strip() in ("eta", "η"):
            return self.eta
        p = int(label)
        if not _is_prime(p):
            raise ValueError(f"{p} is not prime")
        return Point("closed", p, 1)

    def closed_points(self):
        for n in itertools.count(2):
            if _is_prime(n):
                yield Point("closed", n, 1)

    def rat(self, f) -> Fraction:
        return Fraction(f)

    def uniformizer(self, x: Point) -> Fraction:
        return Fraction(x.label)

    def valuation(self, f, x: Point):
        f = Fraction(f)
        if not f:
            return float("inf")
        p = x.label
        return _int_val(f.numerator, p) - _int_val(f.denominator, p)

    def poles(self, f) -> list:
        return [Point("closed", p, 1) for p in _prime_factors(Fraction(f).denominator)]

    def zeros(self, f) -> list:
        f = Fraction(f)
        if not f:
            raise ValueError("zero has no divisor")
        return [Point("closed", p, 1) for p in _prime_factors(f.numerator)]


def _int_val(n: int, p: int) -> int:
    v = 0
    while n and n % p == 0:
        n //= p
        v += 1
    return v


class FinitePoset(SchemeModel):
    """A finite poset given by a relation table; no ring structure."""

    kind = "FinitePoset"

    def __init__(self, n_elements: int | None = None, relation: Iterable = ()):
        rel = [tuple(r) for r in relation]
        if n_elements is None:
            n_elements = 1 + max((max(a, b) for a, b in rel), default=0)
        self.n = n_elements
        le = [[i == j for j in range(self.n)] for i in range(self.n)]
        for a, b in rel:
            le[a][b] = True
        for k in range(self.n):
            for i in range(self.n):
                if le[i][k]:
                    for j in range(self.n):
                        if le[k][j]:
                            le[i][j] = True
        for i in range(self.n):
            for j in range(i + 1, self.n):
                if le[i][j] and le[j][i]:
                    raise ValueError(f"relation is not antisymmetric: {i} <= {j} <= {i}")
        self._le = le
        maximal = [i for i in range(self.n) if not any(le[i][j] and i != j for j in range(self.n))]
        self.elements = [
            Point("generic" if i in maximal else "closed", i, 1) for i in range(self.n)
        ]
        self.dimension = max((len(c) - 1 for c in self._strict_chains()), default=0)
        tops = [i for i in range(self.n) if all(le[j][i] for j in range(self.n))]
        self.eta = self.elements[tops[0]] if tops else None

    @classmethod
    def chain(cls, n: int) -> FinitePoset:
        """The totally ordered poset 0 < 1 < ... < n-1."""
        return cls(n, [(i, i + 1) for i in range(n - 1)])

    def __repr__(self):
        return f"FinitePoset({self.n})"

    def descriptor(self):
        rel = [[i, j] for i in range(self.n) for j in range(self.n) if i != j and self._le[i][j]]
        return {"kind": "FinitePoset", "relation": rel, "size": self.n}

    def point(self, label) -> Point:
        if isinstance(label, Point):
            return label
        return self.elements[int(label)]

    def leq(self, x, y):
        return self._le[x.label][y.label]

    def _strict_chains(self):
        out = []

        def grow(chain):
            out.append(chain)
            for j in range(self.n):
                if self._le[chain[-1]][j] and j != chain[-1]:
                    grow(chain + (j,))

        for i in range(self.n):
            grow((i,))
        return out

    def chain_types(self, n: int) -> list:
        if n < 0:
            raise ValueError("level must be non-negative")
        out = []

        def grow(chain):
            if len(chain) == n + 1:
                out.append(ChainType(tuple(self.elements[i] for i in chain)))
                return
            for j in range(self.n):
                if self._le[chain[-1]][j]:
                    grow(chain + (j,))

        for i in range(self.n):
            grow((i,))
        return out

    def check_order_axioms(self) -> bool:
        r = range(self.n)
        le = self._le
        return (
            all(le[i][i] for i in r)
            and all(not (le[i][j] and le[j][i]) or i == j for i in r for j in r)
            and all(not (le[i][j] and le[j][k]) or le[i][k] for i in r for j in r for k in r)
        )


def model_from_descriptor(desc) -> SchemeModel:
    """Build a model from its JSON descriptor or a short CLI name.

    Short names: ``p1`` (with ``field``), ``z``, ``fp<N>chain`` for the
    totally ordered N-element poset.
    """
    if isinstance(desc, SchemeModel):
        return desc
    if isinstance(desc, str):
        s = desc.lower()
        if s == "p1":
            return P1("f5")
        if s in ("z", "specz"):
            return SpecZ()
        if s.startswith("fp") and s.endswith("chain"):
            return FinitePoset.chain(int(s[2:-5]))
        raise ValueError(f"unknown model {desc!r}")
    kind = desc["kind"]
    if kind == "P1":
        return P1(desc["field"])
    if kind == "SpecDedekind":
        if desc.get("ring", "Z") not in ("Z", "ZZ"):
            raise ValueError("only Spec Z is supported among Dedekind rings")
        return SpecZ()
    if kind == "FinitePoset":
        return FinitePoset(desc.get("size"), desc.get("relation", []))
    raise ValueError(f"unknown model kind {kind!r}")
