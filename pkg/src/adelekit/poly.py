"""Univariate polynomials k[t] and rational functions k(t) over an exact field.

Canonical string form (used for point labels and JSON): terms in
descending degree, ``c*t^k`` with the coefficient omitted when it is 1,
``t`` for the linear term, e.g. ``"t^2+4*t+1"`` over F_5 or ``"t^2-1/2*t+3"``
over Q.  F_p coefficients are printed in ``[0, p)``.
"""

from __future__ import annotations

import functools
import re
from fractions import Fraction

from .fields import Field

_TERM = re.compile(r"([+-]?)([^+-]*)")


class Poly:
    __slots__ = ("field", "coeffs", "_hash")

    def __init__(self, field: Field, coeffs=()):
        cs = [field.coerce(c) for c in coeffs]
        while cs and cs[-1] == field.zero:
            cs.pop()
        self.field = field
        self.coeffs = tuple(cs)
        self._hash = None

    @classmethod
    def _make(cls, field, cs):
        """Trusted constructor: coefficients already reduced into ``field``."""
        while cs and cs[-1] == 0:
            cs.pop()
        p = object.__new__(cls)
        p.field = field
        p.coeffs = tuple(cs)
        p._hash = None
        return p

    # construction -----------------------------------------------------
    @classmethod
    def const(cls, field, c):
        return cls(field, (c,))

    @classmethod
    def t(cls, field):
        return cls(field, (0, 1))

    @classmethod
    def monomial(cls, field, k, c=1):
        return cls(field, (0,) * k + (c,))

    @classmethod
    def parse(cls, field, s: str) -> Poly:
        s = s.replace(" ", "").replace("**", "^")
        if not s:
            raise ValueError("empty polynomial string")
        if s[0] not in "+-":
            s = "+" + s
        result = cls(field)
        pos = 0
        for m in re.finditer(r"[+-][^+-]+", s):
            if m.start() != pos:
                raise ValueError(f"cannot parse polynomial {s!r}")
            pos = m.end()
            sign, body = m.group(0)[0], m.group(0)[1:]
            if "t" in body:
                coef, _, powpart = body.partition("t")
                coef = coef.rstrip("*") or "1"
                k = int(powpart[1:]) if powpart.startswith("^") else 1
                if powpart and not powpart.startswith("^"):
                    raise ValueError(f"cannot parse term {body!r}")
            else:
                coef, k = body, 0
            c = field.parse(coef)
            if sign == "-":
                c = field.neg(c)
            result = result + cls.monomial(field, k, c)
        if pos != len(s):
            raise ValueError(f"cannot parse polynomial {s!r}")
        return result

    # basic properties -------------------------------------------------
    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1

    def is_zero(self) -> bool:
        return not self.coeffs

    @property
    def lc(self):
        return self.coeffs[-1] if self.coeffs else self.field.zero

    def __bool__(self):
        return bool(self.coeffs)

    def __eq__(self, other):
        if isinstance(other, Poly):
            return self.coeffs == other.coeffs and self.field is other.field
        if isinstance(other, (int, Fraction)):
            return self == Poly.const(self.field, other)
        return NotImplemented

    def __hash__(self):
        if self._hash is None:
            self._hash = hash((self.field.char, self.coeffs))
        return self._hash

    def __lt__(self, other):
        # canonical ordering: by degree, then coefficients high to low
        return (self.degree, self.coeffs[::-1]) < (other.degree, other.coeffs[::-1])

    # arithmetic -------------------------------------------------------
    def _lift(self, other):
        if isinstance(other, Poly):
            return other
        if isinstance(other, (int, Fraction)):
            return Poly.const(self.field, other)
        return None

    def __add__(self, other):
        other = self._lift(other)
        if other is None:
            return NotImplemented
        f = self.field
        a, b = self.coeffs, other.coeffs
        if len(a) < len(b):
            a, b = b, a
        out = list(a)
        for i, c in enumerate(b):
            out[i] += c
        if f.char:
            out = [c % f.char for c in out]
        return Poly._make(f, out)

    __radd__ = __add__

    def __neg__(self):
        p = self.field.char
        return Poly._make(self.field, [(-c) % p if p else -c for c in self.coeffs])

    def __sub__(self, other):
        other = self._lift(other)
        if other is None:
            return NotImplemented
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        other = self._lift(other)
        if other is None:
            return NotImplemented
        f = self.field
        a, b = self.coeffs, other.coeffs
        if not a or not b:
            return Poly(f)
        out = [f.zero] * (len(a) + len(b) - 1)
        for i, x in enumerate(a):
            if not x:
                continue
            for j, y in enumerate(b):
                out[i + j] += x * y
        if f.char:
            out = [c % f.char for c in out]
        return Poly._make(f, out)

    __rmul__ = __mul__

    def __pow__(self, k: int):
        if k < 0:
            raise ValueError("negative power of a polynomial")
        result = Poly.const(self.field, 1)
        base = self
        while k:
            if k & 1:
                result = result * base
            base = base * base
            k >>= 1
        return result

    def __divmod__(self, other):
        other = self._lift(other)
        if not other:
            raise ZeroDivisionError("polynomial division by zero")
        f = self.field
        rem = list(self.coeffs)
        db = other.degree
        inv_lc = f.inv(other.lc)
        q = [f.zero] * max(len(rem) - db, 0)
        p = f.char
        oc = other.coeffs
        for k in range(len(rem) - 1, db - 1, -1):
            c = rem[k]
            if p:
                c %= p
            if not c:
                continue
            c = c * inv_lc % p if p else c * inv_lc
            q[k - db] = c
            base = k - db
            for j, y in enumerate(oc):
                rem[base + j] -= c * y
        rem = rem[:db] if db > 0 else []
        if p:
            rem = [c % p for c in rem]
        return Poly._make(f, q), Poly._make(f, rem)

    def __floordiv__(self, other):
        return divmod(self, other)[0]

    def __mod__(self, other):
        return divmod(self, other)[1]

    def monic(self) -> Poly:
        if not self:
            return self
        return self * self.field.inv(self.lc)

    def __call__(self, x):
        f = self.field
        acc = f.zero
        for c in reversed(self.coeffs):
            acc = f.add(f.mul(acc, x), c)
        return acc

    def reverse(self, n: int | None = None) -> Poly:
        """Coefficients reversed against degree ``n`` (default: own degree)."""
        n = self.degree if n is None else n
        cs = list(self.coeffs) + [self.field.zero] * (n + 1 - len(self.coeffs))
        return Poly(self.field, cs[::-1])

    def __str__(self):
        f = self.field
        if not self.coeffs:
            return "0"
        parts = []
        for k in range(self.degree, -1, -1):
            c = self.coeffs[k]
            if c == f.zero:
                continue
            neg = f.char == 0 and c < 0
            mag = -c if neg else c
            cstr = f.format(mag)
            if k == 0:
                term = cstr
            else:
                mono = "t" if k == 1 else f"t^{k}"
                term = mono if mag == f.one else f"{cstr}*{mono}"
            parts.append(("-" if neg else "+") + term)
        s = "".join(parts)
        return s[1:] if s.startswith("+") else s

    def __repr__(self):
        return f"Poly({self})"


def pgcd(a: Poly, b: Poly) -> Poly:
    while b:
        a, b = b, a % b
    return a.monic()


def pxgcd(a: Poly, b: Poly):
    """Return (g, u, v) with u*a + v*b = g, g monic."""
    f = a.field
    r0, r1 = a, b
    s0, s1 = Poly.const(f, 1), Poly(f)
    t0, t1 = Poly(f), Poly.const(f, 1)
    while r1:
        q, r = divmod(r0, r1)
        r0, r1 = r1, r
        s0, s1 = s1, s0 - q * s1
        t0, t1 = t1, t0 - q * t1
    if not r0:
        return r0, s0, t0
    inv = f.inv(r0.lc)
    return r0 * inv, s0 * inv, t0 * inv


@functools.lru_cache(maxsize=4096)
def factor(p: Poly) -> tuple:
    """Monic irreducible factorization: tuple of (factor, multiplicity), sorted."""
    import sympy

    if p.degree < 1:
        return ()
    if p.degree == 1:
        return ((p.monic(), 1),)
    x = sympy.Symbol("t")
    f = p.field
    if f.char:
        sp = sympy.Poly(list(reversed([int(c) for c in p.coeffs])), x, modulus=f.char)
    else:
        sp = sympy.Poly(list(reversed(p.coeffs)), x, domain=sympy.QQ)
    _, facs = sp.factor_list()
    out = []
    for g, m in facs:
        cs = [Fraction(int(c.p), int(c.q)) if hasattr(c, "q") else Fraction(int(c)) for c in reversed(g.all_coeffs())]
        out.append((Poly(f, cs).monic(), m))
    return tuple(sorted(out, key=lambda fm: fm[0]))


def is_irreducible(p: Poly) -> bool:
    fs = factor(p)
    return len(fs) == 1 and fs[0][1] == 1


class Rat:
    """Element of k(t): reduced fraction with monic denominator."""

    __slots__ = ("num", "den", "_hash")

    def __init__(self, num, den=None):
        if isinstance(num, Rat) and den is None:
            self.num, self.den, self._hash = num.num, num.den, num._hash
            return
        if den is None:
            den = Poly.const(num.field, 1)
        if not den:
            raise ZeroDivisionError("rational function with zero denominator")
        if den.degree > 0:
            g = pgcd(num, den)
            if g.degree > 0:
                num, den = num // g, den // g
        lc = den.lc
        if lc != den.field.one:
            inv = den.field.inv(lc)
            num, den = num * inv, den * inv
        self.num, self.den = num, den
        self._hash = None

    @property
    def field(self) -> Field:
        return self.num.field

    @property
    def numerator(self):
        return self.num

    @property
    def denominator(self):
        return self.den

    @classmethod
    def const(cls, field, c):
        return cls(Poly.const(field, c))

    @classmethod
    def parse(cls, field, s: str) -> Rat:
        s = s.strip()
        if "/(" in s or s.startswith("("):
            m = re.fullmatch(r"\(?([^()]*)\)?/\(([^()]*)\)", s)
            if not m:
                m2 = re.fullmatch(r"\(([^()]*)\)", s)
                if m2:
                    return cls(Poly.parse(field, m2.group(1)))
                raise ValueError(f"cannot parse rational function {s!r}")
            return cls(Poly.parse(field, m.group(1)), Poly.parse(field, m.group(2)))
        return cls(Poly.parse(field, s))

    def is_zero(self):
        return not self.num

    def __bool__(self):
        return bool(self.num)

    def _lift(self, other):
        if isinstance(other, Rat):
            return other
        if isinstance(other, Poly):
            return Rat(other)
        if isinstance(other, (int, Fraction)):
            return Rat.const(self.field, other)
        return None

    def __eq__(self, other):
        other = self._lift(other) if not isinstance(other, Rat) else other
        if other is None:
            return NotImplemented
        return self.num == other.num and self.den == other.den

    def __hash__(self):
        if self._hash is None:
            self._hash = hash((self.num, self.den))
        return self._hash

    def __add__(self, other):
        o = self._lift(other)
        if o is None:
            return NotImplemented
        if self.den == o.den:
            return Rat(self.num + o.num, self.den)
        return Rat(self.num * o.den + o.num * self.den, self.den * o.den)

    __radd__ = __add__

    def __neg__(self):
        r = object.__new__(Rat)
        r.num, r.den, r._hash = -self.num, self.den, None
        return r

    def __sub__(self, other):
        o = self._lift(other)
        if o is None:
            return NotImplemented
        return self + (-o)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        o = self._lift(other)
        if o is None:
            return NotImplemented
        a, b = (self, o) if o.num.degree <= 0 and o.den.degree == 0 else (o, self)
        if b.num.degree <= 0 and b.den.degree == 0:
            # scalar times a reduced fraction stays reduced
            r = object.__new__(Rat)
            r.num, r.den, r._hash = (a.num * b.num if b.num else b.num), (a.den if b.num else b.den), None
            return r
        return Rat(self.num * o.num, self.den * o.den)

    __rmul__ = __mul__

    def inverse(self) -> Rat:
        if not self.num:
            raise ZeroDivisionError("inverse of the zero rational function")
        return Rat(self.den, self.num)

    def __truediv__(self, other):
        o = self._lift(other)
        if o is None:
            return NotImplemented
        return self * o.inverse()

    def __rtruediv__(self, other):
        return self.inverse() * other

    def __pow__(self, k: int):
        if k < 0:
            return self.inverse() ** (-k)
        return Rat(self.num**k, self.den**k)

    def __str__(self):
        if self.den.degree == 0:
            return str(self.num)
        return f"({self.num})/({self.den})"

    def __repr__(self):
        return f"Rat({self})"

    def to_json(self) -> dict:
        return {"num": str(self.num), "den": str(self.den)}

    @classmethod
    def from_json(cls, field, d) -> Rat:
        return cls(Poly.parse(field, d["num"]), Poly.parse(field, d["den"]))
