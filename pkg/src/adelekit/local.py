"""Completed local arithmetic with explicit precision.

A :class:`LocalSeries` at a closed point ``x`` is an element of the
completed local field known modulo ``pi^prec``.  Digits are the pi-adic
expansion with residues represented canonically (polynomials of degree
``< deg x`` in the local coordinate for P^1, integers in ``[0, p)`` for
Spec Z).  Arithmetic is done exactly on the truncated unit part in
``R/(pi^M)`` (``R`` = k[t], k[1/t] at infinity, or Z), never digitwise, so
carries across digits are handled correctly.
"""

from __future__ import annotations

import enum
import os
from dataclasses import dataclass
from fractions import Fraction

from .poly import Poly, Rat, pxgcd
from .scheme import INF_LABEL, P1, CurveLike, Point, SpecZ

DEFAULT_PRECISION = 16


def working_precision() -> int:
    return int(os.environ.get("ADELEKIT_PRECISION", DEFAULT_PRECISION))


class PrecisionError(ArithmeticError):
    """The requested quantity cannot be decided at the available precision."""


class Comparison(enum.Enum):
    EQUAL = "equal"
    NOT_EQUAL = "not-equal"
    # agreement through the declared precision; not decidable beyond it
    INDETERMINATE = "indeterminate"

    @property
    def consistent(self) -> bool:
        return self is not Comparison.NOT_EQUAL

    def __and__(self, other):
        if Comparison.NOT_EQUAL in (self, other):
            return Comparison.NOT_EQUAL
        if Comparison.INDETERMINATE in (self, other):
            return Comparison.INDETERMINATE
        return Comparison.EQUAL


@dataclass(frozen=True)
class AtLeast:
    """Valuation of a series indistinguishable from zero at its precision."""

    bound: int

    def __str__(self):
        return f">={self.bound} (precision-limited)"


INFINITY = float("inf")


# ---------------------------------------------------------------------------
# local coordinates


class _Coord:
    """Arithmetic of the Euclidean ring R around one closed point."""

    def __init__(self, model: CurveLike, x: Point):
        self.model, self.x = model, x
        if isinstance(model, SpecZ):
            self.pi, self.one, self.zero = x.label, 1, 0
            self.poly = False
        else:
            f = model.field
            self.poly = True
            self.one, self.zero = Poly.const(f, 1), Poly(f)
            self.pi = Poly.t(f) if x.label == INF_LABEL else x.label

    def to_local(self, f):
        """Global function -> (a, b) in R with f = a/b in local coordinates."""
        if not self.poly:
            f = Fraction(f)
            return f.numerator, f.denominator
        f = self.model.rat(f)
        if self.x.label != INF_LABEL:
            return f.num, f.den
        da, db = f.num.degree, f.den.degree
        a, b = f.num.reverse(), f.den.reverse()
        if db > da:
            a = a * Poly.monomial(a.field, db - da)
        elif da > db:
            b = b * Poly.monomial(b.field, da - db)
        return a, b

    def pi_global(self):
        """The uniformizer as a global function."""
        return self.model.uniformizer(self.x)

    def local_to_global(self, a):
        """An element of R (local coordinate) as a global function."""
        if not self.poly:
            return Fraction(a)
        if self.x.label != INF_LABEL:
            return Rat(a)
        f = self.model.field
        t = Poly.t(f)
        # substitute s = 1/t
        n = max(a.degree, 0)
        return Rat(a.reverse(n), t**n) if a else Rat(a)

    def val(self, a) -> int:
        v = 0
        while a and not (a % self.pi):
            a = a // self.pi
            v += 1
        return v

    def strip(self, a):
        v = 0
        while a and not (a % self.pi):
            a = a // self.pi
            v += 1
        return v, a

    def pi_pow(self, k: int):
        cache = self.__dict__.setdefault("_pow", {})
        if k not in cache:
            cache[k] = self.pi**k
        return cache[k]

    def inv_mod(self, a, m):
        if not self.poly:
            return pow(a, -1, m)
        cache = self.__dict__.setdefault("_inv", {})
        key = (a, m)
        if key not in cache:
            if len(cache) > 4096:
                cache.clear()
            g, u, _ = pxgcd(a, m)
            if g.degree != 0:
                raise ZeroDivisionError("not a unit modulo pi^M")
            cache[key] = u % m
        return cache[key]

    def digits(self, u, M: int) -> tuple:
        out = []
        for _ in range(M):
            u, r = divmod(u, self.pi)
            out.append(r)
        return tuple(out)

    def undigits(self, ds) -> object:
        acc = self.zero
        for c in reversed(ds):
            acc = acc * self.pi + c
        return acc

    def residue_zero(self, c) -> bool:
        return not c


_COORDS: dict = {}


def coord(model: CurveLike, x: Point) -> _Coord:
    key = (model, x)
    c = _COORDS.get(key)
    if c is None:
        if not x.is_closed:
            raise ValueError(f"{x} is not a closed point")
        c = _COORDS[key] = _Coord(model, x)
    return c


# ---------------------------------------------------------------------------
# series


@dataclass(frozen=True)
class LocalSeries:
    model: CurveLike
    point: Point
    val: int
    coeffs: tuple
    prec: int

    def __post_init__(self):
        if self.coeffs:
            if not self.coeffs[0]:
                raise ValueError("leading stored coefficient must be nonzero")
            if self.prec <= self.val:
                raise ValueError("abs_prec must exceed val_offset")

    # --- construction --------------------------------------------------
    @classmethod
    def zero(cls, model, x, prec: int) -> LocalSeries:
        return cls(model, x, prec, (), prec)

    @classmethod
    def from_residue(cls, model, x, v: int, u, M: int) -> LocalSeries:
        """pi^v * u with u known modulo pi^M."""
        c = coord(model, x)
        if M <= 0:
            return cls.zero(model, x, v + max(M, 0))
        ds = c.digits(u % c.pi_pow(M), M)
        k = 0
        while k < M and not ds[k]:
            k += 1
        if k == M:
            return cls.zero(model, x, v + M)
        return cls(model, x, v + k, ds[k:], v + M)

    @classmethod
    def from_digits(cls, model, x, val: int, digits, prec: int | None = None) -> LocalSeries:
        c = coord(model, x)
        digits = list(digits)
        prec = val + len(digits) if prec is None else prec
        digits = digits[: max(prec - val, 0)]
        digits += [c.zero] * (prec - val - len(digits))
        return cls.from_residue(model, x, val, c.undigits(digits), prec - val)

    # --- inspection ----------------------------------------------------
    def is_zero(self) -> bool:
        return not self.coeffs

    @property
    def rel_prec(self) -> int:
        return self.prec - self.val

    def residue(self):
        """(v, u, M): self = pi^v u + O(pi^(v+M))."""
        c = coord(self.model, self.point)
        return self.val, c.undigits(self.coeffs), len(self.coeffs)

    def digit(self, j: int):
        """Coefficient of pi^j; raises PrecisionError beyond ``prec``."""
        if j >= self.prec:
            raise PrecisionError(f"digit {j} is beyond precision {self.prec}")
        if j < self.val:
            return coord(self.model, self.point).zero
        return self.coeffs[j - self.val]

    def valuation(self):
        return AtLeast(self.prec) if self.is_zero() else self.val

    def to_global(self):
        """Exact global representative of the truncation (a rational adele value)."""
        c = coord(self.model, self.point)
        pi = c.pi_global()
        acc = self.model.rat(0)
        for i, d in enumerate(self.coeffs):
            if d:
                acc = acc + c.local_to_global(d) * pi ** (self.val + i)
        return acc

    def truncate(self, prec: int) -> LocalSeries:
        if prec >= self.prec:
            return self
        if self.is_zero() or prec <= self.val:
            return LocalSeries.zero(self.model, self.point, prec)
        return LocalSeries(self.model, self.point, self.val, self.coeffs[: prec - self.val], prec)

    # --- arithmetic ----------------------------------------------------
    def _check(self, other):
        if not isinstance(other, LocalSeries):
            other = expand(other, self.point, self.prec, self.model)
        if other.point != self.point:
            raise ValueError(f"series at different points {self.point} and {other.point}")
        return other

    def __add__(self, other):
        other = self._check(other)
        prec = min(self.prec, other.prec)
        if self.is_zero():
            return other.truncate(prec)
        if other.is_zero():
            return self.truncate(prec)
        c = coord(self.model, self.point)
        v = min(self.val, other.val)
        _, ua, _ = self.residue()
        _, ub, _ = other.residue()
        u = ua * c.pi_pow(self.val - v) + ub * c.pi_pow(other.val - v)
        return LocalSeries.from_residue(self.model, self.point, v, u, prec - v)

    __radd__ = __add__

    def __neg__(self):
        if self.is_zero():
            return self
        v, u, M = self.residue()
        return LocalSeries.from_residue(self.model, self.point, v, -u, M)

    def __sub__(self, other):
        return self + (-self._check(other))

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        other = self._check(other)
        if self.is_zero() or other.is_zero():
            va = self.prec if self.is_zero() else self.val
            vb = other.prec if other.is_zero() else other.val
            return LocalSeries.zero(self.model, self.point, va + vb)
        va, ua, Ma = self.residue()
        vb, ub, Mb = other.residue()
        M = min(Ma, Mb)
        return LocalSeries.from_residue(self.model, self.point, va + vb, ua * ub, M)

    __rmul__ = __mul__

    def inverse(self) -> LocalSeries:
        if self.is_zero():
            raise PrecisionError(
                f"cannot invert: element is indistinguishable from 0 at precision {self.prec}"
            )
        c = coord(self.model, self.point)
        v, u, M = self.residue()
        m = c.pi_pow(M)
        return LocalSeries.from_residue(self.model, self.point, -v, c.inv_mod(u, m), M)

    def __truediv__(self, other):
        return self * self._check(other).inverse()

    def __pow__(self, k: int):
        if k < 0:
            return self.inverse() ** (-k)
        out = expand(1, self.point, self.prec, self.model) if k == 0 else self
        for _ in range(k - 1):
            out = out * self
        return out

    def compare(self, other) -> Comparison:
        d = self - self._check(other)
        return Comparison.INDETERMINATE if d.is_zero() else Comparison.NOT_EQUAL

    def __str__(self):
        terms = []
        for i, d in enumerate(self.coeffs):
            if d:
                terms.append(f"({d})*pi^{self.val + i}")
        body = " + ".join(terms) if terms else "0"
        return f"{body} + O(pi^{self.prec})"

    # --- serialization -------------------------------------------------
    def to_json(self) -> dict:
        return {
            "point": str(self.point),
            "val": self.val,
            "coeffs": [str(d) for d in self.coeffs],
            "prec": self.prec,
        }

    @classmethod
    def from_json(cls, model, d) -> LocalSeries:
        x = model.point(d["point"])
        c = coord(model, x)
        if c.poly:
            ds = [Poly.parse(model.field, s) for s in d["coeffs"]]
        else:
            ds = [int(s) for s in d["coeffs"]]
        if not ds:
            return cls.zero(model, x, d["prec"])
        return cls.from_digits(model, x, d["val"], ds, d["prec"])


# ---------------------------------------------------------------------------
# operations


def expand(f, x: Point, N: int | None = None, model: CurveLike | None = None) -> LocalSeries:
    """Image of a global function in the completion at ``x``, known mod pi^N."""
    if model is None:
        raise TypeError("expand needs the scheme model")
    N = working_precision() if N is None else N
    c = coord(model, x)
    f = model.rat(f)
    if not f:
        return LocalSeries.zero(model, x, N)
    a, b = c.to_local(f)
    va, a = c.strip(a)
    vb, b = c.strip(b)
    v = va - vb
    if N <= v:
        raise PrecisionError(f"precision {N} leaves no significant digit (valuation {v})")
    M = N - v
    m = c.pi_pow(M)
    u = (a * c.inv_mod(b % m, m)) % m
    return LocalSeries.from_residue(model, x, v, u, M)


def valuation(f, x: Point, model: CurveLike | None = None):
    """Valuation of a global function or series; ``INFINITY`` for exact 0."""
    if isinstance(f, LocalSeries):
        return f.valuation()
    return model.valuation(f, x)


def to_series(value, x: Point, prec: int, model: CurveLike) -> LocalSeries:
    if isinstance(value, LocalSeries):
        return value
    return expand(value, x, prec, model)


def digits_wrt(s: LocalSeries, lo: int, hi: int, uniformizer=None) -> list:
    """Digits of ``s`` for exponents ``lo <= j < hi``.

    With ``uniformizer`` (a global function of valuation 1 at the point) the
    expansion is taken with respect to that uniformizer instead of the
    canonical one.
    """
    if hi > s.prec:
        raise PrecisionError(f"need digits below {hi}, have precision {s.prec}")
    c = coord(s.model, s.point)
    if not s.is_zero() and s.val < lo:
        raise ValueError(f"series has valuation {s.val} below window start {lo}")
    if uniformizer is None:
        return [s.digit(j) for j in range(lo, hi)]
    model = s.model
    x = s.point
    u = model.rat(uniformizer)
    if model.valuation(u, x) != 1:
        raise ValueError("alternative uniformizer must have valuation 1")
    w = s.truncate(hi)
    out = []
    for j in range(lo, hi):
        r = w * expand(u ** (-j), x, hi + abs(j) + 2, model)
        d = r.digit(0)
        out.append(d)
        if d:
            w = w - expand(c.local_to_global(d) * u**j, x, hi, model)
    return out


# ---------------------------------------------------------------------------
# divisors


class Divisor(dict):
    """Finite formal sum of closed points: ``{Point: multiplicity}``."""

    def __init__(self, *args, **kw):
        super().__init__(*args, **kw)
        for k in [k for k, v in self.items() if v == 0]:
            del self[k]

    def degree(self) -> int:
        return sum(m * x.residue_degree for x, m in self.items())

    def support(self) -> list:
        return sorted(self, key=Point.sort_key)

    def __call__(self, x) -> int:
        return self.get(x, 0)

    def __add__(self, other):
        out = dict(self)
        for x, m in other.items():
            out[x] = out.get(x, 0) + m
        return Divisor(out)

    def __neg__(self):
        return Divisor({x: -m for x, m in self.items()})

    def __sub__(self, other):
        return self + (-other)

    def __str__(self):
        if not self:
            return "0"
        return "+".join(f"{m}*[{x}]" for x, m in ((x, self[x]) for x in self.support())).replace("+-", "-")

    @classmethod
    def parse(cls, model, s: str) -> Divisor:
        """``"3"`` means 3*[inf] on P^1; otherwise ``"2*[t]-[t^2+1]+[inf]"``."""
        s = s.replace(" ", "")
        try:
            n = int(s)
        except ValueError:
            pass
        else:
            return cls({model.inf: n}) if isinstance(model, P1) else cls({})
        out = cls()
        import re

        for m in re.finditer(r"([+-]?)(\d*)\*?\[([^\]]+)\]", s):
            sign = -1 if m.group(1) == "-" else 1
            mult = int(m.group(2)) if m.group(2) else 1
            out = out + cls({model.point(m.group(3)): sign * mult})
        return out

    @classmethod
    def of(cls, model, f) -> Divisor:
        """Principal divisor of a nonzero global function."""
        pts = set(model.poles(f)) | set(model.zeros(f))
        return cls({x: model.valuation(f, x) for x in pts})
