"""Exact base fields: prime fields F_p and the rationals.

Elements are stored as plain Python values (``int`` in ``[0, p)`` for F_p,
``fractions.Fraction`` for Q); a :class:`Field` object carries the
arithmetic so polynomial and matrix code stays field-agnostic.
"""

from __future__ import annotations

import functools
import random
from fractions import Fraction


class Field:
    char: int
    zero: object
    one: object

    def add(self, a, b):
        raise NotImplementedError

    def sub(self, a, b):
        raise NotImplementedError

    def mul(self, a, b):
        raise NotImplementedError

    def neg(self, a):
        raise NotImplementedError

    def inv(self, a):
        raise NotImplementedError

    def div(self, a, b):
        return self.mul(a, self.inv(b))

    def coerce(self, a):
        raise NotImplementedError

    def parse(self, s: str):
        raise NotImplementedError

    def format(self, a) -> str:
        return str(a)

    def random_element(self, rng: random.Random, nonzero: bool = False):
        raise NotImplementedError

    @property
    def descriptor(self) -> dict:
        return {"char": self.char, "degree": 1}

    @property
    def name(self) -> str:
        raise NotImplementedError


class PrimeField(Field):
    def __init__(self, p: int):
        if p < 2 or any(p % q == 0 for q in range(2, int(p**0.5) + 1)):
            raise ValueError(f"{p} is not prime")
        self.char = p
        self.zero = 0
        self.one = 1

    def add(self, a, b):
        return (a + b) % self.char

    def sub(self, a, b):
        return (a - b) % self.char

    def mul(self, a, b):
        return (a * b) % self.char

    def neg(self, a):
        return (-a) % self.char

    def inv(self, a):
        if a % self.char == 0:
            raise ZeroDivisionError("inverse of 0 in F_%d" % self.char)
        return pow(a, self.char - 2, self.char)

    def coerce(self, a):
        if isinstance(a, Fraction):
            return self.div(a.numerator % self.char, a.denominator % self.char)
        return int(a) % self.char

    def parse(self, s: str):
        return self.coerce(Fraction(s.strip()))

    def elements(self):
        return range(self.char)

    def random_element(self, rng, nonzero=False):
        return rng.randrange(1 if nonzero else 0, self.char)

    @property
    def name(self):
        return f"f{self.char}"

    def __repr__(self):
        return f"GF({self.char})"


class RationalField(Field):
    char = 0
    zero = Fraction(0)
    one = Fraction(1)

    def add(self, a, b):
        return a + b

    def sub(self, a, b):
        return a - b

    def mul(self, a, b):
        return a * b

    def neg(self, a):
        return -a

    def inv(self, a):
        if a == 0:
            raise ZeroDivisionError("inverse of 0 in Q")
        return 1 / Fraction(a)

    def coerce(self, a):
        return Fraction(a)

    def parse(self, s: str):
        return Fraction(s.strip())

    def random_element(self, rng, nonzero=False):
        while True:
            x = Fraction(rng.randint(-5, 5), rng.randint(1, 3))
            if x or not nonzero:
                return x

    @property
    def name(self):
        return "q"

    def __repr__(self):
        return "QQ"


@functools.lru_cache(maxsize=None)
def GF(p: int) -> PrimeField:
    return PrimeField(p)


QQ = RationalField()


def field_from_descriptor(desc) -> Field:
    """Accept ``{"char": p, "degree": 1}``, ``"f5"``, ``"q"`` or ``"Q"``."""
    if isinstance(desc, Field):
        return desc
    if isinstance(desc, str):
        s = desc.strip().lower()
        if s in ("q", "qq", "rationals"):
            return QQ
        if s.startswith("f") or s.startswith("gf"):
            return GF(int(s.lstrip("gf")))
        raise ValueError(f"unknown field {desc!r}")
    if desc.get("degree", 1) != 1:
        raise ValueError("only prime fields and Q are supported as base fields")
    return QQ if desc["char"] == 0 else GF(int(desc["char"]))
