"""Unit-circle phases e(x) = exp(2*pi*i*x) with an exact rational carrier.

A :class:`Rational` phase r/q is kept reduced with ``0 <= r < q``.  An
:class:`Irrational` phase is a tagged float carrier; two of them are equal only
when the floats are bit-identical, and an irrational phase never equals a
rational one.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Union

from .errors import SchemaError


@dataclass(frozen=True)
class Rational:
    num: int
    den: int = 1

    def __post_init__(self):
        if self.den <= 0:
            raise ValueError(f"phase denominator must be positive, got {self.den}")
        g = math.gcd(self.num, self.den)
        num, den = (self.num // g) % (self.den // g), self.den // g
        if num == 0:
            den = 1
        object.__setattr__(self, "num", num)
        object.__setattr__(self, "den", den)

    @property
    def turns(self) -> float:
        return self.num / self.den

    @property
    def fraction(self) -> Fraction:
        return Fraction(self.num, self.den)

    def value(self) -> complex:
        return unit(self.num, self.den)

    def is_zero(self) -> bool:
        return self.num == 0

    def __add__(self, other: Phase) -> Phase:
        if isinstance(other, Rational):
            return Rational(self.num * other.den + other.num * self.den, self.den * other.den)
        return other + self

    def __neg__(self) -> Rational:
        return Rational(-self.num, self.den)

    def __sub__(self, other: Phase) -> Phase:
        return self + (-other)

    def __mul__(self, k: int) -> Rational:
        return Rational(self.num * k, self.den)

    __rmul__ = __mul__

    def __repr__(self):
        return f"Rational({self.num}/{self.den})"


@dataclass(frozen=True)
class Irrational:
    alpha: float

    def __post_init__(self):
        a = float(self.alpha)
        if not (0.0 <= a < 1.0) or math.isnan(a):
            raise ValueError(f"irrational carrier must lie in [0, 1), got {a!r}")
        object.__setattr__(self, "alpha", a)

    @property
    def turns(self) -> float:
        return self.alpha

    def value(self) -> complex:
        return cmath.exp(2j * math.pi * self.alpha)

    def is_zero(self) -> bool:
        return False

    def __add__(self, other: Phase) -> Irrational:
        if isinstance(other, Rational):
            return Irrational(_frac(self.alpha + other.num / other.den))
        return Irrational(_frac(self.alpha + other.alpha))

    __radd__ = __add__

    def __neg__(self) -> Irrational:
        return Irrational(_frac(-self.alpha))

    def __sub__(self, other: Phase) -> Irrational:
        return self + (-other)

    def __mul__(self, k: int) -> Phase:
        if k == 0:
            return ZERO
        return Irrational(_frac(k * self.alpha))

    __rmul__ = __mul__


Phase = Union[Rational, Irrational]

ZERO = Rational(0, 1)
HALF = Rational(1, 2)


def _frac(x: float) -> float:
    y = x - math.floor(x)
    return 0.0 if y >= 1.0 else y


def unit(num: int, den: int) -> complex:
    """e(num/den) with the angle reduced exactly before the float step."""
    num %= den
    # fold into the first octant-ish range to keep cos/sin accurate
    if 2 * num > den:
        num -= den
    x = 2.0 * math.pi * num / den
    return complex(math.cos(x), math.sin(x))


def phases_equal(a: Phase, b: Phase) -> bool:
    if type(a) is not type(b):
        return False
    return a == b


def phase_to_json(p: Phase) -> dict:
    if isinstance(p, Rational):
        return {"type": "rational", "num": p.num, "den": p.den}
    return {"type": "irrational", "alpha": p.alpha}


def phase_from_json(doc, path: str = "phase") -> Phase:
    if not isinstance(doc, dict) or "type" not in doc:
        raise SchemaError(f"{path}: expected an object with a 'type' field")
    kind = doc["type"]
    if kind == "rational":
        _check_keys(doc, {"type", "num", "den"}, path)
        num, den = doc["num"], doc["den"]
        if not (_is_int(num) and _is_int(den)) or den <= 0:
            raise SchemaError(f"{path}: rational phase needs integer num and positive den")
        if not 0 <= num < den:
            raise SchemaError(f"{path}: rational phase needs 0 <= num < den")
        if math.gcd(num, den) != 1 and not (num == 0 and den == 1):
            raise SchemaError(f"{path}: rational phase {num}/{den} is not reduced")
        return Rational(num, den)
    if kind == "irrational":
        _check_keys(doc, {"type", "alpha"}, path)
        alpha = doc["alpha"]
        if isinstance(alpha, bool) or not isinstance(alpha, (int, float)) or not 0 < alpha < 1:
            raise SchemaError(f"{path}: irrational alpha must be a real in (0, 1)")
        return Irrational(float(alpha))
    raise SchemaError(f"{path}: unknown phase type {kind!r}")


def _is_int(x) -> bool:
    return isinstance(x, int) and not isinstance(x, bool)


def _check_keys(doc: dict, allowed: set, path: str) -> None:
    required = allowed
    extra = set(doc) - allowed
    if extra:
        raise SchemaError(f"{path}: unknown field(s) {sorted(extra)}")
    missing = required - set(doc)
    if missing:
        raise SchemaError(f"{path}: missing field(s) {sorted(missing)}")
