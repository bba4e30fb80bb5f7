"""Exact points and directions in the (alpha, beta) parameter plane."""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Union

RationalLike = Union[int, str, Fraction]


def frac(x: RationalLike) -> Fraction:
    """Parse an exact rational. Floats are rejected on purpose."""
    if isinstance(x, float):
        raise TypeError(f"refusing float {x!r}; pass a 'p/q' string or Fraction")
    if isinstance(x, Fraction):
        return x
    if isinstance(x, int):
        return Fraction(x)
    if isinstance(x, str):
        try:
            return Fraction(x.strip())
        except ValueError as exc:
            raise ValueError(f"not a rational literal: {x!r}") from exc
    raise TypeError(f"cannot read {x!r} as a rational")


def frac_str(x: Fraction) -> str:
    return str(x.numerator) if x.denominator == 1 else f"{x.numerator}/{x.denominator}"


def is_half_integer(x: Fraction) -> bool:
    """True for x in (1/2)Z."""
    return (2 * x).denominator == 1


def is_integer(x: Fraction) -> bool:
    return x.denominator == 1


@dataclass(frozen=True, order=True)
class RationalPoint:
    alpha: Fraction
    beta: Fraction

    def __init__(self, alpha: RationalLike, beta: RationalLike):
        object.__setattr__(self, "alpha", frac(alpha))
        object.__setattr__(self, "beta", frac(beta))

    @classmethod
    def parse(cls, text: str) -> "RationalPoint":
        parts = text.split(",")
        if len(parts) != 2:
            raise ValueError(f"expected 'alpha,beta', got {text!r}")
        return cls(parts[0], parts[1])

    def on_half_lattice(self) -> bool:
        return is_half_integer(self.alpha) and is_half_integer(self.beta)

    def doubled(self) -> tuple[int, int]:
        """(2 alpha, 2 beta) for a half-lattice point."""
        if not self.on_half_lattice():
            raise ValueError(f"{self} is not on the half-integer lattice")
        return int(2 * self.alpha), int(2 * self.beta)

    def __add__(self, other: "RationalPoint") -> "RationalPoint":
        return RationalPoint(self.alpha + other.alpha, self.beta + other.beta)

    def __sub__(self, other: "RationalPoint") -> "RationalPoint":
        return RationalPoint(self.alpha - other.alpha, self.beta - other.beta)

    def __neg__(self) -> "RationalPoint":
        return RationalPoint(-self.alpha, -self.beta)

    def scale(self, c: RationalLike) -> "RationalPoint":
        c = frac(c)
        return RationalPoint(c * self.alpha, c * self.beta)

    def to_json(self) -> list[str]:
        return [frac_str(self.alpha), frac_str(self.beta)]

    def __repr__(self) -> str:
        return f"({frac_str(self.alpha)}, {frac_str(self.beta)})"


def _exact_sqrt(x: Fraction) -> Fraction | None:
    if x < 0:
        return None
    n, d = x.numerator, x.denominator
    rn, rd = math.isqrt(n), math.isqrt(d)
    if rn * rn == n and rd * rd == d:
        return Fraction(rn, rd)
    return None


@dataclass(frozen=True)
class Direction:
    """A point of the unit circle given by a nonzero rational vector (u, v).

    Two vectors name the same direction when they are positive multiples of
    each other.  The four axis directions compare exactly, which matters
    because the cycle and the X-side counts are keyed on them.
    """

    u: Fraction
    v: Fraction

    def __init__(self, u: RationalLike, v: RationalLike):
        u, v = frac(u), frac(v)
        if u == 0 and v == 0:
            raise ValueError("direction vector must be nonzero")
        object.__setattr__(self, "u", u)
        object.__setattr__(self, "v", v)

    @classmethod
    def parse(cls, text: str) -> "Direction":
        t = text.strip().replace(" ", "")
        named = {"1": (1, 0), "+1": (1, 0), "-1": (-1, 0), "i": (0, 1), "+i": (0, 1), "-i": (0, -1)}
        if t in named:
            return cls(*named[t])
        parts = t.split(",")
        if len(parts) != 2:
            raise ValueError(f"expected '1', '-1', 'i', '-i' or 'u,v', got {text!r}")
        return cls(parts[0], parts[1])

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Direction):
            return NotImplemented
        return self.u * other.v == self.v * other.u and self.u * other.u + self.v * other.v > 0

    def __hash__(self) -> int:
        return hash(self.key())

    def __neg__(self) -> "Direction":
        return Direction(-self.u, -self.v)

    def key(self) -> Fraction:
        """Exact monotone stand-in for the angle, with values in [0, 4)."""
        u, v = self.u, self.v
        if u > 0 and v >= 0:
            return v / (u + v)
        if u <= 0 and v > 0:
            return 1 + (-u) / (-u + v)
        if u < 0 and v <= 0:
            return 2 + (-v) / (-u - v)
        return 3 + u / (u - v)

    def is_real(self) -> bool:
        return self.v == 0

    def is_imaginary(self) -> bool:
        return self.u == 0

    def unit(self) -> tuple[Fraction, Fraction] | tuple[float, float]:
        """(Re, Im) of the unit vector; exact when the norm is rational."""
        r = _exact_sqrt(self.u * self.u + self.v * self.v)
        if r is not None:
            return self.u / r, self.v / r
        n = math.hypot(self.u, self.v)
        return float(self.u) / n, float(self.v) / n

    def angle(self) -> float:
        return math.atan2(float(self.v), float(self.u))

    def rotate_quarter(self) -> "Direction":
        """Multiply by i."""
        return Direction(-self.v, self.u)

    def label(self) -> str:
        names = {(1, 0): "1", (-1, 0): "-1", (0, 1): "i", (0, -1): "-i"}
        for vec, name in names.items():
            if self == Direction(*vec):
                return name
        return f"{frac_str(self.u)},{frac_str(self.v)}"

    def __repr__(self) -> str:
        return f"Direction({self.label()})"


ONE = Direction(1, 0)
MINUS_ONE = Direction(-1, 0)
I = Direction(0, 1)
MINUS_I = Direction(0, -1)


def strictly_inside_arc(start: Direction, end: Direction, ccw: bool, x: Direction) -> bool:
    """Is x in the open arc from start to end traversed in the given sense?"""
    if ccw:
        ks, ke, kx = start.key(), end.key(), x.key()
    else:
        ks, ke, kx = end.key(), start.key(), x.key()
    if ks == ke:
        # full turn: everything except the endpoint is inside
        return kx != ks
    span = (ke - ks) % 4
    off = (kx - ks) % 4
    return 0 < off < span
