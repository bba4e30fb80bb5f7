"""Solid-torus side: scattering Lagrangians, the cycle z and SF by intersection.

Only the boundary trace (alpha, beta) of a connection on the solid torus is
used.  It extends flatly over the solid torus exactly when alpha is an
integer, and every quantity below depends on the trace alone.

The cycle z lives in the blow-up and is described by two families of pieces:

* vertical pieces on the lines alpha = k + 1/2, one per interval
  beta in (l/2, (l+1)/2), oriented upward with coefficient 8 l + 4;
* horizontal pieces on the lines beta = l/2, each joining an integer-alpha
  circle to the neighbouring half-integer-alpha circle, oriented towards the
  latter, with coefficient 2.

Pieces start and end on blow-up circles: horizontal pieces at theta = +-1,
vertical pieces at theta = +-i.  With the crossing sign det(velocity,
piece direction), the straight path from (0, 1/4) to (1, 1/4) meets z with
intersection number 4, a counterclockwise half-turn through theta = +1 or
-1 around an integer-alpha circle picks up -2, and a full counterclockwise
turn around any lattice circle picks up -4.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from typing import Iterable

import numpy as np

from .blowup import (
    Arc,
    BlowupPath,
    BlowupPoint,
    Chain1,
    ChainSegment,
    Crossing,
    crossings,
)
from .points import I, MINUS_I, MINUS_ONE, ONE, Direction, RationalPoint, is_half_integer, is_integer
from .symplectic import LagrangianFrame, LagrangianPath, maslov_index
from .torus_spectrum import CJ_SPACE, cj_vector, k_basis_unit, ri_frame, ri_vector

A_VALUE = 4
ARC_VALUE = 2  # the constants b = c


class SolidTorusError(ValueError):
    pass


# ---------------------------------------------------------------- Lagrangians

def hat_L(point: RationalPoint | None = None) -> LagrangianFrame:
    """span{i, i dl} in the Ri harmonic space; the same at every point."""
    return ri_frame(ri_vector(**{"1": 1}), ri_vector(dl=1))


def check_L_S() -> LagrangianFrame:
    """e (Cj + Cj dl) in the Cj kernel block, written in block coordinates."""
    return LagrangianFrame(CJ_SPACE, np.column_stack([
        cj_vector({"1": 1}), cj_vector(None, {"1": 1}),
        cj_vector({"dl": 1}), cj_vector(None, {"dl": 1})]))


@dataclass(frozen=True)
class ScatteringLagrangianS:
    point: RationalPoint
    hat_part: LagrangianFrame = field(repr=False)
    check_part: LagrangianFrame | None = field(repr=False)

    @property
    def lattice_mode(self) -> tuple[int, int] | None:
        return self.point.doubled() if self.check_part is not None else None


def scattering_lagrangian_S(point: RationalPoint) -> ScatteringLagrangianS:
    if not is_integer(point.alpha):
        raise SolidTorusError(f"alpha = {point.alpha} is not an integer; no flat extension over the solid torus")
    check = check_L_S() if is_half_integer(point.beta) else None
    return ScatteringLagrangianS(point, hat_L(point), check)


# ---------------------------------------------------------------- the cycle

def vertical_coefficient(l: int) -> int:
    """Coefficient of the upward piece over beta in (l/2, (l+1)/2).

    Rows 0 and -1 carry a and -a; two rows up adds 16.
    """
    m, odd = divmod(l, 2)
    return (-A_VALUE + 16 * (m + 1)) if odd else (A_VALUE + 16 * m)


class CycleZ(Chain1):
    """The cycle z, generated on demand inside a box."""

    def pieces_near(self, lo: RationalPoint, hi: RationalPoint) -> Iterable[ChainSegment]:
        k0 = math.floor(lo.alpha) - 1
        k1 = math.ceil(hi.alpha) + 1
        l0 = math.floor(2 * lo.beta) - 1
        l1 = math.ceil(2 * hi.beta) + 1
        for k in range(k0, k1 + 1):
            for l in range(l0, l1 + 1):
                yield from self.cell_pieces(k, l)

    @staticmethod
    @lru_cache(maxsize=4096)
    def cell_pieces(k: int, l: int) -> tuple[ChainSegment, ...]:
        """The three pieces attached to the column alpha in [k, k+1], row l."""
        b = Fraction(l, 2)
        h = Fraction(1, 2)
        mid = k + h
        return (
            ChainSegment(RationalPoint(mid, b), RationalPoint(mid, b + h), vertical_coefficient(l),
                         f"V[{k}+1/2,{l}]"),
            ChainSegment(RationalPoint(k, b), RationalPoint(mid, b), ARC_VALUE, f"H+[{k},{l}]"),
            ChainSegment(RationalPoint(k + 1, b), RationalPoint(mid, b), ARC_VALUE, f"H-[{k},{l}]"),
        )

    def window(self) -> list[ChainSegment]:
        """Pieces in alpha in [0, 1], beta in [-1, 1]."""
        return [p for l in range(-2, 2) for p in self.cell_pieces(0, l)]

    def coefficient_at(self, start: RationalPoint, end: RationalPoint) -> int:
        """Coefficient of the oriented piece start -> end; 0 when absent."""
        lo = RationalPoint(min(start.alpha, end.alpha), min(start.beta, end.beta))
        hi = RationalPoint(max(start.alpha, end.alpha), max(start.beta, end.beta))
        for p in self.pieces_near(lo, hi):
            if (p.start, p.end) == (start, end):
                return p.coefficient
            if (p.start, p.end) == (end, start):
                return -p.coefficient
        return 0


@dataclass
class CycleCheck:
    name: str
    passed: bool
    detail: str

    def to_json(self) -> dict:
        return {"check": self.name, "passed": self.passed, "detail": self.detail}


def _reflect(p: RationalPoint) -> RationalPoint:
    return RationalPoint(1 - p.alpha, -p.beta)


def full_turn(center: RationalPoint, start: Direction = Direction(1, 1)) -> BlowupPath:
    return BlowupPath([Arc(center, start, start, True)])


def validate_cycle(z: CycleZ | None = None, radius: int = 3) -> list[CycleCheck]:
    """Machine checks of the reflection, translation, shift and arc rules."""
    z = z or CycleZ()
    lo, hi = RationalPoint(-radius, -radius), RationalPoint(radius, radius)
    pieces = list(z.pieces_near(lo, hi))
    inner = [p for p in pieces if max(abs(p.start.alpha), abs(p.end.alpha),
                                      abs(p.start.beta), abs(p.end.beta)) <= radius - 1]
    checks: list[CycleCheck] = []

    bad = [p.label for p in inner
           if z.coefficient_at(_reflect(p.start), _reflect(p.end)) != p.coefficient]
    # as upward/rightward coefficients the rule reads c(x) = -c(reflected x)
    checks.append(CycleCheck("R1 reflection", not bad,
                             "invariant under x -> (1,0) - x, so upward coefficients negate" if not bad
                             else f"violations: {bad}"))

    one = RationalPoint(1, 0)
    bad = [p.label for p in inner if z.coefficient_at(p.start + one, p.end + one) != p.coefficient]
    checks.append(CycleCheck("R2 translation", not bad,
                             "invariant under (1,0)" if not bad else f"violations: {bad}"))

    shifts = [(l, vertical_coefficient(l + 2) - vertical_coefficient(l)) for l in range(-2 * radius, 2 * radius)]
    bad = [l for l, d in shifts if d != 16]
    checks.append(CycleCheck("R3 shift", not bad,
                             "vertical coefficients two rows apart differ by 16" if not bad
                             else f"violations at rows {bad}"))

    arcs_ok = True
    for p in inner:
        if p.start.beta == p.end.beta:
            ends = p.circle_ends()
            thetas = {th for _, th, _ in ends}
            arcs_ok &= p.coefficient == ARC_VALUE and thetas <= {ONE, MINUS_ONE} and len(ends) == 2
        else:
            thetas = {th for _, th, _ in p.circle_ends()}
            arcs_ok &= thetas <= {I, MINUS_I}
    checks.append(CycleCheck("R4 arcs", arcs_ok,
                             "horizontal pieces carry 2 and meet circles at theta = +-1" if arcs_ok
                             else "horizontal piece data wrong"))

    window = sorted({p.coefficient for p in z.window()})
    want = sorted({ARC_VALUE, A_VALUE, -A_VALUE, 16 - A_VALUE, A_VALUE - 16})
    checks.append(CycleCheck("window", window == want, f"window coefficients {window}"))

    a, solid, x_side = lens_identity(z)
    checks.append(CycleCheck("a = 4", a == A_VALUE and solid == 4 - 2 * a and solid + x_side == 0,
                             f"full turn at (1/2,0): solid {solid}, X {x_side}, solving gives a = {a}"))
    return checks


def lens_identity(z: CycleZ | None = None) -> tuple[Fraction, int, int]:
    """Solve 0 = (2 - a + 2 - a) + (2 + 2) from a full turn at (1/2, 0).

    The solid side of the full turn splits into the theta = +-1 crossings and
    the two vertical pieces, whose upward coefficients are a and -a.
    Returns (a solved from the arc part, solid total, X total).
    """
    z = z or CycleZ()
    xs = crossings(full_turn(RationalPoint(Fraction(1, 2), 0)), z)
    arc_part = sum(x.contribution for x in xs if x.location.theta.is_real())
    vert_part = sum(x.contribution for x in xs if not x.location.theta.is_real())
    x_side = 2 * sum(1 for x in xs if x.location.theta.is_real())
    # arc_part - 2a = -x_side
    a = Fraction(arc_part + x_side, 2)
    return a, arc_part + vert_part, x_side


# ---------------------------------------------------------------- spectral flow

@dataclass(frozen=True)
class SolidSF:
    sf: int
    crossings: tuple[Crossing, ...]

    def to_json(self) -> dict:
        return {"sf": self.sf, "crossings": [c.to_json() for c in self.crossings]}


def _endpoint_ok(p: BlowupPoint) -> bool:
    if not is_integer(p.base.alpha):
        return False
    return p.theta is None or p.theta in (I, MINUS_I)


def sf_solid_torus(path: BlowupPath, z: CycleZ | None = None) -> SolidSF:
    """Spectral flow on the solid torus as the intersection number with z."""
    for end in (path.start, path.end):
        if not _endpoint_ok(end):
            raise SolidTorusError(f"endpoint {end} is not in Z x R x {{+-i}}")
    xs = tuple(crossings(path, z or CycleZ()))
    return SolidSF(sum(x.contribution for x in xs), xs)


# ---------------------------------------------------------------- Maslov cross-checks

def _k_path(theta: Direction, sign: int, speed: float, eps: float) -> LagrangianPath:
    phi0 = theta.angle()

    def at(t: float) -> np.ndarray:
        ang = phi0 + speed * (2 * t - 1) * eps
        return k_basis_unit(math.cos(ang), math.sin(ang), sign)

    return LagrangianPath.from_function(CJ_SPACE, at)


@lru_cache(maxsize=None)
def flow_flat_solid(theta: Direction, eps: float = 0.1) -> int:
    """Mas(check L_S, K+ at theta e^{pi i t}), t in [-eps, eps]."""
    return maslov_index(LagrangianPath.constant(check_L_S()), _k_path(theta, 1, math.pi, eps)).value


def check_L_X() -> LagrangianFrame:
    return LagrangianFrame(CJ_SPACE, np.column_stack([
        cj_vector({"dm": 1}), cj_vector(None, {"dm": 1}),
        cj_vector({"dmdl": 1}), cj_vector(None, {"dmdl": 1})]))


@lru_cache(maxsize=None)
def circle_mas(theta: Direction, eps: float = 0.1, order: str = "LK") -> int:
    """Maslov index of K- at theta e^{it} against check L_X.

    order "LK" is Mas(check L_X, K-), the form that agrees in sign with
    flow_flat_solid under one orientation; "KL" is Mas(K-, check L_X).
    """
    K = _k_path(theta, -1, 1.0, eps)
    L = LagrangianPath.constant(check_L_X())
    if order == "LK":
        return maslov_index(L, K).value
    if order == "KL":
        return maslov_index(K, L).value
    raise ValueError("order must be 'LK' or 'KL'")


__all__ = [
    "A_VALUE", "ARC_VALUE", "CycleCheck", "CycleZ", "ScatteringLagrangianS", "SolidSF",
    "SolidTorusError", "check_L_S", "check_L_X", "circle_mas", "flow_flat_solid", "full_turn",
    "hat_L", "lens_identity", "scattering_lagrangian_S", "sf_solid_torus", "validate_cycle",
    "vertical_coefficient",
]
