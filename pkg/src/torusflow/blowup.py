"""The blown-up parameter plane and intersection numbers of paths with 1-chains.

Every point of the half-integer lattice (Z/2)^2 is replaced by its circle of
directions.  A point of the blow-up is a base point plus, on the lattice, a
direction theta.  Paths are concatenations of straight segments between
rational points and arcs along a blow-up circle.  A segment that arrives at a
lattice point c moving in direction d sits on the circle of c at theta = -d,
and a segment leaving c in direction d starts at theta = +d.

The blow-up is a surface whose boundary consists of the circles; the map h
below identifies it with the plane minus open disks of radius 1/8.  Chains
may end on the circles, and a path running along a circle meets such a chain
end transversally.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Iterable, Mapping, Sequence, Union

from .points import (
    I,
    MINUS_I,
    MINUS_ONE,
    ONE,
    Direction,
    RationalPoint,
    _exact_sqrt,
    frac,
    strictly_inside_arc,
)

INNER_RADIUS = Fraction(1, 8)
OUTER_RADIUS = Fraction(1, 4)


class BlowupError(ValueError):
    """Invalid path or chain data."""


class TransversalityError(BlowupError):
    """A path touches a chain non-transversally or at an endpoint."""


# ---------------------------------------------------------------- points

@dataclass(frozen=True)
class BlowupPoint:
    base: RationalPoint
    theta: Direction | None = None

    def __post_init__(self):
        on = self.base.on_half_lattice()
        if on and self.theta is None:
            raise BlowupError(f"lattice point {self.base} needs a direction")
        if not on and self.theta is not None:
            raise BlowupError(f"{self.base} is off the lattice; the direction is collapsed there")

    def to_json(self) -> dict:
        out: dict = {"base": self.base.to_json()}
        if self.theta is not None:
            out["theta"] = self.theta.label()
        return out

    def __repr__(self) -> str:
        return f"{self.base!r}" if self.theta is None else f"{self.base!r}@{self.theta.label()}"


def eta(t: Fraction) -> Fraction:
    """Piecewise linear radial profile: 0 up to 1/8, 1 from 1/4 on."""
    t = frac(t)
    if t <= INNER_RADIUS:
        return Fraction(0)
    if t >= OUTER_RADIUS:
        return Fraction(1)
    return (t - INNER_RADIUS) / (OUTER_RADIUS - INNER_RADIUS)


def nearest_lattice_point(p: RationalPoint) -> RationalPoint:
    def rnd(x: Fraction) -> Fraction:
        return Fraction(math.floor(2 * x + Fraction(1, 2)), 2)
    return RationalPoint(rnd(p.alpha), rnd(p.beta))


def h_map(z: RationalPoint) -> BlowupPoint:
    """From the plane minus the 1/8-disks onto the blow-up.

    Within distance 1/4 of a lattice point c, z = c + v goes to
    c + eta(|v|) v, with direction v/|v| when that lands on c itself.
    The radius must be rational here so that the image stays exact.
    """
    c = nearest_lattice_point(z)
    v = z - c
    r2 = v.alpha ** 2 + v.beta ** 2
    if r2 >= OUTER_RADIUS ** 2:
        return BlowupPoint(z)
    if r2 < INNER_RADIUS ** 2:
        raise BlowupError(f"{z} lies inside the removed disk around {c}")
    r = _exact_sqrt(r2)
    if r is None:
        raise BlowupError(f"|{z} - {c}| is irrational; h_map works in exact arithmetic")
    e = eta(r)
    if e == 0:
        return BlowupPoint(c, Direction(v.alpha, v.beta))
    return BlowupPoint(c + v.scale(e))


def h_inverse(p: BlowupPoint) -> tuple[float, float] | RationalPoint:
    """Inverse of h_map.  Exact when the preimage radius is rational."""
    if p.theta is not None:
        u, w = p.theta.unit()
        if isinstance(u, Fraction):
            return p.base + RationalPoint(u * INNER_RADIUS, w * INNER_RADIUS)
        return (float(p.base.alpha) + u / 8, float(p.base.beta) + w / 8)
    c = nearest_lattice_point(p.base)
    v = p.base - c
    r2 = v.alpha ** 2 + v.beta ** 2
    if r2 >= OUTER_RADIUS ** 2:
        return p.base
    # solve eta(rho) * rho = r, i.e. 8 rho^2 - rho - r = 0 on [1/8, 1/4]
    r = _exact_sqrt(r2)
    if r is not None:
        disc = _exact_sqrt(1 + 32 * r)
        if disc is not None:
            rho = (1 + disc) / 16
            return c + v.scale(rho / r)
    rf = math.sqrt(float(r2))
    rho = (1 + math.sqrt(1 + 32 * rf)) / 16
    k = rho / rf
    return (float(c.alpha) + k * float(v.alpha), float(c.beta) + k * float(v.beta))


# ---------------------------------------------------------------- path pieces

@dataclass(frozen=True)
class Segment:
    start: RationalPoint
    end: RationalPoint

    def __post_init__(self):
        if self.start == self.end:
            raise BlowupError(f"zero-length segment at {self.start}")
        for t in _lattice_parameters(self.start, self.end):
            if 0 < t < 1:
                raise BlowupError(f"segment {self} passes through a lattice point; split it and add an arc")

    @property
    def direction(self) -> Direction:
        d = self.end - self.start
        return Direction(d.alpha, d.beta)

    def start_point(self) -> BlowupPoint:
        th = self.direction if self.start.on_half_lattice() else None
        return BlowupPoint(self.start, th)

    def end_point(self) -> BlowupPoint:
        th = -self.direction if self.end.on_half_lattice() else None
        return BlowupPoint(self.end, th)

    def reversed(self) -> "Segment":
        return Segment(self.end, self.start)

    def to_json(self) -> dict:
        return {"seg": [self.start.to_json(), self.end.to_json()]}

    def __repr__(self) -> str:
        return f"Segment({self.start!r} -> {self.end!r})"


@dataclass(frozen=True)
class Arc:
    """Arc along the circle over `center`, from one direction to another.

    from_theta == to_theta means a full turn.
    """

    center: RationalPoint
    from_theta: Direction
    to_theta: Direction
    ccw: bool

    def __post_init__(self):
        if not self.center.on_half_lattice():
            raise BlowupError(f"arc center {self.center} is not a lattice point")

    def start_point(self) -> BlowupPoint:
        return BlowupPoint(self.center, self.from_theta)

    def end_point(self) -> BlowupPoint:
        return BlowupPoint(self.center, self.to_theta)

    def reversed(self) -> "Arc":
        return Arc(self.center, self.to_theta, self.from_theta, not self.ccw)

    def contains(self, theta: Direction) -> bool:
        """Is theta strictly inside the arc?"""
        return strictly_inside_arc(self.from_theta, self.to_theta, self.ccw, theta)

    def to_json(self) -> dict:
        return {"arc": {"center": self.center.to_json(), "from": self.from_theta.label(),
                        "to": self.to_theta.label(), "orient": "ccw" if self.ccw else "cw"}}

    def __repr__(self) -> str:
        o = "ccw" if self.ccw else "cw"
        return f"Arc({self.center!r}: {self.from_theta.label()} -> {self.to_theta.label()} {o})"


Piece = Union[Segment, Arc]


def _lattice_parameters(a: RationalPoint, b: RationalPoint) -> list[Fraction]:
    """Parameters t in [0, 1] where a + t (b - a) is on the half-integer lattice."""
    d = b - a
    cands: set[Fraction] = set()
    # 2 alpha(t) integer and 2 beta(t) integer
    if d.alpha != 0:
        lo, hi = sorted((2 * a.alpha, 2 * b.alpha))
        for k in range(math.ceil(lo), math.floor(hi) + 1):
            cands.add((Fraction(k, 2) - a.alpha) / d.alpha)
    elif d.beta != 0:
        lo, hi = sorted((2 * a.beta, 2 * b.beta))
        for k in range(math.ceil(lo), math.floor(hi) + 1):
            cands.add((Fraction(k, 2) - a.beta) / d.beta)
    out = []
    for t in sorted(cands):
        p = RationalPoint(a.alpha + t * d.alpha, a.beta + t * d.beta)
        if p.on_half_lattice():
            out.append(t)
    return out


class BlowupPath:
    """A continuous path in the blow-up made of segments and arcs."""

    def __init__(self, pieces: Sequence[Piece] = (), start: BlowupPoint | None = None):
        self.pieces: tuple[Piece, ...] = tuple(pieces)
        if not self.pieces and start is None:
            raise BlowupError("an empty path needs a start point")
        self._start = start
        for a, b in zip(self.pieces, self.pieces[1:]):
            if a.end_point() != b.start_point():
                raise BlowupError(f"pieces do not match: {a} ends at {a.end_point()}, {b} starts at {b.start_point()}")
        if start is not None and self.pieces and self.pieces[0].start_point() != start:
            raise BlowupError("declared start does not match the first piece")

    @classmethod
    def constant(cls, point: BlowupPoint) -> "BlowupPath":
        return cls((), start=point)

    @property
    def start(self) -> BlowupPoint:
        return self.pieces[0].start_point() if self.pieces else self._start

    @property
    def end(self) -> BlowupPoint:
        return self.pieces[-1].end_point() if self.pieces else self._start

    def reversed(self) -> "BlowupPath":
        return BlowupPath([p.reversed() for p in reversed(self.pieces)], start=self.end)

    def __add__(self, other: "BlowupPath") -> "BlowupPath":
        if self.end != other.start:
            raise BlowupError(f"cannot concatenate: {self.end} != {other.start}")
        return BlowupPath(self.pieces + other.pieces, start=self.start)

    def projection(self) -> list[RationalPoint]:
        """Vertices of the projected path, with repeated points merged."""
        pts = [self.start.base]
        for p in self.pieces:
            if isinstance(p, Segment):
                pts.append(p.end)
        return pts

    def segments(self) -> list[Segment]:
        return [p for p in self.pieces if isinstance(p, Segment)]

    def arcs(self) -> list[Arc]:
        return [p for p in self.pieces if isinstance(p, Arc)]

    def to_json(self) -> dict:
        out: dict = {"pieces": [p.to_json() for p in self.pieces]}
        if not self.pieces:
            out["start"] = self.start.to_json()
        return out

    @classmethod
    def from_json(cls, data: dict) -> "BlowupPath":
        pieces: list[Piece] = []
        for item in data.get("pieces", []):
            if "seg" in item:
                a, b = item["seg"]
                pieces.append(Segment(RationalPoint(*a), RationalPoint(*b)))
            elif "arc" in item:
                arc = item["arc"]
                orient = arc.get("orient", "ccw").lower()
                if orient not in ("ccw", "cw"):
                    raise BlowupError(f"arc orientation must be ccw or cw, got {orient!r}")
                pieces.append(Arc(RationalPoint(*arc["center"]), Direction.parse(arc["from"]),
                                  Direction.parse(arc["to"]), orient == "ccw"))
            else:
                raise BlowupError(f"unknown piece {item!r}")
        start = None
        if "start" in data:
            s = data["start"]
            th = Direction.parse(s["theta"]) if "theta" in s else None
            start = BlowupPoint(RationalPoint(*s["base"]), th)
        return cls(pieces, start=start)

    def __repr__(self) -> str:
        return f"BlowupPath({list(self.pieces)!r})"


# ---------------------------------------------------------------- lifting

ArcChooser = Callable[[RationalPoint, Direction, Direction], bool]


def arc_policy(name: str) -> ArcChooser:
    """Arc choice by the side of the circle it sweeps.

    "plus" takes the arc through +1 when one of the two arcs contains +1 in
    its interior, and otherwise the arc avoiding -1; between -1 and +1 it goes
    through +i.  "minus" is the mirror image.
    """
    if name not in ("plus", "minus"):
        raise ValueError(f"arc policy must be 'plus' or 'minus', got {name!r}")
    want, avoid, tie = (ONE, MINUS_ONE, I) if name == "plus" else (MINUS_ONE, ONE, MINUS_I)

    def choose(center: RationalPoint, a: Direction, b: Direction) -> bool:
        if strictly_inside_arc(a, b, True, want) and not strictly_inside_arc(a, b, False, want):
            return True
        if strictly_inside_arc(a, b, False, want) and not strictly_inside_arc(a, b, True, want):
            return False
        if {a, b} == {ONE, MINUS_ONE}:
            return strictly_inside_arc(a, b, True, tie)
        return not strictly_inside_arc(a, b, True, avoid)

    return choose


def _chooser(choices: Mapping[RationalPoint, str] | ArcChooser | str | None) -> ArcChooser:
    if callable(choices):
        return choices
    if isinstance(choices, str):
        return arc_policy(choices)
    table = dict(choices or {})

    def choose(center: RationalPoint, a: Direction, b: Direction) -> bool:
        if center not in table:
            raise BlowupError(f"missing arc choice at lattice point {center}")
        v = table[center].lower()
        if v not in ("ccw", "cw"):
            raise BlowupError(f"arc choice at {center} must be ccw or cw, got {v!r}")
        return v == "ccw"

    return choose


def lift_path(vertices: Sequence[RationalPoint],
              arc_choices: Mapping[RationalPoint, str] | ArcChooser | str | None = None,
              start_theta: Direction | None = None,
              end_theta: Direction | None = None) -> BlowupPath:
    """Lift a polygonal path to the blow-up.

    Each passage through a lattice point (inside a segment or at a vertex)
    becomes an arc from the incoming -d to the outgoing +d.  Lattice
    endpoints need an explicit direction and get an arc to or from it when it
    differs from the segment's direction there.  Consecutive equal vertices
    are merged.
    """
    pts: list[RationalPoint] = []
    for v in vertices:
        if not pts or pts[-1] != v:
            pts.append(v)
    choose = _chooser(arc_choices)

    def bp(p: RationalPoint, th: Direction | None) -> BlowupPoint:
        return BlowupPoint(p, th if p.on_half_lattice() else None)

    if pts[0].on_half_lattice() and start_theta is None:
        raise BlowupError(f"start {pts[0]} is a lattice point; give start_theta")
    if pts[-1].on_half_lattice() and end_theta is None:
        raise BlowupError(f"end {pts[-1]} is a lattice point; give end_theta")
    if len(pts) == 1:
        if pts[0].on_half_lattice() and start_theta != end_theta:
            arc = Arc(pts[0], start_theta, end_theta, choose(pts[0], start_theta, end_theta))
            return BlowupPath([arc])
        return BlowupPath.constant(bp(pts[0], start_theta))

    # split segments at interior lattice points
    segs: list[Segment] = []
    for a, b in zip(pts, pts[1:]):
        d = b - a
        cuts = [t for t in _lattice_parameters(a, b) if 0 < t < 1]
        nodes = [a] + [RationalPoint(a.alpha + t * d.alpha, a.beta + t * d.beta) for t in cuts] + [b]
        segs.extend(Segment(x, y) for x, y in zip(nodes, nodes[1:]))

    pieces: list[Piece] = []

    def add_arc(center: RationalPoint, th_from: Direction, th_to: Direction) -> None:
        if th_from == th_to:
            return
        pieces.append(Arc(center, th_from, th_to, choose(center, th_from, th_to)))

    if pts[0].on_half_lattice():
        add_arc(pts[0], start_theta, segs[0].direction)
    for k, s in enumerate(segs):
        if k > 0 and s.start.on_half_lattice():
            add_arc(s.start, -segs[k - 1].direction, s.direction)
        pieces.append(s)
    if pts[-1].on_half_lattice():
        add_arc(pts[-1], -segs[-1].direction, end_theta)
    return BlowupPath(pieces)


# ---------------------------------------------------------------- chains

@dataclass(frozen=True)
class ChainSegment:
    """Oriented straight chain piece with an integer coefficient.

    Endpoints on the lattice carry the direction at which the piece meets the
    circle: a piece leaving c in direction d meets it at +d, and one arriving
    in direction d meets it at -d.
    """

    start: RationalPoint
    end: RationalPoint
    coefficient: int
    label: str = ""

    def __post_init__(self):
        Segment(self.start, self.end)  # same validity rules as path segments

    @property
    def direction(self) -> Direction:
        d = self.end - self.start
        return Direction(d.alpha, d.beta)

    def circle_ends(self) -> list[tuple[RationalPoint, Direction, Direction]]:
        """(center, theta on the circle, chain direction) for lattice endpoints."""
        out = []
        if self.start.on_half_lattice():
            out.append((self.start, self.direction, self.direction))
        if self.end.on_half_lattice():
            out.append((self.end, -self.direction, self.direction))
        return out


@dataclass(frozen=True)
class ChainArc:
    """Chain piece lying on a blow-up circle.  Paths can only meet it non-transversally."""

    arc: Arc
    coefficient: int
    label: str = ""


ChainPiece = Union[ChainSegment, ChainArc]


class Chain1:
    """Interface: a locally finite 1-chain in the blow-up."""

    def pieces_near(self, lo: RationalPoint, hi: RationalPoint) -> Iterable[ChainPiece]:
        raise NotImplementedError


class FiniteChain(Chain1):
    def __init__(self, pieces: Iterable[ChainPiece]):
        self.pieces = tuple(pieces)

    def pieces_near(self, lo: RationalPoint, hi: RationalPoint) -> Iterable[ChainPiece]:
        return self.pieces


@dataclass(frozen=True)
class Crossing:
    piece_index: int
    chain_label: str
    location: BlowupPoint
    sign: int
    coefficient: int

    @property
    def contribution(self) -> int:
        return self.sign * self.coefficient

    def to_json(self) -> dict:
        return {"path_piece": self.piece_index, "chain_piece": self.chain_label,
                "at": self.location.to_json(), "sign": self.sign,
                "coefficient": self.coefficient}


def _det(u: Direction | RationalPoint, v: Direction | RationalPoint) -> Fraction:
    ua, ub = (u.u, u.v) if isinstance(u, Direction) else (u.alpha, u.beta)
    va, vb = (v.u, v.v) if isinstance(v, Direction) else (v.alpha, v.beta)
    return ua * vb - ub * va


def _sign(x: Fraction) -> int:
    return (x > 0) - (x < 0)


def _segment_crossing(k: int, s: Segment, c: ChainSegment) -> Crossing | None:
    p, r = s.start, s.end - s.start
    q, w = c.start, c.end - c.start
    den = _det(r, w)
    qp = q - p
    if den == 0:
        if _det(qp, r) != 0:
            return None  # parallel, disjoint lines
        # collinear: compare parameter ranges along r
        rr = r.alpha ** 2 + r.beta ** 2
        t0 = (qp.alpha * r.alpha + qp.beta * r.beta) / rr
        t1 = t0 + (w.alpha * r.alpha + w.beta * r.beta) / rr
        lo, hi = max(Fraction(0), min(t0, t1)), min(Fraction(1), max(t0, t1))
        if lo > hi:
            return None
        if lo == hi:
            # a single shared point; it is harmless only on a circle with different directions
            at = RationalPoint(p.alpha + lo * r.alpha, p.beta + lo * r.beta)
            if at.on_half_lattice() and _circle_directions_differ(s, c, at):
                return None
            raise TransversalityError(f"{s} touches chain piece {c.label or c} at {at}")
        raise TransversalityError(f"{s} runs along chain piece {c.label or c}")
    t = _det(qp, w) / den
    u = _det(qp, r) / den
    if t < 0 or t > 1 or u < 0 or u > 1:
        return None
    at = RationalPoint(p.alpha + t * r.alpha, p.beta + t * r.beta)
    if at.on_half_lattice():
        # both touch the same circle; only equal directions would meet
        if _circle_directions_differ(s, c, at):
            return None
        raise TransversalityError(f"{s} meets chain piece {c.label or c} on the circle at {at}")
    if t in (0, 1) or u in (0, 1):
        raise TransversalityError(f"{s} touches chain piece {c.label or c} at an endpoint {at}")
    return Crossing(k, c.label, BlowupPoint(at), _sign(den), c.coefficient)


def _circle_directions_differ(s: Segment, c: ChainSegment, at: RationalPoint) -> bool:
    th_path = s.direction if s.start == at else -s.direction
    for center, th, _ in c.circle_ends():
        if center == at and th == th_path:
            return False
    return True


def _arc_crossings(k: int, a: Arc, c: ChainPiece) -> list[Crossing]:
    if isinstance(c, ChainArc):
        ca = c.arc
        if ca.center != a.center:
            return []
        # two closed arcs meet iff one holds an endpoint of the other
        def holds(arc: Arc, x: Direction) -> bool:
            return arc.contains(x) or x in (arc.from_theta, arc.to_theta)
        if any(holds(a, x) for x in (ca.from_theta, ca.to_theta)) or \
                any(holds(ca, x) for x in (a.from_theta, a.to_theta)):
            raise TransversalityError(f"{a} overlaps chain arc {c.label}")
        return []
    out = []
    for center, th, w in c.circle_ends():
        if center != a.center:
            continue
        if th in (a.from_theta, a.to_theta):
            raise TransversalityError(f"{a} starts or ends on chain piece {c.label} at {th.label()}")
        if a.contains(th):
            v = th.rotate_quarter() if a.ccw else -th.rotate_quarter()
            out.append(Crossing(k, c.label, BlowupPoint(center, th), _sign(_det(v, w)), c.coefficient))
    return out


def _bbox(path: BlowupPath) -> tuple[RationalPoint, RationalPoint]:
    pts = [path.start.base] + [p.end_point().base for p in path.pieces]
    return (RationalPoint(min(p.alpha for p in pts), min(p.beta for p in pts)),
            RationalPoint(max(p.alpha for p in pts), max(p.beta for p in pts)))


def crossings(path: BlowupPath, chain: Chain1) -> list[Crossing]:
    """All transverse crossings, in path order.  Raises on any tangency."""
    lo, hi = _bbox(path)
    near = list(chain.pieces_near(lo, hi))
    for end in (path.start, path.end):
        _check_endpoint(end, near)
    out: list[Crossing] = []
    for k, piece in enumerate(path.pieces):
        found: list[Crossing] = []
        for c in near:
            if isinstance(piece, Segment):
                if isinstance(c, ChainSegment):
                    x = _segment_crossing(k, piece, c)
                    if x is not None:
                        found.append(x)
                elif c.arc.center in (piece.start, piece.end):
                    th = piece.direction if c.arc.center == piece.start else -piece.direction
                    if c.arc.contains(th) or th in (c.arc.from_theta, c.arc.to_theta):
                        raise TransversalityError(f"{piece} meets chain arc {c.label}")
            else:
                found.extend(_arc_crossings(k, piece, c))
        found.sort(key=lambda x: _order_key(piece, x.location))
        out.extend(found)
    return out


def _order_key(piece: Piece, at: BlowupPoint) -> Fraction:
    if isinstance(piece, Segment):
        d = at.base - piece.start
        r = piece.end - piece.start
        return (d.alpha * r.alpha + d.beta * r.beta) / (r.alpha ** 2 + r.beta ** 2)
    k0 = piece.from_theta.key()
    off = (at.theta.key() - k0) % 4
    return off if piece.ccw else (4 - off) % 4


def _check_endpoint(p: BlowupPoint, near: list[ChainPiece]) -> None:
    for c in near:
        if isinstance(c, ChainSegment):
            if p.theta is None:
                if _on_segment(p.base, c.start, c.end):
                    raise TransversalityError(f"path endpoint {p} lies on chain piece {c.label}")
            else:
                for center, th, _ in c.circle_ends():
                    if center == p.base and th == p.theta:
                        raise TransversalityError(f"path endpoint {p} lies on chain piece {c.label}")
        elif p.theta is not None and c.arc.center == p.base:
            if c.arc.contains(p.theta) or p.theta in (c.arc.from_theta, c.arc.to_theta):
                raise TransversalityError(f"path endpoint {p} lies on chain arc {c.label}")


def _on_segment(x: RationalPoint, a: RationalPoint, b: RationalPoint) -> bool:
    if _det(x - a, b - a) != 0:
        return False
    d = b - a
    t = ((x - a).alpha * d.alpha + (x - a).beta * d.beta) / (d.alpha ** 2 + d.beta ** 2)
    return 0 <= t <= 1


def intersection_number(path: BlowupPath, chain: Chain1) -> int:
    """Signed count: det(path velocity, chain direction) > 0 counts +coefficient."""
    return sum(x.contribution for x in crossings(path, chain))


__all__ = [
    "Arc", "BlowupError", "BlowupPath", "BlowupPoint", "Chain1", "ChainArc", "ChainSegment",
    "Crossing", "FiniteChain", "Segment", "TransversalityError", "arc_policy", "crossings",
    "eta", "h_inverse", "h_map", "intersection_number", "lift_path", "nearest_lattice_point",
]
