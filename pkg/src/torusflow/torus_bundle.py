"""Torus bundles over the circle: flat SU(2) classes and the spectral flow mod 4.

For monodromy B in SL(2, Z), abelian representations are labelled by
phi in R^2 with phi (B + I) integral; phi and +-phi + Z^2 are conjugate.  The
straight path phi_t = (1 - t) phi + t psi restricts to the boundary of a
tubular neighbourhood of the curve p x + q y as the path
(alpha_t, beta_t) = (phi_t (B + I) (r, s)^T, phi_t . (p, q)), which is again a
straight segment in the parameter plane.  Along it the spectral flow splits
into the solid-torus part (an intersection number with z), the complement
part (known mod 4) and two triple-index corrections at the ends.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from typing import Iterator

import numpy as np
import sympy
from sympy.matrices.normalforms import smith_normal_decomp

from .blowup import BlowupPath, BlowupPoint, Segment, TransversalityError, arc_policy, lift_path
from .points import I, MINUS_ONE, ONE, RationalPoint, frac, frac_str, is_half_integer, is_integer
from .solid_torus import check_L_S, check_L_X, hat_L, sf_solid_torus
from .symplectic import LagrangianFrame, triple_index
from .torus_spectrum import k_frame, ri_frame, ri_vector


class BundleError(ValueError):
    """Invalid monodromy or representation data."""


class Mod4Violation(ArithmeticError):
    """The assembled spectral flow is not 0 mod 4."""

    def __init__(self, message: str, result: "SFResult"):
        super().__init__(message)
        self.result = result


# ---------------------------------------------------------------- monodromy

@dataclass(frozen=True)
class Monodromy:
    a: int
    b: int
    c: int
    d: int

    def __post_init__(self):
        for x in (self.a, self.b, self.c, self.d):
            if not isinstance(x, int) or isinstance(x, bool):
                raise BundleError(f"monodromy entries must be integers, got {x!r}")
        if self.a * self.d - self.b * self.c != 1:
            raise BundleError(f"det B = {self.a * self.d - self.b * self.c}, need 1")
        if abs(self.trace) == 2:
            raise BundleError("|tr B| = 2 is excluded")

    @classmethod
    def parse(cls, text: str) -> "Monodromy":
        parts = [p.strip() for p in text.split(",")]
        if len(parts) != 4:
            raise BundleError(f"expected 'a,b,c,d', got {text!r}")
        try:
            return cls(*(int(p) for p in parts))
        except ValueError as exc:
            raise BundleError(f"monodromy entries must be integers: {text!r}") from exc

    @property
    def trace(self) -> int:
        return self.a + self.d

    @property
    def rows(self) -> tuple[tuple[int, int], tuple[int, int]]:
        return ((self.a, self.b), (self.c, self.d))

    def plus_identity(self) -> tuple[tuple[int, int], tuple[int, int]]:
        return ((self.a + 1, self.b), (self.c, self.d + 1))

    @property
    def det_plus_identity(self) -> int:
        return self.trace + 2

    def to_json(self) -> list[int]:
        return [self.a, self.b, self.c, self.d]


def _row_times(phi: tuple[Fraction, Fraction], m) -> tuple[Fraction, Fraction]:
    return (phi[0] * m[0][0] + phi[1] * m[1][0], phi[0] * m[0][1] + phi[1] * m[1][1])


# ---------------------------------------------------------------- representations

@dataclass(frozen=True, order=True)
class RepPoint:
    phi1: Fraction
    phi2: Fraction

    def __init__(self, phi1, phi2):
        object.__setattr__(self, "phi1", frac(phi1))
        object.__setattr__(self, "phi2", frac(phi2))

    @classmethod
    def parse(cls, text: str) -> "RepPoint":
        parts = text.split(",")
        if len(parts) != 2:
            raise BundleError(f"expected 'phi1,phi2', got {text!r}")
        return cls(parts[0].strip(), parts[1].strip())

    @property
    def phi(self) -> tuple[Fraction, Fraction]:
        return (self.phi1, self.phi2)

    def is_representation(self, B: Monodromy) -> bool:
        return all(is_integer(x) for x in _row_times(self.phi, B.plus_identity()))

    @property
    def reducible(self) -> bool:
        return is_half_integer(self.phi1) and is_half_integer(self.phi2)

    def reduced(self) -> "RepPoint":
        return RepPoint(self.phi1 % 1, self.phi2 % 1)

    def canonical(self) -> "RepPoint":
        """Representative of phi ~ +-phi + Z^2 in [0,1)^2 with (phi2, phi1) minimal."""
        a, b = self.reduced(), (-self).reduced()
        return min(a, b, key=lambda p: (p.phi2, p.phi1))

    def __neg__(self) -> "RepPoint":
        return RepPoint(-self.phi1, -self.phi2)

    def __add__(self, other: "RepPoint") -> "RepPoint":
        return RepPoint(self.phi1 + other.phi1, self.phi2 + other.phi2)

    def __sub__(self, other: "RepPoint") -> "RepPoint":
        return RepPoint(self.phi1 - other.phi1, self.phi2 - other.phi2)

    def to_json(self) -> list[str]:
        return [frac_str(self.phi1), frac_str(self.phi2)]

    def __repr__(self) -> str:
        return f"phi({frac_str(self.phi1)}, {frac_str(self.phi2)})"


def enumerate_reps(B: Monodromy) -> list[RepPoint]:
    """One representative per conjugacy class of abelian representations.

    The classes form the finite group (B+I)^{-T} Z^2 / Z^2 modulo phi -> -phi.
    The Smith form D = U (B+I)^T V gives phi = V D^{-1} m, m_i mod d_i.
    """
    M = sympy.Matrix(B.plus_identity()).T
    D, U, V = smith_normal_decomp(M, domain=sympy.ZZ)
    d1, d2 = abs(int(D[0, 0])), abs(int(D[1, 1]))
    s1, s2 = (1 if D[0, 0] > 0 else -1), (1 if D[1, 1] > 0 else -1)
    V = [[int(V[i, j]) for j in range(2)] for i in range(2)]
    seen: dict[RepPoint, None] = {}
    for m1 in range(d1):
        for m2 in range(d2):
            x = (Fraction(s1 * m1, d1), Fraction(s2 * m2, d2))
            phi = RepPoint(V[0][0] * x[0] + V[0][1] * x[1], V[1][0] * x[0] + V[1][1] * x[1])
            seen.setdefault(phi.canonical(), None)
    reps = sorted(seen, key=lambda p: (p.phi2, p.phi1))
    for p in reps:
        if not p.is_representation(B):
            raise AssertionError(f"enumeration produced a non-representation {p}")
    return reps


def irreducible_reps(B: Monodromy) -> list[RepPoint]:
    return [p for p in enumerate_reps(B) if not p.reducible]


# ---------------------------------------------------------------- curves and boundary coordinates

def _ext_gcd(a: int, b: int) -> tuple[int, int, int]:
    x, y, g = sympy.ZZ.gcdex(a, b)
    return int(x), int(y), int(g)


@dataclass(frozen=True)
class CurveData:
    p: int
    q: int
    r: int
    s: int
    degenerate: bool = False

    def __post_init__(self):
        if math.gcd(self.p, self.q) != 1:
            raise BundleError(f"(p, q) = ({self.p}, {self.q}) is not coprime")
        if self.p * self.s - self.q * self.r != 1:
            raise BundleError("need p s - q r = 1")

    def shifted(self, k: int) -> "CurveData":
        """(r, s) -> (r, s) + k (p, q); the other valid completions."""
        return CurveData(self.p, self.q, self.r + k * self.p, self.s + k * self.q, self.degenerate)

    def to_json(self) -> dict:
        return {"pq": [self.p, self.q], "rs": [self.r, self.s], "degenerate": self.degenerate}


def pair_vector(B: Monodromy, phi: RepPoint, psi: RepPoint) -> tuple[int, int]:
    """(phi - psi)(B + I), an integer row vector."""
    w = _row_times((phi - psi).phi, B.plus_identity())
    if not all(is_integer(x) for x in w):
        raise BundleError("phi or psi is not a representation of the bundle group")
    return int(w[0]), int(w[1])


def find_curve(B: Monodromy, phi: RepPoint, psi: RepPoint) -> CurveData:
    """Coprime (p, q) with (phi - psi)(B+I)(p, q)^T = 0, plus (r, s) with ps - qr = 1."""
    w1, w2 = pair_vector(B, phi, psi)
    if w1 == 0 and w2 == 0:
        return CurveData(1, 0, 0, 1, degenerate=True)
    g = math.gcd(w1, w2)
    p, q = w2 // g, -w1 // g
    if p < 0 or (p == 0 and q < 0):
        p, q = -p, -q
    x, y, _ = _ext_gcd(p, q)  # x p + y q = 1
    return CurveData(p, q, -y, x)


@dataclass(frozen=True)
class BoundaryCoords:
    alpha: Fraction
    beta: Fraction

    @property
    def point(self) -> RationalPoint:
        return RationalPoint(self.alpha, self.beta)

    @property
    def central(self) -> bool:
        return is_half_integer(self.alpha) and is_half_integer(self.beta)

    def to_json(self) -> dict:
        return {"alpha": frac_str(self.alpha), "beta": frac_str(self.beta), "central": self.central}


def boundary_coords(B: Monodromy, phi: RepPoint, curve: CurveData) -> BoundaryCoords:
    v = _row_times(phi.phi, B.plus_identity())
    return BoundaryCoords(v[0] * curve.r + v[1] * curve.s, phi.phi1 * curve.p + phi.phi2 * curve.q)


# ---------------------------------------------------------------- central obstruction

@dataclass
class CentralReport:
    B: Monodromy
    phi: RepPoint
    psi: RepPoint
    window: int
    choices: int = 0
    central_choices: int = 0
    both_odd_choices: int = 0
    parity_implication_ok: bool = True
    alpha_integral: bool = True
    non_central_examples: list = field(default_factory=list)

    @property
    def all_central(self) -> bool:
        return self.choices > 0 and self.central_choices == self.choices

    @property
    def all_both_odd(self) -> bool:
        return self.choices > 0 and self.both_odd_choices == self.choices

    def to_json(self) -> dict:
        return {"B": self.B.to_json(), "phi": self.phi.to_json(), "psi": self.psi.to_json(),
                "window": self.window, "choices": self.choices, "all_central": self.all_central,
                "central_choices": self.central_choices, "all_both_odd": self.all_both_odd,
                "both_odd_choices": self.both_odd_choices,
                "parity_implication_ok": self.parity_implication_ok,
                "alpha_integral": self.alpha_integral,
                "non_central_examples": self.non_central_examples[:5]}


def conjugates(phi: RepPoint, window: int) -> Iterator[RepPoint]:
    for sign in (1, -1):
        base = phi if sign > 0 else -phi
        for e1 in range(-window, window + 1):
            for e2 in range(-window, window + 1):
                yield base + RepPoint(e1, e2)


def check_central_obstruction(B: Monodromy, phi: RepPoint, psi: RepPoint, window: int) -> CentralReport:
    """Try every conjugate pair in the window and record whether both ends are central."""
    if window < 1:
        raise BundleError("window must be at least 1")
    rep = CentralReport(B, phi, psi, window)
    for ph in conjugates(phi, window):
        for ps in conjugates(psi, window):
            w = pair_vector(B, ph, ps)
            if w == (0, 0):
                continue
            curve = find_curve(B, ph, ps)
            a, b = boundary_coords(B, ph, curve), boundary_coords(B, ps, curve)
            rep.choices += 1
            if a.central and b.central:
                rep.central_choices += 1
            elif len(rep.non_central_examples) < 5:
                rep.non_central_examples.append({"phi": ph.to_json(), "psi": ps.to_json()})
            if not (is_integer(a.alpha) and is_integer(b.alpha)):
                rep.alpha_integral = False
            odd = w[0] % 2 == 1 and w[1] % 2 == 1
            if odd:
                rep.both_odd_choices += 1
                # both entries odd forces p, q odd, hence beta in Z/2 for both ends
                if not (curve.p % 2 and curve.q % 2 and is_half_integer(a.beta) and is_half_integer(b.beta)):
                    rep.parity_implication_ok = False
    return rep


# ---------------------------------------------------------------- complement side

def hat_L_X(B: Monodromy) -> LagrangianFrame:
    """span{i (det(B+I) dm - c dl), i dm^dl}."""
    return ri_frame(ri_vector(dm=B.det_plus_identity, dl=-B.c), ri_vector(dmdl=1))


def scattering_X(point: RationalPoint, B: Monodromy) -> tuple[LagrangianFrame, LagrangianFrame | None]:
    return hat_L_X(B), (check_L_X() if point.on_half_lattice() else None)


@dataclass(frozen=True)
class Event:
    kind: str
    where: dict
    value: int
    note: str = ""

    def to_json(self) -> dict:
        out = {"kind": self.kind, "at": self.where, "value": self.value}
        if self.note:
            out["note"] = self.note
        return out


def x_events(path: BlowupPath) -> list[Event]:
    """Events counted by the complement side, each worth 2 mod 4.

    Arcs passing theta = +-1, and segments crossing a line beta in Z/2 away
    from the lattice.
    """
    out: list[Event] = []
    for piece in path.pieces:
        if isinstance(piece, Segment):
            a, b = piece.start, piece.end
            if a.beta == b.beta and is_half_integer(a.beta):
                raise TransversalityError(f"{piece} runs along the line beta = {a.beta}")
            lo, hi = sorted((a.beta, b.beta))
            for k in range(math.ceil(2 * lo), math.floor(2 * hi) + 1):
                beta = Fraction(k, 2)
                t = (beta - a.beta) / (b.beta - a.beta)
                at = RationalPoint(a.alpha + t * (b.alpha - a.alpha), beta)
                if at.on_half_lattice():
                    continue  # handled on the circle
                if t in (0, 1):
                    raise TransversalityError(f"{piece} ends on the line beta = {beta} at {at}")
                out.append(Event("x_line", {"base": at.to_json()}, 2))
        else:
            for th in (ONE, MINUS_ONE):
                if th in (piece.from_theta, piece.to_theta):
                    raise TransversalityError(f"{piece} starts or ends at theta = {th.label()}")
                if piece.contains(th):
                    out.append(Event("x_arc", {"base": piece.center.to_json(), "theta": th.label()}, 2))
    return out


def sf_x_mod4(path: BlowupPath) -> int:
    return sum(e.value for e in x_events(path)) % 4


# ---------------------------------------------------------------- corrections

@lru_cache(maxsize=None)
def lattice_correction(B: Monodromy) -> tuple[int, int]:
    """tau(J L_S, K+_i + J hat L_S, L_X) at a lattice point, as (Ri part, Cj part).

    Every lattice point gives the same frames in block coordinates, so one
    evaluation serves them all.
    """
    hs = hat_L()
    ri = triple_index(hs.J(), hs.J(), hat_L_X(B))
    cj = triple_index(check_L_S().J(), k_frame(I, 1), check_L_X())
    return ri, cj


def correction_at(B: Monodromy, point: RationalPoint) -> int:
    if not point.on_half_lattice():
        return 0
    return sum(lattice_correction(B))


# ---------------------------------------------------------------- assembly

@dataclass
class SFResult:
    B: Monodromy
    phi: RepPoint
    psi: RepPoint
    curve: CurveData
    start: BoundaryCoords
    end: BoundaryCoords
    path: BlowupPath
    policy: str
    sf_solid: int
    sf_x_mod4: int
    tau_start: int
    tau_end: int
    trace: list[Event]

    @property
    def corrections_mod4(self) -> int:
        return (self.tau_start - self.tau_end) % 4

    @property
    def total_mod4(self) -> int:
        return (self.sf_solid + self.sf_x_mod4 + self.corrections_mod4) % 4

    def to_json(self) -> dict:
        return {
            "B": self.B.to_json(), "phi": self.phi.to_json(), "psi": self.psi.to_json(),
            "curve": self.curve.to_json(), "start": self.start.to_json(), "end": self.end.to_json(),
            "arc_policy": self.policy, "path": self.path.to_json(),
            "sf_solid": self.sf_solid, "sf_x_mod4": self.sf_x_mod4,
            "tau": [self.tau_start, self.tau_end], "corrections_mod4": self.corrections_mod4,
            "total_mod4": self.total_mod4, "trace": [e.to_json() for e in self.trace],
        }


def boundary_path(start: BoundaryCoords, end: BoundaryCoords, policy: str) -> BlowupPath:
    """Straight segment between the boundary points, lifted with theta = +i at lattice ends."""
    return lift_path([start.point, end.point], arc_policy(policy), start_theta=I, end_theta=I)


def sf_mod4(B: Monodromy, phi: RepPoint, psi: RepPoint, policy: str = "plus", rs_shift: int = 0,
            check: bool = True) -> SFResult:
    """Assemble the spectral flow mod 4 along the straight path from phi to psi."""
    for x in (phi, psi):
        if not x.is_representation(B):
            raise BundleError(f"{x} is not a representation for B = {B.to_json()}")
    curve = find_curve(B, phi, psi).shifted(rs_shift)
    c0, c1 = boundary_coords(B, phi, curve), boundary_coords(B, psi, curve)
    for c in (c0, c1):
        if not is_integer(c.alpha):
            raise BundleError(f"alpha = {c.alpha} is not an integer; the solid torus side is not flat")
    if curve.degenerate:
        path = BlowupPath.constant(BlowupPoint(c0.point, I if c0.central else None))
    else:
        path = boundary_path(c0, c1, policy)
    solid = sf_solid_torus(path)
    trace = [Event("solid", x.location.to_json(), x.contribution, x.chain_label) for x in solid.crossings]
    xs = x_events(path)
    trace.extend(xs)
    t0, t1 = correction_at(B, c0.point), correction_at(B, c1.point)
    if c0.central:
        trace.append(Event("tau_start", {"base": c0.point.to_json(), "theta": "i"}, t0))
    if c1.central:
        trace.append(Event("tau_end", {"base": c1.point.to_json(), "theta": "i"}, t1))
    res = SFResult(B, phi, psi, curve, c0, c1, path, policy, solid.sf,
                   sum(e.value for e in xs) % 4, t0, t1, trace)
    if check and res.total_mod4 != 0:
        raise Mod4Violation(f"total spectral flow {res.total_mod4} mod 4, expected 0", res)
    return res


def sf_mod4_for_classes(B: Monodromy, phi: RepPoint, psi: RepPoint, policy: str = "plus",
                        rs_shift: int = 0, window: int = 2, check: bool = True) -> SFResult:
    """sf_mod4 for the conjugacy classes of phi and psi.

    Conjugate representatives are tried in a fixed order until the boundary
    segment is transverse to the counted sets; the chosen pair is reported
    in the result.
    """
    last: Exception | None = None
    for ph in _ordered_conjugates(phi, window):
        for ps in _ordered_conjugates(psi, window):
            if ph == ps:
                continue
            try:
                return sf_mod4(B, ph, ps, policy, rs_shift, check)
            except TransversalityError as exc:
                last = exc
    raise TransversalityError(f"no transverse representatives within window {window}: {last}")


def _ordered_conjugates(phi: RepPoint, window: int) -> list[RepPoint]:
    out = list(conjugates(phi, window))
    out.sort(key=lambda x: (abs(x.phi1 - phi.phi1) + abs(x.phi2 - phi.phi2), x != phi, x.phi1, x.phi2))
    return out


# ---------------------------------------------------------------- batteries

EXAMPLE_MONODROMIES = (Monodromy(5, 2, 2, 1), Monodromy(3, 4, 2, 3), Monodromy(9, 4, 2, 1))


def random_monodromies(count: int, seed: int = 0, bound: int = 12) -> list[Monodromy]:
    """Distinct random B in SL(2, Z) with entries in [-bound, bound] and |tr B| > 2."""
    rng = np.random.default_rng(seed)
    out: list[Monodromy] = []
    seen = set(EXAMPLE_MONODROMIES)
    while len(out) < count:
        a, b, c = (int(x) for x in rng.integers(-bound, bound + 1, size=3))
        if a == 0 or (1 + b * c) % a:
            continue
        d = (1 + b * c) // a
        if abs(d) > bound or abs(a + d) <= 2:
            continue
        B = Monodromy(a, b, c, d)
        if B not in seen:
            seen.add(B)
            out.append(B)
    return out


def ordered_pairs(B: Monodromy) -> list[tuple[RepPoint, RepPoint]]:
    reps = irreducible_reps(B)
    return [(x, y) for x in reps for y in reps if x != y]


__all__ = [
    "BoundaryCoords", "BundleError", "CentralReport", "CurveData", "Event", "Mod4Violation",
    "Monodromy", "EXAMPLE_MONODROMIES", "RepPoint", "SFResult", "boundary_coords", "boundary_path",
    "check_central_obstruction", "conjugates", "correction_at", "enumerate_reps", "find_curve",
    "hat_L_X", "irreducible_reps", "lattice_correction", "ordered_pairs", "pair_vector",
    "random_monodromies", "scattering_X", "sf_mod4", "sf_mod4_for_classes", "sf_x_mod4", "x_events",
]
