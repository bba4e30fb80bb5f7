"""Exact spectrum of the twisted de Rham operator on the flat torus.

Forms on T = R^2 / (2 pi Z)^2 with coordinates (m, l) and su(2) coefficients.
The flat connection with parameters (alpha, beta) is -i alpha dm - i beta dl.
Its operator on 0 + 1 + 2 forms,

    S(a, b, c) = (*d b, -*d a - d*c, d*b),

preserves Fourier blocks.  Every block has the same shape: two coefficient
generators g0, g1 with d(g0) = g1 w, d(g1) = -g0 w for a constant 1-form
w = x dm + y dl, tensored with the four forms 1, dm, dl, dm^dl.

* Ri part, mode (r, s) != 0: g0 = sin(rm + sl) i, g1 = cos(rm + sl) i, w = r dm + s dl.
  Modes (r, s) and (-r, -s) give the same block; the representative has r > 0,
  or r = 0 and s > 0.
* Ri part, mode (0, 0): the four constant forms with coefficient i, operator 0.
* Cj part, mode (r, s): g0 = e^{i(rm+sl)} j, g1 = e^{i(rm+sl)} k = i g0,
  w = (r - 2 alpha) dm + (s - 2 beta) dl.  The shift by 2(alpha, beta) comes
  from the bracket [i, q] = 2 i q for q in span{j, k}.

Block basis order is (g0 x 1, g0 x dm, g0 x dl, g0 x dm^dl, g1 x 1, ...).
The inner product makes this basis orthonormal; it is a positive multiple of
-integral tr(a ^ *b) on each block, and integer outputs do not see the scale.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Literal

import numpy as np
import sympy

from .points import Direction, RationalPoint, _exact_sqrt, frac_str
from .symplectic import LagrangianFrame, SymplecticSpace, _is_exact, as_exact, is_lagrangian, to_float

Part = Literal["Ri", "Cj"]
Mode = tuple[int, int]
BlockKey = tuple[str, Mode]

FORMS = ("1", "dm", "dl", "dmdl")
DEFAULT_CUTOFF = 4

# J on the four forms: J(1) = dm^dl, J(dm) = dl, J(dl) = -dm, J(dm^dl) = -1.
_J_FORMS = np.array(
    [[0, 0, 0, -1],
     [0, 0, -1, 0],
     [0, 1, 0, 0],
     [1, 0, 0, 0]],
    dtype=int,
)


def _form_operator(x: Fraction, y: Fraction) -> np.ndarray:
    """4x4 matrix A with S(g0 f) = g1 (A f) and S(g1 f) = -g0 (A f)."""
    A = as_exact(np.zeros((4, 4), dtype=int))
    # S(g 1)     = g'( y dm - x dl)
    A[1, 0], A[2, 0] = y, -x
    # S(g dm)    = g'(-y + x dm^dl)
    A[0, 1], A[3, 1] = -y, x
    # S(g dl)    = g'( x + y dm^dl)
    A[0, 2], A[3, 2] = x, y
    # S(g dm^dl) = g'(-x dm - y dl)
    A[1, 3], A[2, 3] = -x, -y
    return A


@dataclass(frozen=True)
class FourierBlock:
    mode: Mode
    part: str
    labels: tuple[str, ...]
    matrix: np.ndarray  # exact, object dtype
    lambda2: Fraction

    @property
    def dim(self) -> int:
        return len(self.labels)

    @property
    def key(self) -> BlockKey:
        return (self.part, self.mode)

    def split(self) -> tuple[int, int]:
        """(#positive, #negative) eigenvalues, exact."""
        if self.lambda2 == 0:
            return (0, 0)
        # trace of (1 +- M / lambda) / 2 with tr M exact
        tr = sum(self.matrix[k, k] for k in range(self.dim))
        if tr != 0:
            raise ArithmeticError("block operator should be traceless")
        return (self.dim // 2, self.dim // 2)


def _labels(gens: tuple[str, ...]) -> tuple[str, ...]:
    return tuple(f"{g}*{f}" for g in gens for f in FORMS)


def ri_representative(mode: Mode) -> Mode:
    r, s = mode
    if r < 0 or (r == 0 and s < 0):
        return (-r, -s)
    return (r, s)


def shift_vector(point: RationalPoint, mode: Mode, part: str) -> tuple[Fraction, Fraction]:
    r, s = mode
    if part == "Ri":
        return Fraction(r), Fraction(s)
    if part == "Cj":
        return r - 2 * point.alpha, s - 2 * point.beta
    raise ValueError(f"part must be 'Ri' or 'Cj', got {part!r}")


def block_matrix(point: RationalPoint, mode: Mode, part: str) -> FourierBlock:
    mode = (int(mode[0]), int(mode[1]))
    if part == "Ri" and mode == (0, 0):
        return FourierBlock(mode, part, tuple(f"i*{f}" for f in FORMS), as_exact(np.zeros((4, 4), dtype=int)), Fraction(0))
    if part == "Ri":
        mode = ri_representative(mode)
        gens = (f"sin[{mode[0]},{mode[1]}]i", f"cos[{mode[0]},{mode[1]}]i")
    else:
        gens = (f"e[{mode[0]},{mode[1]}]j", f"e[{mode[0]},{mode[1]}]k")
    x, y = shift_vector(point, mode, part)
    A = _form_operator(x, y)
    M = as_exact(np.zeros((8, 8), dtype=int))
    # g0 f -> g1 (A f);  g1 f -> -g0 (A f)
    M[4:, :4] = A
    M[:4, 4:] = -A
    return FourierBlock(mode, part, _labels(gens), M, x * x + y * y)


def retained_keys(cutoff: int) -> list[BlockKey]:
    """Blocks with max(|r|, |s|) <= cutoff in a fixed order: Ri first, then Cj."""
    if cutoff < 0:
        raise ValueError("cutoff must be >= 0")
    modes = [(r, s) for r in range(-cutoff, cutoff + 1) for s in range(-cutoff, cutoff + 1)]
    ri = [("Ri", (0, 0))] + [("Ri", m) for m in modes if m != (0, 0) and ri_representative(m) == m]
    cj = [("Cj", m) for m in modes]
    return ri + cj


def block_J(dim: int) -> np.ndarray:
    J = as_exact(np.kron(np.eye(dim // 4, dtype=int), _J_FORMS))
    return J


def block_space(dim: int) -> SymplecticSpace:
    return SymplecticSpace(block_J(dim))


@dataclass(frozen=True)
class SpectrumEntry:
    mode: Mode
    part: str
    lambda2: Fraction
    split: tuple[int, int]
    dim: int

    def to_json(self) -> dict:
        return {"mode": list(self.mode), "part": self.part, "lambda2": frac_str(self.lambda2), "split": list(self.split)}


@dataclass(frozen=True)
class SpectrumReport:
    point: RationalPoint
    cutoff: int
    kernel_dim: int
    blocks: tuple[SpectrumEntry, ...]

    def smallest_positive(self) -> Fraction | None:
        vals = [b.lambda2 for b in self.blocks if b.lambda2 > 0]
        return min(vals) if vals else None

    def to_json(self) -> dict:
        return {"point": self.point.to_json(), "cutoff": self.cutoff, "kernel_dim": self.kernel_dim,
                "blocks": [b.to_json() for b in self.blocks]}


def spectrum(point: RationalPoint, cutoff: int = DEFAULT_CUTOFF) -> SpectrumReport:
    entries = []
    kernel = 0
    for part, mode in retained_keys(cutoff):
        blk = block_matrix(point, mode, part)
        if blk.lambda2 == 0:
            kernel += blk.dim
        entries.append(SpectrumEntry(blk.mode, part, blk.lambda2, blk.split(), blk.dim))
    return SpectrumReport(point, cutoff, kernel, tuple(entries))


def eigen_lift(block: FourierBlock, phi: np.ndarray, sign: int) -> np.ndarray:
    """phi + sign * M phi / lambda, a (sign * lambda)-eigenvector when M^2 phi = lambda^2 phi."""
    lam = np.sqrt(float(block.lambda2))
    return to_float(phi) + sign * (to_float(block.matrix) @ to_float(phi)) / lam


# ---------------------------------------------------------------- harmonic forms

@dataclass(frozen=True)
class HarmonicBasis:
    point: RationalPoint
    ri: tuple[str, ...]
    cj: tuple[str, ...]
    cj_mode: Mode | None

    @property
    def dim(self) -> int:
        return len(self.ri) + len(self.cj)

    def degrees(self, part: str) -> tuple[int, int, int]:
        labels = self.ri if part == "Ri" else self.cj
        d0 = sum(1 for x in labels if x.endswith("*1"))
        d2 = sum(1 for x in labels if x.endswith("*dmdl"))
        return d0, len(labels) - d0 - d2, d2

    def space(self) -> SymplecticSpace:
        return block_space(self.dim)


def harmonic_basis(point: RationalPoint) -> HarmonicBasis:
    ri = block_matrix(point, (0, 0), "Ri").labels
    if point.on_half_lattice():
        mode = point.doubled()
        return HarmonicBasis(point, ri, block_matrix(point, mode, "Cj").labels, mode)
    return HarmonicBasis(point, ri, (), None)


RI_SPACE = block_space(4)
CJ_SPACE = block_space(8)


def ri_vector(**coeffs) -> np.ndarray:
    """Vector in the Ri harmonic space from keyword coefficients on 1, dm, dl, dmdl."""
    v = as_exact(np.zeros(4, dtype=int))
    for k, c in coeffs.items():
        v[FORMS.index(k)] = Fraction(c)
    return v


def ri_frame(*vectors: np.ndarray) -> LagrangianFrame:
    return LagrangianFrame(RI_SPACE, np.column_stack(vectors))


def cj_vector(g0: dict | None = None, g1: dict | None = None) -> np.ndarray:
    v = as_exact(np.zeros(8, dtype=int))
    for off, coeffs in ((0, g0 or {}), (4, g1 or {})):
        for k, c in coeffs.items():
            v[off + FORMS.index(k)] = Fraction(c) if not isinstance(c, float) else c
    return v


def k_basis(theta: Direction, sign: int) -> np.ndarray:
    """8 x 4 basis of K^sign(theta) inside the Cj kernel block."""
    c, s = theta.unit()
    return k_basis_unit(c, s, sign)


def k_basis_unit(c, s, sign: int) -> np.ndarray:
    """K^sign for the unit direction c + i s.

    psi1 = e(1 -+ (i s dm - i c dl)),  psi2 = e(dm^dl +- (i c dm + i s dl)),
    each multiplied on the right by j and by k.  Exact when c, s are Fractions.
    """
    if sign not in (1, -1):
        raise ValueError("sign must be +1 or -1")
    exact = isinstance(c, Fraction) and isinstance(s, Fraction)
    B = np.zeros((8, 4), dtype=object)
    B[:] = 0
    # right factor j: e j = g0, e i j = g1;  right factor k: e k = g1, e i k = -g0
    for col, (a, b, sb) in enumerate(((0, 1, 1), (1, 0, -1))):
        B[4 * a + 0, 2 * col] = 1
        B[4 * b + 1, 2 * col] = -sign * s * sb
        B[4 * b + 2, 2 * col] = sign * c * sb
        B[4 * a + 3, 2 * col + 1] = 1
        B[4 * b + 1, 2 * col + 1] = sign * c * sb
        B[4 * b + 2, 2 * col + 1] = sign * s * sb
    return as_exact(B) if exact else B.astype(float)


def k_frame(theta: Direction, sign: int) -> LagrangianFrame:
    return LagrangianFrame(CJ_SPACE, k_basis(theta, sign))


# ---------------------------------------------------------------- truncated subspaces

def _projector(B: np.ndarray) -> np.ndarray:
    """Orthogonal projector onto the column span; exact for exact input."""
    if B.shape[1] == 0:
        n = B.shape[0]
        return as_exact(np.zeros((n, n), dtype=int)) if B.dtype == object else np.zeros((n, n))
    if _is_exact(B):
        Bm = sympy.Matrix(B.tolist())
        P = Bm * (Bm.T * Bm).inv() * Bm.T
        return as_exact([[Fraction(int(x.p), int(x.q)) for x in row] for row in P.tolist()])
    Q, _ = np.linalg.qr(B)
    return Q @ Q.T


@dataclass(frozen=True)
class TruncatedSubspace:
    """A subspace of the retained forms that is a direct sum over blocks.

    Stored as one orthogonal projector per block (exact when possible).
    """

    cutoff: int
    projectors: dict = field(hash=False)
    tag: str = ""

    def dim(self) -> int:
        total = 0
        for P in self.projectors.values():
            total += int(round(float(sum(to_float(np.diag(P))))))
        return total

    def frame(self, key: BlockKey) -> np.ndarray:
        P = to_float(self.projectors[key])
        w, V = np.linalg.eigh(P)
        return V[:, w > 0.5]

    def complement(self, tag: str = "") -> "TruncatedSubspace":
        out = {}
        for k, P in self.projectors.items():
            eye = as_exact(np.eye(P.shape[0], dtype=int)) if P.dtype == object else np.eye(P.shape[0])
            out[k] = eye - P
        return TruncatedSubspace(self.cutoff, out, tag or f"complement({self.tag})")


def _sign_projector(block: FourierBlock, sign: int) -> np.ndarray:
    """Projector onto the sign-eigenspace of a block with lambda > 0."""
    lam2 = block.lambda2
    lam = _exact_sqrt(lam2)
    if lam is not None:
        eye = as_exact(np.eye(block.dim, dtype=int))
        return (eye + block.matrix * Fraction(sign) / lam) * Fraction(1, 2)
    M = to_float(block.matrix)
    return (np.eye(block.dim) + sign * M / np.sqrt(float(lam2))) / 2


def spectral_subspace(point: RationalPoint, sign: int, cutoff: int = DEFAULT_CUTOFF,
                      parts: Iterable[str] = ("Ri", "Cj"), below: float | None = None) -> TruncatedSubspace:
    """Span of eigenvectors with eigenvalue of the given sign (kernel excluded).

    With `below`, only eigenvalues of absolute value < below are kept.
    """
    parts = tuple(parts)
    out = {}
    for key in retained_keys(cutoff):
        part, mode = key
        blk = block_matrix(point, mode, part)
        keep = part in parts and blk.lambda2 > 0 and (below is None or float(blk.lambda2) < below ** 2)
        if keep:
            out[key] = _sign_projector(blk, sign)
        else:
            out[key] = as_exact(np.zeros((blk.dim, blk.dim), dtype=int))
    return TruncatedSubspace(cutoff, out, f"P{'+' if sign > 0 else '-'}{point}")


def k_subspace(point: RationalPoint, theta: Direction, sign: int, cutoff: int = DEFAULT_CUTOFF) -> TruncatedSubspace:
    """K^sign at (point, theta), embedded in the Cj kernel block; zero elsewhere."""
    if not point.on_half_lattice():
        raise ValueError(f"{point} is not on the half-integer lattice")
    mode = point.doubled()
    out = {}
    for key in retained_keys(cutoff):
        part, m = key
        dim = 4 if key == ("Ri", (0, 0)) else 8
        if part == "Cj" and m == mode:
            out[key] = _projector(k_basis(theta, sign))
        else:
            out[key] = as_exact(np.zeros((dim, dim), dtype=int))
    if ("Cj", mode) not in out:
        raise ValueError(f"cutoff {cutoff} does not retain the kernel mode {mode}")
    return TruncatedSubspace(cutoff, out, f"K{'+' if sign > 0 else '-'}{point},{theta.label()}")


def boundary_condition(point: RationalPoint, theta: Direction | None, L: LagrangianFrame, sign: int,
                       cutoff: int = DEFAULT_CUTOFF) -> TruncatedSubspace:
    """(P_Ri^sign + L) + (P_Cj^sign + K^sign(theta)), truncated to the cutoff."""
    if L.space.dim != 4:
        raise ValueError("L must live in the 4-dimensional Ri harmonic space")
    if not is_lagrangian(L):
        raise ValueError("L is not Lagrangian")
    base = spectral_subspace(point, sign, cutoff)
    out = dict(base.projectors)
    out[("Ri", (0, 0))] = _projector(L.basis)
    if point.on_half_lattice():
        if theta is None:
            raise ValueError("a lattice point needs a direction theta")
        key = ("Cj", point.doubled())
        if key in out:
            out[key] = _projector(k_basis(theta, sign))
    return TruncatedSubspace(cutoff, out, f"BC{'+' if sign > 0 else '-'}{point}")


def gap_distance(a: TruncatedSubspace, b: TruncatedSubspace) -> float:
    """Operator norm of the difference of orthogonal projectors."""
    if a.cutoff != b.cutoff or set(a.projectors) != set(b.projectors):
        raise ValueError("subspaces have different cutoffs or block structure")
    worst = 0.0
    for k, Pa in a.projectors.items():
        Pb = b.projectors[k]
        D = Pa - Pb
        if D.dtype == object and all(x == 0 for x in D.flat):
            continue
        worst = max(worst, float(np.linalg.norm(to_float(D), 2)))
    return worst


def k_limit_gap(center: RationalPoint, theta: Direction, t: Fraction, sign: int = 1,
                cutoff: int = DEFAULT_CUTOFF) -> float:
    """Gap between K^sign(theta) and the sign-spectral subspace of the kernel block
    at center + (t/2) theta, where theta must have a rational unit vector.
    """
    u, v = theta.unit()
    if not isinstance(u, Fraction):
        raise ValueError("theta needs a rational unit vector for an exact nearby point")
    point = center + RationalPoint(u * t / 2, v * t / 2)
    key = ("Cj", center.doubled())
    near = spectral_subspace(point, sign, cutoff, parts=("Cj",))
    lim = k_subspace(center, theta, sign, cutoff)
    a = TruncatedSubspace(cutoff, {key: near.projectors[key]})
    b = TruncatedSubspace(cutoff, {key: lim.projectors[key]})
    return gap_distance(a, b)
