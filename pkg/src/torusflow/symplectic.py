"""Finite-dimensional symplectic linear algebra.

A symplectic space here is R^{2n} with an inner product <.,.> and a
compatible complex structure J; the form is omega(x, y) = <x, J y>.
Choosing an orthonormal basis of the shape e_1..e_n, J e_1..J e_n turns the
space into C^n with J acting as multiplication by i.  A Lagrangian L is then
the real span of a unitary matrix U, and W_L = U U^T is a symmetric unitary
matrix that does not depend on the choice of U.  For a pair (L, M),

    W = W_L * conj(W_M)

has eigenvalue 1 with multiplicity dim(L & M), and the Maslov index of a
path of pairs is the net number of eigenvalues of W passing through 1.

Endpoint convention: L_t is replaced by exp(eps J) L_t for a small eps > 0.
That multiplies W by exp(2 i eps), so an eigenvalue sitting at 1 at an
endpoint is treated as lying just counterclockwise of 1.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property
from typing import Callable, Sequence

import numpy as np
import scipy.linalg
import sympy

TOL = 1e-10

# Global orientation of the crossing count.  With +1, eigenvalues of W moving
# counterclockwise through 1 count positively.  -1 is what makes the half-turn
# of K+ around a blow-up circle at theta = +-1 count +2 against the solid-torus
# Lagrangian (tests/test_acceptance.py, criterion 6).
ORIENTATION = -1


class SymplecticError(ValueError):
    pass


def _is_exact(a: np.ndarray) -> bool:
    # object arrays can pick up floats when mixed with float operands
    return a.dtype == object and all(isinstance(x, (int, Fraction)) for x in a.flat)


def as_exact(rows) -> np.ndarray:
    """Object array of Fractions."""
    a = np.array(rows, dtype=object)
    return np.vectorize(lambda x: Fraction(x) if not isinstance(x, Fraction) else x, otypes=[object])(a)


def to_float(a: np.ndarray) -> np.ndarray:
    return np.array(a, dtype=float) if _is_exact(a) else np.asarray(a, dtype=float)


def exact_rank(a: np.ndarray) -> int:
    return sympy.Matrix(a.tolist()).rank()


def rank(a: np.ndarray, tol: float = 1e-9) -> int:
    if a.size == 0:
        return 0
    if _is_exact(a):
        return exact_rank(a)
    s = np.linalg.svd(np.asarray(a, dtype=float), compute_uv=False)
    return int(np.sum(s > tol * max(1.0, s[0])))


@dataclass(frozen=True, eq=False)
class SymplecticSpace:
    J: np.ndarray
    inner: np.ndarray | None = None

    def __post_init__(self):
        J = np.asarray(self.J, dtype=object if _is_exact(np.asarray(self.J)) else float)
        object.__setattr__(self, "J", J)
        n2 = J.shape[0]
        if J.shape != (n2, n2) or n2 == 0 or n2 % 2:
            raise SymplecticError(f"J must be square of even positive size, got {J.shape}")
        G = self.gram
        eye = np.eye(n2)
        JJ = J @ J
        if _is_exact(J) and _is_exact(G):
            if not np.all(JJ == -np.eye(n2, dtype=int)):
                raise SymplecticError("J^2 != -1")
            if not np.all(J.T @ G @ J == G):
                raise SymplecticError("J is not an isometry of the inner product")
        else:
            if not np.allclose(to_float(JJ), -eye, atol=TOL):
                raise SymplecticError("J^2 != -1")
            Gf = to_float(G)
            if not np.allclose(to_float(J).T @ Gf @ to_float(J), Gf, atol=TOL):
                raise SymplecticError("J is not an isometry of the inner product")

    @property
    def dim(self) -> int:
        return self.J.shape[0]

    @property
    def n(self) -> int:
        return self.dim // 2

    @cached_property
    def gram(self) -> np.ndarray:
        if self.inner is None:
            return as_exact(np.eye(self.dim, dtype=int)) if _is_exact(self.J) else np.eye(self.dim)
        return np.asarray(self.inner)

    @classmethod
    def standard(cls, n: int) -> "SymplecticSpace":
        """R^n + R^n with J e_k = e_{n+k}."""
        J = np.zeros((2 * n, 2 * n), dtype=int)
        J[n:, :n] = np.eye(n, dtype=int)
        J[:n, n:] = -np.eye(n, dtype=int)
        return cls(as_exact(J))

    def omega(self, x, y):
        return x @ self.gram @ (self.J @ y)

    def direct_sum(self, other: "SymplecticSpace") -> "SymplecticSpace":
        exact = _is_exact(self.J) and _is_exact(other.J)
        dt = object if exact else float
        J = scipy.linalg.block_diag(to_float(self.J), to_float(other.J)) if not exact else _block_diag_exact(self.J, other.J)
        if self.inner is None and other.inner is None:
            return SymplecticSpace(np.asarray(J, dtype=dt))
        G = _block_diag_exact(self.gram, other.gram) if exact else scipy.linalg.block_diag(to_float(self.gram), to_float(other.gram))
        return SymplecticSpace(np.asarray(J, dtype=dt), G)

    @cached_property
    def complex_coords(self) -> np.ndarray:
        """n x 2n complex matrix C with C (J x) = i C x and C unitary-isometric."""
        Jf, Gf = to_float(self.J), to_float(self.gram)
        R = np.linalg.cholesky(Gf).T  # Gf = R^T R
        Jo = R @ Jf @ np.linalg.inv(R)  # J in orthonormal coordinates
        basis: list[np.ndarray] = []
        for k in range(self.dim):
            v = np.zeros(self.dim)
            v[k] = 1.0
            for e in basis:
                v = v - (e @ v) * e
                Je = Jo @ e
                v = v - (Je @ v) * Je
            nv = np.linalg.norm(v)
            if nv > 1e-8:
                basis.append(v / nv)
            if len(basis) == self.n:
                break
        E = np.array(basis)  # rows e_k
        JE = (Jo @ E.T).T
        return (E + 1j * JE) @ R

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, SymplecticSpace):
            return NotImplemented
        if self is other:
            return True
        return (self.dim == other.dim and np.array_equal(to_float(self.J), to_float(other.J))
                and np.array_equal(to_float(self.gram), to_float(other.gram)))

    __hash__ = object.__hash__


def _block_diag_exact(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    out = as_exact(np.zeros((a.shape[0] + b.shape[0], a.shape[1] + b.shape[1]), dtype=int))
    out[: a.shape[0], : a.shape[1]] = a
    out[a.shape[0]:, a.shape[1]:] = b
    return out


@dataclass(frozen=True, eq=False)
class LagrangianFrame:
    space: SymplecticSpace
    basis: np.ndarray
    check: bool = field(default=True, repr=False)

    def __post_init__(self):
        B = np.asarray(self.basis)
        if B.ndim != 2 or B.shape[0] != self.space.dim:
            raise SymplecticError(f"basis has shape {B.shape}, space has dim {self.space.dim}")
        if B.shape[1] != self.space.n:
            raise SymplecticError(f"need {self.space.n} columns, got {B.shape[1]}")
        object.__setattr__(self, "basis", B)
        if self.check:
            if rank(B) != self.space.n:
                raise SymplecticError("basis columns are linearly dependent")
            if not is_lagrangian(self):
                raise SymplecticError("span is not isotropic for omega")

    def complex_matrix(self) -> np.ndarray:
        return self.space.complex_coords @ to_float(self.basis)

    def J(self) -> "LagrangianFrame":
        J = self.space.J if _is_exact(self.basis) else to_float(self.space.J)
        return LagrangianFrame(self.space, J @ self.basis, check=False)

    def direct_sum(self, other: "LagrangianFrame") -> "LagrangianFrame":
        space = self.space.direct_sum(other.space)
        exact = _is_exact(self.basis) and _is_exact(other.basis)
        if exact:
            B = _block_diag_exact(self.basis, other.basis)
        else:
            B = scipy.linalg.block_diag(to_float(self.basis), to_float(other.basis))
        return LagrangianFrame(space, B, check=False)

    def rotate(self, angle: float) -> "LagrangianFrame":
        """exp(angle * J) applied to the frame."""
        Jf = to_float(self.space.J)
        R = math.cos(angle) * np.eye(self.space.dim) + math.sin(angle) * Jf
        return LagrangianFrame(self.space, R @ to_float(self.basis), check=False)


def frame_from_complex(space: SymplecticSpace, Z: np.ndarray, check: bool = True) -> LagrangianFrame:
    """The real span of the columns of an n x n complex matrix, as a frame.

    A unitary Z always gives a Lagrangian.
    """
    C = space.complex_coords
    R = np.vstack([C.real, C.imag])  # real 2n x 2n, invertible
    rhs = np.vstack([np.asarray(Z).real, np.asarray(Z).imag])
    return LagrangianFrame(space, np.linalg.solve(R, rhs), check=check)


def is_lagrangian(frame: LagrangianFrame, tol: float = TOL) -> bool:
    B = frame.basis
    if B.shape[1] != frame.space.n:
        raise SymplecticError("dimension mismatch with the space")
    form = B.T @ frame.space.gram @ frame.space.J @ B
    if _is_exact(form):
        return bool(np.all(form == 0)) and rank(B) == frame.space.n
    return bool(np.max(np.abs(to_float(form)), initial=0.0) <= tol * max(1.0, np.max(np.abs(to_float(B))) ** 2)) and rank(B) == frame.space.n


def intersection_dim(a: LagrangianFrame, b: LagrangianFrame) -> int:
    _same_space(a, b)
    stacked = np.concatenate([a.basis, b.basis], axis=1)
    return a.space.n + b.space.n - rank(stacked)


def _same_space(*frames: LagrangianFrame) -> None:
    s0 = frames[0].space
    for f in frames[1:]:
        if f.space != s0:
            raise SymplecticError("frames live in different symplectic spaces")


# ---------------------------------------------------------------- paths

ComplexPath = Callable[[float], np.ndarray]


@dataclass(frozen=True, eq=False)
class LagrangianPath:
    """A continuous path of Lagrangians on t in [0, 1].

    Either `func` maps t to a real basis matrix, or `samples` lists
    (t, frame) pairs; between samples the complex basis matrices are
    interpolated linearly and projected back to unitary (polar part).
    """

    space: SymplecticSpace
    func: Callable[[float], np.ndarray] | None = None
    samples: tuple[tuple[Fraction, LagrangianFrame], ...] = ()

    def __post_init__(self):
        if (self.func is None) == (not self.samples):
            if self.func is None:
                raise SymplecticError("path needs a function or samples")
            raise SymplecticError("give either a function or samples, not both")
        if self.samples:
            ts = [Fraction(t) for t, _ in self.samples]
            if ts[0] != 0 or ts[-1] != 1 or any(b <= a for a, b in zip(ts, ts[1:])):
                raise SymplecticError("sample times must increase strictly from 0 to 1")
            for _, f in self.samples:
                if f.space != self.space:
                    raise SymplecticError("sample frame lives in a different space")
                if not is_lagrangian(f):
                    raise SymplecticError("non-Lagrangian sample")

    @classmethod
    def constant(cls, frame: LagrangianFrame) -> "LagrangianPath":
        B = to_float(frame.basis)
        return cls(frame.space, func=lambda t: B)

    @classmethod
    def rotation(cls, frame: LagrangianFrame, angle: Callable[[float], float]) -> "LagrangianPath":
        """t -> exp(angle(t) J) frame."""
        Jf = to_float(frame.space.J)
        B = to_float(frame.basis)
        eye = np.eye(frame.space.dim)
        return cls(frame.space, func=lambda t: (math.cos(angle(t)) * eye + math.sin(angle(t)) * Jf) @ B)

    @classmethod
    def from_function(cls, space: SymplecticSpace, func: Callable[[float], np.ndarray]) -> "LagrangianPath":
        return cls(space, func=func)

    @classmethod
    def from_samples(cls, samples: Sequence[tuple[Fraction, LagrangianFrame]]) -> "LagrangianPath":
        return cls(samples[0][1].space, samples=tuple((Fraction(t), f) for t, f in samples))

    def complex_path(self) -> ComplexPath:
        C = self.space.complex_coords
        if self.func is not None:
            f = self.func
            return lambda t: C @ f(t)
        ts = [float(t) for t, _ in self.samples]
        Zs = [_unitary(C @ to_float(fr.basis)) for _, fr in self.samples]

        def at(t: float) -> np.ndarray:
            k = min(max(np.searchsorted(ts, t, side="right") - 1, 0), len(ts) - 2)
            s = (t - ts[k]) / (ts[k + 1] - ts[k])
            Za, Zb = Zs[k], _align(Zs[k], Zs[k + 1])
            Z = (1 - s) * Za + s * Zb
            if np.linalg.svd(Z, compute_uv=False)[-1] < 1e-8:
                raise SymplecticError("degenerate interpolation (rank drop) between samples")
            return Z

        return at

    def at(self, t: float) -> LagrangianFrame:
        if self.func is not None:
            return LagrangianFrame(self.space, self.func(t), check=False)
        raise SymplecticError("sampled paths are evaluated through complex_path")


def _unitary(Z: np.ndarray) -> np.ndarray:
    """Unitary matrix with the same real column span as Z (Z of a Lagrangian)."""
    H = Z.conj().T @ Z
    H = (H.real + H.real.T) / 2
    w, V = np.linalg.eigh(H)
    if w[0] <= 1e-14 * max(1.0, w[-1]):
        raise SymplecticError("frame is rank deficient")
    return Z @ (V @ np.diag(w ** -0.5) @ V.T)


def _align(Za: np.ndarray, Zb: np.ndarray) -> np.ndarray:
    """Right-multiply Zb by the real orthogonal matrix closest to matching Za."""
    M = (Zb.conj().T @ Za).real
    u, _, vt = np.linalg.svd(M)
    return Zb @ (u @ vt)


def souriau(Za: np.ndarray, Zb: np.ndarray) -> np.ndarray:
    """W_L conj(W_M) for complex basis matrices of L and M."""
    Ua, Ub = _unitary(Za), _unitary(Zb)
    return (Ua @ Ua.T) @ (Ub @ Ub.T).conj()


def _endpoint_angles(W: np.ndarray, tol: float) -> tuple[float, float]:
    """Sum of eigenvalue arguments in [0, 2pi) with eigenvalues at 1 counted as 0.

    Also returns the smallest distance to 1 among eigenvalues not at 1.
    """
    ev = np.linalg.eigvals(W)
    args = np.mod(np.angle(ev), 2 * math.pi)
    total, gap = 0.0, math.inf
    for a in args:
        d = min(a, 2 * math.pi - a)
        if d < tol:
            continue
        total += a
        gap = min(gap, d)
    return total, gap


def _tracked_phase(f: Callable[[float], complex], a: float, b: float, pieces: int, max_step: float) -> float:
    ts = list(np.linspace(a, b, pieces + 1))
    vals = [f(t) for t in ts]
    total = 0.0
    stack = list(zip(zip(ts, vals), zip(ts[1:], vals[1:])))[::-1]
    depth_limit = 1e-12
    while stack:
        (t0, v0), (t1, v1) = stack.pop()
        step = np.angle(v1 / v0)
        if abs(step) > max_step and t1 - t0 > depth_limit:
            tm = (t0 + t1) / 2
            vm = f(tm)
            stack.append(((tm, vm), (t1, v1)))
            stack.append(((t0, v0), (tm, vm)))
            continue
        total += step
    return total


@dataclass(frozen=True)
class MaslovIndexValue:
    value: int
    epsilon: float
    convention: str = "exp(eps J) applied to the first Lagrangian"

    def __int__(self) -> int:
        return self.value


def maslov_complex(ZL: ComplexPath, ZM: ComplexPath, tol: float = 1e-9) -> MaslovIndexValue:
    """Maslov index of t -> (L_t, M_t) given complex basis matrices on [0, 1]."""
    def W(t: float) -> np.ndarray:
        return souriau(ZL(t), ZM(t))

    def det(t: float) -> complex:
        d = np.linalg.det(W(t))
        return d / abs(d)

    s0, g0 = _endpoint_angles(W(0.0), tol)
    s1, g1 = _endpoint_angles(W(1.0), tol)
    counts = []
    for pieces in (16, 64):
        phase = _tracked_phase(det, 0.0, 1.0, pieces, max_step=math.pi / 8)
        raw = (phase - (s1 - s0)) / (2 * math.pi)
        k = round(raw)
        if abs(raw - k) > 1e-6:
            raise SymplecticError(f"non-integer crossing count {raw!r}; path may be degenerate")
        counts.append(k)
    if counts[0] != counts[1]:
        raise SymplecticError(f"crossing count not stable under refinement: {counts}")
    eps = min(g0, g1, math.pi) / 4
    return MaslovIndexValue(ORIENTATION * counts[-1], eps)


def maslov_index(L: LagrangianPath, M: LagrangianPath, tol: float = 1e-9) -> MaslovIndexValue:
    """tol decides which endpoint eigenvalues of W count as sitting at 1."""
    if L.space != M.space:
        raise SymplecticError("paths live in different symplectic spaces")
    return maslov_complex(L.complex_path(), M.complex_path(), tol)


# ---------------------------------------------------------------- triple index

def geodesic(Za: np.ndarray, Zb: np.ndarray) -> ComplexPath:
    """A path of Lagrangians from span_R(Za) to span_R(Zb)."""
    Ua, Ub = _unitary(Za), _unitary(Zb)
    V = Ua.conj().T @ Ub
    T, Q = scipy.linalg.schur(V, output="complex")
    phases = np.angle(np.diag(T))
    Qh = Q.conj().T

    def at(t: float) -> np.ndarray:
        return Ua @ (Q @ np.diag(np.exp(1j * t * phases)) @ Qh)

    return at


def _const(Z: np.ndarray) -> ComplexPath:
    return lambda t: Z


def triple_index(L1: LagrangianFrame, L2: LagrangianFrame, L3: LagrangianFrame) -> int:
    """Twisted triple index, normalized by tau(L, L, L) = 0.

    Paths run from the diagonal triple (L1, L1, L1) to (L1, L2, L3) and the
    index is accumulated from
        Mas(J A_t, B_t) + Mas(J B_t, C_t) - Mas(J A_t, C_t).

    With the endpoint convention and orientation used here this gives
        tau(L1, L1, L2) = tau(L1, L2, L2) = 0,
        tau(L1, L2, L1) = -dim(J L1 & L2),
        tau(L1, L2, L3) + tau(L1, L3, L2) = -dim(J L2 & L3).
    """
    _same_space(L1, L2, L3)
    Z1, Z2, Z3 = (f.complex_matrix() for f in (L1, L2, L3))
    JZ1 = _const(1j * Z1)
    p2, p3 = geodesic(Z1, Z2), geodesic(Z1, Z3)
    m12 = maslov_complex(JZ1, p2).value
    m23 = maslov_complex(lambda t: 1j * p2(t), p3).value
    m13 = maslov_complex(JZ1, p3).value
    return m12 + m23 - m13
