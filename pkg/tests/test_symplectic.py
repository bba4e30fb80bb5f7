import math

import numpy as np
import pytest
import scipy.stats
from hypothesis import given, settings, strategies as st

from torusflow.symplectic import (
    LagrangianFrame,
    LagrangianPath,
    SymplecticError,
    SymplecticSpace,
    frame_from_complex,
    intersection_dim,
    is_lagrangian,
    maslov_index,
    triple_index,
)


def unitary(n, seed):
    return scipy.stats.unitary_group.rvs(n, random_state=seed) if n > 1 else np.exp(2j * np.pi * np.random.default_rng(seed).random((1, 1)))


def frame(space, seed):
    return frame_from_complex(space, unitary(space.n, seed))


def rotated(f, angles):
    """Rotate the k-th complex coordinate of the frame's unitary by angles[k]."""
    Z = f.complex_matrix()
    return frame_from_complex(f.space, Z @ np.diag(np.exp(1j * np.asarray(angles))))


def graph(a):
    sp = SymplecticSpace.standard(1)
    return LagrangianPath.from_function(sp, lambda t: np.array([[1.0], [a(t)]]))


H = LagrangianFrame(SymplecticSpace.standard(1), np.array([[1], [0]]))


def const(f):
    return LagrangianPath.constant(f)


def test_space_validation():
    with pytest.raises(SymplecticError):
        SymplecticSpace(np.eye(2, dtype=int))
    with pytest.raises(SymplecticError):
        LagrangianFrame(SymplecticSpace.standard(2), np.array([[1, 0], [0, 0], [0, 1], [0, 0]]))


def test_lagrangian_checks_exact_and_float():
    sp = SymplecticSpace.standard(2)
    assert is_lagrangian(LagrangianFrame(sp, np.array([[1, 0], [0, 1], [0, 0], [0, 0]])))
    assert is_lagrangian(frame(sp, 3))


def test_constant_pair_is_zero():
    sp = SymplecticSpace.standard(2)
    L = frame(sp, 1)
    assert maslov_index(const(L), const(L)).value == 0


def test_half_turn_has_unit_index():
    L0 = H
    v = maslov_index(LagrangianPath.rotation(L0, lambda t: math.pi * t), const(L0)).value
    assert abs(v) == 1
    assert v == -1


def test_spectral_normalization():
    # the family t - 1/2 has one eigenvalue crossing zero upward
    assert maslov_index(const(H), graph(lambda t: t - 0.5)).value == 1
    assert maslov_index(graph(lambda t: t - 0.5), const(H)).value == -1


def test_endpoint_convention_counts_leaving_intersection():
    assert maslov_index(const(H), graph(lambda t: t)).value == 1
    assert maslov_index(const(H), graph(lambda t: t - 1)).value == 0
    assert maslov_index(graph(lambda t: t), const(H)).value == 0


def test_reparametrization_and_concatenation():
    a = graph(lambda t: 3 * t - 1)
    b = graph(lambda t: 3 * t ** 2 - 1)
    first = graph(lambda t: 1.5 * t - 1)
    second = graph(lambda t: 1.5 * t + 0.5)
    m = lambda p: maslov_index(const(H), p).value
    assert m(a) == m(b) == m(first) + m(second) == 1


@settings(max_examples=30, deadline=None)
@given(st.integers(0, 10 ** 6), st.sampled_from([1, 2, 3]))
def test_j_equivariance(seed, n):
    sp = SymplecticSpace.standard(n)
    L, M = frame(sp, seed), frame(sp, seed + 1)
    ang = np.random.default_rng(seed).normal(size=n) * 3
    p = LagrangianPath.from_function(sp, lambda t: rotated(L, ang * t).basis)
    q = LagrangianPath.from_function(sp, lambda t: rotated(L, ang * t).J().basis)
    assert maslov_index(p, const(M)).value == maslov_index(q, const(M.J())).value


@settings(max_examples=30, deadline=None)
@given(st.integers(0, 10 ** 6))
def test_swap_rule(seed):
    # Mas(L, M) + Mas(M, L) = dim(L0 & M0) - dim(L1 & M1)
    rng = np.random.default_rng(seed)
    a0 = int(rng.integers(-2, 3))
    a1 = int(rng.integers(-2, 3))
    p = graph(lambda t: (1 - t) * a0 + t * a1 + 0.0)
    lhs = maslov_index(const(H), p).value + maslov_index(p, const(H)).value
    assert lhs == int(a0 == 0) - int(a1 == 0)


@settings(max_examples=25, deadline=None)
@given(st.integers(0, 10 ** 6))
def test_homotopy_invariance_rel_endpoints(seed):
    sp = SymplecticSpace.standard(2)
    L, M = frame(sp, seed), frame(sp, seed + 7)
    target = np.array([2.5, -1.3])
    bump = np.random.default_rng(seed).normal(size=2)
    straight = LagrangianPath.from_function(sp, lambda t: rotated(L, target * t).basis)
    wiggly = LagrangianPath.from_function(
        sp, lambda t: rotated(L, target * t + bump * math.sin(math.pi * t)).basis)
    assert maslov_index(straight, const(M)).value == maslov_index(wiggly, const(M)).value


def test_triple_index_normalization():
    sp = SymplecticSpace.standard(2)
    L, M = frame(sp, 11), frame(sp, 12)
    assert triple_index(L, L, L) == 0
    assert triple_index(L, L, M) == 0
    assert triple_index(L, M, M) == 0


@pytest.mark.parametrize("n", [1, 2, 4])
def test_triple_index_twisted_identities(n):
    # designed intersections: M = L rotated by pi/2 in some coordinates meets J L there
    sp = SymplecticSpace.standard(n)
    rng = np.random.default_rng(n)
    for trial in range(10):
        L = frame(sp, 100 * n + trial)
        M = rotated(L, rng.choice([math.pi / 2, 0.0, 0.7, -1.1], size=n))
        N = rotated(M, rng.choice([math.pi / 2, 0.0, 0.4], size=n))
        assert triple_index(L, M, L) == -intersection_dim(L.J(), M)
        assert triple_index(L, M, N) + triple_index(L, N, M) == -intersection_dim(M.J(), N)


@pytest.mark.parametrize("n", [1, 2])
def test_triple_index_direct_sum(n):
    a, b = SymplecticSpace.standard(n), SymplecticSpace.standard(1)
    rng = np.random.default_rng(5)
    for trial in range(5):
        L, M = frame(a, trial), rotated(frame(a, trial), rng.choice([math.pi / 2, 0.3], size=n))
        N = frame(a, trial + 50)
        L2, M2, N2 = frame(b, trial + 1), frame(b, trial + 2), frame(b, trial + 3)
        whole = triple_index(L.direct_sum(L2), M.direct_sum(M2), N.direct_sum(N2))
        assert whole == triple_index(L, M, N) + triple_index(L2, M2, N2)
