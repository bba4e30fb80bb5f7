from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from torusflow.points import Direction, I, MINUS_I, MINUS_ONE, ONE, RationalPoint
from torusflow.symplectic import as_exact, intersection_dim, is_lagrangian, to_float
from torusflow.torus_spectrum import (
    block_matrix,
    eigen_lift,
    gap_distance,
    k_basis,
    k_frame,
    k_limit_gap,
    k_subspace,
    retained_keys,
    spectral_subspace,
    spectrum,
)

rationals = st.fractions(min_value=-2, max_value=2, max_denominator=12)
modes = st.tuples(st.integers(-4, 4), st.integers(-4, 4))


@settings(max_examples=60, deadline=None)
@given(rationals, rationals, modes, st.sampled_from(["Ri", "Cj"]))
def test_block_is_symmetric_and_squares_to_scalar(a, b, mode, part):
    blk = block_matrix(RationalPoint(a, b), mode, part)
    M = blk.matrix
    assert np.all(M == M.T)
    eye = as_exact(np.eye(blk.dim, dtype=int))
    assert np.all(M @ M == eye * blk.lambda2)
    if blk.lambda2 > 0:
        assert blk.split() == (4, 4)


def test_eigenvalue_scalar_is_shift_norm():
    p = RationalPoint("1/3", "-1/4")
    assert block_matrix(p, (1, 2), "Ri").lambda2 == 1 + 4
    assert block_matrix(p, (1, 2), "Cj").lambda2 == Fraction(1, 3) ** 2 + Fraction(5, 2) ** 2


@pytest.mark.parametrize("point,kernel", [
    (RationalPoint("1/3", "1/5"), 4),
    (RationalPoint("1/2", "1/3"), 4),
    (RationalPoint(0, 0), 12),
    (RationalPoint("1/2", "-3/2"), 12),
])
def test_kernel_dimension(point, kernel):
    assert spectrum(point, 3).kernel_dim == kernel


def test_retained_keys_count_each_real_mode_once():
    keys = retained_keys(1)
    assert len([k for k in keys if k[0] == "Ri"]) == 1 + 4
    assert len([k for k in keys if k[0] == "Cj"]) == 9


@settings(max_examples=30, deadline=None)
@given(rationals, rationals, modes, st.sampled_from([1, -1]), st.integers(0, 7))
def test_eigen_lift(a, b, mode, sign, k):
    blk = block_matrix(RationalPoint(a, b), mode, "Cj")
    if blk.lambda2 == 0:
        return
    phi = np.zeros(8)
    phi[k] = 1.0
    v = eigen_lift(blk, phi, sign)
    lam = np.sqrt(float(blk.lambda2))
    assert np.allclose(to_float(blk.matrix) @ v, sign * lam * v)


@pytest.mark.parametrize("theta", [ONE, I, MINUS_ONE, MINUS_I, Direction(3, 4), Direction(1, 1)])
def test_k_plus_and_minus(theta):
    kp, km = k_frame(theta, 1), k_frame(theta, -1)
    assert is_lagrangian(kp) and is_lagrangian(km)
    assert np.allclose(to_float(kp.basis).T @ to_float(km.basis), 0)
    # K^+(theta) = K^-(-theta)
    assert intersection_dim(kp, k_frame(-theta, -1)) == 4


def test_k_basis_is_exact_for_rational_directions():
    B = k_basis(Direction(3, 4), 1)
    assert B.dtype == object


def test_spectral_subspaces_are_complementary_off_kernel():
    p = RationalPoint("1/3", "1/7")
    plus, minus = spectral_subspace(p, 1, 2), spectral_subspace(p, -1, 2)
    total = sum(8 if k != ("Ri", (0, 0)) else 4 for k in retained_keys(2))
    assert plus.dim() == minus.dim() == (total - 4) // 2


@pytest.mark.parametrize("theta", [ONE, I, Direction(3, 4)])
@pytest.mark.parametrize("sign", [1, -1])
def test_k_limit_gap_is_small(theta, sign):
    center = RationalPoint("1/2", 0)
    gaps = [k_limit_gap(center, theta, Fraction(1, 2 ** k), sign, cutoff=1) for k in (3, 4, 5, 6)]
    assert all(g1 >= g2 for g1, g2 in zip(gaps, gaps[1:]))
    assert gaps[-1] < 1e-3


def test_approaching_from_the_opposite_side_gives_the_other_limit():
    center = RationalPoint(0, "1/2")
    assert k_limit_gap(center, ONE, Fraction(1, 16), cutoff=1) < 1e-9
    assert k_limit_gap(center, MINUS_ONE, Fraction(1, 16), cutoff=1) < 1e-9
    # K^+ at -theta is the limit from the other side; it differs from K^+(theta)
    a = k_subspace(center, ONE, 1, 1)
    b = k_subspace(center, MINUS_ONE, 1, 1)
    assert gap_distance(a, b) == pytest.approx(1.0)


def test_k_subspace_needs_lattice_point():
    with pytest.raises(ValueError):
        k_subspace(RationalPoint("1/3", 0), ONE, 1, 1)
