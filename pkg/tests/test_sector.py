import cmath
import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from opext import sector
from opext.errors import OpExtError, SingularShift
from opext.extremal import k_theta
from opext.matcore import adj, eye, herm_part, imag_part, n_neg, op_norm
from opext.samplers import gaussian, hermitian_contraction, random_cphi, sample_unit_ball

from .strategies import angles, dims, rng_from, seeds


# membership


def test_hermitian_contraction_in_every_class(rng):
    T = hermitian_contraction(rng, 3, 1.0)
    for phi in np.linspace(0, math.pi / 2, 13):
        rep = sector.in_cphi(T, phi)
        assert rep.in_class and (rep.kappa_plus, rep.kappa_minus) == (0, 0)


def test_i_times_identity_not_in_class():
    rep = sector.in_cphi(1j * eye(2), math.pi / 4)
    # ||T sin + i cos I|| = sin + cos = sqrt(2)
    assert not rep.in_class
    assert rep.margin == pytest.approx(1 - math.sqrt(2))
    assert rep.kappa_plus >= 1


@pytest.mark.parametrize("theta", np.linspace(0, 2 * math.pi, 8, endpoint=False))
def test_k_theta_in_class(theta):
    # K(theta) = e^{i theta} [[0, sin phi], [0, 0]] lies in C(pi/3)
    assert sector.in_cphi(k_theta(theta, math.pi / 3), math.pi / 3).in_class


def test_zero_in_every_class():
    for phi in (0.0, 0.3, math.pi / 2):
        assert sector.in_cphi(np.zeros((2, 2)), phi).in_class
        if phi > 0:
            assert sector.imag_bound_check(np.zeros((2, 2)), phi)


def test_endpoint_classes(rng):
    N = sample_unit_ball(rng, 3, 3, 0.9)
    # C(pi/2) is the unit ball, C(0) the Hermitian contractions
    assert sector.in_cphi(N, math.pi / 2).in_class
    assert not sector.in_cphi(N, 0.0).in_class
    assert not sector.in_cphi(2 * eye(2), math.pi / 2).in_class


def test_angle_validation():
    with pytest.raises(OpExtError):
        sector.in_cphi(eye(1), -0.1)
    with pytest.raises(OpExtError):
        sector.in_cphi(eye(1), 2.0)
    with pytest.raises(OpExtError):
        sector.in_cphi(np.zeros((2, 3)), 0.5)


def test_imag_bound_examples():
    assert not sector.imag_bound_check(1j * eye(2), math.pi / 4)


@given(seeds, st.integers(1, 3), angles)
def test_imag_bound_agrees_with_norm_test(seed, n, phi):
    rng = rng_from(seed)
    T = sample_unit_ball(rng, n, n) if seed % 2 else random_cphi(rng, n, phi * rng.uniform(0.5, 1.5))
    assert sector.imag_bound_check(T, phi) == sector.in_cphi(T, phi).in_class


@given(seeds, dims, angles)
def test_shift_defect_identity(seed, n, phi):
    # I - T_+* T_+ = sin^2 (I - T*T) - 2 sin cos Im T
    T = gaussian(rng_from(seed), n, n)
    s, c = math.sin(phi), math.cos(phi)
    Tp = sector.shifted(T, phi, +1)
    lhs = eye(n) - adj(Tp) @ Tp
    rhs = s**2 * (eye(n) - adj(T) @ T) - 2 * s * c * imag_part(T)
    assert op_norm(lhs - rhs) < 1e-10 * (1 + op_norm(T)) ** 2


@given(seeds, dims, st.floats(0, math.pi / 2), st.floats(0, math.pi / 2))
def test_class_is_monotone(seed, n, a, b):
    a, b = sorted((a, b))
    T = random_cphi(rng_from(seed), n, rng_from(seed + 1).uniform(0.05, 1.5))
    if sector.in_cphi(T, a).in_class:
        assert sector.in_cphi(T, b).in_class


def test_batched_margins_match(rng):
    stack = np.stack([sample_unit_ball(rng, 3, 3, 1.2) for _ in range(10)])
    m = sector.cphi_margins(stack, 0.7)
    assert np.allclose(m, [sector.in_cphi(T, 0.7).margin for T in stack], atol=1e-12)


# sectorial matrices


def test_sectorial_examples():
    assert sector.is_sectorial(np.diag([1.0, 2.0]), 0.01)
    assert sector.is_sectorial(np.diag([1.0, 2.0]), math.pi / 2)
    assert not sector.is_sectorial([[1j]], 1.2)
    z = cmath.exp(1j * math.pi / 6)
    assert sector.is_sectorial([[z]], math.pi / 6)
    assert not sector.is_sectorial([[z]], math.pi / 8)


@given(seeds, dims, angles)
def test_sectorial_sample_is_sectorial(seed, n, phi):
    A = sector.sectorial_sample(rng_from(seed), n, phi)
    assert sector.is_sectorial(A, phi)
    # numerical range spot check
    f = gaussian(rng_from(seed + 7), n, 1).ravel()
    z = np.vdot(f, A @ f)
    assert abs(cmath.phase(z)) <= phi + 1e-9


# Cayley transform


def test_cayley_examples():
    assert np.allclose(sector.cayley(np.zeros((2, 2))), eye(2))
    assert np.allclose(sector.cayley(eye(2)), np.zeros((2, 2)))
    assert np.allclose(sector.cayley([[3.0]]), [[-0.5]])


def test_cayley_singular_shift():
    with pytest.raises(SingularShift):
        sector.cayley(-eye(2))


@given(seeds, dims)
def test_cayley_is_involution(seed, n):
    A = gaussian(rng_from(seed), n, n)
    if np.linalg.svd(eye(n) + A, compute_uv=False)[-1] < 1e-3:
        return
    X = sector.cayley(A)
    assert op_norm(sector.cayley_inv(X) - A) < 1e-9 * (1 + op_norm(A))


@given(seeds, dims, angles)
def test_cayley_maps_sectorial_into_class(seed, n, phi):
    A = sector.sectorial_sample(rng_from(seed), n, phi)
    assert sector.in_cphi(sector.cayley(A), phi).in_class


@given(seeds, dims, angles)
def test_cayley_kappa_correspondence(seed, n, phi):
    rng = rng_from(seed)
    A = gaussian(rng, n, n) + rng.uniform(-1, 2) * eye(n)
    c = math.cos(phi) / math.sin(phi)
    for sign in (+1, -1):
        if np.min(np.abs(np.linalg.eigvalsh(herm_part(A) + sign * c * imag_part(A)))) < 1e-6:
            return
    if np.linalg.svd(eye(n) + A, compute_uv=False)[-1] < 1e-6:
        return
    rep = sector.in_cphi(sector.cayley(A), phi)
    assert (rep.kappa_plus, rep.kappa_minus) == sector.sector_kappa(A, phi)


# the lens and its boundary


def test_region_examples():
    phi = math.pi / 3
    assert sector.region_classify(0, phi) is sector.Region.INTERIOR
    assert sector.region_classify(1, phi) is sector.Region.BOUNDARY_BOTH
    assert sector.region_classify(-1, phi) is sector.Region.BOUNDARY_BOTH
    z = 1j * (1 - math.cos(phi)) / math.sin(phi)
    assert sector.region_classify(z, phi) is sector.Region.BOUNDARY_PLUS
    assert sector.region_classify(-z, phi) is sector.Region.BOUNDARY_MINUS
    assert sector.region_classify(1.5, phi) is sector.Region.EXTERIOR


@given(seeds, dims, angles)
def test_spectrum_of_members_in_lens(seed, n, phi):
    T = random_cphi(rng_from(seed), n, phi)
    for z in np.linalg.eigvals(T):
        assert sector.region_classify(z, phi) is not sector.Region.EXTERIOR


def test_sector_kappa_examples(rng):
    G = gaussian(rng, 3, 3)
    assert sector.sector_kappa(adj(G) @ G, 0.5) == (0, 0)
    assert sector.sector_kappa(np.diag([-1.0, 1.0]), 0.5) == (1, 1)


@given(seeds, dims, angles)
def test_sector_kappa_by_eigensolve(seed, n, phi):
    B = gaussian(rng_from(seed), n, n)
    c = math.cos(phi) / math.sin(phi)
    w_plus = np.linalg.eigvalsh(herm_part(B) + c * imag_part(B))
    w_minus = np.linalg.eigvalsh(herm_part(B) - c * imag_part(B))
    if min(np.min(np.abs(w_plus)), np.min(np.abs(w_minus))) < 1e-6:
        return
    assert sector.sector_kappa(B, phi) == (int(np.sum(w_plus < 0)), int(np.sum(w_minus < 0)))
    assert n_neg(herm_part(B) + c * imag_part(B)) == int(np.sum(w_plus < 0))


def test_tiny_angles_resolve_imaginary_part(rng):
    # at phi ~ 1e-12 the shifted norms round to 1; membership must still
    # reject a non-Hermitian contraction and accept a Hermitian one
    N = sample_unit_ball(rng, 3, 3, 0.9)
    H = hermitian_contraction(rng, 3)
    for phi in (1e-12, 1e-148):
        assert not sector.in_cphi(N, phi).in_class
        assert sector.in_cphi(H, phi).in_class
        assert sector.imag_bound_check(N, phi) is False
