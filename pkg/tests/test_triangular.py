import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from opext import triangular
from opext.errors import DimensionMismatch, NotContraction, NotInCphi, OpExtError
from opext.extremal import k_theta
from opext.matcore import adj, eye, op_norm
from opext.samplers import hermitian_contraction, random_cphi, sample_unit_ball, strict_contraction
from opext.sector import in_cphi
from opext.triangular import TriPair

from .strategies import angles, dims, rng_from, seeds


def strict_tri(rng, phi=None):
    a, b = int(rng.integers(1, 4)), int(rng.integers(1, 4))
    if phi is None:
        return TriPair(strict_contraction(rng, a, a), strict_contraction(rng, b, b))
    return TriPair(random_cphi(rng, a, phi), random_cphi(rng, b, phi), phi)


# contractive completions


def test_tri_scalar_example():
    tp = TriPair([[0]], [[0]])
    assert np.allclose(triangular.tri_complete(tp, [[1]]), [[0, 1], [0, 0]])


def test_tri_input_checks():
    with pytest.raises(NotContraction):
        triangular.tri_complete(TriPair([[2]], [[0]]), [[0]])
    with pytest.raises(DimensionMismatch):
        triangular.tri_complete(TriPair(eye(2), [[0]]), np.zeros((1, 1)))
    with pytest.raises(NotInCphi):
        triangular.shmulyan_complete(TriPair([[0.9j]], [[0]], math.pi / 4), [[0]])
    with pytest.raises(OpExtError):
        triangular.shmulyan_factors(TriPair([[0]], [[0]]))


@given(seeds, st.floats(0.1, 2.0))
def test_tri_ball(seed, radius):
    rng = rng_from(seed)
    tp = strict_tri(rng)
    K = sample_unit_ball(rng, *tp.k_shape)
    K *= radius / max(op_norm(K), 1e-3)
    T = triangular.tri_complete(tp, K)
    # strict diagonal blocks: the completion is contractive iff ||K|| <= 1
    if abs(op_norm(K) - 1) > 1e-6:
        assert (op_norm(T) <= 1 + 1e-12) == (op_norm(K) <= 1)
    K2, ok = triangular.tri_recover_k(tp, T)
    assert ok and op_norm(K2 - K) < 1e-8 * (1 + op_norm(K))


@given(seeds, st.floats(0.1, 3.0))
def test_tri_schur_identities(seed, radius):
    rng = rng_from(seed)
    tp = strict_tri(rng)
    K = sample_unit_ball(rng, *tp.k_shape, radius=radius)
    g, s = triangular.tri_identities(tp, K)
    assert g < 1e-8 and s < 1e-8


@given(seeds)
def test_tri_negative_index(seed):
    rng = rng_from(seed)
    tp = strict_tri(rng)
    K = sample_unit_ball(rng, *tp.k_shape, radius=3.0)
    T = triangular.tri_complete(tp, K)
    for M in (eye(T.shape[1]) - adj(T) @ T, eye(K.shape[1]) - adj(K) @ K):
        if np.min(np.abs(np.linalg.eigvalsh(M))) < 1e-6:
            return
    kT, kK = triangular.tri_kappa(tp, K)
    assert kT == kK


# C(phi) completions


def test_nilpotent_example():
    phi = math.pi / 3
    tp = TriPair([[0]], [[0]], phi)
    T, ok = triangular.shmulyan_complete(tp, [[1]])
    assert ok and np.allclose(T, k_theta(0.0, phi))
    assert in_cphi(T, phi).in_class
    _, ok = triangular.shmulyan_complete(tp, [[1.01]])
    assert not ok


def test_hermitian_blocks_give_unit_ball(rng):
    tp = TriPair(hermitian_contraction(rng, 2), hermitian_contraction(rng, 2), 0.6)
    f = triangular.shmulyan_factors(tp)
    assert f.consistent and np.allclose(f.u_phi, 0) and np.allclose(f.v_phi, 0)
    K = sample_unit_ball(rng, 2, 2)
    assert triangular.shmulyan_condition(tp, K)
    assert not triangular.shmulyan_condition(tp, 1.5 * K / op_norm(K))


@given(seeds, angles)
def test_shmulyan_matches_membership(seed, phi):
    rng = rng_from(seed)
    tp = strict_tri(rng, phi)
    K = sample_unit_ball(rng, *tp.k_shape, radius=1.5)
    T, ok = triangular.shmulyan_complete(tp, K)
    rep = in_cphi(T, phi)
    if abs(rep.margin) < 1e-7:
        return
    assert ok == rep.in_class
    K2, rec = triangular.shmulyan_recover_k(tp, T)
    assert rec and op_norm(K2 - K) < 1e-7 * (1 + op_norm(K))


@given(seeds, angles)
def test_shmulyan_radius_identity(seed, phi):
    tp = strict_tri(rng_from(seed), phi)
    assert triangular.shmulyan_radius_residual(tp) < 1e-9


@given(seeds, dims, angles)
def test_factors_are_hermitian_contractions(seed, n, phi):
    rng = rng_from(seed)
    tp = TriPair(random_cphi(rng, n, phi), random_cphi(rng, n, phi), phi)
    f = triangular.shmulyan_factors(tp)
    if not f.consistent:
        return
    for M in (f.u_phi, f.v_phi):
        assert op_norm(M - adj(M)) < 1e-12 * (1 + op_norm(M))
        assert op_norm(M) <= 1 + 1e-6
