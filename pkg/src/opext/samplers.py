"""Seeded random instances for tests and the verification harness."""

from __future__ import annotations

import numpy as np

from .balls import sample_norm, sample_psd, sample_unit_ball
from .completion import DualPair, dual_pair_make
from .matcore import adj, defect, defect_adj, herm_part
from .sector import cayley, sectorial_sample


def gaussian(rng: np.random.Generator, m: int, n: int) -> np.ndarray:
    return rng.standard_normal((m, n)) + 1j * rng.standard_normal((m, n))


def hermitian(rng: np.random.Generator, n: int) -> np.ndarray:
    return herm_part(gaussian(rng, n, n))


def unitary(rng: np.random.Generator, n: int) -> np.ndarray:
    Q, R = np.linalg.qr(gaussian(rng, n, n))
    return Q * (np.diag(R) / np.abs(np.diag(R)))


def hermitian_contraction(rng: np.random.Generator, n: int, radius: float = 0.95) -> np.ndarray:
    H = hermitian(rng, n)
    return radius * rng.uniform(0.05, 1.0) * H / np.linalg.norm(H, 2)


def strict_contraction(rng: np.random.Generator, m: int, n: int, radius: float = 0.95) -> np.ndarray:
    return sample_unit_ball(rng, m, n, radius)


def random_dims(rng: np.random.Generator, max_dim: int) -> int:
    return int(rng.integers(1, max_dim + 1))


def random_pair(rng: np.random.Generator, max_dim: int, radius: float = 0.95) -> DualPair:
    """General dual pair built from strict contractions ``t11``, ``V``, ``U``."""
    p, p1, q, q1 = (random_dims(rng, max_dim) for _ in range(4))
    t11 = strict_contraction(rng, p1, p, radius)
    V = strict_contraction(rng, q1, p, radius)
    U = strict_contraction(rng, p1, q, radius)
    return dual_pair_make(t11, V @ defect(t11), defect_adj(t11) @ U)


def random_symmetric_pair(
    rng: np.random.Generator, max_dim: int, radius: float = 0.95, proper: bool = False
) -> DualPair:
    """Dual pair with Hermitian ``t11``; ``proper`` forces ``U = V*``."""
    p, q = random_dims(rng, max_dim), random_dims(rng, max_dim)
    t11 = hermitian_contraction(rng, p, radius)
    D = defect(t11)
    V = strict_contraction(rng, q, p, radius)
    U = adj(V) if proper else strict_contraction(rng, p, q, radius)
    return dual_pair_make(t11, V @ D, D @ U)


def random_cphi(rng: np.random.Generator, n: int, phi: float) -> np.ndarray:
    """Member of C(phi) as the Cayley image of a random sectorial matrix."""
    return cayley(sectorial_sample(rng, n, phi))


__all__ = [
    "gaussian",
    "hermitian",
    "hermitian_contraction",
    "random_cphi",
    "random_dims",
    "random_pair",
    "random_symmetric_pair",
    "sample_norm",
    "sample_psd",
    "sample_unit_ball",
    "sectorial_sample",
    "strict_contraction",
    "unitary",
]
