"""Operator balls, the quadratic-inequality ball, and equal-radii operator holes.

An operator ball ``B(C0; R_l, R_r)`` is the set ``{C0 + R_l K R_r : ||K|| <= 1}``.
An operator hole is the intersection of two balls that share both radii.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import (
    DimensionMismatch,
    Infeasible,
    InconsistentHole,
    KernelMismatch,
    NotPD,
)
from .matcore import (
    Tolerances,
    _tol,
    adj,
    as_matrix,
    consistent_sandwich,
    eye,
    herm_eig,
    herm_part,
    is_maximal_partial_isometry,
    op_norm,
    psd_sqrt,
    range_basis,
    range_projector,
)

MEMBER_TOL = 1e-8


@dataclass
class OperatorBall:
    center: np.ndarray
    r_left: np.ndarray
    r_right: np.ndarray

    def __post_init__(self):
        self.center = as_matrix(self.center)
        self.r_left = as_matrix(self.r_left)
        self.r_right = as_matrix(self.r_right)
        p, q = self.center.shape
        if self.r_left.shape != (p, p) or self.r_right.shape != (q, q):
            raise DimensionMismatch(
                f"ball radii {self.r_left.shape}, {self.r_right.shape} do not fit center {self.center.shape}"
            )

    def point(self, K) -> np.ndarray:
        """``C0 + R_l K R_r``."""
        return self.center + self.r_left @ as_matrix(K) @ self.r_right


@dataclass
class OperatorHole:
    ball_one: OperatorBall
    ball_two: OperatorBall
    q_shift: np.ndarray
    midpoint: np.ndarray
    consistent: bool

    @property
    def r_left(self) -> np.ndarray:
        return self.ball_one.r_left

    @property
    def r_right(self) -> np.ndarray:
        return self.ball_one.r_right

    def nonempty(self, tol: Tolerances | None = None) -> bool:
        return self.consistent and op_norm(self.q_shift) <= 1.0 + _tol(tol).norm_slack

    def point(self, K) -> np.ndarray:
        """``(C1 + C2)/2 + R_l K R_r``; a member whenever ``K +- Q`` are contractions."""
        return self.midpoint + self.r_left @ as_matrix(K) @ self.r_right


def ball_member(ball: OperatorBall, Z, tol: float = MEMBER_TOL) -> tuple[bool, np.ndarray]:
    """Test ``Z`` for membership and return the recovered parameter ``K``."""
    Z = as_matrix(Z)
    if Z.shape != ball.center.shape:
        raise DimensionMismatch(f"point {Z.shape} vs ball center {ball.center.shape}")
    k, ok = consistent_sandwich(ball.r_left, Z - ball.center, ball.r_right)
    return bool(ok and op_norm(k) <= 1.0 + tol), k


def solve_quadratic_inequality(Q1, Q2, Q3, tol: Tolerances | None = None) -> OperatorBall:
    """Solution set of ``Z* Q1 Z + Z* Q2 + Q2* Z + Q3 <= 0`` as an operator ball.

    Completing the square gives ``(Z + Q1^{-1} Q2)* Q1 (Z + Q1^{-1} Q2) <=
    Q2* Q1^{-1} Q2 - Q3``; the right side must be PSD for solutions to exist.

    Raises
    ------
    NotPD
        If ``Q1`` is not positive definite.
    Infeasible
        If ``Q2* Q1^{-1} Q2 - Q3`` has an eigenvalue below ``-psd_tol``.
    """
    tol = _tol(tol)
    Q1, Q2, Q3 = as_matrix(Q1), as_matrix(Q2), as_matrix(Q3)
    p, q = Q2.shape
    if Q1.shape != (p, p) or Q3.shape != (q, q):
        raise DimensionMismatch("Q1 must be p x p, Q2 p x q and Q3 q x q")
    w, W = herm_eig(Q1, tol)
    if p and w[-1] <= tol.psd_tol:
        raise NotPD(f"Q1 smallest eigenvalue {w[-1]:.3e} is not positive")
    Q1inv = herm_part((W / w) @ adj(W))
    rhs = herm_part(adj(Q2) @ Q1inv @ Q2 - herm_part(Q3))
    if q and np.linalg.eigvalsh(rhs)[0] < -tol.psd_tol * (1.0 + op_norm(rhs)):
        raise Infeasible("Q2* Q1^{-1} Q2 - Q3 is not positive semidefinite")
    r_left = herm_part((W / np.sqrt(w)) @ adj(W))
    r_right = psd_sqrt(rhs, tol) if q else rhs
    return OperatorBall(-Q1inv @ Q2, r_left, r_right)


def quadratic_form_value(Q1, Q2, Q3, Z) -> np.ndarray:
    """``Z* Q1 Z + Z* Q2 + Q2* Z + Q3`` (Hermitian part)."""
    Q1, Q2, Q3, Z = map(as_matrix, (Q1, Q2, Q3, Z))
    return herm_part(adj(Z) @ Q1 @ Z + adj(Z) @ Q2 + adj(Q2) @ Z + Q3)


def _same_kernel(R1: np.ndarray, R2: np.ndarray, tol: Tolerances) -> bool:
    if R1.shape != R2.shape:
        return False
    return op_norm(range_projector(R1, tol) - range_projector(R2, tol)) <= 1e-8


def factor_through(A, R1, R2, phi: float | None = None, tol: Tolerances | None = None):
    """Try to write ``A = R2 B R1`` with a contraction ``B``.

    With an angle, ``B`` must additionally lie in C(phi) after compression to
    ``ran R1`` (which then has to coincide with ``ran R2``).

    Returns
    -------
    B : ndarray
        Minimal-norm solution ``R2^+ A R1^+``.
    ok : bool
    """
    from .sector import in_cphi

    tol = _tol(tol)
    A, R1, R2 = as_matrix(A), as_matrix(R1), as_matrix(R2)
    if phi is not None and not _same_kernel(R1, R2, tol):
        raise KernelMismatch("ker R1 and ker R2 differ")
    B, consistent = consistent_sandwich(R2, A, R1, tol)
    ok = consistent and op_norm(B) <= 1.0 + tol.norm_slack
    if ok and phi is not None:
        basis = range_basis(R1, tol)
        ok = in_cphi(adj(basis) @ B @ basis, phi, tol).in_class
    return B, bool(ok)


def bilinear_witness(A, R1, R2, tol: Tolerances | None = None):
    """Largest ratio ``|(A f, g)| / (||R1 f|| ||R2 g||)`` and the vectors attaining it.

    The ratio equals ``||R2^{-1} A R1^{-1}||``; it is computed by an SVD of
    that matrix, independently of the sandwich solver. Needs invertible radii.
    """
    A, R1, R2 = as_matrix(A), as_matrix(R1), as_matrix(R2)
    R1i, R2i = np.linalg.inv(R1), np.linalg.inv(R2)
    U, s, Vh = np.linalg.svd(R2i @ A @ R1i)
    f = R1i @ adj(Vh)[:, 0]
    g = R2i @ U[:, 0]
    ratio = abs(np.vdot(g, A @ f)) / (np.linalg.norm(R1 @ f) * np.linalg.norm(R2 @ g))
    return float(ratio), f, g


def hole_make(C1, C2, R_l, R_r, tol: Tolerances | None = None) -> OperatorHole:
    """Two balls ``B(C1; R_l, R_r)`` and ``B(C2; R_l, R_r)`` with their shift ``Q``.

    ``Q`` solves ``R_l Q R_r = (C1 - C2)/2``; the intersection is nonempty
    exactly when this system is consistent and ``||Q|| <= 1``.
    """
    C1, C2, R_l, R_r = map(as_matrix, (C1, C2, R_l, R_r))
    if C1.shape != C2.shape:
        raise DimensionMismatch(f"centers {C1.shape} and {C2.shape} differ")
    b1 = OperatorBall(C1, R_l, R_r)
    b2 = OperatorBall(C2, R_l.copy(), R_r.copy())
    Q, ok = consistent_sandwich(R_l, (C1 - C2) / 2, R_r, tol)
    return OperatorHole(b1, b2, Q, (C1 + C2) / 2, ok)


def hole_member(hole: OperatorHole, T, tol: float = MEMBER_TOL) -> tuple[bool, np.ndarray]:
    """Membership through the shared-radii parametrization: ``K +- Q`` contractive."""
    if not hole.consistent:
        raise InconsistentHole("the shift Q is not defined for this pair of balls")
    T = as_matrix(T)
    if T.shape != hole.midpoint.shape:
        raise DimensionMismatch(f"point {T.shape} vs hole {hole.midpoint.shape}")
    k, ok = consistent_sandwich(hole.r_left, T - hole.midpoint, hole.r_right)
    member = ok and op_norm(k + hole.q_shift) <= 1.0 + tol and op_norm(k - hole.q_shift) <= 1.0 + tol
    return bool(member), k


def hole_member_two_balls(hole: OperatorHole, T, tol: float = MEMBER_TOL) -> bool:
    """Membership by testing both balls separately."""
    return ball_member(hole.ball_one, T, tol)[0] and ball_member(hole.ball_two, T, tol)[0]


def compress(X, left, right, tol: Tolerances | None = None) -> np.ndarray:
    """Matrix of ``X`` from ``ran right`` to ``ran left`` in orthonormal bases."""
    bl, br = range_basis(left, tol), range_basis(right, tol)
    return adj(bl) @ as_matrix(X) @ br


def hole_singleton(hole: OperatorHole, tol: Tolerances | None = None) -> bool:
    """Whether the hole reduces to the single point ``(C1 + C2)/2``."""
    tol = _tol(tol)
    if not hole.consistent:
        raise InconsistentHole("the shift Q is not defined for this pair of balls")
    if op_norm(hole.r_left) == 0.0 or op_norm(hole.r_right) == 0.0:
        return True
    Qc = compress(hole.q_shift, hole.r_left, hole.r_right, tol)
    if Qc.size == 0:
        return True
    return is_maximal_partial_isometry(Qc)


def sample_unit_ball(rng: np.random.Generator, m: int, n: int, radius: float = 1.0) -> np.ndarray:
    """Random ``m x n`` matrix with norm at most ``radius``.

    ``G (I + G*G)^{-1/2}`` is a strict contraction for Gaussian ``G``; it is
    normalised to norm one and scaled by ``u^{1/(m n)}`` so that samples reach
    the boundary region as often as the interior.
    """
    if m == 0 or n == 0:
        return np.zeros((m, n), dtype=np.complex128)
    G = rng.standard_normal((m, n)) + 1j * rng.standard_normal((m, n))
    w, W = np.linalg.eigh(eye(n) + adj(G) @ G)
    K = G @ (W / np.sqrt(w)) @ adj(W)
    K /= op_norm(K)
    return radius * rng.uniform() ** (1.0 / (m * n)) * K


def sample_norm(rng: np.random.Generator, m: int, n: int, norm: float) -> np.ndarray:
    """Random ``m x n`` matrix with operator norm exactly ``norm``."""
    G = rng.standard_normal((m, n)) + 1j * rng.standard_normal((m, n))
    return norm * G / op_norm(G)


def sample_psd(rng: np.random.Generator, n: int, rank: int | None = None) -> np.ndarray:
    """Random Hermitian PSD matrix of the given rank (full rank by default)."""
    r = n if rank is None else rank
    G = rng.standard_normal((n, r)) + 1j * rng.standard_normal((n, r))
    return herm_part(G @ adj(G)) / max(1, r)


def hole_sample(hole: OperatorHole, rng: np.random.Generator, count: int, tol: float = MEMBER_TOL):
    """Members ``midpoint + R_l K R_r`` drawn by rejection on ``K``.

    ``K`` is drawn from the unit ball and kept when ``K +- Q`` are both
    contractions. Returns at most ``count`` members (fewer if rejection keeps
    failing, e.g. for a singleton hole, where the midpoint is returned).
    """
    if not hole.nonempty():
        return []
    p, q = hole.midpoint.shape
    out = [hole.midpoint.copy()]
    attempts = 0
    Q = hole.q_shift
    while len(out) < count and attempts < 200 * count:
        attempts += 1
        # alternate between a ball that always fits and the full unit ball
        inner = 1.0 - op_norm(Q)
        radius = inner if attempts % 2 and inner > 0 else 1.0
        K = sample_unit_ball(rng, p, q, radius=radius)
        if op_norm(K + Q) <= 1.0 + tol and op_norm(K - Q) <= 1.0 + tol:
            out.append(hole.point(K))
    return out[:count]
