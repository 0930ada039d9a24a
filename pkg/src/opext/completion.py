"""Contractive and C(phi) completions of partially specified 2x2 block matrices.

Throughout, a completion of a dual pair has the block layout::

    T = [[t11, t12],
         [t21, t22]]

where ``t11 : H1 -> H1'``, ``t21 : H1 -> H2'`` and ``t12 : H2 -> H1'`` are
given and ``t22 : H2 -> H2'`` is unknown. The given blocks factor through the
defects of ``t11`` as ``t21 = V D_{t11}`` and ``t12 = D_{t11*} U``; every
contractive completion is ``t22 = -V t11* U + D_{V*} K D_U`` with ``||K|| <= 1``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .balls import MEMBER_TOL, OperatorBall, ball_member, sample_unit_ball
from .errors import (
    BelowCriticalAngle,
    BlockMismatch,
    DimensionMismatch,
    FactorInconsistent,
    InconsistentQ,
    NotContraction,
    NotDualPairContractions,
    NotInClass,
    NotInPhiZeroClass,
    NotProperPair,
    NotSymmetricColumn,
    NotSymmetricPair,
    OpExtError,
)
from .matcore import (
    Tolerances,
    _tol,
    adj,
    as_matrix,
    consistent_sandwich,
    defect,
    defect_adj,
    eye,
    herm_part,
    imag_part,
    is_maximal_partial_isometry,
    op_norm,
    pinv,
    psd_inv_sqrt,
    psd_sqrt,
    range_basis,
)
from .sector import cphi_margins, in_cphi, sincos

PI_OVER_TWO_ONLY = "pi/2-only"
RECON_TOL = 1e-9


@dataclass
class DualPair:
    """Prescribed blocks ``t11``, ``t21``, ``t12`` with their defect factors."""

    t11: np.ndarray
    t21: np.ndarray
    t12: np.ndarray
    v: np.ndarray
    u: np.ndarray
    d_t11: np.ndarray
    d_t11_adj: np.ndarray
    symmetric: bool
    d_v_adj: np.ndarray = field(repr=False)
    d_u: np.ndarray = field(repr=False)

    @property
    def dims(self) -> tuple[int, int, int, int]:
        """``(dim H1, dim H2, dim H1', dim H2')``."""
        p1, p = self.t11.shape
        return p, self.t12.shape[1], p1, self.t21.shape[0]

    @property
    def proper(self) -> bool:
        """Symmetric with ``t12 = t21*`` (equivalently ``U = V*``)."""
        return self.symmetric and op_norm(self.t12 - adj(self.t21)) <= 1e-10 * (1 + op_norm(self.t21))

    def k_shape(self) -> tuple[int, int]:
        _, q, _, q1 = self.dims
        return q1, q


def _check_dual(t11, t21, t12, tol: Tolerances) -> None:
    if t21.shape[1] != t11.shape[1] or t12.shape[0] != t11.shape[0]:
        raise DimensionMismatch(
            f"blocks t11 {t11.shape}, t21 {t21.shape}, t12 {t12.shape} do not share H1 / H1'"
        )
    col = op_norm(np.vstack([t11, t21]))
    row = op_norm(np.hstack([t11, t12]))
    if col > 1 + tol.norm_slack:
        raise NotDualPairContractions(f"column [t11; t21] has norm {col:.12g} > 1")
    if row > 1 + tol.norm_slack:
        raise NotDualPairContractions(f"row [t11, t12] has norm {row:.12g} > 1")


def dual_pair_make(t11, t21, t12, tol: Tolerances | None = None) -> DualPair:
    """Validate the prescribed blocks and factor them through the defects of ``t11``.

    Raises
    ------
    NotDualPairContractions
        If the column ``[t11; t21]`` or the row ``[t11, t12]`` is not a contraction.
    FactorInconsistent
        If ``t21 = V D_{t11}`` or ``t12 = D_{t11*} U`` cannot be reproduced.
    """
    tol = _tol(tol)
    t11, t21, t12 = as_matrix(t11), as_matrix(t21), as_matrix(t12)
    _check_dual(t11, t21, t12, tol)
    d = defect(t11, tol)
    ds = defect_adj(t11, tol)
    v = t21 @ pinv(d, tol)
    u = pinv(ds, tol) @ t12
    scale = 1.0 + op_norm(t21) + op_norm(t12)
    if op_norm(v @ d - t21) > RECON_TOL * scale or op_norm(ds @ u - t12) > RECON_TOL * scale:
        raise FactorInconsistent("off-diagonal blocks do not factor through the defects of t11")
    if op_norm(v) > 1 + 1e-6 or op_norm(u) > 1 + 1e-6:
        raise FactorInconsistent("defect factors V, U are not contractions")
    # clip the tiny excess that pseudoinverses can introduce
    v = _clip_norm(v)
    u = _clip_norm(u)
    symmetric = (
        t11.shape[0] == t11.shape[1]
        and t21.shape[0] == t12.shape[1]
        and op_norm(t11 - adj(t11)) <= tol.psd_tol * (1 + op_norm(t11))
    )
    return DualPair(
        t11, t21, t12, v, u, d, ds, bool(symmetric),
        d_v_adj=defect_adj(v, tol),
        d_u=defect(u, tol),
    )


def _clip_norm(A: np.ndarray) -> np.ndarray:
    n = op_norm(A)
    return A / n if n > 1.0 else A


def center_block(pair: DualPair) -> np.ndarray:
    """``-V t11* U``, the completion with ``K = 0``."""
    return -pair.v @ adj(pair.t11) @ pair.u


def assemble(t11, t12, t21, t22) -> np.ndarray:
    return np.block([[t11, t12], [t21, t22]])


def complete(pair: DualPair, K) -> np.ndarray:
    """The completion ``T_K`` with ``t22 = -V t11* U + D_{V*} K D_U``."""
    K = as_matrix(K)
    if K.shape != pair.k_shape():
        raise DimensionMismatch(f"K must have shape {pair.k_shape()}, got {K.shape}")
    t22 = center_block(pair) + pair.d_v_adj @ K @ pair.d_u
    return assemble(pair.t11, pair.t12, pair.t21, t22)


def split_blocks(pair: DualPair, T):
    """Cut a full matrix into the four blocks matching ``pair``."""
    T = as_matrix(T)
    p, q, p1, q1 = pair.dims
    if T.shape != (p1 + q1, p + q):
        raise DimensionMismatch(f"completion must have shape {(p1 + q1, p + q)}, got {T.shape}")
    return T[:p1, :p], T[:p1, p:], T[p1:, :p], T[p1:, p:]


def recover_k(pair: DualPair, T, tol: Tolerances | None = None) -> tuple[np.ndarray, bool]:
    """Invert :func:`complete`: find ``K`` with ``complete(pair, K) = T``.

    ``ok`` is false when ``t22`` is not reachable (its deviation from the
    center leaves the ranges of ``D_{V*}`` or ``D_U``).
    """
    t11, t12, t21, t22 = split_blocks(pair, T)
    scale = 1e-8 * (1 + op_norm(T))
    if (
        op_norm(t11 - pair.t11) > scale
        or op_norm(t12 - pair.t12) > scale
        or op_norm(t21 - pair.t21) > scale
    ):
        raise BlockMismatch("prescribed blocks of T do not match the dual pair")
    return consistent_sandwich(pair.d_v_adj, t22 - center_block(pair), pair.d_u, tol)


def compress_k(pair: DualPair, K, tol: Tolerances | None = None) -> np.ndarray:
    """``K`` as a map ``ran D_U -> ran D_{V*}`` in orthonormal bases."""
    bl = range_basis(pair.d_v_adj, tol)
    br = range_basis(pair.d_u, tol)
    return adj(bl) @ as_matrix(K) @ br


# ---------------------------------------------------------------------------
# sectorial completions of symmetric pairs


@dataclass
class CriticalAngle:
    phi1: float | str
    q: np.ndarray
    consistent: bool


def _require_symmetric(pair: DualPair) -> None:
    if not pair.symmetric:
        raise NotSymmetricPair("t11 must be Hermitian and H1 = H1', H2 = H2'")


def q_operator(pair: DualPair, tol: Tolerances | None = None) -> tuple[np.ndarray, bool]:
    """``Q`` with ``D_{V*} Q D_U = I - V U`` and whether that system is consistent."""
    q = pair.u.shape[1]
    return consistent_sandwich(pair.d_v_adj, eye(q) - pair.v @ pair.u, pair.d_u, tol)


# ||Q|| within this of one counts as one; arccos turns a rounding excess
# of eps into an angle of sqrt(2 eps)
Q_NORM_SNAP = 1e-12


def phi1_from_norm(qnorm: float) -> float:
    if qnorm <= 1.0 + Q_NORM_SNAP:
        return 0.0
    return math.acos(1.0 / qnorm)


def critical_angle(pair: DualPair, tol: Tolerances | None = None) -> CriticalAngle:
    """Smallest angle for which a C(phi) completion of a symmetric pair exists.

    Returns ``"pi/2-only"`` when ``Q`` is undefined (the system
    ``D_{V*} Q D_U = I - VU`` has no solution); then only plain contractive
    completions exist.
    """
    _require_symmetric(pair)
    Q, ok = q_operator(pair, tol)
    if not ok:
        return CriticalAngle(PI_OVER_TWO_ONLY, Q, False)
    return CriticalAngle(phi1_from_norm(op_norm(Q)), Q, True)


ANGLE_TOL = 1e-12


def _hole_q(pair: DualPair, phi: float, tol: Tolerances | None) -> np.ndarray | None:
    """``Q`` for the sectorial hole, or ``None`` when only ``phi = pi/2`` makes sense."""
    ca = critical_angle(pair, tol)
    if not ca.consistent:
        if phi >= math.pi / 2:
            return None
        raise InconsistentQ("I - VU does not factor through D_{V*} and D_U; only phi = pi/2 works")
    if phi < ca.phi1 - ANGLE_TOL:
        raise BelowCriticalAngle(f"phi = {phi!r} is below the critical angle {ca.phi1!r}")
    return ca.q


def shifted_k(pair: DualPair, K, Q, phi: float, tol: Tolerances | None = None):
    """Compressed ``K sin(phi) + i Q cos(phi)`` and ``K sin(phi) - i Q cos(phi)``."""
    s, c = sincos(phi)
    Kc = compress_k(pair, K, tol)
    if Q is None:
        return s * Kc, s * Kc
    Qc = compress_k(pair, Q, tol)
    return s * Kc + 1j * c * Qc, s * Kc - 1j * c * Qc


def sectorial_complete(pair: DualPair, phi: float, K, tol: Tolerances | None = None):
    """Completion ``T_K`` and whether it lies in C(phi).

    The verdict comes from the parameter side: ``T_K`` is in C(phi) exactly
    when ``K sin(phi) +- i Q cos(phi)`` are both contractions.
    """
    tol = _tol(tol)
    _require_symmetric(pair)
    Q = _hole_q(pair, phi, tol)
    T = complete(pair, K)
    kp, km = shifted_k(pair, K, Q, phi, tol)
    in_class = op_norm(kp) <= 1 + MEMBER_TOL and op_norm(km) <= 1 + MEMBER_TOL
    return T, bool(in_class)


def singleton_check(pair: DualPair, phi: float, tol: Tolerances | None = None) -> bool:
    """Whether exactly one C(phi) completion exists."""
    tol = _tol(tol)
    _require_symmetric(pair)
    Q = _hole_q(pair, phi, tol)
    if op_norm(pair.d_v_adj) == 0.0 or op_norm(pair.d_u) == 0.0:
        return True
    if Q is None:
        return False
    Qc = compress_k(pair, Q, tol)
    if Qc.size == 0:
        return True
    return is_maximal_partial_isometry(Qc * sincos(phi)[1])


def empirical_phi1(
    pair: DualPair,
    iters: int = 60,
    samples: int = 200,
    rng: np.random.Generator | None = None,
) -> float:
    """Bisection for the smallest angle at which some completion lies in C(phi).

    At each angle the center ``K = 0`` is tested first; when it fails,
    ``samples`` random completions are tried as a safety net. Membership is
    decided without slack so the bisection tracks the exact crossing.
    """
    rng = np.random.default_rng(0) if rng is None else rng
    q1, q = pair.k_shape()
    T0 = complete(pair, np.zeros((q1, q)))
    stack = [complete(pair, sample_unit_ball(rng, q1, q)) for _ in range(samples)]
    stack = np.stack(stack) if stack else None
    exact = Tolerances(norm_slack=0.0)

    def feasible(phi):
        if in_cphi(T0, phi, exact, kappas=False).in_class:
            return True
        if stack is None or phi == 0.0:
            return False
        return bool(np.any(cphi_margins(stack, phi) >= 0.0))

    if feasible(0.0):
        return 0.0
    lo, hi = 0.0, math.pi / 2
    for _ in range(iters):
        mid = 0.5 * (lo + hi)
        if feasible(mid):
            hi = mid
        else:
            lo = mid
    return hi


# ---------------------------------------------------------------------------
# self-adjoint extensions: Krein's extremal pair


def _require_proper(pair: DualPair) -> None:
    if not pair.proper:
        raise NotProperPair("need Hermitian t11 and t12 = t21*")


def extremal_pair(pair: DualPair) -> tuple[np.ndarray, np.ndarray]:
    """Minimal and maximal self-adjoint contractive completions ``(T_m, T_M)``."""
    _require_proper(pair)
    q = pair.u.shape[1]
    return complete(pair, -eye(q)), complete(pair, eye(q))


def extremal_pair_closed_form(pair: DualPair) -> tuple[np.ndarray, np.ndarray]:
    """The same pair written with corners ``-I + U*(I - t11)U`` and ``I - U*(I + t11)U``."""
    _require_proper(pair)
    U, t11 = pair.u, pair.t11
    p, q = U.shape
    lo = -eye(q) + adj(U) @ (eye(p) - t11) @ U
    hi = eye(q) - adj(U) @ (eye(p) + t11) @ U
    return (
        assemble(t11, pair.t12, pair.t21, lo),
        assemble(t11, pair.t12, pair.t21, hi),
    )


def krein_param(pair: DualPair, K, tol: Tolerances | None = None) -> np.ndarray:
    """``T_K`` from ``2 T_K = (T_M + T_m) + (T_M - T_m)^{1/2} K (T_M - T_m)^{1/2}``.

    ``K`` acts on ``H2`` and is embedded in the lower-right corner.
    """
    Tm, TM = extremal_pair(pair)
    K = as_matrix(K)
    p, q, _, _ = pair.dims
    if K.shape != (q, q):
        raise DimensionMismatch(f"K must be {q} x {q}")
    Kfull = np.zeros((p + q, p + q), dtype=np.complex128)
    Kfull[p:, p:] = K
    R = psd_sqrt(herm_part(TM - Tm), tol)
    return 0.5 * ((TM + Tm) + R @ Kfull @ R)


# ---------------------------------------------------------------------------
# all C(phi) extensions of a symmetric column


def _symmetric_column(t11, t21, tol: Tolerances):
    t11, t21 = as_matrix(t11), as_matrix(t21)
    if t11.shape[0] != t11.shape[1] or t21.shape[1] != t11.shape[1]:
        raise DimensionMismatch("t11 must be square and t21 must share its columns")
    if op_norm(t11 - adj(t11)) > tol.psd_tol * (1 + op_norm(t11)):
        raise NotSymmetricColumn("t11 is not Hermitian")
    if op_norm(np.vstack([t11, t21])) > 1 + tol.norm_slack:
        raise NotSymmetricColumn("column [t11; t21] is not a contraction")
    d = defect(t11, tol)
    return t11, t21, d, t21 @ pinv(d, tol)


def all_extensions_u_ball(t11, t21, phi: float, tol: Tolerances | None = None) -> OperatorBall:
    """Ball of factors ``U`` (with ``t12 = D_{t11} U``) that admit a C(phi) completion.

    ``U`` is admissible iff ``cos(phi) ||D_{V*}^{-1}(I - VU) f|| <= ||D_U f||``;
    completing the square in ``U`` gives center ``cos^2 Y^2 V*``, left radius
    ``Y D_V`` and right radius ``sin D_{V*} Y_*`` with
    ``Y = (sin^2 D_V^2 + cos^2)^{-1/2}`` and ``Y_*`` the same with ``D_{V*}``.
    """
    tol = _tol(tol)
    t11, t21, _, V = _symmetric_column(t11, t21, tol)
    s, c = sincos(phi)
    p = t11.shape[0]
    q = t21.shape[0]
    DV = defect(_clip_norm(V), tol)
    DVs = defect_adj(_clip_norm(V), tol)
    Y = psd_inv_sqrt(s**2 * DV @ DV + c**2 * eye(p), tol)
    Ys = psd_inv_sqrt(s**2 * DVs @ DVs + c**2 * eye(q), tol)
    center = c**2 * Y @ Y @ adj(V)
    return OperatorBall(center, herm_part(Y @ DV), herm_part(s * DVs @ Ys))


def all_extensions(t11, t21, phi: float, M, K, tol: Tolerances | None = None, strict: bool = True):
    """C(phi) extension of the column ``[t11; t21]`` parametrized by ``(M, K)``.

    ``M`` picks ``U`` from :func:`all_extensions_u_ball`, which fixes the
    upper-right block ``t12 = D_{t11} U``; ``K`` then picks ``t22`` inside the
    sectorial hole of the resulting pair. With ``strict`` a parameter outside
    the admissible set raises :class:`NotInClass`.

    Returns
    -------
    T : ndarray
    pair : DualPair
    in_class : bool
    """
    tol = _tol(tol)
    ball = all_extensions_u_ball(t11, t21, phi, tol)
    M = as_matrix(M)
    if strict and op_norm(M) > 1 + tol.norm_slack:
        raise NotContraction("M must be a contraction")
    U = _clip_norm(ball.point(M))
    t11 = as_matrix(t11)
    t12 = defect(t11, tol) @ U
    pair = dual_pair_make(t11, t21, t12, tol)
    T, in_class = sectorial_complete(pair, phi, K, tol)
    if strict and not in_class:
        raise NotInClass("K violates K sin(phi) +- i Q cos(phi) contractive")
    return T, pair, in_class


def u_inequality_ratio(pair: DualPair, phi: float, tol: Tolerances | None = None) -> float:
    """``cos(phi) ||Q||``; at most one exactly when ``U`` is admissible at this angle."""
    Q, ok = q_operator(pair, tol)
    s, c = sincos(phi)
    if not ok:
        return 0.0 if c == 0.0 else math.inf
    return c * op_norm(Q)


# ---------------------------------------------------------------------------
# reductions of the general problems to operator balls and holes


def extension_balls(t11, t21, phi: float, tol: Tolerances | None = None):
    """Two balls describing all C(phi) extensions of a column ``T1 = [t11; t21]``.

    With ``S_+- = T1 sin +- i cos J`` (``J`` the embedding of ``H1``), a
    square ``T`` extending ``T1`` lies in C(phi) iff ``T P2`` belongs to
    ``B(-+i cot P2; D_{S_+-*}/sin, P2)`` for both signs, ``P2`` being the
    projection onto ``H2``.
    """
    tol = _tol(tol)
    t11, t21 = as_matrix(t11), as_matrix(t21)
    p = t11.shape[1]
    if t11.shape[0] != p or t21.shape[1] != p:
        raise DimensionMismatch("t11 must be square and t21 must share its columns")
    q = t21.shape[0]
    n = p + q
    s, c = sincos(phi)
    if s == 0.0:
        raise OpExtError("phi must be positive")
    T1 = np.vstack([t11, t21])
    J = np.vstack([eye(p), np.zeros((q, p))])
    P2 = np.zeros((n, n), dtype=np.complex128)
    P2[p:, p:] = eye(q)
    balls = []
    for sign in (+1, -1):
        S = s * T1 + sign * 1j * c * J
        balls.append(OperatorBall(-sign * 1j * (c / s) * P2, defect_adj(S, tol) / s, P2))
    return balls[0], balls[1]


def extension_member(balls, T, tol: float = MEMBER_TOL) -> bool:
    """Membership of a square extension ``T`` in both balls of :func:`extension_balls`."""
    T = as_matrix(T)
    P2 = balls[0].r_right
    if T.shape != P2.shape:
        raise DimensionMismatch(f"extension must have shape {P2.shape}, got {T.shape}")
    return all(ball_member(b, T @ P2, tol)[0] for b in balls)


@dataclass
class CompletionBalls:
    ball_plus: OperatorBall
    ball_minus: OperatorBall
    samples_nonempty: bool
    samples: int
    witness: np.ndarray | None


def shifted_pair_factors(pair_or_blocks, phi: float, tol: Tolerances | None = None):
    """Defect factors of the shifted pairs ``(t11 sin +- i cos, t21 sin, t12 sin)``.

    Returns a list of ``(B11, V, U)`` for the signs ``+`` and ``-``.
    """
    tol = _tol(tol)
    t11, t21, t12 = pair_or_blocks
    t11, t21, t12 = as_matrix(t11), as_matrix(t21), as_matrix(t12)
    s, c = sincos(phi)
    p = t11.shape[0]
    if t11.shape[1] != p:
        raise DimensionMismatch("t11 must be square")
    out = []
    for sign in (+1, -1):
        B = s * t11 + sign * 1j * c * eye(p)
        col = op_norm(np.vstack([B, s * t21]))
        row = op_norm(np.hstack([B, s * t12]))
        if col > 1 + tol.norm_slack or row > 1 + tol.norm_slack:
            raise NotInPhiZeroClass("the prescribed column or row is not in the C(phi) sense contractive")
        V = _clip_norm(s * t21 @ pinv(defect(B, tol), tol))
        U = _clip_norm(pinv(defect_adj(B, tol), tol) @ (s * t12))
        out.append((B, V, U))
    return out


def completion_balls(
    t11, t21, t12, phi: float, samples: int = 200, seed: int = 0, tol: Tolerances | None = None
) -> CompletionBalls:
    """Two balls for ``t22 sin(phi)``; C(phi) completions are their intersection.

    The balls have different radii in general, so no closed-form emptiness
    test applies; instead a deterministic set of candidates (both centers,
    their midpoint and the contractive center ``-V t11* U``) and ``samples``
    random members of the ``+`` ball are tested against the ``-`` ball.
    """
    tol = _tol(tol)
    t11, t21, t12 = as_matrix(t11), as_matrix(t21), as_matrix(t12)
    s, c = sincos(phi)
    if s == 0.0:
        raise OpExtError("phi must be positive")
    q1, q = t21.shape[0], t12.shape[1]
    if q1 != q:
        raise DimensionMismatch("t22 must be square for a C(phi) completion")
    balls = []
    for sign, (B, V, U) in zip((+1, -1), shifted_pair_factors((t11, t21, t12), phi, tol)):
        center = -sign * 1j * c * eye(q) - V @ adj(B) @ U
        balls.append(OperatorBall(center, defect_adj(V, tol), defect(U, tol)))
    bp, bm = balls
    pair = dual_pair_make(t11, t21, t12, tol)
    candidates = [bp.center, bm.center, 0.5 * (bp.center + bm.center), s * center_block(pair)]
    rng = np.random.default_rng(seed)
    candidates += [bp.point(sample_unit_ball(rng, q, q)) for _ in range(samples)]
    for Z in candidates:
        if ball_member(bp, Z)[0] and ball_member(bm, Z)[0]:
            return CompletionBalls(bp, bm, True, len(candidates), Z / s)
    return CompletionBalls(bp, bm, False, len(candidates), None)


def shifted_defect_residual(t11, phi: float, tol: Tolerances | None = None) -> float:
    """Residual of ``D^2_{B+-} = sin^2 D_{t11} (I +- C_1) D_{t11}``.

    Here ``B+- = t11 sin +- i cos`` and ``C_1`` solves
    ``D_{t11} C_1 D_{t11} = 2 cot Im(t11*)``.
    """
    tol = _tol(tol)
    t11 = as_matrix(t11)
    s, c = sincos(phi)
    p = t11.shape[0]
    D = defect(t11, tol)
    C1, ok = consistent_sandwich(D, 2 * (c / s) * imag_part(adj(t11)), D, tol)
    if not ok:
        raise NotInClass("t11 is not in C(phi): the imaginary part does not factor through its defect")
    worst = 0.0
    for sign in (+1, -1):
        B = s * t11 + sign * 1j * c * eye(p)
        lhs = eye(p) - adj(B) @ B
        rhs = s**2 * D @ (eye(p) + sign * C1) @ D
        worst = max(worst, op_norm(lhs - rhs))
    return worst
