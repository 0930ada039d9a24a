"""Extreme points of the unit ball, of loones ``L(Q; phi)`` and of C(phi).

The loone ``L(Q; phi)`` is the set of ``K`` with ``K sin(phi) +- i Q cos(phi)``
both contractions. Writing ``D_{K,Q} = (I - sin^2 K*K - cos^2 Q*Q)^{1/2}`` one
always has ``sin(2 phi) Im(K*Q) = D_{K,Q} C D_{K,Q}`` for a Hermitian
contraction ``C``; when ``C`` restricted to ``ran D_{K,Q}`` has spectrum in
``{-1, +1}``, ``K`` is an extreme point of the loone.

Verdicts are three-valued: ``extreme_certified`` when a sufficient condition
holds, ``not_extreme`` when an explicit pair ``K +- E`` inside the set has been
found, ``undecided`` otherwise.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from enum import Enum

import numpy as np

from .completion import DualPair, compress_k, q_operator, sectorial_complete
from .errors import InconsistentQ, NotContraction, NotInCphi, NotInLoone
from .matcore import (
    Tolerances,
    _tol,
    adj,
    as_matrix,
    consistent_sandwich,
    defect,
    eye,
    herm_part,
    imag_part,
    is_maximal_partial_isometry,
    op_norm,
    psd_sqrt,
    range_basis,
)
from .sector import Region, in_cphi, region_classify, sincos

SPECTRUM_TOL = 1e-7
LOONE_TOL = 1e-8


class Verdict(str, Enum):
    EXTREME_CERTIFIED = "extreme_certified"
    NOT_EXTREME = "not_extreme"
    UNDECIDED = "undecided"


@dataclass
class ExtremeCertificate:
    c_matrix: np.ndarray
    d_kq: np.ndarray
    consistent: bool
    spectrum_pm1: bool
    verdict: Verdict
    identity_residual: float = 0.0
    witness: np.ndarray | None = field(default=None, repr=False)


def extreme_unit_ball(T, tol: Tolerances | None = None) -> bool:
    """Extreme points of the unit ball are exactly the maximal partial isometries."""
    tol = _tol(tol)
    T = as_matrix(T)
    if op_norm(T) > 1 + tol.norm_slack:
        raise NotContraction(f"||T|| = {op_norm(T):.12g} exceeds 1")
    return is_maximal_partial_isometry(T)


def loone_shifts(K, Q, phi: float) -> tuple[np.ndarray, np.ndarray]:
    """``K sin(phi) + i Q cos(phi)`` and ``K sin(phi) - i Q cos(phi)``."""
    s, c = sincos(phi)
    K, Q = as_matrix(K), as_matrix(Q)
    return s * K + 1j * c * Q, s * K - 1j * c * Q


def in_loone(K, Q, phi: float, slack: float = LOONE_TOL) -> bool:
    return all(op_norm(X) <= 1 + slack for X in loone_shifts(K, Q, phi))


def d_kq(K, Q, phi: float, tol: Tolerances | None = None) -> np.ndarray:
    """``(I - sin^2 K*K - cos^2 Q*Q)^{1/2}``."""
    s, c = sincos(phi)
    K, Q = as_matrix(K), as_matrix(Q)
    n = K.shape[1]
    return psd_sqrt(eye(n) - s**2 * adj(K) @ K - c**2 * adj(Q) @ Q, tol)


def _intersect_ranges(mats, tol: Tolerances) -> np.ndarray:
    """Orthonormal basis of the intersection of the ranges of Hermitian matrices."""
    n = mats[0].shape[0]
    kers = []
    for A in mats:
        B = range_basis(A, tol)
        full = np.linalg.svd(B, full_matrices=True)[0] if B.size else eye(n)
        kers.append(full[:, B.shape[1]:])
    K = np.hstack(kers)
    kb = range_basis(K, tol) if K.size else np.zeros((n, 0), dtype=np.complex128)
    if kb.shape[1] == 0:
        return eye(n)
    full = np.linalg.svd(kb, full_matrices=True)[0]
    return full[:, kb.shape[1]:]


def interior_witness(K, Q, phi: float, rng=None, directions: int = 20, tol: Tolerances | None = None):
    """Search for ``E != 0`` with ``K + E`` and ``K - E`` both in the loone.

    Directions are confined to the subspaces where neither shifted matrix is
    isometric (and likewise for the adjoints), then shrunk until both
    endpoints pass an exact membership test. Returns ``E`` or ``None``.
    """
    tol = _tol(tol)
    K, Q = as_matrix(K), as_matrix(Q)
    m, n = K.shape
    rng = np.random.default_rng(0) if rng is None else rng
    Kp, Km = loone_shifts(K, Q, phi)
    right = _intersect_ranges(
        [psd_sqrt(eye(n) - adj(X) @ X, tol) for X in (Kp, Km)], tol
    )
    left = _intersect_ranges(
        [psd_sqrt(eye(m) - X @ adj(X), tol) for X in (Kp, Km)], tol
    )
    if right.shape[1] == 0 or left.shape[1] == 0:
        return None
    for _ in range(directions):
        G = rng.standard_normal((left.shape[1], right.shape[1])) + 1j * rng.standard_normal(
            (left.shape[1], right.shape[1])
        )
        E = left @ G @ adj(right)
        E /= op_norm(E)
        t = 1.0
        while t > 1e-6:
            if in_loone(K + t * E, Q, phi, slack=0.0) and in_loone(K - t * E, Q, phi, slack=0.0):
                return t * E
            t *= 0.5
    return None


def loone_certificate(
    K, Q, phi: float, search_witness: bool = False, tol: Tolerances | None = None
) -> ExtremeCertificate:
    """Certificate ``C`` with ``sin(2 phi) Im(K*Q) = D_{K,Q} C D_{K,Q}``.

    The verdict is ``extreme_certified`` when ``C`` (restricted to
    ``ran D_{K,Q}``) has spectrum in ``{-1, +1}``; an empty range counts as
    certified. With ``search_witness`` an interior direction is searched for
    and, if found, the verdict becomes ``not_extreme``.

    Raises
    ------
    NotInLoone
        If ``K sin(phi) +- i Q cos(phi)`` is not contractive.
    """
    tol = _tol(tol)
    K, Q = as_matrix(K), as_matrix(Q)
    if K.shape != Q.shape:
        raise NotInLoone(f"K {K.shape} and Q {Q.shape} must have the same shape")
    if not in_loone(K, Q, phi):
        raise NotInLoone("K sin(phi) +- i Q cos(phi) is not a pair of contractions")
    s, c = sincos(phi)
    D = d_kq(K, Q, phi, tol)
    target = math.sin(2 * phi) * imag_part(adj(K) @ Q)
    C, consistent = consistent_sandwich(D, target, D, tol)
    C = herm_part(C)
    basis = range_basis(D, tol)
    if basis.shape[1] == 0:
        pm1 = True
    else:
        w = np.linalg.eigvalsh(herm_part(adj(basis) @ C @ basis))
        pm1 = bool(np.all(np.abs(np.abs(w) - 1.0) <= SPECTRUM_TOL))
    residual = identity_residual(K, Q, phi, C, D)
    verdict = Verdict.EXTREME_CERTIFIED if (consistent and pm1) else Verdict.UNDECIDED
    witness = None
    if search_witness and verdict is Verdict.UNDECIDED:
        witness = interior_witness(K, Q, phi, tol=tol)
        if witness is not None:
            verdict = Verdict.NOT_EXTREME
    return ExtremeCertificate(C, D, bool(consistent), pm1, verdict, residual, witness)


def identity_residual(K, Q, phi: float, C, D) -> float:
    """Largest residual of ``I - K_+-* K_+- = D (I +- C) D``."""
    n = D.shape[0]
    worst = 0.0
    for sign, X in zip((+1, -1), loone_shifts(K, Q, phi)):
        lhs = eye(n) - adj(X) @ X
        rhs = D @ (eye(n) + sign * C) @ D
        worst = max(worst, op_norm(lhs - rhs))
    return worst


def isometric_shift_identities(K, Q, phi: float) -> dict[str, float]:
    """Residuals of the four sufficient identities for extremality.

    ``I - K_+-* K_+-`` equals ``D_{K,Q}^2 -+ sin(2 phi) Im(K*Q)`` and
    ``I - K_+- K_+-*`` equals ``D_{K*,Q*}^2 -+ sin(2 phi) Im(K Q*)``; if any of
    them vanishes, ``K_+`` or ``K_-`` is an isometry or co-isometry and hence an
    extreme point of the unit ball, which forces ``K`` to be extreme in the loone.
    """
    s, c = sincos(phi)
    K, Q = as_matrix(K), as_matrix(Q)
    m, n = K.shape
    s2 = math.sin(2 * phi)
    dkq2 = eye(n) - s**2 * adj(K) @ K - c**2 * adj(Q) @ Q
    dkq2_adj = eye(m) - s**2 * K @ adj(K) - c**2 * Q @ adj(Q)
    a = imag_part(adj(K) @ Q)
    b = imag_part(K @ adj(Q))
    return {
        "right_plus": op_norm(dkq2 + s2 * a),
        "right_minus": op_norm(dkq2 - s2 * a),
        "left_plus": op_norm(dkq2_adj - s2 * b),
        "left_minus": op_norm(dkq2_adj + s2 * b),
    }


def k_theta(theta: float, phi: float) -> np.ndarray:
    """Nonnormal nilpotent member of C(phi): ``e^{i theta} [[0, sin phi], [0, 0]]``."""
    return np.exp(1j * theta) * np.array([[0, math.sin(phi)], [0, 0]], dtype=np.complex128)


def k_theta_certificate(theta: float) -> np.ndarray:
    """Closed form of ``C'`` in ``2 Im K(theta) = tan(phi) D_K C' D_K``.

    The loone certificate with ``Q = I`` is its negative, because
    ``Im(K* I) = -Im K``.
    """
    e = np.exp(1j * theta)
    return 1j * np.array([[0, -e], [np.conj(e), 0]], dtype=np.complex128)


# ---------------------------------------------------------------------------
# C(phi) as the loone L(I; phi)


@dataclass
class CphiExtremeReport:
    certificate: ExtremeCertificate
    tangent_certificate: np.ndarray
    tangent_consistent: bool
    normality_residual: float
    normal: bool
    regions: list[Region]
    boundary_spectrum: bool
    normal_boundary_extreme: bool
    boundary_pp_implies_normal: bool | None
    verdict: Verdict


NORMAL_TOL = 1e-8


def cphi_extreme_tests(K, phi: float, search_witness: bool = True, tol: Tolerances | None = None):
    """Extreme-point tests for a matrix in C(phi), ``0 < phi < pi/2``.

    Combines the loone certificate with ``Q = I``, the second route
    ``2 Im K = tan(phi) D_K C' D_K`` (so ``C' = -C``), and the spectral test
    for normal matrices: a normal ``K`` whose eigenvalues all lie on the
    boundary of the lens is extreme. When the eigenvalues are all on the
    boundary and ``K`` is diagonalizable, ``K`` must be normal; that
    implication is evaluated and reported.
    """
    tol = _tol(tol)
    K = as_matrix(K)
    if not in_cphi(K, phi, tol).in_class:
        raise NotInCphi("K is not in C(phi)")
    n = K.shape[0]
    cert = loone_certificate(K, eye(n), phi, search_witness=False, tol=tol)
    DK = defect(K, tol)
    s, c = sincos(phi)
    Ct, t_ok = consistent_sandwich(DK, 2 * (c / s) * imag_part(K), DK, tol)
    resid = op_norm(K @ adj(K) - adj(K) @ K)
    normal = resid <= NORMAL_TOL * (1 + op_norm(K) ** 2)
    eig, vecs = np.linalg.eig(K)
    regions = [region_classify(z, phi) for z in eig]
    boundary = all(r not in (Region.INTERIOR, Region.EXTERIOR) for r in regions)
    normal_boundary = bool(normal and boundary)
    diagonalizable = n == 0 or np.linalg.matrix_rank(vecs, tol=1e-8) == n
    pp_check = bool(normal) if (boundary and diagonalizable) else None
    if cert.verdict is Verdict.EXTREME_CERTIFIED or normal_boundary:
        verdict = Verdict.EXTREME_CERTIFIED
    else:
        verdict = Verdict.UNDECIDED
        if search_witness:
            w = interior_witness(K, eye(n), phi, tol=tol)
            if w is not None:
                verdict = Verdict.NOT_EXTREME
                cert.witness = w
    return CphiExtremeReport(
        cert, herm_part(Ct), bool(t_ok), float(resid), bool(normal), regions,
        bool(boundary), normal_boundary, pp_check, verdict,
    )


# ---------------------------------------------------------------------------
# extreme completions


@dataclass
class CompletionExtremeReport:
    certificate: ExtremeCertificate
    identities: dict[str, float]
    verdict: Verdict


IDENTITY_TOL = 1e-8


def completion_extreme(pair: DualPair, phi: float, K, search_witness: bool = True, tol: Tolerances | None = None):
    """Extremality of the completion ``T_K`` inside the set of C(phi) completions.

    ``T_K`` is extreme exactly when the compressed ``K`` is extreme in the
    loone ``L(Q; phi)`` of the pair, so the loone certificate is applied to
    ``K`` and ``Q`` written in bases of ``ran D_U`` and ``ran D_{V*}``.
    """
    tol = _tol(tol)
    _, ok = sectorial_complete(pair, phi, K, tol)
    if not ok:
        raise NotInLoone("K is outside the sectorial hole of the pair")
    Q, consistent = q_operator(pair, tol)
    if not consistent:
        raise InconsistentQ("Q is undefined for this pair")
    Kc, Qc = compress_k(pair, K, tol), compress_k(pair, Q, tol)
    if Kc.size == 0:
        cert = ExtremeCertificate(Kc, Kc, True, True, Verdict.EXTREME_CERTIFIED)
        return CompletionExtremeReport(cert, {}, Verdict.EXTREME_CERTIFIED)
    cert = loone_certificate(Kc, Qc, phi, search_witness=search_witness, tol=tol)
    ids = isometric_shift_identities(Kc, Qc, phi)
    verdict = cert.verdict
    if verdict is not Verdict.EXTREME_CERTIFIED and min(ids.values()) <= IDENTITY_TOL:
        verdict = Verdict.EXTREME_CERTIFIED
    return CompletionExtremeReport(cert, ids, verdict)


def perturbation_probe(K, Q, phi: float, eps: float = 1e-3, directions: int = 50, seed: int = 0):
    """Heuristic: fraction of random directions ``E`` with ``K +- eps E`` both in the loone.

    For an extreme point this fraction is typically zero, but the probe only
    tests a necessary condition and never upgrades a verdict.
    """
    rng = np.random.default_rng(seed)
    K, Q = as_matrix(K), as_matrix(Q)
    hits = 0
    for _ in range(directions):
        E = rng.standard_normal(K.shape) + 1j * rng.standard_normal(K.shape)
        E *= eps / op_norm(E)
        if in_loone(K + E, Q, phi, slack=0.0) and in_loone(K - E, Q, phi, slack=0.0):
            hits += 1
    return hits / directions
