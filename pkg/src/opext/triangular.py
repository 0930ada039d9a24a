"""Completions of upper-triangular block matrices ``[[t11, *], [0, t22]]``.

Every contractive completion has ``t12 = D_{t11*} K D_{t22}`` with
``||K|| <= 1``. For blocks in C(phi), ``2 cot(phi) Im t11 = D_{t11*} U D_{t11*}``
and ``2 cot(phi) Im t22 = D_{t22} V D_{t22}`` define Hermitian contractions
``U``, ``V``, and the C(phi) completions are ``t12 = sin(phi) D_{t11*} K D_{t22}``
with ``(I -+ U)^{-1/2} K (I -+ V)^{-1/2}`` contractive for both signs.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DimensionMismatch, FactorsInconsistent, NotContraction, NotInCphi, OpExtError
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
    n_neg,
    op_norm,
    psd_sqrt,
    range_basis,
)
from .schur import generalized_schur, generalized_schur_lower
from .sector import in_cphi, sincos

MEMBER_TOL = 1e-8


@dataclass
class TriPair:
    t11: np.ndarray
    t22: np.ndarray
    phi: float | None = None

    def __post_init__(self):
        self.t11 = as_matrix(self.t11)
        self.t22 = as_matrix(self.t22)

    def validate(self, tol: Tolerances | None = None) -> "TriPair":
        tol = _tol(tol)
        for name in ("t11", "t22"):
            M = getattr(self, name)
            if op_norm(M) > 1 + tol.norm_slack:
                raise NotContraction(f"{name} is not a contraction")
            if self.phi is not None and not in_cphi(M, self.phi, tol).in_class:
                raise NotInCphi(f"{name} is not in C(phi)")
        return self

    @property
    def k_shape(self) -> tuple[int, int]:
        return self.t11.shape[0], self.t22.shape[1]


def _assemble(tp: TriPair, t12: np.ndarray) -> np.ndarray:
    zero = np.zeros((tp.t22.shape[0], tp.t11.shape[1]), dtype=np.complex128)
    return np.block([[tp.t11, t12], [zero, tp.t22]])


def _check_k(tp: TriPair, K) -> np.ndarray:
    K = as_matrix(K)
    if K.shape != tp.k_shape:
        raise DimensionMismatch(f"K must have shape {tp.k_shape}, got {K.shape}")
    return K


def tri_complete(tp: TriPair, K, tol: Tolerances | None = None) -> np.ndarray:
    """``[[t11, D_{t11*} K D_{t22}], [0, t22]]``."""
    tp.validate(tol)
    K = _check_k(tp, K)
    return _assemble(tp, defect_adj(tp.t11, tol) @ K @ defect(tp.t22, tol))


def tri_recover_k(tp: TriPair, T, tol: Tolerances | None = None) -> tuple[np.ndarray, bool]:
    """Parameter ``K`` of an upper-triangular matrix with the given diagonal blocks."""
    T = as_matrix(T)
    a, b = tp.t11.shape
    return consistent_sandwich(defect_adj(tp.t11, tol), T[:a, b:], defect(tp.t22, tol), tol)


def compress_tri_k(tp: TriPair, K, tol: Tolerances | None = None) -> np.ndarray:
    """``K`` as a map ``ran D_{t22} -> ran D_{t11*}`` in orthonormal bases."""
    bl = range_basis(defect_adj(tp.t11, tol), tol)
    br = range_basis(defect(tp.t22, tol), tol)
    return adj(bl) @ as_matrix(K) @ br


def tri_identities(tp: TriPair, K, tol: Tolerances | None = None) -> tuple[float, float]:
    """Residuals of the Schur-complement identities of a triangular completion.

    ``I - T*T`` pivoted on its leading block leaves ``D_{t22}(I - K*K)D_{t22}``;
    ``I - TT*`` pivoted on its trailing block leaves ``D_{t11*}(I - KK*)D_{t11*}``.
    ``K`` may be noncontractive. Residuals are relative to ``1 + ||rhs||``.
    """
    tol = _tol(tol)
    K = _check_k(tp, K)
    Dl, Dr = defect_adj(tp.t11, tol), defect(tp.t22, tol)
    T = _assemble(tp, Dl @ K @ Dr)
    m, n = T.shape
    a, b = tp.t11.shape
    G = eye(n) - adj(T) @ T
    S = eye(m) - T @ adj(T)
    g_comp, _ = generalized_schur(G, b, tol)
    s_comp, _ = generalized_schur_lower(S, a, tol)
    g_rhs = Dr @ (eye(K.shape[1]) - adj(K) @ K) @ Dr
    s_rhs = Dl @ (eye(K.shape[0]) - K @ adj(K)) @ Dl
    return (
        op_norm(g_comp - g_rhs) / (1 + op_norm(g_rhs)),
        op_norm(s_comp - s_rhs) / (1 + op_norm(s_rhs)),
    )


def tri_kappa(tp: TriPair, K, tol: Tolerances | None = None) -> tuple[int, int]:
    """Negative indices of ``I - T*T`` and of ``I - K*K`` (``K`` compressed)."""
    tol = _tol(tol)
    T = tri_complete(tp, K, tol)
    Kc = compress_tri_k(tp, K, tol)
    kT = n_neg(eye(T.shape[1]) - adj(T) @ T, tol)
    kK = n_neg(eye(Kc.shape[1]) - adj(Kc) @ Kc, tol) if Kc.size else 0
    return kT, kK


@dataclass
class ShmulyanFactors:
    u_phi: np.ndarray
    v_phi: np.ndarray
    consistent: bool


def shmulyan_factors(tp: TriPair, tol: Tolerances | None = None) -> ShmulyanFactors:
    """Hermitian contractions ``U``, ``V`` factoring the imaginary parts of the blocks."""
    tol = _tol(tol)
    if tp.phi is None:
        raise OpExtError("an angle is required")
    tp.validate(tol)
    s, c = sincos(tp.phi)
    if s == 0.0:
        raise OpExtError("phi must be positive")
    Dl, Dr = defect_adj(tp.t11, tol), defect(tp.t22, tol)
    U, ok_u = consistent_sandwich(Dl, 2 * (c / s) * imag_part(tp.t11), Dl, tol)
    V, ok_v = consistent_sandwich(Dr, 2 * (c / s) * imag_part(tp.t22), Dr, tol)
    return ShmulyanFactors(herm_part(U), herm_part(V), bool(ok_u and ok_v))


def shmulyan_radius_residual(tp: TriPair, tol: Tolerances | None = None) -> float:
    """Residual of ``I - B_-+ B_-+* = sin^2 D_{t11*}(I +- U) D_{t11*}``, ``B_+- = t11 sin +- i cos``."""
    tol = _tol(tol)
    f = shmulyan_factors(tp, tol)
    s, c = sincos(tp.phi)
    a = tp.t11.shape[0]
    Dl = defect_adj(tp.t11, tol)
    worst = 0.0
    for sign in (+1, -1):
        B = s * tp.t11 - sign * 1j * c * eye(a)
        lhs = eye(a) - B @ adj(B)
        rhs = s**2 * Dl @ (eye(a) + sign * f.u_phi) @ Dl
        worst = max(worst, op_norm(lhs - rhs))
    return worst


def _shmulyan_condition(tp: TriPair, K, f: ShmulyanFactors, tol: Tolerances) -> bool:
    bl = range_basis(defect_adj(tp.t11, tol), tol)
    br = range_basis(defect(tp.t22, tol), tol)
    Kc = adj(bl) @ K @ br
    if Kc.size == 0:
        return True
    Uc = adj(bl) @ f.u_phi @ bl
    Vc = adj(br) @ f.v_phi @ br
    for sign in (+1, -1):
        L = psd_sqrt(eye(Uc.shape[0]) - sign * Uc, tol)
        R = psd_sqrt(eye(Vc.shape[0]) - sign * Vc, tol)
        X, ok = consistent_sandwich(L, Kc, R, tol)
        if not ok or op_norm(X) > 1 + MEMBER_TOL:
            return False
    return True


def shmulyan_complete(tp: TriPair, K, tol: Tolerances | None = None) -> tuple[np.ndarray, bool]:
    """C(phi) completion ``t12 = sin(phi) D_{t11*} K D_{t22}`` and its membership verdict.

    The verdict is decided on the parameter side: both
    ``(I -+ U)^{-1/2} K (I -+ V)^{-1/2}`` must exist and be contractions, where
    the inverse roots are pseudoinverses and existence means ``K`` vanishes on
    the directions they cannot reach.

    Raises
    ------
    FactorsInconsistent
        If the imaginary parts of the blocks do not factor through their defects.
    """
    tol = _tol(tol)
    f = shmulyan_factors(tp, tol)
    if not f.consistent:
        raise FactorsInconsistent("Im t11 or Im t22 does not factor through the defect")
    K = _check_k(tp, K)
    s, _ = sincos(tp.phi)
    T = _assemble(tp, s * defect_adj(tp.t11, tol) @ K @ defect(tp.t22, tol))
    return T, _shmulyan_condition(tp, K, f, tol)


def shmulyan_recover_k(tp: TriPair, T, tol: Tolerances | None = None) -> tuple[np.ndarray, bool]:
    """Parameter ``K`` of a triangular matrix in the Shmul'yan parametrization."""
    K, ok = tri_recover_k(tp, T, tol)
    s, _ = sincos(tp.phi)
    return K / s, ok


def shmulyan_condition(tp: TriPair, K, tol: Tolerances | None = None) -> bool:
    tol = _tol(tol)
    return _shmulyan_condition(tp, as_matrix(K), shmulyan_factors(tp, tol), tol)
