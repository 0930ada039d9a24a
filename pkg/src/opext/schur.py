"""Schur complements, negative indices of completions and shorted operators.

For a square matrix ``T`` and an angle ``phi`` the four Hermitian matrices

    G_+- = I - T*T -+ 2 cot(phi) Im T,    S_+- = I - TT* -+ 2 cot(phi) Im T

satisfy ``sin^2 G_+- = I - T_+-* T_+-`` and ``sin^2 S_+- = I - T_+- T_+-*`` with
``T_+- = T sin(phi) +- i cos(phi) I``. For a completion ``T_K`` of a
symmetric dual pair their Schur complements onto the second block are
``D_U (I - K_+-* K_+-) D_U / sin^2`` and ``D_{V*} (I - K_+- K_+-*) D_{V*} / sin^2``
with ``K_+- = K sin(phi) +- i Q cos(phi)``.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .completion import (
    DualPair,
    _hole_q,
    _require_symmetric,
    complete,
    compress_k,
)
from .errors import H11NotPSD, NotInClass, NotPSD, OpExtError, RangeViolation
from .matcore import (
    Tolerances,
    _tol,
    adj,
    as_matrix,
    eye,
    herm_part,
    imag_part,
    inertia,
    is_psd,
    min_eig,
    n_neg,
    op_norm,
    pinv,
    range_projector,
)
from .sector import in_cphi, sincos

FAST_PATH_EIG = 1e-6
RANGE_TOL = 1e-8


@dataclass
class DefectQuad:
    g_plus: np.ndarray
    g_minus: np.ndarray
    s_plus: np.ndarray
    s_minus: np.ndarray
    split: int


def defect_quad(T, phi: float, split: int) -> DefectQuad:
    """The four Hermitian matrices ``G_+-`` and ``S_+-`` of ``T`` at angle ``phi``."""
    T = as_matrix(T)
    n = T.shape[0]
    s, c = sincos(phi)
    if s == 0.0:
        raise OpExtError("phi must be positive")
    shift = 2 * (c / s) * imag_part(T)
    G = eye(n) - adj(T) @ T
    S = eye(n) - T @ adj(T)
    return DefectQuad(
        herm_part(G - shift), herm_part(G + shift),
        herm_part(S - shift), herm_part(S + shift), split,
    )


def blocks(H, split: int):
    H = as_matrix(H)
    return H[:split, :split], H[:split, split:], H[split:, :split], H[split:, split:]


def generalized_schur(H, split: int, tol: Tolerances | None = None) -> tuple[np.ndarray, bool]:
    """Complement ``H22 - S*S`` with ``S = (H11^{1/2})^+ H12``.

    ``range_ok`` reports whether ``ran H12`` lies in ``ran H11^{1/2}``, which
    is what makes ``S`` reproduce ``H12``. A plain inverse is used when ``H11``
    is comfortably positive definite.

    Raises
    ------
    H11NotPSD
        If the leading block has an eigenvalue below ``-psd_tol``.
    """
    tol = _tol(tol)
    H11, H12, H21, H22 = blocks(herm_part(as_matrix(H)), split)
    if split == 0:
        return H22, True
    lam = min_eig(H11)
    if lam > FAST_PATH_EIG:
        return herm_part(H22 - H21 @ np.linalg.solve(H11, H12)), True
    if not is_psd(H11, tol):
        raise H11NotPSD("leading block is not positive semidefinite")
    # the rank cut is applied to the eigenvalues of H11, not to their roots,
    # so rounding noise in a singular H11 is not amplified by 1/sqrt
    w, V = np.linalg.eigh(H11)
    keep = w > tol.rank_tol * max(w[-1], 0.0)
    Vk = V[:, keep]
    S = (adj(Vk) @ H12) / np.sqrt(w[keep])[:, None]
    range_ok = op_norm(H12 - Vk @ (adj(Vk) @ H12)) <= RANGE_TOL * (1 + op_norm(H12))
    return herm_part(H22 - adj(S) @ S), bool(range_ok)


def generalized_schur_lower(H, split: int, tol: Tolerances | None = None) -> tuple[np.ndarray, bool]:
    """Complement onto the leading block, pivoting on the trailing one."""
    H = as_matrix(H)
    n = H.shape[0]
    perm = np.r_[split:n, 0:split]
    return generalized_schur(H[np.ix_(perm, perm)], n - split, tol)


def _k_shifts(pair: DualPair, K, Q, phi: float, tol):
    """Full-size ``K_+-`` with ``K`` compressed to ``ran D_U -> ran D_{V*}``."""
    s, c = sincos(phi)
    Kt = range_projector(pair.d_v_adj, tol) @ as_matrix(K) @ range_projector(pair.d_u, tol)
    if Q is None:
        return s * Kt, s * Kt
    return s * Kt + 1j * c * Q, s * Kt - 1j * c * Q


@dataclass
class ComplementSides:
    residuals: dict[str, float]
    lhs: dict[str, np.ndarray]
    rhs: dict[str, np.ndarray]
    range_ok: bool

    @property
    def max_residual(self) -> float:
        return max(self.residuals.values())


def complement_sides(pair: DualPair, K, phi: float, tol: Tolerances | None = None) -> ComplementSides:
    """Both sides of the Schur-complement identities for ``G_+-`` and ``S_+-``.

    ``K`` may be any matrix (noncontractive allowed); the identities hold
    regardless of membership.
    """
    tol = _tol(tol)
    _require_symmetric(pair)
    Q = _hole_q(pair, phi, tol)
    T = complete(pair, K)
    p = pair.dims[0]
    s, _ = sincos(phi)
    quad = defect_quad(T, phi, p)
    kp, km = _k_shifts(pair, K, Q, phi, tol)
    DU, DV = pair.d_u, pair.d_v_adj
    q = DU.shape[0]
    lhs, rhs, res = {}, {}, {}
    ok = True
    for name, H, X, side in (
        ("G_plus", quad.g_plus, kp, "G"),
        ("G_minus", quad.g_minus, km, "G"),
        ("S_plus", quad.s_plus, kp, "S"),
        ("S_minus", quad.s_minus, km, "S"),
    ):
        comp, r_ok = generalized_schur(H, p, tol)
        ok = ok and r_ok
        lhs[name] = s**2 * comp
        if side == "G":
            rhs[name] = DU @ (eye(q) - adj(X) @ X) @ DU
        else:
            rhs[name] = DV @ (eye(q) - X @ adj(X)) @ DV
        scale = 1.0 + op_norm(rhs[name])
        res[name] = op_norm(lhs[name] - rhs[name]) / scale
    return ComplementSides(res, lhs, rhs, ok)


def complement_residuals(pair: DualPair, K, phi: float, tol: Tolerances | None = None):
    """Relative residuals ``(G_plus, G_minus, S_plus, S_minus)`` of the identities."""
    r = complement_sides(pair, K, phi, tol).residuals
    return r["G_plus"], r["G_minus"], r["S_plus"], r["S_minus"]


@dataclass
class KappaReport:
    kappa_T: tuple[int, int]
    kappa_K: tuple[int, int]
    agree: bool


def kappa_classify(pair: DualPair, K, phi: float, tol: Tolerances | None = None) -> KappaReport:
    """Negative indices of ``I - T_+-* T_+-`` versus those of ``I - K_+-* K_+-``.

    ``K_+-`` is taken on ``ran D_U -> ran D_{V*}`` so that its size matches the
    part of the space the completion actually sees.
    """
    tol = _tol(tol)
    _require_symmetric(pair)
    Q = _hole_q(pair, phi, tol)
    T = complete(pair, K)
    rep = in_cphi(T, phi, tol)
    if rep.in_class:
        kT = (0, 0)
    else:
        n = T.shape[0]
        s, c = sincos(phi)
        kT = tuple(
            n_neg(eye(n) - adj(X) @ X, tol)
            for X in (s * T + 1j * c * eye(n), s * T - 1j * c * eye(n))
        )
    s, c = sincos(phi)
    Kc = compress_k(pair, K, tol)
    Qc = compress_k(pair, Q, tol) if Q is not None else np.zeros_like(Kc)
    m = Kc.shape[1]
    kK = tuple(
        n_neg(eye(m) - adj(X) @ X, tol) if m else 0
        for X in (s * Kc + 1j * c * Qc, s * Kc - 1j * c * Qc)
    )
    return KappaReport(kT, kK, kT == kK)


# ---------------------------------------------------------------------------
# shorted operators


def _check_psd(A, tol: Tolerances) -> np.ndarray:
    A = herm_part(as_matrix(A))
    if not is_psd(A, tol):
        raise NotPSD("matrix is not positive semidefinite")
    return A


def shorted(A, split: int, tol: Tolerances | None = None) -> np.ndarray:
    """Shorted operator onto the trailing block: ``diag(0, A22 - S*S)``."""
    tol = _tol(tol)
    A = _check_psd(A, tol)
    comp, _ = generalized_schur(A, split, tol)
    out = np.zeros_like(A)
    out[split:, split:] = comp
    return out


def shorted_variational(A, split: int, f, tol: Tolerances | None = None) -> float:
    """``min over g in the leading block of (A(f - g), f - g)`` by least squares.

    The minimiser solves the normal equations ``A11 x = (A f)_1``; the
    minimal-norm solution is taken with a pseudoinverse.
    """
    tol = _tol(tol)
    A = _check_psd(A, tol)
    f = np.asarray(f, dtype=np.complex128).reshape(-1)
    x = pinv(A[:split, :split], tol) @ (A @ f)[:split]
    h = f.copy()
    h[:split] -= x
    return float(np.real(np.vdot(h, A @ h)))


@dataclass
class ShortedDefects:
    g_plus: np.ndarray
    g_minus: np.ndarray
    s_plus: np.ndarray
    s_minus: np.ndarray
    residual: float


def shorted_defects(pair: DualPair, K, phi: float, tol: Tolerances | None = None) -> ShortedDefects:
    """Closed forms of the shorted ``G_+-`` and ``S_+-`` of a C(phi) completion.

    The trailing corners are ``D_U (I - K_+-* K_+-) D_U / sin^2`` and
    ``D_{V*} (I - K_+- K_+-*) D_{V*} / sin^2``; ``residual`` is the largest
    deviation from shorting the four matrices directly.

    Raises
    ------
    NotInClass
        If the completion is not in C(phi) (the four matrices are then not PSD).
    """
    tol = _tol(tol)
    _require_symmetric(pair)
    Q = _hole_q(pair, phi, tol)
    T = complete(pair, K)
    if not in_cphi(T, phi, tol).in_class:
        raise NotInClass("the completion is not in C(phi)")
    p = pair.dims[0]
    n = T.shape[0]
    s, _ = sincos(phi)
    kp, km = _k_shifts(pair, K, Q, phi, tol)
    DU, DV = pair.d_u, pair.d_v_adj
    q = DU.shape[0]

    def embed(X):
        out = np.zeros((n, n), dtype=np.complex128)
        out[p:, p:] = X / s**2
        return out

    closed = {
        "g_plus": embed(DU @ (eye(q) - adj(kp) @ kp) @ DU),
        "g_minus": embed(DU @ (eye(q) - adj(km) @ km) @ DU),
        "s_plus": embed(DV @ (eye(q) - kp @ adj(kp)) @ DV),
        "s_minus": embed(DV @ (eye(q) - km @ adj(km)) @ DV),
    }
    quad = defect_quad(T, phi, p)
    loose = Tolerances(tol.rank_tol, max(tol.psd_tol, 1e-8), tol.norm_slack)
    direct = {
        "g_plus": shorted(quad.g_plus, p, loose),
        "g_minus": shorted(quad.g_minus, p, loose),
        "s_plus": shorted(quad.s_plus, p, loose),
        "s_minus": shorted(quad.s_minus, p, loose),
    }
    residual = max(op_norm(closed[k] - direct[k]) for k in closed)
    return ShortedDefects(**closed, residual=residual)


def complement_inertia_check(T, split: int, tol: Tolerances | None = None) -> bool:
    """Check that ``T`` and its generalized Schur complement have equal negative index.

    Raises
    ------
    RangeViolation
        If ``ran T12`` is not inside ``ran T11^{1/2}``.
    """
    tol = _tol(tol)
    T = herm_part(as_matrix(T))
    comp, ok = generalized_schur(T, split, tol)
    if not ok:
        raise RangeViolation("ran T12 is not contained in ran T11^{1/2}")
    return inertia(T, tol).n_neg == inertia(comp, tol).n_neg
