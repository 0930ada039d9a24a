"""C(phi) contraction classes, sectorial matrices and the Cayley transform.

A square matrix ``T`` lies in the class C(phi) when both shifted matrices
``T sin(phi) + i cos(phi) I`` and ``T sin(phi) - i cos(phi) I`` are
contractions. For ``phi = 0`` the class is the set of Hermitian contractions
and for ``phi = pi/2`` it is the whole unit ball.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum

import numpy as np

from .errors import OpExtError, SingularShift
from .matcore import (
    Tolerances,
    _tol,
    adj,
    as_matrix,
    eye,
    herm_part,
    imag_part,
    is_psd,
    n_neg,
    op_norm,
)


@dataclass
class ClassReport:
    """Verdict of a class-membership test.

    ``margin`` is ``1 - max(||T_+||, ||T_-||)``; negative values mean the
    matrix lies outside the class. ``kappa_plus`` and ``kappa_minus`` count the
    negative eigenvalues of ``I - T_+* T_+`` and ``I - T_-* T_-``.
    """

    in_class: bool
    margin: float
    kappa_plus: int
    kappa_minus: int


def sincos(phi: float) -> tuple[float, float]:
    """``(sin phi, cos phi)`` with exact values at the endpoints 0 and pi/2."""
    if phi == 0.0:
        return 0.0, 1.0
    if phi == math.pi / 2:
        return 1.0, 0.0
    return math.sin(phi), math.cos(phi)


def _check_angle(phi: float, lo_open: bool = False, hi_open: bool = False) -> float:
    phi = float(phi)
    if not np.isfinite(phi) or phi < 0 or phi > math.pi / 2 + 1e-15:
        raise OpExtError(f"angle must lie in [0, pi/2], got {phi!r}")
    if lo_open and phi == 0:
        raise OpExtError("angle must be positive")
    if hi_open and phi >= math.pi / 2:
        raise OpExtError("angle must be smaller than pi/2")
    return min(phi, math.pi / 2)


def shifted(T, phi: float, sign: int) -> np.ndarray:
    """``T sin(phi) + sign * i cos(phi) I``."""
    T = as_matrix(T)
    s, c = sincos(phi)
    return s * T + sign * 1j * c * eye(T.shape[0])


SMALL_ANGLE_SIN = 1e-4


def class_slack(phi: float, tol: Tolerances | None = None) -> float:
    """Allowed excess of ``||T sin(phi) +- i cos(phi) I||`` over 1.

    ``I - T_+-* T_+- = sin^2 (I - T*T -+ 2 cot Im T)``, so a norm excess ``d``
    is a violation of order ``d / sin^2`` of the forms in ``T``. Scaling the
    slack by ``sin^2`` keeps the tolerance fixed at the level of ``T``, which
    makes the tolerant class grow monotonically with ``phi`` like the exact one.
    """
    s, _ = sincos(phi)
    return _tol(tol).norm_slack * s**2


def in_cphi(T, phi: float, tol: Tolerances | None = None, kappas: bool = True) -> ClassReport:
    """Membership of a square matrix in C(phi), with negative indices.

    With ``kappas=False`` the negative indices of a non-member are not
    computed and reported as ``-1``.
    """
    tol = _tol(tol)
    T = as_matrix(T)
    phi = _check_angle(phi)
    n = T.shape[0]
    if T.shape[1] != n:
        raise OpExtError("C(phi) membership needs a square matrix")
    if phi == 0.0:
        herm_err = op_norm(T - adj(T))
        margin = min(1.0 - op_norm(T), -herm_err)
        in_class = margin >= -tol.norm_slack
        if in_class:
            return ClassReport(True, margin, 0, 0)
        if not kappas:
            return ClassReport(False, margin, -1, -1)
        k = n_neg(eye(n) - herm_part(T) @ herm_part(T), tol)
        return ClassReport(False, margin, k, k)
    Tp, Tm = shifted(T, phi, +1), shifted(T, phi, -1)
    s, c = sincos(phi)
    if s >= SMALL_ANGLE_SIN:
        margin = 1.0 - max(op_norm(Tp), op_norm(Tm))
    else:
        # ||T sin +- i cos|| rounds to 1 for tiny angles; read the excess off
        # I - T_+-* T_+- = sin^2 (I - T*T) -+ 2 sin cos Im T instead
        base = s**2 * (eye(n) - adj(T) @ T)
        TI = imag_part(T)
        lam = min(np.linalg.eigvalsh(herm_part(base - sg * 2 * s * c * TI))[0] for sg in (+1, -1))
        # 1 - sqrt(1 - lam) without cancellation
        margin = lam / (1.0 + math.sqrt(max(0.0, 1.0 - lam)))
    if margin >= -class_slack(phi, tol):
        return ClassReport(True, margin, 0, 0)
    if not kappas:
        return ClassReport(False, margin, -1, -1)
    kp = n_neg(eye(n) - adj(Tp) @ Tp, tol)
    km = n_neg(eye(n) - adj(Tm) @ Tm, tol)
    return ClassReport(False, margin, kp, km)


def cphi_margins(stack, phi: float) -> np.ndarray:
    """``1 - max ||T sin(phi) +- i cos(phi) I||`` for a stack of square matrices.

    Batched through the eigenvalues of ``sin^2 T*T + cos^2 I -+ 2 sin cos Im T``,
    which are the squared singular values of the two shifts.
    """
    stack = np.asarray(stack, dtype=np.complex128)
    if stack.ndim == 2:
        stack = stack[None]
    s, c = sincos(_check_angle(phi))
    n = stack.shape[-1]
    Ts = np.conj(np.swapaxes(stack, -1, -2))
    base = s**2 * (Ts @ stack) + c**2 * np.eye(n)
    im = (stack - Ts) / 2j
    top = np.maximum(
        np.linalg.eigvalsh(base - 2 * s * c * im)[..., -1],
        np.linalg.eigvalsh(base + 2 * s * c * im)[..., -1],
    )
    return 1.0 - np.sqrt(np.maximum(top, 0.0))


def imag_bound_check(T, phi: float, tol: Tolerances | None = None) -> bool:
    """Quadratic-form test ``I - T*T +- 2 cot(phi) Im T >= 0``.

    This is an independent route to C(phi) membership: ``I - T_+* T_+`` equals
    ``sin^2 (I - T*T) - 2 sin cos Im T``, so dividing by ``sin^2`` turns the
    norm test into two semidefiniteness tests. The PSD threshold is the image
    of the :func:`class_slack` norm excess, so the two tests agree up to
    rounding.
    """
    tol = _tol(tol)
    T = as_matrix(T)
    phi = _check_angle(phi, lo_open=True)
    s, c = sincos(phi)
    n = T.shape[0]
    base = eye(n) - adj(T) @ T
    TI = imag_part(T)
    d = class_slack(phi, tol)
    thresh = -d * (2.0 + d) / s**2
    cot = c / s
    for sign in (+1, -1):
        H = herm_part(base + sign * 2 * cot * TI)
        if n and np.linalg.eigvalsh(H)[0] < thresh:
            return False
    return True


def is_sectorial(A, phi: float, tol: Tolerances | None = None) -> bool:
    """``Re A +- cot(phi) Im A >= 0``: the numerical range lies in the closed sector."""
    tol = _tol(tol)
    A = as_matrix(A)
    phi = _check_angle(phi, lo_open=True)
    s, c = sincos(phi)
    AR, AI = herm_part(A), imag_part(A)
    return all(is_psd(AR + sign * (c / s) * AI, tol) for sign in (+1, -1))


def _shift_inverse(A: np.ndarray, tol: Tolerances) -> np.ndarray:
    n = A.shape[0]
    if A.shape[1] != n:
        raise OpExtError("Cayley transform needs a square matrix")
    B = eye(n) + A
    if n == 0:
        return B
    smin = np.linalg.svd(B, compute_uv=False)[-1]
    if smin <= tol.rank_tol * max(1.0, op_norm(A)):
        raise SingularShift("-1 is an eigenvalue, I + A is singular")
    return np.linalg.solve(B, eye(n))


def cayley(A, tol: Tolerances | None = None) -> np.ndarray:
    """``X(A) = -I + 2 (I + A)^{-1}``."""
    tol = _tol(tol)
    A = as_matrix(A)
    return -eye(A.shape[0]) + 2.0 * _shift_inverse(A, tol)


def cayley_inv(T, tol: Tolerances | None = None) -> np.ndarray:
    """Inverse of :func:`cayley`; the map is an involution, so this is the same formula."""
    return cayley(T, tol)


class Region(str, Enum):
    INTERIOR = "interior"
    BOUNDARY_PLUS = "boundary_plus"
    BOUNDARY_MINUS = "boundary_minus"
    BOUNDARY_BOTH = "boundary_both"
    EXTERIOR = "exterior"


REGION_BAND = 1e-9


def region_classify(z: complex, phi: float) -> Region:
    """Locate a complex number relative to the lens ``|z sin +- i cos| <= 1``."""
    phi = _check_angle(phi, lo_open=True, hi_open=True)
    s, c = sincos(phi)
    dp = abs(z * s + 1j * c) - 1.0
    dm = abs(z * s - 1j * c) - 1.0
    if dp > REGION_BAND or dm > REGION_BAND:
        return Region.EXTERIOR
    on_p, on_m = abs(dp) <= REGION_BAND, abs(dm) <= REGION_BAND
    if on_p and on_m:
        return Region.BOUNDARY_BOTH
    if on_p:
        return Region.BOUNDARY_PLUS
    if on_m:
        return Region.BOUNDARY_MINUS
    return Region.INTERIOR


def sector_kappa(B, phi: float, tol: Tolerances | None = None) -> tuple[int, int]:
    """Negative indices of the forms ``Re(Bf,f) +- cot(phi) Im(Bf,f)``."""
    tol = _tol(tol)
    B = as_matrix(B)
    phi = _check_angle(phi, lo_open=True, hi_open=True)
    s, c = sincos(phi)
    BR, BI = herm_part(B), imag_part(B)
    return n_neg(BR + (c / s) * BI, tol), n_neg(BR - (c / s) * BI, tol)


def sectorial_sample(rng: np.random.Generator, n: int, phi: float) -> np.ndarray:
    """Random matrix whose numerical range lies in the closed sector of half-angle phi.

    Built as ``S* diag(r_j e^{i theta_j}) S`` with ``|theta_j| <= phi``; the
    congruence keeps every quadratic form value inside the sector.
    """
    S = rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))
    r = rng.uniform(0.1, 2.0, n)
    theta = rng.uniform(-phi, phi, n)
    return adj(S) @ np.diag(r * np.exp(1j * theta)) @ S


__all__ = [
    "ClassReport",
    "Region",
    "cayley",
    "cayley_inv",
    "in_cphi",
    "is_sectorial",
    "imag_bound_check",
    "region_classify",
    "sector_kappa",
    "sectorial_sample",
    "shifted",
    "sincos",
]
