"""Dense complex linear-algebra kernel.

Matrices are plain ``numpy`` arrays of dtype ``complex128``. Everything here
is a pure function of its inputs; the only shared state is the tolerance
default, which lives in a :mod:`contextvars` variable so that the CLI can
override it for a whole command without threading it through every call.
"""

from __future__ import annotations

import contextlib
import contextvars
import os
from dataclasses import dataclass
from typing import Iterator, NamedTuple

import numpy as np

from .errors import NonHermitian, NotContraction, NotPSD, OpExtError


@dataclass(frozen=True)
class Tolerances:
    """Numerical thresholds shared by all modules.

    rank_tol
        Singular values below ``rank_tol * s_max`` count as zero.
    psd_tol
        Eigenvalues in ``[-psd_tol, 0]`` are clipped to zero.
    norm_slack
        "Contraction" means operator norm ``<= 1 + norm_slack``.
    """

    rank_tol: float = 1e-10
    psd_tol: float = 1e-9
    norm_slack: float = 1e-9

    def __post_init__(self):
        for name in ("rank_tol", "psd_tol", "norm_slack"):
            value = getattr(self, name)
            if not np.isfinite(value) or value < 0:
                raise OpExtError(f"tolerance {name} must be a finite number >= 0, got {value!r}")

    @classmethod
    def from_env(cls, environ=None) -> "Tolerances":
        env = os.environ if environ is None else environ
        kwargs = {}
        for var, name in (
            ("OPEXT_TOL_RANK", "rank_tol"),
            ("OPEXT_TOL_PSD", "psd_tol"),
            ("OPEXT_NORM_SLACK", "norm_slack"),
        ):
            if env.get(var):
                kwargs[name] = float(env[var])
        return cls(**kwargs)


_TOLERANCES: contextvars.ContextVar[Tolerances] = contextvars.ContextVar(
    "opext_tolerances", default=Tolerances()
)


def current_tolerances() -> Tolerances:
    return _TOLERANCES.get()


@contextlib.contextmanager
def use_tolerances(tol: Tolerances) -> Iterator[Tolerances]:
    """Temporarily make ``tol`` the default for every call in this context."""
    token = _TOLERANCES.set(tol)
    try:
        yield tol
    finally:
        _TOLERANCES.reset(token)


def _tol(tol: Tolerances | None) -> Tolerances:
    return current_tolerances() if tol is None else tol


class Inertia(NamedTuple):
    n_neg: int
    n_zero: int
    n_pos: int


# ---------------------------------------------------------------------------
# coercion and small helpers


def as_matrix(A) -> np.ndarray:
    """Coerce scalars, nested lists and arrays to a finite 2-D complex array."""
    M = np.asarray(A, dtype=np.complex128)
    if M.ndim == 0:
        M = M.reshape(1, 1)
    elif M.ndim == 1:
        M = M.reshape(1, -1)
    elif M.ndim != 2:
        raise OpExtError(f"expected a matrix, got array of shape {M.shape}")
    if not np.all(np.isfinite(M)):
        raise OpExtError("matrix has non-finite entries")
    return M


def adj(A: np.ndarray) -> np.ndarray:
    return A.conj().T


def herm_part(A: np.ndarray) -> np.ndarray:
    """Real part ``(A + A*)/2``."""
    return 0.5 * (A + adj(A))


def imag_part(A: np.ndarray) -> np.ndarray:
    """Imaginary part ``(A - A*)/(2i)``, a Hermitian matrix."""
    return (A - adj(A)) / 2j


def eye(n: int) -> np.ndarray:
    return np.eye(n, dtype=np.complex128)


def op_norm(A) -> float:
    """Spectral norm (largest singular value); 0 for empty matrices."""
    A = np.asarray(A)
    if A.size == 0:
        return 0.0
    return float(np.linalg.norm(A, 2))


def is_contraction(A, tol: Tolerances | None = None) -> bool:
    return op_norm(A) <= 1.0 + _tol(tol).norm_slack


def _check_hermitian(H: np.ndarray, tol: Tolerances) -> None:
    if H.shape[0] != H.shape[1]:
        raise NonHermitian(f"matrix of shape {H.shape} is not square")
    if op_norm(H - adj(H)) > tol.psd_tol * (1.0 + op_norm(H)):
        raise NonHermitian("matrix is not Hermitian within psd_tol")


# ---------------------------------------------------------------------------
# spectral machinery


def _normalize_phases(V: np.ndarray) -> np.ndarray:
    V = V.copy()
    for j in range(V.shape[1]):
        col = V[:, j]
        idx = np.flatnonzero(np.abs(col) > 1e-8)
        if idx.size:
            z = col[idx[0]]
            V[:, j] = col * (abs(z) / z)
    return V


def herm_eig(H, tol: Tolerances | None = None) -> tuple[np.ndarray, np.ndarray]:
    """Eigen-decomposition of a Hermitian matrix.

    Returns eigenvalues in descending order and a unitary matrix of
    eigenvectors whose first non-negligible entry is real and positive.
    LAPACK's ``heevd`` is deterministic for a fixed input, which keeps golden
    tests reproducible.

    Raises
    ------
    NonHermitian
        If ``||H - H*|| > psd_tol * (1 + ||H||)``.
    """
    tol = _tol(tol)
    H = as_matrix(H)
    _check_hermitian(H, tol)
    w, V = np.linalg.eigh(herm_part(H))
    order = np.argsort(-w, kind="stable")
    return w[order], _normalize_phases(V[:, order])


def _psd_eig(H, tol: Tolerances) -> tuple[np.ndarray, np.ndarray]:
    w, V = herm_eig(H, tol)
    if w.size and w.min() < -tol.psd_tol * max(1.0, abs(w).max()):
        raise NotPSD(f"smallest eigenvalue {w.min():.3e} is below -psd_tol")
    return np.clip(w, 0.0, None), V


def _root_eig(H, tol: Tolerances) -> tuple[np.ndarray, np.ndarray]:
    # eigenvalues below rank_tol * max are rounding noise of a singular H;
    # zeroing them before the square root keeps their O(sqrt(eps)) roots out
    # of every later pseudoinverse
    w, V = _psd_eig(H, tol)
    if w.size:
        w = np.where(w > tol.rank_tol * w.max(), w, 0.0)
    return np.sqrt(w), V


def psd_sqrt(H, tol: Tolerances | None = None) -> np.ndarray:
    """Principal square root of a PSD matrix, clipping tiny negative eigenvalues."""
    r, V = _root_eig(H, _tol(tol))
    return herm_part((V * r) @ adj(V))


def psd_inv_sqrt(H, tol: Tolerances | None = None) -> np.ndarray:
    """Moore-Penrose inverse of ``psd_sqrt(H)`` computed from one eigensolve."""
    r, V = _root_eig(H, _tol(tol))
    inv = np.where(r > 0, 1.0 / np.where(r > 0, r, 1.0), 0.0)
    return herm_part((V * inv) @ adj(V))


def defect(T, tol: Tolerances | None = None) -> np.ndarray:
    """Defect operator ``D_T = (I - T*T)^{1/2}`` of a contraction."""
    tol = _tol(tol)
    T = as_matrix(T)
    if op_norm(T) > 1.0 + tol.norm_slack:
        raise NotContraction(f"||T|| = {op_norm(T):.12g} exceeds 1")
    return psd_sqrt(eye(T.shape[1]) - adj(T) @ T, tol)


def defect_adj(T, tol: Tolerances | None = None) -> np.ndarray:
    """``D_{T*} = (I - TT*)^{1/2}``."""
    return defect(adj(as_matrix(T)), tol)


def pinv(A, tol: Tolerances | None = None) -> np.ndarray:
    """Moore-Penrose pseudoinverse with a relative rank cut ``rank_tol * s_max``."""
    tol = _tol(tol)
    A = as_matrix(A)
    if A.size == 0:
        return np.zeros((A.shape[1], A.shape[0]), dtype=np.complex128)
    U, s, Vh = np.linalg.svd(A, full_matrices=False)
    cut = tol.rank_tol * s[0]
    keep = s > cut
    return (adj(Vh[keep]) / s[keep]) @ adj(U[:, keep])


def range_basis(A, tol: Tolerances | None = None) -> np.ndarray:
    """Orthonormal basis (as columns) of the column space of ``A``."""
    tol = _tol(tol)
    A = as_matrix(A)
    if A.size == 0:
        return np.zeros((A.shape[0], 0), dtype=np.complex128)
    U, s, _ = np.linalg.svd(A, full_matrices=False)
    return U[:, s > tol.rank_tol * s[0]] if s[0] > 0 else U[:, :0]


def range_projector(A, tol: Tolerances | None = None) -> np.ndarray:
    B = range_basis(A, tol)
    return B @ adj(B)


def rank(A, tol: Tolerances | None = None) -> int:
    return range_basis(A, tol).shape[1]


SANDWICH_RTOL = 1e-8


def consistent_sandwich(L, M, R, tol: Tolerances | None = None) -> tuple[np.ndarray, bool]:
    """Solve ``L X R = M`` in the least-squares / minimal-norm sense.

    Returns ``X = L^+ M R^+`` and whether it actually reproduces ``M`` to
    ``1e-8 * (1 + ||M||)``. By construction the column space of ``X`` lies in
    ``ran L*`` and its row space in ``ran R``; for Hermitian ``L``, ``R`` these
    are the ranges of ``L`` and ``R``.
    """
    L, M, R = as_matrix(L), as_matrix(M), as_matrix(R)
    if L.shape[0] != M.shape[0] or R.shape[1] != M.shape[1]:
        raise OpExtError(f"sandwich shapes {L.shape} . X . {R.shape} vs {M.shape} do not conform")
    X = pinv(L, tol) @ M @ pinv(R, tol)
    resid = op_norm(L @ X @ R - M)
    return X, bool(resid <= SANDWICH_RTOL * (1.0 + op_norm(M)))


def inertia(H, tol: Tolerances | None = None) -> Inertia:
    """Counts of negative, (numerically) zero and positive eigenvalues."""
    tol = _tol(tol)
    H = as_matrix(H)
    w, _ = herm_eig(H, tol)
    band = tol.psd_tol * (1.0 + op_norm(H))
    n_neg = int(np.sum(w < -band))
    n_pos = int(np.sum(w > band))
    return Inertia(n_neg, w.size - n_neg - n_pos, n_pos)


def n_neg(H, tol: Tolerances | None = None) -> int:
    return inertia(H, tol).n_neg


def min_eig(H) -> float:
    H = np.asarray(H)
    if H.shape[0] == 0:
        return np.inf
    return float(np.linalg.eigvalsh(herm_part(H))[0])


def is_psd(H, tol: Tolerances | None = None) -> bool:
    tol = _tol(tol)
    return min_eig(H) >= -tol.psd_tol * (1.0 + op_norm(H))


# ---------------------------------------------------------------------------
# partial isometries


def polar(A, tol: Tolerances | None = None) -> tuple[np.ndarray, np.ndarray]:
    """Polar decomposition ``A = W P`` with ``W*W`` the projection onto ``ran P``."""
    tol = _tol(tol)
    A = as_matrix(A)
    n = A.shape[1]
    if A.size == 0:
        return np.zeros_like(A), np.zeros((n, n), dtype=np.complex128)
    U, s, Vh = np.linalg.svd(A, full_matrices=False)
    keep = s > tol.rank_tol * s[0] if s[0] > 0 else np.zeros_like(s, dtype=bool)
    W = U[:, keep] @ Vh[keep]
    P = herm_part((adj(Vh) * s) @ Vh)
    return W, P


PI_ATOL = 1e-8


def is_partial_isometry(W, atol: float = PI_ATOL) -> bool:
    W = as_matrix(W)
    G = adj(W) @ W
    return op_norm(G @ G - G) <= atol


def is_maximal_partial_isometry(W, atol: float = PI_ATOL) -> bool:
    """True when ``W*W = I`` or ``WW* = I`` (an isometry or a co-isometry)."""
    W = as_matrix(W)
    m, n = W.shape
    return bool(
        op_norm(adj(W) @ W - eye(n)) <= atol or op_norm(W @ adj(W) - eye(m)) <= atol
    )


def convex_split(Q, tol: Tolerances | None = None, max_halvings: int = 60):
    """Write a non-extreme contraction as the midpoint of two distinct ones.

    Returns ``(K1, K2)`` with ``Q = (K1 + K2)/2``, ``K1 != K2`` and both
    contractions, or ``None`` when ``Q`` is a maximal partial isometry (an
    extreme point of the unit ball). The perturbation direction is
    ``D_{Q*} X D_Q``, which vanishes on the vectors where ``Q`` is isometric, so
    a small enough step stays inside the ball.
    """
    tol = _tol(tol)
    Q = as_matrix(Q)
    if is_maximal_partial_isometry(Q):
        return None
    m, n = Q.shape
    DQ = psd_sqrt(eye(n) - adj(Q) @ Q, tol)
    DQs = psd_sqrt(eye(m) - Q @ adj(Q), tol)
    bl, br = range_basis(DQs, tol), range_basis(DQ, tol)
    if bl.shape[1] == 0 or br.shape[1] == 0:
        return None
    E = DQs @ bl[:, :1] @ adj(br[:, :1]) @ DQ
    E = E / op_norm(E)
    eps = 1.0
    for _ in range(max_halvings):
        if op_norm(Q + eps * E) <= 1.0 and op_norm(Q - eps * E) <= 1.0:
            return Q + eps * E, Q - eps * E
        eps *= 0.5
    return None
