"""Randomized verification suites.

Every check draws its instances from ``numpy.random.default_rng`` seeded with
``(seed + i, salt)`` for trial ``i`` and a per-check ``salt``, so a run is
reproducible from ``(seed, trials, dims)`` alone and trials are independent.
A check returns ``(ok, residual)`` per trial, or raises :class:`Skip` when the
random instance falls into an excluded degenerate case.
"""

from __future__ import annotations

import math
import zlib
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from . import balls, completion, extremal, matcore, schur, sector, triangular
from .matcore import Tolerances, adj, current_tolerances, eye, herm_part, op_norm
from .samplers import (
    gaussian,
    hermitian,
    hermitian_contraction,
    random_cphi,
    random_dims,
    random_pair,
    random_symmetric_pair,
    sample_norm,
    sample_psd,
    sample_unit_ball,
    strict_contraction,
    unitary,
)


class Skip(Exception):
    """The random instance is outside the scope of the check."""


@dataclass
class CheckResult:
    suite: str
    check: str
    trials: int
    failures: int
    skipped: int
    max_residual: float


@dataclass
class RunReport:
    command: str
    seed: int
    trials: int
    failures: int
    max_residual: float
    verdicts: list[CheckResult] = field(default_factory=list)
    tolerances: Tolerances = field(default_factory=Tolerances)


@dataclass
class Check:
    name: str
    fn: Callable[[np.random.Generator, int], tuple[bool, float]]
    # fixed checks are deterministic and run once regardless of --trials
    fixed: bool = False
    # fraction of the requested trials this check runs (expensive oracles)
    share: float = 1.0


SUITES: dict[str, list[Check]] = {}


def check(suite: str, fixed: bool = False, share: float = 1.0):
    def deco(fn):
        SUITES.setdefault(suite, []).append(Check(fn.__name__, fn, fixed, share))
        return fn

    return deco


def rel(a, b) -> float:
    return op_norm(a - b) / (1.0 + op_norm(b))


# ---------------------------------------------------------------------------
# matcore


@check("matcore")
def herm_eig_reconstruction(rng, dims):
    n = random_dims(rng, dims + 2)
    H = hermitian(rng, n)
    w, V = matcore.herm_eig(H)
    res = max(rel(V @ np.diag(w) @ adj(V), H), op_norm(adj(V) @ V - eye(n)))
    return bool(res <= 1e-12 * n and np.all(np.diff(w) <= 0)), res


@check("matcore")
def psd_sqrt_square(rng, dims):
    n = random_dims(rng, dims + 2)
    W = unitary(rng, n)
    d = rng.uniform(0, 9, n)
    R = matcore.psd_sqrt(W @ np.diag(d) @ adj(W))
    res = rel(R, W @ np.diag(np.sqrt(d)) @ adj(W))
    return res <= 1e-12 * n, res


@check("matcore")
def defect_intertwining(rng, dims):
    m, n = random_dims(rng, dims), random_dims(rng, dims)
    T = sample_unit_ball(rng, m, n)
    D, Ds = matcore.defect(T), matcore.defect_adj(T)
    res = max(op_norm(T @ D - Ds @ T), op_norm(D @ D + adj(T) @ T - eye(n)))
    return res <= 1e-10, res


@check("matcore")
def pinv_penrose(rng, dims):
    m, n = random_dims(rng, dims + 2), random_dims(rng, dims + 2)
    r = int(rng.integers(0, min(m, n) + 1))
    A = gaussian(rng, m, r) @ gaussian(rng, r, n)
    X = matcore.pinv(A)
    s = 1 + op_norm(A) * op_norm(X)
    res = max(
        op_norm(A @ X @ A - A) / (1 + op_norm(A)),
        op_norm(X @ A @ X - X) / (1 + op_norm(X)),
        op_norm(A @ X - adj(A @ X)) / s,
        op_norm(X @ A - adj(X @ A)) / s,
    )
    return res <= 1e-10, res


@check("matcore")
def sandwich_constructive(rng, dims):
    m, n = random_dims(rng, dims), random_dims(rng, dims)
    L = sample_psd(rng, m, int(rng.integers(1, m + 1)))
    R = sample_psd(rng, n, int(rng.integers(1, n + 1)))
    M = L @ gaussian(rng, m, n) @ R
    X, ok = matcore.consistent_sandwich(L, M, R)
    res = op_norm(L @ X @ R - M) / (1 + op_norm(M))
    return ok and res <= 1e-10, res


@check("matcore")
def sandwich_range_obstruction(rng, dims):
    X, ok = matcore.consistent_sandwich(np.diag([1, 0]), np.diag([0, 1]), eye(2))
    return not ok, 0.0


@check("matcore")
def inertia_congruence(rng, dims):
    n = random_dims(rng, dims + 2)
    d = rng.choice([-1.0, 0.0, 1.0], n) * rng.uniform(0.5, 2, n)
    W = unitary(rng, n)
    H = W @ np.diag(d) @ adj(W)
    S = gaussian(rng, n, n)
    if np.linalg.cond(S) > 1e3:
        raise Skip
    expected = (int(np.sum(d < 0)), int(np.sum(d == 0)), int(np.sum(d > 0)))
    tol = Tolerances(psd_tol=1e-9)
    got_h = tuple(matcore.inertia(H, tol))
    got_s = tuple(matcore.inertia(adj(S) @ H @ S, tol))
    return got_h == expected and got_s == expected, 0.0


@check("matcore")
def polar_reconstruction(rng, dims):
    m, n = random_dims(rng, dims), random_dims(rng, dims)
    r = int(rng.integers(0, min(m, n) + 1))
    A = gaussian(rng, m, r) @ gaussian(rng, r, n)
    W, P = matcore.polar(A)
    proj = matcore.range_projector(P)
    res = max(rel(W @ P, A), op_norm(adj(W) @ W - proj) if r else op_norm(W))
    return res <= 1e-10 and matcore.is_partial_isometry(W), res


# ---------------------------------------------------------------------------
# sector


def _angle(rng, lo=0.05, hi=math.pi / 2 - 0.05):
    return float(rng.uniform(lo, hi))


@check("sector")
def imag_bound_agreement(rng, dims):
    n = random_dims(rng, dims)
    phi = _angle(rng)
    T = random_cphi(rng, n, rng.uniform(0.5, 1.5) * phi) if rng.uniform() < 0.5 else sample_unit_ball(rng, n, n)
    return sector.imag_bound_check(T, phi) == sector.in_cphi(T, phi).in_class, 0.0


@check("sector")
def class_monotone_in_angle(rng, dims):
    n = random_dims(rng, dims)
    T = random_cphi(rng, n, _angle(rng))
    a, b = sorted(rng.uniform(0, math.pi / 2, 2))
    return (not sector.in_cphi(T, a).in_class) or sector.in_cphi(T, b).in_class, 0.0


@check("sector")
def cayley_round_trip(rng, dims):
    n = random_dims(rng, dims)
    A = gaussian(rng, n, n)
    if np.linalg.svd(eye(n) + A, compute_uv=False)[-1] < 1e-3:
        raise Skip
    res = rel(sector.cayley_inv(sector.cayley(A)), A)
    return res < 1e-9, res


@check("sector")
def sectorial_maps_into_class(rng, dims):
    n = random_dims(rng, dims)
    phi = _angle(rng)
    A = sector.sectorial_sample(rng, n, phi)
    return sector.is_sectorial(A, phi) and sector.in_cphi(sector.cayley(A), phi).in_class, 0.0


@check("sector")
def spectrum_in_lens(rng, dims):
    n = random_dims(rng, dims)
    phi = _angle(rng)
    T = random_cphi(rng, n, phi)
    regions = [sector.region_classify(z, phi) for z in np.linalg.eigvals(T)]
    return sector.Region.EXTERIOR not in regions, 0.0


@check("sector")
def cayley_kappa_correspondence(rng, dims):
    n = random_dims(rng, dims)
    phi = _angle(rng)
    A = gaussian(rng, n, n) + rng.uniform(-1, 2) * eye(n)
    s, c = math.sin(phi), math.cos(phi)
    for sign in (+1, -1):
        w = np.linalg.eigvalsh(herm_part(A) + sign * (c / s) * matcore.imag_part(A))
        if np.min(np.abs(w)) < 1e-6:
            raise Skip
    if np.linalg.svd(eye(n) + A, compute_uv=False)[-1] < 1e-6:
        raise Skip
    rep = sector.in_cphi(sector.cayley(A), phi)
    return (rep.kappa_plus, rep.kappa_minus) == sector.sector_kappa(A, phi), 0.0


@check("sector", fixed=True)
def hermitian_in_every_class(rng, dims):
    rng = np.random.default_rng(7)
    T = hermitian_contraction(rng, dims, 1.0)
    N = strict_contraction(rng, dims, dims, 0.9)
    if op_norm(matcore.imag_part(N)) < 1e-2:
        raise Skip
    grid = np.linspace(0, math.pi / 2, 50)
    ok = all(sector.in_cphi(T, phi).in_class for phi in grid)
    ok = ok and not sector.in_cphi(N, 1e-4).in_class and not sector.in_cphi(N, 0.0).in_class
    return ok, 0.0


# ---------------------------------------------------------------------------
# balls


def _random_radius(rng, n):
    return sample_psd(rng, n, int(rng.integers(1, n + 1)) if rng.uniform() < 0.3 else n)


@check("balls")
def quadratic_inequality_ball(rng, dims):
    p, q = random_dims(rng, dims), random_dims(rng, dims)
    Q1 = sample_psd(rng, p) + 0.1 * eye(p)
    Q2 = gaussian(rng, p, q)
    R = gaussian(rng, q, q)
    Q3 = adj(Q2) @ np.linalg.solve(Q1, Q2) - R @ adj(R)
    ball = balls.solve_quadratic_inequality(Q1, Q2, Q3)
    K = sample_unit_ball(rng, p, q)
    inside = balls.quadratic_form_value(Q1, Q2, Q3, ball.point(K))
    lam_in = np.linalg.eigvalsh(inside)[-1]
    Kout = sample_norm(rng, p, q, 1.01)
    lam_out = np.linalg.eigvalsh(balls.quadratic_form_value(Q1, Q2, Q3, ball.point(Kout)))[-1]
    scale = 1 + op_norm(Q3) + op_norm(Q2) ** 2
    return bool(lam_in <= 1e-9 * scale and lam_out > 0), max(lam_in / scale, 0.0)


@check("balls")
def ball_member_constructive(rng, dims):
    p, q = random_dims(rng, dims), random_dims(rng, dims)
    ball = balls.OperatorBall(gaussian(rng, p, q), _random_radius(rng, p), _random_radius(rng, q))
    Z = ball.point(sample_unit_ball(rng, p, q))
    member, k = balls.ball_member(ball, Z)
    res = rel(ball.point(k), Z)
    return member and res <= 1e-9, res


def _random_hole(rng, dims, qnorm=None):
    p, q = random_dims(rng, dims), random_dims(rng, dims)
    Rl, Rr = _random_radius(rng, p), _random_radius(rng, q)
    Q = sample_unit_ball(rng, p, q) if qnorm is None else sample_norm(rng, p, q, qnorm)
    C = gaussian(rng, p, q)
    D = Rl @ Q @ Rr
    return balls.hole_make(C + D, C - D, Rl, Rr), p, q


@check("balls")
def hole_parametrization_agrees(rng, dims):
    hole, p, q = _random_hole(rng, dims)
    if rng.uniform() < 0.5:
        T = hole.ball_one.point(sample_unit_ball(rng, p, q))
    else:
        T = hole.point(sample_unit_ball(rng, p, q))
    return balls.hole_member(hole, T)[0] == balls.hole_member_two_balls(hole, T), 0.0


@check("balls")
def hole_forward_direction(rng, dims):
    hole, p, q = _random_hole(rng, dims)
    Q = hole.q_shift
    # ||K|| <= 1 - ||Q|| keeps both K + Q and K - Q contractive
    K = sample_unit_ball(rng, p, q, radius=max(0.0, 1 - op_norm(Q)))
    return balls.hole_member_two_balls(hole, hole.point(K)), 0.0


@check("balls", fixed=True)
def hole_singleton_branches(rng, dims):
    one = balls.hole_make([[1]], [[-1]], [[1]], [[1]])
    zero_radius = balls.hole_make(np.ones((2, 2)), np.ones((2, 2)), np.zeros((2, 2)), eye(2))
    W = unitary(np.random.default_rng(3), 2)
    maximal = balls.hole_make(W, -W, eye(2), eye(2))
    partial = balls.hole_make(np.diag([1, 0]), -np.diag([1, 0]), eye(2), eye(2))
    free = balls.hole_make(np.zeros((2, 2)), np.zeros((2, 2)), eye(2), eye(2))
    ok = balls.hole_singleton(one) and balls.hole_singleton(zero_radius) and balls.hole_singleton(maximal)
    ok = ok and not balls.hole_singleton(partial) and not balls.hole_singleton(free)
    # two distinct members of the non-singleton hole with Q = diag(1, 0)
    K1 = np.diag([0, 0.5])
    ok = ok and balls.hole_member(partial, partial.point(K1))[0] and balls.hole_member(partial, partial.point(-K1))[0]
    # sampling the maximal hole only ever returns its midpoint
    samples = balls.hole_sample(maximal, np.random.default_rng(0), 20)
    ok = ok and all(op_norm(s - maximal.midpoint) <= 1e-12 for s in samples)
    return ok, 0.0


@check("balls")
def factor_through_witness(rng, dims):
    n = random_dims(rng, dims)
    R1, R2 = sample_psd(rng, n) + 0.1 * eye(n), sample_psd(rng, n) + 0.1 * eye(n)
    target = 1.3 if rng.uniform() < 0.5 else 0.7
    A = R2 @ sample_norm(rng, n, n, target) @ R1
    _, ok = balls.factor_through(A, R1, R2)
    ratio, f, g = balls.bilinear_witness(A, R1, R2)
    return ok == (ratio <= 1) and abs(ratio - target) < 1e-6, abs(ratio - target)


# ---------------------------------------------------------------------------
# completion


@check("completion")
def completion_is_contraction(rng, dims):
    pair = random_pair(rng, dims)
    T = completion.complete(pair, sample_unit_ball(rng, *pair.k_shape()))
    excess = op_norm(T) - 1
    return excess <= 1e-8, max(excess, 0.0)


@check("completion")
def completion_outside_ball(rng, dims):
    pair = random_pair(rng, dims)
    T = completion.complete(pair, sample_norm(rng, *pair.k_shape(), 1.05))
    return op_norm(T) > 1, 0.0


@check("completion")
def recover_k_round_trip(rng, dims):
    pair = random_pair(rng, dims)
    K = sample_unit_ball(rng, *pair.k_shape())
    K2, ok = completion.recover_k(pair, completion.complete(pair, K))
    res = rel(K2, K)
    return ok and res <= 1e-8, res


@check("completion", share=0.2)
def critical_angle_by_bisection(rng, dims):
    pair = random_symmetric_pair(rng, dims)
    ca = completion.critical_angle(pair)
    emp = completion.empirical_phi1(pair, rng=rng)
    err = abs(emp - ca.phi1)
    return err <= 1e-6, err


def _pair_and_angle(rng, dims):
    pair = random_symmetric_pair(rng, dims)
    ca = completion.critical_angle(pair)
    return pair, ca, float(rng.uniform(ca.phi1, math.pi / 2))


@check("completion")
def sectorial_hole_equivalence(rng, dims):
    pair, _, phi = _pair_and_angle(rng, dims)
    K = sample_unit_ball(rng, *pair.k_shape(), radius=rng.uniform(0.5, 1.3))
    T, verdict = completion.sectorial_complete(pair, phi, K)
    return verdict == sector.in_cphi(T, phi).in_class, 0.0


@check("completion", share=0.5)
def empty_below_critical_angle(rng, dims):
    pair = random_symmetric_pair(rng, dims)
    ca = completion.critical_angle(pair)
    if ca.phi1 < 2e-3:
        raise Skip
    phi = ca.phi1 - 1e-3
    if op_norm(ca.q) * math.cos(phi) <= 1 + 1e-6:
        raise Skip
    Ts = [completion.complete(pair, sample_unit_ball(rng, *pair.k_shape())) for _ in range(500)]
    Ts.append(completion.complete(pair, np.zeros(pair.k_shape())))
    margins = sector.cphi_margins(np.stack(Ts), phi)
    return bool(np.all(margins < 0)), 0.0


@check("completion")
def krein_parametrizations_agree(rng, dims):
    pair = random_symmetric_pair(rng, dims, proper=True)
    q = pair.k_shape()[1]
    H = hermitian(rng, q)
    K = rng.uniform(0, 1) * H / op_norm(H)
    T = completion.complete(pair, K)
    Tm, TM = completion.extremal_pair(pair)
    cm, cM = completion.extremal_pair_closed_form(pair)
    res = max(rel(completion.krein_param(pair, K), T), rel(Tm, cm), rel(TM, cM))
    ordered = matcore.is_psd(T - Tm) and matcore.is_psd(TM - T)
    return res <= 1e-9 and ordered, res


def _u_ratio(t11, t21, U, phi):
    if op_norm(U) > 1:
        return math.inf
    pair = completion.dual_pair_make(t11, t21, matcore.defect(t11) @ U)
    return completion.u_inequality_ratio(pair, phi)


@check("completion")
def u_ball_admissible(rng, dims):
    pair = random_symmetric_pair(rng, dims)
    phi = _angle(rng)
    ball = completion.all_extensions_u_ball(pair.t11, pair.t21, phi)
    p, q = ball.center.shape
    inside = _u_ratio(pair.t11, pair.t21, ball.point(sample_unit_ball(rng, p, q)), phi)
    outside = _u_ratio(pair.t11, pair.t21, ball.point(sample_norm(rng, p, q, 1.05)), phi)
    return inside <= 1 + 1e-8 and outside > 1, max(inside - 1, 0.0)


@check("completion")
def all_extensions_end_to_end(rng, dims):
    pair = random_symmetric_pair(rng, dims)
    phi = _angle(rng)
    ball = completion.all_extensions_u_ball(pair.t11, pair.t21, phi)
    M = sample_unit_ball(rng, *ball.center.shape)
    q = pair.t21.shape[0]
    K = sample_unit_ball(rng, q, q, radius=rng.uniform(0.3, 1.3))
    T, new_pair, verdict = completion.all_extensions(pair.t11, pair.t21, phi, M, K, strict=False)
    extends = rel(T[:, : pair.t11.shape[1]], np.vstack([pair.t11, pair.t21])) <= 1e-12
    return extends and verdict == sector.in_cphi(T, phi).in_class, 0.0


@check("completion")
def column_extension_balls(rng, dims):
    phi = _angle(rng)
    n = random_dims(rng, dims) + 1
    p = int(rng.integers(1, n))
    T = random_cphi(rng, n, phi)
    if rng.uniform() < 0.5:
        T[:, p:] += 0.3 * gaussian(rng, n, n - p)
    bp, bm = completion.extension_balls(T[:p, :p], T[p:, :p], phi)
    return completion.extension_member((bp, bm), T) == sector.in_cphi(T, phi).in_class, 0.0


@check("completion")
def shifted_defect_identity(rng, dims):
    phi = _angle(rng)
    t11 = random_cphi(rng, random_dims(rng, dims), phi)
    res = completion.shifted_defect_residual(t11, phi)
    return res <= 1e-9, res


@check("completion")
def general_pair_two_balls(rng, dims):
    phi = _angle(rng)
    n = random_dims(rng, dims) + 1
    p = int(rng.integers(1, n))
    T = random_cphi(rng, n, phi)
    if rng.uniform() < 0.5:
        T[p:, p:] += 0.3 * gaussian(rng, n - p, n - p)
    res = completion.completion_balls(T[:p, :p], T[p:, :p], T[:p, p:], phi, samples=0)
    member = all(balls.ball_member(b, T[p:, p:] * math.sin(phi))[0] for b in (res.ball_plus, res.ball_minus))
    return member == sector.in_cphi(T, phi).in_class, 0.0


@check("completion")
def symmetric_probe_matches_critical_angle(rng, dims):
    pair = random_symmetric_pair(rng, dims)
    ca = completion.critical_angle(pair)
    phi = _angle(rng)
    if abs(phi - ca.phi1) < 1e-3:
        raise Skip
    res = completion.completion_balls(pair.t11, pair.t21, pair.t12, phi, samples=20, seed=int(rng.integers(1 << 31)))
    return res.samples_nonempty == (phi >= ca.phi1), 0.0


# ---------------------------------------------------------------------------
# extremal


@check("extremal", fixed=True)
def k_theta_family_certified(rng, dims):
    worst = 0.0
    ok = True
    for phi in (math.pi / 6, math.pi / 4, math.pi / 3):
        for theta in np.linspace(0, 2 * math.pi, 36, endpoint=False):
            cert = extremal.loone_certificate(extremal.k_theta(theta, phi), eye(2), phi)
            ok = ok and cert.verdict is extremal.Verdict.EXTREME_CERTIFIED
            worst = max(worst, cert.identity_residual)
            D = cert.d_kq
            worst = max(worst, op_norm(D @ cert.c_matrix @ D - math.sin(2 * phi) * matcore.imag_part(adj(extremal.k_theta(theta, phi)))))
            worst = max(worst, op_norm(cert.c_matrix + extremal.k_theta_certificate(theta)))
    return ok and worst < 1e-8, worst


def _loone_member(rng, m, n):
    Q = sample_unit_ball(rng, m, n, radius=rng.uniform(0, 2))
    qn = op_norm(Q)
    lo = math.acos(min(1.0, 1.0 / qn)) if qn > 0 else 0.0
    phi = float(rng.uniform(lo, math.pi / 2))
    s, c = math.sin(phi), math.cos(phi)
    for _ in range(100):
        K = sample_unit_ball(rng, m, n, radius=rng.uniform(0, 1.2))
        if extremal.in_loone(K, Q, phi, slack=0.0):
            return K, Q, phi
    return sample_unit_ball(rng, m, n, radius=max(0.0, (1 - c * qn) / s)), Q, phi


@check("extremal")
def certificate_identity(rng, dims):
    m, n = random_dims(rng, dims), random_dims(rng, dims)
    K, Q, phi = _loone_member(rng, m, n)
    cert = extremal.loone_certificate(K, Q, phi)
    D = cert.d_kq
    res = max(
        cert.identity_residual,
        op_norm(D @ cert.c_matrix @ D - math.sin(2 * phi) * matcore.imag_part(adj(K) @ Q)),
    )
    return cert.consistent and op_norm(cert.c_matrix) <= 1 + 1e-8 and res < 1e-8, res


@check("extremal")
def proper_completion_extremes(rng, dims):
    pair = random_symmetric_pair(rng, dims, proper=True)
    q = pair.k_shape()[1]
    phi = _angle(rng)
    W = unitary(rng, q)
    K = W @ np.diag(rng.choice([-1.0, 1.0], q)) @ adj(W)
    hi = extremal.completion_extreme(pair, phi, K).verdict
    lo = extremal.completion_extreme(pair, phi, np.zeros((q, q))).verdict
    return hi is extremal.Verdict.EXTREME_CERTIFIED and lo is extremal.Verdict.NOT_EXTREME, 0.0


@check("extremal")
def normal_boundary_spectrum(rng, dims):
    n = random_dims(rng, dims)
    phi = _angle(rng)
    s, c = math.sin(phi), math.cos(phi)
    # points on the two boundary arcs |z sin +- i cos| = 1 inside the unit disk
    alpha = rng.uniform(-1, 1, n) * phi
    sign = rng.choice([-1.0, 1.0], n)
    lam = (np.exp(1j * (sign * (math.pi / 2) + alpha)) - sign * 1j * c) / s
    W = unitary(rng, n)
    K = W @ np.diag(lam) @ adj(W)
    if not sector.in_cphi(K, phi).in_class:
        return False, 0.0
    rep = extremal.cphi_extreme_tests(K, phi, search_witness=False)
    return rep.verdict is extremal.Verdict.EXTREME_CERTIFIED and rep.boundary_pp_implies_normal is True, 0.0


@check("extremal")
def certified_points_have_no_witness(rng, dims):
    phi = _angle(rng)
    K = extremal.k_theta(float(rng.uniform(0, 2 * math.pi)), phi)
    return extremal.interior_witness(K, eye(2), phi, rng=rng) is None, 0.0


# ---------------------------------------------------------------------------
# schur


@check("schur")
def schur_identities(rng, dims):
    pair, _, phi = _pair_and_angle(rng, dims)
    K = sample_unit_ball(rng, *pair.k_shape(), radius=2.0)
    sides = schur.complement_sides(pair, K, phi)
    return sides.max_residual < 1e-7 and sides.range_ok, sides.max_residual


@check("schur")
def kappa_equivalence(rng, dims):
    for _ in range(20):
        pair, ca, phi = _pair_and_angle(rng, dims)
        K = sample_unit_ball(rng, *pair.k_shape(), radius=3.0)
        Kc = completion.compress_k(pair, K)
        Qc = completion.compress_k(pair, ca.q)
        s, c = math.sin(phi), math.cos(phi)
        m = Kc.shape[1]
        close = False
        for X in (s * Kc + 1j * c * Qc, s * Kc - 1j * c * Qc):
            if m and np.min(np.abs(np.linalg.eigvalsh(eye(m) - adj(X) @ X))) < 1e-6:
                close = True
        T = completion.complete(pair, K)
        n = T.shape[0]
        for X in (s * T + 1j * c * eye(n), s * T - 1j * c * eye(n)):
            if np.min(np.abs(np.linalg.eigvalsh(eye(n) - adj(X) @ X))) < 1e-6:
                close = True
        if not close:
            return schur.kappa_classify(pair, K, phi).agree, 0.0
    raise Skip


@check("schur")
def shorted_closed_vs_variational(rng, dims):
    n = random_dims(rng, dims + 2) + 1
    split = int(rng.integers(1, n))
    A = sample_psd(rng, n, int(rng.integers(1, n + 1)))
    AN = schur.shorted(A, split)
    worst = 0.0
    for _ in range(5):
        f = gaussian(rng, n, 1).ravel()
        v = schur.shorted_variational(A, split, f)
        worst = max(worst, abs(v - np.vdot(f, AN @ f).real) / (op_norm(A) * np.vdot(f, f).real))
    ok = worst <= 1e-8 and matcore.is_psd(AN) and matcore.is_psd(A - AN)
    return ok, worst


@check("schur")
def shorted_is_maximal(rng, dims):
    n = random_dims(rng, dims + 2) + 1
    split = int(rng.integers(1, n))
    A = sample_psd(rng, n)
    AN = schur.shorted(A, split)
    B = np.zeros_like(A)
    B[split:, split:] = sample_psd(rng, n - split)
    # largest t with t B <= A, by bisection on the smallest eigenvalue
    lo, hi = 0.0, 1.0
    while matcore.min_eig(A - hi * B) >= 0:
        hi *= 2
    for _ in range(60):
        mid = 0.5 * (lo + hi)
        lo, hi = (mid, hi) if matcore.min_eig(A - mid * B) >= 0 else (lo, mid)
    gap = matcore.min_eig(AN - lo * B)
    return gap >= -1e-8 * (1 + op_norm(A)), max(-gap, 0.0)


@check("schur")
def complement_inertia(rng, dims):
    n = random_dims(rng, dims + 2) + 1
    split = int(rng.integers(1, n))
    W = unitary(rng, split)
    d = rng.uniform(0.1, 2, split) * (rng.uniform(size=split) < 0.6)
    T11 = W @ np.diag(d) @ adj(W)
    T12 = W @ np.diag(np.sqrt(d)) @ adj(W) @ gaussian(rng, split, n - split)
    T22 = hermitian(rng, n - split)
    T = np.block([[T11, T12], [adj(T12), T22]])
    comp, _ = schur.generalized_schur(T, split)
    w = np.concatenate([np.linalg.eigvalsh(T), np.linalg.eigvalsh(comp)])
    if np.any((np.abs(w) > 1e-12) & (np.abs(w) < 1e-6)):
        raise Skip
    return schur.complement_inertia_check(T, split), 0.0


@check("schur")
def shorted_defect_closed_forms(rng, dims):
    pair, ca, phi = _pair_and_angle(rng, dims)
    s, c = math.sin(phi), math.cos(phi)
    qn = op_norm(ca.q) * c
    K = sample_unit_ball(rng, *pair.k_shape(), radius=max(0.0, (1 - qn) / s))
    res = schur.shorted_defects(pair, K, phi).residual
    return res < 1e-8, res


@check("schur")
def block_ldu_bridge(rng, dims):
    n = random_dims(rng, dims + 2) + 1
    split = int(rng.integers(1, n))
    H = hermitian(rng, n)
    H[:split, :split] = sample_psd(rng, split) + 0.5 * eye(split)
    H = herm_part(H)
    comp, _ = schur.generalized_schur(H, split)
    H11 = H[:split, :split]
    L = eye(n)
    L[split:, :split] = H[split:, :split] @ np.linalg.inv(H11)
    Dm = np.zeros_like(H)
    Dm[:split, :split] = H11
    Dm[split:, split:] = comp
    res = rel(L @ Dm @ adj(L), H)
    w = np.concatenate([np.linalg.eigvalsh(H), np.linalg.eigvalsh(comp)])
    if np.min(np.abs(w)) < 1e-6:
        raise Skip
    additive = matcore.inertia(H).n_neg == matcore.inertia(comp).n_neg
    return res < 1e-10 and additive, res


# ---------------------------------------------------------------------------
# triangular


def _tri(rng, dims, phi=None):
    a, b = random_dims(rng, dims), random_dims(rng, dims)
    if phi is None:
        return triangular.TriPair(strict_contraction(rng, a, a), strict_contraction(rng, b, b))
    return triangular.TriPair(random_cphi(rng, a, phi), random_cphi(rng, b, phi), phi)


@check("triangular")
def triangular_ball(rng, dims):
    tp = _tri(rng, dims)
    shape = tp.k_shape
    inside = op_norm(triangular.tri_complete(tp, sample_unit_ball(rng, *shape))) <= 1 + 1e-9
    outside = op_norm(triangular.tri_complete(tp, sample_norm(rng, *shape, 1.05))) > 1
    T = triangular.tri_complete(tp, np.zeros(shape))
    a, b = tp.t11.shape
    T[:a, b:] = rng.uniform(0, 1.5) * gaussian(rng, *shape) / math.sqrt(2 * max(shape))
    K, ok = triangular.tri_recover_k(tp, T)
    exact = (op_norm(T) <= 1 + 1e-9) == (ok and op_norm(K) <= 1 + 1e-9)
    return inside and outside and exact, 0.0


@check("triangular")
def triangular_schur_identities(rng, dims):
    tp = _tri(rng, dims)
    K = sample_unit_ball(rng, *tp.k_shape, radius=2.0)
    rg, rs = triangular.tri_identities(tp, K)
    kT, kK = triangular.tri_kappa(tp, K)
    return max(rg, rs) < 1e-8 and kT == kK, max(rg, rs)


@check("triangular")
def shmulyan_equivalence(rng, dims):
    phi = _angle(rng)
    tp = _tri(rng, dims, phi)
    f = triangular.shmulyan_factors(tp)
    for X in (f.u_phi, f.v_phi):
        w = np.linalg.eigvalsh(X)
        if np.min(1 - np.abs(w)) < 1e-8:
            raise Skip
    K = sample_unit_ball(rng, *tp.k_shape, radius=rng.uniform(0.3, 1.5))
    T, verdict = triangular.shmulyan_complete(tp, K)
    return f.consistent and verdict == sector.in_cphi(T, phi).in_class, 0.0


@check("triangular")
def shmulyan_radius_identity(rng, dims):
    tp = _tri(rng, dims, _angle(rng))
    f = triangular.shmulyan_factors(tp)
    res = triangular.shmulyan_radius_residual(tp)
    bounded = op_norm(f.u_phi) <= 1 + 1e-8 and op_norm(f.v_phi) <= 1 + 1e-8
    return f.consistent and bounded and res < 1e-9, res


@check("triangular")
def shmulyan_two_ball_consistency(rng, dims):
    phi = _angle(rng)
    tp = _tri(rng, dims, phi)
    K = sample_unit_ball(rng, *tp.k_shape, radius=rng.uniform(0, 0.5))
    T, verdict = triangular.shmulyan_complete(tp, K)
    if not verdict:
        raise Skip
    a = tp.t11.shape[0]
    res = completion.completion_balls(T[:a, :a], T[a:, :a], T[:a, a:], phi, samples=0)
    s = math.sin(phi)
    return all(balls.ball_member(bl, T[a:, a:] * s)[0] for bl in (res.ball_plus, res.ball_minus)), 0.0


# ---------------------------------------------------------------------------
# driver

SUITE_NAMES = ("matcore", "sector", "balls", "completion", "extremal", "schur", "triangular")


def _salt(suite: str, name: str) -> int:
    return zlib.crc32(f"{suite}.{name}".encode())


def run_check(suite: str, chk: Check, seed: int, trials: int, dims: int) -> CheckResult:
    n = 1 if chk.fixed else max(1, int(round(trials * chk.share)))
    failures = skipped = 0
    worst = 0.0
    salt = _salt(suite, chk.name)
    for i in range(n):
        rng = np.random.default_rng([seed + i, salt])
        try:
            ok, res = chk.fn(rng, dims)
        except Skip:
            skipped += 1
            continue
        except Exception:  # an exception inside an oracle is a failed trial
            ok, res = False, 0.0
        failures += 0 if ok else 1
        if np.isfinite(res):
            worst = max(worst, float(res))
    return CheckResult(suite, chk.name, n, failures, skipped, worst)


def run_suite(suite: str, seed: int = 0, trials: int = 100, dims: int = 4) -> RunReport:
    """Run one suite (or ``"all"``) and aggregate the per-check results."""
    if suite != "all" and suite not in SUITES:
        raise KeyError(suite)
    names = SUITE_NAMES if suite == "all" else (suite,)
    if dims < 1 or trials < 1:
        raise ValueError("trials and dims must be positive")
    results = [run_check(name, chk, seed, trials, dims) for name in names for chk in SUITES[name]]
    return RunReport(
        command=f"verify --suite {suite}",
        seed=seed,
        trials=trials,
        failures=sum(r.failures for r in results),
        max_residual=max((r.max_residual for r in results), default=0.0),
        verdicts=results,
        tolerances=current_tolerances(),
    )
