"""Acceptance criteria with pinned tolerances.

Each test records one PASS/FAIL line, printed in the terminal summary.
"""

import io
import json
import math
import time
from contextlib import redirect_stderr, redirect_stdout

import numpy as np
import pytest

from opext import balls, cli, completion, extremal, schur, sector, triangular
from opext.matcore import adj, convex_split, eye, op_norm
from opext.samplers import (
    gaussian,
    hermitian,
    random_cphi,
    random_dims,
    random_pair,
    random_symmetric_pair,
    sample_psd,
    sample_unit_ball,
    strict_contraction,
    unitary,
)

from .conftest import ACCEPTANCE_LINES

pytestmark = pytest.mark.acceptance


def record(n, ok, text):
    line = f"[{'PASS' if ok else 'FAIL'}] criterion {n:2d}: {text}"
    ACCEPTANCE_LINES[n] = line
    print(line)
    assert ok, line


def pair_and_angle(rng, dims=4):
    pair = random_symmetric_pair(rng, dims)
    ca = completion.critical_angle(pair)
    return pair, ca, rng.uniform(ca.phi1, math.pi / 2)


def near_zero_eig(mats, gap=1e-6):
    return any(M.size and np.min(np.abs(np.linalg.eigvalsh(M))) < gap for M in mats)


def test_1_contractive_completion_ball():
    rng = np.random.default_rng(1)
    start = time.perf_counter()
    inside = 0
    for _ in range(500):
        pair = random_pair(rng, 4)
        K = sample_unit_ball(rng, *pair.k_shape())
        inside += op_norm(completion.complete(pair, K)) <= 1 + 1e-8
    outside = 0
    for _ in range(100):
        # strict contractions give nonsingular defects
        pair = random_pair(rng, 4)
        K = gaussian(rng, *pair.k_shape())
        K *= 1.05 / op_norm(K)
        outside += op_norm(completion.complete(pair, K)) > 1
    elapsed = time.perf_counter() - start
    ok = inside == 500 and outside == 100 and elapsed < 5.0
    record(1, ok, f"||K||<=1 contractive {inside}/500, ||K||=1.05 noncontractive {outside}/100, {elapsed:.2f} s (< 5 s)")


def test_2_critical_angle_and_parameter_condition():
    rng = np.random.default_rng(2)
    worst = 0.0
    for _ in range(100):
        pair = random_symmetric_pair(rng, 4)
        ca = completion.critical_angle(pair)
        # bisection on the membership of the K = 0 completion only
        empirical = completion.empirical_phi1(pair, iters=60, samples=0)
        worst = max(worst, abs(empirical - ca.phi1))
    disagree = 0
    for _ in range(300):
        pair, _, phi = pair_and_angle(rng)
        K = sample_unit_ball(rng, *pair.k_shape())
        T, ok = completion.sectorial_complete(pair, phi, K)
        disagree += ok != sector.in_cphi(T, phi).in_class
    passed = worst < 1e-6 and disagree == 0
    record(2, passed, f"max |phi1 - bisection| = {worst:.2e} rad (< 1e-6), parameter-side disagreements {disagree}/300")


def _hole(rng):
    p, q = random_dims(rng, 4), random_dims(rng, 4)
    Rl = sample_psd(rng, p, int(rng.integers(1, p + 1)))
    Rr = sample_psd(rng, q, int(rng.integers(1, q + 1)))
    C = gaussian(rng, p, q)
    D = Rl @ sample_unit_ball(rng, p, q) @ Rr
    return balls.hole_make(C + D, C - D, Rl, Rr), p, q


def _only_midpoint(hole, rng, trials=200):
    # no perturbation of the midpoint stays in both balls
    p, q = hole.midpoint.shape
    for _ in range(trials):
        E = gaussian(rng, p, q)
        T = hole.midpoint + 1e-3 * E / op_norm(E)
        if balls.hole_member_two_balls(hole, T, tol=0.0):
            return False
    return balls.hole_member_two_balls(hole, hole.midpoint)


def test_3_operator_hole():
    rng = np.random.default_rng(3)
    disagree = 0
    for i in range(500):
        hole, p, q = _hole(rng)
        if i % 2:
            T = hole.ball_one.point(sample_unit_ball(rng, p, q))
        else:
            T = hole.point(sample_unit_ball(rng, p, q))
        disagree += balls.hole_member(hole, T)[0] != balls.hole_member_two_balls(hole, T)
    W = unitary(np.random.default_rng(30), 2)
    singletons = {
        "unitary shift, scalar": balls.hole_make([[1]], [[-1]], [[1]], [[1]]),
        "unitary shift, 2x2": balls.hole_make(W, -W, eye(2), eye(2)),
        "zero radius, 2x2": balls.hole_make(np.ones((2, 2)), np.ones((2, 2)), np.zeros((2, 2)), eye(2)),
        "isometric shift, 2x1": balls.hole_make([[0.6], [0.8]], [[-0.6], [-0.8]], eye(2), [[1]]),
    }
    branches_ok = all(balls.hole_singleton(h) and _only_midpoint(h, rng) for h in singletons.values())
    Q = np.diag([1.0, 0.0])
    partial = balls.hole_make(Q, -Q, eye(2), eye(2))
    K1, K2 = convex_split(Q)
    E = (K1 - K2) / 2
    two_members = all(balls.hole_member(partial, partial.point(X))[0] for X in (E, -E))
    branches_ok = branches_ok and not balls.hole_singleton(partial) and two_members
    record(3, disagree == 0 and branches_ok,
           f"parametrized vs two-ball disagreements {disagree}/500, singleton branches confirmed: {branches_ok}")


def test_4_complement_identities():
    rng = np.random.default_rng(4)
    start = time.perf_counter()
    worst = 0.0
    range_ok = True
    for _ in range(300):
        pair, _, phi = pair_and_angle(rng)
        K = sample_unit_ball(rng, *pair.k_shape(), radius=2.0)
        sides = schur.complement_sides(pair, K, phi)
        worst = max(worst, sides.max_residual)
        range_ok = range_ok and sides.range_ok
    elapsed = time.perf_counter() - start
    ok = worst < 1e-7 and range_ok and elapsed < 10.0
    record(4, ok, f"max residual {worst:.2e} (< 1e-7) over 300 instances with ||K|| <= 2, {elapsed:.2f} s (< 10 s)")


def test_5_negative_index_equivalence():
    rng = np.random.default_rng(5)
    accepted = disagree = 0
    while accepted < 200:
        pair, ca, phi = pair_and_angle(rng)
        K = sample_unit_ball(rng, *pair.k_shape(), radius=3.0)
        s, c = math.sin(phi), math.cos(phi)
        Kc, Qc = completion.compress_k(pair, K), completion.compress_k(pair, ca.q)
        T = completion.complete(pair, K)
        n, m = T.shape[0], Kc.shape[1]
        shifts = [s * T + sg * 1j * c * eye(n) for sg in (1, -1)]
        shifts_k = [s * Kc + sg * 1j * c * Qc for sg in (1, -1)]
        defects = [eye(n) - adj(X) @ X for X in shifts] + [eye(m) - adj(X) @ X for X in shifts_k]
        if near_zero_eig(defects):
            continue
        accepted += 1
        disagree += not schur.kappa_classify(pair, K, phi).agree
    record(5, disagree == 0, f"negative-index pairs disagree on {disagree}/200 instances")


def test_6_shorted_operator():
    rng = np.random.default_rng(6)
    worst = 0.0
    for _ in range(200):
        n = random_dims(rng, 5) + 1
        split = int(rng.integers(1, n))
        A = sample_psd(rng, n, int(rng.integers(1, n + 1)))
        AN = schur.shorted(A, split)
        f = gaussian(rng, n, 1).ravel()
        v = schur.shorted_variational(A, split, f)
        worst = max(worst, abs(v - np.vdot(f, AN @ f).real) / (op_norm(A) * np.vdot(f, f).real))
    maximal = 0
    for _ in range(100):
        n = random_dims(rng, 5) + 1
        split = int(rng.integers(1, n))
        A = sample_psd(rng, n, int(rng.integers(1, n + 1)))
        AN = schur.shorted(A, split)
        B = np.zeros_like(A)
        B[split:, split:] = sample_psd(rng, n - split)
        tol = 1e-9 * (1 + op_norm(A))
        # largest t with tB <= A, then tB <= A_N must follow
        lo, hi = 0.0, 1e3
        for _ in range(60):
            t = 0.5 * (lo + hi)
            lo, hi = (t, hi) if np.linalg.eigvalsh(A - t * B).min() >= -tol else (lo, t)
        below = np.linalg.eigvalsh(AN - lo * B).min() >= -1e-7 * (1 + op_norm(A))
        maximal += bool(below and np.linalg.eigvalsh(A - AN).min() >= -tol)
    ok = worst < 1e-8 and maximal == 100
    record(6, ok, f"closed form vs variational max rel. error {worst:.2e} (< 1e-8), maximality {maximal}/100")


def test_7_extreme_points():
    thetas = np.linspace(0, 2 * math.pi, 36, endpoint=False)
    certified = 0
    worst = 0.0
    for phi in (math.pi / 6, math.pi / 4, math.pi / 3):
        for theta in thetas:
            K = extremal.k_theta(theta, phi)
            rep = extremal.cphi_extreme_tests(K, phi, search_witness=False)
            if rep.verdict is extremal.Verdict.EXTREME_CERTIFIED:
                certified += 1
                worst = max(worst, rep.certificate.identity_residual)
    ok = certified == 108 and worst < 1e-8
    record(7, ok, f"K(theta) certified {certified}/108, max certificate identity residual {worst:.2e} (< 1e-8)")


def test_8_triangular_completions():
    rng = np.random.default_rng(8)
    ball_ok = 0
    for _ in range(300):
        a, b = random_dims(rng, 4), random_dims(rng, 4)
        tp = triangular.TriPair(strict_contraction(rng, a, a), strict_contraction(rng, b, b))
        K = gaussian(rng, a, b)
        K *= rng.choice([rng.uniform(0.05, 0.99), rng.uniform(1.01, 2.0)]) / op_norm(K)
        T = triangular.tri_complete(tp, K)
        ball_ok += (op_norm(T) <= 1 + 1e-12) == (op_norm(K) <= 1)
    worst = 0.0
    for _ in range(300):
        a, b = random_dims(rng, 4), random_dims(rng, 4)
        tp = triangular.TriPair(strict_contraction(rng, a, a), strict_contraction(rng, b, b))
        worst = max(worst, *triangular.tri_identities(tp, sample_unit_ball(rng, a, b, radius=2.0)))
    disagree = 0
    for _ in range(300):
        phi = rng.uniform(0.05, 1.52)
        a, b = random_dims(rng, 4), random_dims(rng, 4)
        tp = triangular.TriPair(random_cphi(rng, a, phi), random_cphi(rng, b, phi), phi)
        T, verdict = triangular.shmulyan_complete(tp, sample_unit_ball(rng, a, b, radius=1.5))
        disagree += verdict != sector.in_cphi(T, phi).in_class
    ok = ball_ok == 300 and worst < 1e-8 and disagree == 0
    record(8, ok, f"triangular ball {ball_ok}/300, identity residual {worst:.2e} (< 1e-8), C(phi) disagreements {disagree}/300")


def test_9_cayley_correspondence():
    rng = np.random.default_rng(9)
    worst = 0.0
    members = 0
    for _ in range(100):
        n = random_dims(rng, 4)
        phi = rng.uniform(0.05, 1.52)
        A = sector.sectorial_sample(rng, n, phi)
        # numerical range check on random vectors
        f = gaussian(rng, n, 8)
        z = np.einsum("ij,ij->j", f.conj(), A @ f)
        assert np.all(np.abs(np.angle(z)) <= phi + 1e-9)
        X = sector.cayley(A)
        worst = max(worst, op_norm(sector.cayley_inv(X) - A) / (1 + op_norm(A)))
        members += sector.in_cphi(X, phi).in_class
        H = hermitian(rng, n)
        X = sector.cayley(H @ H)
        worst = max(worst, op_norm(sector.cayley(X) - H @ H) / (1 + op_norm(H) ** 2))
    ok = worst < 1e-9 and members == 100
    record(9, ok, f"Cayley round-trip max rel. error {worst:.2e} (< 1e-9), sectorial images in C(phi) {members}/100")


def test_10_full_verification_run():
    out, err = io.StringIO(), io.StringIO()
    start = time.perf_counter()
    with redirect_stdout(out), redirect_stderr(err):
        code = cli.main(["verify", "--suite", "all", "--seed", "42", "--trials", "100", "--dims", "4"])
    elapsed = time.perf_counter() - start
    report = json.loads(out.getvalue())
    ok = code == 0 and report["failures"] == 0 and elapsed < 60.0
    record(10, ok, f"verify all seed 42: failures {report['failures']}, exit {code}, {elapsed:.1f} s (< 60 s)")
