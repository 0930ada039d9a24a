import json
import math

import numpy as np
import pytest

from opext import balls, cli, completion, extremal, harness, sector, serialize
from opext.errors import OpExtError
from opext.matcore import Tolerances
from opext.samplers import gaussian, random_pair, sample_psd

# helpers


def write(path, obj):
    path.write_text(json.dumps(serialize.to_jsonable(obj)))
    return str(path)


def pair_file(tmp_path, t11, t21, t12, name="pair.json"):
    blocks = {"t11": np.array(t11), "t21": np.array(t21), "t12": np.array(t12)}
    return write(tmp_path / name, blocks)


def run(capsys, *argv):
    code = cli.main([str(a) for a in argv])
    out, err = capsys.readouterr()
    return code, out, err


# complete


def test_complete_zero_pair(tmp_path, capsys):
    pair = pair_file(tmp_path, [[0]], [[0]], [[0]])
    k = write(tmp_path / "k.json", np.array([[1.0]]))
    out = tmp_path / "t.json"
    code, _, _ = run(capsys, "complete", "--pair", pair, "--k", k, "--out", out)
    assert code == 0
    T = serialize.matrix_from_json(json.loads(out.read_text()))
    assert np.array_equal(T, np.array([[0, 0], [0, 1]], dtype=complex))


@pytest.mark.parametrize("phi, code", [(1.2, 0), (0.9, 1)])
def test_complete_with_angle(tmp_path, capsys, phi, code):
    pair = pair_file(tmp_path, [[0]], [[0.6]], [[-0.6]])
    k = write(tmp_path / "k.json", np.zeros((1, 1)))
    got, out, _ = run(capsys, "complete", "--pair", pair, "--k", k, "--phi", phi)
    assert got == code
    report = json.loads(out)
    assert report["in_class"] is (code == 0)
    assert "margin" in report and "matrix" in report


def test_complete_rejects_bad_pair(tmp_path, capsys):
    pair = pair_file(tmp_path, [[0.8]], [[0.8]], [[0]])
    k = write(tmp_path / "k.json", np.zeros((1, 1)))
    code, _, err = run(capsys, "complete", "--pair", pair, "--k", k)
    assert code == 2 and "NotDualPairContractions" in err


# angle


@pytest.mark.parametrize(
    "blocks, text",
    [
        (([[0]], [[0.6]], [[0.6]]), "0.000000000000"),
        (([[0]], [[0.6]], [[-0.6]]), "1.080839000541"),
        (([[0]], [[1]], [[0.5]]), "pi/2-only"),
    ],
)
def test_angle_examples(tmp_path, capsys, blocks, text):
    code, out, _ = run(capsys, "angle", "--pair", pair_file(tmp_path, *blocks))
    assert code == 0 and out.strip() == text


def test_angle_out_file(tmp_path, capsys):
    out = tmp_path / "a.json"
    run(capsys, "angle", "--pair", pair_file(tmp_path, [[0]], [[0.6]], [[-0.6]]), "--out", out, "--quiet")
    got = json.loads(out.read_text())
    assert got["consistent"] and got["phi1"] == pytest.approx(math.acos(0.64 / 1.36), abs=1e-15)


# check, cayley, short


def test_check_examples(tmp_path, capsys):
    herm = write(tmp_path / "h.json", np.array([[0.5, 0.2], [0.2, -0.3]]))
    code, out, _ = run(capsys, "check", "--matrix", herm, "--phi", 0.3)
    rep = json.loads(out)
    assert code == 0 and rep["in_class"] and (rep["kappa_plus"], rep["kappa_minus"]) == (0, 0)
    ii = write(tmp_path / "i.json", 1j * np.eye(2))
    code, out, _ = run(capsys, "check", "--matrix", ii, "--phi-deg", 45)
    rep = json.loads(out)
    assert code == 1 and not rep["in_class"] and rep["kappa_plus"] >= 1
    kt = write(tmp_path / "kt.json", extremal.k_theta(0.4, math.pi / 3))
    assert run(capsys, "check", "--matrix", kt, "--phi", math.pi / 3)[0] == 0


def test_check_needs_angle(tmp_path, capsys):
    m = write(tmp_path / "m.json", np.eye(1))
    code, _, err = run(capsys, "check", "--matrix", m)
    assert code == 2 and "angle" in err


def test_cayley_and_inverse(tmp_path, capsys):
    m = write(tmp_path / "m.json", np.zeros((1, 1)))
    code, out, _ = run(capsys, "cayley", "--matrix", m)
    assert code == 0 and serialize.matrix_from_json(json.loads(out)["matrix"])[0, 0] == 1
    m = write(tmp_path / "m3.json", np.array([[3.0]]))
    _, out, _ = run(capsys, "cayley", "--matrix", m, "--inverse")
    assert serialize.matrix_from_json(json.loads(out)["matrix"])[0, 0] == pytest.approx(-0.5)
    singular = write(tmp_path / "s.json", -np.eye(2))
    assert run(capsys, "cayley", "--matrix", singular)[0] == 2


def test_short_example(tmp_path, capsys):
    m = write(tmp_path / "a.json", np.array([[2.0, 1.0], [1.0, 1.0]]))
    code, out, _ = run(capsys, "short", "--matrix", m, "--split", 1)
    A = serialize.matrix_from_json(json.loads(out)["matrix"])
    assert code == 0 and np.allclose(A, np.diag([0, 0.5]))
    assert run(capsys, "short", "--matrix", m, "--split", 5)[0] == 2


# tri, extreme, hole


def test_tri(tmp_path, capsys):
    z = write(tmp_path / "z.json", np.zeros((1, 1)))
    one = write(tmp_path / "one.json", np.ones((1, 1)))
    big = write(tmp_path / "big.json", 1.5 * np.ones((1, 1)))
    assert run(capsys, "tri", "--t11", z, "--t22", z, "--k", one)[0] == 0
    assert run(capsys, "tri", "--t11", z, "--t22", z, "--k", big)[0] == 1
    code, out, _ = run(capsys, "tri", "--t11", z, "--t22", z, "--k", one, "--phi", math.pi / 3)
    assert code == 0 and json.loads(out)["in_class"]


def test_extreme(tmp_path, capsys):
    phi = math.pi / 3
    kt = write(tmp_path / "kt.json", extremal.k_theta(1.0, phi))
    code, out, _ = run(capsys, "extreme", "--k", kt, "--phi", phi)
    assert code == 0 and json.loads(out)["verdict"] == "extreme_certified"
    zero = write(tmp_path / "z.json", np.zeros((2, 2)))
    code, out, _ = run(capsys, "extreme", "--k", zero, "--phi", phi)
    assert code == 1 and json.loads(out)["verdict"] == "not_extreme"
    eye = write(tmp_path / "q.json", np.eye(2))
    assert run(capsys, "extreme", "--k", kt, "--phi", phi, "--q", eye)[0] == 0
    pair = pair_file(tmp_path, [[0]], [[0.6]], [[0.6]])
    one = write(tmp_path / "one.json", np.ones((1, 1)))
    assert run(capsys, "extreme", "--k", one, "--phi", phi, "--pair", pair)[0] == 0


def test_hole_commands(tmp_path, capsys):
    hole = {"c1": np.ones((1, 1)), "c2": -np.ones((1, 1)), "r_left": np.ones((1, 1)), "r_right": np.ones((1, 1))}
    hf = write(tmp_path / "hole.json", hole)
    code, out, _ = run(capsys, "hole", "singleton", "--hole", hf)
    assert code == 0 and json.loads(out)["singleton"] is True
    open_hole = dict(hole, c1=np.array([[0.5]]), c2=np.array([[-0.5]]))
    hf = write(tmp_path / "open.json", open_hole)
    inside = write(tmp_path / "in.json", np.array([[0.4]]))
    outside = write(tmp_path / "out.json", np.array([[0.9]]))
    assert run(capsys, "hole", "member", "--hole", hf, "--matrix", inside)[0] == 0
    assert run(capsys, "hole", "member", "--hole", hf, "--matrix", outside)[0] == 1
    assert run(capsys, "hole", "member", "--hole", hf)[0] == 2
    code, out, _ = run(capsys, "hole", "sample", "--hole", hf, "--count", 3, "--seed", 7)
    assert code == 0 and len(json.loads(out)["members"]) == 3


# verify and the exit-code contract


def test_verify_small_suite(capsys):
    code, out, err = run(capsys, "verify", "--suite", "balls", "--trials", 3, "--dims", 2)
    report = json.loads(out)
    assert code == 0 and report["failures"] == 0 and report["command"]
    assert "verify" in err


def test_verify_scalar_dims(capsys):
    code, out, _ = run(capsys, "verify", "--suite", "balls", "--trials", 5, "--dims", 1)
    assert code == 0 and json.loads(out)["failures"] == 0


def test_unknown_suite_and_bad_flags(capsys):
    assert run(capsys, "verify", "--suite", "nope")[0] == 2
    assert run(capsys, "verify", "--trials", 0)[0] == 2
    assert run(capsys, "frobnicate")[0] == 2
    assert run(capsys, "check", "--matrix", "/nonexistent.json", "--phi", 1)[0] == 2


def test_malformed_matrix_file(tmp_path, capsys):
    bad = tmp_path / "bad.json"
    bad.write_text('{"rows": 1, "cols": 2, "data": [[[1, 0]]]}')
    assert run(capsys, "check", "--matrix", bad, "--phi", 1)[0] == 2
    bad.write_text("not json")
    assert run(capsys, "check", "--matrix", bad, "--phi", 1)[0] == 2


def test_quiet_suppresses_stdout(tmp_path, capsys):
    m = write(tmp_path / "m.json", np.zeros((1, 1)))
    code, out, _ = run(capsys, "cayley", "--matrix", m, "--quiet")
    assert code == 0 and out == ""


@pytest.mark.parametrize(
    "argv",
    [
        ("verify", "--suite", "sector", "--trials", 3, "--seed", 11),
        ("hole", "sample", "--hole", "HOLE", "--count", 4, "--seed", 3),
    ],
)
def test_stdout_is_deterministic(tmp_path, capsys, argv):
    hole = {k: np.eye(2) for k in ("r_left", "r_right")}
    hole.update(c1=0.3 * np.eye(2), c2=-0.3 * np.eye(2))
    hf = write(tmp_path / "hole.json", hole)
    argv = [hf if a == "HOLE" else a for a in argv]
    first = run(capsys, *argv)
    second = run(capsys, *argv)
    assert first[0] == second[0] and first[1] == second[1]


def test_flags_override_environment(monkeypatch):
    monkeypatch.setenv("OPEXT_TOL_RANK", "1e-6")
    monkeypatch.setenv("OPEXT_NORM_SLACK", "1e-3")
    args = cli.build_parser().parse_args(["verify", "--norm-slack", "1e-7"])
    tol = cli._tolerances(args)
    assert tol.rank_tol == 1e-6 and tol.norm_slack == 1e-7


# serialization


def test_matrix_round_trip_bit_exact():
    rng = np.random.default_rng(3)
    A = gaussian(rng, 3, 4) * 10.0 ** rng.integers(-300, 300, (3, 4))
    text = json.dumps(serialize.matrix_to_json(A))
    assert np.array_equal(serialize.matrix_from_json(json.loads(text)), A)


def test_matrix_schema_checks():
    with pytest.raises(OpExtError):
        serialize.matrix_from_json({"rows": 1, "cols": 1, "data": [[[1, 2, 3]]]})
    with pytest.raises(OpExtError):
        serialize.matrix_from_json({"rows": 1, "cols": 1, "data": [[[math.inf, 0]]]})
    with pytest.raises(OpExtError):
        serialize.matrix_from_json({"rows": 1, "cols": 1, "data": [[[True, 0]]]})
    assert serialize.matrix_from_json({"data": [[1, 2]]}).shape == (1, 2)


def _json_round_trip(x):
    return json.loads(json.dumps(serialize.to_jsonable(x)))


def test_domain_round_trips():
    rng = np.random.default_rng(4)
    pair = random_pair(rng, 3)
    back = serialize.decode(completion.DualPair, _json_round_trip(pair))
    for k in ("t11", "t21", "t12"):
        assert np.array_equal(getattr(back, k), getattr(pair, k))

    ball = balls.OperatorBall(gaussian(rng, 2, 3), sample_psd(rng, 2), sample_psd(rng, 3))
    back = serialize.ball_from_json(_json_round_trip(ball))
    assert all(np.array_equal(getattr(back, k), getattr(ball, k)) for k in ("center", "r_left", "r_right"))

    hole = balls.hole_make(gaussian(rng, 2, 2), gaussian(rng, 2, 2), sample_psd(rng, 2), sample_psd(rng, 2))
    back = serialize.decode(balls.OperatorHole, _json_round_trip(hole))
    assert np.array_equal(back.ball_one.center, hole.ball_one.center)
    assert np.array_equal(back.ball_two.center, hole.ball_two.center)

    tol = Tolerances(rank_tol=1.2345678901234567e-11, psd_tol=3e-9, norm_slack=0.0)
    assert serialize.decode(Tolerances, _json_round_trip(tol)) == tol

    rep = sector.in_cphi(gaussian(rng, 3, 3), 0.4)
    assert serialize.decode(sector.ClassReport, _json_round_trip(rep)) == rep

    cert = extremal.loone_certificate(extremal.k_theta(0.3, 1.0), np.eye(2), 1.0)
    back = serialize.decode(extremal.ExtremeCertificate, _json_round_trip(cert))
    assert back.verdict is cert.verdict and np.array_equal(back.c_matrix, cert.c_matrix)

    report = harness.run_suite("matcore", seed=1, trials=2, dims=2)
    back = serialize.decode(harness.RunReport, _json_round_trip(report))
    assert back == report
