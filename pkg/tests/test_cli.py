import json
import subprocess
import sys

import numpy as np
import pytest

from galkit.cli import main, parse_matrix, parse_vector
from galkit.core import GalParams
from galkit.rng import RngStream
from galkit.sample import sample_mixture
from galkit.verify import moment_check


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def galkit(*argv, stdin=None, env=None):
    return subprocess.run(
        [sys.executable, "-m", "galkit", *argv], input=stdin, capture_output=True, text=True, env=env
    )


def test_parse_matrix():
    np.testing.assert_array_equal(parse_matrix("I2"), np.eye(2))
    np.testing.assert_array_equal(parse_matrix("I", p=3), np.eye(3))
    np.testing.assert_array_equal(parse_matrix("4,2;2,5"), [[4, 2], [2, 5]])
    np.testing.assert_array_equal(parse_matrix("2"), [[2]])
    np.testing.assert_array_equal(parse_vector("1,-1"), [1, -1])


def test_sample_byte_identical(capsys):
    argv = ["sample", "--sampler", "mixture", "--sigma", "I2", "--mu", "0,0", "--s", "1", "--n", "3", "--seed", "1"]
    c1, o1, _ = run(capsys, *argv)
    c2, o2, _ = run(capsys, *argv)
    assert c1 == c2 == 0
    assert o1 == o2
    rows = [line.split(",") for line in o1.splitlines()]
    assert len(rows) == 3 and all(len(r) == 2 for r in rows)


def test_sample_matches_library(capsys):
    _, out, _ = run(capsys, "sample", "--sigma", "4,2;2,5", "--mu", "1,-1", "--s", "2.5", "--n", "20", "--seed", "3")
    parsed = np.array([[float(v) for v in line.split(",")] for line in out.splitlines()])
    direct = sample_mixture(RngStream(3), GalParams([[4, 2], [2, 5]], [1, -1], 2.5), 20).data
    np.testing.assert_array_equal(parsed, direct)


def test_sample_json_and_header(capsys):
    _, out, _ = run(capsys, "sample", "--sampler", "matrix-product", "--sigma", "I2", "--mu", "1,0", "--d", "3",
                    "--n", "4", "--format", "json")
    doc = json.loads(out)
    assert doc["meta"]["sampler"] == "matrix-product"
    assert doc["meta"]["seed"] == 7
    assert len(doc["rows"]) == 4 and all(isinstance(v, str) for v in doc["rows"][0])
    _, out, _ = run(capsys, "sample", "--sigma", "I2", "--s", "1", "--n", "2", "--header")
    assert out.splitlines()[0] == "x1,x2"


def test_sample_invalid_shape(capsys):
    code, out, err = run(capsys, "sample", "--sigma", "I2", "--s", "-1")
    assert code == 2
    assert out == ""
    assert err.startswith("NonPositiveShape")
    assert len(err.strip().splitlines()) == 1


def test_pdf_cf_moments(capsys):
    code, out, _ = run(capsys, "pdf", "--sigma", "2", "--mu", "0", "--s", "1", "--x", "1")
    assert code == 0
    assert float(out.split(",")[0]) == pytest.approx(-1.6931471805599453, rel=1e-15)
    code, out, _ = run(capsys, "cf", "--sigma", "2", "--mu", "1", "--s", "1", "--u", "1")
    re, im = map(float, out.strip().split(","))
    assert (re, im) == (pytest.approx(0.4, abs=1e-15), pytest.approx(0.2, abs=1e-15))
    code, out, _ = run(capsys, "moments", "--sigma", "I2", "--mu", "1,0", "--s", "2")
    lines = out.splitlines()
    assert [float(v) for v in lines[0].split(",")[1:]] == [2, 0]
    assert [float(v) for v in lines[1].split(",")[1:]] == [4, 0, 0, 2]


def test_pdf_pole_and_singular(capsys):
    code, out, _ = run(capsys, "pdf", "--sigma", "I2", "--s", "1", "--x", "0,0", "--x", "1,1")
    assert code == 0
    first, second = out.splitlines()
    assert first.split(",")[0] == "inf"
    assert float(second.split(",")[0]) < 0
    code, _, err = run(capsys, "pdf", "--sigma", "1,1;1,1", "--s", "1", "--x", "1,0")
    assert code == 2 and err.startswith("SingularSigma")


def test_verify_theorem_main(capsys):
    code, out, _ = run(capsys, "verify", "theorem-main", "--p", "2", "--d", "5", "--seed", "7")
    assert code == 0
    doc = json.loads(out)
    checks = {c["name"]: c for c in doc["checks"]}
    assert float(checks["energy"]["p_value"]) >= 0.005
    assert float(checks["ecf_a"]["max_abs_dev"]) <= float(checks["ecf_a"]["bound"])


def test_verify_convolution(capsys):
    code, out, _ = run(capsys, "verify", "convolution", "--s1", "1", "--s2", "1.5", "--seed", "7")
    assert code == 0, out


def test_verify_bad_d(capsys):
    code, _, err = run(capsys, "verify", "theorem-main", "--d", "0")
    assert code == 2
    assert "DimensionMismatch" in err


def test_verify_statistical_failure_exit_1(tmp_path, capsys):
    path = tmp_path / "normal.csv"
    rows = RngStream(1).normal(100_000)
    path.write_text("".join(f"{float(v)!r}\n" for v in rows))
    code, out, _ = run(capsys, "verify", "ks-laplace", "--input", str(path))
    assert code == 1
    assert json.loads(out)["passed"] is False


def test_unknown_suite_is_usage_error(capsys):
    with pytest.raises(SystemExit) as exc:
        main(["verify", "nope"])
    assert exc.value.code == 2


def test_wishart_pipeline():
    sample = galkit("sample", "--sampler", "matrix-product", "--p", "1", "--d", "2", "--sigma", "1", "--mu", "0",
                    "--n", "100000", "--seed", "5")
    assert sample.returncode == 0
    check = galkit("verify", "ks-laplace", "--b", "1", stdin=sample.stdout)
    assert check.returncode == 0, check.stdout + check.stderr
    assert json.loads(check.stdout)["passed"] is True


def test_roundtrip_through_file(tmp_path, capsys):
    path = tmp_path / "s.csv"
    argv = ["sample", "--sigma", "4,2;2,5", "--mu", "1,-1", "--s", "2", "--n", "20000", "--seed", "12", "--header"]
    assert run(capsys, *argv, "--output", str(path))[0] == 0
    params = GalParams([[4, 2], [2, 5]], [1, -1], 2.0)
    in_process = moment_check(sample_mixture(RngStream(12), params, 20000), params)
    code, out, _ = run(capsys, "verify", "moments", "--sigma", "4,2;2,5", "--mu", "1,-1", "--s", "2", "--input", str(path))
    assert code == 0
    from_file = json.loads(out)["checks"][0]
    assert from_file == dict(name="moments", **in_process.to_json())


def test_seed_env_override(monkeypatch, capsys):
    monkeypatch.setenv("GALKIT_SEED", "99")
    _, env_out, _ = run(capsys, "sample", "--sigma", "I2", "--s", "1", "--n", "5")
    _, flag_out, _ = run(capsys, "sample", "--sigma", "I2", "--s", "1", "--n", "5", "--seed", "99")
    assert env_out == flag_out
    _, explicit, _ = run(capsys, "sample", "--sigma", "I2", "--s", "1", "--n", "5", "--seed", "7")
    assert explicit != env_out


@pytest.mark.parametrize(
    "argv",
    [
        ["sample", "--sampler", "isotropic", "--sigma", "I3", "--d", "6", "--alpha", "2", "--n", "50", "--seed", "3"],
        ["sample", "--sampler", "matrix-product", "--sigma", "4,2;2,5", "--mu", "1,-1", "--d", "5", "--n", "50",
         "--format", "json"],
        ["pdf", "--sigma", "4,2;2,5", "--mu", "1,-1", "--s", "2.5", "--x", "0.5,0.5", "--x", "0,0", "--format", "json"],
        ["cf", "--sigma", "4,2;2,5", "--mu", "1,-1", "--s", "2.5", "--u", "0.3,0.1", "--header"],
        ["moments", "--sigma", "I3", "--mu", "1,2,3", "--s", "0.5", "--format", "json"],
        ["verify", "laplace-reduction", "--n", "20000", "--seed", "3"],
        ["verify", "corollary-pca", "--n", "2000", "--permutations", "50"],
    ],
)
def test_commands_byte_identical(argv):
    a, b = galkit(*argv), galkit(*argv)
    assert a.returncode == 0, a.stderr
    assert a.stdout == b.stdout and a.stdout
