import subprocess
import sys

import numpy as np
import pytest

from sylvdyn.cli import main
from sylvdyn.formats import FormatError, format_matrix, parse_matrix, parse_trajectory, read_matrix, write_matrix
from sylvdyn.matfunc import oracle_expm
from sylvdyn.models import LambdaParams, TwoLevelParams, build_g_lambda, build_g_two_level


@pytest.fixture
def matrix_file(tmp_path):
    def make(M, name="g.txt"):
        path = tmp_path / name
        write_matrix(path, M)
        return str(path)
    return make


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


class TestFormats:
    def test_round_trip_is_bit_exact(self, rng, tmp_path):
        M = (rng.standard_normal((5, 5)) + 1j * rng.standard_normal((5, 5))) * 10.0 ** rng.integers(-300, 300, (5, 5))
        write_matrix(tmp_path / "m.txt", M)
        np.testing.assert_array_equal(read_matrix(tmp_path / "m.txt"), M)

    @pytest.mark.parametrize("text, where", [
        ("", "line 1"),
        ("two\n0,0\n", "line 1"),
        ("2\n0,0 1,0\n", "line 3"),
        ("2\n0,0 1,0\n0,0\n", "line 3: expected 2 entries, got 1"),
        ("1\n0,0\n1,0\n", "line 3: unexpected extra row"),
        ("1\n0\n", "line 2: entry 1"),
        ("1\nnan,0\n", "line 2: non-finite"),
        ("1\nx,0\n", "line 2: cannot parse"),
    ])
    def test_malformed(self, text, where):
        with pytest.raises(FormatError, match=where):
            parse_matrix(text)

    def test_trailing_blank_lines(self):
        np.testing.assert_array_equal(parse_matrix("1\n2,-1\n\n\n"), [[2 - 1j]])

    def test_docstring_sample(self):
        M = parse_matrix("3\n0,0 1.5,0 0,0\n-1.5,0 0,0 -2,0\n0,0 2,0 0,0\n")
        np.testing.assert_array_equal(M, build_g_two_level(TwoLevelParams(1.5, 2.0)))
        assert parse_matrix(format_matrix(M)).tolist() == M.tolist()


class TestExpm:
    def test_zero_matrix(self, capsys, matrix_file, tmp_path):
        out_path = tmp_path / "out.txt"
        code, out, _ = run(capsys, "expm", matrix_file(np.zeros((3, 3))), "-o", str(out_path), "--verify")
        assert code == 0
        np.testing.assert_array_equal(read_matrix(out_path), np.eye(3))
        assert "method: sylvester-confluent" in out
        assert "oracle residual: 0.000e+00" in out

    def test_two_level_verify(self, capsys, matrix_file):
        G = build_g_two_level(TwoLevelParams(3.0, 4.0))
        code, out, err = run(capsys, "expm", matrix_file(G), "--verify")
        assert code == 0
        np.testing.assert_allclose(parse_matrix(out), oracle_expm(G), atol=1e-13)
        assert "method: sylvester-distinct" in err
        residual = float(err.split("oracle residual:")[1])
        assert residual < 1e-9

    @pytest.mark.parametrize("method, label", [("oracle", "oracle"), ("spectral", "spectral")])
    def test_method_flag(self, capsys, matrix_file, method, label):
        code, _, err = run(capsys, "expm", matrix_file(np.diag([1.0, 2.0])), "--method", method)
        assert code == 0
        assert f"method: {label}" in err

    def test_malformed_file(self, capsys, tmp_path):
        bad = tmp_path / "bad.txt"
        bad.write_text("3\n0,0 0,0 0,0\n0,0 0,0 0,0\n0,0 0,0\n")
        code, _, err = run(capsys, "expm", str(bad))
        assert code == 2
        assert "line 4: expected 3 entries, got 2" in err

    def test_missing_file(self, capsys, tmp_path):
        code, _, err = run(capsys, "expm", str(tmp_path / "nope.txt"))
        assert code == 2
        assert "cannot read" in err

    def test_defective_spectral_is_numerical_error(self, capsys, matrix_file):
        code, _, err = run(capsys, "expm", matrix_file([[1.0, 1.0], [0.0, 1.0]]), "--method", "spectral")
        assert code == 3
        assert err.startswith("numerical error:")


class TestEig:
    def parse(self, out):
        lines = out.strip().splitlines()
        assert lines[0] == "re,im,multiplicity"
        return [(complex(float(r), float(i)), int(m)) for r, i, m in (ln.split(",") for ln in lines[1:])]

    def test_lambda_degenerate(self, capsys, matrix_file):
        code, out, _ = run(capsys, "eig", matrix_file(build_g_lambda(LambdaParams(3, 4, 0))))
        assert code == 0
        got = sorted((round(v.imag, 8), m) for v, m in self.parse(out))
        assert got == [(-10, 1), (-5, 2), (0, 2), (5, 2), (10, 1)]

    def test_diagonal(self, capsys, matrix_file):
        _, out, _ = run(capsys, "eig", matrix_file(np.diag([1.0, 2.0, 3.0])))
        assert self.parse(out) == [(1, 1), (2, 1), (3, 1)]

    def test_identity(self, capsys, matrix_file):
        _, out, _ = run(capsys, "eig", matrix_file(np.eye(4)))
        assert self.parse(out) == [(1, 4)]

    def test_cluster_tol_flag(self, capsys, matrix_file):
        _, out, _ = run(capsys, "eig", matrix_file(np.diag([1.0, 1.001])), "--cluster-tol", "0.01")
        assert [m for _, m in self.parse(out)] == [2]


class TestSimulate:
    def test_pi_pulse(self, capsys):
        code, out, _ = run(capsys, "simulate", "--model", "two-level", "--rabi", str(np.pi), "--steps", "10")
        assert code == 0
        labels, times, states = parse_trajectory(out)
        assert labels == ["u01", "v01", "w1"]
        assert len(times) == 11
        np.testing.assert_allclose(states[0], [0, 0, 1])
        np.testing.assert_allclose(states[-1], [0, 0, -1], atol=1e-12)

    def test_w_minus_convention(self, capsys):
        _, out, _ = run(capsys, "simulate", "--rabi", "0", "--convention", "w-minus", "--steps", "2")
        np.testing.assert_array_equal(parse_trajectory(out)[2], np.tile([0, 0, -1.0], (3, 1)))

    def test_lambda_zero_couplings(self, capsys):
        code, out, _ = run(capsys, "simulate", "--model", "lambda", "--steps", "4")
        assert code == 0
        labels, _, states = parse_trajectory(out)
        assert labels == [f"s{k}" for k in range(1, 9)]
        np.testing.assert_array_equal(states, np.tile(states[0], (5, 1)))
        assert states[0, 6] == -1.0

    def test_deterministic_output(self, capsys, tmp_path):
        args = ["simulate", "--model", "lambda", "--alpha", "1.1", "--beta", "0.4", "--detuning", "0.3",
                "--shape", "gaussian", "--steps", "20"]
        a = tmp_path / "a.csv"
        b = tmp_path / "b.csv"
        assert run(capsys, *args, "-o", str(a))[0] == 0
        assert run(capsys, *args, "-o", str(b))[0] == 0
        assert a.read_bytes() == b.read_bytes()

    def test_raw_matrix(self, capsys, matrix_file):
        g = build_g_two_level(TwoLevelParams(0.0, 1.0))
        code, out, _ = run(capsys, "simulate", "--model", "raw-matrix", "--matrix", matrix_file(g),
                           "--initial", "0,0,1", "--duration", str(np.pi), "--steps", "4")
        assert code == 0
        np.testing.assert_allclose(parse_trajectory(out)[2][-1], [0, 0, -1], atol=1e-12)

    def test_shared_shape_passes_strict(self, capsys):
        code, _, err = run(capsys, "simulate", "--detuning", "1", "--rabi", "1", "--strict-commuting",
                           "--shape", "gaussian", "--steps", "2")
        assert code == 0
        assert err == ""

    def test_mixed_shapes(self, capsys, tmp_path):
        cfg = tmp_path / "run.cfg"
        cfg.write_text("model = two-level\ndetuning = 1\nrabi = 2\nrabi.shape = gaussian\n")
        code, _, err = run(capsys, "simulate", str(cfg), "--strict-commuting", "--steps", "2")
        assert code == 4
        code, _, err = run(capsys, "simulate", str(cfg), "--steps", "2")
        assert code == 0
        assert err.startswith("warning:")

    def test_parameter_for_wrong_model(self, capsys):
        code, _, err = run(capsys, "simulate", "--model", "two-level", "--alpha", "1")
        assert code == 2
        assert "alpha" in err

    def test_raw_matrix_needs_initial(self, capsys, matrix_file):
        code, _, err = run(capsys, "simulate", "--model", "raw-matrix", "--matrix", matrix_file(np.eye(2)))
        assert code == 2


class TestConfig:
    def test_file_and_flag_override(self, capsys, tmp_path):
        cfg = tmp_path / "run.cfg"
        cfg.write_text("# pi pulse, halved below\nmodel = two-level\nrabi = 3.141592653589793 ; rad\n"
                       "duration = 1\nsteps = 4\n")
        _, out, _ = run(capsys, "simulate", str(cfg))
        np.testing.assert_allclose(parse_trajectory(out)[2][-1], [0, 0, -1], atol=1e-12)
        _, out, _ = run(capsys, "simulate", str(cfg), "--duration", "0.5")
        np.testing.assert_allclose(parse_trajectory(out)[2][-1], [0, -1, 0], atol=1e-12)

    @pytest.mark.parametrize("line, msg", [
        ("colour = red", "unknown key"),
        ("rabi = fast", "expected a number"),
        ("rabi.shape = square", "pulse shape"),
        ("method = magic", "method must be"),
    ])
    def test_bad_config(self, capsys, tmp_path, line, msg):
        cfg = tmp_path / "run.cfg"
        cfg.write_text(line + "\n")
        code, _, err = run(capsys, "simulate", str(cfg))
        assert code == 2
        assert msg in err


class TestCompare:
    def test_two_level(self, capsys):
        code, out, _ = run(capsys, "compare", "--detuning", "0.7", "--rabi", "1.4", "--steps", "50")
        assert code == 0
        rows = dict(line.split(",") for line in out.strip().splitlines()[1:])
        assert set(rows) == {"sylvester", "spectral", "adiabatic", "oracle", "max_pairwise"}
        assert float(rows["max_pairwise"]) < 1e-8
        assert float(rows["oracle"]) == 0.0

    def test_rejects_shaped_pulses(self, capsys):
        code, _, err = run(capsys, "compare", "--rabi", "1", "--shape", "gaussian")
        assert code == 2


def test_module_entry_point():
    res = subprocess.run([sys.executable, "-m", "sylvdyn", "--version"], capture_output=True, text=True)
    assert res.returncode == 0
    assert res.stdout.startswith("sylvdyn ")
