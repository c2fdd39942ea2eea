import json
import math

import pytest

from entangle_id import __version__
from entangle_id.approximation import min_over_k_bound, solve_pure_approximation
from entangle_id.catalysis import verify_catalyst
from entangle_id.cli import SEED_ENV, main, make_report, parse_state, run, serialize
from entangle_id.errors import InvariantViolation, ParseError
from entangle_id.schmidt import BipartitePureState, SchmidtVector, schmidt_spectrum


@pytest.fixture
def files(tmp_path):
    def write(name, doc):
        path = tmp_path / name
        path.write_text(json.dumps(doc))
        return str(path)

    return {
        "phi1": write("phi1.json", {"schmidt": [0.4, 0.4, 0.1, 0.1]}),
        "phi2": write("phi2.json", {"schmidt": [0.5, 0.25, 0.25]}),
        "cat": write("cat.json", {"schmidt": [0.6, 0.4]}),
        "bell": write("bell.json", {"dims": [2, 2], "amplitudes": [[0.7071067811865476, 0], [0, 0], [0, 0], [0.7071067811865476, 0]]}),
        "bad": write("bad.json", {"schmidt": [0.5, 0.5, 0.5]}),
        "_dir": tmp_path,
    }


def invoke(capsys, argv):
    code = main(argv)
    out, err = capsys.readouterr()
    return code, (json.loads(out) if out else None), err


class TestParseState:
    def test_schmidt(self):
        assert parse_state('{"schmidt":[0.4,0.4,0.1,0.1]}').probs == (0.4, 0.4, 0.1, 0.1)

    def test_unsorted_is_sorted(self):
        assert parse_state('{"schmidt":[0.1,0.4,0.1,0.4]}').probs == (0.4, 0.4, 0.1, 0.1)

    def test_sum_violation(self):
        with pytest.raises(InvariantViolation):
            parse_state('{"schmidt":[0.5,0.5,0.5]}')

    def test_bell_state(self):
        st = parse_state('{"dims":[2,2],"amplitudes":[[0.7071067811865476,0],[0,0],[0,0],[0.7071067811865476,0]]}')
        assert isinstance(st, BipartitePureState)
        assert schmidt_spectrum(st).probs == pytest.approx((0.5, 0.5), abs=1e-15)

    def test_position_annotated(self):
        with pytest.raises(ParseError, match="line 2 column"):
            parse_state('{"schmidt":\n [0.5, 0.5,]}')

    @pytest.mark.parametrize(
        "text",
        [
            "[0.5, 0.5]",
            '{"schmidt": "0.5"}',
            '{"dims": [2], "amplitudes": []}',
            '{"dims": [1, 2], "amplitudes": [1, 0]}',
        ],
    )
    def test_schema_errors(self, text):
        with pytest.raises(ParseError):
            parse_state(text)

    def test_both_forms(self):
        with pytest.raises(InvariantViolation):
            parse_state('{"schmidt": [1.0], "dims": [1, 1], "amplitudes": [[1, 0]]}')

    def test_round_trip(self):
        v = SchmidtVector((1 / 3, 0.3, 0.2, 1 - 1 / 3 - 0.5))
        doc = serialize({"schmidt": v.tolist()})
        assert parse_state(doc).allclose(v, atol=1e-12)


class TestCommands:
    def test_approx_solve(self, capsys, files):
        code, rep, _ = invoke(capsys, ["approx", "solve", "--target", files["phi2"], "--source", files["phi1"]])
        assert code == 0
        assert rep["command"] == "approx solve"
        assert rep["tool_version"] == __version__
        assert rep["result"]["p_error"] == pytest.approx(0.996410, abs=1e-6)
        assert rep["result"]["active_set"] == [2]

    def test_approx_solve_oracle(self, capsys, files):
        code, rep, _ = invoke(capsys, ["approx", "solve", "--target", files["phi2"], "--source", files["phi1"], "--oracle", "--resolution", "60"])
        assert code == 0
        assert rep["result"]["oracle"]["method"] == "BruteForce"
        assert rep["result"]["oracle"]["p_error"] <= rep["result"]["p_error"] + 1e-12

    def test_approx_bound(self, capsys, files):
        _, rep, _ = invoke(capsys, ["approx", "bound", "--target", files["phi2"], "--source", files["phi1"]])
        assert rep["result"]["k_star"] == 2

    def test_majorize(self, capsys, files):
        code, rep, _ = invoke(capsys, ["majorize", "--a", files["phi2"], "--b", files["phi1"]])
        assert code == 0 and rep["result"] == {"majorizes": False}

    def test_convertible_and_compare(self, capsys, files):
        _, rep, _ = invoke(capsys, ["convertible", "--source", files["phi1"], "--target", files["phi2"]])
        assert rep["result"] == {"convertible": False}
        _, rep, _ = invoke(capsys, ["compare", "--a", files["phi1"], "--b", files["phi2"]])
        assert rep["result"] == {"ordering": "Incommensurate"}

    def test_osc_from_amplitudes(self, capsys, files):
        _, rep, _ = invoke(capsys, ["osc", "--state", files["bell"]])
        assert rep["result"]["schmidt"] == [0.5, 0.5]

    def test_catalyze(self, capsys, files):
        _, rep, _ = invoke(capsys, ["catalyze", "verify", "--source", files["phi1"], "--target", files["phi2"], "--catalyst", files["cat"]])
        assert rep["result"]["catalyzed"] is True
        _, rep, _ = invoke(capsys, ["catalyze", "search", "--source", files["phi1"], "--target", files["phi2"], "--catalyst-dim", "2", "--resolution", "10"])
        assert rep["result"]["catalyst"] == [0.6, 0.4]

    def test_protocol_simulate(self, capsys, files):
        argv = ["protocol", "simulate", "--kind", "catalysis", "--source", files["phi1"], "--target", files["phi2"],
                "--catalyst", files["cat"], "--strategy", "locc", "--rounds", "2000", "--trials", "2000", "--seed", "7"]
        code, rep, _ = invoke(capsys, argv)
        assert code == 0
        assert rep["result"]["analytic"] == pytest.approx(0.000752, abs=1e-6)
        assert set(rep["result"]) == {"rate", "std_error", "analytic", "rounds", "trials"}

    def test_protocol_seed_from_env(self, capsys, monkeypatch):
        monkeypatch.setenv(SEED_ENV, "99")
        _, rep, _ = invoke(capsys, ["protocol", "simulate", "--kind", "maximally-entangled", "--dim", "2", "--strategy", "separable", "--rounds", "1", "--trials", "10"])
        assert rep["inputs"]["seed"] == 99

    def test_fixed_strategy(self, capsys, files):
        _, rep, _ = invoke(capsys, ["protocol", "simulate", "--kind", "catalysis", "--source", files["phi1"], "--target", files["phi2"],
                                    "--catalyst", files["cat"], "--strategy", "fixed", "--spectrum", files["phi2"], "--rounds", "5", "--trials", "10"])
        assert rep["result"]["rate"] == 1.0

    def test_tol_override(self, capsys, files):
        code, _, _ = invoke(capsys, ["majorize", "--a", files["phi2"], "--b", files["phi1"], "--tol", "1e-9"])
        assert code == 0
        code, _, _ = invoke(capsys, ["--tol", "1e-9", "majorize", "--a", files["phi2"], "--b", files["phi1"]])
        assert code == 0


class TestExitCodes:
    @pytest.mark.parametrize("argv", [[], ["nope"], ["approx"], ["majorize", "--a", "x.json"], ["catalyze", "search", "--source", "a", "--target", "b"]])
    def test_usage_errors(self, capsys, argv):
        code, rep, err = invoke(capsys, argv)
        assert code == 2 and rep is None and err

    def test_missing_file(self, capsys, files):
        code, _, err = invoke(capsys, ["osc", "--state", str(files["_dir"] / "missing.json")])
        assert code == 2 and "missing.json" in err

    def test_domain_error(self, capsys, files):
        code, rep, err = invoke(capsys, ["osc", "--state", files["bad"]])
        assert code == 3 and rep is None and "NotNormalized" in err

    def test_already_convertible(self, capsys, files):
        code, _, err = invoke(capsys, ["catalyze", "search", "--source", files["phi2"], "--target", files["phi2"], "--catalyst-dim", "2", "--resolution", "10"])
        assert code == 3 and "AlreadyConvertible" in err

    def test_missing_catalysis_flags(self, capsys, files):
        code, _, _ = invoke(capsys, ["protocol", "simulate", "--kind", "catalysis", "--strategy", "locc", "--rounds", "1", "--trials", "1"])
        assert code == 2


class TestThinAdapter:
    def test_solve_matches_library(self, files):
        code, report = run(["approx", "solve", "--target", files["phi2"], "--source", files["phi1"]])
        lib = solve_pure_approximation(SchmidtVector((0.5, 0.25, 0.25)), SchmidtVector((0.4, 0.4, 0.1, 0.1)))
        expected = make_report("approx solve", report["inputs"], lib.to_dict())
        assert serialize(report) == serialize(expected)

    def test_verify_matches_library(self, files):
        _, report = run(["catalyze", "verify", "--source", files["phi1"], "--target", files["phi2"], "--catalyst", files["cat"]])
        lib = verify_catalyst(SchmidtVector((0.4, 0.4, 0.1, 0.1)), SchmidtVector((0.5, 0.25, 0.25)), SchmidtVector((0.6, 0.4)))
        assert json.loads(serialize(report))["result"] == json.loads(serialize({"r": lib.to_dict()}))["r"]

    def test_bound_matches_library(self, files):
        _, report = run(["approx", "bound", "--target", files["phi2"], "--source", files["phi1"]])
        k, b = min_over_k_bound(SchmidtVector((0.5, 0.25, 0.25)), SchmidtVector((0.4, 0.4, 0.1, 0.1)))
        assert report["result"] == {"k_star": k, "bound": b}

    def test_byte_stable(self, files):
        argv = ["approx", "solve", "--target", files["phi2"], "--source", files["phi1"]]
        assert serialize(run(argv)[1]) == serialize(run(argv)[1])

    def test_twelve_significant_digits(self):
        text = serialize({"x": 1 / 3, "y": [math.pi], "z": math.nan})
        assert json.loads(text) == {"x": 0.333333333333, "y": [3.14159265359], "z": None}
