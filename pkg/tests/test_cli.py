import json

import jsonschema
import pytest

from epsnet.cli import EXIT_ERROR, EXIT_NEGATIVE, EXIT_POSITIVE, run, schema_path


@pytest.fixture()
def schema():
    with open(schema_path(), "r", encoding="utf-8") as fh:
        return json.load(fh)


def run_cmd(tmp_path, argv, name="report.json"):
    out = tmp_path / name
    code = run(["--out", str(out), *argv])
    data = json.loads(out.read_text()) if out.exists() else None
    return code, data


FAST_GRID = ["--k-min", "4", "--k-max", "20"]


class TestExitCodes:
    def test_dirichlet(self, tmp_path, schema, capsys):
        code, data = run_cmd(tmp_path, ["dirichlet", "--alpha", "sqrt2", "--N", "5"])
        assert code == EXIT_POSITIVE
        jsonschema.validate(data, schema)
        assert data["evidence"]["k"] == 7 and data["evidence"]["l"] == 5
        assert "(k,l)=(7,5)" in capsys.readouterr().out

    def test_two_period_positive(self, tmp_path, schema):
        code, data = run_cmd(
            tmp_path,
            ["two-period", "--f", "7 + eps^(1/eps)*sin(x1)", "--alpha", "sqrt2", "--R", "6", "--p", "4"],
        )
        assert code == EXIT_POSITIVE
        jsonschema.validate(data, schema)
        assert data["verdict"] == "positive"
        assert data["evidence"]["verdict"] == "constant"

    def test_two_period_not_applicable(self, tmp_path, schema):
        code, data = run_cmd(
            tmp_path,
            ["two-period", "--f", "sin(2*3.141592653589793*x1)", "--alpha", "sqrt2", "--R", "6", "--p", "2"],
        )
        assert code == EXIT_NEGATIVE
        jsonschema.validate(data, schema)
        assert data["verdict"] == "not-applicable"

    def test_decompose_so_identity(self, tmp_path, schema):
        m = tmp_path / "m.json"
        m.write_text("[[1,0],[0,1]]")
        code, data = run_cmd(tmp_path, ["decompose-so", "--matrix", str(m)])
        assert code == EXIT_POSITIVE
        jsonschema.validate(data, schema)
        thetas = [f["theta"] for f in data["evidence"]["schedule"]["factors"]]
        assert thetas == ["0"]
        assert data["evidence"]["reflected"] is False

    def test_invariance_negative(self, tmp_path, schema):
        code, data = run_cmd(
            tmp_path,
            ["invariance", "--f", "x1", "--dim", "2", "--box=-1:1,-1:1",
             "--rotation", "1,2,1.5707963267948966", "--p", "1", *FAST_GRID],
        )
        assert code == EXIT_NEGATIVE
        jsonschema.validate(data, schema)

    def test_invariance_positive_generalized_angle(self, tmp_path, schema):
        code, data = run_cmd(
            tmp_path,
            ["invariance", "--f", "exp(-(x1^2+x2^2))", "--dim", "2", "--box=-1:1,-1:1",
             "--rotation", "1,2,sin(1/eps)", "--p", "6", *FAST_GRID],
        )
        assert code == EXIT_POSITIVE
        jsonschema.validate(data, schema)

    def test_usage_error(self, tmp_path):
        code, _ = run_cmd(tmp_path, ["dirichlet", "--alpha", "nope", "--N", "5"])
        assert code == EXIT_ERROR

    def test_eval_domain_error(self, tmp_path):
        code, _ = run_cmd(
            tmp_path,
            ["classify", "--f", "ln(x1)", "--dim", "1", "--box=-1:1", *FAST_GRID],
        )
        assert code == EXIT_ERROR

    def test_bad_matrix_error(self, tmp_path):
        m = tmp_path / "m.json"
        m.write_text("[[1,0.5],[0,1]]")
        code, _ = run_cmd(tmp_path, ["decompose-so", "--matrix", str(m)])
        assert code == EXIT_ERROR


class TestMoreCommands:
    def test_classify(self, tmp_path, schema):
        code, data = run_cmd(
            tmp_path,
            ["classify", "--f", "eps*sin(x1)", "--dim", "1", "--box=-1:1", *FAST_GRID],
        )
        assert code == EXIT_POSITIVE
        jsonschema.validate(data, schema)
        assert data["evidence"]["negligible_order"] == 1

    def test_liouville(self, tmp_path, schema):
        code, data = run_cmd(tmp_path, ["liouville", "--alpha", "cbrt2"])
        assert code == EXIT_POSITIVE
        jsonschema.validate(data, schema)
        assert data["evidence"]["M"] == 7

    def test_corollary_pair(self, tmp_path, schema):
        code, data = run_cmd(tmp_path, ["corollary-pair", "--alpha", "phi", "--R", "4"])
        assert code == EXIT_POSITIVE
        assert (data["evidence"]["k"], data["evidence"]["l"]) == (5, 3)

    def test_one_param(self, tmp_path, schema):
        code, data = run_cmd(
            tmp_path,
            ["one-param", "--f", "exp(-(x1^2+x2^2))", "--dim", "2", "--kind", "rotation",
             "--i", "1", "--j", "2", "--real-thetas", "0.1,1.0", "--gen-theta", "2+sin(1/eps)",
             "--box=-1:1,-1:1", "--p", "4", *FAST_GRID],
        )
        assert code == EXIT_POSITIVE
        jsonschema.validate(data, schema)
        assert data["evidence"]["hypothesis_failed"] is False

    def test_rotation_random_seeded(self, tmp_path, schema):
        code, data = run_cmd(
            tmp_path,
            ["--seed", "3", "rotation", "--f", "exp(-(x1^2+x2^2))", "--dim", "2",
             "--random", "--box=-1:1,-1:1", "--p", "4", *FAST_GRID],
        )
        assert code == EXIT_POSITIVE
        jsonschema.validate(data, schema)

    def test_lorentz_matrix(self, tmp_path, schema):
        from epsnet.decompose import boost_matrix

        m = tmp_path / "L.json"
        m.write_text(json.dumps(boost_matrix(3, 0.5).tolist()))
        code, data = run_cmd(
            tmp_path,
            ["lorentz", "--f", "exp(-(x1^2-x2^2-x3^2)^2)", "--dim", "3", "--matrix", str(m),
             "--box=-1:1,-1:1,-1:1", "--samples", "9", "--p", "4", *FAST_GRID],
        )
        assert code == EXIT_POSITIVE
        jsonschema.validate(data, schema)

    def test_decompose_lorentz(self, tmp_path, schema):
        from epsnet.decompose import boost_matrix

        m = tmp_path / "L.json"
        m.write_text(json.dumps(boost_matrix(3, 1.25).tolist()))
        code, data = run_cmd(tmp_path, ["decompose-lorentz", "--matrix", str(m)])
        assert code == EXIT_POSITIVE
        assert data["evidence"]["theta"] == "1.25"

    def test_translation(self, tmp_path, schema):
        code, data = run_cmd(
            tmp_path,
            ["translation", "--f", "3+eps*0", "--dim", "1", "--box=-2:2",
             "--h-samples", "0.5;1.0", "--p", "4", *FAST_GRID],
        )
        assert code == EXIT_POSITIVE
        jsonschema.validate(data, schema)

    def test_invariance_with_matrix_element(self, tmp_path, schema):
        element = json.dumps({"matrix": [["0", "-1"], ["1", "0"]]})
        code, data = run_cmd(
            tmp_path,
            ["invariance", "--f", "exp(-(x1^2+x2^2))", "--dim", "2", "--box=-1:1,-1:1",
             "--element", element, "--p", "4", *FAST_GRID],
        )
        assert code == EXIT_POSITIVE
        jsonschema.validate(data, schema)

    def test_decompose_lorentz_flags(self, tmp_path, schema):
        from epsnet.decompose import boost_matrix, time_inversion_matrix

        m = tmp_path / "L.json"
        m.write_text(json.dumps((time_inversion_matrix(3) @ boost_matrix(3, 0.5)).tolist()))
        code, data = run_cmd(tmp_path, ["decompose-lorentz", "--matrix", str(m)])
        assert code == EXIT_POSITIVE
        jsonschema.validate(data, schema)
        assert data["evidence"]["time_inverted"] is True
        assert data["evidence"]["orientation_inverted"] is False

    def test_explorer(self, tmp_path, schema):
        code, data = run_cmd(
            tmp_path,
            ["explore-open-question", "--f", "2", "--alpha", "pi", "--R", "6", "--p", "2", *FAST_GRID],
        )
        assert code == EXIT_POSITIVE
        jsonschema.validate(data, schema)
        assert data["verdict"] == "exploratory"
        assert data["evidence"]["theorem_grade"] is False


class TestConfigPrecedence:
    def test_flags_override_config_over_defaults(self, tmp_path):
        cfg = tmp_path / "cfg.json"
        cfg.write_text(json.dumps({"k_max": 12, "max_order": 0}))
        out = tmp_path / "r.json"
        code = run(
            ["--config", str(cfg), "--out", str(out),
             "classify", "--f", "eps*sin(x1)", "--dim", "1", "--box=-1:1", "--k-max", "10"]
        )
        assert code == EXIT_POSITIVE
        data = json.loads(out.read_text())
        # flag wins over config: grid has k = 4..10
        assert len(data["evidence"]["sups"]) == 7

    def test_config_overrides_default(self, tmp_path):
        cfg = tmp_path / "cfg.json"
        cfg.write_text(json.dumps({"k_max": 12}))
        out = tmp_path / "r.json"
        run(["--config", str(cfg), "--out", str(out),
             "classify", "--f", "eps*sin(x1)", "--dim", "1", "--box=-1:1"])
        data = json.loads(out.read_text())
        assert len(data["evidence"]["sups"]) == 9


class TestDeterminism:
    def test_byte_identical_reports(self, tmp_path):
        jobs = [
            (["--seed", "7", "rotation", "--f", "exp(-(x1^2+x2^2))", "--dim", "2",
              "--random", "--box=-1:1,-1:1", "--p", "4", *FAST_GRID], "rot"),
            (["classify", "--f", "eps*sin(x1)", "--dim", "1", "--box=-1:1", *FAST_GRID], "cls"),
            (["dirichlet", "--alpha", "sqrt2", "--N", "100"], "dir"),
            (["two-period", "--f", "7 + eps^(1/eps)*sin(x1)", "--alpha", "sqrt2",
              "--R", "6", "--p", "3", *FAST_GRID], "tp"),
        ]
        for argv, name in jobs:
            out1 = tmp_path / f"{name}1.json"
            out2 = tmp_path / f"{name}2.json"
            assert run(["--out", str(out1), *argv]) == run(["--out", str(out2), *argv])
            assert out1.read_bytes() == out2.read_bytes()
