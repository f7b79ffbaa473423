import io
import json
from contextlib import redirect_stdout
from fractions import Fraction as F

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from wmtrop.cli import (
    JobSpec,
    SchemaError,
    format_rational,
    main,
    parse_bundle,
    parse_lattice,
    parse_matrix,
    parse_rational,
    parse_section,
    render,
    run,
    serialize_bundle,
    serialize_lattice,
    serialize_matrix,
    serialize_section,
)
from wmtrop.ratlin import Matrix


def run_cli(args):
    buf = io.StringIO()
    with redirect_stdout(buf):
        code = main(args)
    return code, buf.getvalue()


TATE_WMC = {"n": [[0, 1], [0, 0]], "phi": [[1, 0], [0, 5]], "q": 5, "i": 1}
TATE_MODEL = {"lattice": {"rank": 1, "generators": [["2"]]}, "alpha": "1"}
TATE_BUNDLE = {"lattice": {"rank": 1, "generators": [["2"]]}, "sigma": [[0]], "chi": ["1/5"]}


class TestParsing:
    def test_rational_forms(self):
        assert parse_rational("3/4") == F(3, 4)
        assert parse_rational("6/8") == F(3, 4)
        assert parse_rational(-7) == F(-7)
        assert parse_rational(" 2/3 ") == F(2, 3)

    def test_rational_rejects(self):
        for bad in ("1/0", "a", 1.5, True, None, "1.5"):
            with pytest.raises(SchemaError):
                parse_rational(bad)

    def test_rational_roundtrip_normalizes(self):
        assert format_rational(parse_rational("6/8")) == "3/4"
        assert format_rational(parse_rational(5)) == "5"

    def test_matrix_roundtrip(self):
        m = parse_matrix([[1, "1/2"], ["-3", 0]])
        assert m == Matrix([[1, F(1, 2)], [-3, 0]])
        assert parse_matrix(serialize_matrix(m)) == m

    def test_matrix_ragged_rejected(self):
        with pytest.raises(SchemaError):
            parse_matrix([[1, 2], [3]])

    def test_lattice_roundtrip_and_rank_deficiency(self):
        lat = parse_lattice({"rank": 1, "generators": [["2"]]})
        assert parse_lattice(serialize_lattice(lat)) == lat
        with pytest.raises(SchemaError):
            parse_lattice({"rank": 1, "generators": [["0"]]})
        with pytest.raises(SchemaError):
            parse_lattice({"rank": 2, "generators": [["1"]]})

    def test_bundle_roundtrip_and_asymmetry(self):
        b = parse_bundle(TATE_BUNDLE)
        assert parse_bundle(serialize_bundle(b)) == b
        bad = {
            "lattice": {"rank": 2, "generators": [["1", "0"], ["0", "2"]]},
            "sigma": [[2, 1], [1, 1]],
            "chi": ["0", "0"],
        }
        with pytest.raises(SchemaError):
            parse_bundle(bad)

    def test_section_roundtrip(self):
        s = parse_section(
            {"alpha": "1/5", "slopes": [1, 0], "base_value": "0",
             "slope_increment": 0, "value_increment": "1/5"}
        )
        assert parse_section(serialize_section(s)) == s


class TestCommands:
    def test_wmc_pass(self):
        code, out = run_cli(["wmc-check", "--json", json.dumps(TATE_WMC)])
        assert code == 0
        rep = json.loads(out)
        assert rep["status"] == "pass"
        assert rep["payload"]["graded_weights"] == {"-1": [[0, 1]], "1": [[2, 1]]}

    def test_wmc_fail_with_diagnostics(self):
        payload = dict(TATE_WMC, n=[[0, 0], [0, 0]])
        code, out = run_cli(["wmc-check", "--json", json.dumps(payload)])
        assert code == 1
        rep = json.loads(out)
        assert rep["status"] == "fail"
        assert any("filtration_mismatch" in d for d in rep["diagnostics"])

    def test_monodromy_filtration(self):
        code, out = run_cli(["monodromy-filtration", "--json", json.dumps({"n": [[0, 1], [0, 0]]})])
        assert code == 0
        rep = json.loads(out)
        assert rep["payload"]["jumps"] == [-1, 1]

    def test_weight_filtration(self):
        code, out = run_cli(
            ["weight-filtration", "--json", json.dumps({"phi": [[1, 0], [0, 5]], "q": 5})]
        )
        assert code == 0
        rep = json.loads(out)
        assert sorted(rep["payload"]["weights"]) == ["0", "2"]

    def test_weight_filtration_not_pure_is_error(self):
        code, out = run_cli(["weight-filtration", "--json", json.dumps({"phi": [[3]], "q": 5})])
        assert code == 2
        assert json.loads(out)["diagnostics"]

    def test_trop_model(self):
        code, out = run_cli(["trop-model", "--json", json.dumps(TATE_MODEL)])
        assert code == 0
        rep = json.loads(out)
        assert rep["payload"]["components"] == 2
        assert rep["payload"]["dual_graph"]["edges"] == [[0, 1, 2]]

    def test_trop_model_dot(self):
        code, out = run_cli(["trop-model", "--format", "dot", "--json", json.dumps(TATE_MODEL)])
        assert code == 0
        assert out == (
            "graph special_fiber {\n"
            '  v0 [label="P1 0"];\n'
            '  v1 [label="P1 1"];\n'
            "  v0 -- v1;\n"
            "  v0 -- v1;\n"
            "}\n"
        )

    def test_dot_unavailable_elsewhere(self):
        code, out = run_cli(["wmc-check", "--format", "dot", "--json", json.dumps(TATE_WMC)])
        assert code == 2

    def test_trop_tower(self):
        payload = dict(TATE_MODEL, p=3, level=0, op="preimages", cell=0, steps=1)
        code, out = run_cli(["trop-tower", "--json", json.dumps(payload)])
        assert code == 0
        assert json.loads(out)["payload"]["preimages"] == [0, 2, 4]
        payload = dict(TATE_MODEL, p=3, level=0, op="project", cell=5)
        code, out = run_cli(["trop-tower", "--json", json.dumps(payload)])
        assert json.loads(out)["payload"]["projected"] == 1

    def test_bundle_extend_suggests_level(self):
        payload = {"bundle": TATE_BUNDLE, "alpha": "1", "p": 5}
        code, out = run_cli(["bundle-extend", "--json", json.dumps(payload)])
        assert code == 1
        rep = json.loads(out)
        assert rep["status"] == "fail"
        assert rep["diagnostics"] == ["minimal level 1"]

    def test_bundle_extend_pass(self):
        bundle = dict(TATE_BUNDLE, chi=["0"])
        code, out = run_cli(["bundle-extend", "--json", json.dumps({"bundle": bundle, "alpha": "1"})])
        assert code == 0

    def test_bundle_minlevel(self):
        payload = {"bundle": TATE_BUNDLE, "alpha": "1", "p": 5}
        code, out = run_cli(["bundle-minlevel", "--json", json.dumps(payload)])
        assert code == 0
        assert json.loads(out)["payload"] == {"level": 1, "width": "1/5"}

    def test_bundle_minlevel_no_p_level(self):
        bundle = dict(TATE_BUNDLE, chi=["1/3"])
        payload = {"bundle": bundle, "alpha": "1", "p": 2}
        code, out = run_cli(["bundle-minlevel", "--json", json.dumps(payload)])
        assert code == 1
        assert json.loads(out)["payload"]["offending_primes"] == [3]

    def test_bundle_construct_and_verify(self):
        payload = {"bundle": TATE_BUNDLE, "alpha": "1/5"}
        code, out = run_cli(["bundle-construct-f", "--json", json.dumps(payload)])
        assert code == 0
        section = json.loads(out)["payload"]["section"]
        assert section["slopes"] == [1] + [0] * 9
        code, out = run_cli(
            ["bundle-verify-f", "--json", json.dumps({"bundle": TATE_BUNDLE, "section": section})]
        )
        assert code == 0

    def test_bundle_verify_reports_failure(self):
        bundle = dict(TATE_BUNDLE, chi=["0"])
        section = {"alpha": "1", "slopes": [1, 0], "base_value": "0",
                   "slope_increment": 0, "value_increment": "0"}
        code, out = run_cli(
            ["bundle-verify-f", "--json", json.dumps({"bundle": bundle, "section": section})]
        )
        assert code == 1
        assert any("slopes sum" in d for d in json.loads(out)["diagnostics"])

    def test_bundle_ample(self):
        bundle = {"lattice": {"rank": 1, "generators": [["2"]]}, "sigma": [[1]], "chi": ["0"]}
        code, out = run_cli(["bundle-ample", "--json", json.dumps({"bundle": bundle})])
        assert code == 0
        rep = json.loads(out)
        assert rep["payload"] == {"ample": True, "form": [["2"]], "leading_minors": ["2"]}
        bundle["sigma"] = [[0]]
        code, out = run_cli(["bundle-ample", "--json", json.dumps({"bundle": bundle})])
        assert code == 1

    def test_batch_order_and_worst_status(self):
        jobs = {
            "jobs": [
                {"command": "trop-model", "input": TATE_MODEL},
                {"command": "bundle-extend", "input": {"bundle": TATE_BUNDLE, "alpha": "1"}},
            ]
        }
        code, out = run_cli(["batch", "--json", json.dumps(jobs)])
        assert code == 1
        rep = json.loads(out)
        assert [r["command"] for r in rep["payload"]["reports"]] == ["trop-model", "bundle-extend"]
        assert [r["status"] for r in rep["payload"]["reports"]] == ["pass", "fail"]


class TestErrorContract:
    def test_missing_field_named(self):
        code, out = run_cli(["wmc-check", "--json", json.dumps({"phi": [[1]]})])
        assert code == 2
        rep = json.loads(out)
        assert rep["status"] == "error"
        assert rep["diagnostics"] == ["field 'n': missing required field"]

    def test_malformed_rational_named(self):
        code, out = run_cli(["monodromy-filtration", "--json", json.dumps({"n": [["1/0"]]})])
        assert code == 2
        assert "n[0][0]" in json.loads(out)["diagnostics"][0]

    def test_invalid_json(self):
        code, out = run_cli(["wmc-check", "--json", "{not json"])
        assert code == 2

    def test_schema_version_rejected(self):
        payload = dict(TATE_WMC, schema_version=2)
        code, out = run_cli(["wmc-check", "--json", json.dumps(payload)])
        assert code == 2

    def test_error_reports_have_diagnostics(self):
        bad_inputs = [
            ("wmc-check", {}),
            ("trop-model", {"lattice": {"rank": 1, "generators": [["0"]]}, "alpha": "1"}),
            ("bundle-extend", {"bundle": TATE_BUNDLE, "alpha": "3/4"}),
            ("trop-tower", dict(TATE_MODEL, op="sideways", cell=0)),
        ]
        for command, payload in bad_inputs:
            report = run(JobSpec(command, payload))
            assert report.status == "error"
            assert report.diagnostics, (command, payload)

    def test_unknown_command(self):
        report = run(JobSpec("no-such-thing", {}))
        assert report.status == "error"

    _json_scalars = st.one_of(
        st.none(), st.booleans(), st.integers(-50, 50), st.text(max_size=8)
    )
    _json_values = st.recursive(
        _json_scalars,
        lambda children: st.one_of(
            st.lists(children, max_size=4),
            st.dictionaries(st.text(max_size=6), children, max_size=4),
        ),
        max_leaves=12,
    )

    @given(
        command=st.sampled_from(
            ["wmc-check", "trop-model", "trop-tower", "bundle-extend", "bundle-verify-f"]
        ),
        payload=st.dictionaries(st.text(max_size=8), _json_values, max_size=4),
    )
    @settings(max_examples=120, deadline=None)
    def test_malformed_inputs_never_crash(self, command, payload):
        report = run(JobSpec(command, payload))
        assert report.status in ("pass", "fail", "error")
        if report.status == "error":
            assert report.diagnostics

    def test_tol_flag(self):
        # a huge tolerance accepts the reciprocal-but-impure quadratic
        payload = {"phi": [[0, -1], [1, 3]], "q": 5}
        code, _ = run_cli(["weight-filtration", "--json", json.dumps(payload)])
        assert code == 2
        code, _ = run_cli(["weight-filtration", "--tol", "10", "--json", json.dumps(payload)])
        assert code == 0

    def test_input_file(self, tmp_path):
        path = tmp_path / "job.json"
        path.write_text(json.dumps(TATE_MODEL))
        code, out = run_cli(["trop-model", "--input", str(path)])
        assert code == 0
        code, _ = run_cli(["trop-model", "--input", str(tmp_path / "missing.json")])
        assert code == 2


class TestDeterminism:
    FIXTURES = [
        ("wmc-check", TATE_WMC),
        ("monodromy-filtration", {"n": [[0, 1], [0, 0]]}),
        ("weight-filtration", {"phi": [[1, 0], [0, 5]], "q": 5}),
        ("trop-model", TATE_MODEL),
        ("trop-tower", dict(TATE_MODEL, p=3, op="preimages", cell=0)),
        ("bundle-extend", {"bundle": TATE_BUNDLE, "alpha": "1", "p": 5}),
        ("bundle-minlevel", {"bundle": TATE_BUNDLE, "alpha": "1", "p": 5}),
        ("bundle-construct-f", {"bundle": TATE_BUNDLE, "alpha": "1/5"}),
        (
            "bundle-verify-f",
            {
                "bundle": TATE_BUNDLE,
                "section": {"alpha": "1/5", "slopes": [1] + [0] * 9, "base_value": "0",
                            "slope_increment": 0, "value_increment": "1/5"},
            },
        ),
        ("bundle-ample", {"bundle": TATE_BUNDLE}),
    ]

    def test_byte_identical_reruns(self):
        for command, payload in self.FIXTURES:
            args = [command, "--json", json.dumps(payload)]
            code1, out1 = run_cli(args)
            code2, out2 = run_cli(args)
            assert (code1, out1) == (code2, out2)
            assert out1.encode() == out2.encode()

    def test_reports_parse_and_reserialize(self):
        for command, payload in self.FIXTURES:
            report = run(JobSpec(command, payload))
            text, _ = render(report, "json")
            doc = json.loads(text)
            assert doc["schema_version"] == 1
            assert doc["command"] == command
            assert json.dumps(doc, sort_keys=True, indent=2) + "\n" == text

    def test_text_format(self):
        code, out = run_cli(["trop-model", "--format", "text", "--json", json.dumps(TATE_MODEL)])
        assert code == 0
        assert out.startswith("trop-model: pass")
