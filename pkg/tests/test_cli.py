"""Command-line interface: exit codes, output formats, environment overrides."""

import json

import pytest

from arborchar.cli import EXIT_INPUT, EXIT_OK, EXIT_UNSUPPORTED, TOL_ENV, main


def _run(argv):
    try:
        return main(argv)
    except SystemExit as exc:
        return exc.code


class TestEmit:
    def test_text_output(self, capsys):
        assert _run(["emit", "D([1/1] *v [1/2])"]) == EXIT_OK
        out = capsys.readouterr().out
        assert "t" in out and "r1" in out

    def test_json_output_has_provenance(self, capsys):
        assert _run(["emit", "--format", "json", "D([1/1] *v [1/2])"]) == EXIT_OK
        payload = json.loads(capsys.readouterr().out)
        prov = payload["provenance"]
        assert prov["tool"] == "arborchar"
        assert prov["expression"] == "D([1/1] *v [1/2])"
        assert "version" in prov

    def test_out_file(self, tmp_path, capsys):
        dest = tmp_path / "pres.json"
        assert (
            _run(["emit", "--format", "json", "--out", str(dest), "D([1/2] *v [1/3])"])
            == EXIT_OK
        )
        payload = json.loads(dest.read_text())
        assert "equations" in payload or "eqs" in payload or payload

    def test_expression_from_file(self, tmp_path, capsys):
        src = tmp_path / "expr.txt"
        src.write_text("D([1/1] *v [1/2])\n")
        assert _run(["emit", "--file", str(src)]) == EXIT_OK

    def test_parse_error(self, capsys):
        assert _run(["emit", "D([0])"]) == EXIT_INPUT
        assert "error:" in capsys.readouterr().err

    def test_open_tangle_rejected(self, capsys):
        assert _run(["emit", "[2] *v [3]"]) == EXIT_INPUT

    def test_two_component_rejected_by_knot_engine(self, capsys):
        assert _run(["emit", "D([1/2])"]) == EXIT_INPUT

    def test_unsupported_link_shape(self, capsys):
        assert _run(["emit", "--link", "N([2])"]) == EXIT_UNSUPPORTED

    def test_supported_link_shape(self, capsys):
        assert _run(["emit", "--link", "D([3] *v [3] *v [3] *v [3])"]) == EXIT_OK


class TestComponents:
    def test_counts(self, capsys):
        assert _run(["components", "D([1/2])"]) == EXIT_OK
        assert capsys.readouterr().out.strip() == "2"
        assert _run(["components", "D([1/1] *v [1/2])"]) == EXIT_OK
        assert capsys.readouterr().out.strip() == "1"


class TestVerify:
    def test_single_suite(self, capsys):
        code = _run(["verify", "--suite", "identities", "--samples", "3"])
        assert code == EXIT_OK
        assert "identities: pass" in capsys.readouterr().out

    def test_report_file(self, tmp_path, capsys):
        dest = tmp_path / "report.json"
        code = _run(
            ["verify", "--suite", "key", "--samples", "2", "--out", str(dest)]
        )
        assert code == EXIT_OK
        payload = json.loads(dest.read_text())
        assert payload["reports"][0]["suite"] == "key"
        assert payload["reports"][0]["passed"] is True

    def test_env_tolerance(self, capsys, monkeypatch):
        # an absurdly tight tolerance from the environment forces failures
        monkeypatch.setenv(TOL_ENV, "1e-300")
        code = _run(["verify", "--suite", "identities", "--samples", "2"])
        assert code == 4
        monkeypatch.setenv(TOL_ENV, "1e-6")
        code = _run(["verify", "--suite", "identities", "--samples", "2"])
        assert code == EXIT_OK

    def test_flag_overrides_env(self, capsys, monkeypatch):
        monkeypatch.setenv(TOL_ENV, "1e-300")
        code = _run(
            ["verify", "--suite", "identities", "--samples", "2", "--tol", "1e-6"]
        )
        assert code == EXIT_OK


class TestWitness:
    ARGS = [
        "witness",
        "--t", "2.6+0.3j",
        "--t23", "0.7+0.9j",
        "--t34=-0.8+0.4j",
        "--t14=-0.7+0.5j",
    ]

    def test_random_family(self, capsys):
        code = _run(self.ARGS + ["--t13-count", "3", "--seed", "4"])
        assert code == EXIT_OK
        payload = json.loads(capsys.readouterr().out)
        assert payload["passed"] is True
        assert len(payload["samples"]) == 3
        assert payload["min_pairwise_gap"] > 1e-3

    def test_explicit_t13_list(self, capsys):
        code = _run(self.ARGS + ["--t13", "1.1+0.2j,0.6-0.5j"])
        assert code == EXIT_OK
        payload = json.loads(capsys.readouterr().out)
        assert len(payload["samples"]) == 2

    def test_bad_complex(self, capsys):
        code = _run(["witness", "--t", "nope", "--t23", "1", "--t34", "1", "--t14", "1"])
        assert code == EXIT_INPUT

    def test_side_condition_rejected(self, capsys):
        code = _run(
            ["witness", "--t", "2.6+0.3j", "--t23", "2", "--t34", "1", "--t14", "1",
             "--t13", "1.0"]
        )
        assert code == EXIT_INPUT


class TestTopLevel:
    def test_version(self, capsys):
        assert _run(["--version"]) == 0
        assert capsys.readouterr().out.strip()

    def test_missing_command(self):
        assert _run([]) == 2
