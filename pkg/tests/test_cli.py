"""Tests for the musicmeta command line."""

import io
import json

import pytest

from musicmeta_kg.cli import EXIT_ERROR, EXIT_FAILED, EXIT_OK, main
from musicmeta_kg.config import ENV_VARS, LOG_LEVEL_VAR
from musicmeta_kg.serialization import parse_ntriples_star

BOWIE = "<https://w3id.org/polifonia/resource/artist/david-bowie>"


@pytest.fixture(autouse=True)
def clean_env(monkeypatch, tmp_path):
    """Run every command without MUSICMETA_* variables or a stray .env file."""
    for var in [*ENV_VARS.values(), LOG_LEVEL_VAR]:
        monkeypatch.delenv(var, raising=False)
    monkeypatch.chdir(tmp_path)


def run(*argv: str) -> tuple[int, str, str]:
    stdout, stderr = io.StringIO(), io.StringIO()
    code = main(list(argv), stdout=stdout, stderr=stderr)
    return code, stdout.getvalue(), stderr.getvalue()


@pytest.fixture
def graph_file(tmp_path, fixture_path):
    path = tmp_path / "graph.nt"
    code, _, _ = run("convert", str(fixture_path), "--canonical", "--out", str(path))
    assert code == EXIT_OK
    return path


@pytest.mark.integration
class TestConvert:
    """Test the convert command."""

    def test_stdout(self, fixture_path, fixture_graph):
        """Test conversion to stdout with a summary on stderr."""
        code, out, err = run("convert", str(fixture_path), "--canonical")
        assert code == EXIT_OK
        assert parse_ntriples_star(out) == fixture_graph
        assert f"{len(fixture_graph)} triples (artists: 8, entities: 6" in err

    def test_alignment_lines(self, fixture_path):
        """Test the four type lines of David Bowie with every scheme enabled."""
        code, out, _ = run(
            "convert", str(fixture_path), "--align", "mo,doremus,wikidata", "--canonical"
        )
        assert code == EXIT_OK
        rdf_type = "<http://www.w3.org/1999/02/22-rdf-syntax-ns#type>"
        lines = [line for line in out.splitlines() if line.startswith(f"{BOWIE} {rdf_type} ")]
        assert len(lines) == 4
        assert f"{BOWIE} {rdf_type} <http://purl.org/ontology/mo/MusicArtist> ." in lines

    def test_out_file_and_turtle(self, tmp_path, fixture_path):
        """Test Turtle output written to a file."""
        target = tmp_path / "graph.ttl"
        code, out, _ = run("convert", str(fixture_path), "--format", "ttl", "--out", str(target))
        assert code == EXIT_OK
        assert out == ""
        assert target.read_text(encoding="utf-8").startswith("@prefix")

    def test_config_file(self, tmp_path, fixture_path):
        """Test defaults taken from a config file and overridden by flags."""
        config = tmp_path / "musicmeta.json"
        config.write_text(json.dumps({"align": "mo", "canonical": True}), encoding="utf-8")
        code, out, _ = run("convert", str(fixture_path), "--config", str(config))
        assert code == EXIT_OK
        assert "<http://purl.org/ontology/mo/MusicArtist>" in out
        assert out.splitlines() == sorted(out.splitlines())

    def test_env_variable(self, monkeypatch, fixture_path):
        """Test that MUSICMETA_ALIGN enables alignments."""
        monkeypatch.setenv("MUSICMETA_ALIGN", "doremus")
        code, out, _ = run("convert", str(fixture_path))
        assert code == EXIT_OK
        assert "<http://erlangen-crm.org/E21_Person>" in out

    def test_no_provenance(self, fixture_path):
        """Test that --no-provenance drops the reference annotations."""
        code, out, _ = run("convert", str(fixture_path), "--no-provenance")
        assert code == EXIT_OK
        assert "hasReference" not in out

    def test_violations(self, tmp_path, fixture_data):
        """Test that record violations are listed and nothing is written."""
        fixture_data["entities"][1]["derivations"] = [{"targetKey": "Helden"}]
        source = tmp_path / "bad.json"
        source.write_text(json.dumps(fixture_data), encoding="utf-8")
        target = tmp_path / "out.nt"
        code, out, err = run("convert", str(source), "--out", str(target))
        assert code == EXIT_FAILED
        assert out == ""
        assert "entities[1].derivations[0].targetKey:" in err
        assert not target.exists()

    def test_violations_as_json(self, tmp_path, fixture_data):
        """Test the JSON violation report."""
        fixture_data["artists"][0]["influences"] = ["Iggy Pop"]
        source = tmp_path / "bad.json"
        source.write_text(json.dumps(fixture_data), encoding="utf-8")
        code, out, _ = run("convert", str(source), "--report", "json")
        assert code == EXIT_FAILED
        (violation,) = json.loads(out)["violations"]
        assert violation["path"] == "artists[0].influences[0]"

    @pytest.mark.parametrize("content", ["{not json", '{"artists": [{"key": "x"}]}'])
    def test_invalid_document(self, tmp_path, content):
        """Test that unreadable documents are usage errors."""
        source = tmp_path / "broken.json"
        source.write_text(content, encoding="utf-8")
        code, _, err = run("convert", str(source))
        assert code == EXIT_ERROR
        assert "not a valid metadata document" in err

    def test_missing_input(self, tmp_path):
        """Test a missing input file."""
        code, _, err = run("convert", str(tmp_path / "missing.json"))
        assert code == EXIT_ERROR
        assert "cannot read" in err

    def test_bad_settings(self, fixture_path):
        """Test unknown alignment schemes and invalid base IRIs."""
        assert run("convert", str(fixture_path), "--align", "dbpedia")[0] == EXIT_ERROR
        assert run("convert", str(fixture_path), "--base-iri", "relative/")[0] == EXIT_ERROR


@pytest.mark.integration
class TestValidate:
    """Test the validate command."""

    def test_fixture_passes(self, graph_file):
        """Test that the bundled suite passes on the converted fixture."""
        code, out, err = run("validate", str(graph_file))
        assert code == EXIT_OK
        assert "competency questions passed" in out
        assert err == ""

    def test_json_report(self, graph_file):
        """Test the JSON report."""
        code, out, _ = run("validate", str(graph_file), "--report", "json", "--workers", "2")
        assert code == EXIT_OK
        report = json.loads(out)
        assert report["passed"] == report["total"]

    def test_empty_graph_fails(self, tmp_path):
        """Test that failing questions give exit code 1 and are named on stderr."""
        empty = tmp_path / "empty.nt"
        empty.write_text("", encoding="utf-8")
        code, _, err = run("validate", str(empty))
        assert code == EXIT_FAILED
        assert err.startswith("failed: CQ-01")

    def test_custom_suite(self, tmp_path, graph_file):
        """Test a suite file given on the command line."""
        suite = tmp_path / "suite.json"
        row = {"id": "X-1", "question": "Any releases?", "patterns": [["?r", "a", "mm:Release"]]}
        suite.write_text(json.dumps({"questions": [row]}), encoding="utf-8")
        code, out, _ = run("validate", str(graph_file), "--suite", str(suite))
        assert code == EXIT_OK
        assert "1/1 competency questions passed" in out

    def test_invalid_suite(self, tmp_path, graph_file):
        """Test that a broken suite is a usage error."""
        suite = tmp_path / "suite.json"
        row = {"id": "X-1", "question": "?", "patterns": [["?r", "a", "mm:Banjo"]]}
        suite.write_text(json.dumps([row]), encoding="utf-8")
        assert run("validate", str(graph_file), "--suite", str(suite))[0] == EXIT_ERROR

    @pytest.mark.parametrize(
        "body", ['{"cqs": []}', '{"questions": {"id": "X-1"}}', "42", '"questions"', "null"]
    )
    def test_malformed_suite_file(self, tmp_path, graph_file, body):
        """Test that a suite file of the wrong shape exits 2 with a message."""
        suite = tmp_path / "suite.json"
        suite.write_text(body, encoding="utf-8")
        code, out, err = run("validate", str(graph_file), "--suite", str(suite))
        assert code == EXIT_ERROR
        assert out == ""
        assert "invalid suite" in err
        assert "questions" in err

    def test_parse_error(self, tmp_path):
        """Test that malformed graphs report their position."""
        bad = tmp_path / "bad.nt"
        bad.write_text("<http://example.org/a> <http://example.org/p> .\n", encoding="utf-8")
        code, _, err = run("validate", str(bad))
        assert code == EXIT_ERROR
        assert "line 1, column 47" in err


@pytest.mark.integration
class TestStatsAndVocab:
    """Test the stats and vocab commands."""

    def test_stats(self, graph_file, fixture_graph):
        """Test the graph summary."""
        code, out, _ = run("stats", str(graph_file))
        assert code == EXIT_OK
        assert out.startswith(f"triples: {len(fixture_graph)}\n")
        assert "mm:Musician" in out

    def test_stats_missing_file(self, tmp_path):
        """Test a missing graph file."""
        assert run("stats", str(tmp_path / "nope.nt"))[0] == EXIT_ERROR

    def test_vocab(self):
        """Test the registry listing with a filter."""
        code, out, _ = run("vocab", "--filter", "mm:Musician")
        assert code == EXIT_OK
        lines = out.splitlines()
        assert lines[0].split() == ["qname", "kind", "alignments", "invented"]
        assert lines[1].split() == ["mm:Musician", "Class", "4"]

    def test_usage_error(self):
        """Test that a missing command is a usage error."""
        assert run()[0] == EXIT_ERROR
