"""Tests for the MCP tools and resources."""

import json

import pytest
from fastmcp import Client

from musicmeta_kg import main, mcp
from musicmeta_kg.serialization import parse_ntriples_star


@pytest.fixture
def document(fixture_path) -> str:
    return fixture_path.read_text(encoding="utf-8")


@pytest.fixture
async def ntriples(document) -> str:
    async with Client(mcp) as client:
        result = await client.call_tool("convert_metadata", {"document": document})
    return result.data


@pytest.mark.integration
class TestConvertMetadata:
    """Test the convert_metadata tool."""

    async def test_convert(self, document, fixture_graph):
        """Test that the tool returns the canonical lifted graph."""
        async with Client(mcp) as client:
            result = await client.call_tool("convert_metadata", {"document": document})

        assert parse_ntriples_star(result.data) == fixture_graph
        assert result.data.splitlines() == sorted(result.data.splitlines())

    async def test_convert_with_alignments(self, document):
        """Test alignment schemes passed as text."""
        async with Client(mcp) as client:
            result = await client.call_tool(
                "convert_metadata", {"document": document, "align": "mo", "format": "ttl"}
            )

        assert "mo:MusicArtist" in result.data
        assert result.data.startswith("@prefix")

    async def test_invalid_options(self, document):
        """Test that unknown schemes are reported."""
        async with Client(mcp) as client:
            with pytest.raises(Exception, match="Invalid conversion options"):
                await client.call_tool(
                    "convert_metadata", {"document": document, "align": "dbpedia"}
                )

    async def test_schema_mismatch(self):
        """Test a document that does not match the input schema."""
        async with Client(mcp) as client:
            with pytest.raises(Exception, match="does not match the input schema"):
                await client.call_tool("convert_metadata", {"document": '{"artists": [{}]}'})

    async def test_violations(self, fixture_data):
        """Test that record violations are listed with their paths."""
        fixture_data["artists"][0]["influences"] = ["Iggy Pop"]
        async with Client(mcp) as client:
            with pytest.raises(Exception, match=r"artists\[0\]\.influences\[0\]"):
                await client.call_tool(
                    "convert_metadata", {"document": json.dumps(fixture_data)}
                )


@pytest.mark.integration
class TestGraphTools:
    """Test validate_graph and describe_graph."""

    async def test_validate_bundled_suite(self, ntriples):
        """Test that the converted fixture passes the bundled suite."""
        async with Client(mcp) as client:
            result = await client.call_tool("validate_graph", {"ntriples": ntriples})

        report = result.structured_content
        assert report["passed"] == report["total"]
        assert report["results"][0]["id"] == "CQ-01"

    async def test_validate_custom_suite(self, ntriples):
        """Test a suite given as JSON text."""
        row = {
            "id": "X-1",
            "question": "Any orchestras?",
            "patterns": [["?o", "a", "mm:Orchestra"]],
        }
        async with Client(mcp) as client:
            result = await client.call_tool(
                "validate_graph", {"ntriples": ntriples, "suite": json.dumps({"questions": [row]})}
            )

        assert result.structured_content["passed"] == 1

    async def test_validate_invalid_suite(self, ntriples):
        """Test that broken suites are reported."""
        async with Client(mcp) as client:
            with pytest.raises(Exception, match="Invalid competency question suite"):
                await client.call_tool("validate_graph", {"ntriples": ntriples, "suite": "{}"})

    async def test_parse_error(self):
        """Test that malformed graphs are reported with their position."""
        async with Client(mcp) as client:
            with pytest.raises(Exception, match="line 1, column 1"):
                await client.call_tool("describe_graph", {"ntriples": "nonsense"})

    async def test_describe(self, ntriples, fixture_graph):
        """Test the graph summary."""
        async with Client(mcp) as client:
            result = await client.call_tool("describe_graph", {"ntriples": ntriples})

        stats = result.structured_content
        assert stats["triple_count"] == len(fixture_graph)
        assert stats["class_counts"]["mm:Musician"] == 4
        assert stats["annotation_count"] == 7


@pytest.mark.unit
class TestLookupTerm:
    """Test the lookup_term tool."""

    async def test_musician(self):
        """Test the details of mm:Musician."""
        async with Client(mcp) as client:
            result = await client.call_tool("lookup_term", {"qname": "mm:Musician"})

        details = result.structured_content
        assert details["iri"] == "https://w3id.org/polifonia/ontology/music-meta/Musician"
        assert details["kind"] == "Class"
        assert details["invented"] is False
        assert len(details["alignments"]) == 4

    async def test_unknown(self):
        """Test that unknown names are rejected."""
        async with Client(mcp) as client:
            with pytest.raises(Exception, match="Unknown vocabulary term"):
                await client.call_tool("lookup_term", {"qname": "mm:Banjo"})


@pytest.mark.unit
class TestResources:
    """Test the MCP resources."""

    async def test_vocabulary(self):
        """Test the registry listing."""
        async with Client(mcp) as client:
            contents = await client.read_resource("musicmeta://vocabulary")

        text = contents[0].text
        assert text.startswith("Music Meta vocabulary registry:")
        assert "mm:Musician: Class, 4 alignment(s)\n" in text
        assert "core:hasReference: ObjectProperty, 0 alignment(s) (minted)" in text

    async def test_input_schema(self):
        """Test that the schema uses camelCase keys."""
        async with Client(mcp) as client:
            contents = await client.read_resource("musicmeta://input_schema")

        schema = json.loads(contents[0].text)
        assert set(schema["properties"]) >= {"artists", "entities", "processes", "links"}
        assert "nameLanguage" in json.dumps(schema)

    async def test_competency_questions(self):
        """Test the bundled suite resource."""
        async with Client(mcp) as client:
            contents = await client.read_resource("musicmeta://competency_questions")

        questions = json.loads(contents[0].text)["questions"]
        assert questions[0]["id"] == "CQ-01"
        assert all("patterns" in q for q in questions)

    async def test_tools_listed(self):
        """Test that every tool is registered."""
        async with Client(mcp) as client:
            tools = {tool.name for tool in await client.list_tools()}

        assert tools == {"convert_metadata", "validate_graph", "describe_graph", "lookup_term"}


@pytest.mark.unit
class TestMain:
    """Test transport selection of the server entry point."""

    def test_stdio_by_default(self, mocker, monkeypatch):
        """Test that stdio is used without MUSICMETA_MCP_TRANSPORT."""
        monkeypatch.delenv("MUSICMETA_MCP_TRANSPORT", raising=False)
        run = mocker.patch.object(mcp, "run")
        main()
        run.assert_called_once_with(transport="stdio")

    def test_http(self, mocker, monkeypatch):
        """Test the HTTP transport with host and port from the environment."""
        monkeypatch.setenv("MUSICMETA_MCP_TRANSPORT", "http")
        monkeypatch.setenv("MUSICMETA_MCP_PORT", "8123")
        monkeypatch.delenv("MUSICMETA_MCP_HOST", raising=False)
        run = mocker.patch.object(mcp, "run")
        main()
        run.assert_called_once_with(transport="http", host="127.0.0.1", port=8123)
