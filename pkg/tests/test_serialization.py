"""Tests for the N-Triples-star and Turtle-star writers and the N-Triples-star parser."""

import random

import pytest

from musicmeta_kg.errors import NTriplesSyntaxError
from musicmeta_kg.lifting import LiftConfig, build_graph
from musicmeta_kg.rdf_core import (
    XSD_NS,
    BlankNode,
    Graph,
    Iri,
    Literal,
    QuotedTriple,
    Triple,
    make_literal,
    quote,
)
from musicmeta_kg.serialization import (
    SerializationFormat,
    SerializationOptions,
    parse_ntriples_star,
    relabel_blank_nodes,
    term_to_ntriples,
    write,
)
from musicmeta_kg.vocabulary import term

from .conftest import ex

CANONICAL = SerializationOptions(canonical=True)
TURTLE = SerializationOptions(format=SerializationFormat.TURTLE_STAR)
A, P, B = "<http://example.org/a>", "<http://example.org/p>", "<http://example.org/b>"
LANG_STRING = "<http://www.w3.org/1999/02/22-rdf-syntax-ns#langString>"


@pytest.mark.unit
class TestWriteNTriples:
    """Test the N-Triples-star writer."""

    def test_empty_graph(self):
        """Test that an empty graph is zero bytes."""
        assert write(Graph(), CANONICAL) == ""

    def test_quoted_annotation_line(self):
        """Test the RDF-star annotation syntax."""
        claim = Triple(ex("a"), ex("p"), ex("b"))
        graph = Graph([Triple(quote(claim), ex("ref"), ex("r"))])
        assert write(graph, CANONICAL) == (
            "<< <http://example.org/a> <http://example.org/p> <http://example.org/b> >> "
            "<http://example.org/ref> <http://example.org/r> .\n"
        )

    def test_literal_forms(self):
        """Test plain, tagged and typed literals."""
        assert term_to_ntriples(Literal("Heroes")) == '"Heroes"'
        assert term_to_ntriples(make_literal("Helden", language="de")) == '"Helden"@de'
        assert (
            term_to_ntriples(make_literal("1977", XSD_NS + "gYear"))
            == '"1977"^^<http://www.w3.org/2001/XMLSchema#gYear>'
        )

    def test_escapes(self):
        """Test string escapes and control characters."""
        lexical = 'say "hi"\\\n\r\t\x01\x7f é'
        assert term_to_ntriples(Literal(lexical)) == '"say \\"hi\\"\\\\\\n\\r\\t\\u0001\\u007F é"'

    def test_canonical_order_ignores_insertion_order(self):
        """Test that canonical output is a total order over triples."""
        triples = [Triple(ex(f"s{i % 4}"), ex(f"p{i % 3}"), Literal(str(i))) for i in range(30)]
        shuffled = list(triples)
        random.Random(3).shuffle(shuffled)
        assert write(Graph(triples), CANONICAL) == write(Graph(shuffled), CANONICAL)

    def test_non_canonical_follows_insertion_order(self):
        """Test that plain output keeps graph order."""
        graph = Graph([Triple(ex("z"), ex("p"), ex("o")), Triple(ex("a"), ex("p"), ex("o"))])
        assert write(graph).splitlines()[0].startswith("<http://example.org/z>")


@pytest.mark.unit
class TestWriteTurtle:
    """Test the Turtle-star writer."""

    def test_prefixes_first_and_sorted(self):
        """Test the prefix block."""
        text = write(Graph(), TURTLE)
        prefixes = [line for line in text.splitlines() if line.startswith("@prefix")]
        assert prefixes == sorted(prefixes)
        assert "@prefix mm: <https://w3id.org/polifonia/ontology/music-meta/> ." in prefixes

    def test_subject_grouping(self):
        """Test that predicates of one subject are grouped and rdf:type is written as 'a'."""
        bowie = Iri("https://w3id.org/polifonia/resource/artist/david-bowie")
        graph = Graph(
            [
                Triple(bowie, term("rdf:type"), term("mm:Musician")),
                Triple(bowie, term("core:name"), Literal("David Bowie")),
            ]
        )
        text = write(graph, TURTLE)
        assert (
            "<https://w3id.org/polifonia/resource/artist/david-bowie> "
            'a mm:Musician ;\n    core:name "David Bowie" .'
        ) in text

    def test_quoted_triples_inline(self):
        """Test quoted subjects with QNames."""
        claim = Triple(ex("x"), term("mm:isDerivedFrom"), ex("y"))
        graph = Graph([Triple(quote(claim), term("mm:derivationType"), Literal("cover"))])
        text = write(graph, TURTLE)
        assert (
            "<< <http://example.org/x> mm:isDerivedFrom <http://example.org/y> >> "
            'mm:derivationType "cover" .'
        ) in text
        assert text.endswith("\n")

    def test_unsafe_local_names_stay_full(self):
        """Test that local names outside the safe pattern keep angle brackets."""
        graph = Graph([Triple(Iri("http://www.wikidata.org/entity/Q1/x"), ex("p"), ex("o"))])
        assert "<http://www.wikidata.org/entity/Q1/x>" in write(graph, TURTLE)


@pytest.mark.unit
class TestParse:
    """Test the N-Triples-star parser."""

    def test_language_tagged(self):
        """Test a language-tagged literal."""
        graph = parse_ntriples_star('<http://example.org/a> <http://example.org/p> "x"@en .\n')
        (triple,) = graph
        assert triple.object == make_literal("x", language="en")

    def test_language_tag_case_is_normalised(self):
        """Test that @EN reads as the lower-case tag make_literal produces."""
        text = '<http://example.org/a> <http://example.org/p> "x"@EN-gb .\n'
        (triple,) = parse_ntriples_star(text)
        assert triple.object == make_literal("x", language="en-GB")
        written = write(parse_ntriples_star(text), CANONICAL)
        assert written == f'{A} {P} "x"@en-gb .\n'
        assert write(parse_ntriples_star(written), CANONICAL) == written

    def test_missing_object(self):
        """Test that a missing object is located."""
        with pytest.raises(NTriplesSyntaxError) as exc:
            parse_ntriples_star("<http://example.org/a> <http://example.org/p> .")
        assert exc.value.line == 1
        assert exc.value.column == 47
        assert "line 1, column 47" in str(exc.value)

    def test_error_line_number(self):
        """Test that errors report the offending line."""
        text = f"# comment\n\n{A} {P} {B} .\nnonsense\n"
        with pytest.raises(NTriplesSyntaxError) as exc:
            parse_ntriples_star(text)
        assert (exc.value.line, exc.value.column) == (4, 1)

    @pytest.mark.parametrize(
        "line",
        [
            '<http://example.org/a> <http://example.org/p> "open .',
            "<http://example.org/a> <http://example.org/p> <http://example.org/b>",
            "<http://example.org/a> <http://example.org/p> <http://example.org/b> . extra",
            '"lit" <http://example.org/p> <http://example.org/b> .',
            "<a> <http://example.org/p> <http://example.org/b> .",
            "<< <http://example.org/a> <http://example.org/p> <http://example.org/b> "
            "<http://example.org/q> <http://example.org/c> .",
            f'{A} {P} "x"^^{LANG_STRING} .',
        ],
    )
    def test_malformed(self, line):
        """Test that malformed lines raise syntax errors."""
        with pytest.raises(NTriplesSyntaxError):
            parse_ntriples_star(line)

    def test_byte_order_mark(self):
        """Test that a leading byte order mark is rejected."""
        with pytest.raises(NTriplesSyntaxError):
            parse_ntriples_star(f"\ufeff{A} {P} {B} .")

    def test_crlf_and_comments(self):
        """Test Windows line endings and trailing comments."""
        text = f"{A} {P} {B} . # note\r\n"
        assert len(parse_ntriples_star(text)) == 1

    def test_unicode_escape_in_literal(self):
        """Test \\u escapes."""
        graph = parse_ntriples_star(f'{A} {P} "H\\u00E9roes" .')
        assert next(iter(graph)).object == Literal("Héroes")

    def test_blank_nodes_relabelled(self):
        """Test that blank nodes are renamed by first occurrence."""
        text = (
            "_:zz <http://example.org/p> _:aa .\n"
            "_:aa <http://example.org/p> _:zz .\n"
        )
        graph = parse_ntriples_star(text)
        assert Triple(BlankNode("b0"), ex("p"), BlankNode("b1")) in graph
        assert Triple(BlankNode("b1"), ex("p"), BlankNode("b0")) in graph

    def test_nested_quoted_triple(self):
        """Test a depth-2 quoted subject."""
        inner = Triple(quote(Triple(ex("a"), ex("p"), ex("b"))), ex("q"), ex("c"))
        graph = Graph([Triple(quote(inner), ex("r"), Literal("d"))])
        assert parse_ntriples_star(write(graph, CANONICAL)) == graph


# Random graphs for the round-trip property

_ALPHABET = ["a", "Z", "0", " ", '"', "\\", "\n", "\r", "\t", "\x01", "\x7f"]
_ALPHABET += ["é", "ü", "→", "'", "#", ">"]
_DATATYPES = [XSD_NS + "integer", XSD_NS + "gYear", "http://example.org/dt#custom"]


def _random_literal(rng: random.Random) -> Literal:
    lexical = "".join(rng.choice(_ALPHABET) for _ in range(rng.randint(0, 8)))
    roll = rng.random()
    if roll < 0.3:
        return make_literal(lexical, language=rng.choice(["en", "de", "en-GB", "pt-br"]))
    if roll < 0.6:
        return make_literal(lexical, rng.choice(_DATATYPES))
    return make_literal(lexical)


def _random_resource(rng: random.Random):
    if rng.random() < 0.2:
        return BlankNode(f"x{rng.randint(0, 5)}")
    return ex(f"r{rng.randint(0, 9)}")


def _random_plain_triple(rng: random.Random) -> Triple:
    obj = _random_literal(rng) if rng.random() < 0.4 else _random_resource(rng)
    return Triple(_random_resource(rng), ex(f"p{rng.randint(0, 3)}"), obj)


def _random_graph(rng: random.Random, with_quoted: bool) -> Graph:
    triples = [_random_plain_triple(rng) for _ in range(rng.randint(0, 50))]
    if with_quoted:
        for _ in range(rng.randint(1, 5)):
            quoted = QuotedTriple(_random_plain_triple(rng))
            if rng.random() < 0.3:
                quoted = QuotedTriple(Triple(quoted, ex("ann"), _random_resource(rng)))
            if rng.random() < 0.5:
                triples.append(Triple(quoted, ex("hasReference"), _random_resource(rng)))
            else:
                triples.append(Triple(_random_resource(rng), ex("about"), quoted))
        triples = triples[:50]
    return Graph(triples)


@pytest.mark.slow
@pytest.mark.unit
class TestRoundTrip:
    """Property tests for parse(write(G))."""

    def test_round_trip_random_graphs(self):
        """Test 500 seeded graphs of up to 50 triples, a third with quoted triples."""
        rng = random.Random(1977)
        quoted_cases = 0
        for case in range(500):
            with_quoted = rng.random() < 1 / 3
            graph = _random_graph(rng, with_quoted)
            quoted_cases += any(t.depth() > 0 for t in graph)
            parsed = parse_ntriples_star(write(graph, CANONICAL))
            assert parsed == relabel_blank_nodes(graph), f"case {case}"
        assert quoted_cases >= 100

    def test_write_parse_write_fixpoint(self):
        """Test that output written from parsed text reads back to the same bytes."""
        rng = random.Random(14)
        for case in range(100):
            text = write(_random_graph(rng, rng.random() < 0.5), CANONICAL)
            once = write(parse_ntriples_star(text), CANONICAL)
            assert write(parse_ntriples_star(once), CANONICAL) == once, f"case {case}"


@pytest.mark.integration
class TestFixtureSerialization:
    """Serialization of the lifted acceptance fixture."""

    def test_fixture_round_trip(self, fixture_graph):
        """Test that the lifted fixture survives a round trip."""
        assert parse_ntriples_star(write(fixture_graph, CANONICAL)) == fixture_graph

    def test_fixture_turtle_uses_prefixes(self, aligned_graph):
        """Test that Turtle output of the fixture abbreviates vocabulary terms."""
        text = write(aligned_graph, TURTLE)
        assert "mm:Musician" in text
        assert "mo:MusicArtist" in text

    def test_parallel_lifting_is_byte_identical(self, dataset):
        """Test that worker threads do not change the canonical output."""
        sequential = write(build_graph(dataset, LiftConfig(workers=1)), CANONICAL)
        parallel = write(build_graph(dataset, LiftConfig(workers=4)), CANONICAL)
        assert sequential == parallel
