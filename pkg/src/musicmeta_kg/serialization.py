"""
N-Triples-star and Turtle-star writers, and an N-Triples-star parser.

Only N-Triples-star round-trips; Turtle output is for people to read.
"""

import logging
import re
from enum import Enum

from pydantic import BaseModel, Field

from .errors import InvalidIriError, InvalidLanguageTagError, NTriplesSyntaxError
from .rdf_core import (
    RDF_LANG_STRING,
    RDF_NS,
    XSD_STRING,
    BlankNode,
    Graph,
    Iri,
    Literal,
    QuotedTriple,
    Term,
    Triple,
)
from .vocabulary import PREFIXES

logger = logging.getLogger(__name__)

RDF_TYPE = RDF_NS + "type"

_ECHAR = {
    "\\": "\\\\",
    '"': '\\"',
    "\n": "\\n",
    "\r": "\\r",
    "\t": "\\t",
    "\b": "\\b",
    "\f": "\\f",
}
_UNECHAR = {"\\": "\\", '"': '"', "'": "'", "n": "\n", "r": "\r", "t": "\t", "b": "\b", "f": "\f"}
_PN_LOCAL_RE = re.compile(r"^[A-Za-z_][A-Za-z0-9_\-]*$")
_BNODE_LABEL_RE = re.compile(r"[A-Za-z0-9_](?:[A-Za-z0-9_.\-]*[A-Za-z0-9_\-])?")
_LANG_TAG_RE = re.compile(r"[A-Za-z]+(?:-[A-Za-z0-9]+)*")


class SerializationFormat(str, Enum):
    NTRIPLES_STAR = "nt"
    TURTLE_STAR = "ttl"

    @property
    def media_type(self) -> str:
        return {"nt": "application/n-triples", "ttl": "text/turtle"}[self.value]

    @property
    def extension(self) -> str:
        return f".{self.value}"


class SerializationOptions(BaseModel):
    """How a graph is written"""

    format: SerializationFormat = SerializationFormat.NTRIPLES_STAR
    canonical: bool = False
    prefixes: dict[str, str] = Field(default_factory=lambda: dict(PREFIXES))


def _escape_string(value: str) -> str:
    out = []
    for char in value:
        if char in _ECHAR:
            out.append(_ECHAR[char])
        elif ord(char) < 0x20 or ord(char) == 0x7F:
            out.append(f"\\u{ord(char):04X}")
        else:
            out.append(char)
    return "".join(out)


def decode_escape(text: str, pos: int) -> tuple[str, int] | None:
    """
    Decode the escape sequence whose backslash is at ``text[pos]``.

    Returns the character and the length of the sequence, or None when the
    sequence is malformed. Accepts what ``_escape_string`` writes plus the
    other N-Triples escapes.
    """
    following = text[pos + 1 : pos + 2]
    if following in _UNECHAR:
        return _UNECHAR[following], 2
    width = {"u": 4, "U": 8}.get(following)
    if width is None:
        return None
    digits = text[pos + 2 : pos + 2 + width]
    if len(digits) != width or not all(c in "0123456789abcdefABCDEF" for c in digits):
        return None
    code = int(digits, 16)
    if code > 0x10FFFF:
        return None
    return chr(code), 2 + width


def term_to_ntriples(term: Term) -> str:
    """Canonical N-Triples-star form of a single term."""
    if isinstance(term, Iri):
        return f"<{term.value}>"
    if isinstance(term, BlankNode):
        return f"_:{term.label}"
    if isinstance(term, Literal):
        text = f'"{_escape_string(term.lexical)}"'
        if term.language is not None:
            return f"{text}@{term.language}"
        if term.datatype == XSD_STRING:
            return text
        return f"{text}^^<{term.datatype}>"
    if isinstance(term, QuotedTriple):
        inner = term.triple
        parts = (term_to_ntriples(t) for t in (inner.subject, inner.predicate, inner.object))
        return "<< {} {} {} >>".format(*parts)
    raise TypeError(f"Not an RDF term: {term!r}")


def triple_to_ntriples(triple: Triple) -> str:
    return (
        f"{term_to_ntriples(triple.subject)} {term_to_ntriples(triple.predicate)} "
        f"{term_to_ntriples(triple.object)} ."
    )


def sort_key(triple: Triple) -> tuple[str, str, str]:
    """Codepoint order of the serialized subject, predicate and object."""
    return (
        term_to_ntriples(triple.subject),
        term_to_ntriples(triple.predicate),
        term_to_ntriples(triple.object),
    )


def canonical_triples(graph: Graph) -> list[Triple]:
    return sorted(graph, key=sort_key)


def write(graph: Graph, options: SerializationOptions | None = None) -> str:
    """
    Serialize a graph.

    N-Triples-star output has one triple per line; canonical mode sorts the
    lines. An empty graph in N-Triples-star is the empty string, otherwise
    the text ends with a newline.
    """
    options = options or SerializationOptions()
    if options.format is SerializationFormat.TURTLE_STAR:
        return _write_turtle(graph, options.prefixes)
    triples = canonical_triples(graph) if options.canonical else list(graph)
    if not triples:
        return ""
    return "\n".join(triple_to_ntriples(triple) for triple in triples) + "\n"


# Turtle-star


class _TurtleWriter:
    def __init__(self, prefixes: dict[str, str]):
        self.prefixes = prefixes

    def qname(self, iri: str) -> str | None:
        best: tuple[str, str] | None = None
        for prefix, namespace in self.prefixes.items():
            if iri.startswith(namespace) and (best is None or len(namespace) > len(best[1])):
                best = (prefix, namespace)
        if best is None:
            return None
        local = iri[len(best[1]) :]
        if local and not _PN_LOCAL_RE.match(local):
            return None
        return f"{best[0]}:{local}"

    def iri(self, iri: str) -> str:
        return self.qname(iri) or f"<{iri}>"

    def term(self, term: Term) -> str:
        if isinstance(term, Iri):
            return self.iri(term.value)
        if isinstance(term, Literal):
            text = f'"{_escape_string(term.lexical)}"'
            if term.language is not None:
                return f"{text}@{term.language}"
            if term.datatype == XSD_STRING:
                return text
            return f"{text}^^{self.iri(term.datatype)}"
        if isinstance(term, QuotedTriple):
            inner = term.triple
            return (
                f"<< {self.term(inner.subject)} {self.term(inner.predicate)} "
                f"{self.term(inner.object)} >>"
            )
        return term_to_ntriples(term)

    def predicate(self, term: Term) -> str:
        if isinstance(term, Iri) and term.value == RDF_TYPE:
            return "a"
        return self.term(term)


def _write_turtle(graph: Graph, prefixes: dict[str, str]) -> str:
    writer = _TurtleWriter(prefixes)
    lines = [f"@prefix {prefix}: <{prefixes[prefix]}> ." for prefix in sorted(prefixes)]

    grouped: dict[Term, dict[Term, list[Term]]] = {}
    for triple in canonical_triples(graph):
        grouped.setdefault(triple.subject, {}).setdefault(triple.predicate, []).append(
            triple.object
        )

    for subject, predicates in grouped.items():
        lines.append("")
        statements = []
        for predicate, objects in predicates.items():
            rendered = ", ".join(writer.term(obj) for obj in objects)
            statements.append(f"{writer.predicate(predicate)} {rendered}")
        lines.append(f"{writer.term(subject)} " + " ;\n    ".join(statements) + " .")
    return "\n".join(lines) + "\n"


# N-Triples-star parsing


class _LineParser:
    """Recursive descent over one line; columns are 1-based."""

    def __init__(self, text: str, line_number: int, blank_nodes: dict[str, BlankNode]):
        self.text = text
        self.pos = 0
        self.line_number = line_number
        self.blank_nodes = blank_nodes

    def fail(self, message: str, pos: int | None = None) -> NTriplesSyntaxError:
        column = (self.pos if pos is None else pos) + 1
        return NTriplesSyntaxError(self.line_number, column, message)

    def skip_ws(self) -> None:
        while self.pos < len(self.text) and self.text[self.pos] in " \t":
            self.pos += 1

    def peek(self, token: str) -> bool:
        return self.text.startswith(token, self.pos)

    def at_end(self) -> bool:
        return self.pos >= len(self.text)

    def statement(self) -> Triple:
        subject = self.subject()
        self.skip_ws()
        predicate = self.iri("predicate")
        self.skip_ws()
        obj = self.object()
        self.skip_ws()
        if not self.peek("."):
            raise self.fail("Expected '.' at end of triple")
        self.pos += 1
        self.skip_ws()
        if not self.at_end() and not self.peek("#"):
            raise self.fail("Unexpected content after '.'")
        return Triple(subject, predicate, obj)

    def subject(self) -> Term:
        if self.peek("<<"):
            return self.quoted()
        if self.peek("<"):
            return self.iri("subject")
        if self.peek("_:"):
            return self.blank_node()
        raise self.fail("Expected an IRI, blank node or quoted triple as subject")

    def object(self) -> Term:
        if self.peek("<<"):
            return self.quoted()
        if self.peek("<"):
            return self.iri("object")
        if self.peek("_:"):
            return self.blank_node()
        if self.peek('"'):
            return self.literal()
        raise self.fail("Expected an object")

    def quoted(self) -> QuotedTriple:
        self.pos += 2
        self.skip_ws()
        subject = self.subject()
        self.skip_ws()
        predicate = self.iri("predicate")
        self.skip_ws()
        obj = self.object()
        self.skip_ws()
        if not self.peek(">>"):
            raise self.fail("Expected '>>' closing a quoted triple")
        self.pos += 2
        return QuotedTriple(Triple(subject, predicate, obj))

    def iri(self, role: str) -> Iri:
        start = self.pos
        if not self.peek("<") or self.peek("<<"):
            raise self.fail(f"Expected an IRI as {role}")
        self.pos += 1
        chars = []
        while True:
            if self.at_end():
                raise self.fail("Unterminated IRI", start)
            char = self.text[self.pos]
            if char == ">":
                self.pos += 1
                break
            if char == "\\":
                chars.append(self.unicode_escape())
                continue
            chars.append(char)
            self.pos += 1
        try:
            return Iri("".join(chars))
        except InvalidIriError as exc:
            raise self.fail(str(exc), start) from exc

    def unicode_escape(self) -> str:
        start = self.pos
        if self.text[self.pos + 1 : self.pos + 2] not in ("u", "U"):
            raise self.fail("Invalid escape sequence", start)
        decoded = decode_escape(self.text, self.pos)
        if decoded is None:
            raise self.fail("Invalid unicode escape", start)
        char, width = decoded
        self.pos += width
        return char

    def blank_node(self) -> BlankNode:
        self.pos += 2
        found = _BNODE_LABEL_RE.match(self.text, self.pos)
        if not found:
            raise self.fail("Invalid blank node label")
        self.pos = found.end()
        label = found.group()
        if label not in self.blank_nodes:
            self.blank_nodes[label] = BlankNode(f"b{len(self.blank_nodes)}")
        return self.blank_nodes[label]

    def literal(self) -> Literal:
        start = self.pos
        self.pos += 1
        chars = []
        while True:
            if self.at_end():
                raise self.fail("Unterminated string literal", start)
            char = self.text[self.pos]
            if char == '"':
                self.pos += 1
                break
            if char == "\\":
                following = self.text[self.pos + 1 : self.pos + 2]
                if following in _UNECHAR:
                    chars.append(_UNECHAR[following])
                    self.pos += 2
                else:
                    chars.append(self.unicode_escape())
                continue
            chars.append(char)
            self.pos += 1
        lexical = "".join(chars)
        if self.peek("@"):
            self.pos += 1
            tag_start = self.pos
            found = _LANG_TAG_RE.match(self.text, self.pos)
            if not found:
                raise self.fail("Invalid language tag")
            self.pos = found.end()
            try:
                return Literal(lexical, RDF_LANG_STRING, found.group().lower())
            except InvalidLanguageTagError as exc:
                raise self.fail(str(exc), tag_start) from exc
        if self.peek("^^"):
            self.pos += 2
            datatype = self.iri("datatype")
            if datatype.value == RDF_LANG_STRING:
                raise self.fail("rdf:langString literals require a language tag", start)
            return Literal(lexical, datatype.value)
        return Literal(lexical)


def parse_ntriples_star(text: str) -> Graph:
    """
    Parse N-Triples-star text into a graph.

    Blank nodes are relabelled ``b0, b1, ...`` by first occurrence. Raises
    :class:`NTriplesSyntaxError` with line and column on malformed input.
    """
    graph = Graph()
    blank_nodes: dict[str, BlankNode] = {}
    if text.startswith("\ufeff"):
        raise NTriplesSyntaxError(1, 1, "Byte order mark is not allowed")
    for number, raw in enumerate(text.split("\n"), start=1):
        line = raw.removesuffix("\r")
        stripped = line.strip(" \t")
        if not stripped or stripped.startswith("#"):
            continue
        parser = _LineParser(line, number, blank_nodes)
        parser.skip_ws()
        graph.insert(parser.statement())
    logger.debug(f"Parsed {len(graph)} triples")
    return graph


def _relabel(term: Term, mapping: dict[BlankNode, BlankNode]) -> Term:
    if isinstance(term, BlankNode):
        if term not in mapping:
            mapping[term] = BlankNode(f"b{len(mapping)}")
        return mapping[term]
    if isinstance(term, QuotedTriple):
        inner = term.triple
        return QuotedTriple(
            Triple(
                _relabel(inner.subject, mapping),
                inner.predicate,
                _relabel(inner.object, mapping),
            )
        )
    return term


def relabel_blank_nodes(graph: Graph) -> Graph:
    """Rename blank nodes b0, b1, ... by first occurrence in canonical order."""
    mapping: dict[BlankNode, BlankNode] = {}
    relabelled = Graph(prefixes=graph.prefixes)
    for triple in canonical_triples(graph):
        subject = _relabel(triple.subject, mapping)
        obj = _relabel(triple.object, mapping)
        relabelled.insert(Triple(subject, triple.predicate, obj))
    return relabelled
