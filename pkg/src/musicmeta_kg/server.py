import json
import logging

from fastmcp import FastMCP
from pydantic import BaseModel, ValidationError

from .config import parse_align
from .errors import LiftError, MusicMetaError
from .lifting import DEFAULT_BASE_IRI, LiftConfig, build_graph
from .model import Dataset, input_json_schema
from .rdf_core import Graph
from .reporting import GraphStats, graph_stats
from .serialization import SerializationFormat, SerializationOptions, parse_ntriples_star, write
from .validation import Suite, ValidationReport, load_suite, run_suite
from .vocabulary import AlignmentEntry, TermKind, alignments_for, lookup, registry_report, term

logger = logging.getLogger(__name__)

mcp = FastMCP(
    "Music Meta KG Server",
    instructions="""
    This server lifts music metadata into a Music Meta knowledge graph
    (RDF-star) and tests graphs against competency questions.

    Typical usage sequence:
    1. Read musicmeta://input_schema to see the shape of the input document
       (sections artists, entities, processes, releases, links; camelCase keys).
    2. convert_metadata(document=...) to obtain N-Triples-star text.
       - Set align="mo,wikidata" to add alignment triples to external vocabularies.
       - Set emit_provenance=False to skip the source annotations on link triples.
    3. validate_graph(ntriples=...) to run the bundled competency questions,
       or pass your own suite JSON.
    4. describe_graph(ntriples=...) for triple, subject and class counts.

    lookup_term(qname="mm:Musician") returns the full IRI of a vocabulary term
    together with its alignments. Graph inputs must be N-Triples-star text, not Turtle.
    """,
)


class TermDetails(BaseModel):
    """A vocabulary term and the external terms it is aligned to"""

    qname: str
    iri: str
    kind: TermKind
    invented: bool
    alignments: list[AlignmentEntry]


def _parse_graph(ntriples: str) -> Graph:
    try:
        return parse_ntriples_star(ntriples)
    except MusicMetaError as e:
        logger.error(f"Failed to parse graph: {e}")
        raise ValueError(
            f"Failed to parse N-Triples-star input: {e}. "
            f"Graphs must be given one triple per line, as written by convert_metadata "
            f"with format='nt'."
        ) from e


@mcp.tool()
def convert_metadata(
    document: str,
    align: str | None = None,
    emit_provenance: bool = True,
    base_iri: str = DEFAULT_BASE_IRI,
    format: str = "nt",
    canonical: bool = True,
) -> str:
    """
    Lift a metadata JSON document into a Music Meta graph and serialise it.

    Args:
        document: The input document as JSON text. See the musicmeta://input_schema
            resource for its structure.
        align: Comma-separated alignment schemes to emit (mo, doremus, wikidata).
        emit_provenance: Annotate every link triple with its source reference.
        base_iri: Namespace under which resource IRIs are minted; must end with '/' or '#'.
        format: 'nt' for N-Triples-star or 'ttl' for Turtle-star.
        canonical: Sort the output lines so that equal graphs give equal text.

    Returns:
        str: The serialised graph.

    Raises:
        ValueError: If the document is not valid JSON, does not match the input
            schema, or breaks a record rule. Record violations are listed one per
            line as 'path: message'.

    Example:
        convert_metadata(document='{"artists": [{"key": "bowie", "kind": "Musician",
        "name": "David Bowie"}]}', align="mo")
    """
    try:
        config = LiftConfig(
            base_iri=base_iri,
            alignment_schemes=parse_align(align),
            emit_provenance=emit_provenance,
        )
        options = SerializationOptions(format=SerializationFormat(format), canonical=canonical)
    except ValueError as e:
        logger.error(f"Invalid conversion options: {e}")
        raise ValueError(f"Invalid conversion options: {e}") from e

    try:
        dataset = Dataset.from_json(document)
    except ValidationError as e:
        logger.error(f"Input document rejected: {e.error_count()} error(s)")
        raise ValueError(f"The input document does not match the input schema:\n{e}") from e

    try:
        graph = build_graph(dataset, config)
    except LiftError as e:
        logger.error(f"Lifting failed with {len(e.violations)} violation(s)")
        lines = "\n".join(f"{v.path}: {v.message}" for v in e.violations)
        raise ValueError(
            f"The document has {len(e.violations)} violation(s); nothing was produced:\n{lines}"
        ) from e

    logger.info(f"Lifted {sum(dataset.record_counts().values())} records to {len(graph)} triples")
    return write(graph, options)


@mcp.tool()
def validate_graph(ntriples: str, suite: str | None = None) -> ValidationReport:
    """
    Run a competency question suite over a graph.

    Args:
        ntriples: The graph as N-Triples-star text.
        suite: Optional suite as JSON text ({"questions": [...]}). The bundled
            suite is used when omitted.

    Returns:
        ValidationReport: One result per question (id, passed, binding count,
        elapsed time) in id order, plus the pass count.

    Raises:
        ValueError: If the graph or the suite cannot be parsed.
    """
    graph = _parse_graph(ntriples)
    try:
        questions = load_suite() if suite is None else Suite.from_json(suite)
    except ValueError as e:
        logger.error(f"Invalid competency question suite: {e}")
        raise ValueError(f"Invalid competency question suite: {e}") from e
    return run_suite(graph, questions)


@mcp.tool()
def describe_graph(ntriples: str) -> GraphStats:
    """
    Summarise a graph.

    Args:
        ntriples: The graph as N-Triples-star text.

    Returns:
        GraphStats: Triple count, distinct subjects, instances per class and
        the number of quoted-triple annotations.
    """
    return graph_stats(_parse_graph(ntriples))


@mcp.tool()
def lookup_term(qname: str) -> TermDetails:
    """
    Look up a vocabulary term by its prefixed name.

    Args:
        qname: A prefixed name such as 'mm:Musician', 'core:hasReference' or 'rdf:type'.

    Returns:
        TermDetails: The full IRI, the kind of term, whether it was minted by this
        toolkit, and its alignments to external vocabularies.

    Raises:
        ValueError: If the name is not in the vocabulary registry.
    """
    try:
        iri = term(qname)
    except MusicMetaError as e:
        logger.error(f"Unknown vocabulary term {qname!r}")
        raise ValueError(
            f"Unknown vocabulary term {qname!r}. "
            f"Read the musicmeta://vocabulary resource for the list of known terms."
        ) from e
    entry = lookup(iri)
    return TermDetails(
        qname=entry.qname,
        iri=iri.value,
        kind=entry.kind,
        invented=entry.invented,
        alignments=alignments_for(iri),
    )


@mcp.resource("musicmeta://vocabulary")
def get_vocabulary() -> str:
    """
    Get the vocabulary registry.

    Returns:
        str: One line per term with its kind and alignment count.
    """
    result = "Music Meta vocabulary registry:\n\n"
    for row in registry_report():
        flag = " (minted)" if row.invented else ""
        result += f"{row.qname}: {row.kind.value}, {row.alignment_count} alignment(s){flag}\n"
    return result


@mcp.resource("musicmeta://input_schema")
def get_input_schema() -> str:
    """
    Get the JSON schema of the metadata document accepted by convert_metadata.

    Returns:
        str: The schema as JSON text.
    """
    return json.dumps(input_json_schema(), indent=2)


@mcp.resource("musicmeta://competency_questions")
def get_competency_questions() -> str:
    """
    Get the bundled competency question suite.

    Returns:
        str: The suite as JSON text, in the format validate_graph accepts.
    """
    return load_suite().to_json()
