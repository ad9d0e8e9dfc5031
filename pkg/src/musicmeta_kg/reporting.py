"""Graph statistics and plain-text tables."""

import logging
from collections import Counter
from collections.abc import Sequence
from typing import Any

import pandas as pd
from pydantic import BaseModel

from .rdf_core import Graph, Iri, QuotedTriple
from .vocabulary import compact, term

logger = logging.getLogger(__name__)


class GraphStats(BaseModel):
    """Summary counts of a graph"""

    triple_count: int
    distinct_subjects: int
    class_counts: dict[str, int]
    annotation_count: int


def graph_stats(graph: Graph) -> GraphStats:
    """
    Count triples, distinct subjects, instances per class and quoted-triple
    annotations (triples whose subject is a quoted triple).
    """
    rdf_type = term("rdf:type")
    classes: Counter[str] = Counter()
    for triple in graph.triples(None, rdf_type, None):
        if isinstance(triple.object, Iri):
            classes[compact(triple.object) or triple.object.value] += 1
    annotations = sum(1 for triple in graph if isinstance(triple.subject, QuotedTriple))
    return GraphStats(
        triple_count=len(graph),
        distinct_subjects=len(graph.subjects()),
        class_counts=dict(sorted(classes.items())),
        annotation_count=annotations,
    )


def render_table(rows: Sequence[dict[str, Any]], columns: Sequence[str]) -> str:
    """Left-aligned text table; an empty row list renders the header only."""
    if not rows:
        return "  ".join(columns)
    df = pd.DataFrame(list(rows), columns=list(columns))
    return df.to_string(index=False, justify="left")


def render_stats(stats: GraphStats) -> str:
    lines = [
        f"triples: {stats.triple_count}",
        f"distinct subjects: {stats.distinct_subjects}",
        f"quoted-triple annotations: {stats.annotation_count}",
        "",
    ]
    rows = [{"class": name, "instances": count} for name, count in stats.class_counts.items()]
    lines.append(render_table(rows, ["class", "instances"]))
    return "\n".join(lines)
