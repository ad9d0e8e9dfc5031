"""
RDF-star term model, in-memory triple store and basic graph pattern matcher.

Terms are immutable value objects compared structurally: two literals are
equal only when lexical form, datatype and language tag all coincide.
"""

import logging
import re
import threading
from collections import defaultdict
from collections.abc import Callable, Iterable, Iterator, Mapping
from dataclasses import dataclass
from typing import Union

from .errors import (
    ConflictingArgumentsError,
    EmptyPatternListError,
    GraphFrozenError,
    InvalidIriError,
    InvalidLanguageTagError,
    MusicMetaError,
    NestingTooDeepError,
)

logger = logging.getLogger(__name__)

RDF_NS = "http://www.w3.org/1999/02/22-rdf-syntax-ns#"
XSD_NS = "http://www.w3.org/2001/XMLSchema#"
RDF_LANG_STRING = RDF_NS + "langString"
XSD_STRING = XSD_NS + "string"

MAX_NESTING_DEPTH = 2

_IRI_RE = re.compile(r"^[A-Za-z][A-Za-z0-9+.\-]*:[^\x00-\x20<>\"{}|\\^`\x7f]*$")
_LANG_RE = re.compile(r"^[A-Za-z]{1,8}(-[A-Za-z0-9]{1,8})*$")
_BNODE_RE = re.compile(r"^[A-Za-z][A-Za-z0-9_]*$")


@dataclass(frozen=True, slots=True)
class Iri:
    value: str

    def __post_init__(self) -> None:
        if not self.value or not _IRI_RE.match(self.value):
            raise InvalidIriError(f"Not an absolute IRI: {self.value!r}")

    def __str__(self) -> str:
        return self.value


@dataclass(frozen=True, slots=True)
class Literal:
    lexical: str
    datatype: str = XSD_STRING
    language: str | None = None

    def __post_init__(self) -> None:
        if self.language is not None:
            if not _LANG_RE.match(self.language):
                raise InvalidLanguageTagError(f"Invalid language tag: {self.language!r}")
            if self.datatype != RDF_LANG_STRING:
                raise ConflictingArgumentsError(
                    "Language-tagged literals must use the rdf:langString datatype"
                )
        elif self.datatype == RDF_LANG_STRING:
            raise InvalidLanguageTagError("rdf:langString literals require a language tag")
        if not _IRI_RE.match(self.datatype):
            raise InvalidIriError(f"Datatype is not an absolute IRI: {self.datatype!r}")


@dataclass(frozen=True, slots=True)
class BlankNode:
    label: str

    def __post_init__(self) -> None:
        if not _BNODE_RE.match(self.label):
            raise MusicMetaError(f"Invalid blank node label: {self.label!r}")


@dataclass(frozen=True, slots=True)
class QuotedTriple:
    triple: "Triple"

    def __post_init__(self) -> None:
        if term_depth(self) > MAX_NESTING_DEPTH:
            raise NestingTooDeepError(
                f"Quoted triples may be nested at most {MAX_NESTING_DEPTH} levels deep"
            )


Term = Union[Iri, Literal, BlankNode, QuotedTriple]


@dataclass(frozen=True, slots=True)
class Triple:
    subject: Term
    predicate: Term
    object: Term

    def __post_init__(self) -> None:
        if not isinstance(self.predicate, Iri):
            raise MusicMetaError(f"Predicate must be an IRI, got {self.predicate!r}")
        if isinstance(self.subject, Literal):
            raise MusicMetaError(f"A literal cannot be a subject: {self.subject!r}")

    def depth(self) -> int:
        return max(term_depth(self.subject), term_depth(self.object))


def term_depth(term: Term) -> int:
    if isinstance(term, QuotedTriple):
        return 1 + term.triple.depth()
    return 0


def is_absolute_iri(value: str) -> bool:
    return bool(value) and _IRI_RE.match(value) is not None


def is_language_tag(value: str) -> bool:
    return _LANG_RE.match(value) is not None


def make_iri(value: str) -> Iri:
    """Build an IRI term, rejecting relative references, whitespace and empty strings."""
    return Iri(value)


def make_literal(
    lexical: str,
    datatype: "str | Iri | None" = None,
    language: str | None = None,
) -> Literal:
    """
    Build a literal term.

    Without datatype and language the literal is an xsd:string. A language tag
    forces rdf:langString and is lowercased.
    """
    if datatype is not None and language is not None:
        raise ConflictingArgumentsError("Give either a datatype or a language tag, not both")
    if language is not None:
        if not _LANG_RE.match(language):
            raise InvalidLanguageTagError(f"Invalid language tag: {language!r}")
        return Literal(lexical, RDF_LANG_STRING, language.lower())
    if datatype is None:
        return Literal(lexical)
    return Literal(lexical, str(datatype))


def quote(triple: Triple) -> QuotedTriple:
    """Wrap a triple as a term. Quoting never asserts the triple anywhere."""
    if triple.depth() >= MAX_NESTING_DEPTH:
        raise NestingTooDeepError(
            f"Cannot quote a triple of depth {triple.depth()} (max {MAX_NESTING_DEPTH})"
        )
    return QuotedTriple(triple)


class BlankNodeFactory:
    """Hands out deterministic blank node labels b0, b1, ... for one session."""

    def __init__(self, prefix: str = "b"):
        self._prefix = prefix
        self._counter = 0
        self._lock = threading.Lock()

    def next(self) -> BlankNode:
        with self._lock:
            label = f"{self._prefix}{self._counter}"
            self._counter += 1
        return BlankNode(label)


class Graph:
    """A deduplicated set of triples with subject, predicate and object indexes."""

    def __init__(self, triples: Iterable[Triple] = (), prefixes: Mapping[str, str] | None = None):
        self._triples: set[Triple] = set()
        self._order: list[Triple] = []
        self._by_subject: dict[Term, set[Triple]] = defaultdict(set)
        self._by_predicate: dict[Term, set[Triple]] = defaultdict(set)
        self._by_object: dict[Term, set[Triple]] = defaultdict(set)
        self.prefixes: dict[str, str] = dict(prefixes or {})
        self._frozen = False
        self.update(triples)

    def insert(self, triple: Triple) -> bool:
        """Add a triple; returns True iff it was not already present."""
        if self._frozen:
            raise GraphFrozenError("Graph is frozen; build a new graph to add triples")
        if triple in self._triples:
            return False
        self._triples.add(triple)
        self._order.append(triple)
        self._by_subject[triple.subject].add(triple)
        self._by_predicate[triple.predicate].add(triple)
        self._by_object[triple.object].add(triple)
        return True

    def update(self, triples: Iterable[Triple]) -> int:
        return sum(1 for triple in triples if self.insert(triple))

    def freeze(self) -> "Graph":
        self._frozen = True
        return self

    def snapshot(self) -> "Graph":
        """A frozen copy; a graph that is already frozen is returned as is."""
        if self._frozen:
            return self
        return Graph(self._order, self.prefixes).freeze()

    @property
    def frozen(self) -> bool:
        return self._frozen

    def _candidates(
        self, subject: Term | None, predicate: Term | None, obj: Term | None
    ) -> set[Triple] | None:
        sets = []
        if subject is not None:
            sets.append(self._by_subject.get(subject, set()))
        if predicate is not None:
            sets.append(self._by_predicate.get(predicate, set()))
        if obj is not None:
            sets.append(self._by_object.get(obj, set()))
        if not sets:
            return None
        return min(sets, key=len)

    def triples(
        self,
        subject: Term | None = None,
        predicate: Term | None = None,
        obj: Term | None = None,
    ) -> Iterator[Triple]:
        """Yield triples matching the given positions; None is a wildcard."""
        candidates = self._candidates(subject, predicate, obj)
        if candidates is None:
            yield from self._order
            return
        for triple in list(candidates):
            if subject is not None and triple.subject != subject:
                continue
            if predicate is not None and triple.predicate != predicate:
                continue
            if obj is not None and triple.object != obj:
                continue
            yield triple

    def count(
        self,
        subject: Term | None = None,
        predicate: Term | None = None,
        obj: Term | None = None,
    ) -> int:
        """Upper bound on the matches for a lookup, read from the smallest index."""
        candidates = self._candidates(subject, predicate, obj)
        return len(self._triples) if candidates is None else len(candidates)

    def subjects(self) -> set[Term]:
        return {subject for subject, found in self._by_subject.items() if found}

    def __contains__(self, triple: object) -> bool:
        return triple in self._triples

    def __iter__(self) -> Iterator[Triple]:
        return iter(self._order)

    def __len__(self) -> int:
        return len(self._triples)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Graph):
            return NotImplemented
        return self._triples == other._triples

    __hash__ = None  # type: ignore[assignment]

    def __repr__(self) -> str:
        state = "frozen" if self._frozen else "open"
        return f"<Graph {len(self)} triples, {state}>"


# Basic graph patterns


@dataclass(frozen=True, slots=True)
class Variable:
    name: str

    def __str__(self) -> str:
        return f"?{self.name}"


PatternTerm = Union[Term, Variable, "TriplePattern"]


@dataclass(frozen=True, slots=True)
class TriplePattern:
    """A triple whose positions may be variables or, for quoted triples, nested patterns."""

    subject: PatternTerm
    predicate: PatternTerm
    object: PatternTerm

    def positions(self) -> tuple[PatternTerm, PatternTerm, PatternTerm]:
        return (self.subject, self.predicate, self.object)

    def variables(self) -> set[str]:
        names: set[str] = set()
        for item in self.positions():
            if isinstance(item, Variable):
                names.add(item.name)
            elif isinstance(item, TriplePattern):
                names |= item.variables()
        return names

    def apply(self, binding: Mapping[str, Term]) -> Triple:
        """Instantiate the pattern; every variable must be bound."""
        return Triple(*(_instantiate(item, binding) for item in self.positions()))


def _instantiate(item: PatternTerm, binding: Mapping[str, Term]) -> Term:
    if isinstance(item, Variable):
        return binding[item.name]
    if isinstance(item, TriplePattern):
        return QuotedTriple(item.apply(binding))
    return item


class Binding(Mapping[str, Term]):
    """An immutable, hashable assignment of variable names to terms."""

    __slots__ = ("_data", "_hash")

    def __init__(self, data: Mapping[str, Term] | Iterable[tuple[str, Term]] = ()):
        self._data: dict[str, Term] = dict(data)
        self._hash: int | None = None

    def __getitem__(self, name: str) -> Term:
        return self._data[name]

    def __iter__(self) -> Iterator[str]:
        return iter(self._data)

    def __len__(self) -> int:
        return len(self._data)

    def __hash__(self) -> int:
        if self._hash is None:
            self._hash = hash(frozenset(self._data.items()))
        return self._hash

    def __eq__(self, other: object) -> bool:
        if isinstance(other, Mapping):
            return self._data == dict(other.items())
        return NotImplemented

    def project(self, names: Iterable[str]) -> "Binding":
        return Binding((name, self._data[name]) for name in names if name in self._data)

    def __repr__(self) -> str:
        inner = ", ".join(f"{name}={term!r}" for name, term in sorted(self._data.items()))
        return f"Binding({inner})"


_IMPOSSIBLE = object()


def _resolve(item: PatternTerm, partial: Mapping[str, Term]) -> object:
    """Concrete term for a pattern position, None when still open, _IMPOSSIBLE if unmatchable."""
    if isinstance(item, Variable):
        return partial.get(item.name)
    if isinstance(item, TriplePattern):
        parts = [_resolve(inner, partial) for inner in item.positions()]
        if any(part is _IMPOSSIBLE for part in parts):
            return _IMPOSSIBLE
        if any(part is None for part in parts):
            return None
        try:
            return QuotedTriple(Triple(*parts))  # type: ignore[arg-type]
        except MusicMetaError:
            return _IMPOSSIBLE
    return item


def _unify(item: PatternTerm, term: Term, binding: dict[str, Term]) -> bool:
    if isinstance(item, Variable):
        bound = binding.get(item.name)
        if bound is None:
            binding[item.name] = term
            return True
        return bound == term
    if isinstance(item, TriplePattern):
        if not isinstance(term, QuotedTriple):
            return False
        inner = term.triple
        return (
            _unify(item.subject, inner.subject, binding)
            and _unify(item.predicate, inner.predicate, binding)
            and _unify(item.object, inner.object, binding)
        )
    return item == term


def _selectivity(graph: Graph, pattern: TriplePattern) -> int:
    fixed = [
        None if isinstance(item, (Variable, TriplePattern)) else item
        for item in pattern.positions()
    ]
    if isinstance(pattern.subject, TriplePattern):
        resolved = _resolve(pattern.subject, {})
        fixed[0] = resolved if isinstance(resolved, QuotedTriple) else None
    return graph.count(*fixed)


def _plan(graph: Graph, patterns: list[TriplePattern]) -> list[TriplePattern]:
    """Seed with the most selective pattern, then prefer patterns joined to bound variables."""
    remaining = list(patterns)
    ordered: list[TriplePattern] = []
    bound: set[str] = set()
    while remaining:
        connected = [p for p in remaining if p.variables() & bound] if bound else []
        pool = connected or remaining
        best = min(pool, key=lambda p: _selectivity(graph, p))
        remaining.remove(best)
        ordered.append(best)
        bound |= best.variables()
    return ordered


def match(graph: Graph, patterns: Iterable[TriplePattern]) -> set[Binding]:
    """
    Evaluate a conjunctive basic graph pattern.

    Returns every binding that maps all patterns onto triples of the graph.
    Shared variable names join; result order is unspecified.
    """
    pattern_list = list(patterns)
    if not pattern_list:
        raise EmptyPatternListError("At least one triple pattern is required")

    solutions: list[dict[str, Term]] = [{}]
    for pattern in _plan(graph, pattern_list):
        extended: list[dict[str, Term]] = []
        for partial in solutions:
            fixed = [_resolve(item, partial) for item in pattern.positions()]
            if any(item is _IMPOSSIBLE for item in fixed):
                continue
            for triple in graph.triples(*fixed):  # type: ignore[arg-type]
                candidate = dict(partial)
                if (
                    _unify(pattern.subject, triple.subject, candidate)
                    and _unify(pattern.predicate, triple.predicate, candidate)
                    and _unify(pattern.object, triple.object, candidate)
                ):
                    extended.append(candidate)
        solutions = extended
        if not solutions:
            break
    return {Binding(solution) for solution in solutions}


def match_filtered(
    graph: Graph,
    patterns: Iterable[TriplePattern],
    predicate: Callable[[Binding], bool] | None = None,
) -> set[Binding]:
    """match() restricted to the bindings accepted by the filter predicate."""
    bindings = match(graph, patterns)
    if predicate is None:
        return bindings
    return {binding for binding in bindings if predicate(binding)}
