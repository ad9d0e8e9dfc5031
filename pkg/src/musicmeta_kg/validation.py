"""
Competency-question harness.

Each competency question is a basic graph pattern with an optional filter
and an expectation. Suites are JSON data files; terms in them are written as
``?var``, QNames, ``<iri>``, N-Triples style literals or ``<< s p o >>``.
"""

import json
import logging
import re
import time
from collections.abc import Callable, Iterator
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from decimal import Decimal, InvalidOperation
from enum import Enum
from importlib import resources
from pathlib import Path
from typing import Any

from pydantic import BaseModel, ConfigDict, PrivateAttr, model_validator

from .errors import DuplicateIdError, FilterSyntaxError, PatternSyntaxError, SuiteFormatError
from .model import PartialDate
from .rdf_core import (
    RDF_LANG_STRING,
    XSD_NS,
    Binding,
    Graph,
    Iri,
    Literal,
    Term,
    TriplePattern,
    Variable,
    make_iri,
    match_filtered,
)
from .reporting import render_table
from .serialization import decode_escape
from .vocabulary import resolve_qname, term

logger = logging.getLogger(__name__)

BUNDLED_SUITE = "competency_questions.json"

NUMERIC_TYPES = {XSD_NS + "integer", XSD_NS + "decimal"}
DATE_TYPES = {XSD_NS + "gYear", XSD_NS + "gYearMonth", XSD_NS + "date"}

BindingFilter = Callable[[Binding], bool]


class CqOrigin(str, Enum):
    VERBATIM = "verbatim"
    RECONSTRUCTED = "reconstructed"


class ExpectationKind(str, Enum):
    NON_EMPTY = "NonEmpty"
    EXACT_BINDINGS = "ExactBindings"
    MIN_COUNT = "MinCount"


class Expectation(BaseModel):
    """What the bindings of a competency question must look like"""

    model_config = ConfigDict(frozen=True)

    kind: ExpectationKind = ExpectationKind.NON_EMPTY
    count: int | None = None
    bindings: list[dict[str, str]] | None = None

    @model_validator(mode="before")
    @classmethod
    def _from_name(cls, data: Any) -> Any:
        if isinstance(data, str):
            return {"kind": data}
        return data

    @model_validator(mode="after")
    def _check_arguments(self) -> "Expectation":
        if self.kind is ExpectationKind.MIN_COUNT and (self.count is None or self.count < 0):
            raise ValueError("MinCount expectations need a non-negative count")
        if self.kind is ExpectationKind.EXACT_BINDINGS and self.bindings is None:
            raise ValueError("ExactBindings expectations need a bindings list")
        return self

    def expected_bindings(self) -> set[Binding]:
        return {
            Binding({name: parse_term(text) for name, text in row.items()})
            for row in self.bindings or []
        }

    def satisfied_by(self, bindings: set[Binding]) -> bool:
        if self.kind is ExpectationKind.NON_EMPTY:
            return bool(bindings)
        if self.kind is ExpectationKind.MIN_COUNT:
            return len(bindings) >= (self.count or 0)
        return bindings == self.expected_bindings()


# Pattern terms


class _TermReader:
    _QNAME_RE = re.compile(r"[A-Za-z][A-Za-z0-9_\-]*:[A-Za-z0-9_\-]*")
    _VAR_RE = re.compile(r"\?([A-Za-z_][A-Za-z0-9_]*)")
    _LANG_RE = re.compile(r"@([A-Za-z]+(?:-[A-Za-z0-9]+)*)")
    _NUMBER_RE = re.compile(r"[+-]?\d+(\.\d+)?")

    def __init__(self, text: str):
        self.text = text
        self.pos = 0

    def fail(self, message: str) -> PatternSyntaxError:
        return PatternSyntaxError(f"{message} at offset {self.pos} in {self.text!r}")

    def skip_ws(self) -> None:
        while self.pos < len(self.text) and self.text[self.pos].isspace():
            self.pos += 1

    def read(self) -> Any:
        self.skip_ws()
        text = self.text
        if text.startswith("<<", self.pos):
            self.pos += 2
            parts = [self.read() for _ in range(3)]
            self.skip_ws()
            if not text.startswith(">>", self.pos):
                raise self.fail("Expected '>>'")
            self.pos += 2
            return TriplePattern(*parts)
        if text.startswith("<", self.pos):
            end = text.find(">", self.pos)
            if end < 0:
                raise self.fail("Unterminated IRI")
            value = text[self.pos + 1 : end]
            self.pos = end + 1
            return make_iri(value)
        if text.startswith('"', self.pos):
            return self.literal()
        if found := self._VAR_RE.match(text, self.pos):
            self.pos = found.end()
            return Variable(found.group(1))
        if found := self._NUMBER_RE.match(text, self.pos):
            self.pos = found.end()
            datatype = "xsd:decimal" if found.group(1) else "xsd:integer"
            return Literal(found.group(), term(datatype).value)
        if text.startswith("a", self.pos) and self._boundary(self.pos + 1):
            self.pos += 1
            return term("rdf:type")
        if found := self._QNAME_RE.match(text, self.pos):
            self.pos = found.end()
            return resolve_qname(found.group())
        raise self.fail("Expected a term")

    def _boundary(self, pos: int) -> bool:
        return pos >= len(self.text) or self.text[pos].isspace() or self.text[pos] == ">"

    def literal(self) -> Literal:
        self.pos += 1
        chars = []
        while True:
            if self.pos >= len(self.text):
                raise self.fail("Unterminated literal")
            char = self.text[self.pos]
            if char == "\\":
                decoded = decode_escape(self.text, self.pos)
                if decoded is None:
                    raise self.fail("Invalid escape sequence")
                chars.append(decoded[0])
                self.pos += decoded[1]
                continue
            self.pos += 1
            if char == '"':
                break
            chars.append(char)
        lexical = "".join(chars)
        if found := self._LANG_RE.match(self.text, self.pos):
            self.pos = found.end()
            return Literal(lexical, RDF_LANG_STRING, found.group(1).lower())
        if self.text.startswith("^^", self.pos):
            self.pos += 2
            datatype = self.read()
            if not isinstance(datatype, Iri):
                raise self.fail("Datatype must be an IRI")
            return Literal(lexical, datatype.value)
        return Literal(lexical)

    def done(self) -> bool:
        self.skip_ws()
        return self.pos >= len(self.text)


def parse_term(text: str) -> Any:
    """Parse one pattern position: a term, a variable or a quoted-triple pattern."""
    reader = _TermReader(text)
    item = reader.read()
    if not reader.done():
        raise reader.fail("Unexpected trailing text")
    return item


def parse_patterns(rows: list[list[str]]) -> list[TriplePattern]:
    patterns = []
    for row in rows:
        if len(row) != 3:
            raise PatternSyntaxError(f"A triple pattern needs 3 positions, got {row!r}")
        patterns.append(TriplePattern(*(parse_term(text) for text in row)))
    return patterns


# Filters


@dataclass(frozen=True)
class _Operand:
    kind: str  # "var", "lang", "str", "datatype" or "const"
    name: str | None = None
    value: Term | None = None

    def evaluate(self, binding: Binding) -> Term | None:
        if self.kind == "const":
            return self.value
        bound = binding.get(self.name or "")
        if bound is None:
            return None
        if self.kind == "var":
            return bound
        if self.kind == "lang":
            language = bound.language if isinstance(bound, Literal) else None
            return Literal(language or "")
        if self.kind == "str":
            if isinstance(bound, Literal):
                return Literal(bound.lexical)
            if isinstance(bound, Iri):
                return Literal(bound.value)
            return None
        if self.kind == "datatype":
            return make_iri(bound.datatype) if isinstance(bound, Literal) else None
        return None


def _comparable(term_: Term) -> tuple[int, Any]:
    if isinstance(term_, Literal):
        if term_.datatype in NUMERIC_TYPES:
            try:
                return (0, Decimal(term_.lexical))
            except InvalidOperation:
                pass
        if term_.datatype in DATE_TYPES:
            try:
                return (1, PartialDate.parse(term_.lexical))
            except ValueError:
                pass
        return (2, term_.lexical)
    if isinstance(term_, Iri):
        return (3, term_.value)
    return (4, repr(term_))


_COMPARATORS: dict[str, Callable[[Any, Any], bool]] = {
    "=": lambda a, b: a == b,
    "!=": lambda a, b: a != b,
    "<": lambda a, b: a < b,
    "<=": lambda a, b: a <= b,
    ">": lambda a, b: a > b,
    ">=": lambda a, b: a >= b,
}

_FILTER_TOKEN_RE = re.compile(
    r"""\s*(?:
        (?P<func>lang|str|datatype)(?=\s*\()
      | (?P<term>"(?:[^"\\]|\\.)*"(?:@[A-Za-z\-0-9]+|\^\^\S+?(?=[\s()]|$))?
          | <[A-Za-z][A-Za-z0-9+.\-]*:[^>\s]*>
          | \?[A-Za-z_][A-Za-z0-9_]* | [A-Za-z][\w\-]*:[\w\-]* | [+-]?\d+(?:\.\d+)?)
      | (?P<op>&&|\|\||!=|<=|>=|=|<|>)
      | (?P<paren>[()])
    )""",
    re.VERBOSE,
)


class _FilterParser:
    def __init__(self, text: str):
        self.text = text
        self.tokens: list[tuple[str, str]] = []
        pos = 0
        while pos < len(text):
            if text[pos:].strip() == "":
                break
            found = _FILTER_TOKEN_RE.match(text, pos)
            if not found or found.end() == pos:
                raise FilterSyntaxError(f"Unexpected input at offset {pos} in {text!r}")
            kind = found.lastgroup or ""
            self.tokens.append((kind, found.group(kind)))
            pos = found.end()
        self.index = 0

    def peek(self) -> tuple[str, str] | None:
        return self.tokens[self.index] if self.index < len(self.tokens) else None

    def take(self) -> tuple[str, str]:
        token = self.peek()
        if token is None:
            raise FilterSyntaxError(f"Unexpected end of filter {self.text!r}")
        self.index += 1
        return token

    def expect(self, kind: str, value: str) -> None:
        token = self.take()
        if token != (kind, value):
            raise FilterSyntaxError(f"Expected {value!r} in filter {self.text!r}, got {token[1]!r}")

    def parse(self) -> BindingFilter:
        expression = self.disjunction()
        if self.peek() is not None:
            raise FilterSyntaxError(f"Trailing input in filter {self.text!r}")
        return expression

    def disjunction(self) -> BindingFilter:
        parts = [self.conjunction()]
        while self.peek() == ("op", "||"):
            self.take()
            parts.append(self.conjunction())
        if len(parts) == 1:
            return parts[0]
        return lambda binding: any(part(binding) for part in parts)

    def conjunction(self) -> BindingFilter:
        parts = [self.primary()]
        while self.peek() == ("op", "&&"):
            self.take()
            parts.append(self.primary())
        if len(parts) == 1:
            return parts[0]
        return lambda binding: all(part(binding) for part in parts)

    def primary(self) -> BindingFilter:
        if self.peek() == ("paren", "("):
            self.take()
            inner = self.disjunction()
            self.expect("paren", ")")
            return inner
        left = self.operand()
        kind, op = self.take()
        if kind != "op" or op not in _COMPARATORS:
            raise FilterSyntaxError(f"Expected a comparison operator in {self.text!r}, got {op!r}")
        right = self.operand()
        compare = _COMPARATORS[op]

        def comparison(binding: Binding) -> bool:
            a, b = left.evaluate(binding), right.evaluate(binding)
            if a is None or b is None:
                return False
            (rank_a, value_a), (rank_b, value_b) = _comparable(a), _comparable(b)
            if rank_a != rank_b:
                return op == "!="
            return compare(value_a, value_b)

        return comparison

    def operand(self) -> _Operand:
        kind, value = self.take()
        if kind == "func":
            self.expect("paren", "(")
            var_kind, name = self.take()
            if var_kind != "term" or not name.startswith("?"):
                raise FilterSyntaxError(f"{value}() takes a variable in {self.text!r}")
            self.expect("paren", ")")
            return _Operand(kind=value, name=name[1:])
        if kind != "term":
            raise FilterSyntaxError(f"Expected an operand in {self.text!r}, got {value!r}")
        if value.startswith("?"):
            return _Operand(kind="var", name=value[1:])
        try:
            constant = parse_term(value)
        except PatternSyntaxError as exc:
            raise FilterSyntaxError(str(exc)) from exc
        return _Operand(kind="const", value=constant)


def parse_filter(text: str) -> BindingFilter:
    """
    Compile a filter expression such as ``lang(?name) = "en"`` or
    ``?start >= "1900"^^xsd:gYear && ?n > 2``.
    """
    return _FilterParser(text).parse()


# Competency questions


class CompetencyQuestion(BaseModel):
    """A competency question restated as a basic graph pattern"""

    model_config = ConfigDict(frozen=True)

    id: str
    question: str
    origin: CqOrigin = CqOrigin.RECONSTRUCTED
    patterns: list[list[str]]
    filter: str | None = None
    select: list[str] | None = None
    expectation: Expectation = Expectation()

    _compiled_patterns: list[TriplePattern] = PrivateAttr(default_factory=list)
    _compiled_filter: BindingFilter | None = PrivateAttr(default=None)

    @model_validator(mode="after")
    def _compile(self) -> "CompetencyQuestion":
        if not self.patterns:
            raise ValueError(f"{self.id}: a competency question needs at least one pattern")
        self._compiled_patterns = parse_patterns(self.patterns)
        self._compiled_filter = parse_filter(self.filter) if self.filter else None
        self.expectation.expected_bindings()
        return self

    @property
    def triple_patterns(self) -> list[TriplePattern]:
        return list(self._compiled_patterns)

    @property
    def binding_filter(self) -> BindingFilter | None:
        return self._compiled_filter


class Suite:
    """An immutable, id-ordered collection of competency questions."""

    def __init__(self, questions: tuple[CompetencyQuestion, ...] = ()):
        self._questions = tuple(sorted(questions, key=lambda cq: cq.id))
        ids = [cq.id for cq in self._questions]
        if len(ids) != len(set(ids)):
            duplicates = sorted({i for i in ids if ids.count(i) > 1})
            raise DuplicateIdError(f"Duplicate competency question ids: {', '.join(duplicates)}")

    def register(self, cq: CompetencyQuestion) -> "Suite":
        if cq.id in self.ids:
            raise DuplicateIdError(f"Competency question {cq.id!r} is already registered")
        return Suite((*self._questions, cq))

    @property
    def ids(self) -> list[str]:
        return [cq.id for cq in self._questions]

    def __iter__(self) -> Iterator[CompetencyQuestion]:
        return iter(self._questions)

    def __len__(self) -> int:
        return len(self._questions)

    def __getitem__(self, cq_id: str) -> CompetencyQuestion:
        for cq in self._questions:
            if cq.id == cq_id:
                return cq
        raise KeyError(cq_id)

    def to_json(self) -> str:
        questions = [cq.model_dump(mode="json", exclude_none=True) for cq in self._questions]
        return json.dumps({"questions": questions}, indent=2, ensure_ascii=False)

    @classmethod
    def from_json(cls, text: str) -> "Suite":
        data = json.loads(text)
        rows = data.get("questions") if isinstance(data, dict) else data
        if not isinstance(rows, list):
            raise SuiteFormatError(
                'expected a list of questions or an object with a "questions" list'
            )
        suite = cls()
        for row in rows:
            suite = suite.register(CompetencyQuestion.model_validate(row))
        return suite


def register_cq(suite: Suite, cq: CompetencyQuestion) -> Suite:
    """Return a new suite containing ``cq``; raises DuplicateIdError on a known id."""
    return suite.register(cq)


def load_suite(path: str | Path | None = None) -> Suite:
    """Load a suite file, or the bundled suite when no path is given."""
    if path is None:
        text = resources.files("musicmeta_kg").joinpath("data", BUNDLED_SUITE).read_text("utf-8")
    else:
        text = Path(path).read_text(encoding="utf-8")
    suite = Suite.from_json(text)
    logger.debug(f"Loaded {len(suite)} competency questions from {path or 'bundled suite'}")
    return suite


# Running


class CqResult(BaseModel):
    id: str
    question: str
    passed: bool
    binding_count: int
    elapsed_ms: float


class ValidationReport(BaseModel):
    """Outcome of a suite run, ordered by competency question id"""

    results: list[CqResult]
    passed: int
    total: int

    @property
    def all_passed(self) -> bool:
        return self.passed == self.total

    @property
    def failed_ids(self) -> list[str]:
        return [result.id for result in self.results if not result.passed]

    def to_json(self) -> str:
        return self.model_dump_json(indent=2)

    def to_table(self) -> str:
        rows = [
            {
                "id": r.id,
                "passed": "PASS" if r.passed else "FAIL",
                "bindings": r.binding_count,
                "ms": f"{r.elapsed_ms:.1f}",
                "question": r.question,
            }
            for r in self.results
        ]
        table = render_table(rows, ["id", "passed", "bindings", "ms", "question"])
        return f"{table}\n\n{self.passed}/{self.total} competency questions passed"


def run_cq(graph: Graph, cq: CompetencyQuestion) -> tuple[bool, set[Binding]]:
    """Evaluate one competency question; the bindings are projected on ``select`` if given."""
    bindings = match_filtered(graph, cq.triple_patterns, cq.binding_filter)
    if cq.select is not None:
        bindings = {binding.project(cq.select) for binding in bindings}
    return cq.expectation.satisfied_by(bindings), bindings


def _timed(graph: Graph, cq: CompetencyQuestion) -> CqResult:
    started = time.perf_counter()
    passed, bindings = run_cq(graph, cq)
    elapsed = (time.perf_counter() - started) * 1000
    logger.debug(f"{cq.id}: {'pass' if passed else 'fail'} with {len(bindings)} binding(s)")
    return CqResult(
        id=cq.id,
        question=cq.question,
        passed=passed,
        binding_count=len(bindings),
        elapsed_ms=round(elapsed, 3),
    )


def run_suite(graph: Graph, suite: Suite, workers: int = 1) -> ValidationReport:
    """
    Run every question of the suite in id order.

    With ``workers > 1`` questions are evaluated on a thread pool over a
    frozen snapshot of the graph; results keep id order. The graph passed in
    is never modified.
    """
    questions = list(suite)
    if workers > 1 and len(questions) > 1:
        frozen = graph.snapshot()
        with ThreadPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(lambda cq: _timed(frozen, cq), questions))
    else:
        results = [_timed(graph, cq) for cq in questions]
    passed = sum(result.passed for result in results)
    logger.info(f"Competency questions: {passed}/{len(results)} passed")
    return ValidationReport(results=results, passed=passed, total=len(results))
