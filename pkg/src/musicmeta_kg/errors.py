"""Exceptions raised by the Music Meta toolkit."""

from typing import Any


class MusicMetaError(ValueError):
    """Base class for every error raised by the toolkit."""


class InvalidIriError(MusicMetaError):
    """A string is not an absolute IRI."""


class InvalidLanguageTagError(MusicMetaError):
    """A language tag is not BCP-47 shaped."""


class ConflictingArgumentsError(MusicMetaError):
    """Both a datatype and a language tag were given for a literal."""


class NestingTooDeepError(MusicMetaError):
    """A quoted triple would exceed the maximum nesting depth."""


class EmptyPatternListError(MusicMetaError):
    """A graph pattern query was issued without any triple pattern."""


class GraphFrozenError(MusicMetaError):
    """An insert was attempted on a frozen graph."""


class UnknownTermError(MusicMetaError):
    """A QName is not registered in the vocabulary."""


class EmptyKeyError(MusicMetaError):
    """An IRI was requested for an empty natural key."""


class UnserializableTermError(MusicMetaError):
    """A term cannot be written in the requested format."""


class NTriplesSyntaxError(MusicMetaError):
    """Malformed N-Triples-star input."""

    def __init__(self, line: int, column: int, message: str):
        self.line = line
        self.column = column
        self.message = message
        super().__init__(f"line {line}, column {column}: {message}")


class DuplicateIdError(MusicMetaError):
    """A competency question id is already registered."""


class SuiteFormatError(MusicMetaError):
    """A suite file is neither a list of questions nor an object with a questions list."""


class PatternSyntaxError(MusicMetaError):
    """A triple pattern term in a suite file cannot be parsed."""


class FilterSyntaxError(MusicMetaError):
    """A filter expression in a suite file cannot be parsed."""


class LiftError(MusicMetaError):
    """Validation or resolution failed before or during lifting."""

    def __init__(self, violations: list[Any]):
        self.violations = violations
        lines = [f"- {v.path}: {v.message}" for v in violations]
        super().__init__(f"{len(violations)} violation(s):\n" + "\n".join(lines))
