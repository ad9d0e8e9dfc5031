"""
Input record types for music metadata.

Records are plain pydantic models read from one JSON document with the
top-level arrays ``artists``, ``entities``, ``processes``, ``releases`` and
``links``. Structural problems (wrong JSON types, a link without provenance)
fail at parse time; semantic invariants are reported by :func:`validate_record`
as :class:`Violation` data.
"""

import logging
import re
from collections.abc import Iterable
from dataclasses import dataclass, field
from datetime import date
from decimal import Decimal
from enum import Enum
from functools import singledispatch
from typing import Any

from pydantic import BaseModel, ConfigDict, GetCoreSchemaHandler, GetJsonSchemaHandler
from pydantic.alias_generators import to_camel
from pydantic_core import core_schema

from .rdf_core import XSD_NS, is_absolute_iri, is_language_tag

logger = logging.getLogger(__name__)

_DATE_RE = re.compile(r"^(\d{4})(?:-(\d{2})(?:-(\d{2}))?)?$")


class PartialDate:
    """
    A date known to year, year-month or day precision.

    Ordering uses the earliest instant each value covers, so ``1977`` sorts
    with ``1977-01-01``. Equality stays structural: ``1977`` is not
    ``1977-01``.
    """

    __slots__ = ("year", "month", "day")

    def __init__(self, year: int, month: int | None = None, day: int | None = None):
        if day is not None and month is None:
            raise ValueError("A day requires a month")
        # raises on impossible dates such as 1977-02-30
        date(year, month or 1, day or 1)
        self.year = year
        self.month = month
        self.day = day

    @classmethod
    def parse(cls, text: str) -> "PartialDate":
        found = _DATE_RE.match(text.strip())
        if not found:
            raise ValueError(f"Expected YYYY, YYYY-MM or YYYY-MM-DD, got {text!r}")
        year, month, day = found.groups()
        return cls(int(year), int(month) if month else None, int(day) if day else None)

    @property
    def earliest(self) -> date:
        return date(self.year, self.month or 1, self.day or 1)

    @property
    def precision(self) -> str:
        if self.day is not None:
            return "day"
        if self.month is not None:
            return "month"
        return "year"

    @property
    def xsd_datatype(self) -> str:
        local = {"year": "gYear", "month": "gYearMonth", "day": "date"}[self.precision]
        return XSD_NS + local

    def __str__(self) -> str:
        text = f"{self.year:04d}"
        if self.month is not None:
            text += f"-{self.month:02d}"
        if self.day is not None:
            text += f"-{self.day:02d}"
        return text

    def __repr__(self) -> str:
        return f"PartialDate({str(self)!r})"

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, PartialDate):
            return NotImplemented
        return (self.year, self.month, self.day) == (other.year, other.month, other.day)

    def __hash__(self) -> int:
        return hash((self.year, self.month, self.day))

    def __lt__(self, other: "PartialDate") -> bool:
        return self.earliest < other.earliest

    def __le__(self, other: "PartialDate") -> bool:
        return self.earliest <= other.earliest

    def __gt__(self, other: "PartialDate") -> bool:
        return self.earliest > other.earliest

    def __ge__(self, other: "PartialDate") -> bool:
        return self.earliest >= other.earliest

    @classmethod
    def _coerce(cls, value: Any) -> "PartialDate":
        if isinstance(value, PartialDate):
            return value
        if isinstance(value, bool):
            raise ValueError("A date cannot be a boolean")
        if isinstance(value, int):
            return cls(value)
        if isinstance(value, date):
            return cls(value.year, value.month, value.day)
        if isinstance(value, str):
            return cls.parse(value)
        raise ValueError(f"Cannot read a date from {value!r}")

    @classmethod
    def __get_pydantic_core_schema__(
        cls, source: Any, handler: GetCoreSchemaHandler
    ) -> core_schema.CoreSchema:
        return core_schema.no_info_plain_validator_function(
            cls._coerce,
            serialization=core_schema.plain_serializer_function_ser_schema(str),
        )

    @classmethod
    def __get_pydantic_json_schema__(
        cls, schema: core_schema.CoreSchema, handler: GetJsonSchemaHandler
    ) -> dict[str, Any]:
        return {"type": "string", "pattern": _DATE_RE.pattern, "examples": ["1977", "1977-07"]}


class RecordModel(BaseModel):
    model_config = ConfigDict(
        alias_generator=to_camel,
        populate_by_name=True,
        extra="forbid",
        frozen=True,
    )


class Violation(BaseModel):
    """A broken record invariant, located by a field path such as ``artists[2].mediums``"""

    path: str
    message: str

    def located(self, prefix: str) -> "Violation":
        path = f"{prefix}.{self.path}" if self.path else prefix
        return Violation(path=path, message=self.message)


# Enumerations


class ArtistKind(str, Enum):
    MUSICIAN = "Musician"
    ENSEMBLE = "Ensemble"
    ALGORITHM = "Algorithm"


class EnsembleKind(str, Enum):
    MUSIC_GROUP = "MusicGroup"
    ORCHESTRA = "Orchestra"
    CHOIR = "Choir"


class TextKind(str, Enum):
    LYRICS = "Lyrics"
    LIBRETTO = "Libretto"
    TEXT = "Text"


class PartKind(str, Enum):
    MOVEMENT = "Movement"
    SECTION = "Section"


class ScoreFormat(str, Enum):
    DIGITAL = "digital"
    PAPER = "paper"


class ProcessKind(str, Enum):
    CREATIVE_PROCESS = "CreativeProcess"
    LIVE_PERFORMANCE = "LivePerformance"
    STUDIO_PERFORMANCE = "StudioPerformance"
    RECORDING_PROCESS = "RecordingProcess"

    @property
    def is_performance(self) -> bool:
        return self in (ProcessKind.LIVE_PERFORMANCE, ProcessKind.STUDIO_PERFORMANCE)


class LinkKind(str, Enum):
    OFFICIAL_WEBSITE = "OfficialWebsite"
    FAN_PAGE = "FanPage"
    FORUM = "Forum"
    REVIEW = "Review"
    SHOP = "Shop"
    DATABASE_ID = "DatabaseId"
    STREAMING_ID = "StreamingId"
    AUTHORITY_ID = "AuthorityId"

    @property
    def scheme_field(self) -> str | None:
        """Name of the record field naming the identifier scheme, if any."""
        return {
            LinkKind.DATABASE_ID: "database",
            LinkKind.STREAMING_ID: "platform",
            LinkKind.AUTHORITY_ID: "authority",
        }.get(self)


KNOWN_DERIVATION_TYPES = ("revision", "transposition", "cover", "reconstruction", "reduction")


# Provenance


class Reference(RecordModel):
    """Where a statement comes from and how much it is trusted"""

    key: str | None = None
    source_label: str
    source_url: str | None = None
    method: str | None = None
    confidence: Decimal | None = None
    retrieved_on: PartialDate | None = None


# Artists


class Alias(RecordModel):
    name: str
    language: str | None = None


class Membership(RecordModel):
    ensemble_key: str
    role: str | None = None
    period_start: PartialDate | None = None
    period_end: PartialDate | None = None


class ArtistRecord(RecordModel):
    """A musician, a music ensemble or a music algorithm"""

    key: str
    kind: ArtistKind
    ensemble_kind: EnsembleKind | None = None
    name: str
    name_language: str | None = None
    aliases: list[Alias] = []
    genres: list[str] = []
    mediums: list[str] = []
    activity_start: PartialDate | None = None
    activity_end: PartialDate | None = None
    memberships: list[Membership] = []
    influences: list[str] = []
    collaborations: list[str] = []


# Music entities


class TextRecord(RecordModel):
    kind: TextKind = TextKind.TEXT
    language: str | None = None
    body: str | None = None


class ScorePart(RecordModel):
    kind: PartKind
    label: str
    order_number: int


class AbstractScoreRecord(RecordModel):
    form_type: str | None = None
    key: str | None = None
    tempo: str | None = None
    order_number: int | None = None
    parts: list[ScorePart] = []


class InstrumentationEntry(RecordModel):
    medium: str
    cardinality: int = 1


class Derivation(RecordModel):
    target_key: str
    derivation_type: str | None = None


class CollectionMembership(RecordModel):
    collection_key: str
    concept_label: str | None = None


class PublicationRecord(RecordModel):
    publisher_name: str
    date: PartialDate | None = None
    place_label: str | None = None


class LicenseRecord(RecordModel):
    name: str
    url: str | None = None


class BroadcastRecord(RecordModel):
    broadcaster_name: str
    date: PartialDate | None = None
    place_label: str | None = None


class ScoreRecord(RecordModel):
    """A score edition formalising the entity's abstract score and instrumentation"""

    label: str
    format: ScoreFormat | None = None
    publication: PublicationRecord | None = None
    license: LicenseRecord | None = None


class EntityRecord(RecordModel):
    """A music entity with its text, abstract score and instrumentation"""

    key: str
    title: str
    title_language: str | None = None
    text: TextRecord | None = None
    score: AbstractScoreRecord | None = None
    instrumentation: list[InstrumentationEntry] = []
    derivations: list[Derivation] = []
    parts: list[str] = []
    collections: list[CollectionMembership] = []
    scores: list[ScoreRecord] = []


# Processes


class Participant(RecordModel):
    artist_key: str
    role: str | None = None
    provenance: Reference | None = None


class PlaceRecord(RecordModel):
    label: str
    latitude: Decimal | None = None
    longitude: Decimal | None = None


class ProcessRecord(RecordModel):
    """A creative process, a performance or a recording session"""

    key: str
    kind: ProcessKind
    entity_key: str
    participants: list[Participant] = []
    place: PlaceRecord | None = None
    time_start: PartialDate | None = None
    time_end: PartialDate | None = None
    creates_new_entity_key: str | None = None
    recording_key: str | None = None
    technical: dict[str, str] = {}


# Releases and links


class ReleaseRecord(RecordModel):
    key: str
    title: str
    recording_keys: list[str] = []
    publication: PublicationRecord | None = None
    license: LicenseRecord | None = None
    broadcasts: list[BroadcastRecord] = []


class LinkRecord(RecordModel):
    """A web resource or identifier attached to another record, always with provenance"""

    subject_key: str
    link_kind: LinkKind
    value: str
    database: str | None = None
    platform: str | None = None
    authority: str | None = None
    provenance: Reference


MetadataRecord = ArtistRecord | EntityRecord | ProcessRecord | ReleaseRecord | LinkRecord


class Dataset(RecordModel):
    """The whole input document"""

    artists: list[ArtistRecord] = []
    entities: list[EntityRecord] = []
    processes: list[ProcessRecord] = []
    releases: list[ReleaseRecord] = []
    links: list[LinkRecord] = []

    @classmethod
    def from_json(cls, text: str | bytes) -> "Dataset":
        return cls.model_validate_json(text)

    def to_json(self) -> str:
        return self.model_dump_json(by_alias=True, exclude_none=True, indent=2)

    def sections(self) -> Iterable[tuple[str, list[Any]]]:
        yield "artists", self.artists
        yield "entities", self.entities
        yield "processes", self.processes
        yield "releases", self.releases
        yield "links", self.links

    def record_counts(self) -> dict[str, int]:
        return {name: len(records) for name, records in self.sections()}


def input_json_schema() -> dict[str, Any]:
    """Formal JSON schema of the input document."""
    return Dataset.model_json_schema(by_alias=True)


# Record invariants


def _check_order(
    start: PartialDate | None, end: PartialDate | None, path: str, what: str
) -> list[Violation]:
    if start is not None and end is not None and end < start:
        return [Violation(path=path, message=f"{what} end {end} is before its start {start}")]
    return []


def _check_language(tag: str | None, path: str) -> list[Violation]:
    if tag is not None and not is_language_tag(tag):
        return [Violation(path=path, message=f"Invalid language tag {tag!r}")]
    return []


def _check_iri(value: str | None, path: str) -> list[Violation]:
    if value is not None and not is_absolute_iri(value):
        return [Violation(path=path, message=f"Not an absolute IRI: {value!r}")]
    return []


def _check_key(value: str, path: str) -> list[Violation]:
    if not value.strip():
        return [Violation(path=path, message="Key must not be empty")]
    return []


def _check_reference(ref: Reference, prefix: str) -> list[Violation]:
    violations = _check_iri(ref.source_url, f"{prefix}.sourceUrl")
    if ref.key is not None:
        violations += _check_key(ref.key, f"{prefix}.key")
    if not ref.source_label.strip():
        violations.append(Violation(path=f"{prefix}.sourceLabel", message="Missing source label"))
    if ref.confidence is not None and not (0 <= ref.confidence <= 1):
        violations.append(
            Violation(
                path=f"{prefix}.confidence",
                message=f"Confidence must be within [0, 1], got {ref.confidence}",
            )
        )
    return violations


def _check_license(license_: LicenseRecord | None, prefix: str) -> list[Violation]:
    if license_ is None:
        return []
    return _check_iri(license_.url, f"{prefix}.url")


@singledispatch
def validate_record(record: Any) -> list[Violation]:
    """
    Check the invariants of one record.

    Returns an empty list when every invariant holds. Never raises and never
    mutates the record.
    """
    return [Violation(path="", message=f"Not a metadata record: {type(record).__name__}")]


@validate_record.register
def _(record: ArtistRecord) -> list[Violation]:
    violations = _check_key(record.key, "key")
    if record.kind is not ArtistKind.MUSICIAN and record.mediums:
        violations.append(
            Violation(
                path="mediums",
                message=f"Only musicians have mediums of performance, not {record.kind.value}",
            )
        )
    if record.ensemble_kind is not None and record.kind is not ArtistKind.ENSEMBLE:
        violations.append(
            Violation(path="ensembleKind", message="ensembleKind requires kind Ensemble")
        )
    violations += _check_language(record.name_language, "nameLanguage")
    violations += _check_order(
        record.activity_start, record.activity_end, "activityEnd", "Activity"
    )
    for i, alias in enumerate(record.aliases):
        violations += _check_language(alias.language, f"aliases[{i}].language")
    for i, membership in enumerate(record.memberships):
        path = f"memberships[{i}]"
        violations += _check_key(membership.ensemble_key, f"{path}.ensembleKey")
        if membership.ensemble_key == record.key:
            violations.append(
                Violation(path=f"{path}.ensembleKey", message="An artist cannot be its own member")
            )
        violations += _check_order(
            membership.period_start, membership.period_end, f"{path}.periodEnd", "Membership"
        )
    for name in ("influences", "collaborations"):
        for i, key in enumerate(getattr(record, name)):
            if key == record.key:
                violations.append(
                    Violation(path=f"{name}[{i}]", message="An artist cannot reference itself")
                )
    return violations


@validate_record.register
def _(record: EntityRecord) -> list[Violation]:
    violations = _check_key(record.key, "key")
    violations += _check_language(record.title_language, "titleLanguage")
    if record.text is not None:
        violations += _check_language(record.text.language, "text.language")
    if record.score is not None:
        if record.score.order_number is not None and record.score.order_number < 1:
            violations.append(
                Violation(path="score.orderNumber", message="Order numbers start at 1")
            )
        for i, part in enumerate(record.score.parts):
            if part.order_number < 1:
                violations.append(
                    Violation(
                        path=f"score.parts[{i}].orderNumber", message="Order numbers start at 1"
                    )
                )
    for i, entry in enumerate(record.instrumentation):
        if entry.cardinality < 1:
            violations.append(
                Violation(
                    path=f"instrumentation[{i}].cardinality",
                    message=f"Cardinality must be at least 1, got {entry.cardinality}",
                )
            )
    for i, derivation in enumerate(record.derivations):
        if derivation.target_key == record.key:
            violations.append(
                Violation(
                    path=f"derivations[{i}].targetKey",
                    message="An entity cannot be derived from itself",
                )
            )
    for i, part_key in enumerate(record.parts):
        if part_key == record.key:
            violations.append(
                Violation(path=f"parts[{i}]", message="An entity cannot contain itself")
            )
    for i, collection in enumerate(record.collections):
        violations += _check_key(collection.collection_key, f"collections[{i}].collectionKey")
    for i, score in enumerate(record.scores):
        violations += _check_license(score.license, f"scores[{i}].license")
    return violations


@validate_record.register
def _(record: ProcessRecord) -> list[Violation]:
    violations = _check_key(record.key, "key")
    if record.creates_new_entity_key is not None and not record.kind.is_performance:
        violations.append(
            Violation(
                path="createsNewEntityKey",
                message=f"Only performances create new entities, not {record.kind.value}",
            )
        )
    is_recording = record.kind is ProcessKind.RECORDING_PROCESS
    if is_recording and not record.recording_key:
        violations.append(
            Violation(path="recordingKey", message="A RecordingProcess requires a recordingKey")
        )
    if not is_recording and record.recording_key is not None:
        violations.append(
            Violation(path="recordingKey", message="Only a RecordingProcess produces a recording")
        )
    violations += _check_order(record.time_start, record.time_end, "timeEnd", "Process")
    if record.place is not None:
        if record.place.latitude is not None and not (-90 <= record.place.latitude <= 90):
            violations.append(Violation(path="place.latitude", message="Latitude out of range"))
        if record.place.longitude is not None and not (-180 <= record.place.longitude <= 180):
            violations.append(Violation(path="place.longitude", message="Longitude out of range"))
    for i, participant in enumerate(record.participants):
        if participant.provenance is not None:
            violations += _check_reference(participant.provenance, f"participants[{i}].provenance")
    return violations


@validate_record.register
def _(record: ReleaseRecord) -> list[Violation]:
    violations = _check_key(record.key, "key")
    if not record.recording_keys:
        violations.append(
            Violation(path="recordingKeys", message="A release contains at least one recording")
        )
    violations += _check_license(record.license, "license")
    return violations


@validate_record.register
def _(record: LinkRecord) -> list[Violation]:
    violations = _check_key(record.subject_key, "subjectKey")
    scheme_field = record.link_kind.scheme_field
    if scheme_field is None:
        violations += _check_iri(record.value, "value")
    elif not getattr(record, scheme_field):
        violations.append(
            Violation(
                path=scheme_field,
                message=f"{record.link_kind.value} links must name their {scheme_field}",
            )
        )
    if not record.value.strip():
        violations.append(Violation(path="value", message="Link value must not be empty"))
    violations += _check_reference(record.provenance, "provenance")
    return violations


def validate_dataset(dataset: Dataset) -> list[Violation]:
    """Validate every record, locating violations as ``section[index].field``."""
    violations: list[Violation] = []
    for section, records in dataset.sections():
        seen: dict[str, int] = {}
        for index, record in enumerate(records):
            location = f"{section}[{index}]"
            violations += [v.located(location) for v in validate_record(record)]
            key = getattr(record, "key", None)
            if key is None:
                continue
            if key in seen:
                violations.append(
                    Violation(
                        path=f"{location}.key",
                        message=f"Duplicate key {key!r}, first used at {section}[{seen[key]}]",
                    )
                )
            else:
                seen[key] = index
    logger.debug(f"Validated dataset {dataset.record_counts()}: {len(violations)} violation(s)")
    return violations


# Cross-record references


@dataclass(frozen=True)
class ResolvedDataset:
    """A dataset whose cross-record keys all point at records of the right kind"""

    dataset: Dataset
    artists: dict[str, ArtistRecord] = field(default_factory=dict)
    entities: dict[str, EntityRecord] = field(default_factory=dict)
    processes: dict[str, ProcessRecord] = field(default_factory=dict)
    releases: dict[str, ReleaseRecord] = field(default_factory=dict)
    # recording key -> the RecordingProcess that produces it
    recordings: dict[str, ProcessRecord] = field(default_factory=dict)

    def subject_kind(self, key: str) -> str:
        """Index name holding a link subject key."""
        for kind in ("artists", "entities", "processes", "releases", "recordings"):
            if key in getattr(self, kind):
                return kind
        raise KeyError(key)


def resolve_references(dataset: Dataset) -> ResolvedDataset | list[Violation]:
    """
    Check that every cross-record key resolves to a record of the right kind.

    Returns the dataset with key indexes, or the violations naming each
    dangling or mismatched key.
    """
    artists = {record.key: record for record in dataset.artists}
    entities = {record.key: record for record in dataset.entities}
    processes = {record.key: record for record in dataset.processes}
    releases = {record.key: record for record in dataset.releases}
    recordings: dict[str, ProcessRecord] = {}
    violations: list[Violation] = []

    def dangling(path: str, what: str, key: str) -> None:
        violations.append(Violation(path=path, message=f"Unknown {what} key {key!r}"))

    for i, artist in enumerate(dataset.artists):
        for j, membership in enumerate(artist.memberships):
            path = f"artists[{i}].memberships[{j}].ensembleKey"
            target = artists.get(membership.ensemble_key)
            if target is None:
                dangling(path, "artist", membership.ensemble_key)
            elif target.kind is not ArtistKind.ENSEMBLE:
                violations.append(
                    Violation(
                        path=path,
                        message=f"ensembleKey must reference an Ensemble, "
                        f"{membership.ensemble_key!r} is a {target.kind.value}",
                    )
                )
        for name in ("influences", "collaborations"):
            for j, key in enumerate(getattr(artist, name)):
                if key not in artists:
                    dangling(f"artists[{i}].{name}[{j}]", "artist", key)

    for i, entity in enumerate(dataset.entities):
        for j, derivation in enumerate(entity.derivations):
            if derivation.target_key not in entities:
                path = f"entities[{i}].derivations[{j}].targetKey"
                dangling(path, "entity", derivation.target_key)
        for j, part in enumerate(entity.parts):
            if part not in entities:
                dangling(f"entities[{i}].parts[{j}]", "entity", part)

    for i, process in enumerate(dataset.processes):
        if process.entity_key not in entities:
            dangling(f"processes[{i}].entityKey", "entity", process.entity_key)
        for j, participant in enumerate(process.participants):
            if participant.artist_key not in artists:
                path = f"processes[{i}].participants[{j}].artistKey"
                dangling(path, "artist", participant.artist_key)
        new_key = process.creates_new_entity_key
        if new_key is not None and new_key not in entities:
            dangling(f"processes[{i}].createsNewEntityKey", "entity", new_key)
        if process.recording_key:
            if process.recording_key in recordings:
                violations.append(
                    Violation(
                        path=f"processes[{i}].recordingKey",
                        message=f"Recording {process.recording_key!r} is produced twice",
                    )
                )
            else:
                recordings[process.recording_key] = process

    for i, release in enumerate(dataset.releases):
        for j, key in enumerate(release.recording_keys):
            if key not in recordings:
                dangling(f"releases[{i}].recordingKeys[{j}]", "recording", key)

    indexes = (artists, entities, processes, releases, recordings)
    for i, link in enumerate(dataset.links):
        hits = sum(link.subject_key in index for index in indexes)
        if hits == 0:
            dangling(f"links[{i}].subjectKey", "record", link.subject_key)
        elif hits > 1:
            violations.append(
                Violation(
                    path=f"links[{i}].subjectKey",
                    message=f"Key {link.subject_key!r} names more than one kind of record",
                )
            )

    if violations:
        logger.debug(f"Reference resolution found {len(violations)} violation(s)")
        return violations
    return ResolvedDataset(
        dataset=dataset,
        artists=artists,
        entities=entities,
        processes=processes,
        releases=releases,
        recordings=recordings,
    )
