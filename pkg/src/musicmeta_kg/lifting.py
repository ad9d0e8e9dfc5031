"""
Lifting of resolved metadata records into a Music Meta knowledge graph.

Every IRI is minted deterministically from the base IRI, a kind segment and a
slug of the natural key, so converting the same input twice gives the same
graph. Provenance is attached with RDF-star: the annotated triple is quoted
and linked to a ``core:Reference`` node.
"""

import hashlib
import logging
import threading
import unicodedata
from collections.abc import Callable, Iterable
from concurrent.futures import ThreadPoolExecutor
from decimal import Decimal
from enum import Enum

from pydantic import BaseModel, ConfigDict, Field, field_validator

from .errors import EmptyKeyError, LiftError, MusicMetaError
from .model import (
    ArtistKind,
    ArtistRecord,
    BroadcastRecord,
    Dataset,
    EntityRecord,
    LicenseRecord,
    LinkKind,
    LinkRecord,
    PartialDate,
    PartKind,
    PlaceRecord,
    ProcessKind,
    ProcessRecord,
    PublicationRecord,
    Reference,
    ReleaseRecord,
    ResolvedDataset,
    TextKind,
    Violation,
    resolve_references,
    validate_dataset,
)
from .rdf_core import (
    Graph,
    Iri,
    Literal,
    Term,
    Triple,
    is_absolute_iri,
    make_iri,
    make_literal,
    quote,
)
from .serialization import sort_key, term_to_ntriples, triple_to_ntriples
from .vocabulary import (
    ALIGNMENTS,
    PREFIXES,
    PROPERTY_RELATIONS,
    TYPE_RELATIONS,
    AlignmentScheme,
    term,
)

logger = logging.getLogger(__name__)

DEFAULT_BASE_IRI = "https://w3id.org/polifonia/resource/"

RDF_TYPE = term("rdf:type")
RDFS_LABEL = term("rdfs:label")

# Role labels with a dedicated membership property
ROLE_PROPERTIES = {
    "singer": "mm:isSingerOf",
    "vocalist": "mm:isSingerOf",
    "guitarist": "mm:isGuitaristOf",
    "drummer": "mm:isDrummerOf",
    "bassist": "mm:isBassistOf",
    "keyboardist": "mm:isKeyboardistOf",
    "conductor": "mm:isConductorOf",
}

LINK_PROPERTIES = {
    LinkKind.OFFICIAL_WEBSITE: "mm:officialWebsite",
    LinkKind.FAN_PAGE: "mm:fanPage",
    LinkKind.FORUM: "mm:forum",
    LinkKind.REVIEW: "mm:review",
    LinkKind.SHOP: "mm:shop",
    LinkKind.DATABASE_ID: "mm:databaseId",
    LinkKind.STREAMING_ID: "mm:streamingId",
    LinkKind.AUTHORITY_ID: "mm:authorityId",
}

ARTIST_CLASSES = {
    ArtistKind.MUSICIAN: "mm:Musician",
    ArtistKind.ENSEMBLE: "mm:MusicEnsemble",
    ArtistKind.ALGORITHM: "mm:MusicAlgorithm",
}

PROCESS_CLASSES = {
    ProcessKind.CREATIVE_PROCESS: ("mm:CreativeProcess",),
    ProcessKind.RECORDING_PROCESS: ("mm:RecordingProcess", "mm:CreativeProcess"),
    ProcessKind.LIVE_PERFORMANCE: ("mm:LivePerformance", "mm:MusicalPerformance"),
    ProcessKind.STUDIO_PERFORMANCE: ("mm:StudioPerformance", "mm:MusicalPerformance"),
}

TEXT_CLASSES = {
    TextKind.LYRICS: "mm:Lyrics",
    TextKind.LIBRETTO: "mm:Libretto",
    TextKind.TEXT: "mm:Text",
}
PART_CLASSES = {PartKind.MOVEMENT: "mm:Movement", PartKind.SECTION: "mm:Section"}


class UriKind(str, Enum):
    """Path segment placed after the base IRI for each kind of minted node"""

    ARTIST = "artist"
    ENTITY = "entity"
    PROCESS = "process"
    RECORDING = "recording"
    RELEASE = "release"
    MEMBERSHIP = "membership"
    SCORE = "score"
    INSTRUMENTATION = "instrumentation"
    SITUATION = "situation"
    REFERENCE = "reference"
    GENRE = "genre"
    MEDIUM = "medium"
    FORM = "form"
    KEY = "key"
    PLACE = "place"
    TIME = "time"
    PUBLISHER = "publisher"
    BROADCASTER = "broadcaster"
    LICENSE = "license"
    SOURCE = "source"
    METHOD = "method"
    COLLECTION = "collection"
    CONCEPT = "concept"
    PARTICIPATION = "participation"
    TEXT = "text"


# Index of ResolvedDataset -> kind of IRI its keys are minted under
SUBJECT_KINDS = {
    "artists": UriKind.ARTIST,
    "entities": UriKind.ENTITY,
    "processes": UriKind.PROCESS,
    "releases": UriKind.RELEASE,
    "recordings": UriKind.RECORDING,
}


class LiftConfig(BaseModel):
    """Options of one lifting session"""

    model_config = ConfigDict(frozen=True)

    base_iri: str = DEFAULT_BASE_IRI
    alignment_schemes: frozenset[AlignmentScheme] = frozenset()
    emit_provenance: bool = True
    session_label: str = "default"
    workers: int = Field(default=1, ge=1)

    @field_validator("base_iri")
    @classmethod
    def _base_iri_valid(cls, v: str) -> str:
        if not is_absolute_iri(v):
            raise ValueError(f"base IRI must be an absolute IRI, got {v!r}")
        if not v.endswith(("/", "#")):
            raise ValueError("base IRI must end with '/' or '#'")
        return v

    @field_validator("session_label")
    @classmethod
    def _session_label_valid(cls, v: str) -> str:
        if not v.strip():
            raise ValueError("session label must not be empty")
        return v


def key_hash(key: str) -> str:
    return hashlib.sha256(key.encode("utf-8")).hexdigest()


def slugify(key: str) -> str:
    """
    NFC-normalise and lowercase, replace runs outside ``[a-z0-9]`` with one
    hyphen and trim hyphens. A key with nothing left becomes its hash prefix.
    """
    folded = unicodedata.normalize("NFC", key).lower()
    out: list[str] = []
    for char in folded:
        if ("a" <= char <= "z") or ("0" <= char <= "9"):
            out.append(char)
        elif out and out[-1] != "-":
            out.append("-")
    slug = "".join(out).strip("-")
    return slug or key_hash(key)[:8]


class UriMinter:
    """
    Mints IRIs from natural keys and remembers slug assignments.

    Two distinct keys of one kind sharing a slug are told apart by appending
    ``-`` and the first 8 hex characters of the later key's hash. Call
    :meth:`reserve` with every key up front to make the assignment
    independent of minting order.
    """

    def __init__(self, base_iri: str, session_label: str = "default"):
        self.base_iri = base_iri
        self.session_segment = slugify(session_label)
        self._slugs: dict[tuple[UriKind, str], str] = {}
        self._owners: dict[tuple[UriKind, str], str] = {}
        self._lock = threading.Lock()

    def _kind_path(self, kind: UriKind) -> str:
        if kind is UriKind.PROCESS:
            return f"{kind.value}/{self.session_segment}"
        return kind.value

    def _assign(self, kind: UriKind, key: str, label: str | None = None) -> str:
        with self._lock:
            slug = self._slugs.get((kind, key))
            if slug is not None:
                return slug
            base = slugify(key if label is None else label)
            slug = base
            digest = key_hash(key)
            width = 8
            while self._owners.get((kind, slug), key) != key:
                slug = f"{base}-{digest[:width]}"
                width += 8
            self._slugs[(kind, key)] = slug
            self._owners[(kind, slug)] = key
            return slug

    def reserve(self, kind: UriKind, keys: Iterable[str | tuple[str, str]]) -> None:
        """Assign slugs in key order. A ``(key, label)`` pair takes its slug from the label."""
        entries = {(entry, None) if isinstance(entry, str) else entry for entry in keys}
        for key, label in sorted(entries, key=lambda entry: entry[0]):
            if key:
                self._assign(kind, key, label)

    def mint(self, kind: UriKind, key: str, label: str | None = None) -> Iri:
        if not key:
            raise EmptyKeyError(f"Cannot mint a {kind.value} IRI for an empty key")
        slug = self._assign(kind, key, label)
        return make_iri(f"{self.base_iri}{self._kind_path(kind)}/{slug}")

    def derive(self, kind: UriKind, owner: Iri, *parts: str) -> Iri:
        """IRI of a node owned by another minted node, e.g. an entity's instrumentation."""
        owner_path = owner.value.removeprefix(self.base_iri)
        tail = "".join(f"/{slugify(part)}" for part in parts)
        return make_iri(f"{self.base_iri}{kind.value}/{owner_path}{tail}")

    def content(self, kind: UriKind, text: str) -> Iri:
        return make_iri(f"{self.base_iri}{kind.value}/{key_hash(text)[:16]}")


class LiftContext:
    """Configuration plus the IRI minter shared by all lifts of one session."""

    def __init__(self, config: LiftConfig | None = None):
        self.config = config or LiftConfig()
        self.minter = UriMinter(self.config.base_iri, self.config.session_label)

    def mint(self, kind: UriKind, key: str) -> Iri:
        return mint_iri(self, kind, key)

    def derive(self, kind: UriKind, owner: Iri, *parts: str) -> Iri:
        return self.minter.derive(kind, owner, *parts)

    def subject_iri(self, dataset: ResolvedDataset, key: str) -> Iri:
        return self.mint(SUBJECT_KINDS[dataset.subject_kind(key)], key)

    def reserve_dataset(self, dataset: Dataset) -> None:
        """Reserve every natural key the lifts of this dataset will mint."""
        keys: dict[UriKind, set[str | tuple[str, str]]] = {kind: set() for kind in UriKind}
        for artist in dataset.artists:
            keys[UriKind.ARTIST].add(artist.key)
            keys[UriKind.GENRE].update(artist.genres)
            keys[UriKind.MEDIUM].update(artist.mediums)
        for entity in dataset.entities:
            keys[UriKind.ENTITY].add(entity.key)
            if entity.score is not None:
                keys[UriKind.FORM].add(entity.score.form_type or "")
                keys[UriKind.KEY].add(entity.score.key or "")
            for collection in entity.collections:
                keys[UriKind.COLLECTION].add(collection.collection_key)
                keys[UriKind.CONCEPT].add(collection.concept_label or "")
            for score in entity.scores:
                _publication_keys(keys, score.publication)
                keys[UriKind.LICENSE].add(score.license.name if score.license else "")
        for process in dataset.processes:
            keys[UriKind.PROCESS].add(process.key)
            keys[UriKind.RECORDING].add(process.recording_key or "")
            if process.place is not None:
                keys[UriKind.PLACE].add((place_key(process.place), process.place.label))
            for participant in process.participants:
                _reference_keys(keys, participant.provenance)
        for release in dataset.releases:
            keys[UriKind.RELEASE].add(release.key)
            keys[UriKind.RECORDING].update(release.recording_keys)
            _publication_keys(keys, release.publication)
            keys[UriKind.LICENSE].add(release.license.name if release.license else "")
            for broadcast in release.broadcasts:
                keys[UriKind.BROADCASTER].add(broadcast.broadcaster_name)
                keys[UriKind.PLACE].add(broadcast.place_label or "")
        for link in dataset.links:
            _reference_keys(keys, link.provenance)
        for kind, values in keys.items():
            self.minter.reserve(kind, values)


def mint_iri(session: LiftContext, kind: UriKind, key: str) -> Iri:
    """
    IRI of a natural key under the base IRI of the session configuration.

    Slug assignments are remembered for the life of the session, so a second
    key with the slug of an earlier one gets the hash suffix.
    """
    return session.minter.mint(kind, key)


def _publication_keys(
    keys: dict[UriKind, set[str | tuple[str, str]]], publication: PublicationRecord | None
) -> None:
    if publication is not None:
        keys[UriKind.PUBLISHER].add(publication.publisher_name)
        keys[UriKind.PLACE].add(publication.place_label or "")


def _reference_keys(keys: dict[UriKind, set[str | tuple[str, str]]], ref: Reference | None) -> None:
    if ref is not None:
        keys[UriKind.SOURCE].add(ref.source_label)
        keys[UriKind.METHOD].add(ref.method or "")
        keys[UriKind.REFERENCE].add(ref.key or "")


# Literal helpers


def text_literal(value: str, language: str | None = None) -> Literal:
    return make_literal(value, language=language)


def date_literal(value: PartialDate) -> Literal:
    return make_literal(str(value), value.xsd_datatype)


def integer_literal(value: int) -> Literal:
    return make_literal(str(value), term("xsd:integer"))


def decimal_literal(value: Decimal) -> Literal:
    lexical = format(value.normalize(), "f")
    if "." not in lexical:
        lexical += ".0"
    return make_literal(lexical, term("xsd:decimal"))



def reference_fingerprint(ref: Reference) -> str:
    """
    The reference fields in their N-Triples form, one per line.

    Equal values give equal text however they were spelled in the input,
    e.g. confidences 1, 1.0 and 1.00.
    """
    fields = [
        text_literal(ref.source_label),
        text_literal(ref.source_url) if ref.source_url is not None else None,
        text_literal(ref.method) if ref.method else None,
        decimal_literal(ref.confidence) if ref.confidence is not None else None,
        date_literal(ref.retrieved_on) if ref.retrieved_on is not None else None,
    ]
    return "\n".join("-" if field is None else term_to_ntriples(field) for field in fields)


class _Triples:
    """Accumulates the triples of one lift."""

    def __init__(self) -> None:
        self.triples: set[Triple] = set()

    def add(self, subject: Term, predicate: str | Iri, obj: Term) -> Triple:
        prop = term(predicate) if isinstance(predicate, str) else predicate
        triple = Triple(subject, prop, obj)
        self.triples.add(triple)
        return triple

    def typed(self, subject: Term, *classes: str) -> None:
        for qname in classes:
            self.add(subject, RDF_TYPE, term(qname))

    def labelled(self, subject: Term, qname: str, label: str) -> None:
        self.typed(subject, qname)
        self.add(subject, RDFS_LABEL, text_literal(label))

    def date(self, subject: Term, predicate: str, value: PartialDate | None) -> None:
        if value is not None:
            self.add(subject, predicate, date_literal(value))

    def update(self, triples: Iterable[Triple]) -> None:
        self.triples.update(triples)


def _time_interval(
    ctx: LiftContext,
    out: _Triples,
    owner: Iri,
    start: PartialDate | None,
    end: PartialDate | None,
) -> None:
    if start is None and end is None:
        return
    interval = ctx.derive(UriKind.TIME, owner)
    out.add(owner, "mm:during", interval)
    out.typed(interval, "core:TimeInterval")
    out.date(interval, "core:startDate", start)
    out.date(interval, "core:endDate", end)


def place_key(place: PlaceRecord) -> str:
    """Identity of a place: its label, plus its coordinates when known."""
    if place.latitude is None and place.longitude is None:
        return place.label
    coordinates = [
        "" if value is None else decimal_literal(value).lexical
        for value in (place.latitude, place.longitude)
    ]
    return f"{place.label} @ {coordinates[0]},{coordinates[1]}"


def _place(ctx: LiftContext, out: _Triples, owner: Iri, place: PlaceRecord | str | None) -> None:
    if place is None:
        return
    record = PlaceRecord(label=place) if isinstance(place, str) else place
    node = ctx.minter.mint(UriKind.PLACE, place_key(record), record.label)
    out.add(owner, "mm:atPlace", node)
    out.labelled(node, "core:Place", record.label)
    if record.latitude is not None:
        out.add(node, "core:latitude", decimal_literal(record.latitude))
    if record.longitude is not None:
        out.add(node, "core:longitude", decimal_literal(record.longitude))


def _license(ctx: LiftContext, out: _Triples, owner: Iri, license_: LicenseRecord | None) -> None:
    if license_ is None:
        return
    node = ctx.mint(UriKind.LICENSE, license_.name)
    out.add(owner, "mm:hasLicense", node)
    out.labelled(node, "mm:License", license_.name)
    if license_.url is not None:
        out.add(node, "rdfs:seeAlso", make_iri(license_.url))


def _publication(
    ctx: LiftContext, out: _Triples, owner: Iri, publication: PublicationRecord | None
) -> None:
    if publication is None:
        return
    situation = ctx.derive(UriKind.SITUATION, owner, "publication")
    out.add(owner, "mm:hasPublicationSituation", situation)
    out.typed(situation, "mm:PublicationSituation")
    publisher = ctx.mint(UriKind.PUBLISHER, publication.publisher_name)
    out.add(situation, "mm:publishedBy", publisher)
    out.typed(publisher, "mm:Publisher")
    out.add(publisher, "core:name", text_literal(publication.publisher_name))
    out.date(situation, "mm:date", publication.date)
    _place(ctx, out, situation, publication.place_label)


def _broadcast(
    ctx: LiftContext, out: _Triples, owner: Iri, index: int, broadcast: BroadcastRecord
) -> None:
    situation = ctx.derive(UriKind.SITUATION, owner, "broadcast", str(index))
    out.add(owner, "mm:hasBroadcastingSituation", situation)
    out.typed(situation, "mm:BroadcastingSituation")
    broadcaster = ctx.mint(UriKind.BROADCASTER, broadcast.broadcaster_name)
    out.add(situation, "mm:broadcastBy", broadcaster)
    out.typed(broadcaster, "mm:Broadcaster")
    out.add(broadcaster, "core:name", text_literal(broadcast.broadcaster_name))
    out.date(situation, "mm:date", broadcast.date)
    _place(ctx, out, situation, broadcast.place_label)


# Record lifts


def lift_artist(ctx: LiftContext, record: ArtistRecord, dataset: ResolvedDataset) -> set[Triple]:
    """Triples of a musician, ensemble or algorithm, memberships included."""
    out = _Triples()
    artist = ctx.mint(UriKind.ARTIST, record.key)
    out.typed(artist, ARTIST_CLASSES[record.kind])
    if record.ensemble_kind is not None:
        out.typed(artist, f"mm:{record.ensemble_kind.value}")
    out.add(artist, "core:name", text_literal(record.name, record.name_language))
    for alias in record.aliases:
        out.add(artist, "core:alias", text_literal(alias.name, alias.language))
    for genre in record.genres:
        node = ctx.mint(UriKind.GENRE, genre)
        out.add(artist, "mm:hasGenre", node)
        out.labelled(node, "mm:MusicGenre", genre)
    for medium in record.mediums:
        node = ctx.mint(UriKind.MEDIUM, medium)
        out.add(artist, "mm:hasMediumOfPerformance", node)
        out.labelled(node, "mm:MediumOfPerformance", medium)
    out.date(artist, "mm:activityStartDate", record.activity_start)
    out.date(artist, "mm:activityEndDate", record.activity_end)
    for key in record.influences:
        out.add(artist, "mm:isInfluencedBy", ctx.mint(UriKind.ARTIST, key))
    for key in record.collaborations:
        out.add(artist, "mm:collaboratesWith", ctx.mint(UriKind.ARTIST, key))

    for index, membership in enumerate(record.memberships):
        ensemble = ctx.mint(UriKind.ARTIST, membership.ensemble_key)
        role = membership.role.strip().lower() if membership.role else None
        has_period = membership.period_start is not None or membership.period_end is not None
        if not has_period and role is None:
            out.add(artist, "core:isMemberOf", ensemble)
        elif not has_period and role in ROLE_PROPERTIES:
            out.add(artist, ROLE_PROPERTIES[role], ensemble)
        else:
            node = ctx.derive(UriKind.MEMBERSHIP, artist, str(index))
            out.typed(node, "mm:MusicEnsembleMembership")
            out.add(node, "mm:memberOfMembership", artist)
            out.add(node, "mm:membershipEnsemble", ensemble)
            if membership.role:
                out.add(node, "mm:hasRole", text_literal(membership.role))
            _time_interval(ctx, out, node, membership.period_start, membership.period_end)
    return out.triples


def lift_entity(ctx: LiftContext, record: EntityRecord, dataset: ResolvedDataset) -> set[Triple]:
    """Triples of a music entity and its text, score, instrumentation and derivations."""
    out = _Triples()
    entity = ctx.mint(UriKind.ENTITY, record.key)
    out.typed(entity, "mm:MusicEntity")
    out.add(entity, "core:title", text_literal(record.title, record.title_language))

    if record.text is not None:
        text = ctx.derive(UriKind.TEXT, entity)
        out.add(entity, "mm:hasText", text)
        out.typed(text, TEXT_CLASSES[record.text.kind])
        if record.text.language is not None:
            out.add(text, "mm:language", text_literal(record.text.language))
        if record.text.body is not None:
            out.add(text, "mm:textBody", text_literal(record.text.body, record.text.language))

    if record.score is not None:
        score = ctx.derive(UriKind.SCORE, entity, "abstract")
        out.add(entity, "mm:hasAbstractScore", score)
        out.typed(score, "mm:AbstractScore")
        if record.score.form_type:
            form = ctx.mint(UriKind.FORM, record.score.form_type)
            out.add(score, "mm:hasFormType", form)
            out.labelled(form, "mm:FormType", record.score.form_type)
        if record.score.key:
            key = ctx.mint(UriKind.KEY, record.score.key)
            out.add(score, "mm:hasKey", key)
            out.labelled(key, "mm:Key", record.score.key)
        if record.score.tempo is not None:
            out.add(score, "mm:tempo", text_literal(record.score.tempo))
        if record.score.order_number is not None:
            out.add(score, "mm:orderNumber", integer_literal(record.score.order_number))
        parts = sorted(enumerate(record.score.parts), key=lambda item: item[1].order_number)
        for index, part in parts:
            node = ctx.derive(UriKind.SCORE, entity, "part", str(index))
            out.add(score, "mm:hasPart", node)
            out.labelled(node, PART_CLASSES[part.kind], part.label)
            out.add(node, "mm:orderNumber", integer_literal(part.order_number))

    instrumentation = None
    if record.instrumentation:
        instrumentation = ctx.derive(UriKind.INSTRUMENTATION, entity)
        out.add(entity, "mm:hasInstrumentation", instrumentation)
        out.typed(instrumentation, "mm:Instrumentation")
        for index, entry in enumerate(record.instrumentation):
            node = ctx.derive(UriKind.INSTRUMENTATION, entity, "medium", str(index))
            out.add(instrumentation, "mm:hasMediumOfPerformance", node)
            out.labelled(node, "mm:MediumOfPerformance", entry.medium)
            out.add(node, "mm:mediumCardinality", integer_literal(entry.cardinality))

    for part_key in record.parts:
        out.add(entity, "mm:hasPart", ctx.mint(UriKind.ENTITY, part_key))

    for derivation in record.derivations:
        if derivation.target_key == record.key:
            raise MusicMetaError(f"Entity {record.key!r} cannot be derived from itself")
        target = ctx.mint(UriKind.ENTITY, derivation.target_key)
        derived = out.add(entity, "mm:isDerivedFrom", target)
        if derivation.derivation_type:
            out.add(quote(derived), "mm:derivationType", text_literal(derivation.derivation_type))

    for membership in record.collections:
        collection = ctx.mint(UriKind.COLLECTION, membership.collection_key)
        out.labelled(collection, "mm:Collection", membership.collection_key)
        out.add(collection, "mm:hasMember", entity)
        if membership.concept_label:
            concept = ctx.mint(UriKind.CONCEPT, membership.concept_label)
            out.add(collection, "mm:hasCollectionConcept", concept)
            out.labelled(concept, "mm:CollectionConcept", membership.concept_label)

    for index, edition in enumerate(record.scores):
        score = ctx.derive(UriKind.SCORE, entity, "edition", str(index))
        out.add(entity, "mm:hasScore", score)
        out.labelled(score, "mm:Score", edition.label)
        if edition.format is not None:
            out.add(score, "mm:scoreFormat", text_literal(edition.format.value))
        if instrumentation is not None:
            out.add(score, "mm:hasInstrumentation", instrumentation)
        _publication(ctx, out, score, edition.publication)
        _license(ctx, out, score, edition.license)
    return out.triples


def lift_process(ctx: LiftContext, record: ProcessRecord, dataset: ResolvedDataset) -> set[Triple]:
    """Triples of a creative process, performance or recording session."""
    out = _Triples()
    process = ctx.mint(UriKind.PROCESS, record.key)
    out.typed(process, *PROCESS_CLASSES[record.kind])
    out.add(process, "mm:involvesMusicEntity", ctx.mint(UriKind.ENTITY, record.entity_key))

    for index, participant in enumerate(record.participants):
        artist = ctx.mint(UriKind.ARTIST, participant.artist_key)
        if participant.role is None:
            claim = out.add(process, "mm:involvesArtist", artist)
        else:
            node = ctx.derive(UriKind.PARTICIPATION, process, str(index))
            out.add(process, "mm:hasParticipation", node)
            out.typed(node, "mm:Participation")
            out.add(node, "mm:hasRole", text_literal(participant.role))
            claim = out.add(node, "mm:involvesArtist", artist)
        if participant.provenance is not None and ctx.config.emit_provenance:
            out.update(annotate(claim, participant.provenance, ctx))

    _place(ctx, out, process, record.place)
    _time_interval(ctx, out, process, record.time_start, record.time_end)
    if record.creates_new_entity_key is not None:
        created = ctx.mint(UriKind.ENTITY, record.creates_new_entity_key)
        out.add(process, "mm:createsEntity", created)
    if record.recording_key:
        recording = ctx.mint(UriKind.RECORDING, record.recording_key)
        out.add(process, "mm:producesRecording", recording)
        out.typed(recording, "mm:Recording")
    for name, value in sorted(record.technical.items()):
        out.add(process, "mm:technicalDetail", text_literal(f"{name}: {value}"))
    return out.triples


def lift_release(ctx: LiftContext, record: ReleaseRecord, dataset: ResolvedDataset) -> set[Triple]:
    """Triples of a release with its recordings, publication, license and broadcasts."""
    out = _Triples()
    release = ctx.mint(UriKind.RELEASE, record.key)
    out.typed(release, "mm:Release")
    out.add(release, "core:title", text_literal(record.title))
    for key in record.recording_keys:
        recording = ctx.mint(UriKind.RECORDING, key)
        out.add(release, "mm:containsRecording", recording)
        out.typed(recording, "mm:Recording")
    _publication(ctx, out, release, record.publication)
    _license(ctx, out, release, record.license)
    for index, broadcast in enumerate(record.broadcasts):
        _broadcast(ctx, out, release, index, broadcast)
    return out.triples


def annotate(triple: Triple, ref: Reference, ctx: LiftContext) -> set[Triple]:
    """
    Provenance of a statement, attached to the quoted triple.

    The annotated triple itself is not asserted here. Reference nodes are
    addressed by the content of the triple and the reference, or by the
    reference key when one is given.
    """
    out = _Triples()
    if ref.key:
        reference = ctx.mint(UriKind.REFERENCE, ref.key)
    else:
        fingerprint = triple_to_ntriples(triple) + "\n" + reference_fingerprint(ref)
        reference = ctx.minter.content(UriKind.REFERENCE, fingerprint)
    out.add(quote(triple), "core:hasReference", reference)
    out.typed(reference, "core:Reference")

    source = ctx.mint(UriKind.SOURCE, ref.source_label)
    out.add(reference, "core:source", source)
    out.labelled(source, "core:Source", ref.source_label)
    if ref.source_url is not None:
        out.add(source, "rdfs:seeAlso", make_iri(ref.source_url))
    if ref.method:
        method = ctx.mint(UriKind.METHOD, ref.method)
        out.add(reference, "core:sourceMethod", method)
        out.labelled(method, "core:SourceMethod", ref.method)
    if ref.confidence is not None:
        out.add(reference, "core:confidence", decimal_literal(ref.confidence))
    out.date(reference, "core:retrievedOn", ref.retrieved_on)
    return out.triples


def _link_object(record: LinkRecord) -> Term:
    if record.link_kind.scheme_field is None:
        return make_iri(record.value)
    if record.value.startswith(("http://", "https://")) and is_absolute_iri(record.value):
        return make_iri(record.value)
    return text_literal(record.value)


def lift_link(ctx: LiftContext, record: LinkRecord, dataset: ResolvedDataset) -> set[Triple]:
    """The link triple, its identifier scheme and, when enabled, its provenance."""
    out = _Triples()
    subject = ctx.subject_iri(dataset, record.subject_key)
    link = out.add(subject, LINK_PROPERTIES[record.link_kind], _link_object(record))
    scheme_field = record.link_kind.scheme_field
    if scheme_field is not None:
        out.add(quote(link), "mm:identifierScheme", text_literal(getattr(record, scheme_field)))
    if ctx.config.emit_provenance:
        out.update(annotate(link, record.provenance, ctx))
    return out.triples


def emit_alignments(graph: Graph, config: LiftConfig) -> set[Triple]:
    """
    Typing and property triples for the enabled external schemes.

    Only class relations ``equivalentClass`` / ``subClassOf`` and property
    relations ``equivalentProperty`` / ``subPropertyOf`` produce triples.
    """
    schemes = config.alignment_schemes
    if not schemes:
        return set()
    added: set[Triple] = set()
    for triple in graph:
        if triple.predicate == RDF_TYPE and isinstance(triple.object, Iri):
            for entry in ALIGNMENTS.get(triple.object.value, []):
                if entry.scheme in schemes and entry.relation in TYPE_RELATIONS:
                    added.add(Triple(triple.subject, RDF_TYPE, make_iri(entry.target)))
            continue
        for entry in ALIGNMENTS.get(str(triple.predicate), []):
            if entry.scheme in schemes and entry.relation in PROPERTY_RELATIONS:
                added.add(Triple(triple.subject, make_iri(entry.target), triple.object))
    return added


LiftTask = Callable[[], set[Triple]]


def lift_dataset(config: LiftConfig, dataset: ResolvedDataset) -> Graph:
    """
    Lift every record of a resolved dataset into one graph.

    Records are lifted in key order and each record's triples are inserted
    in canonical order, so the graph, including its insertion order, depends
    only on the configuration and the dataset contents.
    """
    ctx = LiftContext(config)
    ctx.reserve_dataset(dataset.dataset)

    tasks: list[tuple[str, LiftTask]] = []
    source = dataset.dataset
    for i, artist in sorted(enumerate(source.artists), key=lambda item: item[1].key):
        tasks.append((f"artists[{i}]", lambda r=artist: lift_artist(ctx, r, dataset)))
    for i, entity in sorted(enumerate(source.entities), key=lambda item: item[1].key):
        tasks.append((f"entities[{i}]", lambda r=entity: lift_entity(ctx, r, dataset)))
    for i, process in sorted(enumerate(source.processes), key=lambda item: item[1].key):
        tasks.append((f"processes[{i}]", lambda r=process: lift_process(ctx, r, dataset)))
    for i, release in sorted(enumerate(source.releases), key=lambda item: item[1].key):
        tasks.append((f"releases[{i}]", lambda r=release: lift_release(ctx, r, dataset)))
    links = sorted(
        enumerate(source.links),
        key=lambda item: (
            item[1].subject_key,
            item[1].link_kind.value,
            item[1].value,
            item[1].provenance.key or "",
            reference_fingerprint(item[1].provenance),
        ),
    )
    for i, link in links:
        tasks.append((f"links[{i}]", lambda r=link: lift_link(ctx, r, dataset)))

    def run(task: tuple[str, LiftTask]) -> set[Triple] | Violation:
        location, lift = task
        try:
            return lift()
        except MusicMetaError as exc:
            logger.debug(f"Lifting {location} failed: {exc}")
            return Violation(path=location, message=str(exc))

    if config.workers > 1 and len(tasks) > 1:
        with ThreadPoolExecutor(max_workers=config.workers) as pool:
            results = list(pool.map(run, tasks))
    else:
        results = [run(task) for task in tasks]

    violations = [result for result in results if isinstance(result, Violation)]
    if violations:
        logger.error(f"Lifting failed with {len(violations)} violation(s)")
        raise LiftError(violations)

    graph = Graph(prefixes=PREFIXES)
    for triples in results:
        graph.update(sorted(triples, key=sort_key))  # type: ignore[arg-type]
    alignments = emit_alignments(graph, config)
    graph.update(sorted(alignments, key=sort_key))
    logger.info(
        f"Lifted {len(tasks)} records into {len(graph)} triples "
        f"({len(alignments)} alignment triples)"
    )
    return graph


def build_graph(dataset: Dataset, config: LiftConfig | None = None) -> Graph:
    """Validate, resolve and lift a dataset, raising LiftError with every violation."""
    config = config or LiftConfig()
    violations = validate_dataset(dataset)
    if violations:
        raise LiftError(violations)
    resolved = resolve_references(dataset)
    if isinstance(resolved, list):
        raise LiftError(resolved)
    return lift_dataset(config, resolved)
