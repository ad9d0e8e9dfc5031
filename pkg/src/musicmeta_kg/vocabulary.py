"""
Static registry of the Music Meta and CORE terms used by the toolkit, plus the
alignment table to the Music Ontology, DOREMUS (Erlangen CRM) and Wikidata.

The registry is closed: every IRI the lifting code emits is looked up through
:func:`term`, so a typo fails loudly in one place.
"""

import logging
from enum import Enum
from functools import cache

from pydantic import BaseModel, ConfigDict

from .errors import UnknownTermError
from .rdf_core import RDF_NS, XSD_NS, Iri, make_iri

logger = logging.getLogger(__name__)

MM = "https://w3id.org/polifonia/ontology/music-meta/"
CORE = "https://w3id.org/polifonia/ontology/core/"
RDFS = "http://www.w3.org/2000/01/rdf-schema#"
MO = "http://purl.org/ontology/mo/"
ECRM = "http://erlangen-crm.org/"
WD = "http://www.wikidata.org/entity/"
WD_PAGE = "https://www.wikidata.org/wiki/"

NAMESPACES = {
    "mm": MM,
    "core": CORE,
    "rdf": RDF_NS,
    "rdfs": RDFS,
    "xsd": XSD_NS,
}

# Prefix map handed to the Turtle writer.
PREFIXES = {
    "core": CORE,
    "ecrm": ECRM,
    "mm": MM,
    "mo": MO,
    "rdf": RDF_NS,
    "rdfs": RDFS,
    "wd": WD,
    "xsd": XSD_NS,
}


class TermKind(str, Enum):
    CLASS = "Class"
    OBJECT_PROPERTY = "ObjectProperty"
    DATATYPE_PROPERTY = "DatatypeProperty"
    INDIVIDUAL = "Individual"
    DATATYPE = "Datatype"


class AlignmentScheme(str, Enum):
    MUSIC_ONTOLOGY = "mo"
    DOREMUS = "doremus"
    WIKIDATA = "wikidata"

    @property
    def namespaces(self) -> tuple[str, ...]:
        return _SCHEME_NAMESPACES[self]


_SCHEME_NAMESPACES = {
    AlignmentScheme.MUSIC_ONTOLOGY: (MO,),
    AlignmentScheme.DOREMUS: (ECRM,),
    AlignmentScheme.WIKIDATA: (WD_PAGE, WD),
}


class AlignmentRelation(str, Enum):
    EQUIVALENT_CLASS = "equivalentClass"
    SUB_CLASS_OF = "subClassOf"
    EQUIVALENT_PROPERTY = "equivalentProperty"
    SUB_PROPERTY_OF = "subPropertyOf"
    RELATED_MATCH = "relatedMatch"


TYPE_RELATIONS = {AlignmentRelation.EQUIVALENT_CLASS, AlignmentRelation.SUB_CLASS_OF}
PROPERTY_RELATIONS = {AlignmentRelation.EQUIVALENT_PROPERTY, AlignmentRelation.SUB_PROPERTY_OF}


class VocabTerm(BaseModel):
    """A registered ontology term"""

    model_config = ConfigDict(frozen=True)

    prefix: str
    local_name: str
    kind: TermKind
    invented: bool = False

    @property
    def qname(self) -> str:
        return f"{self.prefix}:{self.local_name}"

    @property
    def namespace(self) -> str:
        return NAMESPACES[self.prefix]

    @property
    def iri(self) -> str:
        return self.namespace + self.local_name


class AlignmentEntry(BaseModel):
    """Mapping of a Music Meta term to a term of an external schema"""

    model_config = ConfigDict(frozen=True)

    source: str
    scheme: AlignmentScheme
    target: str
    relation: AlignmentRelation


class RegistryRow(BaseModel):
    qname: str
    kind: TermKind
    alignment_count: int
    invented: bool


C = TermKind.CLASS
OP = TermKind.OBJECT_PROPERTY
DP = TermKind.DATATYPE_PROPERTY
DT = TermKind.DATATYPE

# (qname, kind, invented)
_TERMS: list[tuple[str, TermKind, bool]] = [
    # Music artists
    ("mm:MusicArtist", C, False),
    ("mm:Musician", C, False),
    ("mm:MusicEnsemble", C, False),
    ("mm:MusicGroup", C, False),
    ("mm:Orchestra", C, False),
    ("mm:Choir", C, False),
    ("mm:MusicAlgorithm", C, False),
    ("mm:MusicEnsembleMembership", C, False),
    ("mm:MusicGenre", C, False),
    ("mm:MediumOfPerformance", C, False),
    # Music inception
    ("mm:MusicEntity", C, False),
    ("mm:Text", C, False),
    ("mm:Lyrics", C, False),
    ("mm:Libretto", C, False),
    ("mm:AbstractScore", C, False),
    ("mm:Instrumentation", C, False),
    ("mm:Score", C, False),
    ("mm:FormType", C, False),
    ("mm:Key", C, False),
    ("mm:Movement", C, False),
    ("mm:Section", C, False),
    ("mm:Collection", C, False),
    ("mm:CollectionConcept", C, False),
    ("mm:CreativeProcess", C, False),
    ("mm:Participation", C, True),
    # Performance, recording, broadcast, publication
    ("mm:MusicalPerformance", C, False),
    ("mm:LivePerformance", C, False),
    ("mm:StudioPerformance", C, False),
    ("mm:RecordingProcess", C, False),
    ("mm:Recording", C, False),
    ("mm:Release", C, False),
    ("mm:BroadcastingSituation", C, False),
    ("mm:Broadcaster", C, False),
    ("mm:PublicationSituation", C, False),
    ("mm:Publisher", C, False),
    ("mm:License", C, False),
    # CORE
    ("core:Person", C, False),
    ("core:Place", C, False),
    ("core:TimeInterval", C, False),
    ("core:Reference", C, False),
    ("core:Source", C, False),
    ("core:SourceMethod", C, False),
    # Properties named by the ontology
    ("mm:hasPart", OP, False),
    ("mm:isDerivedFrom", OP, False),
    ("mm:isSingerOf", OP, False),
    ("mm:tempo", DP, False),
    ("mm:orderNumber", DP, False),
    ("core:isMemberOf", OP, False),
    ("core:confidence", DP, False),
    ("core:retrievedOn", DP, False),
    # Minted to draw the artist, inception, performance and publication figures
    ("mm:hasInstrumentation", OP, True),
    ("mm:hasText", OP, True),
    ("mm:hasAbstractScore", OP, True),
    ("mm:hasScore", OP, True),
    ("mm:involvesArtist", OP, True),
    ("mm:involvesMusicEntity", OP, True),
    ("mm:hasParticipation", OP, True),
    ("mm:createsEntity", OP, True),
    ("mm:hasRole", DP, True),
    ("mm:atPlace", OP, True),
    ("mm:during", OP, True),
    ("mm:producesRecording", OP, True),
    ("mm:containsRecording", OP, True),
    ("mm:hasPublicationSituation", OP, True),
    ("mm:hasBroadcastingSituation", OP, True),
    ("mm:broadcastBy", OP, True),
    ("mm:publishedBy", OP, True),
    ("mm:hasLicense", OP, True),
    ("mm:hasGenre", OP, True),
    ("mm:hasMediumOfPerformance", OP, True),
    ("mm:mediumCardinality", DP, True),
    ("mm:hasFormType", OP, True),
    ("mm:hasKey", OP, True),
    ("mm:memberOfMembership", OP, True),
    ("mm:membershipEnsemble", OP, True),
    ("mm:isGuitaristOf", OP, True),
    ("mm:isDrummerOf", OP, True),
    ("mm:isBassistOf", OP, True),
    ("mm:isKeyboardistOf", OP, True),
    ("mm:isConductorOf", OP, True),
    ("mm:isInfluencedBy", OP, True),
    ("mm:collaboratesWith", OP, True),
    ("mm:activityStartDate", DP, True),
    ("mm:activityEndDate", DP, True),
    ("mm:derivationType", DP, True),
    ("mm:hasCollectionConcept", OP, True),
    ("mm:hasMember", OP, True),
    ("mm:language", DP, True),
    ("mm:textBody", DP, True),
    ("mm:scoreFormat", DP, True),
    ("mm:technicalDetail", DP, True),
    ("mm:date", DP, True),
    ("mm:officialWebsite", OP, True),
    ("mm:fanPage", OP, True),
    ("mm:forum", OP, True),
    ("mm:review", OP, True),
    ("mm:shop", OP, True),
    ("mm:databaseId", DP, True),
    ("mm:streamingId", DP, True),
    ("mm:authorityId", DP, True),
    ("mm:identifierScheme", DP, True),
    ("core:name", DP, True),
    ("core:alias", DP, True),
    ("core:title", DP, True),
    ("core:startDate", DP, True),
    ("core:endDate", DP, True),
    ("core:latitude", DP, True),
    ("core:longitude", DP, True),
    ("core:hasReference", OP, True),
    ("core:source", OP, True),
    ("core:sourceMethod", OP, True),
    # RDF, RDFS and datatypes
    ("rdf:type", OP, False),
    ("rdf:langString", DT, False),
    ("rdfs:label", DP, False),
    ("rdfs:seeAlso", OP, False),
    ("xsd:string", DT, False),
    ("xsd:integer", DT, False),
    ("xsd:decimal", DT, False),
    ("xsd:date", DT, False),
    ("xsd:gYear", DT, False),
    ("xsd:gYearMonth", DT, False),
]

MO_ = AlignmentScheme.MUSIC_ONTOLOGY
DOR = AlignmentScheme.DOREMUS
WDS = AlignmentScheme.WIKIDATA
EQC = AlignmentRelation.EQUIVALENT_CLASS
SUB = AlignmentRelation.SUB_CLASS_OF
EQP = AlignmentRelation.EQUIVALENT_PROPERTY
SUBP = AlignmentRelation.SUB_PROPERTY_OF
REL = AlignmentRelation.RELATED_MATCH

# Hand-chosen relations; nothing here is inferred.
_ALIGNMENTS: list[tuple[str, AlignmentScheme, str, AlignmentRelation]] = [
    ("mm:Musician", MO_, MO + "MusicArtist", SUB),
    ("mm:Musician", DOR, ECRM + "E21_Person", SUB),
    ("mm:Musician", WDS, WD + "Q639669", EQC),
    ("mm:Musician", WDS, WD_PAGE + "Q639669", REL),
    ("mm:MusicArtist", MO_, MO + "MusicArtist", EQC),
    ("mm:MusicArtist", DOR, ECRM + "E39_Actor", SUB),
    ("mm:MusicEnsemble", MO_, MO + "MusicGroup", EQC),
    ("mm:MusicEnsemble", DOR, ECRM + "E74_Group", SUB),
    ("mm:MusicEnsemble", WDS, WD + "Q2088357", EQC),
    ("mm:MusicGroup", WDS, WD + "Q215380", EQC),
    ("mm:Orchestra", WDS, WD + "Q42998", EQC),
    ("mm:Choir", WDS, WD + "Q131186", EQC),
    ("mm:MusicGenre", MO_, MO + "Genre", EQC),
    ("mm:MusicGenre", WDS, WD + "Q188451", EQC),
    ("mm:MusicEntity", MO_, MO + "MusicalWork", REL),
    ("mm:MusicEntity", DOR, ECRM + "E73_Information_Object", SUB),
    ("mm:Lyrics", MO_, MO + "Lyrics", EQC),
    ("mm:Libretto", MO_, MO + "Libretto", EQC),
    ("mm:Instrumentation", MO_, MO + "Orchestration", REL),
    ("mm:Movement", MO_, MO + "Movement", EQC),
    ("mm:Score", MO_, MO + "Score", EQC),
    ("mm:MediumOfPerformance", MO_, MO + "Instrument", REL),
    ("mm:CreativeProcess", DOR, ECRM + "E65_Creation", SUB),
    ("mm:MusicalPerformance", MO_, MO + "Performance", EQC),
    ("mm:MusicalPerformance", DOR, ECRM + "E7_Activity", SUB),
    ("mm:MusicalPerformance", WDS, WD + "Q35140", SUB),
    ("mm:RecordingProcess", MO_, MO + "Recording", EQC),
    ("mm:Recording", MO_, MO + "Signal", REL),
    ("mm:Recording", WDS, WD + "Q3302947", SUB),
    ("mm:Release", MO_, MO + "Release", EQC),
    ("mm:Release", WDS, WD + "Q2031291", EQC),
    ("mm:Publisher", MO_, MO + "Label", REL),
    ("core:Person", DOR, ECRM + "E21_Person", EQC),
    ("core:Person", WDS, WD + "Q5", EQC),
    ("core:Place", DOR, ECRM + "E53_Place", EQC),
    ("core:TimeInterval", DOR, ECRM + "E52_Time-Span", EQC),
    ("mm:hasGenre", MO_, MO + "genre", EQP),
    ("mm:hasGenre", WDS, WD + "P136", REL),
    ("core:isMemberOf", DOR, ECRM + "P107i_is_current_or_former_member_of", EQP),
    ("mm:isSingerOf", DOR, ECRM + "P107i_is_current_or_former_member_of", SUBP),
    ("mm:hasPart", DOR, ECRM + "P148_has_component", SUBP),
    ("mm:producesRecording", MO_, MO + "produced_signal", REL),
]


def _build_registry() -> dict[str, VocabTerm]:
    registry: dict[str, VocabTerm] = {}
    seen_iris: set[str] = set()
    for qname, kind, invented in _TERMS:
        prefix, local = qname.split(":", 1)
        entry = VocabTerm(prefix=prefix, local_name=local, kind=kind, invented=invented)
        if qname in registry or entry.iri in seen_iris:
            raise RuntimeError(f"Duplicate vocabulary entry: {qname}")
        registry[qname] = entry
        seen_iris.add(entry.iri)
    return registry


def _build_alignments() -> dict[str, list[AlignmentEntry]]:
    table: dict[str, list[AlignmentEntry]] = {}
    seen: set[tuple[str, AlignmentScheme, str]] = set()
    for qname, scheme, target, relation in _ALIGNMENTS:
        source = REGISTRY[qname].iri
        if not target.startswith(scheme.namespaces):
            raise RuntimeError(f"Alignment target {target} is outside the {scheme.value} namespace")
        if (source, scheme, target) in seen:
            raise RuntimeError(f"Duplicate alignment: {qname} -> {target}")
        seen.add((source, scheme, target))
        entry = AlignmentEntry(source=source, scheme=scheme, target=target, relation=relation)
        table.setdefault(source, []).append(entry)
    return table


REGISTRY: dict[str, VocabTerm] = _build_registry()
ALIGNMENTS: dict[str, list[AlignmentEntry]] = _build_alignments()
_BY_IRI: dict[str, VocabTerm] = {entry.iri: entry for entry in REGISTRY.values()}


@cache
def term(qname: str) -> Iri:
    """Return the IRI term for a registered QName such as ``mm:Musician``."""
    entry = REGISTRY.get(qname)
    if entry is None:
        raise UnknownTermError(f"Unknown vocabulary term: {qname}")
    return make_iri(entry.iri)


def lookup(iri: "str | Iri") -> VocabTerm | None:
    return _BY_IRI.get(str(iri))


def alignments_for(source: "str | Iri") -> list[AlignmentEntry]:
    """All alignment entries for a term; empty when the term is unaligned."""
    return list(ALIGNMENTS.get(str(source), []))


def alignment_targets() -> set[str]:
    return {entry.target for entries in ALIGNMENTS.values() for entry in entries}


def resolve_qname(qname: str) -> Iri:
    """
    Resolve a QName against the registry, then against alignment targets.

    Used when loading competency questions so suites may mention external
    types such as ``mo:MusicArtist`` without opening the registry.
    """
    if qname in REGISTRY:
        return term(qname)
    prefix, _, local = qname.partition(":")
    namespace = PREFIXES.get(prefix)
    if namespace is not None and namespace + local in alignment_targets():
        return make_iri(namespace + local)
    raise UnknownTermError(f"Unknown vocabulary term: {qname}")


def compact(iri: "str | Iri", prefixes: dict[str, str] | None = None) -> str | None:
    """Shorten an IRI to a QName when a prefix matches, else None."""
    value = str(iri)
    best: tuple[str, str] | None = None
    for prefix, namespace in (prefixes if prefixes is not None else PREFIXES).items():
        if value.startswith(namespace) and (best is None or len(namespace) > len(best[1])):
            best = (prefix, namespace)
    if best is None:
        return None
    return f"{best[0]}:{value[len(best[1]):]}"


def registry_report() -> list[RegistryRow]:
    """One row per registered term, sorted by QName."""
    rows = [
        RegistryRow(
            qname=qname,
            kind=entry.kind,
            alignment_count=len(ALIGNMENTS.get(entry.iri, [])),
            invented=entry.invented,
        )
        for qname, entry in REGISTRY.items()
    ]
    return sorted(rows, key=lambda row: row.qname)
