"""Pytest configuration and fixtures for the Music Meta KG tests."""

import json
from pathlib import Path

import pytest

from musicmeta_kg.lifting import LiftConfig, build_graph
from musicmeta_kg.model import Dataset
from musicmeta_kg.rdf_core import Graph, Iri, Literal, Triple
from musicmeta_kg.validation import Suite, load_suite
from musicmeta_kg.vocabulary import AlignmentScheme

FIXTURES = Path(__file__).parent / "fixtures"
EX = "http://example.org/"


def ex(local: str) -> Iri:
    return Iri(EX + local)


@pytest.fixture
def fixture_path() -> Path:
    """Path of the acceptance dataset."""
    return FIXTURES / "acceptance_dataset.json"


@pytest.fixture
def fixture_data(fixture_path) -> dict:
    """The acceptance dataset as plain JSON data, safe to modify."""
    return json.loads(fixture_path.read_text(encoding="utf-8"))


@pytest.fixture
def dataset(fixture_path) -> Dataset:
    return Dataset.from_json(fixture_path.read_bytes())


@pytest.fixture
def all_schemes() -> frozenset[AlignmentScheme]:
    return frozenset(AlignmentScheme)


@pytest.fixture
def fixture_graph(dataset) -> Graph:
    """The acceptance dataset lifted with the default configuration."""
    return build_graph(dataset, LiftConfig())


@pytest.fixture
def aligned_graph(dataset, all_schemes) -> Graph:
    """The acceptance dataset lifted with every alignment scheme enabled."""
    return build_graph(dataset, LiftConfig(alignment_schemes=all_schemes))


@pytest.fixture
def bundled_suite() -> Suite:
    return load_suite()


@pytest.fixture
def small_graph() -> Graph:
    """A hand-built graph with one musician, one ensemble and a membership."""
    return Graph(
        [
            Triple(ex("bowie"), ex("memberOf"), ex("tin-machine")),
            Triple(ex("gabrels"), ex("memberOf"), ex("tin-machine")),
            Triple(ex("bowie"), ex("name"), Literal("David Bowie")),
            Triple(ex("tin-machine"), ex("name"), Literal("Tin Machine")),
        ]
    )
