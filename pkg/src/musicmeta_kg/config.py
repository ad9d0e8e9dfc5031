"""
Settings for the command-line conversion.

Precedence, highest first: command-line flags, the ``--config`` JSON file,
``MUSICMETA_*`` environment variables, defaults.
"""

import json
import logging
import os
import sys
from enum import Enum
from pathlib import Path
from typing import Any

from pydantic import BaseModel, Field, field_validator

from .lifting import DEFAULT_BASE_IRI, LiftConfig
from .serialization import SerializationFormat, SerializationOptions
from .vocabulary import AlignmentScheme

logger = logging.getLogger(__name__)

ENV_VARS = {
    "base_iri": "MUSICMETA_BASE_IRI",
    "align": "MUSICMETA_ALIGN",
    "session_label": "MUSICMETA_SESSION_LABEL",
    "workers": "MUSICMETA_WORKERS",
}
LOG_LEVEL_VAR = "MUSICMETA_LOG_LEVEL"


class ReportFormat(str, Enum):
    JSON = "json"
    TABLE = "table"


def parse_align(value: Any) -> frozenset[AlignmentScheme]:
    """Read ``"mo,doremus,wikidata"`` or a list of scheme names."""
    if value is None:
        return frozenset()
    names = value.split(",") if isinstance(value, str) else list(value)
    schemes = set()
    for name in names:
        name = str(name).strip().lower()
        if not name:
            continue
        try:
            schemes.add(AlignmentScheme(name))
        except ValueError:
            allowed = ", ".join(scheme.value for scheme in AlignmentScheme)
            raise ValueError(f"Unknown alignment scheme {name!r} (expected {allowed})") from None
    return frozenset(schemes)


class ConvertSettings(BaseModel):
    """Resolved options of one ``convert`` run"""

    out: Path | None = None
    format: SerializationFormat = SerializationFormat.NTRIPLES_STAR
    align: frozenset[AlignmentScheme] = frozenset()
    no_provenance: bool = False
    base_iri: str = DEFAULT_BASE_IRI
    canonical: bool = False
    report: ReportFormat = ReportFormat.TABLE
    session_label: str = "default"
    workers: int = Field(default=1, ge=1)

    @field_validator("align", mode="before")
    @classmethod
    def _align_from_text(cls, v: Any) -> frozenset[AlignmentScheme]:
        return parse_align(v)

    def lift_config(self) -> LiftConfig:
        return LiftConfig(
            base_iri=self.base_iri,
            alignment_schemes=self.align,
            emit_provenance=not self.no_provenance,
            session_label=self.session_label,
            workers=self.workers,
        )

    def serialization_options(self) -> SerializationOptions:
        return SerializationOptions(format=self.format, canonical=self.canonical)


def env_settings(environ: dict[str, str] | None = None) -> dict[str, Any]:
    environ = dict(os.environ) if environ is None else environ
    return {field: environ[var] for field, var in ENV_VARS.items() if environ.get(var)}


def load_config_file(path: str | Path) -> dict[str, Any]:
    """Read a JSON config whose keys mirror the flag names with ``_`` for ``-``."""
    data = json.loads(Path(path).read_text(encoding="utf-8"))
    if not isinstance(data, dict):
        raise ValueError(f"Config file {path} must contain a JSON object")
    unknown = set(data) - set(ConvertSettings.model_fields)
    if unknown:
        raise ValueError(f"Unknown config keys in {path}: {', '.join(sorted(unknown))}")
    return data


def resolve_convert_settings(
    flags: dict[str, Any],
    config_path: str | Path | None = None,
    environ: dict[str, str] | None = None,
) -> ConvertSettings:
    """Merge the configuration layers; ``None`` flags count as not given."""
    merged: dict[str, Any] = {}
    merged.update(env_settings(environ))
    if config_path is not None:
        merged.update(load_config_file(config_path))
    merged.update({name: value for name, value in flags.items() if value is not None})
    settings = ConvertSettings.model_validate(merged)
    logger.debug(f"Convert settings: {settings.model_dump(mode='json')}")
    return settings


def configure_logging() -> None:
    """Send log records to stderr at the level named by MUSICMETA_LOG_LEVEL."""
    level = os.getenv(LOG_LEVEL_VAR, "WARNING").upper()
    logging.basicConfig(
        level=getattr(logging, level, logging.WARNING),
        stream=sys.stderr,
        format="%(asctime)s %(levelname)s %(name)s: %(message)s",
    )
