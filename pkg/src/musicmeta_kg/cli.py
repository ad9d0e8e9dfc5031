"""
Command-line interface: ``musicmeta convert | validate | stats | vocab``.

Exit codes: 0 success, 1 record violations or failed competency questions,
2 usage, I/O or parse errors. Machine output goes to stdout, diagnostics to
stderr.
"""

import argparse
import json
import logging
import sys
from pathlib import Path
from typing import TextIO

from dotenv import load_dotenv
from pydantic import ValidationError

from .config import ReportFormat, configure_logging, resolve_convert_settings
from .errors import LiftError, MusicMetaError
from .lifting import build_graph
from .model import Dataset
from .rdf_core import Graph
from .reporting import graph_stats, render_stats, render_table
from .serialization import SerializationFormat, parse_ntriples_star, write
from .validation import load_suite, run_suite
from .vocabulary import registry_report

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_FAILED = 1
EXIT_ERROR = 2


class _Streams:
    def __init__(self, stdout: TextIO | None = None, stderr: TextIO | None = None):
        self.out = stdout or sys.stdout
        self.err = stderr or sys.stderr

    def error(self, message: str) -> int:
        logger.error(message)
        print(f"error: {message}", file=self.err)
        return EXIT_ERROR


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="musicmeta",
        description="Lift music metadata into a Music Meta knowledge graph and test it.",
    )
    commands = parser.add_subparsers(dest="command", required=True)

    convert = commands.add_parser("convert", help="Convert a metadata JSON file to RDF-star")
    convert.add_argument("input", type=Path, help="Input JSON document")
    convert.add_argument("--out", type=Path, help="Output file (stdout when omitted)")
    convert.add_argument("--format", choices=[f.value for f in SerializationFormat])
    convert.add_argument("--align", help="Comma-separated schemes: mo,doremus,wikidata")
    convert.add_argument(
        "--no-provenance",
        action="store_true",
        default=None,
        help="Do not annotate link triples with their provenance",
    )
    convert.add_argument("--base-iri", help="Namespace for minted resource IRIs")
    convert.add_argument(
        "--canonical", action="store_true", default=None, help="Sorted, byte-stable output"
    )
    convert.add_argument("--report", choices=[r.value for r in ReportFormat])
    convert.add_argument("--config", type=Path, help="JSON file with default flag values")
    convert.add_argument("--session-label", help="Label stamped into minted process IRIs")
    convert.add_argument("--workers", type=int, help="Threads used for per-record lifting")

    validate = commands.add_parser("validate", help="Run a competency question suite")
    validate.add_argument("graph", type=Path, help="N-Triples-star graph")
    validate.add_argument("--suite", type=Path, help="Suite JSON file (bundled suite by default)")
    validate.add_argument(
        "--report", choices=[r.value for r in ReportFormat], default=ReportFormat.TABLE.value
    )
    validate.add_argument("--workers", type=int, default=1)

    stats = commands.add_parser("stats", help="Summarise an N-Triples-star graph")
    stats.add_argument("graph", type=Path)

    vocab = commands.add_parser("vocab", help="List the vocabulary registry")
    vocab.add_argument("--filter", default="", help="Only QNames containing this text")
    return parser


def _read_graph(path: Path, io: _Streams) -> Graph | None:
    try:
        return parse_ntriples_star(path.read_text(encoding="utf-8"))
    except (OSError, UnicodeDecodeError) as exc:
        io.error(f"cannot read {path}: {exc}")
    except MusicMetaError as exc:
        io.error(f"{path}: {exc}")
    return None


def cmd_convert(args: argparse.Namespace, io: _Streams) -> int:
    flags = {
        "out": args.out,
        "format": args.format,
        "align": args.align,
        "no_provenance": args.no_provenance,
        "base_iri": args.base_iri,
        "canonical": args.canonical,
        "report": args.report,
        "session_label": args.session_label,
        "workers": args.workers,
    }
    try:
        settings = resolve_convert_settings(flags, args.config)
        config = settings.lift_config()
    except (OSError, ValueError) as exc:
        return io.error(f"invalid settings: {exc}")

    try:
        dataset = Dataset.from_json(args.input.read_bytes())
    except OSError as exc:
        return io.error(f"cannot read {args.input}: {exc}")
    except ValidationError as exc:
        return io.error(f"{args.input} is not a valid metadata document:\n{exc}")

    try:
        graph = build_graph(dataset, config)
    except LiftError as exc:
        if settings.report is ReportFormat.JSON:
            payload = [v.model_dump() for v in exc.violations]
            print(json.dumps({"violations": payload}, indent=2, ensure_ascii=False), file=io.out)
        else:
            for violation in exc.violations:
                print(f"{violation.path}: {violation.message}", file=io.err)
        print(f"{len(exc.violations)} violation(s); nothing written", file=io.err)
        return EXIT_FAILED

    text = write(graph, settings.serialization_options())
    if settings.out is None:
        io.out.write(text)
    else:
        try:
            settings.out.write_text(text, encoding="utf-8", newline="")
        except OSError as exc:
            return io.error(f"cannot write {settings.out}: {exc}")

    counts = ", ".join(f"{name}: {count}" for name, count in dataset.record_counts().items())
    print(f"{len(graph)} triples ({counts})", file=io.err)
    return EXIT_OK


def cmd_validate(args: argparse.Namespace, io: _Streams) -> int:
    graph = _read_graph(args.graph, io)
    if graph is None:
        return EXIT_ERROR
    try:
        suite = load_suite(args.suite)
    except OSError as exc:
        return io.error(f"cannot read suite {args.suite}: {exc}")
    except ValueError as exc:
        return io.error(f"invalid suite: {exc}")

    report = run_suite(graph, suite, workers=max(1, args.workers))
    if args.report == ReportFormat.JSON.value:
        print(report.to_json(), file=io.out)
    else:
        print(report.to_table(), file=io.out)
    if report.failed_ids:
        print(f"failed: {', '.join(report.failed_ids)}", file=io.err)
    return EXIT_OK if report.all_passed else EXIT_FAILED


def cmd_stats(args: argparse.Namespace, io: _Streams) -> int:
    graph = _read_graph(args.graph, io)
    if graph is None:
        return EXIT_ERROR
    print(render_stats(graph_stats(graph)), file=io.out)
    return EXIT_OK


def cmd_vocab(args: argparse.Namespace, io: _Streams) -> int:
    rows = [
        {
            "qname": row.qname,
            "kind": row.kind.value,
            "alignments": row.alignment_count,
            "invented": "yes" if row.invented else "",
        }
        for row in registry_report()
        if args.filter in row.qname
    ]
    print(render_table(rows, ["qname", "kind", "alignments", "invented"]), file=io.out)
    return EXIT_OK


COMMANDS = {
    "convert": cmd_convert,
    "validate": cmd_validate,
    "stats": cmd_stats,
    "vocab": cmd_vocab,
}


def main(
    argv: list[str] | None = None, stdout: TextIO | None = None, stderr: TextIO | None = None
) -> int:
    """Entry point of the ``musicmeta`` command."""
    load_dotenv()
    configure_logging()
    io = _Streams(stdout, stderr)
    try:
        args = build_parser().parse_args(argv)
    except SystemExit as exc:
        return EXIT_OK if exc.code in (0, None) else EXIT_ERROR
    return COMMANDS[args.command](args, io)


if __name__ == "__main__":
    sys.exit(main())
