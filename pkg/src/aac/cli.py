"""``aac`` command line.

Exit codes: 0 success, 1 validation or profile errors, 2 I/O, parse or usage
errors.  Payloads go to standard output or ``--output``; diagnostics go to
standard error.
"""

from __future__ import annotations

import argparse
import json
import sys
from datetime import datetime, timezone
from pathlib import Path

from .benefits import GrossUndefinedError, aggregate_project, render_table
from .crate_reader import CrateError, extract_canvas, verify_profile
from .crate_writer import InvalidCanvasError, package_crate
from .model import SUPPORTED_SCHEMA_VERSION, ParseError, dump_json, parse_canvas, serialize_canvas
from .policy import generate_policy_card
from .validator import validate
from .versioning import diff, suggest_bump
from .vocab import VOCABULARIES, UnknownVocabularyError, load_profile, raw_vocabulary

EXIT_OK, EXIT_INVALID, EXIT_USAGE = 0, 1, 2

TEMPLATE = {
    "schemaVersion": SUPPORTED_SCHEMA_VERSION,
    "canvasVersion": "0.1.0",
    "project": {
        "title": "Untitled automation project",
        "description": "Describe the workflow to automate and why.",
        "stage": "planning",
    },
    "persons": [],
    "requirements": [],
    "governance": {"stages": []},
    "dataAccess": {"datasets": []},
}


class CliError(Exception):
    """Raised for I/O and parse failures; maps to exit code 2."""


class _Parser(argparse.ArgumentParser):
    def error(self, message: str):
        self.print_usage(sys.stderr)
        print(f"{self.prog}: error: {message}", file=sys.stderr)
        raise SystemExit(EXIT_USAGE)


def _read_bytes(path: str) -> bytes:
    try:
        return Path(path).read_bytes()
    except OSError as exc:
        raise CliError(f"cannot read {path}: {exc.strerror or exc}") from exc


def _load(path: str, *, check_enums: bool = True):
    try:
        return parse_canvas(_read_bytes(path), check_enums=check_enums)
    except ParseError as exc:
        raise CliError(f"{path}: {exc}") from exc


def _emit(payload: str | bytes, output: str | None) -> None:
    if output is None:
        if isinstance(payload, bytes):
            sys.stdout.buffer.write(payload)
        else:
            sys.stdout.write(payload)
        return
    try:
        if isinstance(payload, bytes):
            Path(output).write_bytes(payload)
        else:
            Path(output).write_text(payload, encoding="utf-8")
    except OSError as exc:
        raise CliError(f"cannot write {output}: {exc.strerror or exc}") from exc


def _timestamp(text: str) -> datetime:
    try:
        ts = datetime.fromisoformat(text.replace("Z", "+00:00"))
    except ValueError as exc:
        raise CliError(f"bad --timestamp {text!r}: expected ISO 8601") from exc
    return ts if ts.tzinfo else ts.replace(tzinfo=timezone.utc)


def cmd_init(args) -> int:
    _emit(dump_json(TEMPLATE), args.output)
    return EXIT_OK


def cmd_validate(args) -> int:
    report = validate(_load(args.file, check_enums=False), orcid_checksum=args.orcid_checksum)
    if args.strict:
        report = report.escalated()
    sys.stdout.write(report.to_json() if args.format == "json" else report.to_text())
    return EXIT_OK if report.valid else EXIT_INVALID


def cmd_benefits(args) -> int:
    canvas = _load(args.file)
    try:
        summary = aggregate_project(canvas)
    except GrossUndefinedError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INVALID
    sys.stdout.write(dump_json(summary.to_dict()) if args.format == "json"
                     else render_table(summary))
    return EXIT_OK


def cmd_export(args) -> int:
    canvas = _load(args.file, check_enums=False)
    ts = _timestamp(args.timestamp) if args.timestamp else None
    try:
        data = package_crate(canvas, timestamp=ts)
    except InvalidCanvasError as exc:
        sys.stderr.write(exc.report.to_text())
        return EXIT_INVALID
    _emit(data, args.output)
    report = validate(canvas)
    if report.warnings:
        sys.stderr.write(report.to_text())
    return EXIT_OK


def cmd_import(args) -> int:
    try:
        canvas = extract_canvas(_read_bytes(args.crate))
    except (CrateError, ParseError) as exc:
        raise CliError(f"{args.crate}: {exc}") from exc
    _emit(serialize_canvas(canvas), args.output)
    return EXIT_OK


def cmd_verify(args) -> int:
    report = verify_profile(_read_bytes(args.crate))
    sys.stdout.write(report.to_json() if args.format == "json" else report.to_text())
    return EXIT_OK if report.valid else EXIT_INVALID


def cmd_diff(args) -> int:
    changes = diff(_load(args.old, check_enums=False), _load(args.new, check_enums=False))
    level = suggest_bump(changes) if args.suggest_bump else None
    if args.format == "json":
        payload = changes.to_dict()
        if level is not None:
            payload["suggestedBump"] = level
        sys.stdout.write(dump_json(payload))
    else:
        sys.stdout.write(changes.to_text())
        if level is not None:
            sys.stdout.write(f"suggested bump: {level}\n")
    return EXIT_OK


def cmd_policy(args) -> int:
    canvas = _load(args.file)
    try:
        card = generate_policy_card(canvas)
    except InvalidCanvasError as exc:
        sys.stderr.write(exc.report.to_text())
        return EXIT_INVALID
    _emit(card, args.output)
    return EXIT_OK


def cmd_schema(args) -> int:
    if args.vocab:
        try:
            payload = raw_vocabulary(args.vocab)
        except UnknownVocabularyError:
            raise CliError(f"unknown vocabulary {args.vocab!r}; choose from {', '.join(VOCABULARIES)}")
    elif args.profile:
        payload = load_profile()
    else:
        payload = {"profile": load_profile(),
                   "vocabularies": {name: raw_vocabulary(name) for name in VOCABULARIES}}
    sys.stdout.write(json.dumps(payload, indent=2, ensure_ascii=False) + "\n")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="aac", description="Agentic Automation Canvas toolkit.")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("init", help="write a minimal valid canvas template")
    p.add_argument("-o", "--output")
    p.set_defaults(func=cmd_init)

    p = sub.add_parser("validate", help="validate a canvas file")
    p.add_argument("file")
    p.add_argument("--format", choices=("text", "json"), default="text")
    p.add_argument("--strict", action="store_true", help="treat warnings as errors")
    p.add_argument("--orcid-checksum", action="store_true", help="also verify ORCID check digits")
    p.set_defaults(func=cmd_validate)

    p = sub.add_parser("benefits", help="summarise expected benefits")
    p.add_argument("file")
    p.add_argument("--format", choices=("table", "json"), default="table")
    p.set_defaults(func=cmd_benefits)

    p = sub.add_parser("export", help="package a canvas as an RO-Crate ZIP")
    p.add_argument("file")
    p.add_argument("-o", "--output", required=True)
    p.add_argument("--timestamp", help="ISO 8601 time stamped on every archive entry")
    p.set_defaults(func=cmd_export)

    p = sub.add_parser("import", help="extract canvas.json from a crate")
    p.add_argument("crate")
    p.add_argument("-o", "--output")
    p.set_defaults(func=cmd_import)

    p = sub.add_parser("verify", help="check a crate against the RO-Crate profile")
    p.add_argument("crate")
    p.add_argument("--format", choices=("text", "json"), default="text")
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("diff", help="diff two canvas versions")
    p.add_argument("old")
    p.add_argument("new")
    p.add_argument("--suggest-bump", action="store_true")
    p.add_argument("--format", choices=("text", "json"), default="text")
    p.set_defaults(func=cmd_diff)

    p = sub.add_parser("policy", help="generate a baseline Policy Card")
    p.add_argument("file")
    p.add_argument("-o", "--output")
    p.set_defaults(func=cmd_policy)

    p = sub.add_parser("schema", help="print shipped vocabularies and the crate profile")
    group = p.add_mutually_exclusive_group()
    group.add_argument("--vocab", metavar="NAME")
    group.add_argument("--profile", action="store_true")
    p.set_defaults(func=cmd_schema)
    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except CliError as exc:
        print(f"aac: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
