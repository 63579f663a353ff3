"""Crate import and profile verification.

``canvas.json`` inside the archive is the source of truth on import; the
JSON-LD metadata is only a projection and is never reverse-engineered.
"""

from __future__ import annotations

import io
import json
import zipfile
from typing import Any

from .crate_writer import CANVAS_FILE, METADATA_FILE
from .model import Canvas, parse_canvas, pointer_escape
from .validator import Issue, ValidationReport, _sort
from .vocab import load_profile

ZIP_MAGIC = (b"PK\x03\x04", b"PK\x05\x06")

PROFILE_CODES = {
    "PRF-E001": "required file missing from the archive",
    "PRF-E002": "metadata file is not a JSON-LD document with @context and @graph",
    "PRF-E003": "metadata descriptor missing or not conforming to RO-Crate 1.2",
    "PRF-E004": "root dataset missing or hasPart does not cover the payload files",
    "PRF-E005": "reference to an entity that is not in the graph",
    "PRF-E006": "required entity type missing or lacking a required property",
    "PRF-E007": "duplicate entity @id",
    "PRF-E008": "archive cannot be read",
    "PRF-E009": "@context does not include the RO-Crate 1.2 context",
    "PRF-W001": "unexpected file in the archive",
}


class CrateError(ValueError):
    pass


def is_zip(data: bytes) -> bool:
    return data[:4] in ZIP_MAGIC


def extract_canvas(data: bytes | str) -> Canvas:
    """Canvas from crate ZIP bytes or from bare canvas JSON."""
    if isinstance(data, str):
        return parse_canvas(data)
    if not is_zip(data):
        return parse_canvas(data)
    try:
        with zipfile.ZipFile(io.BytesIO(data)) as zf:
            if CANVAS_FILE not in zf.namelist():
                raise CrateError(f"archive has no {CANVAS_FILE} entry")
            payload = zf.read(CANVAS_FILE)
    except zipfile.BadZipFile as exc:
        raise CrateError(f"corrupt archive: {exc}") from exc
    return parse_canvas(payload)


def _issue(code: str, path: str, detail: str = "", severity: str = "error") -> Issue:
    msg = PROFILE_CODES[code] + (f": {detail}" if detail else "")
    return Issue(severity, code, path, msg)


def _types(entity: dict[str, Any]) -> list[str]:
    t = entity.get("@type", [])
    return [t] if isinstance(t, str) else list(t)


def _references(value: Any, path: str):
    """(pointer, id) for every ``{"@id": ...}`` node below ``value``."""
    if isinstance(value, dict):
        if "@id" in value and len(value) == 1:
            yield path, value["@id"]
            return
        for k, v in value.items():
            yield from _references(v, f"{path}/{pointer_escape(k)}")
    elif isinstance(value, list):
        for i, v in enumerate(value):
            yield from _references(v, f"{path}/{i}")


def _is_absolute(iri: str) -> bool:
    scheme, sep, _ = iri.partition(":")
    return bool(sep) and scheme.isalpha() and not iri.startswith("#")


def _as_ids(value: Any) -> list[str]:
    items = value if isinstance(value, list) else [value]
    return [v["@id"] for v in items if isinstance(v, dict) and "@id" in v]


def verify_profile(data: bytes) -> ValidationReport:
    """Check an exported crate against the shipped RO-Crate profile."""
    profile = load_profile()
    issues: list[Issue] = []
    try:
        with zipfile.ZipFile(io.BytesIO(data)) as zf:
            names = zf.namelist()
            contents = {n: zf.read(n) for n in names}
    except (zipfile.BadZipFile, ValueError) as exc:
        return ValidationReport((_issue("PRF-E008", "", str(exc)),))

    for name in profile["requiredFiles"]:
        if name not in contents:
            issues.append(_issue("PRF-E001", f"/{pointer_escape(name)}", name))
    for name in names:
        if name not in profile["requiredFiles"]:
            issues.append(_issue("PRF-W001", f"/{pointer_escape(name)}", name, "warning"))
    if METADATA_FILE not in contents:
        return ValidationReport(_sort(issues))

    try:
        doc = json.loads(contents[METADATA_FILE].decode("utf-8"))
    except (UnicodeDecodeError, json.JSONDecodeError) as exc:
        issues.append(_issue("PRF-E002", "", str(exc)))
        return ValidationReport(_sort(issues))
    if not isinstance(doc, dict) or "@context" not in doc or not isinstance(doc.get("@graph"), list):
        issues.append(_issue("PRF-E002", ""))
        return ValidationReport(_sort(issues))

    context = doc["@context"]
    contexts = context if isinstance(context, list) else [context]
    if profile["context"] not in contexts:
        issues.append(_issue("PRF-E009", "/@context"))

    graph = [e for e in doc["@graph"] if isinstance(e, dict)]
    by_id: dict[str, dict[str, Any]] = {}
    for i, entity in enumerate(doc["@graph"]):
        eid = entity.get("@id") if isinstance(entity, dict) else None
        if not isinstance(eid, str):
            issues.append(_issue("PRF-E002", f"/@graph/{i}", "entity without @id"))
            continue
        if eid in by_id:
            issues.append(_issue("PRF-E007", f"/@graph/{i}/@id", eid))
        by_id.setdefault(eid, entity)

    descriptor = by_id.get(METADATA_FILE)
    if descriptor is None:
        issues.append(_issue("PRF-E003", "/@graph", "no descriptor entity"))
    elif profile["conformsTo"] not in _as_ids(descriptor.get("conformsTo", [])):
        issues.append(_issue("PRF-E003", "/@graph", "descriptor conformsTo"))

    root_id = None
    if descriptor is not None:
        about = _as_ids(descriptor.get("about", []))
        root_id = about[0] if about else None
    root = by_id.get(root_id) if root_id else None
    if root is None or "Dataset" not in _types(root):
        issues.append(_issue("PRF-E004", "/@graph", "no root dataset"))
    else:
        parts = set(_as_ids(root.get("hasPart", [])))
        for name in profile["rootHasPart"]:
            if name not in parts:
                issues.append(_issue("PRF-E004", "/@graph", f"hasPart lacks {name}"))

    for i, entity in enumerate(doc["@graph"]):
        if not isinstance(entity, dict):
            continue
        for path, target in _references(
                {k: v for k, v in entity.items() if k not in ("@id", "@type")}, f"/@graph/{i}"):
            if target not in by_id and not _is_absolute(str(target)):
                issues.append(_issue("PRF-E005", path, str(target)))

    for rule in profile["requiredTypes"]:
        found = sum(1 for e in graph if rule["type"] in _types(e))
        if found < rule["min"]:
            issues.append(_issue("PRF-E006", "/@graph", f"{rule['type']} x{found} < {rule['min']}"))
    for i, entity in enumerate(doc["@graph"]):
        if not isinstance(entity, dict):
            continue
        for type_name in _types(entity):
            for prop in profile["entityTypes"].get(type_name, []):
                if prop not in entity:
                    issues.append(_issue("PRF-E006", f"/@graph/{i}", f"{type_name} lacks {prop}"))
    return ValidationReport(_sort(issues))
