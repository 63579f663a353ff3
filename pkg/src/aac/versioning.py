"""Structural canvas diffs and semantic version bumps.

Diffs run over the canonical JSON form.  Lists whose items carry an ``id``
(requirements, persons, datasets) are matched by id, so reordering alone is
not a change; their paths use ``id=<value>`` tokens, e.g.
``/requirements/id=r2/title``.  Every other list is compared by position.
"""

from __future__ import annotations

import copy
import json
import re
from dataclasses import dataclass
from typing import Any, Iterable

from .model import Canvas, pointer_escape, to_dict
from .model import pointer_sort_key as _path_key
from .model import split_pointer as split_path

LEVELS = ("none", "patch", "minor", "major")

ID_KEYED_LISTS = ("/requirements", "/persons", "/dataAccess/datasets")

_SEMVER = re.compile(
    r"^(0|[1-9]\d*)\.(0|[1-9]\d*)\.(0|[1-9]\d*)"
    r"(?:-((?:0|[1-9]\d*|\d*[A-Za-z-][0-9A-Za-z-]*)(?:\.(?:0|[1-9]\d*|\d*[A-Za-z-][0-9A-Za-z-]*))*))?"
    r"(?:\+([0-9A-Za-z-]+(?:\.[0-9A-Za-z-]+)*))?$"
)

# Leaf keys whose edits do not change the meaning of the contract.
TEXT_FIELDS = frozenset({
    "title", "description", "label", "assumptions", "userStory", "name",
    "affiliation", "headlineValueStatement", "mitigation", "findings", "method",
    "unitOfWork", "targetPopulation", "effortEstimate", "algorithmSpec",
    "objectives", "keywords", "domain", "leadOrganization", "sensitivityLevel",
})
_BENEFIT_SEMANTICS = frozenset({"direction", "type", "aggregationBasis"})
_BENEFIT_VALUES = frozenset({
    "expected", "baseline", "oversightMinutesPerUnit", "oversightMinutesPerMonth",
})


class VersionError(ValueError):
    pass


def parse_version(version: str) -> tuple[int, int, int]:
    m = _SEMVER.match(version or "")
    if not m:
        raise VersionError(f"not a semantic version: {version!r}")
    return int(m.group(1)), int(m.group(2)), int(m.group(3))


def is_semver(version: Any) -> bool:
    return isinstance(version, str) and _SEMVER.match(version) is not None


def bump(version: str, level: str) -> str:
    """Increment ``version`` at ``level`` (major, minor, patch or none).

    Pre-release and build suffixes are dropped by any real increment.
    """
    if level not in LEVELS:
        raise ValueError(f"unknown bump level {level!r}")
    major, minor, patch = parse_version(version)
    if level == "none":
        return version
    if level == "major":
        return f"{major + 1}.0.0"
    if level == "minor":
        return f"{major}.{minor + 1}.0"
    return f"{major}.{minor}.{patch + 1}"


@dataclass(frozen=True)
class Change:
    path: str
    kind: str  # added | removed | modified
    before: Any = None
    after: Any = None

    def to_dict(self) -> dict[str, Any]:
        out: dict[str, Any] = {"path": self.path, "kind": self.kind}
        if self.kind != "added":
            out["before"] = self.before
        if self.kind != "removed":
            out["after"] = self.after
        return out


@dataclass(frozen=True)
class ChangeSet:
    entries: tuple[Change, ...] = ()

    def __len__(self) -> int:
        return len(self.entries)

    def __iter__(self):
        return iter(self.entries)

    def to_dict(self) -> dict[str, Any]:
        return {"entries": [e.to_dict() for e in self.entries]}

    def to_text(self) -> str:
        lines = []
        for e in self.entries:
            if e.kind == "added":
                lines.append(f"+ {e.path}: {_compact(e.after)}")
            elif e.kind == "removed":
                lines.append(f"- {e.path}: {_compact(e.before)}")
            else:
                lines.append(f"~ {e.path}: {_compact(e.before)} -> {_compact(e.after)}")
        return "\n".join(lines) + ("\n" if lines else "")


def _compact(value: Any) -> str:
    return json.dumps(value, ensure_ascii=False, separators=(",", ":"))


def _keyed(items: list[Any]) -> dict[str, Any] | None:
    """``id -> item`` if every item is an object with a distinct string id."""
    out: dict[str, Any] = {}
    for item in items:
        if not isinstance(item, dict) or not isinstance(item.get("id"), str):
            return None
        if item["id"] in out:
            return None
        out[item["id"]] = item
    return out


def _same_scalar(a: Any, b: Any) -> bool:
    if isinstance(a, bool) or isinstance(b, bool):
        return type(a) is type(b) and a == b
    return a == b


def _walk(a: Any, b: Any, path: str, out: list[Change]) -> None:
    if isinstance(a, dict) and isinstance(b, dict):
        for key in a.keys() - b.keys():
            out.append(Change(f"{path}/{pointer_escape(key)}", "removed", before=a[key]))
        for key in b.keys() - a.keys():
            out.append(Change(f"{path}/{pointer_escape(key)}", "added", after=b[key]))
        for key in a.keys() & b.keys():
            _walk(a[key], b[key], f"{path}/{pointer_escape(key)}", out)
        return
    if isinstance(a, list) and isinstance(b, list):
        ka = _keyed(a) if path in ID_KEYED_LISTS else None
        kb = _keyed(b) if ka is not None else None
        if ka is not None and kb is not None:
            for key in ka.keys() - kb.keys():
                out.append(Change(f"{path}/id={pointer_escape(key)}", "removed", before=ka[key]))
            for key in kb.keys() - ka.keys():
                out.append(Change(f"{path}/id={pointer_escape(key)}", "added", after=kb[key]))
            for key in ka.keys() & kb.keys():
                _walk(ka[key], kb[key], f"{path}/id={pointer_escape(key)}", out)
            return
        for i in range(min(len(a), len(b))):
            _walk(a[i], b[i], f"{path}/{i}", out)
        for i in range(len(b), len(a)):
            out.append(Change(f"{path}/{i}", "removed", before=a[i]))
        for i in range(len(a), len(b)):
            out.append(Change(f"{path}/{i}", "added", after=b[i]))
        return
    if type(a) in (dict, list) or type(b) in (dict, list) or not _same_scalar(a, b):
        out.append(Change(path, "modified", before=a, after=b))


def diff_documents(old: Any, new: Any) -> ChangeSet:
    out: list[Change] = []
    _walk(old, new, "", out)
    return ChangeSet(tuple(sorted(out, key=lambda c: _path_key(c.path))))


def diff(old: Canvas, new: Canvas) -> ChangeSet:
    """Structural changes turning ``old`` into ``new``."""
    return diff_documents(to_dict(old), to_dict(new))


def _locate(container: Any, token: str) -> Any:
    if isinstance(container, list):
        if token.startswith("id="):
            ident = token[3:]
            for item in container:
                if isinstance(item, dict) and item.get("id") == ident:
                    return item
            raise KeyError(token)
        return container[int(token)]
    return container[token]


def apply_changes(document: Any, changes: Iterable[Change]) -> Any:
    """Apply a changeset to a canonical document, returning a new document.

    Id-keyed additions are appended, so list order may differ from the
    document the changeset was computed against.
    """
    doc = copy.deepcopy(document)
    entries = list(changes)

    def parent_of(path: str) -> tuple[Any, str]:
        tokens = split_path(path)
        node = doc
        for t in tokens[:-1]:
            node = _locate(node, t)
        return node, tokens[-1]

    for e in entries:
        if e.kind == "modified":
            if e.path == "":
                doc = copy.deepcopy(e.after)
                continue
            parent, last = parent_of(e.path)
            if isinstance(parent, list):
                parent[int(last)] = copy.deepcopy(e.after)
            else:
                parent[last] = copy.deepcopy(e.after)
    removals = [e for e in entries if e.kind == "removed"]
    for e in sorted(removals, key=lambda c: _path_key(c.path), reverse=True):
        parent, last = parent_of(e.path)
        if isinstance(parent, list):
            parent.remove(_locate(parent, last))
        else:
            del parent[last]
    additions = [e for e in entries if e.kind == "added"]
    for e in sorted(additions, key=lambda c: _path_key(c.path)):
        parent, last = parent_of(e.path)
        if isinstance(parent, list):
            value = copy.deepcopy(e.after)
            if last.startswith("id="):
                parent.append(value)
            else:
                parent.insert(int(last), value)
        else:
            parent[last] = copy.deepcopy(e.after)
    return doc


def _leaf_key(tokens: list[str]) -> str | None:
    for t in reversed(tokens):
        if not t.isdigit() and not t.startswith("id="):
            return t
    return None


def classify(change: Change) -> str:
    """Bump level implied by a single change."""
    tokens = split_path(change.path)
    benefit = _benefit_tail(tokens)
    if change.kind == "removed":
        if len(tokens) == 2 and tokens[0] == "requirements":
            return "major"
        if tokens[:2] == ["dataAccess", "datasets"] and len(tokens) == 3:
            return "major"
        if benefit == []:
            return "major"
    if benefit and benefit[0] in _BENEFIT_SEMANTICS and len(benefit) == 1:
        return "major"
    if change.kind == "added":
        return "minor"
    if benefit and benefit[0] in _BENEFIT_VALUES:
        return "minor"
    # stage and risk edits are minor unless they only touch text
    if _leaf_key(tokens) in TEXT_FIELDS:
        return "patch"
    return "minor"


def _benefit_tail(tokens: list[str]) -> list[str] | None:
    """Tokens below ``/requirements/<r>/benefits/<i>``, or None outside a benefit."""
    if len(tokens) >= 4 and tokens[0] == "requirements" and tokens[2] == "benefits":
        return tokens[4:]
    return None


def suggest_bump(changes: Iterable[Change]) -> str:
    """Highest bump level over all changes; ``none`` for an empty changeset."""
    level = 0
    for change in changes:
        level = max(level, LEVELS.index(classify(change)))
        if level == len(LEVELS) - 1:
            break
    return LEVELS[level]
