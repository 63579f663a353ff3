"""Controlled vocabularies shipped with the package.

Each vocabulary is a JSON array of ``{code, label, definition}`` records under
``aac/data``.  Tables are loaded lazily and cached; they are read-only after
the first load.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from functools import lru_cache
from importlib import resources
from types import MappingProxyType
from typing import Any, Mapping

VOCABULARIES = (
    "trl",
    "duo",
    "governance-stages",
    "risk-levels",
    "functional-roles",
    "benefit-metrics",
    "access-rights",
)

PROFILE_FILE = "rocrate-profile.json"


class UnknownVocabularyError(KeyError):
    pass


@dataclass(frozen=True)
class Term:
    code: str
    label: str
    definition: str


def _read_data(filename: str) -> Any:
    with resources.files("aac.data").joinpath(filename).open(encoding="utf-8") as fh:
        return json.load(fh)


@lru_cache(maxsize=None)
def load_vocabulary(name: str) -> Mapping[str, Term]:
    """Return the vocabulary ``name`` as a read-only ``code -> Term`` map."""
    if name not in VOCABULARIES:
        raise UnknownVocabularyError(name)
    table: dict[str, Term] = {}
    for row in _read_data(f"{name}.json"):
        if row["code"] in table:
            raise ValueError(f"duplicate code {row['code']!r} in vocabulary {name!r}")
        table[row["code"]] = Term(row["code"], row["label"], row["definition"])
    return MappingProxyType(table)


def vocab_lookup(vocab_name: str, code: str) -> Term | None:
    """Look up ``code`` in ``vocab_name``.

    Returns ``None`` when the code is not part of the vocabulary; an unknown
    vocabulary name raises :class:`UnknownVocabularyError`.
    """
    return load_vocabulary(vocab_name).get(code)


def codes(vocab_name: str) -> tuple[str, ...]:
    return tuple(load_vocabulary(vocab_name))


def raw_vocabulary(name: str) -> list[dict[str, str]]:
    """The vocabulary file contents as shipped (for export)."""
    if name not in VOCABULARIES:
        raise UnknownVocabularyError(name)
    return _read_data(f"{name}.json")


@lru_cache(maxsize=None)
def _profile_text() -> str:
    return json.dumps(_read_data(PROFILE_FILE))


def load_profile() -> dict[str, Any]:
    """The RO-Crate profile describing the expected crate structure."""
    return json.loads(_profile_text())
