from __future__ import annotations

import io
import json
import zipfile

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from aac.crate_reader import PROFILE_CODES, CrateError, extract_canvas, verify_profile
from aac.crate_writer import build_archive, package_crate
from aac.model import ParseError, parse_canvas
from canvas_gen import random_canvas
from conftest import fixture_text, load_fixture

META = "ro-crate-metadata.json"


@pytest.fixture(scope="module")
def golden_files() -> dict[str, bytes]:
    data = package_crate(load_fixture("opentargets.json"))
    with zipfile.ZipFile(io.BytesIO(data)) as zf:
        return {n: zf.read(n) for n in zf.namelist()}


def _rezip(files: dict[str, bytes]) -> bytes:
    return build_archive(list(files.items()))


def _mutate_meta(files, fn) -> bytes:
    doc = json.loads(files[META])
    fn(doc)
    out = dict(files)
    out[META] = json.dumps(doc).encode()
    return _rezip(out)


def _entity(doc, entity_id):
    return next(e for e in doc["@graph"] if e["@id"] == entity_id)


def test_round_trip(opentargets):
    assert extract_canvas(package_crate(opentargets)) == opentargets


def test_bare_json_passthrough():
    text = fixture_text("opentargets.json")
    assert extract_canvas(text) == parse_canvas(text)
    assert extract_canvas(text.encode()) == parse_canvas(text)


def test_missing_canvas_entry_is_named(golden_files):
    files = {k: v for k, v in golden_files.items() if k != "canvas.json"}
    with pytest.raises(CrateError, match="canvas.json"):
        extract_canvas(_rezip(files))


def test_corrupt_archive():
    data = package_crate(load_fixture("minimal.json"))
    with pytest.raises(CrateError):
        extract_canvas(data[:40])


def test_parse_errors_pass_through(golden_files):
    files = dict(golden_files)
    files["canvas.json"] = b'{"project": 3}'
    with pytest.raises(ParseError):
        extract_canvas(_rezip(files))


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 10**6))
def test_round_trip_property(seed):
    c = random_canvas(seed)
    assert extract_canvas(package_crate(c)) == c


@pytest.mark.parametrize("name", ["minimal.json", "opentargets.json", "conformant.json",
                                  "policy/data-rules.json", "extension.json"])
def test_writer_output_verifies(name):
    report = verify_profile(package_crate(load_fixture(name)))
    assert report.issues == ()


@settings(max_examples=30, deadline=None)
@given(st.integers(0, 10**6))
def test_generated_crates_verify(seed):
    assert verify_profile(package_crate(random_canvas(seed))).issues == ()


def _drop(name):
    return lambda files: _rezip({k: v for k, v in files.items() if k != name})


def _extra(files):
    return _rezip({**files, "notes.txt": b"hello"})


def _bad_json(files):
    return _rezip({**files, META: b"{not json"})


def _no_graph(files):
    return _mutate_meta(files, lambda d: d.pop("@graph"))


def _context(files):
    return _mutate_meta(files, lambda d: d.update({"@context": ["https://w3id.org/ro/crate/1.1/context"]}))


def _conforms(files):
    return _mutate_meta(files, lambda d: _entity(d, META).update(
        conformsTo={"@id": "https://w3id.org/ro/crate/1.1"}))


def _has_part(files):
    return _mutate_meta(files, lambda d: _entity(d, "./").update(hasPart=[{"@id": "canvas.json"}]))


def _ghost(files):
    return _mutate_meta(files, lambda d: _entity(d, "#project").update(funder={"@id": "#ghost"}))


def _duplicate(files):
    return _mutate_meta(files, lambda d: d["@graph"].append(dict(_entity(d, "#person-p1"))))


def _untyped_project(files):
    return _mutate_meta(files, lambda d: _entity(d, "#project").update({"@type": "Project"}))


def _nameless_person(files):
    return _mutate_meta(files, lambda d: _entity(d, "#person-p2").pop("name"))


def _no_plan(files):
    def fn(d):
        _entity(d, "#plan")["@type"] = "CreativeWork"
    return _mutate_meta(files, fn)


MUTATIONS = {
    "drop-metadata": (_drop(META), "PRF-E001"),
    "drop-canvas": (_drop("canvas.json"), "PRF-E001"),
    "drop-agents": (_drop("AGENTS.md"), "PRF-E001"),
    "metadata-not-json": (_bad_json, "PRF-E002"),
    "metadata-without-graph": (_no_graph, "PRF-E002"),
    "wrong-context": (_context, "PRF-E009"),
    "wrong-conforms-to": (_conforms, "PRF-E003"),
    "short-has-part": (_has_part, "PRF-E004"),
    "dangling-ghost": (_ghost, "PRF-E005"),
    "duplicate-entity": (_duplicate, "PRF-E007"),
    "project-type-missing": (_untyped_project, "PRF-E006"),
    "person-without-name": (_nameless_person, "PRF-E006"),
    "plan-missing": (_no_plan, "PRF-E006"),
}


@pytest.mark.parametrize("name", sorted(MUTATIONS))
def test_single_mutations_are_rejected(golden_files, name):
    mutate, code = MUTATIONS[name]
    report = verify_profile(mutate(golden_files))
    assert not report.valid
    assert code in report.codes()


def test_dangling_reference_is_named(golden_files):
    report = verify_profile(_ghost(golden_files))
    [issue] = [i for i in report.issues if i.code == "PRF-E005"]
    assert "#ghost" in issue.message
    assert issue.path.endswith("/funder")


def test_extra_file_is_only_a_warning(golden_files):
    report = verify_profile(_extra(golden_files))
    assert report.valid and report.codes() == ["PRF-W001"]


def test_unreadable_archive():
    assert verify_profile(b"PK\x03\x04 definitely not a zip").codes() == ["PRF-E008"]


def test_every_profile_code_is_exercised():
    exercised = {code for _, code in MUTATIONS.values()} | {"PRF-W001", "PRF-E008"}
    assert exercised == set(PROFILE_CODES)
