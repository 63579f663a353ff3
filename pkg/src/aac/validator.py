"""Canvas validation: structure, vocabularies and cross-reference integrity.

Problems are reported as issues with stable codes, never raised.  A report is
valid when it holds no error-severity issue; warnings never block export.
"""

from __future__ import annotations

import heapq
import json
import re
from dataclasses import dataclass, is_dataclass, replace
from datetime import date
from typing import Any, Iterator

from .benefits import TIME_UNITS
from .model import (
    CATEGORICAL_LEVELS,
    SUPPORTED_SCHEMA_VERSION,
    Binary,
    Canvas,
    Categorical,
    ComplianceReference,
    Numeric,
    _schema,
    pointer_sort_key,
)
from .versioning import is_semver
from .vocab import load_vocabulary

ISSUE_CODES = {
    "AAC-E001": "project title is missing or blank",
    "AAC-E002": "project description is missing or blank",
    "AAC-E003": "project stage is missing",
    "AAC-E004": "canvasVersion is missing or not a semantic version",
    "AAC-E005": "value is not part of its enumeration",
    "AAC-E006": "technology readiness level outside 1-9",
    "AAC-E007": "ORCID does not match dddd-dddd-dddd-ddd[0-9X]",
    "AAC-E008": "governance stage starts after it ends",
    "AAC-E009": "date is not an ISO-8601 calendar date (YYYY-MM-DD)",
    "AAC-E010": "duplicate person id",
    "AAC-E011": "duplicate requirement id",
    "AAC-E012": "duplicate dataset id",
    "AAC-E013": "DUO term not in the DUO vocabulary",
    "AAC-E014": "baseline and expected values are of different kinds",
    "AAC-E015": "baseline and expected numeric values use different units",
    "AAC-E016": "delta-valued benefit also carries a baseline",
    "AAC-E017": "monthly volume is negative",
    "AAC-E018": "oversight minutes are negative",
    "AAC-E019": "functional role not in the functional-roles vocabulary",
    "AAC-E020": "requirement stakeholder does not name a registered person",
    "AAC-E021": "person agent does not name a registered person",
    "AAC-E022": "requirement depends on an unknown requirement",
    "AAC-E023": "evaluation benefitRef does not resolve to a requirement benefit",
    "AAC-E024": "requirement depends on itself",
    "AAC-E025": "absolute-valued numeric benefit has no baseline",
    "AAC-E026": "duplicate metricId within one requirement",
    "AAC-E027": "required field is missing",
    "AAC-E028": "time benefit unit is not a time unit",
    "AAC-E030": "requirement dependencies form a cycle",
    "AAC-W001": "schemaVersion differs from the supported schema version",
    "AAC-W002": "ORCID check digit is wrong",
    "AAC-W010": "oversight minutes on a benefit that is not a time benefit",
    "AAC-W011": "metricId is not in the benefit-metrics vocabulary and not flagged custom",
    "AAC-W012": "per-unit benefit on a requirement without monthlyVolume",
}

_ORCID = re.compile(r"^\d{4}-\d{4}-\d{4}-\d{3}[0-9X]$")


@dataclass(frozen=True)
class Issue:
    severity: str  # error | warning
    code: str
    path: str
    message: str

    def to_dict(self) -> dict[str, str]:
        return {"severity": self.severity, "code": self.code,
                "path": self.path, "message": self.message}


def _sort(issues: list[Issue]) -> tuple[Issue, ...]:
    return tuple(sorted(issues, key=lambda i: (pointer_sort_key(i.path), i.code, i.message)))


@dataclass(frozen=True)
class ValidationReport:
    issues: tuple[Issue, ...] = ()

    @property
    def valid(self) -> bool:
        return not any(i.severity == "error" for i in self.issues)

    @property
    def errors(self) -> list[Issue]:
        return [i for i in self.issues if i.severity == "error"]

    @property
    def warnings(self) -> list[Issue]:
        return [i for i in self.issues if i.severity == "warning"]

    def codes(self) -> list[str]:
        return [i.code for i in self.issues]

    def escalated(self) -> ValidationReport:
        """Warnings promoted to errors (strict mode)."""
        return ValidationReport(tuple(replace(i, severity="error") for i in self.issues))

    def to_dict(self) -> dict[str, Any]:
        return {"valid": self.valid, "issues": [i.to_dict() for i in self.issues]}

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, ensure_ascii=False) + "\n"

    def to_text(self) -> str:
        if not self.issues:
            return "valid\n"
        head = "valid" if self.valid else "invalid"
        lines = [f"{head}: {len(self.errors)} error(s), {len(self.warnings)} warning(s)"]
        lines += [f"{i.severity} {i.code} {i.path or '/'}: {i.message}" for i in self.issues]
        return "\n".join(lines) + "\n"


class DependencyCycleError(ValueError):
    def __init__(self, cycle: list[str]):
        self.cycle = cycle
        super().__init__("dependency cycle: " + " -> ".join([*cycle, cycle[0]]))


def _error(code: str, path: str, detail: str = "") -> Issue:
    msg = ISSUE_CODES[code] + (f": {detail}" if detail else "")
    return Issue("error", code, path, msg)


def _warning(code: str, path: str, detail: str = "") -> Issue:
    msg = ISSUE_CODES[code] + (f": {detail}" if detail else "")
    return Issue("warning", code, path, msg)


def _blank(text: str | None) -> bool:
    return text is None or not text.strip()


def orcid_checksum_ok(orcid: str) -> bool:
    """ISO 7064 MOD 11-2 check digit of a well-formed ORCID."""
    digits = orcid.replace("-", "")
    total = 0
    for ch in digits[:-1]:
        total = (total + int(ch)) * 2
    result = (12 - total % 11) % 11
    return digits[-1] == ("X" if result == 10 else str(result))


def _walk_records(obj: Any, path: str) -> Iterator[tuple[Any, str]]:
    yield obj, path
    for attr, key, _, _, _ in _schema(type(obj)):
        value = getattr(obj, attr)
        sub = f"{path}/{key}"
        if is_dataclass(value):
            yield from _walk_records(value, sub)
        elif isinstance(value, tuple):
            for i, item in enumerate(value):
                if is_dataclass(item):
                    yield from _walk_records(item, f"{sub}/{i}")


def _check_enums(canvas: Canvas) -> list[Issue]:
    issues = []
    for record, path in _walk_records(canvas, ""):
        if isinstance(record, Categorical):
            # serialized as a bare string, so the issue sits on the value itself
            if record.level not in CATEGORICAL_LEVELS:
                issues.append(_error("AAC-E005", path,
                                     f"{record.level!r} not in {{{', '.join(CATEGORICAL_LEVELS)}}}"))
            continue
        for attr, key, _, meta, _ in _schema(type(record)):
            value = getattr(record, attr)
            if "enum" in meta and value is not None and value not in meta["enum"]:
                issues.append(_error("AAC-E005", f"{path}/{key}",
                                     f"{value!r} not in {{{', '.join(meta['enum'])}}}"))
    return issues


def _check_duplicates(items: tuple, base: str, code: str) -> list[Issue]:
    seen: set[str] = set()
    issues = []
    for i, item in enumerate(items):
        if item.id is None:
            issues.append(_error("AAC-E027", f"{base}/{i}", "id"))
            continue
        if item.id in seen:
            issues.append(_error(code, f"{base}/{i}/id", repr(item.id)))
        seen.add(item.id)
    return issues


def _check_trl(value: int | None, path: str) -> list[Issue]:
    if value is not None and not 1 <= value <= 9:
        return [_error("AAC-E006", path, str(value))]
    return []


def _value_kind(value: Any) -> str:
    if isinstance(value, Numeric):
        return "numeric"
    if isinstance(value, Categorical):
        return "categorical"
    return "binary"


def _check_benefit(benefit, path: str, has_volume: bool) -> list[Issue]:
    issues = []
    for attr in ("type", "metric_id", "direction", "expected", "aggregation_basis",
                 "user_confidence", "developer_confidence"):
        if getattr(benefit, attr) is None:
            key = _schema_key(type(benefit), attr)
            issues.append(_error("AAC-E027", path, key))
    if benefit.metric_id is not None and not benefit.is_custom \
            and benefit.metric_id not in load_vocabulary("benefit-metrics"):
        issues.append(_warning("AAC-W011", f"{path}/metricId", repr(benefit.metric_id)))
    for attr, key in (("oversight_minutes_per_unit", "oversightMinutesPerUnit"),
                      ("oversight_minutes_per_month", "oversightMinutesPerMonth")):
        value = getattr(benefit, attr)
        if value is None:
            continue
        if value < 0:
            issues.append(_error("AAC-E018", f"{path}/{key}", str(value)))
        if benefit.type != "time":
            issues.append(_warning("AAC-W010", f"{path}/{key}", f"benefit type {benefit.type!r}"))
    for key, value in (("baseline", benefit.baseline), ("expected", benefit.expected)):
        if isinstance(value, Numeric):
            if value.amount is None:
                issues.append(_error("AAC-E027", f"{path}/{key}", "amount"))
            if _blank(value.unit):
                issues.append(_error("AAC-E027", f"{path}/{key}", "unit"))
            elif benefit.type == "time" and value.unit.strip().lower() not in TIME_UNITS:
                issues.append(_error("AAC-E028", f"{path}/{key}/unit", repr(value.unit)))
    baseline, expected = benefit.baseline, benefit.expected
    if benefit.values_are_delta and baseline is not None:
        issues.append(_error("AAC-E016", f"{path}/baseline"))
    if baseline is not None and expected is not None:
        if _value_kind(baseline) != _value_kind(expected):
            issues.append(_error("AAC-E014", f"{path}/expected",
                                 f"{_value_kind(baseline)} vs {_value_kind(expected)}"))
        elif isinstance(baseline, Numeric) and not _blank(baseline.unit) \
                and not _blank(expected.unit) and baseline.unit != expected.unit:
            issues.append(_error("AAC-E015", f"{path}/expected/unit",
                                 f"{baseline.unit!r} vs {expected.unit!r}"))
    numeric = isinstance(expected, Numeric) and not isinstance(baseline, (Categorical, Binary))
    if numeric and benefit.direction in ("higher", "lower") and not benefit.values_are_delta \
            and baseline is None:
        issues.append(_error("AAC-E025", path))
    if numeric and benefit.direction in ("higher", "lower") \
            and benefit.aggregation_basis == "per-unit" and not has_volume:
        issues.append(_warning("AAC-W012", path))
    return issues


def _schema_key(cls: type, attr: str) -> str:
    for a, key, _, _, _ in _schema(cls):
        if a == attr:
            return key
    return attr


def _parse_date(value: str | None, path: str, issues: list[Issue]) -> date | None:
    if value is None:
        return None
    try:
        return date.fromisoformat(value)
    except ValueError:
        issues.append(_error("AAC-E009", path, repr(value)))
        return None


def check_references(canvas: Canvas) -> list[Issue]:
    """One error per dangling person, requirement or benefit reference."""
    issues = []
    person_ids = {p.id for p in canvas.persons if p.id is not None}
    requirement_ids = {r.id for r in canvas.requirements if r.id is not None}
    for i, req in enumerate(canvas.requirements):
        base = f"/requirements/{i}"
        for j, pid in enumerate(req.stakeholders):
            if pid not in person_ids:
                issues.append(_error("AAC-E020", f"{base}/stakeholders/{j}", repr(pid)))
        for j, dep in enumerate(req.depends_on):
            if dep == req.id:
                issues.append(_error("AAC-E024", f"{base}/dependsOn/{j}", repr(dep)))
            elif dep not in requirement_ids:
                issues.append(_error("AAC-E022", f"{base}/dependsOn/{j}", repr(dep)))
    for i, stage in enumerate(canvas.governance.stages):
        for j, agent in enumerate(stage.agents):
            if agent.kind == "person" and agent.ref not in person_ids:
                issues.append(_error("AAC-E021", f"/governance/stages/{i}/agents/{j}/ref",
                                     repr(agent.ref)))
    for i, ev in enumerate(canvas.outcomes.evaluations):
        ref = ev.benefit_ref
        if ref is None:
            continue
        req = canvas.requirement(ref.requirement_id) if ref.requirement_id else None
        if req is None or not any(b.metric_id == ref.metric_id for b in req.benefits):
            issues.append(_error("AAC-E023", f"/outcomes/evaluations/{i}/benefitRef",
                                 f"({ref.requirement_id!r}, {ref.metric_id!r})"))
    return issues


def check_dependency_graph(canvas: Canvas) -> list[str]:
    """Requirement ids ordered so each follows all of its dependencies.

    Ties break by ascending id.  Dangling and self references are ignored
    (they are reported by :func:`check_references`).  Raises
    :class:`DependencyCycleError` naming one cycle, rotated to start at its
    smallest id.
    """
    deps: dict[str, set[str]] = {}
    for req in canvas.requirements:
        if req.id is not None and req.id not in deps:
            deps[req.id] = set()
    for req in canvas.requirements:
        if req.id is None:
            continue
        deps[req.id].update(d for d in req.depends_on if d in deps and d != req.id)
    dependents: dict[str, list[str]] = {r: [] for r in deps}
    for r, ds in deps.items():
        for d in ds:
            dependents[d].append(r)
    remaining = {r: len(ds) for r, ds in deps.items()}
    ready = [r for r, n in remaining.items() if n == 0]
    heapq.heapify(ready)
    order = []
    while ready:
        r = heapq.heappop(ready)
        order.append(r)
        for nxt in dependents[r]:
            remaining[nxt] -= 1
            if remaining[nxt] == 0:
                heapq.heappush(ready, nxt)
    if len(order) == len(deps):
        return order
    # every unfinished node still waits on an unfinished one, so walking
    # dependencies from any of them must revisit a node
    stuck = {r for r in deps if r not in set(order)}
    node = min(stuck)
    seen: list[str] = []
    while node not in seen:
        seen.append(node)
        node = min(d for d in deps[node] if d in stuck)
    cycle = seen[seen.index(node):]
    start = cycle.index(min(cycle))
    raise DependencyCycleError(cycle[start:] + cycle[:start])


def validate(canvas: Canvas, *, orcid_checksum: bool = False) -> ValidationReport:
    """Check every rule and return the sorted report."""
    issues: list[Issue] = []
    project = canvas.project
    if _blank(project.title):
        issues.append(_error("AAC-E001", "/project/title"))
    if _blank(project.description):
        issues.append(_error("AAC-E002", "/project/description"))
    if project.stage is None:
        issues.append(_error("AAC-E003", "/project/stage"))
    if not is_semver(canvas.canvas_version):
        issues.append(_error("AAC-E004", "/canvasVersion", repr(canvas.canvas_version)))
    if canvas.schema_version is not None and canvas.schema_version != SUPPORTED_SCHEMA_VERSION:
        issues.append(_warning("AAC-W001", "/schemaVersion",
                               f"{canvas.schema_version!r}, supported {SUPPORTED_SCHEMA_VERSION!r}"))
    issues += _check_enums(canvas)

    roles = load_vocabulary("functional-roles")
    issues += _check_duplicates(canvas.persons, "/persons", "AAC-E010")
    for i, person in enumerate(canvas.persons):
        if person.orcid is not None:
            if not _ORCID.match(person.orcid):
                issues.append(_error("AAC-E007", f"/persons/{i}/orcid", repr(person.orcid)))
            elif orcid_checksum and not orcid_checksum_ok(person.orcid):
                issues.append(_warning("AAC-W002", f"/persons/{i}/orcid", repr(person.orcid)))
        if _blank(person.name):
            issues.append(_error("AAC-E027", f"/persons/{i}", "name"))
        for j, role in enumerate(person.roles):
            if role not in roles:
                issues.append(_error("AAC-E019", f"/persons/{i}/roles/{j}", repr(role)))

    issues += _check_trl(canvas.feasibility_defaults.trl, "/feasibilityDefaults/trl")
    issues += _check_duplicates(canvas.requirements, "/requirements", "AAC-E011")
    for i, req in enumerate(canvas.requirements):
        base = f"/requirements/{i}"
        if _blank(req.title):
            issues.append(_error("AAC-E027", base, "title"))
        if req.monthly_volume is not None and req.monthly_volume < 0:
            issues.append(_error("AAC-E017", f"{base}/monthlyVolume", str(req.monthly_volume)))
        metric_ids: set[str] = set()
        for j, benefit in enumerate(req.benefits):
            path = f"{base}/benefits/{j}"
            issues += _check_benefit(benefit, path, req.monthly_volume is not None)
            if benefit.metric_id is not None:
                if benefit.metric_id in metric_ids:
                    issues.append(_error("AAC-E026", f"{path}/metricId", repr(benefit.metric_id)))
                metric_ids.add(benefit.metric_id)
        feas = req.feasibility
        if feas is not None:
            issues += _check_trl(feas.trl, f"{base}/feasibility/trl")
            for j, risk in enumerate(feas.risks):
                path = f"{base}/feasibility/risks/{j}"
                for attr in ("category", "likelihood", "impact", "status"):
                    if getattr(risk, attr) is None:
                        issues.append(_error("AAC-E027", path, attr))
                if _blank(risk.title):
                    issues.append(_error("AAC-E027", path, "title"))

    for i, stage in enumerate(canvas.governance.stages):
        base = f"/governance/stages/{i}"
        if _blank(stage.name):
            issues.append(_error("AAC-E027", base, "name"))
        start = _parse_date(stage.start_date, f"{base}/startDate", issues)
        end = _parse_date(stage.end_date, f"{base}/endDate", issues)
        if start is not None and end is not None and start > end:
            issues.append(_error("AAC-E008", f"{base}/endDate", f"{start} > {end}"))
        for j, agent in enumerate(stage.agents):
            if agent.kind is None:
                issues.append(_error("AAC-E027", f"{base}/agents/{j}", "kind"))
            if _blank(agent.ref):
                issues.append(_error("AAC-E027", f"{base}/agents/{j}", "ref"))
        for j, std in enumerate(stage.compliance_standards):
            if isinstance(std, ComplianceReference) and _blank(std.framework):
                issues.append(_error("AAC-E027", f"{base}/complianceStandards/{j}", "framework"))

    duo = load_vocabulary("duo")
    issues += _check_duplicates(canvas.data_access.datasets, "/dataAccess/datasets", "AAC-E012")
    for i, ds in enumerate(canvas.data_access.datasets):
        base = f"/dataAccess/datasets/{i}"
        if _blank(ds.title):
            issues.append(_error("AAC-E027", base, "title"))
        if ds.access_rights is None:
            issues.append(_error("AAC-E027", base, "accessRights"))
        for j, term in enumerate(ds.duo_terms):
            if term not in duo:
                issues.append(_error("AAC-E013", f"{base}/duoTerms/{j}", repr(term)))

    issues += check_references(canvas)
    try:
        check_dependency_graph(canvas)
    except DependencyCycleError as exc:
        index = next(i for i, r in enumerate(canvas.requirements) if r.id == exc.cycle[0])
        issues.append(_error("AAC-E030", f"/requirements/{index}/dependsOn",
                             " -> ".join([*exc.cycle, exc.cycle[0]])))
    return ValidationReport(_sort(issues))
