"""Canvas document model and its canonical JSON codec.

Every record is a frozen dataclass.  Python attribute names are snake_case;
the JSON names are their camelCase forms.  Keys the model does not know about
are kept in each record's ``extra`` map and re-emitted on serialization, so a
parse/serialize cycle never drops data.

Enumerated fields are plain strings tagged with their allowed values in the
field metadata.  :func:`parse_canvas` rejects values outside the enumeration
unless ``check_enums=False``, in which case the raw string is kept and the
validator reports it instead.
"""

from __future__ import annotations

import json
import typing
from dataclasses import MISSING, dataclass, field, fields, is_dataclass
from functools import lru_cache
from typing import Any, ClassVar, Mapping, Optional, Tuple, Union

SUPPORTED_SCHEMA_VERSION = "0.13.1"

STAGES = ("planning", "prototype", "deployment")
PRIORITIES = ("must-have", "should-have", "could-have", "wont-have")
REQUIREMENT_STATUSES = ("proposed", "accepted", "in-progress", "delivered", "rejected")
BENEFIT_TYPES = ("time", "quality", "risk", "enablement", "cost")
DIRECTIONS = ("higher", "lower", "target", "boolean")
AGGREGATION_BASES = ("per-unit", "per-month", "one-off")
CONFIDENCE_LEVELS = ("low", "medium", "high")
CATEGORICAL_LEVELS = ("low", "medium", "high")
RISK_LEVELS = ("low", "medium", "high", "critical")
RISK_CATEGORIES = ("technical", "data", "compliance", "operational", "ethical", "adoption")
RISK_STATUSES = ("identified", "mitigated", "accepted", "resolved")
MODEL_SELECTIONS = ("open-source", "frontier-model", "fine-tuned", "custom", "none")
AGENT_KINDS = ("person", "organization", "software")
ACCESS_RIGHTS = ("open", "restricted", "confidential", "highly-restricted")


class ParseError(ValueError):
    """A canvas document could not be decoded.

    ``path`` is a JSON pointer to the offending value; ``line``/``column``
    are set for JSON syntax errors.
    """

    def __init__(self, message: str, path: str = "", *, value: Any = None,
                 line: int | None = None, column: int | None = None):
        self.message = message
        self.path = path
        self.value = value
        self.line = line
        self.column = column
        where = f" at {path}" if path else ""
        if line is not None:
            where = f" at line {line} column {column}"
        super().__init__(f"{message}{where}")


def enum(values: tuple[str, ...], **kw: Any) -> Any:
    return field(default=None, metadata={"enum": values}, **kw)


def seq() -> Any:
    return field(default=())


def ext() -> Any:
    return field(default_factory=dict, repr=False)


# -- values ------------------------------------------------------------------


@dataclass(frozen=True)
class Numeric:
    amount: Optional[float] = None
    unit: Optional[str] = None
    extra: Mapping[str, Any] = ext()


@dataclass(frozen=True)
class Categorical:
    level: str = enum(CATEGORICAL_LEVELS)


@dataclass(frozen=True)
class Binary:
    value: bool = False


Value = Union[Numeric, Categorical, Binary]


# -- project -----------------------------------------------------------------


@dataclass(frozen=True)
class Funding:
    grant_name: Optional[str] = None
    funder_name: Optional[str] = None
    grant_id: Optional[str] = None
    extra: Mapping[str, Any] = ext()


@dataclass(frozen=True)
class ValueSummary:
    headline_value_statement: Optional[str] = None
    primary_value_driver: Optional[str] = enum(BENEFIT_TYPES)
    extra: Mapping[str, Any] = ext()


@dataclass(frozen=True)
class ProjectDefinition:
    title: Optional[str] = None
    description: Optional[str] = None
    objectives: Tuple[str, ...] = seq()
    stage: Optional[str] = enum(STAGES)
    domain: Optional[str] = None
    keywords: Tuple[str, ...] = seq()
    funding: Optional[Funding] = None
    lead_organization: Optional[str] = None
    value_summary: Optional[ValueSummary] = None
    extra: Mapping[str, Any] = ext()


@dataclass(frozen=True)
class Person:
    id: Optional[str] = None
    name: Optional[str] = None
    affiliation: Optional[str] = None
    orcid: Optional[str] = None
    roles: Tuple[str, ...] = seq()
    extra: Mapping[str, Any] = ext()


# -- requirements and feasibility -----------------------------------------------


@dataclass(frozen=True)
class BenefitMetric:
    type: Optional[str] = enum(BENEFIT_TYPES)
    metric_id: Optional[str] = None
    is_custom: bool = False
    label: Optional[str] = None
    direction: Optional[str] = enum(DIRECTIONS)
    values_are_delta: bool = False
    baseline: Optional[Value] = None
    expected: Optional[Value] = None
    aggregation_basis: Optional[str] = enum(AGGREGATION_BASES)
    oversight_minutes_per_unit: Optional[float] = None
    oversight_minutes_per_month: Optional[float] = None
    user_confidence: Optional[str] = enum(CONFIDENCE_LEVELS)
    developer_confidence: Optional[str] = enum(CONFIDENCE_LEVELS)
    assumptions: Optional[str] = None
    extra: Mapping[str, Any] = ext()


@dataclass(frozen=True)
class RiskRecord:
    category: Optional[str] = enum(RISK_CATEGORIES)
    title: Optional[str] = None
    description: Optional[str] = None
    likelihood: Optional[str] = enum(RISK_LEVELS)
    impact: Optional[str] = enum(RISK_LEVELS)
    mitigation: Optional[str] = None
    status: Optional[str] = enum(RISK_STATUSES)
    extra: Mapping[str, Any] = ext()


@dataclass(frozen=True)
class PromptingArchitecture:
    TAG: ClassVar[str] = "prompting"
    extra: Mapping[str, Any] = ext()


@dataclass(frozen=True)
class RagArchitecture:
    TAG: ClassVar[str] = "rag"
    retrieval_method: Optional[str] = None
    embedding_model: Optional[str] = None
    chunking_strategy: Optional[str] = None
    extra: Mapping[str, Any] = ext()


@dataclass(frozen=True)
class FineTuningArchitecture:
    TAG: ClassVar[str] = "fine-tuning"
    base_model: Optional[str] = None
    approach: Optional[str] = None
    dataset: Optional[str] = None
    extra: Mapping[str, Any] = ext()


@dataclass(frozen=True)
class AgenticArchitecture:
    TAG: ClassVar[str] = "agentic"
    framework: Optional[str] = None
    tools: Tuple[str, ...] = seq()
    orchestration: Optional[str] = None
    extra: Mapping[str, Any] = ext()


@dataclass(frozen=True)
class NoArchitecture:
    TAG: ClassVar[str] = "none"
    extra: Mapping[str, Any] = ext()


Architecture = Union[
    PromptingArchitecture, RagArchitecture, FineTuningArchitecture,
    AgenticArchitecture, NoArchitecture,
]
ARCHITECTURES = {
    cls.TAG: cls
    for cls in (PromptingArchitecture, RagArchitecture, FineTuningArchitecture,
                AgenticArchitecture, NoArchitecture)
}


@dataclass(frozen=True)
class TaskFeasibility:
    trl: Optional[int] = None
    technical_risk: Optional[str] = enum(RISK_LEVELS)
    effort_estimate: Optional[str] = None
    algorithm_spec: Optional[str] = None
    tools: Tuple[str, ...] = seq()
    model_selection: Optional[str] = enum(MODEL_SELECTIONS)
    model_card_id: Optional[str] = None
    architecture: Optional[Architecture] = None
    risks: Tuple[RiskRecord, ...] = seq()
    extra: Mapping[str, Any] = ext()


@dataclass(frozen=True)
class Requirement:
    id: Optional[str] = None
    title: Optional[str] = None
    description: Optional[str] = None
    user_story: Optional[str] = None
    priority: Optional[str] = enum(PRIORITIES)
    status: Optional[str] = enum(REQUIREMENT_STATUSES)
    unit_of_work: Optional[str] = None
    monthly_volume: Optional[float] = None
    target_population: Optional[str] = None
    benefits: Tuple[BenefitMetric, ...] = seq()
    depends_on: Tuple[str, ...] = seq()
    stakeholders: Tuple[str, ...] = seq()
    feasibility: Optional[TaskFeasibility] = None
    extra: Mapping[str, Any] = ext()


@dataclass(frozen=True)
class FeasibilityDefaults:
    trl: Optional[int] = None
    overall_technical_risk: Optional[str] = enum(RISK_LEVELS)
    effort_estimate: Optional[str] = None
    extra: Mapping[str, Any] = ext()


# -- governance ----------------------------------------------------------------


@dataclass(frozen=True)
class AgentRef:
    kind: Optional[str] = enum(AGENT_KINDS)
    ref: Optional[str] = None
    extra: Mapping[str, Any] = ext()


@dataclass(frozen=True)
class Milestone:
    title: Optional[str] = None
    kpis: Tuple[str, ...] = seq()
    extra: Mapping[str, Any] = ext()


@dataclass(frozen=True)
class ComplianceReference:
    framework: Optional[str] = None
    clauses: Tuple[str, ...] = seq()
    uri: Optional[str] = None
    extra: Mapping[str, Any] = ext()


ComplianceStandard = Union[str, ComplianceReference]


@dataclass(frozen=True)
class GovernanceStage:
    name: Optional[str] = None
    start_date: Optional[str] = None
    end_date: Optional[str] = None
    agents: Tuple[AgentRef, ...] = seq()
    milestones: Tuple[Milestone, ...] = seq()
    compliance_standards: Tuple[ComplianceStandard, ...] = seq()
    policy_card_uri: Optional[str] = None
    extra: Mapping[str, Any] = ext()


@dataclass(frozen=True)
class Governance:
    stages: Tuple[GovernanceStage, ...] = seq()
    extra: Mapping[str, Any] = ext()


# -- data access -----------------------------------------------------------------


@dataclass(frozen=True)
class DatasetEntry:
    id: Optional[str] = None
    title: Optional[str] = None
    format: Optional[str] = None
    license: Optional[str] = None
    access_rights: Optional[str] = enum(ACCESS_RIGHTS)
    sensitivity_level: Optional[str] = None
    personal_data: bool = False
    duo_terms: Tuple[str, ...] = seq()
    persistent_id: Optional[str] = None
    data_card_id: Optional[str] = None
    contact_point: Optional[str] = None
    extra: Mapping[str, Any] = ext()


@dataclass(frozen=True)
class DataAccess:
    datasets: Tuple[DatasetEntry, ...] = seq()
    extra: Mapping[str, Any] = ext()


# -- outcomes ----------------------------------------------------------------------


@dataclass(frozen=True)
class Deliverable:
    title: Optional[str] = None
    type: Optional[str] = None
    status: Optional[str] = None
    persistent_id: Optional[str] = None
    extra: Mapping[str, Any] = ext()


@dataclass(frozen=True)
class Publication:
    title: Optional[str] = None
    doi: Optional[str] = None
    authors: Tuple[str, ...] = seq()
    extra: Mapping[str, Any] = ext()


@dataclass(frozen=True)
class BenefitRef:
    requirement_id: Optional[str] = None
    metric_id: Optional[str] = None
    extra: Mapping[str, Any] = ext()


@dataclass(frozen=True)
class Evaluation:
    metric: Optional[str] = None
    method: Optional[str] = None
    findings: Optional[str] = None
    value: Optional[Numeric] = None
    benefit_ref: Optional[BenefitRef] = None
    extra: Mapping[str, Any] = ext()


@dataclass(frozen=True)
class Outcomes:
    deliverables: Tuple[Deliverable, ...] = seq()
    publications: Tuple[Publication, ...] = seq()
    evaluations: Tuple[Evaluation, ...] = seq()
    extra: Mapping[str, Any] = ext()


@dataclass(frozen=True)
class Canvas:
    schema_version: Optional[str] = None
    canvas_version: Optional[str] = None
    project: ProjectDefinition = field(default_factory=ProjectDefinition)
    persons: Tuple[Person, ...] = seq()
    requirements: Tuple[Requirement, ...] = seq()
    feasibility_defaults: FeasibilityDefaults = field(default_factory=FeasibilityDefaults)
    governance: Governance = field(default_factory=Governance)
    data_access: DataAccess = field(default_factory=DataAccess)
    outcomes: Outcomes = field(default_factory=Outcomes)
    extra: Mapping[str, Any] = ext()

    def person(self, person_id: str) -> Person | None:
        for p in self.persons:
            if p.id == person_id:
                return p
        return None

    def requirement(self, requirement_id: str) -> Requirement | None:
        for r in self.requirements:
            if r.id == requirement_id:
                return r
        return None


# -- codec -------------------------------------------------------------------------


def camel(name: str) -> str:
    head, *rest = name.split("_")
    return head + "".join(part.title() for part in rest)


def pointer_escape(token: Any) -> str:
    return str(token).replace("~", "~0").replace("/", "~1")


def split_pointer(path: str) -> list[str]:
    if not path:
        return []
    return [t.replace("~1", "/").replace("~0", "~") for t in path[1:].split("/")]


def pointer_sort_key(path: str) -> tuple:
    """Sort key ordering array indices numerically."""
    return tuple((0, int(t), "") if t.isdigit() else (1, 0, t) for t in split_pointer(path))


def resolve_pointer(document: Any, path: str) -> Any:
    """Value at ``path`` in ``document``; raises KeyError if absent."""
    node = document
    for token in split_pointer(path):
        if isinstance(node, list):
            if not token.isdigit() or int(token) >= len(node):
                raise KeyError(path)
            node = node[int(token)]
        elif isinstance(node, dict) and token in node:
            node = node[token]
        else:
            raise KeyError(path)
    return node


def _join(path: str, token: Any) -> str:
    return f"{path}/{pointer_escape(token)}"


@lru_cache(maxsize=None)
def _schema(cls: type) -> tuple[tuple[str, str, Any, Mapping[str, Any], bool], ...]:
    """(attr, json name, resolved type, metadata, has_default) per model field."""
    hints = typing.get_type_hints(cls)
    out = []
    for f in fields(cls):
        if f.name == "extra":
            continue
        has_default = f.default is not MISSING or f.default_factory is not MISSING
        out.append((f.name, camel(f.name), hints[f.name], f.metadata, has_default))
    return tuple(out)


def _type_name(tp: Any) -> str:
    if tp is str:
        return "string"
    if tp in (int,):
        return "integer"
    if tp is float:
        return "number"
    if tp is bool:
        return "boolean"
    if is_dataclass(tp):
        return "object"
    origin = typing.get_origin(tp)
    if origin is tuple:
        return "array"
    return "value"


class _Decoder:
    def __init__(self, check_enums: bool):
        self.check_enums = check_enums

    def decode(self, tp: Any, data: Any, path: str) -> Any:
        origin = typing.get_origin(tp)
        if origin is Union:
            args = [a for a in typing.get_args(tp) if a is not type(None)]
            if data is None and len(args) < len(typing.get_args(tp)):
                return None
            if len(args) == 1:
                return self.decode(args[0], data, path)
            return self._union(args, data, path)
        if origin is tuple:
            if not isinstance(data, list):
                raise ParseError("expected array", path, value=data)
            (item,) = {a for a in typing.get_args(tp) if a is not Ellipsis}
            return tuple(self.decode(item, v, _join(path, i)) for i, v in enumerate(data))
        if is_dataclass(tp):
            return self.record(tp, data, path)
        if tp is bool:
            if not isinstance(data, bool):
                raise ParseError("expected boolean", path, value=data)
            return data
        if tp is int:
            if isinstance(data, bool) or not isinstance(data, int):
                raise ParseError("expected integer", path, value=data)
            return data
        if tp is float:
            if isinstance(data, bool) or not isinstance(data, (int, float)):
                raise ParseError("expected number", path, value=data)
            return data
        if tp is str:
            if not isinstance(data, str):
                raise ParseError("expected string", path, value=data)
            return data
        raise TypeError(f"unsupported model type {tp!r}")

    def _union(self, args: list[Any], data: Any, path: str) -> Any:
        if set(args) == {Numeric, Categorical, Binary}:
            if isinstance(data, bool):
                return Binary(data)
            if isinstance(data, str):
                self._enum(data, CATEGORICAL_LEVELS, path)
                return Categorical(data)
            if isinstance(data, dict):
                return self.record(Numeric, data, path)
            raise ParseError("expected numeric object, category or boolean", path, value=data)
        if set(args) == {str, ComplianceReference}:
            if isinstance(data, str):
                return data
            if isinstance(data, dict):
                return self.record(ComplianceReference, data, path)
            raise ParseError("expected string or framework reference", path, value=data)
        if set(args) == set(ARCHITECTURES.values()):
            if not isinstance(data, dict):
                raise ParseError("expected object", path, value=data)
            tag = data.get("type")
            if tag not in ARCHITECTURES:
                raise ParseError(f"unknown architecture type {tag!r}", _join(path, "type"), value=tag)
            body = {k: v for k, v in data.items() if k != "type"}
            return self.record(ARCHITECTURES[tag], body, path)
        raise TypeError(f"unsupported union {args!r}")

    def _enum(self, value: str, allowed: tuple[str, ...], path: str) -> None:
        if self.check_enums and value not in allowed:
            raise ParseError(
                f"unknown enum value {value!r} (expected one of {', '.join(allowed)})",
                path, value=value)

    def record(self, cls: type, data: Any, path: str) -> Any:
        if not isinstance(data, dict):
            raise ParseError("expected object", path, value=data)
        kwargs: dict[str, Any] = {}
        known = set()
        for attr, key, tp, meta, _ in _schema(cls):
            known.add(key)
            if key not in data:
                continue
            sub = _join(path, key)
            value = self.decode(tp, data[key], sub)
            if "enum" in meta and value is not None:
                self._enum(value, meta["enum"], sub)
            kwargs[attr] = value
        extra = {k: v for k, v in data.items() if k not in known}
        if any(f.name == "extra" for f in fields(cls)):
            kwargs["extra"] = extra
        elif extra:
            raise ParseError(f"unexpected key {next(iter(extra))!r}", path)
        return cls(**kwargs)


def _reject_constant(name: str) -> Any:
    raise ValueError(f"{name} is not valid JSON")


def load_json(text: str | bytes) -> Any:
    """Strict JSON decoding with positional error reporting."""
    if isinstance(text, bytes):
        try:
            text = text.decode("utf-8")
        except UnicodeDecodeError as exc:
            raise ParseError(f"document is not UTF-8: {exc}") from exc
    if text.startswith("\ufeff"):
        text = text[1:]
    try:
        return json.loads(text, parse_constant=_reject_constant)
    except json.JSONDecodeError as exc:
        raise ParseError(f"invalid JSON: {exc.msg}", line=exc.lineno, column=exc.colno) from exc
    except ValueError as exc:
        raise ParseError(f"invalid JSON: {exc}") from exc


def canvas_from_dict(data: Any, *, check_enums: bool = True) -> Canvas:
    return _Decoder(check_enums).record(Canvas, data, "")


def parse_canvas(text: str | bytes, *, check_enums: bool = True) -> Canvas:
    """Decode a canvas JSON document.

    Raises :class:`ParseError` for malformed JSON, type mismatches and (with
    ``check_enums``) enum values outside their vocabulary.  Missing fields are
    not parse errors; the validator reports them.
    """
    return canvas_from_dict(load_json(text), check_enums=check_enums)


def _sorted_json(value: Any) -> Any:
    if isinstance(value, dict):
        return {k: _sorted_json(value[k]) for k in sorted(value)}
    if isinstance(value, list):
        return [_sorted_json(v) for v in value]
    return value


def to_dict(obj: Any) -> Any:
    """Canonical JSON-compatible form of a model value.

    Keys follow field declaration order, ``None`` fields are omitted and
    extension keys follow in sorted order.
    """
    if isinstance(obj, Categorical):
        return obj.level
    if isinstance(obj, Binary):
        return obj.value
    if is_dataclass(obj):
        out: dict[str, Any] = {}
        tag = getattr(type(obj), "TAG", None)
        if tag is not None:
            out["type"] = tag
        for attr, key, _, _, _ in _schema(type(obj)):
            value = getattr(obj, attr)
            if value is None:
                continue
            out[key] = to_dict(value)
        for key in sorted(getattr(obj, "extra", {})):
            if key not in out:
                out[key] = _sorted_json(obj.extra[key])
        return out
    if isinstance(obj, (tuple, list)):
        return [to_dict(v) for v in obj]
    return obj


def dump_json(data: Any) -> str:
    return json.dumps(data, indent=2, ensure_ascii=False) + "\n"


def serialize_canvas(canvas: Canvas) -> str:
    """Canonical JSON text: fixed key order, 2-space indent, trailing newline."""
    return dump_json(to_dict(canvas))
