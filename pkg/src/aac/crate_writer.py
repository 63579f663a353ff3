"""RO-Crate 1.2 export: JSON-LD entity graph and deterministic ZIP packaging."""

from __future__ import annotations

import io
import json
import zipfile
from dataclasses import dataclass, field
from datetime import datetime, timezone
from typing import Any
from urllib.parse import quote

from .benefits import BenefitSummary, aggregate_project
from .model import (
    AgenticArchitecture,
    BenefitMetric,
    Binary,
    Canvas,
    Categorical,
    ComplianceReference,
    FineTuningArchitecture,
    Numeric,
    RagArchitecture,
    serialize_canvas,
)
from .validator import ValidationReport, validate
from .vocab import vocab_lookup

RO_CRATE_CONTEXT = "https://w3id.org/ro/crate/1.2/context"
RO_CRATE_PROFILE = "https://w3id.org/ro/crate/1.2"
AAC_NAMESPACE = "https://w3id.org/aac/"
OBO = "http://purl.obolibrary.org/obo/"

PREFIXES = {
    "dcat": "http://www.w3.org/ns/dcat#",
    "prov": "http://www.w3.org/ns/prov#",
    "p-plan": "http://purl.org/net/p-plan#",
    "frapo": "http://purl.org/cerif/frapo/",
    "obo": OBO,
    "aac": AAC_NAMESPACE,
}

METADATA_FILE = "ro-crate-metadata.json"
PREVIEW_FILE = "ro-crate-preview.html"
CANVAS_FILE = "canvas.json"
AGENTS_FILE = "AGENTS.md"
ARCHIVE_ENTRIES = (METADATA_FILE, PREVIEW_FILE, CANVAS_FILE, AGENTS_FILE)

# earliest instant a ZIP header can represent
DEFAULT_TIMESTAMP = datetime(1980, 1, 1, tzinfo=timezone.utc)


class InvalidCanvasError(ValueError):
    def __init__(self, report: ValidationReport):
        self.report = report
        super().__init__(
            f"canvas has {len(report.errors)} validation error(s); run the validator for details")


def ref(entity_id: str) -> dict[str, str]:
    return {"@id": entity_id}


@dataclass
class Entity:
    id: str
    types: tuple[str, ...]
    properties: dict[str, Any] = field(default_factory=dict)

    def to_jsonld(self) -> dict[str, Any]:
        out: dict[str, Any] = {
            "@id": self.id,
            "@type": self.types[0] if len(self.types) == 1 else list(self.types),
        }
        for key in sorted(self.properties):
            out[key] = self.properties[key]
        return out


@dataclass
class EntityGraph:
    context: list[Any]
    entities: list[Entity]

    def get(self, entity_id: str) -> Entity | None:
        for e in self.entities:
            if e.id == entity_id:
                return e
        return None

    def of_type(self, type_name: str) -> list[Entity]:
        return [e for e in self.entities if type_name in e.types]

    def to_jsonld(self) -> dict[str, Any]:
        return {"@context": self.context, "@graph": [e.to_jsonld() for e in self.entities]}

    def to_json(self) -> str:
        return json.dumps(self.to_jsonld(), indent=2, ensure_ascii=False) + "\n"


def _frag(kind: str, *parts: Any) -> str:
    return "#" + "-".join([kind, *(quote(str(p), safe="") for p in parts)])


def person_id(pid: str) -> str:
    return _frag("person", pid)


def requirement_id(rid: str) -> str:
    return _frag("requirement", rid)


def benefit_id(rid: str, metric_id: str) -> str:
    return _frag("benefit", rid, metric_id)


def dataset_id(did: str) -> str:
    return _frag("dataset", did)


def duo_iri(code: str) -> str:
    return OBO + code.replace(":", "_")


class _Builder:
    def __init__(self) -> None:
        self.entities: list[Entity] = []
        self.index: dict[str, Entity] = {}

    def add(self, entity_id: str, types: str | tuple[str, ...], **props: Any) -> Entity:
        if isinstance(types, str):
            types = (types,)
        clean = {k: v for k, v in props.items() if v is not None and v != [] and v != ""}
        entity = Entity(entity_id, types, clean)
        self.entities.append(entity)
        self.index[entity_id] = entity
        return entity


def _value_props(prefix: str, value: Any) -> dict[str, Any]:
    if isinstance(value, Numeric):
        return {f"aac:{prefix}Value": value.amount, f"aac:{prefix}Unit": value.unit}
    if isinstance(value, Categorical):
        return {f"aac:{prefix}Value": value.level}
    if isinstance(value, Binary):
        return {f"aac:{prefix}Value": value.value}
    return {}


def _benefit_props(b: BenefitMetric) -> dict[str, Any]:
    props = {
        "name": b.label,
        "identifier": b.metric_id,
        "aac:benefitType": b.type,
        "aac:isCustomMetric": b.is_custom,
        "aac:direction": b.direction,
        "aac:valuesAreDelta": b.values_are_delta,
        "aac:aggregationBasis": b.aggregation_basis,
        "aac:oversightMinutesPerUnit": b.oversight_minutes_per_unit,
        "aac:oversightMinutesPerMonth": b.oversight_minutes_per_month,
        "aac:userConfidence": b.user_confidence,
        "aac:developerConfidence": b.developer_confidence,
        "aac:assumptions": b.assumptions,
    }
    props.update(_value_props("baseline", b.baseline))
    props.update(_value_props("expected", b.expected))
    return props


def build_entity_graph(canvas: Canvas, *, date_published: str | None = None) -> EntityGraph:
    """Project a canvas onto an RO-Crate JSON-LD graph.

    Entity order: descriptor, root, project, persons, plan and steps,
    governance activities, datasets, funding, then contextual entities.
    """
    g = _Builder()
    contextual = _Builder()
    project = canvas.project

    g.add(METADATA_FILE, "CreativeWork", about=ref("./"), conformsTo=ref(RO_CRATE_PROFILE))
    g.add(
        "./", "Dataset",
        name=project.title,
        description=project.description,
        version=canvas.canvas_version,
        keywords=list(project.keywords),
        datePublished=date_published,
        mainEntity=ref("#project"),
        hasPart=[ref(PREVIEW_FILE), ref(CANVAS_FILE), ref(AGENTS_FILE)],
    )
    contextual.add(PREVIEW_FILE, "File", name="Human-readable preview", encodingFormat="text/html")
    contextual.add(CANVAS_FILE, "File", name="Canvas document", encodingFormat="application/json",
                   conformsTo=ref(AAC_NAMESPACE))
    contextual.add(AGENTS_FILE, "File", name="Instructions for coding agents",
                   encodingFormat="text/markdown")

    defaults = canvas.feasibility_defaults
    summary = project.value_summary
    g.add(
        "#project", ("Project", "ResearchProject"),
        name=project.title,
        description=project.description,
        keywords=list(project.keywords),
        **{
            "aac:stage": project.stage,
            "aac:objective": list(project.objectives),
            "aac:domain": project.domain,
            "aac:leadOrganization": project.lead_organization,
            "aac:headlineValueStatement": summary.headline_value_statement if summary else None,
            "aac:primaryValueDriver": summary.primary_value_driver if summary else None,
            "aac:defaultTrl": defaults.trl,
            "aac:overallTechnicalRisk": defaults.overall_technical_risk,
            "aac:effortEstimate": defaults.effort_estimate,
            "funding": ref("#grant") if project.funding else None,
            "member": [ref(person_id(p.id)) for p in canvas.persons],
        },
    )

    for p in canvas.persons:
        g.add(
            person_id(p.id), "Person",
            name=p.name,
            affiliation=p.affiliation,
            identifier=f"https://orcid.org/{p.orcid}" if p.orcid else None,
            **{"aac:personId": p.id, "aac:role": list(p.roles)},
        )

    g.add("#plan", "p-plan:Plan", name=f"Requirements plan: {project.title or ''}".strip())
    for req in canvas.requirements:
        rid = requirement_id(req.id)
        benefit_refs = []
        for b in req.benefits:
            bid = benefit_id(req.id, b.metric_id)
            benefit_refs.append(ref(bid))
            contextual.add(bid, "aac:BenefitMetric", **_benefit_props(b))
        feasibility_ref = None
        if req.feasibility is not None:
            feasibility_ref = ref(_frag("feasibility", req.id))
            _add_feasibility(contextual, req.id, req.feasibility)
        g.add(
            rid, "p-plan:Step",
            name=req.title,
            description=req.description,
            identifier=req.id,
            **{
                "p-plan:isStepOfPlan": ref("#plan"),
                "p-plan:isPrecededBy": [ref(requirement_id(d)) for d in req.depends_on],
                "aac:userStory": req.user_story,
                "aac:priority": req.priority,
                "aac:status": req.status,
                "aac:unitOfWork": req.unit_of_work,
                "aac:monthlyVolume": req.monthly_volume,
                "aac:targetPopulation": req.target_population,
                "aac:stakeholder": [ref(person_id(s)) for s in req.stakeholders],
                "aac:benefit": benefit_refs,
                "aac:feasibility": feasibility_ref,
            },
        )

    agent_ids: dict[tuple[str, str], str] = {}
    for i, stage in enumerate(canvas.governance.stages):
        associated = []
        for agent in stage.agents:
            if agent.kind == "person":
                associated.append(ref(person_id(agent.ref)))
                continue
            key = (agent.kind, agent.ref)
            if key not in agent_ids:
                kind = "organization" if agent.kind == "organization" else "software"
                aid = _frag(kind, agent.ref)
                agent_ids[key] = aid
                types = ("Organization", "prov:Organization") if kind == "organization" \
                    else ("SoftwareApplication", "prov:SoftwareAgent")
                contextual.add(aid, types, name=agent.ref)
            associated.append(ref(agent_ids[key]))
        generated = []
        for j, ms in enumerate(stage.milestones):
            mid = _frag("milestone", i, j)
            generated.append(ref(mid))
            contextual.add(mid, ("prov:Entity", "aac:Milestone"), name=ms.title,
                           **{"aac:kpi": list(ms.kpis)})
        standards = []
        for j, std in enumerate(stage.compliance_standards):
            if isinstance(std, ComplianceReference):
                cid = _frag("compliance", i, j)
                standards.append(ref(cid))
                contextual.add(cid, "aac:ComplianceReference", name=std.framework,
                               url=std.uri, **{"aac:clause": list(std.clauses)})
            else:
                standards.append(std)
        g.add(
            _frag("stage", i), "prov:Activity",
            name=stage.name,
            **{
                "prov:startedAtTime": stage.start_date,
                "prov:endedAtTime": stage.end_date,
                "prov:wasAssociatedWith": associated,
                "prov:generated": generated,
                "aac:complianceStandard": standards,
                "aac:policyCardUri": stage.policy_card_uri,
            },
        )

    person_ids = {p.id for p in canvas.persons}
    for ds in canvas.data_access.datasets:
        did = dataset_id(ds.id)
        dist = _frag("distribution", ds.id)
        contextual.add(dist, "dcat:Distribution", name=f"{ds.title or ds.id} distribution",
                       encodingFormat=ds.format, license=ds.license)
        contact = None
        if ds.contact_point is not None:
            contact = ref(person_id(ds.contact_point)) if ds.contact_point in person_ids \
                else ds.contact_point
        duo_refs = []
        for code in ds.duo_terms:
            iri = duo_iri(code)
            duo_refs.append(ref(iri))
            if iri not in contextual.index:
                term = vocab_lookup("duo", code)
                contextual.add(iri, "DefinedTerm", name=term.label if term else code,
                               termCode=code, description=term.definition if term else None,
                               inDefinedTermSet=ref(OBO + "duo.owl"))
        g.add(
            did, "dcat:Dataset",
            name=ds.title,
            identifier=ds.persistent_id or ds.id,
            license=ds.license,
            **{
                "dcat:accessRights": ds.access_rights,
                "dcat:contactPoint": contact,
                "dcat:distribution": ref(dist),
                "aac:datasetId": ds.id,
                "aac:sensitivityLevel": ds.sensitivity_level,
                "aac:personalData": ds.personal_data,
                "aac:duoTerm": duo_refs,
                "aac:dataCardId": ds.data_card_id,
            },
        )
    if any(d.duo_terms for d in canvas.data_access.datasets):
        contextual.add(OBO + "duo.owl", "DefinedTermSet", name="Data Use Ontology")

    funding = project.funding
    if funding is not None:
        g.add("#grant", "frapo:Grant", name=funding.grant_name, identifier=funding.grant_id,
              **{"frapo:isAwardedBy": ref("#funder") if funding.funder_name else None})
        if funding.funder_name:
            g.add("#funder", ("Organization", "frapo:FundingAgency"), name=funding.funder_name)

    outcomes = canvas.outcomes
    outcome_refs = []
    for i, d in enumerate(outcomes.deliverables):
        oid = _frag("deliverable", i)
        outcome_refs.append(ref(oid))
        contextual.add(oid, ("CreativeWork", "aac:Deliverable"), name=d.title,
                       identifier=d.persistent_id,
                       **{"aac:deliverableType": d.type, "creativeWorkStatus": d.status})
    for i, pub in enumerate(outcomes.publications):
        oid = _frag("publication", i)
        outcome_refs.append(ref(oid))
        contextual.add(oid, "ScholarlyArticle", name=pub.title,
                       identifier=f"https://doi.org/{pub.doi}" if pub.doi else None,
                       **{"aac:authorName": list(pub.authors)})
    for i, ev in enumerate(outcomes.evaluations):
        oid = _frag("evaluation", i)
        outcome_refs.append(ref(oid))
        bref = ev.benefit_ref
        contextual.add(
            oid, "aac:Evaluation", name=ev.metric,
            **{
                "aac:method": ev.method,
                "aac:findings": ev.findings,
                **_value_props("measured", ev.value),
                "aac:benefit": ref(benefit_id(bref.requirement_id, bref.metric_id)) if bref else None,
            },
        )
    if outcome_refs:
        g.index["#project"].properties["aac:outcome"] = outcome_refs

    context = [RO_CRATE_CONTEXT, dict(PREFIXES)]
    return EntityGraph(context, g.entities + contextual.entities)


def _add_feasibility(b: _Builder, rid: str, feas) -> None:
    arch = feas.architecture
    arch_props: dict[str, Any] = {}
    if arch is not None:
        arch_props["aac:architecture"] = arch.TAG
        if isinstance(arch, RagArchitecture):
            arch_props.update({"aac:retrievalMethod": arch.retrieval_method,
                               "aac:embeddingModel": arch.embedding_model,
                               "aac:chunkingStrategy": arch.chunking_strategy})
        elif isinstance(arch, FineTuningArchitecture):
            arch_props.update({"aac:baseModel": arch.base_model,
                               "aac:fineTuningApproach": arch.approach,
                               "aac:trainingDataset": arch.dataset})
        elif isinstance(arch, AgenticArchitecture):
            arch_props.update({"aac:agentFramework": arch.framework,
                               "aac:agentTool": list(arch.tools),
                               "aac:orchestration": arch.orchestration})
    risk_refs = []
    for j, risk in enumerate(feas.risks):
        risk_id = _frag("risk", rid, j)
        risk_refs.append(ref(risk_id))
        b.add(risk_id, "aac:RiskRecord", name=risk.title, description=risk.description,
              **{"aac:riskCategory": risk.category, "aac:likelihood": risk.likelihood,
                 "aac:impact": risk.impact, "aac:mitigation": risk.mitigation,
                 "aac:riskStatus": risk.status})
    b.add(
        _frag("feasibility", rid), "aac:TaskFeasibility",
        **{
            "aac:trl": feas.trl,
            "aac:technicalRisk": feas.technical_risk,
            "aac:effortEstimate": feas.effort_estimate,
            "aac:algorithmSpec": feas.algorithm_spec,
            "aac:tool": list(feas.tools),
            "aac:modelSelection": feas.model_selection,
            "aac:modelCardId": feas.model_card_id,
            "aac:risk": risk_refs,
            **arch_props,
        },
    )


def _zip_time(ts: datetime) -> tuple[int, int, int, int, int, int]:
    if ts.tzinfo is not None:
        ts = ts.astimezone(timezone.utc)
    if not 1980 <= ts.year <= 2107:
        raise ValueError(f"timestamp {ts.isoformat()} cannot be stored in a ZIP archive")
    return (ts.year, ts.month, ts.day, ts.hour, ts.minute, ts.second - ts.second % 2)


def build_archive(files: list[tuple[str, bytes]], timestamp: datetime = DEFAULT_TIMESTAMP) -> bytes:
    """Uncompressed ZIP with fixed entry metadata so output depends only on input."""
    stamp = _zip_time(timestamp)
    buf = io.BytesIO()
    with zipfile.ZipFile(buf, "w", compression=zipfile.ZIP_STORED) as zf:
        for name, data in files:
            info = zipfile.ZipInfo(name, date_time=stamp)
            info.compress_type = zipfile.ZIP_STORED
            info.create_system = 3
            info.external_attr = 0o100644 << 16
            zf.writestr(info, data)
    return buf.getvalue()


def package_crate(canvas: Canvas, summary: BenefitSummary | None = None,
                  timestamp: datetime | None = None) -> bytes:
    """Export ``canvas`` as RO-Crate ZIP bytes.

    Refuses canvases with validation errors.  The archive is a pure function
    of its arguments; without ``timestamp`` every entry is stamped
    1980-01-01T00:00:00Z.
    """
    from .agents_md import render_agents_md
    from .preview import render_preview

    report = validate(canvas)
    if not report.valid:
        raise InvalidCanvasError(report)
    if summary is None:
        summary = aggregate_project(canvas)
    ts = timestamp or DEFAULT_TIMESTAMP
    if ts.tzinfo is None:
        ts = ts.replace(tzinfo=timezone.utc)
    published = ts.astimezone(timezone.utc).strftime("%Y-%m-%dT%H:%M:%SZ")
    graph = build_entity_graph(canvas, date_published=published)
    files = [
        (METADATA_FILE, graph.to_json().encode("utf-8")),
        (PREVIEW_FILE, render_preview(graph, summary).encode("utf-8")),
        (CANVAS_FILE, serialize_canvas(canvas).encode("utf-8")),
        (AGENTS_FILE, render_agents_md(canvas).encode("utf-8")),
    ]
    return build_archive(files, ts)
