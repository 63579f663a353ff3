"""Seeded generator of random valid canvases (as JSON documents)."""

from __future__ import annotations

import random
from typing import Any

from aac.model import canvas_from_dict
from aac.vocab import codes

TIME_UNITS = ("min", "minutes", "h", "hours", "hr")
OTHER_UNITS = ("EUR", "%", "errors", "tickets", "USD")
ARCH_TYPES = ("prompting", "rag", "fine-tuning", "agentic", "none")


def _amount(rng: random.Random, integer: bool, hi: int = 500) -> int | float:
    if integer:
        return rng.randint(0, hi)
    return round(rng.uniform(0, hi), rng.randint(1, 6))


def _benefit(rng: random.Random, metric_id: str, custom: bool, integer: bool) -> dict[str, Any]:
    btype = rng.choice(("time", "time", "quality", "risk", "enablement", "cost"))
    direction = rng.choice(("lower", "lower", "higher", "target", "boolean"))
    basis = rng.choice(("per-unit", "per-month", "one-off"))
    b: dict[str, Any] = {"type": btype, "metricId": metric_id}
    if custom:
        b["isCustom"] = True
    if rng.random() < 0.5:
        b["label"] = f"{btype} metric {metric_id}"
    b["direction"] = direction
    if direction == "boolean":
        b["baseline"] = False
        b["expected"] = True
    elif direction == "target" and rng.random() < 0.5:
        b["baseline"] = rng.choice(("low", "medium", "high"))
        b["expected"] = rng.choice(("low", "medium", "high"))
    elif direction in ("higher", "lower") and rng.random() < 0.15:
        b["baseline"] = rng.choice(("low", "medium"))
        b["expected"] = "high"
    else:
        unit = rng.choice(TIME_UNITS) if btype == "time" else rng.choice(OTHER_UNITS)
        if rng.random() < 0.3:
            b["valuesAreDelta"] = True
            b["expected"] = {"amount": _amount(rng, integer), "unit": unit}
        else:
            b["baseline"] = {"amount": _amount(rng, integer), "unit": unit}
            b["expected"] = {"amount": _amount(rng, integer), "unit": unit}
    b["aggregationBasis"] = basis
    if btype == "time":
        if rng.random() < 0.6:
            b["oversightMinutesPerUnit"] = _amount(rng, integer, 60)
        if rng.random() < 0.4:
            b["oversightMinutesPerMonth"] = _amount(rng, integer, 600)
    b["userConfidence"] = rng.choice(("low", "medium", "high"))
    b["developerConfidence"] = rng.choice(("low", "medium", "high"))
    if rng.random() < 0.3:
        b["assumptions"] = "steady demand"
    return b


def _feasibility(rng: random.Random) -> dict[str, Any]:
    f: dict[str, Any] = {}
    if rng.random() < 0.7:
        f["trl"] = rng.randint(1, 9)
    if rng.random() < 0.5:
        f["technicalRisk"] = rng.choice(("low", "medium", "high", "critical"))
    if rng.random() < 0.5:
        f["modelSelection"] = rng.choice(("open-source", "frontier-model", "fine-tuned", "custom", "none"))
    if rng.random() < 0.4:
        f["tools"] = [f"tool-{i}" for i in range(rng.randint(1, 3))]
    if rng.random() < 0.5:
        kind = rng.choice(ARCH_TYPES)
        arch: dict[str, Any] = {"type": kind}
        if kind == "rag":
            arch["retrievalMethod"] = "dense"
        elif kind == "agentic":
            arch["tools"] = ["search"]
            arch["framework"] = "custom loop"
        elif kind == "fine-tuning":
            arch["baseModel"] = "small-llm"
        f["architecture"] = arch
    risks = []
    for _ in range(rng.randint(0, 3)):
        risk = {
            "category": rng.choice(("technical", "data", "compliance", "operational", "ethical", "adoption")),
            "title": f"risk {rng.randint(0, 999)}",
            "likelihood": rng.choice(("low", "medium", "high", "critical")),
            "impact": rng.choice(("low", "medium", "high", "critical")),
            "status": rng.choice(("identified", "mitigated", "accepted", "resolved")),
        }
        if rng.random() < 0.6:
            risk["mitigation"] = "human review"
        risks.append(risk)
    if risks:
        f["risks"] = risks
    return f


def random_document(seed: int, *, max_requirements: int = 8, max_benefits: int = 3,
                    max_persons: int = 4, integer: bool | None = None,
                    extras: bool = True) -> dict[str, Any]:
    """A canvas document that validates without errors."""
    rng = random.Random(seed)
    if integer is None:
        integer = rng.random() < 0.5
    roles = codes("functional-roles")
    metrics = codes("benefit-metrics")
    duo = codes("duo")

    persons = []
    for i in range(rng.randint(0, max_persons)):
        p: dict[str, Any] = {"id": f"p{i}", "name": f"Person {i}"}
        if rng.random() < 0.4:
            p["orcid"] = f"0000-000{rng.randint(1, 9)}-{rng.randint(1000, 9999)}-{rng.randint(100, 999)}X"
        if rng.random() < 0.6:
            p["roles"] = rng.sample(roles, rng.randint(1, 2))
        if rng.random() < 0.3:
            p["affiliation"] = "Institute"
        persons.append(p)
    person_ids = [p["id"] for p in persons]

    requirements = []
    for i in range(rng.randint(0, max_requirements)):
        rid = f"r{i}"
        r: dict[str, Any] = {"id": rid, "title": f"Requirement {i}"}
        if rng.random() < 0.5:
            r["description"] = f"Automate step {i}."
        if rng.random() < 0.8:
            r["priority"] = rng.choice(("must-have", "should-have", "could-have", "wont-have"))
        if rng.random() < 0.8:
            r["status"] = rng.choice(("proposed", "accepted", "in-progress", "delivered", "rejected"))
        if rng.random() < 0.85:
            r["unitOfWork"] = "item"
            r["monthlyVolume"] = _amount(rng, integer, 400)
        n_benefits = rng.randint(0, max_benefits)
        chosen = rng.sample(metrics, min(n_benefits, len(metrics)))
        benefits = []
        for j, metric in enumerate(chosen):
            custom = rng.random() < 0.15
            benefits.append(_benefit(rng, f"custom-{j}" if custom else metric, custom, integer))
        if benefits:
            r["benefits"] = benefits
        if i and rng.random() < 0.4:
            r["dependsOn"] = sorted(rng.sample([f"r{k}" for k in range(i)], rng.randint(1, min(2, i))))
        if person_ids and rng.random() < 0.4:
            r["stakeholders"] = rng.sample(person_ids, 1)
        if rng.random() < 0.5:
            r["feasibility"] = _feasibility(rng)
        if extras and rng.random() < 0.1:
            r["x-tracker"] = {"ticket": f"T-{i}"}
        requirements.append(r)

    stages = []
    stage_names = codes("governance-stages")
    for i in range(rng.randint(0, 3)):
        s: dict[str, Any] = {"name": rng.choice(stage_names)}
        if rng.random() < 0.6:
            s["startDate"] = f"2026-0{i + 1}-01"
            if rng.random() < 0.7:
                s["endDate"] = f"2026-0{i + 1}-2{rng.randint(0, 8)}"
        agents = []
        if person_ids and rng.random() < 0.6:
            agents.append({"kind": "person", "ref": rng.choice(person_ids)})
        if rng.random() < 0.5:
            agents.append({"kind": "organization", "ref": rng.choice(("Acme Lab", "City Hospital"))})
        if rng.random() < 0.5:
            agents.append({"kind": "software", "ref": "assistant-bot"})
        if agents:
            s["agents"] = agents
        if rng.random() < 0.4:
            s["milestones"] = [{"title": f"Gate {i}", "kpis": ["time-per-unit"]}]
        standards: list[Any] = []
        if rng.random() < 0.5:
            standards.append({"framework": "NIST AI RMF", "clauses": ["GOVERN-1.1", "MAP-2.3"][: rng.randint(0, 2)]})
        if rng.random() < 0.4:
            standards.append(rng.choice(("EU AI Act", "ISO/IEC 42001")))
        if standards:
            s["complianceStandards"] = standards
        if rng.random() < 0.3:
            s["policyCardUri"] = f"https://example.org/cards/{i}.json"
        stages.append(s)

    datasets = []
    for i in range(rng.randint(0, 3)):
        d: dict[str, Any] = {
            "id": f"d{i}",
            "title": f"Dataset {i}",
            "accessRights": rng.choice(("open", "restricted", "confidential", "highly-restricted")),
        }
        if rng.random() < 0.5:
            d["duoTerms"] = rng.sample(duo, rng.randint(1, 2))
        if rng.random() < 0.3:
            d["personalData"] = True
        if rng.random() < 0.3:
            d["license"] = "CC-BY-4.0"
        datasets.append(d)

    doc: dict[str, Any] = {
        "schemaVersion": "0.13.1",
        "canvasVersion": f"{rng.randint(0, 3)}.{rng.randint(0, 20)}.{rng.randint(0, 9)}",
        "project": {
            "title": f"Project {seed}",
            "description": "Generated canvas.",
            "stage": rng.choice(("planning", "prototype", "deployment")),
        },
        "persons": persons,
        "requirements": requirements,
        "governance": {"stages": stages},
        "dataAccess": {"datasets": datasets},
    }
    if rng.random() < 0.5:
        doc["project"]["objectives"] = ["Save time", "Improve quality"][: rng.randint(1, 2)]
        doc["project"]["keywords"] = ["automation"]
    if rng.random() < 0.3:
        doc["project"]["funding"] = {"grantName": "Grant", "funderName": "Funder", "grantId": "G-1"}
    if rng.random() < 0.4:
        doc["feasibilityDefaults"] = {"trl": rng.randint(1, 9)}
    refs = [(r["id"], b["metricId"]) for r in requirements for b in r.get("benefits", [])]
    outcomes: dict[str, Any] = {}
    if refs and rng.random() < 0.5:
        rid, mid = rng.choice(refs)
        outcomes["evaluations"] = [{"metric": mid, "method": "pilot",
                                    "benefitRef": {"requirementId": rid, "metricId": mid}}]
    if rng.random() < 0.3:
        outcomes["deliverables"] = [{"title": "Prototype", "type": "software"}]
    if rng.random() < 0.3:
        outcomes["publications"] = [{"title": "Report", "doi": "10.1000/xyz"}]
    if outcomes:
        doc["outcomes"] = outcomes
    if extras and rng.random() < 0.2:
        doc["x-generator"] = {"seed": seed}
    return doc


def random_canvas(seed: int, **kw: Any):
    return canvas_from_dict(random_document(seed, **kw))
