"""Baseline Policy Card generation from a canvas.

Risks and dataset access rights become ABAC-style action rules, benefit
metrics become KPI thresholds and governance stages supply scope, policies
and references.  Every rule and threshold records the canvas pointer it came
from.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Any

from .crate_writer import InvalidCanvasError
from .model import Canvas, ComplianceReference, Value, dump_json, to_dict
from .validator import validate

EFFECTS = ("allow", "deny", "require_escalation")
PROFILE = "aac-baseline"

_CLOSED_RISK = ("mitigated", "resolved")


@dataclass(frozen=True)
class ActionRule:
    effect: str
    action: str
    condition: str
    source_kind: str
    source_path: str
    evidence: str | None = None

    def to_dict(self) -> dict[str, Any]:
        out: dict[str, Any] = {"effect": self.effect, "action": self.action,
                               "condition": self.condition}
        if self.evidence is not None:
            out["evidence"] = self.evidence
        out["source"] = {"kind": self.source_kind, "path": self.source_path}
        return out


@dataclass(frozen=True)
class KpiThreshold:
    metric: str
    target: Value
    direction: str | None
    critical_auto_fail: bool
    requirement_id: str
    metric_id: str
    source_path: str
    baseline: Value | None = None

    def to_dict(self) -> dict[str, Any]:
        out: dict[str, Any] = {"metric": self.metric}
        if self.baseline is not None:
            out["baseline"] = to_dict(self.baseline)
        out["target"] = to_dict(self.target)
        out["direction"] = self.direction
        out["critical_auto_fail"] = self.critical_auto_fail
        out["source"] = {"requirementId": self.requirement_id, "metricId": self.metric_id,
                         "path": self.source_path}
        return out


def _risk_rule(risk, req_id: str, path: str) -> ActionRule:
    title = risk.title or risk.category or "unnamed risk"
    action = f"operate {req_id} while exposed to {risk.category or 'unspecified'} risk: {title}"
    rating = f"likelihood {risk.likelihood}, impact {risk.impact}"
    if risk.status in _CLOSED_RISK:
        return ActionRule("allow", action, f"risk {risk.status} ({rating})", "risk", path,
                          evidence=risk.mitigation or "")
    if risk.impact == "critical":
        return ActionRule("deny", action, f"risk {risk.status or 'identified'} with critical impact",
                          "risk", path)
    if risk.likelihood in ("high", "critical"):
        return ActionRule("require_escalation", action,
                          f"risk {risk.status or 'identified'} with {risk.likelihood} likelihood",
                          "risk", path)
    # open but low-rated risks still yield a rule so every risk is accounted for
    return ActionRule("allow", action, f"monitor: risk {risk.status or 'identified'} ({rating})",
                      "risk", path)


def _duo(dataset) -> str:
    return f"; permitted uses {', '.join(dataset.duo_terms)}" if dataset.duo_terms else ""


def derive_action_rules(canvas: Canvas) -> list[ActionRule]:
    """Risks in canvas order, then datasets."""
    rules: list[ActionRule] = []
    for i, req in enumerate(canvas.requirements):
        if req.feasibility is None:
            continue
        for j, risk in enumerate(req.feasibility.risks):
            rules.append(_risk_rule(risk, req.id or f"requirement {i}",
                                    f"/requirements/{i}/feasibility/risks/{j}"))
    for k, d in enumerate(canvas.data_access.datasets):
        path = f"/dataAccess/datasets/{k}"
        if d.access_rights == "highly-restricted":
            rules.append(ActionRule(
                "deny", f"process dataset {d.id} without explicit authorisation",
                f"accessRights highly-restricted{_duo(d)}", "dataset", path))
        elif d.access_rights == "confidential":
            rules.append(ActionRule(
                "require_escalation", f"transmit dataset {d.id} to external services",
                f"accessRights confidential{_duo(d)}", "dataset", path))
    return rules


def derive_kpi_thresholds(canvas: Canvas) -> list[KpiThreshold]:
    """One threshold per benefit; must-have requirements auto-fail."""
    out: list[KpiThreshold] = []
    for i, req in enumerate(canvas.requirements):
        for j, b in enumerate(req.benefits):
            out.append(KpiThreshold(
                metric=b.label or b.metric_id or "",
                baseline=b.baseline,
                target=b.expected,
                direction=b.direction,
                critical_auto_fail=req.priority == "must-have",
                requirement_id=req.id or "",
                metric_id=b.metric_id or "",
                source_path=f"/requirements/{i}/benefits/{j}",
            ))
    return out


def _stakeholders(canvas: Canvas) -> list[dict[str, Any]]:
    seen: set[tuple[str, str]] = set()
    out = []
    for s, stage in enumerate(canvas.governance.stages):
        for a, agent in enumerate(stage.agents):
            key = (agent.kind or "", agent.ref or "")
            if key in seen:
                continue
            seen.add(key)
            name = agent.ref or ""
            if agent.kind == "person":
                person = canvas.person(agent.ref)
                if person is not None and person.name:
                    name = person.name
            out.append({"kind": agent.kind, "name": name, "ref": agent.ref,
                        "source": f"/governance/stages/{s}/agents/{a}"})
    return out


def _policies(canvas: Canvas) -> tuple[list[dict[str, Any]], list[str]]:
    policies: list[dict[str, Any]] = []
    tokens: list[str] = []
    for stage in canvas.governance.stages:
        for std in stage.compliance_standards:
            if isinstance(std, ComplianceReference):
                entry = {"framework": std.framework or "", "clauses": list(std.clauses),
                         "uri": std.uri or ""}
                tokens += [f"{std.framework}:{c}" for c in std.clauses]
            else:
                entry = {"framework": std, "clauses": [], "uri": ""}
            if entry not in policies:
                policies.append(entry)
    return policies, list(dict.fromkeys(tokens))


def _card_id(canvas: Canvas) -> str:
    title = (canvas.project.title or "canvas").lower()
    slug = "".join(c if c.isalnum() else "-" for c in title)
    slug = "-".join(filter(None, slug.split("-")))
    return f"{slug or 'canvas'}-policy-card"


def build_policy_card(canvas: Canvas) -> dict[str, Any]:
    """Policy Card as a dict in canonical key order."""
    report = validate(canvas)
    if not report.valid:
        raise InvalidCanvasError(report)
    policies, tokens = _policies(canvas)
    uris = [s.policy_card_uri for s in canvas.governance.stages if s.policy_card_uri]
    return {
        "id": _card_id(canvas),
        "profile": PROFILE,
        "version": canvas.canvas_version,
        "sourceCanvas": {"title": canvas.project.title, "canvasVersion": canvas.canvas_version},
        "scope": {"stakeholders": _stakeholders(canvas)},
        "applicable_policies": policies,
        "assurance_mapping": tokens,
        "controls": {"action_rules": [r.to_dict() for r in derive_action_rules(canvas)]},
        "kpis_thresholds": [k.to_dict() for k in derive_kpi_thresholds(canvas)],
        "references": {"policyCardUris": list(dict.fromkeys(uris))},
    }


def generate_policy_card(canvas: Canvas) -> str:
    """Canonical UTF-8 JSON text of the Policy Card."""
    return dump_json(build_policy_card(canvas))

