"""AGENTS.md: the canvas contract rewritten as instructions for coding agents."""

from __future__ import annotations

from .benefits import format_amount
from .model import (
    AgenticArchitecture,
    Binary,
    Canvas,
    Categorical,
    ComplianceReference,
    FineTuningArchitecture,
    Numeric,
    RagArchitecture,
)
from .vocab import vocab_lookup

PRIORITY_SECTIONS = (
    ("must-have", "Requirements (must-have)"),
    ("should-have", "Requirements (should-have)"),
    ("could-have", "Requirements (could-have)"),
    ("wont-have", "Requirements (won't have this time)"),
    (None, "Requirements (unprioritised)"),
)

_DATA_RULES = {
    "highly-restricted": "Never transmit dataset `{id}` ({title}) to external services, "
                         "including hosted model APIs; process it only inside approved "
                         "environments and only with explicit authorisation.",
    "confidential": "Do not send dataset `{id}` ({title}) to external services without "
                    "escalating to a responsible person first.",
    "restricted": "Access dataset `{id}` ({title}) only through authorised credentials "
                  "and do not redistribute it.",
    "open": "Dataset `{id}` ({title}) is open; keep attribution and respect its license{license}.",
}

_DIRECTION_TEXT = {
    "higher": "higher is better",
    "lower": "lower is better",
    "target": "hit the stated target",
    "boolean": "achieved or not",
}


def _value(v) -> str:
    if isinstance(v, Numeric):
        return f"{format_amount(v.amount) if v.amount is not None else '?'} {v.unit or ''}".strip()
    if isinstance(v, Categorical):
        return v.level
    if isinstance(v, Binary):
        return "yes" if v.value else "no"
    return "?"


def _benefit_line(b) -> str:
    label = b.label or b.metric_id
    if b.values_are_delta:
        target = f"change of {_value(b.expected)}"
    elif b.baseline is not None:
        target = f"from {_value(b.baseline)} to {_value(b.expected)}"
    else:
        target = _value(b.expected)
    parts = [f"{label} ({b.type}, {_DIRECTION_TEXT.get(b.direction, b.direction)}): {target}"]
    if b.aggregation_basis:
        parts.append(b.aggregation_basis)
    oversight = []
    if b.oversight_minutes_per_unit:
        oversight.append(f"{format_amount(b.oversight_minutes_per_unit)} min/unit")
    if b.oversight_minutes_per_month:
        oversight.append(f"{format_amount(b.oversight_minutes_per_month)} min/month")
    if oversight:
        parts.append("human oversight " + " + ".join(oversight))
    return "; ".join(parts)


def _architecture(arch) -> str:
    if isinstance(arch, RagArchitecture):
        details = [("retrieval", arch.retrieval_method), ("embeddings", arch.embedding_model),
                   ("chunking", arch.chunking_strategy)]
    elif isinstance(arch, FineTuningArchitecture):
        details = [("base model", arch.base_model), ("approach", arch.approach),
                   ("dataset", arch.dataset)]
    elif isinstance(arch, AgenticArchitecture):
        details = [("framework", arch.framework), ("tools", ", ".join(arch.tools) or None),
                   ("orchestration", arch.orchestration)]
    else:
        details = []
    text = ", ".join(f"{k}: {v}" for k, v in details if v)
    return arch.TAG + (f" ({text})" if text else "")


def render_agents_md(canvas: Canvas) -> str:
    """Deterministic Markdown with a fixed section order."""
    p = canvas.project
    out = [f"# AGENTS.md: {p.title}", ""]
    out += [
        "This file is generated from the project's Agentic Automation Canvas "
        f"(version {canvas.canvas_version}). Treat it as the agreed contract between "
        "users and developers; propose canvas changes instead of silently diverging.",
        "",
        "## Project summary",
        "",
        p.description or "",
        "",
        f"- Stage: {p.stage}",
    ]
    if p.domain:
        out.append(f"- Domain: {p.domain}")
    if p.lead_organization:
        out.append(f"- Lead organisation: {p.lead_organization}")
    if p.value_summary and p.value_summary.headline_value_statement:
        out.append(f"- Value: {p.value_summary.headline_value_statement}")
    out.append("")

    out += ["## Objectives", ""]
    out += [f"- {o}" for o in p.objectives] or ["- None recorded."]
    out.append("")

    for priority, heading in PRIORITY_SECTIONS:
        reqs = [r for r in canvas.requirements
                if r.priority == priority or (priority is None and r.priority not in
                                              {k for k, _ in PRIORITY_SECTIONS if k})]
        if not reqs:
            continue
        out += [f"## {heading}", ""]
        for r in reqs:
            out.append(f"### {r.id}: {r.title}")
            out.append("")
            if r.user_story:
                out.append(f"> {r.user_story}")
                out.append("")
            if r.status:
                out.append(f"- Status: {r.status}")
            if r.unit_of_work:
                volume = ""
                if r.monthly_volume is not None:
                    volume = f", about {format_amount(r.monthly_volume)} per month"
                out.append(f"- Unit of work: {r.unit_of_work}{volume}")
            if r.target_population:
                out.append(f"- Target users: {r.target_population}")
            if r.depends_on:
                out.append(f"- Build after: {', '.join(r.depends_on)}")
            for b in r.benefits:
                out.append(f"- Benefit target: {_benefit_line(b)}")
            out.append("")

    out += ["## Feasibility constraints", ""]
    defaults = canvas.feasibility_defaults
    if defaults.trl is not None:
        out.append(f"- Project TRL: {defaults.trl}")
    if defaults.overall_technical_risk:
        out.append(f"- Overall technical risk: {defaults.overall_technical_risk}")
    for r in canvas.requirements:
        f = r.feasibility
        if f is None:
            continue
        facts = []
        if f.trl is not None:
            facts.append(f"TRL {f.trl}")
        if f.model_selection:
            facts.append(f"model: {f.model_selection}")
        if f.architecture is not None:
            facts.append(f"architecture: {_architecture(f.architecture)}")
        if f.tools:
            facts.append(f"tools: {', '.join(f.tools)}")
        out.append(f"- {r.id}: {'; '.join(facts) or 'no constraints recorded'}")
        for risk in f.risks:
            line = f"  - Risk ({risk.category}, likelihood {risk.likelihood}, impact {risk.impact}, {risk.status}): {risk.title}"
            if risk.mitigation:
                line += f". Mitigation: {risk.mitigation}"
            out.append(line)
    if out[-1] == "":
        out.append("- None recorded.")
    out.append("")

    out += ["## Governance and compliance", ""]
    stages = canvas.governance.stages
    for s in stages:
        window = " to ".join(d for d in (s.start_date, s.end_date) if d)
        out.append(f"- Stage gate: {s.name}" + (f" ({window})" if window else ""))
        for m in s.milestones:
            kpis = f" (KPIs: {', '.join(m.kpis)})" if m.kpis else ""
            out.append(f"  - Milestone: {m.title}{kpis}")
        for std in s.compliance_standards:
            if isinstance(std, ComplianceReference):
                clauses = f" {', '.join(std.clauses)}" if std.clauses else ""
                out.append(f"  - Comply with {std.framework}{clauses}")
            else:
                out.append(f"  - Comply with {std}")
        if s.policy_card_uri:
            out.append(f"  - Policy Card: {s.policy_card_uri}")
    if not stages:
        out.append("- None recorded.")
    out.append("")

    out += ["## Data handling rules", ""]
    datasets = canvas.data_access.datasets
    for d in datasets:
        template = _DATA_RULES.get(d.access_rights)
        if template:
            lic = f" ({d.license})" if d.license else ""
            out.append("- " + template.format(id=d.id, title=d.title, license=lic))
        if d.personal_data:
            out.append(f"- Dataset `{d.id}` contains personal data: minimise what you read, "
                       "never log raw records and keep derived outputs pseudonymised.")
        for code in d.duo_terms:
            term = vocab_lookup("duo", code)
            label = term.label if term else "unknown term"
            out.append(f"- Dataset `{d.id}` use condition {code}: {label}.")
    if not datasets:
        out.append("- None recorded.")
    return "\n".join(out) + "\n"
