"""Self-contained HTML preview of an exported crate.

The page has no scripts and loads nothing external.  Every graph entity gets
an element whose ``id`` is the entity's ``@id`` so references can link to it.
The markup is also well-formed XML.
"""

from __future__ import annotations

from html import escape
from typing import Any
from urllib.parse import quote

from .benefits import BenefitSummary, format_amount
from .crate_writer import EntityGraph

SECTIONS = (
    ("project", "Project definition"),
    ("expectations", "User expectations"),
    ("feasibility", "Developer feasibility"),
    ("governance", "Governance staging"),
    ("data", "Data access and sensitivity"),
    ("outcomes", "Outcomes"),
)

# first matching type decides the section; anything else lands in "project"
_TYPE_SECTIONS = (
    ("frapo:FundingAgency", "project"),
    ("p-plan:Step", "expectations"),
    ("aac:BenefitMetric", "expectations"),
    ("aac:TaskFeasibility", "feasibility"),
    ("aac:RiskRecord", "feasibility"),
    ("prov:Activity", "governance"),
    ("aac:Milestone", "governance"),
    ("aac:ComplianceReference", "governance"),
    ("prov:Organization", "governance"),
    ("prov:SoftwareAgent", "governance"),
    ("dcat:Dataset", "data"),
    ("dcat:Distribution", "data"),
    ("DefinedTerm", "data"),
    ("DefinedTermSet", "data"),
    ("aac:Deliverable", "outcomes"),
    ("ScholarlyArticle", "outcomes"),
    ("aac:Evaluation", "outcomes"),
)

_STYLE = """
body { font-family: sans-serif; max-width: 60em; margin: 2em auto; color: #222; }
section { margin-bottom: 2em; }
div.entity { border: 1px solid #ccc; padding: 0.5em 1em; margin: 0.5em 0; }
table { border-collapse: collapse; }
th, td { text-align: left; padding: 0.2em 0.6em; vertical-align: top; }
.headline { font-size: 1.3em; font-weight: bold; }
"""


def _section_of(types: tuple[str, ...]) -> str:
    for type_name, section in _TYPE_SECTIONS:
        if type_name in types:
            return section
    return "project"


def _render_value(value: Any, internal: set[str]) -> str:
    if isinstance(value, list):
        return "<br/>".join(_render_value(v, internal) for v in value)
    if isinstance(value, dict) and "@id" in value:
        target = value["@id"]
        href = "#" + quote(target, safe="") if target in internal else target
        return f'<a href="{escape(href)}">{escape(target)}</a>'
    if isinstance(value, bool):
        return "yes" if value else "no"
    if isinstance(value, (int, float)):
        return escape(format_amount(value))
    return escape(str(value))


def _summary_table(summary: BenefitSummary) -> list[str]:
    out = [
        f'<p class="headline">Net time saved: '
        f"{escape(format_amount(summary.total_net_minutes_per_month))} min/month</p>",
        f"<p>One-off time saved: {escape(format_amount(summary.total_one_off_minutes))} min. "
        f"Rollup confidence: {escape(summary.rollup_confidence)}.</p>",
    ]
    if summary.rows:
        out.append("<table>")
        out.append("<tr><th>Requirement</th><th>Metric</th><th>Type</th><th>Basis</th>"
                   "<th>Net per basis</th><th>Monthly net</th><th>One-off net</th>"
                   "<th>Confidence</th></tr>")
        for row in summary.rows:
            def cell(n):
                if n is None:
                    return "qualitative" if row.qualitative else "-"
                return f"{format_amount(n.amount)} {n.unit or ''}".strip()
            values = (row.requirement_id, row.metric_id, row.type, row.aggregation_basis,
                      cell(row.net_per_basis), cell(row.monthly_net), cell(row.one_off_net),
                      row.confidence)
            out.append("<tr>" + "".join(f"<td>{escape(str(v or '-'))}</td>" for v in values)
                       + "</tr>")
        out.append("</table>")
    for (btype, unit), amount in summary.totals_by_type_and_unit.items():
        out.append(f"<p>{escape(btype)}: {escape(format_amount(amount))} {escape(unit)} per month</p>")
    for (btype, unit), amount in summary.one_off_totals_by_type_and_unit.items():
        out.append(f"<p>{escape(btype)}: {escape(format_amount(amount))} {escape(unit)} one-off</p>")
    return out


def render_preview(graph: EntityGraph, summary: BenefitSummary) -> str:
    """HTML page grouping graph entities by canvas dimension plus a benefit table."""
    internal = {e.id for e in graph.entities}
    grouped: dict[str, list[str]] = {key: [] for key, _ in SECTIONS}
    title = "Agentic Automation Canvas"
    root = graph.get("./")
    if root is not None and root.properties.get("name"):
        title = str(root.properties["name"])
    for entity in graph.entities:
        rows = [
            f"<tr><th>{escape(key)}</th><td>{_render_value(value, internal)}</td></tr>"
            for key, value in sorted(entity.properties.items())
        ]
        block = [
            f'<div class="entity" id="{escape(entity.id)}">',
            f"<h3>{escape(str(entity.properties.get('name', entity.id)))}</h3>",
            f"<p>{escape(', '.join(entity.types))} <code>{escape(entity.id)}</code></p>",
        ]
        if rows:
            block += ["<table>", *rows, "</table>"]
        block.append("</div>")
        grouped[_section_of(entity.types)].extend(block)

    lines = [
        "<!DOCTYPE html>",
        '<html lang="en">',
        "<head>",
        '<meta charset="utf-8"/>',
        f"<title>{escape(title)}</title>",
        f"<style>{_STYLE}</style>",
        "</head>",
        "<body>",
        f"<h1>{escape(title)}</h1>",
    ]
    for key, heading in SECTIONS:
        lines.append(f'<section id="section-{key}">')
        lines.append(f"<h2>{escape(heading)}</h2>")
        lines.extend(grouped[key] or ["<p>No entries.</p>"])
        lines.append("</section>")
    lines.append('<section id="section-benefits">')
    lines.append("<h2>Benefit summary</h2>")
    lines.extend(_summary_table(summary))
    lines.append("</section>")
    lines += ["</body>", "</html>"]
    return "\n".join(lines) + "\n"
