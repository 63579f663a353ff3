"""Agentic Automation Canvas: model, validation, benefits, RO-Crate export and Policy Cards."""

from __future__ import annotations

from .benefits import BenefitSummary, aggregate_project, net_time_benefit
from .crate_reader import extract_canvas, verify_profile
from .crate_writer import build_entity_graph, package_crate
from .model import Canvas, ParseError, parse_canvas, serialize_canvas
from .policy import derive_action_rules, derive_kpi_thresholds, generate_policy_card
from .validator import ValidationReport, validate
from .versioning import ChangeSet, bump, diff, suggest_bump
from .vocab import vocab_lookup

__version__ = "0.1.0"

__all__ = [
    "BenefitSummary",
    "Canvas",
    "ChangeSet",
    "ParseError",
    "ValidationReport",
    "aggregate_project",
    "build_entity_graph",
    "bump",
    "derive_action_rules",
    "derive_kpi_thresholds",
    "diff",
    "extract_canvas",
    "generate_policy_card",
    "net_time_benefit",
    "package_crate",
    "parse_canvas",
    "serialize_canvas",
    "suggest_bump",
    "validate",
    "verify_profile",
    "vocab_lookup",
]
