"""Benefit quantification: gross and net savings, volume weighting, project totals.

Time benefits are normalised to minutes.  Human oversight is subtracted from
gross time savings only; other benefit types aggregate as-is within identical
``(type, unit)`` pairs.  Negative nets are kept: oversight that costs more
than the automation saves is exactly what the numbers should show.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Any

from .model import Binary, BenefitMetric, Canvas, Categorical, Numeric

MINUTES = "min"

# unit name -> minutes per unit
TIME_UNITS = {
    "min": 1, "mins": 1, "minute": 1, "minutes": 1,
    "h": 60, "hr": 60, "hrs": 60, "hour": 60, "hours": 60,
}

_CONFIDENCE_ORDER = ("low", "medium", "high")


class GrossUndefinedError(ValueError):
    def __init__(self, message: str, requirement_id: str | None = None,
                 metric_id: str | None = None):
        self.requirement_id = requirement_id
        self.metric_id = metric_id
        context = ""
        if requirement_id is not None or metric_id is not None:
            context = f" (requirement {requirement_id!r}, metric {metric_id!r})"
        super().__init__(message + context)


@dataclass(frozen=True)
class Qualitative:
    """Marker for benefits that are listed rather than summed."""

    reason: str


@dataclass(frozen=True)
class NetTime:
    net_per_basis: float
    monthly_net: float | None = None
    one_off_net: float | None = None


@dataclass(frozen=True)
class BenefitComputation:
    requirement_id: str | None
    metric_id: str | None
    label: str | None
    type: str | None
    aggregation_basis: str | None
    gross_per_basis: Numeric | None
    net_per_basis: Numeric | None
    monthly_net: Numeric | None
    one_off_net: Numeric | None
    qualitative: bool
    confidence: str

    def to_dict(self) -> dict[str, Any]:
        def num(n: Numeric | None) -> Any:
            return None if n is None else {"amount": n.amount, "unit": n.unit}

        return {
            "requirementId": self.requirement_id,
            "metricId": self.metric_id,
            "label": self.label,
            "type": self.type,
            "aggregationBasis": self.aggregation_basis,
            "grossPerBasis": num(self.gross_per_basis),
            "netPerBasis": num(self.net_per_basis),
            "monthlyNet": num(self.monthly_net),
            "oneOffNet": num(self.one_off_net),
            "qualitative": self.qualitative,
            "confidence": self.confidence,
        }


@dataclass(frozen=True)
class BenefitSummary:
    rows: tuple[BenefitComputation, ...] = ()
    total_net_minutes_per_month: float = 0
    total_one_off_minutes: float = 0
    totals_by_type_and_unit: dict[tuple[str, str], float] = field(default_factory=dict)
    one_off_totals_by_type_and_unit: dict[tuple[str, str], float] = field(default_factory=dict)
    qualitative_benefits: tuple[tuple[str | None, str | None, str | None], ...] = ()
    rollup_confidence: str = "high"

    def to_dict(self) -> dict[str, Any]:
        def totals(table: dict[tuple[str, str], float]) -> list[dict[str, Any]]:
            return [{"type": t, "unit": u, "amount": v} for (t, u), v in table.items()]

        return {
            "totalNetMinutesPerMonth": self.total_net_minutes_per_month,
            "totalOneOffMinutes": self.total_one_off_minutes,
            "totalsByTypeAndUnit": totals(self.totals_by_type_and_unit),
            "oneOffTotalsByTypeAndUnit": totals(self.one_off_totals_by_type_and_unit),
            "qualitativeBenefits": [
                {"requirementId": r, "metricId": m, "label": lbl}
                for r, m, lbl in self.qualitative_benefits
            ],
            "rollupConfidence": self.rollup_confidence,
            "rows": [row.to_dict() for row in self.rows],
        }


def format_amount(value: float | int) -> str:
    if isinstance(value, float):
        if value.is_integer():
            return str(int(value))
        return f"{round(value, 6):.6f}".rstrip("0").rstrip(".")
    return str(value)


def confidence_of(benefit: BenefitMetric) -> str:
    """Weakest of the user and developer confidence; missing counts as low."""
    levels = [benefit.user_confidence, benefit.developer_confidence]
    ranks = [_CONFIDENCE_ORDER.index(c) if c in _CONFIDENCE_ORDER else 0 for c in levels]
    return _CONFIDENCE_ORDER[min(ranks)]


def _minutes(value: Numeric) -> float:
    factor = TIME_UNITS.get((value.unit or "").strip().lower())
    if factor is None:
        raise GrossUndefinedError(f"time benefit unit {value.unit!r} is not a time unit")
    return value.amount * factor


def gross_saving(benefit: BenefitMetric) -> Numeric | Qualitative:
    """Gross gain per aggregation basis.

    Time benefits come back in minutes.  Target/boolean directions and
    categorical or binary values yield a :class:`Qualitative` marker.
    """
    expected = benefit.expected
    if benefit.direction in ("target", "boolean"):
        return Qualitative(f"direction {benefit.direction}")
    if isinstance(expected, (Categorical, Binary)) or isinstance(benefit.baseline, (Categorical, Binary)):
        return Qualitative("non-numeric values")
    if expected is None or expected.amount is None:
        raise GrossUndefinedError("benefit has no numeric expected value")
    is_time = benefit.type == "time"
    unit = MINUTES if is_time else expected.unit

    def amount(v: Numeric) -> float:
        return _minutes(v) if is_time else v.amount

    if benefit.values_are_delta:
        return Numeric(amount(expected), unit)
    baseline = benefit.baseline
    if baseline is None or baseline.amount is None:
        raise GrossUndefinedError("absolute-valued benefit has no baseline")
    if benefit.direction == "lower":
        return Numeric(amount(baseline) - amount(expected), unit)
    if benefit.direction == "higher":
        return Numeric(amount(expected) - amount(baseline), unit)
    raise GrossUndefinedError(f"benefit direction {benefit.direction!r} has no gross value")


def net_time_benefit(benefit: BenefitMetric, monthly_volume: float) -> NetTime:
    """Net minutes after subtracting per-unit and per-month oversight."""
    gross = gross_saving(benefit)
    if benefit.type != "time" or not isinstance(gross, Numeric):
        raise GrossUndefinedError("net time benefit needs a numeric time benefit")
    per_unit = benefit.oversight_minutes_per_unit or 0
    per_month = benefit.oversight_minutes_per_month or 0
    basis = benefit.aggregation_basis
    if basis == "per-unit":
        net_unit = gross.amount - per_unit
        return NetTime(net_unit, monthly_net=net_unit * monthly_volume - per_month)
    if basis == "per-month":
        monthly = gross.amount - per_month - per_unit * monthly_volume
        return NetTime(monthly, monthly_net=monthly)
    if basis == "one-off":
        net = gross.amount - per_unit
        return NetTime(net, one_off_net=net)
    raise GrossUndefinedError(f"unknown aggregation basis {basis!r}")


def compute_benefit(benefit: BenefitMetric, monthly_volume: float,
                    requirement_id: str | None = None) -> BenefitComputation:
    common = dict(
        requirement_id=requirement_id,
        metric_id=benefit.metric_id,
        label=benefit.label,
        type=benefit.type,
        aggregation_basis=benefit.aggregation_basis,
        confidence=confidence_of(benefit),
    )
    try:
        gross = gross_saving(benefit)
        if isinstance(gross, Qualitative):
            return BenefitComputation(
                gross_per_basis=None, net_per_basis=None, monthly_net=None,
                one_off_net=None, qualitative=True, **common)
        if benefit.type == "time":
            net = net_time_benefit(benefit, monthly_volume)
            net_per_basis = net.net_per_basis
            monthly, one_off = net.monthly_net, net.one_off_net
        else:
            net_per_basis = gross.amount
            monthly = one_off = None
            if benefit.aggregation_basis == "per-unit":
                monthly = gross.amount * monthly_volume
            elif benefit.aggregation_basis == "per-month":
                monthly = gross.amount
            elif benefit.aggregation_basis == "one-off":
                one_off = gross.amount
            else:
                raise GrossUndefinedError(
                    f"unknown aggregation basis {benefit.aggregation_basis!r}")
    except GrossUndefinedError as exc:
        raise GrossUndefinedError(str(exc), requirement_id, benefit.metric_id) from exc
    unit = gross.unit
    return BenefitComputation(
        gross_per_basis=gross,
        net_per_basis=Numeric(net_per_basis, unit),
        monthly_net=None if monthly is None else Numeric(monthly, unit),
        one_off_net=None if one_off is None else Numeric(one_off, unit),
        qualitative=False,
        **common,
    )


def aggregate_project(canvas: Canvas) -> BenefitSummary:
    """Volume-weighted project totals over every non-rejected requirement.

    Rows are reduced in requirement order, then benefit order, so float
    totals are reproducible.
    """
    rows: list[BenefitComputation] = []
    total_monthly: float = 0
    total_one_off: float = 0
    by_unit: dict[tuple[str, str], float] = {}
    one_off_by_unit: dict[tuple[str, str], float] = {}
    qualitative = []
    confidence = len(_CONFIDENCE_ORDER) - 1
    for req in canvas.requirements:
        if req.status == "rejected":
            continue
        volume = req.monthly_volume or 0
        for benefit in req.benefits:
            row = compute_benefit(benefit, volume, req.id)
            rows.append(row)
            confidence = min(confidence, _CONFIDENCE_ORDER.index(row.confidence))
            if row.qualitative:
                qualitative.append((req.id, benefit.metric_id, benefit.label))
                continue
            if benefit.type == "time":
                if row.monthly_net is not None:
                    total_monthly += row.monthly_net.amount
                if row.one_off_net is not None:
                    total_one_off += row.one_off_net.amount
                continue
            key = (benefit.type, row.net_per_basis.unit)
            if row.monthly_net is not None:
                by_unit[key] = by_unit.get(key, 0) + row.monthly_net.amount
            if row.one_off_net is not None:
                one_off_by_unit[key] = one_off_by_unit.get(key, 0) + row.one_off_net.amount
    return BenefitSummary(
        rows=tuple(rows),
        total_net_minutes_per_month=total_monthly,
        total_one_off_minutes=total_one_off,
        totals_by_type_and_unit=by_unit,
        one_off_totals_by_type_and_unit=one_off_by_unit,
        qualitative_benefits=tuple(qualitative),
        rollup_confidence=_CONFIDENCE_ORDER[confidence],
    )


def _cell(n: Numeric | None) -> str:
    return "-" if n is None else f"{format_amount(n.amount)} {n.unit or ''}".rstrip()


def render_table(summary: BenefitSummary) -> str:
    """Aligned plain-text table of the summary rows and headline totals."""
    header = ("requirement", "metric", "type", "basis", "gross/basis",
              "net/basis", "monthly net", "one-off net", "confidence")
    body = [
        (
            row.requirement_id or "-",
            row.metric_id or "-",
            row.type or "-",
            row.aggregation_basis or "-",
            "qualitative" if row.qualitative else _cell(row.gross_per_basis),
            _cell(row.net_per_basis),
            _cell(row.monthly_net),
            _cell(row.one_off_net),
            row.confidence,
        )
        for row in summary.rows
    ]
    widths = [max(len(r[i]) for r in [header, *body]) for i in range(len(header))]
    lines = ["  ".join(c.ljust(w) for c, w in zip(r, widths)).rstrip() for r in [header, *body]]
    lines.append("")
    lines.append(f"Net time saved: {format_amount(summary.total_net_minutes_per_month)} min/month")
    lines.append(f"One-off time saved: {format_amount(summary.total_one_off_minutes)} min")
    for (btype, unit), amount in summary.totals_by_type_and_unit.items():
        lines.append(f"{btype} ({unit}): {format_amount(amount)} per month")
    for (btype, unit), amount in summary.one_off_totals_by_type_and_unit.items():
        lines.append(f"{btype} ({unit}): {format_amount(amount)} one-off")
    for rid, mid, label in summary.qualitative_benefits:
        lines.append(f"qualitative: {rid}/{mid} {label or ''}".rstrip())
    lines.append(f"Rollup confidence: {summary.rollup_confidence}")
    return "\n".join(lines) + "\n"
