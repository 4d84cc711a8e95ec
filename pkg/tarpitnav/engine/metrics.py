"""
Evaluation metrics over session reports
"""

from dataclasses import dataclass
from typing import Sequence, Union

from tarpitnav.engine.report import SessionReport
from tarpitnav.errors import MixedApps, ZeroBase
from tarpitnav.motifs.taxonomy import MOTIFS, TARPIT_MOTIFS

NOT_AVAILABLE = "n/a"
NO_ESCAPE = "none"


def set_union_coverage(reports: Sequence[SessionReport]) -> int:
    """Size of the union of covered screens and transitions over runs of one app.

    Raises:
        MixedApps: the reports belong to different apps
    """
    if not reports:
        raise ValueError("Keine Reports übergeben")
    apps = {report.app for report in reports}
    if len(apps) > 1:
        raise MixedApps(f"Reports stammen aus verschiedenen Apps: {', '.join(sorted(apps))}")
    screens = set().union(*(report.covered_screens for report in reports))
    transitions = set().union(*(report.covered_transitions for report in reports))
    return len(screens) + len(transitions)


@dataclass(frozen=True)
class CoverageSeries:
    values: tuple[float, ...]
    dt: float = 1.0

    def __post_init__(self):
        if len(self.values) < 2:
            raise ValueError("Eine Coverage-Reihe braucht mindestens zwei Punkte")
        if self.dt <= 0:
            raise ValueError(f"dt muss > 0 sein, erhalten: {self.dt}")
        if any(value < 0 for value in self.values):
            raise ValueError("Coverage-Werte dürfen nicht negativ sein")


def auc(series: CoverageSeries) -> float:
    """Trapezoid area under a uniformly sampled coverage curve."""
    values = series.values
    return sum(0.5 * (values[i - 1] + values[i]) * series.dt for i in range(1, len(values)))


def coverage_series(reports: Sequence[SessionReport]) -> CoverageSeries:
    """Cumulative union coverage after each run, starting at zero before the first."""
    values = [0]
    for i in range(1, len(reports) + 1):
        values.append(set_union_coverage(reports[:i]))
    return CoverageSeries(tuple(values))


def percent_increase(base: float, new: float) -> float:
    """Relative change in percent, one decimal.

    Raises:
        ZeroBase: base is not positive
    """
    if base <= 0:
        raise ZeroBase(f"Basiswert muss > 0 sein, erhalten: {base}")
    return round(100.0 * (new - base) / base, 1)


### Heuristics ###
@dataclass(frozen=True)
class SuccessRow:
    kind: str
    passed: int
    failed: int

    @property
    def total(self) -> int:
        return self.passed + self.failed

    @property
    def percent(self) -> Union[float, str]:
        return round(100.0 * self.passed / self.total, 1) if self.total else NOT_AVAILABLE

    def to_dict(self) -> dict:
        return {"kind": self.kind, "passed": self.passed, "failed": self.failed, "percent": self.percent}


@dataclass(frozen=True)
class HeuristicTable:
    rows: tuple[SuccessRow, ...]
    aggregate: SuccessRow

    def to_dict(self) -> dict:
        return {"rows": [row.to_dict() for row in self.rows], "aggregate": self.aggregate.to_dict()}

    def render(self) -> str:
        lines = [f"{'heuristic':<14}{'passed':>8}{'failed':>8}{'success':>10}"]
        for row in (*self.rows, self.aggregate):
            percent = f"{row.percent}%" if row.total else NOT_AVAILABLE
            lines.append(f"{row.kind:<14}{row.passed:>8}{row.failed:>8}{percent:>10}")
        return "\n".join(lines)


def heuristic_success_table(reports: Sequence[SessionReport]) -> HeuristicTable:
    """Passed and failed attempts per heuristic kind, in taxonomy order, plus the aggregate."""
    tally = {label.value: [0, 0] for label in MOTIFS if label in TARPIT_MOTIFS}
    for report in reports:
        for attempt in report.attempts:
            counts = tally.setdefault(attempt.kind, [0, 0])
            counts[0 if attempt.passed else 1] += 1
    rows = tuple(SuccessRow(kind, passed, failed) for kind, (passed, failed) in tally.items())
    aggregate = SuccessRow("all", sum(row.passed for row in rows), sum(row.failed for row in rows))
    return HeuristicTable(rows, aggregate)


def halt_table(reports: Sequence[SessionReport]) -> dict[str, int]:
    """Tarpit events per declared screen motif, in taxonomy order; motifs without events are left out."""
    counts: dict[str, int] = {}
    for report in reports:
        for event in report.tarpit_events:
            counts[event.motif] = counts.get(event.motif, 0) + 1
    order = {label.value: i for i, label in enumerate(MOTIFS)}
    return {motif: counts[motif] for motif in sorted(counts, key=lambda m: order.get(m, len(order)))}


def heuristic_confusion(reports: Sequence[SessionReport]) -> dict[str, dict[str, int]]:
    """Predicted top motif against the heuristic that escaped the tarpit (`none` after a restart)."""
    confusion: dict[str, dict[str, int]] = {}
    for report in reports:
        for event in report.tarpit_events:
            if event.predicted is None:
                continue
            row = confusion.setdefault(event.predicted, {})
            escaped = event.escaped_with or NO_ESCAPE
            row[escaped] = row.get(escaped, 0) + 1
    return confusion


def compare(base: Sequence[SessionReport], new: Sequence[SessionReport]) -> dict:
    """Union coverage, coverage AUC and their relative change between two groups of runs of one app."""
    set_union_coverage([*base, *new])
    base_union, new_union = set_union_coverage(base), set_union_coverage(new)
    base_auc, new_auc = auc(coverage_series(base)), auc(coverage_series(new))
    return {
        "app": base[0].app,
        "base": {"union": base_union, "auc": base_auc, "runs": len(base)},
        "new": {"union": new_union, "auc": new_auc, "runs": len(new)},
        "union_increase": percent_increase(base_union, new_union) if base_union > 0 else NOT_AVAILABLE,
        "auc_increase": percent_increase(base_auc, new_auc) if base_auc > 0 else NOT_AVAILABLE,
    }
