"""
Session reports

Kanonisches, sortiertes und versioniertes YAML ohne Zeitstempel, damit gleiche Läufe byte-identische
Reports ergeben.
"""

import os
from dataclasses import dataclass, field
from typing import Optional

from tarpitnav.config import ENCODING, REPORT_VERSION
from tarpitnav.errors import TarpitNavError
from tarpitnav.utils import dump_yaml, load_yaml, make_dir, nested_get


class ReportFormatError(TarpitNavError, ValueError):
    pass


@dataclass(frozen=True)
class AttemptRecord:
    kind: str
    passed: bool
    actions: int
    applicable: bool = True

    def to_dict(self) -> dict:
        return {"kind": self.kind, "passed": self.passed, "actions": self.actions, "applicable": self.applicable}


@dataclass(frozen=True)
class TarpitRecord:
    screen_id: str
    motif: str
    stuck_since: int
    fired_at: int
    predicted: Optional[str] = None
    attempts: tuple[AttemptRecord, ...] = ()
    escalated_restart: bool = False

    @property
    def escaped_with(self) -> Optional[str]:
        return next((attempt.kind for attempt in self.attempts if attempt.passed), None)

    def to_dict(self) -> dict:
        return {
            "screen_id": self.screen_id,
            "motif": self.motif,
            "stuck_since": self.stuck_since,
            "fired_at": self.fired_at,
            "predicted": self.predicted,
            "attempts": [attempt.to_dict() for attempt in self.attempts],
            "escalated_restart": self.escalated_restart,
        }

    @classmethod
    def from_dict(cls, data: dict) -> "TarpitRecord":
        return cls(
            str(data["screen_id"]),
            str(data["motif"]),
            int(data["stuck_since"]),
            int(data["fired_at"]),
            data.get("predicted"),
            tuple(
                AttemptRecord(str(a["kind"]), bool(a["passed"]), int(a["actions"]), bool(a.get("applicable", True)))
                for a in data.get("attempts") or []
            ),
            bool(data.get("escalated_restart", False)),
        )


@dataclass
class SessionReport:
    app: str
    seed: int
    navigator: bool
    coverage_universe: int
    covered_screens: set[str] = field(default_factory=set)
    covered_transitions: set[str] = field(default_factory=set)
    tarpit_events: list[TarpitRecord] = field(default_factory=list)
    explorer_actions: int = 0
    heuristic_actions: int = 0
    restarts: int = 0
    timeline: list[tuple[int, int]] = field(default_factory=list)

    @property
    def coverage(self) -> int:
        return len(self.covered_screens) + len(self.covered_transitions)

    @property
    def actions_performed(self) -> int:
        return self.explorer_actions + self.heuristic_actions

    @property
    def attempts(self) -> list[AttemptRecord]:
        return [attempt for event in self.tarpit_events for attempt in event.attempts]

    @property
    def heuristic_attempts(self) -> dict[str, dict[str, int]]:
        """Per heuristic kind: passed and failed attempts."""
        tally: dict[str, dict[str, int]] = {}
        for attempt in self.attempts:
            counts = tally.setdefault(attempt.kind, {"passed": 0, "failed": 0})
            counts["passed" if attempt.passed else "failed"] += 1
        return tally

    def to_dict(self) -> dict:
        return {
            "version": REPORT_VERSION,
            "app": self.app,
            "seed": self.seed,
            "navigator": self.navigator,
            "coverage": self.coverage,
            "coverage_universe": self.coverage_universe,
            "covered_screens": sorted(self.covered_screens),
            "covered_transitions": sorted(self.covered_transitions),
            "tarpit_events": [event.to_dict() for event in self.tarpit_events],
            "heuristic_attempts": self.heuristic_attempts,
            "actions_performed": self.actions_performed,
            "explorer_actions": self.explorer_actions,
            "heuristic_actions": self.heuristic_actions,
            "restarts": self.restarts,
            "timeline": [list(point) for point in self.timeline],
        }

    def to_yaml(self) -> str:
        return dump_yaml(self.to_dict())

    @classmethod
    def from_dict(cls, data: dict) -> "SessionReport":
        version = nested_get(data, ["version"]) if isinstance(data, dict) else None
        if version != REPORT_VERSION:
            raise ReportFormatError(f"Report-Version {version} wird nicht unterstützt")
        try:
            report = cls(
                _required(data, "app", str),
                _required(data, "seed", int),
                _required(data, "navigator", bool),
                _required(data, "coverage_universe", int),
                set(nested_get(data, ["covered_screens"], default=[])),
                set(nested_get(data, ["covered_transitions"], default=[])),
                [TarpitRecord.from_dict(event) for event in nested_get(data, ["tarpit_events"], default=[])],
                nested_get(data, ["explorer_actions"], int, 0),
                nested_get(data, ["heuristic_actions"], int, 0),
                nested_get(data, ["restarts"], int, 0),
                [(int(at), int(value)) for at, value in nested_get(data, ["timeline"], default=[])],
            )
        except (KeyError, TypeError, ValueError) as e:
            raise ReportFormatError(f"Report unvollständig oder fehlerhaft: {e}") from e
        if report.coverage != nested_get(data, ["coverage"], int, report.coverage):
            raise ReportFormatError("coverage passt nicht zu covered_screens + covered_transitions")
        return report


def _required(data: dict, key: str, cast_type: type):
    value = nested_get(data, [key], cast_type)
    if value is None:
        raise KeyError(key)
    return value


def save_report(report: SessionReport, path: str) -> None:
    make_dir(os.path.dirname(path))
    with open(path, "w", encoding=ENCODING) as file:
        file.write(report.to_yaml())


def load_report(path: str) -> SessionReport:
    return SessionReport.from_dict(load_yaml(path))
