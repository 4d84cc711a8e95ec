"""
Stuck detection

Laufzeit-Erkennung (1 Hz Polling, Trigger nach 10 s gleicher Signatur) und Offline-Extraktion von
Tarpits aus Explorations-Traces.
"""

import csv
from dataclasses import dataclass
from typing import Iterable, Optional

from tarpitnav.config import ENCODING, TRACE_MIN_ACTIONS, TRACE_MIN_MS, TRACE_TOP_K, TRIGGER_MS
from tarpitnav.errors import TimeRegression
from tarpitnav.screen.snapshot import ScreenSignature
from tarpitnav.utils import Logger

logger = Logger().setup_logger(__file__)

TRACE_FIELDS = ("screen_id", "action_kind", "at_ms")


@dataclass(frozen=True)
class PollRecord:
    signature: ScreenSignature
    at: int


@dataclass(frozen=True)
class TarpitEvent:
    signature: ScreenSignature
    stuck_since: int
    fired_at: int

    @property
    def dwell(self) -> int:
        return self.fired_at - self.stuck_since


@dataclass(frozen=True)
class TraceStep:
    screen_id: str
    action: str
    at: int


class StuckDetector:
    """Fires once per continuous same-signature interval of at least `trigger_ms`."""

    def __init__(self, trigger_ms: int = TRIGGER_MS):
        if trigger_ms < 0:
            raise ValueError(f"trigger_ms muss >= 0 sein, erhalten: {trigger_ms}")
        self.trigger_ms = trigger_ms
        self.last_at: Optional[int] = None
        self.reset()

    def reset(self) -> None:
        """Forget the current interval; the next record starts a fresh one."""
        self.signature: Optional[ScreenSignature] = None
        self.stuck_since: Optional[int] = None
        self.fired = False

    def observe(self, record: PollRecord) -> Optional[TarpitEvent]:
        if self.last_at is not None and record.at < self.last_at:
            raise TimeRegression(f"Poll bei {record.at} ms liegt vor dem letzten Poll bei {self.last_at} ms")
        self.last_at = record.at

        if record.signature != self.signature or self.stuck_since is None:
            self.signature = record.signature
            self.stuck_since = record.at
            self.fired = False

        if not self.fired and record.at - self.stuck_since >= self.trigger_ms:
            self.fired = True
            event = TarpitEvent(record.signature, self.stuck_since, record.at)
            logger.info(
                f"[Detector] Tarpit auf {record.signature} seit {self.stuck_since} ms, ausgelöst bei {record.at} ms"
            )
            return event
        return None


def observe_stream(records: Iterable[PollRecord], trigger_ms: int = TRIGGER_MS) -> list[TarpitEvent]:
    detector = StuckDetector(trigger_ms)
    return [event for event in (detector.observe(record) for record in records) if event is not None]


### Trace extraction ###
def same_screen_runs(trace: list[TraceStep]) -> list[tuple[str, int, int]]:
    """Maximal runs of consecutive steps on one screen as (screen_id, action count, span ms)."""
    runs = []
    start = 0
    for i in range(1, len(trace) + 1):
        if i == len(trace) or trace[i].screen_id != trace[start].screen_id:
            runs.append((trace[start].screen_id, i - start, trace[i - 1].at - trace[start].at))
            start = i
    return runs


def dwell_times(trace: list[TraceStep]) -> dict[str, int]:
    """Total time per screen; a step lasts until the next step, the last step lasts 0 ms."""
    dwell: dict[str, int] = {}
    for i, step in enumerate(trace):
        duration = trace[i + 1].at - step.at if i + 1 < len(trace) else 0
        dwell[step.screen_id] = dwell.get(step.screen_id, 0) + duration
    return dwell


def extract_tarpits(
    trace: list[TraceStep],
    min_actions: int = TRACE_MIN_ACTIONS,
    min_ms: int = TRACE_MIN_MS,
    top_k: int = TRACE_TOP_K,
) -> set[str]:
    """Union of screens with a long repetitive run and the top_k screens by dwell time.

    Args:
        trace (list[TraceStep]): time-ordered exploration trace
        min_actions (int): minimal actions in one maximal same-screen run
        min_ms (int): minimal span of that run
        top_k (int): number of screens taken by total dwell time (ties by screen id)

    Returns:
        set[str]: tarpit screen ids
    """
    if not trace:
        return set()
    for previous, step in zip(trace, trace[1:]):
        if step.at < previous.at:
            raise TimeRegression(f"Trace nicht zeitlich sortiert bei {step.screen_id}@{step.at}")

    repetitive = {
        screen_id for screen_id, count, span in same_screen_runs(trace) if count >= min_actions and span >= min_ms
    }
    ranked = sorted(dwell_times(trace).items(), key=lambda item: (-item[1], item[0]))
    longest = {screen_id for screen_id, _ in ranked[: max(top_k, 0)]}

    logger.debug(f"[Detector] Trace mit {len(trace)} Schritten: {len(repetitive)} repetitiv, {len(longest)} nach Zeit")
    return repetitive | longest


def read_trace(path: str) -> list[TraceStep]:
    """Read `screen_id,action_kind,at_ms` records; a header line is optional."""
    steps = []
    with open(path, "r", encoding=ENCODING, newline="") as file:
        for row_no, row in enumerate(csv.reader(file), start=1):
            if not row or not "".join(row).strip():
                continue
            if row_no == 1 and tuple(value.strip() for value in row) == TRACE_FIELDS:
                continue
            if len(row) != 3:
                raise ValueError(f"{path}:{row_no}: erwartet 3 Felder, erhalten {len(row)}")
            try:
                at = int(row[2].strip())
            except ValueError as e:
                raise ValueError(f"{path}:{row_no}: at_ms '{row[2]}' ist keine Ganzzahl") from e
            steps.append(TraceStep(row[0].strip(), row[1].strip(), at))
    return steps


def write_trace(trace: Iterable[TraceStep], path: str) -> None:
    with open(path, "w", encoding=ENCODING, newline="") as file:
        writer = csv.writer(file)
        writer.writerow(TRACE_FIELDS)
        writer.writerows((step.screen_id, step.action, step.at) for step in trace)
