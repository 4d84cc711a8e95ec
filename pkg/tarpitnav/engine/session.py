"""
Exploration session

Steuerschleife auf logischer Uhr: Random-Explorer treibt das Device, der Detector pollt jede Sekunde,
bei einem Tarpit übernimmt der Navigator. Während der Navigator arbeitet, wird der Explorer nicht
gefragt; seine Aktionen gehen verloren statt nachgeholt zu werden.
"""

from dataclasses import dataclass, field, replace
from typing import Optional, Sequence

from tarpitnav.config import (
    ACTION_BUDGET,
    ACTION_MIX,
    DEFAULT_CANVAS,
    DEFAULT_GRID,
    DEFAULT_LEXICON,
    DEFAULT_STORE,
    EXPLORE_ACTION_MS,
    HEURISTIC_ACTION_MS,
    MATCH_THRESHOLD,
    POLL_INTERVAL_MS,
    TOP_N_HEURISTICS,
    TRIGGER_MS,
    TRIGGER_SWEEP_MS,
)
from tarpitnav.device.explorer import RandomExplorer
from tarpitnav.device.sim import SimApp, SimDevice, load_app_file
from tarpitnav.engine.report import AttemptRecord, SessionReport, TarpitRecord
from tarpitnav.motifs.classifier import Predictor, load_model
from tarpitnav.motifs.taxonomy import MotifPrediction
from tarpitnav.navigation.detector import PollRecord, StuckDetector, TarpitEvent
from tarpitnav.navigation.matcher import Lexicon
from tarpitnav.navigation.navigator import NavigationOutcome, navigate
from tarpitnav.navigation.store import FormValueStore
from tarpitnav.screen.snapshot import UiSnapshot, signature
from tarpitnav.utils import Logger

logger = Logger().setup_logger(__file__)


@dataclass(frozen=True)
class SessionConfig:
    """Knobs of one exploration session. Paths are only read when the matching object is not passed in."""

    seed: int = 0
    action_budget: int = ACTION_BUDGET
    time_budget_ms: Optional[int] = None
    trigger_ms: int = TRIGGER_MS
    poll_interval_ms: int = POLL_INTERVAL_MS
    top_n: int = TOP_N_HEURISTICS
    threshold: float = MATCH_THRESHOLD
    explore_action_ms: int = EXPLORE_ACTION_MS
    heuristic_action_ms: int = HEURISTIC_ACTION_MS
    action_mix: tuple[float, float, float] = ACTION_MIX
    navigator_enabled: bool = True
    navigator_after_ms: int = 0
    oracle_motifs: bool = False
    canvas: tuple[int, int] = DEFAULT_CANVAS
    grid: int = DEFAULT_GRID
    app_path: Optional[str] = None
    model_path: Optional[str] = None
    lexicon_path: str = field(default=str(DEFAULT_LEXICON))
    store_path: str = field(default=str(DEFAULT_STORE))

    def __post_init__(self):
        if self.action_budget < 0:
            raise ValueError(f"action_budget muss >= 0 sein, erhalten: {self.action_budget}")
        if self.time_budget_ms is not None and self.time_budget_ms < 0:
            raise ValueError(f"time_budget_ms muss >= 0 sein, erhalten: {self.time_budget_ms}")
        if self.poll_interval_ms <= 0:
            raise ValueError(f"poll_interval_ms muss > 0 sein, erhalten: {self.poll_interval_ms}")
        if self.explore_action_ms <= 0 or self.heuristic_action_ms <= 0:
            raise ValueError("Aktionskosten müssen > 0 ms sein")
        if self.top_n < 1:
            raise ValueError(f"top_n muss >= 1 sein, erhalten: {self.top_n}")


class OraclePredictor:
    """Reads the motif the simulated app declares for its current screen."""

    def __init__(self, device: SimDevice):
        self.device = device

    def predict(self, snapshot: UiSnapshot) -> MotifPrediction:
        return MotifPrediction.certain(self.device.screen.motif)


def _tarpit_record(
    event: TarpitEvent, device: SimDevice, screen_id: str, outcome: Optional[NavigationOutcome]
) -> TarpitRecord:
    motif = device.app.screens[screen_id].motif.value
    if outcome is None:
        return TarpitRecord(screen_id, motif, event.stuck_since, event.fired_at)
    return TarpitRecord(
        screen_id,
        motif,
        event.stuck_since,
        event.fired_at,
        outcome.predicted.value if outcome.predicted else None,
        tuple(
            AttemptRecord(attempt.kind.value, attempt.succeeded, attempt.actions, attempt.applicable)
            for attempt in outcome.attempts
        ),
        outcome.escalated_restart,
    )


class Session:
    """One run of explorer, detector and navigator on a simulated device."""

    def __init__(
        self,
        config: SessionConfig,
        app: SimApp,
        predictor: Optional[Predictor] = None,
        store: Optional[FormValueStore] = None,
        lexicon: Optional[Lexicon] = None,
    ):
        self.config = config
        self.app = app
        self.store = store
        self.lexicon = lexicon
        self.device = SimDevice(app, store, lexicon, config.threshold)
        if config.oracle_motifs:
            predictor = OraclePredictor(self.device)
        if config.navigator_enabled and predictor is None:
            raise ValueError("Navigator braucht einen Predictor (Modell oder oracle_motifs)")
        self.predictor = predictor
        self.explorer = RandomExplorer(config.seed, config.action_mix)
        self.detector = StuckDetector(config.trigger_ms)
        self.next_poll = 0
        self.report = SessionReport(app.name, config.seed, config.navigator_enabled, app.coverage_universe)
        self._mark()

    ### Bookkeeping ###
    def _mark(self) -> None:
        coverage = self.device.coverage
        if not self.report.timeline or self.report.timeline[-1][1] != coverage:
            self.report.timeline.append((self.device.now_ms, coverage))

    def _out_of_budget(self) -> bool:
        if self.report.explorer_actions >= self.config.action_budget:
            return True
        budget = self.config.time_budget_ms
        return budget is not None and self.device.now_ms >= budget

    ### Loop ###
    def _poll(self) -> None:
        """Poll every pending interval up to the current clock; hands over to the navigator on a tarpit."""
        while self.next_poll <= self.device.now_ms:
            at = self.next_poll
            self.next_poll += self.config.poll_interval_ms
            snapshot = self.device.capture()
            event = self.detector.observe(PollRecord(signature(snapshot), at))
            if event is not None:
                self._handle(event, snapshot)
                return

    def _handle(self, event: TarpitEvent, snapshot: UiSnapshot) -> None:
        screen_id = self.device.current
        if not self.config.navigator_enabled or event.fired_at < self.config.navigator_after_ms:
            self.report.tarpit_events.append(_tarpit_record(event, self.device, screen_id, None))
            return

        prediction = self.predictor.predict(snapshot)
        outcome = navigate(
            snapshot,
            prediction,
            self.device,
            self.store,
            self.lexicon,
            self.config.top_n,
            self.config.threshold,
            self.config.heuristic_action_ms,
        )
        self.report.tarpit_events.append(_tarpit_record(event, self.device, screen_id, outcome))
        self.report.heuristic_actions += outcome.actions
        if outcome.escalated_restart:
            self.report.restarts += 1
        self.detector.reset()
        # nach der Navigation sofort wieder pollen
        self.next_poll = self.device.now_ms
        self._mark()

    def _explore(self) -> None:
        action = self.explorer.next_action(self.device.capture())
        self.device.perform(action)
        self.device.advance(self.config.explore_action_ms)
        self.report.explorer_actions += 1
        self._mark()

    def run(self) -> SessionReport:
        logger.info(
            f"[Session] Start '{self.app.name}' seed={self.config.seed} budget={self.config.action_budget} "
            f"navigator={'an' if self.config.navigator_enabled else 'aus'}"
        )
        while True:
            self._poll()
            if self._out_of_budget():
                break
            self._explore()

        self.report.covered_screens = set(self.device.covered_screens)
        self.report.covered_transitions = set(self.device.covered_transitions)
        self._mark()
        logger.info(
            f"[Session] Ende '{self.app.name}': Coverage {self.report.coverage}/{self.app.coverage_universe}, "
            f"{len(self.report.tarpit_events)} Tarpits, {self.report.actions_performed} Aktionen"
        )
        return self.report


def run_session(
    config: SessionConfig,
    app: Optional[SimApp] = None,
    predictor: Optional[Predictor] = None,
    store: Optional[FormValueStore] = None,
    lexicon: Optional[Lexicon] = None,
) -> SessionReport:
    """Run one session; anything not passed in is loaded from the config paths.

    Args:
        config (SessionConfig): budgets, seeds and switches
        app (SimApp, optional): simulated app, else `config.app_path`
        predictor (Predictor, optional): motif classifier, else `config.model_path`
        store (FormValueStore, optional): form values, else `config.store_path`
        lexicon (Lexicon, optional): synonyms, else `config.lexicon_path`

    Returns:
        SessionReport: coverage, tarpit events and heuristic tallies
    """
    if app is None:
        if config.app_path is None:
            raise ValueError("Keine App angegeben")
        app = load_app_file(config.app_path)
    if store is None:
        store = FormValueStore.load(config.store_path)
    if lexicon is None:
        lexicon = Lexicon.load(config.lexicon_path)
    if predictor is None and config.navigator_enabled and not config.oracle_motifs:
        if config.model_path is None:
            raise ValueError("Navigator braucht ein Modell (model_path) oder oracle_motifs")
        predictor = load_model(config.model_path)
    return Session(config, app, predictor, store, lexicon).run()


def sweep_trigger(
    config: SessionConfig,
    app: SimApp,
    triggers: Sequence[int] = TRIGGER_SWEEP_MS,
    predictor: Optional[Predictor] = None,
    store: Optional[FormValueStore] = None,
    lexicon: Optional[Lexicon] = None,
) -> list[dict]:
    """Run the same session once per trigger value; one summary row per run."""
    rows = []
    for trigger in triggers:
        report = run_session(replace(config, trigger_ms=int(trigger)), app, predictor, store, lexicon)
        escaped = sum(1 for event in report.tarpit_events if event.escaped_with is not None)
        rows.append(
            {
                "trigger_ms": int(trigger),
                "coverage": report.coverage,
                "tarpit_events": len(report.tarpit_events),
                "escaped": escaped,
                "restarts": report.restarts,
            }
        )
        logger.info(f"[Session] Sweep {trigger} ms: Coverage {report.coverage}, {len(report.tarpit_events)} Tarpits")
    return rows
