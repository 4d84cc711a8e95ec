"""
Heuristic navigator

Eine Heuristik pro Tarpit-Motiv: Plan aus dem Snapshot bauen, auf dem Device ausführen, Erfolg an
einer Signaturänderung messen. Nach drei erfolglosen Versuchen wird die App neu gestartet.
"""

from dataclasses import dataclass
from typing import Callable, Optional, Sequence

from tarpitnav.config import (
    AD_CLOSE_BAND,
    HEURISTIC_ACTION_MS,
    LABEL_SEARCH_FACTOR,
    MATCH_THRESHOLD,
    ONBOARDING_PAGES,
    TOP_N_HEURISTICS,
    WAIT_LONG_MS,
    WAIT_SHORT_MS,
)
from tarpitnav.device.actions import (
    ActionPlan,
    Back,
    DeviceAdapter,
    Restart,
    SelectOption,
    Tap,
    TapClickable,
    TapMatching,
    TypeText,
    UiAction,
    Wait,
)
from tarpitnav.errors import NoApplicableTarget
from tarpitnav.motifs.taxonomy import MotifLabel, MotifPrediction, tarpit_candidates
from tarpitnav.navigation.matcher import Lexicon, match
from tarpitnav.navigation.store import FormValueStore
from tarpitnav.screen.snapshot import ScreenSignature, TextSource, UiNode, UiSnapshot, signature
from tarpitnav.utils import Logger

logger = Logger().setup_logger(__file__)

HeuristicKind = MotifLabel

LOGIN_FIELDS = ("username", "email", "password")
LOGIN_BUTTONS = ("log in", "sign in", "submit")
ONBOARDING_BUTTONS = ("next", "continue", "skip", "done", "get started")
PLAYER_BUTTONS = ("settings", "share", "more")
AD_BUTTONS = ("close", "x", "dismiss", "skip ad")
FORM_BUTTONS = ("submit", "done", "save", "continue", "next")
SEARCH_FIELDS = ("search", "query", "find")
SEARCH_BUTTONS = ("search", "go")
QUERY_COLUMN = "query"


@dataclass(frozen=True)
class PlanContext:
    snapshot: UiSnapshot
    store: Optional[FormValueStore]
    lexicon: Optional[Lexicon]
    threshold: float = MATCH_THRESHOLD


### Target selection ###
def node_text(node: UiNode, snapshot: UiSnapshot) -> str:
    """Node label, else the recognizer text whose centre lies inside the node."""
    if node.label.strip():
        return node.label
    texts = [
        region.text
        for region in snapshot.text_regions
        if region.source is TextSource.EXTERNAL_RECOGNIZER and node.bounds.contains(*region.bounds.center)
    ]
    return " ".join(texts)


def intent_score(text: str, intents: Sequence[str], ctx: PlanContext) -> float:
    if not text.strip():
        return 0.0
    result = match(text, intents, ctx.lexicon, ctx.threshold)
    return result.score if result else 0.0


def find_intent_node(
    ctx: PlanContext, intents: Sequence[str], nodes: Optional[Sequence[UiNode]] = None
) -> Optional[UiNode]:
    """Best matching node (clickable nodes by default); document order on ties."""
    best, best_score = None, 0.0
    for node in ctx.snapshot.clickable_nodes if nodes is None else nodes:
        value = intent_score(node_text(node, ctx.snapshot), intents, ctx)
        if value > best_score:
            best, best_score = node, value
    return best


def smallest(nodes: Sequence[UiNode]) -> Optional[UiNode]:
    return min(nodes, key=lambda node: (node.bounds.area, node.node_id), default=None)


def tap_on(node: UiNode, snapshot: UiSnapshot) -> Tap:
    width, height = snapshot.screen_size
    x, y = node.bounds.center
    return Tap(min(max(x, 0), width - 1), min(max(y, 0), height - 1))


def label_for_field(node: UiNode, snapshot: UiSnapshot) -> str:
    """Field label, else the nearest label region above or left of it within 1.5x the field height."""
    if node.label.strip():
        return node.label
    reach = LABEL_SEARCH_FACTOR * node.bounds.height
    best, best_gap = "", None
    for region in snapshot.label_regions():
        box = region.bounds
        if box.bottom <= node.bounds.top and box.left < node.bounds.right and box.right > node.bounds.left:
            gap = node.bounds.top - box.bottom
        elif box.right <= node.bounds.left and box.top < node.bounds.bottom and box.bottom > node.bounds.top:
            gap = node.bounds.left - box.right
        else:
            continue
        if gap <= reach and (best_gap is None or gap < best_gap):
            best, best_gap = region.text, gap
    return best


def fields_top_down(snapshot: UiSnapshot) -> list[UiNode]:
    return sorted(snapshot.editable_nodes, key=lambda node: (node.bounds.top, node.bounds.left, node.node_id))


def field_score(node: UiNode, intents: Sequence[str], ctx: PlanContext) -> float:
    """Best intent score of the field's own text or the label next to it."""
    return max(
        intent_score(label_for_field(node, ctx.snapshot), intents, ctx),
        intent_score(node_text(node, ctx.snapshot), intents, ctx),
    )


def _type_into(node: UiNode, ctx: PlanContext, names: Sequence[str]) -> list[UiAction]:
    label = label_for_field(node, ctx.snapshot)
    result = match(label, names, ctx.lexicon, ctx.threshold) if label else None
    return [TypeText(node.node_id, ctx.store.next_value(result.candidate))] if result else []


def _pick_first_option(node: UiNode, ctx: PlanContext) -> list[UiAction]:
    return [tap_on(node, ctx.snapshot), Wait(WAIT_SHORT_MS), SelectOption(node.node_id, 0)]


def _fill(ctx: PlanContext, columns: Optional[Sequence[str]] = None, spinners: bool = False) -> list[UiAction]:
    """Top-down: TypeText for every field whose label resolves to a store column, first option of every spinner."""
    names = [name for name in ctx.store.names if columns is None or name in columns]
    controls = [node for node in ctx.snapshot.nodes if node.editable or (spinners and node.is_spinner)]
    actions: list[UiAction] = []
    for node in sorted(controls, key=lambda node: (node.bounds.top, node.bounds.left, node.node_id)):
        actions += _type_into(node, ctx, names) if node.editable else _pick_first_option(node, ctx)
    return actions


### Heuristics ###
def _require_store(ctx: PlanContext, kind: MotifLabel) -> FormValueStore:
    if ctx.store is None:
        raise ValueError(f"{kind.value}-Heuristik braucht einen FormValueStore")
    return ctx.store


def plan_log_in(ctx: PlanContext) -> list[UiAction]:
    _require_store(ctx, MotifLabel.LOG_IN)
    actions = _fill(ctx, LOGIN_FIELDS)
    button = find_intent_node(ctx, LOGIN_BUTTONS)
    if button is None:
        raise NoApplicableTarget("Kein Log-in-Button gefunden")
    return actions + [tap_on(button, ctx.snapshot)]


def plan_onboarding(ctx: PlanContext) -> list[UiAction]:
    if find_intent_node(ctx, ONBOARDING_BUTTONS) is None:
        raise NoApplicableTarget("Kein Weiter-Button gefunden")
    # jede Seite kann den Button verschieben: Ziel erst beim Ausführen bestimmen
    actions: list[UiAction] = []
    for page in range(ONBOARDING_PAGES):
        if page:
            actions.append(Wait(WAIT_SHORT_MS))
        actions.append(TapMatching(ONBOARDING_BUTTONS))
    return actions


def plan_player(ctx: PlanContext) -> list[UiAction]:
    clickable = ctx.snapshot.clickable_nodes
    matched = [
        node for node in clickable if intent_score(node_text(node, ctx.snapshot), PLAYER_BUTTONS, ctx) >= ctx.threshold
    ]
    target = smallest(matched) or smallest(clickable)
    if target is None:
        raise NoApplicableTarget("Keine klickbaren Knoten auf dem Player")
    return [tap_on(target, ctx.snapshot)]


def plan_advertisement(ctx: PlanContext) -> list[UiAction]:
    target = find_intent_node(ctx, AD_BUTTONS)
    if target is None:
        band = AD_CLOSE_BAND * ctx.snapshot.screen_size[1]
        target = smallest([node for node in ctx.snapshot.clickable_nodes if node.bounds.center[1] < band])
    if target is None:
        return [Back()]
    return [tap_on(target, ctx.snapshot)]


def plan_viewer(ctx: PlanContext) -> list[UiAction]:
    width, height = ctx.snapshot.screen_size
    return [Tap(width // 2, height // 2), Wait(WAIT_SHORT_MS), TapClickable()]


def plan_form(ctx: PlanContext) -> list[UiAction]:
    _require_store(ctx, MotifLabel.FORM)
    actions = _fill(ctx, spinners=True)
    button = find_intent_node(ctx, FORM_BUTTONS)
    if button is None and not actions:
        raise NoApplicableTarget("Weder befüllbare Felder noch Absende-Button gefunden")
    if button is not None:
        actions.append(tap_on(button, ctx.snapshot))
    return actions


def plan_web_browser(ctx: PlanContext) -> list[UiAction]:
    return [Back(), Wait(WAIT_LONG_MS)]


def plan_search(ctx: PlanContext) -> list[UiAction]:
    store = _require_store(ctx, MotifLabel.SEARCH)
    field_node, best = None, 0.0
    for node in fields_top_down(ctx.snapshot):
        value = field_score(node, SEARCH_FIELDS, ctx)
        if value > best:
            field_node, best = node, value
    if field_node is None:
        raise NoApplicableTarget("Kein Suchfeld gefunden")
    column = store.resolve(QUERY_COLUMN, ctx.lexicon, ctx.threshold)
    if column is None:
        raise NoApplicableTarget("Store hat keine Spalte für Suchbegriffe")
    others = [node for node in ctx.snapshot.clickable_nodes if node.node_id != field_node.node_id]
    button = find_intent_node(ctx, SEARCH_BUTTONS, others)
    return [
        TypeText(field_node.node_id, store.next_value(column)),
        tap_on(button or field_node, ctx.snapshot),
    ]


HEURISTICS: dict[MotifLabel, Callable[[PlanContext], list[UiAction]]] = {
    MotifLabel.LOG_IN: plan_log_in,
    MotifLabel.ONBOARDING: plan_onboarding,
    MotifLabel.PLAYER: plan_player,
    MotifLabel.ADVERTISEMENT: plan_advertisement,
    MotifLabel.VIEWER: plan_viewer,
    MotifLabel.FORM: plan_form,
    MotifLabel.WEB_BROWSER: plan_web_browser,
    MotifLabel.SEARCH: plan_search,
}


def build_plan(
    kind: HeuristicKind,
    snapshot: UiSnapshot,
    store: Optional[FormValueStore] = None,
    lexicon: Optional[Lexicon] = None,
    threshold: float = MATCH_THRESHOLD,
) -> ActionPlan:
    """Action plan of the heuristic for `kind`.

    Raises:
        NoApplicableTarget: nothing on the screen satisfies the heuristic's selector
    """
    if kind not in HEURISTICS:
        raise ValueError(f"Keine Heuristik für {kind}")
    actions = HEURISTICS[kind](PlanContext(snapshot, store, lexicon, threshold))
    return ActionPlan(kind, tuple(actions))


### Execution ###
def resolve(
    action: UiAction, device: DeviceAdapter, lexicon: Optional[Lexicon] = None, threshold: float = MATCH_THRESHOLD
) -> Optional[UiAction]:
    """Bind actions that depend on the current screen; None means skip."""
    if isinstance(action, TypeText):
        node = device.capture().find_node(action.node_id)
        if node is None or not node.editable:
            logger.warning(f"[Navigator] TypeText auf Knoten {action.node_id} übersprungen, Feld nicht mehr vorhanden")
            return None
    if isinstance(action, SelectOption):
        node = device.capture().find_node(action.node_id)
        if node is None or not node.is_spinner:
            logger.warning(f"[Navigator] Auswahl auf Knoten {action.node_id} übersprungen, kein Spinner mehr")
            return None
    if isinstance(action, TapClickable):
        snapshot = device.capture()
        clickable = snapshot.clickable_nodes
        return tap_on(clickable[0], snapshot) if clickable else Back()
    if isinstance(action, TapMatching):
        snapshot = device.capture()
        target = find_intent_node(PlanContext(snapshot, None, lexicon, threshold), action.intents)
        if target is None:
            logger.debug(f"[Navigator] Kein Knoten passt zu {list(action.intents)}, Tap übersprungen")
            return None
        return tap_on(target, snapshot)
    return action


def execute(
    plan: ActionPlan,
    device: DeviceAdapter,
    action_ms: int = HEURISTIC_ACTION_MS,
    lexicon: Optional[Lexicon] = None,
    threshold: float = MATCH_THRESHOLD,
) -> tuple[ScreenSignature, ScreenSignature, int]:
    """Run the plan; returns (signature before, signature after, actions performed)."""
    before = signature(device.capture())
    performed = 0
    for action in plan.actions:
        bound = resolve(action, device, lexicon, threshold)
        if bound is None:
            continue
        if isinstance(bound, Restart):
            device.restart()
        else:
            device.perform(bound)
        device.advance(action_ms)
        performed += 1
    after = signature(device.capture())
    return before, after, performed


@dataclass(frozen=True)
class Attempt:
    kind: HeuristicKind
    signature_before: ScreenSignature
    signature_after: ScreenSignature
    actions: int = 0
    applicable: bool = True

    @property
    def succeeded(self) -> bool:
        return self.signature_after != self.signature_before


@dataclass(frozen=True)
class NavigationOutcome:
    attempts: tuple[Attempt, ...]
    escalated_restart: bool
    predicted: Optional[MotifLabel] = None
    actions: int = 0

    @property
    def succeeded(self) -> bool:
        return any(attempt.succeeded for attempt in self.attempts)

    @property
    def escaped_with(self) -> Optional[MotifLabel]:
        return next((attempt.kind for attempt in self.attempts if attempt.succeeded), None)


def navigate(
    snapshot: UiSnapshot,
    prediction: MotifPrediction,
    device: DeviceAdapter,
    store: Optional[FormValueStore] = None,
    lexicon: Optional[Lexicon] = None,
    top_n: int = TOP_N_HEURISTICS,
    threshold: float = MATCH_THRESHOLD,
    action_ms: int = HEURISTIC_ACTION_MS,
) -> NavigationOutcome:
    """Try the heuristics of the top-n tarpit motifs until the screen changes, else restart the app.

    Args:
        snapshot (UiSnapshot): screen the detector fired on
        prediction (MotifPrediction): ranked motifs for that screen
        device (DeviceAdapter): device the plans run on
        store (FormValueStore): values for Form, LogIn and Search
        lexicon (Lexicon): synonyms for label matching
        top_n (int): heuristics tried before restarting
        threshold (float): matcher threshold
        action_ms (int): logical cost of one heuristic action

    Returns:
        NavigationOutcome: attempts in order; escalated_restart when none changed the screen
    """
    attempts: list[Attempt] = []
    actions = 0
    current = snapshot
    for kind in tarpit_candidates(prediction, top_n):
        try:
            plan = build_plan(kind, current, store, lexicon, threshold)
        except NoApplicableTarget as e:
            sig = signature(current)
            logger.info(f"[Navigator] {kind.value}: nicht anwendbar ({e})")
            attempts.append(Attempt(kind, sig, sig, 0, applicable=False))
            continue

        before, after, performed = execute(plan, device, action_ms, lexicon, threshold)
        actions += performed
        attempt = Attempt(kind, before, after, performed)
        attempts.append(attempt)
        logger.info(f"[Navigator] {kind.value}: {'erfolgreich' if attempt.succeeded else 'ohne Wirkung'}")
        if attempt.succeeded:
            break
        current = device.capture()

    escalated = not any(attempt.succeeded for attempt in attempts)
    if escalated:
        device.restart()
        device.advance(action_ms)
        actions += 1
        logger.info(f"[Navigator] {len(attempts)} Versuche ohne Erfolg, App wird neu gestartet")

    return NavigationOutcome(tuple(attempts), escalated, prediction.top, actions)
