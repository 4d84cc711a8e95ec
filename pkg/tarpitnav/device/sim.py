"""
Simulated device

Skriptbare Apps aus YAML: Screens mit Knoten-Templates und bewachte Übergänge (guards). Der SimDevice
ist ein deterministischer Automat mit logischer Uhr, Coverage-Buchhaltung und Trace.

App-Spec (YAML):
    app: name
    screen_size: [1080, 1920]
    start: <screen id>
    screens:
      - id, motif, activity, window (optional), nodes (verschachtelt, `key` für Guards), regions (optional)
    transitions:
      - from, to, guard: {tap: key} | {typed_and_submit: {fields: {key: column}, selected: [key], submit: key}}
                         | back
                         | {sequence: [guard, ...]}
"""

from dataclasses import dataclass, field
from typing import Any, Optional, Union

from tarpitnav.config import DEFAULT_SCREEN_SIZE, MATCH_THRESHOLD
from tarpitnav.device.actions import (
    Back,
    Restart,
    SelectOption,
    Tap,
    TapClickable,
    TapMatching,
    TypeText,
    UiAction,
    Wait,
)
from tarpitnav.errors import DeviceError, SpecError, TarpitNavError
from tarpitnav.motifs.taxonomy import MotifLabel
from tarpitnav.navigation.detector import TraceStep
from tarpitnav.navigation.matcher import Lexicon
from tarpitnav.navigation.store import FormValueStore
from tarpitnav.screen.snapshot import Bounds, TextRegion, TextSource, UiNode, UiSnapshot, parse_bounds
from tarpitnav.utils import Logger, load_yaml, nested_get

logger = Logger().setup_logger(__file__)


### Guards ###
@dataclass(frozen=True)
class TapNode:
    node_id: int


@dataclass(frozen=True)
class TypedAndSubmit:
    fields: tuple[tuple[int, str], ...]
    submit: int
    selected: tuple[int, ...] = ()


@dataclass(frozen=True)
class BackPress:
    pass


@dataclass(frozen=True)
class SequenceOf:
    guards: tuple["Guard", ...]


Guard = Union[TapNode, TypedAndSubmit, BackPress, SequenceOf]


@dataclass(frozen=True)
class SimScreen:
    screen_id: str
    motif: MotifLabel
    root: UiNode
    regions: tuple[TextRegion, ...] = ()
    activity: str = ""
    window: str = ""
    keys: dict[str, int] = field(default_factory=dict, hash=False, compare=False)

    def node(self, node_id: int) -> Optional[UiNode]:
        return next((node for node in self.root.iter() if node.node_id == node_id), None)


@dataclass(frozen=True)
class SimTransition:
    index: int
    source: str
    target: str
    guard: Guard

    @property
    def transition_id(self) -> str:
        return f"{self.index}:{self.source}->{self.target}"


@dataclass(frozen=True)
class SimApp:
    name: str
    screens: dict[str, SimScreen] = field(hash=False)
    transitions: tuple[SimTransition, ...]
    start: str
    screen_size: tuple[int, int] = DEFAULT_SCREEN_SIZE

    @property
    def coverage_universe(self) -> int:
        return len(self.screens) + len(self.transitions)

    def outgoing(self, screen_id: str) -> list[SimTransition]:
        return [transition for transition in self.transitions if transition.source == screen_id]


### Loading ###
def _require(mapping: Any, key: str, path: str) -> Any:
    if not isinstance(mapping, dict):
        raise SpecError(path, "Mapping erwartet")
    if key not in mapping or mapping[key] is None:
        raise SpecError(f"{path}.{key}", "Pflichtfeld fehlt")
    return mapping[key]


def _bounds(value: Any, path: str) -> Bounds:
    try:
        if isinstance(value, (list, tuple)) and len(value) == 4:
            return Bounds(*(int(v) for v in value))
        return parse_bounds(str(value))
    except (TarpitNavError, ValueError, TypeError) as e:
        raise SpecError(path, str(e)) from e


def _flag(value: Any) -> bool:
    return value is True or str(value).strip().lower() == "true"


def _build_nodes(spec: Any, ancestor: str, counter: list[int], keys: dict[str, int], path: str) -> UiNode:
    class_name = str(_require(spec, "class", path))
    node_id = counter[0]
    counter[0] += 1
    key = spec.get("key")
    if key is not None:
        if str(key) in keys:
            raise SpecError(f"{path}.key", f"Key '{key}' ist doppelt")
        keys[str(key)] = node_id

    children_spec = spec.get("children") or []
    if not isinstance(children_spec, list):
        raise SpecError(f"{path}.children", "Liste erwartet")
    children = tuple(
        _build_nodes(child, class_name, counter, keys, f"{path}.children[{i}]") for i, child in enumerate(children_spec)
    )
    editable = _flag(spec["editable"]) if "editable" in spec else class_name.endswith("EditText")
    return UiNode(
        node_id,
        class_name,
        ancestor,
        str(spec.get("text") or spec.get("content-desc") or ""),
        _bounds(_require(spec, "bounds", path), f"{path}.bounds"),
        _flag(spec.get("clickable", False)),
        editable,
        children,
    )


def _build_screen(spec: Any, path: str) -> SimScreen:
    screen_id = str(_require(spec, "id", path))
    try:
        motif = MotifLabel.parse(_require(spec, "motif", path))
    except ValueError as e:
        raise SpecError(f"{path}.motif", str(e)) from e
    keys: dict[str, int] = {}
    root = _build_nodes(_require(spec, "nodes", path), "", [0], keys, f"{path}.nodes")

    regions = []
    for i, region in enumerate(nested_get(spec, ["regions"], default=[])):
        region_path = f"{path}.regions[{i}]"
        text = str(_require(region, "text", region_path))
        if not text.strip():
            raise SpecError(f"{region_path}.text", "leerer Text")
        regions.append(TextRegion(text, _bounds(_require(region, "bounds", region_path), f"{region_path}.bounds")))
    return SimScreen(
        screen_id,
        motif,
        root,
        tuple(regions),
        nested_get(spec, ["activity"], str, f"{screen_id}Activity"),
        nested_get(spec, ["window"], str, screen_id),
        keys,
    )


def _node_key(screen: SimScreen, key: Any, path: str) -> int:
    if isinstance(key, int) and not isinstance(key, bool):
        if screen.node(key) is None:
            raise SpecError(path, f"Knoten {key} existiert nicht auf Screen '{screen.screen_id}'")
        return key
    if str(key) not in screen.keys:
        raise SpecError(path, f"Key '{key}' existiert nicht auf Screen '{screen.screen_id}'")
    return screen.keys[str(key)]


def _build_guard(spec: Any, screen: SimScreen, path: str) -> Guard:
    if spec == "back":
        return BackPress()
    if not isinstance(spec, dict) or len(spec) != 1:
        raise SpecError(path, "Guard muss 'back' oder ein Mapping mit genau einem Eintrag sein")
    kind, value = next(iter(spec.items()))
    if kind == "tap":
        return TapNode(_node_key(screen, value, f"{path}.tap"))
    if kind == "back":
        return BackPress()
    if kind == "typed_and_submit":
        fields_spec = _require(value, "fields", f"{path}.typed_and_submit")
        if not isinstance(fields_spec, dict) or not fields_spec:
            raise SpecError(f"{path}.typed_and_submit.fields", "nicht-leeres Mapping erwartet")
        fields = []
        for key, column in fields_spec.items():
            field_path = f"{path}.typed_and_submit.fields.{key}"
            node_id = _node_key(screen, key, field_path)
            if not screen.node(node_id).editable:
                raise SpecError(field_path, f"Knoten '{key}' ist nicht editierbar")
            fields.append((node_id, str(column)))
        submit_key = _require(value, "submit", f"{path}.typed_and_submit")
        submit = _node_key(screen, submit_key, f"{path}.typed_and_submit.submit")
        spinners = nested_get(value, ["selected"], default=[])
        if not isinstance(spinners, list):
            raise SpecError(f"{path}.typed_and_submit.selected", "Liste erwartet")
        selected = []
        for i, key in enumerate(spinners):
            spinner_path = f"{path}.typed_and_submit.selected[{i}]"
            node_id = _node_key(screen, key, spinner_path)
            if not screen.node(node_id).is_spinner:
                raise SpecError(spinner_path, f"Knoten '{key}' ist kein Spinner")
            selected.append(node_id)
        return TypedAndSubmit(tuple(fields), submit, tuple(selected))
    if kind == "sequence":
        if not isinstance(value, list) or not value:
            raise SpecError(f"{path}.sequence", "nicht-leere Liste erwartet")
        return SequenceOf(tuple(_build_guard(item, screen, f"{path}.sequence[{i}]") for i, item in enumerate(value)))
    raise SpecError(path, f"Unbekannter Guard-Typ '{kind}'")


def load_app(spec: dict) -> SimApp:
    """Validate an app-spec mapping into a SimApp.

    Raises:
        SpecError: with the path of the offending element
    """
    if not isinstance(spec, dict):
        raise SpecError("$", "App-Spec muss ein Mapping sein")
    name = str(_require(spec, "app", "$"))
    size = nested_get(spec, ["screen_size"], default=list(DEFAULT_SCREEN_SIZE))
    if not isinstance(size, (list, tuple)) or len(size) != 2 or min(int(v) for v in size) <= 0:
        raise SpecError("$.screen_size", "zwei positive Ganzzahlen erwartet")

    screens_spec = _require(spec, "screens", "$")
    if not isinstance(screens_spec, list) or not screens_spec:
        raise SpecError("$.screens", "nicht-leere Liste erwartet")
    screens: dict[str, SimScreen] = {}
    for i, screen_spec in enumerate(screens_spec):
        screen = _build_screen(screen_spec, f"$.screens[{i}]")
        if screen.screen_id in screens:
            raise SpecError(f"$.screens[{i}].id", f"Screen '{screen.screen_id}' ist doppelt")
        screens[screen.screen_id] = screen

    start = str(_require(spec, "start", "$"))
    if start not in screens:
        raise SpecError("$.start", f"Unbekannter Screen '{start}'")

    transitions = []
    for i, transition in enumerate(nested_get(spec, ["transitions"], default=[])):
        path = f"$.transitions[{i}]"
        source, target = str(_require(transition, "from", path)), str(_require(transition, "to", path))
        if source not in screens:
            raise SpecError(f"{path}.from", f"Unbekannter Screen '{source}'")
        if target not in screens:
            raise SpecError(f"{path}.to", f"Unbekannter Screen '{target}'")
        guard = _build_guard(_require(transition, "guard", path), screens[source], f"{path}.guard")
        transitions.append(SimTransition(i, source, target, guard))

    return SimApp(name, screens, tuple(transitions), start, (int(size[0]), int(size[1])))


def load_app_file(path: str) -> SimApp:
    try:
        spec = load_yaml(path)
    except OSError as e:
        raise SpecError(str(path), f"App-Spec nicht lesbar: {e}") from e
    app = load_app(spec)
    logger.debug(f"[Sim] App '{app.name}' geladen: {len(app.screens)} Screens, {len(app.transitions)} Übergänge")
    return app


### Device ###
class SimDevice:
    """Deterministic simulated device for one app; implements the DeviceAdapter contract."""

    def __init__(
        self,
        app: SimApp,
        store: Optional[FormValueStore] = None,
        lexicon: Optional[Lexicon] = None,
        threshold: float = MATCH_THRESHOLD,
    ):
        self.app = app
        self.store = store
        self.lexicon = lexicon
        self.threshold = threshold
        self.now_ms = 0
        self.trace: list[TraceStep] = []
        self.covered_screens: set[str] = set()
        self.covered_transitions: set[str] = set()
        self._enter(app.start)

    ### State ###
    def _enter(self, screen_id: str) -> None:
        self.current = screen_id
        self.typed: dict[int, str] = {}
        self.selected: dict[int, int] = {}
        self.progress: dict[int, int] = {}
        self.covered_screens.add(screen_id)

    @property
    def screen(self) -> SimScreen:
        return self.app.screens[self.current]

    @property
    def coverage(self) -> int:
        return len(self.covered_screens) + len(self.covered_transitions)

    def capture(self) -> UiSnapshot:
        screen = self.screen
        return UiSnapshot(
            screen.root, screen.regions, screen.activity, screen.window, self.now_ms, self.app.screen_size
        )

    def advance(self, ms: int) -> None:
        if ms < 0:
            raise DeviceError(f"Zeit kann nicht rückwärts laufen: {ms} ms")
        self.now_ms += ms

    ### Guards ###
    def _column_values(self, column: str) -> tuple[str, ...]:
        if self.store is None:
            return ()
        resolved = self.store.resolve(column, self.lexicon, self.threshold)
        return self.store.columns[resolved] if resolved else ()

    def _tapped(self, action: UiAction, node_id: int) -> bool:
        if not isinstance(action, Tap):
            return False
        node = self.screen.node(node_id)
        return node is not None and node.bounds.contains(action.x, action.y)

    def _satisfied(self, guard: Guard, action: UiAction) -> bool:
        if isinstance(guard, TapNode):
            return self._tapped(action, guard.node_id)
        if isinstance(guard, BackPress):
            return isinstance(action, Back)
        if isinstance(guard, TypedAndSubmit):
            if not self._tapped(action, guard.submit):
                return False
            typed = all(
                node_id in self.typed and self.typed[node_id] in self._column_values(column)
                for node_id, column in guard.fields
            )
            return typed and all(node_id in self.selected for node_id in guard.selected)
        raise DeviceError(f"Guard {guard} kann nicht direkt ausgewertet werden")

    def _fires(self, transition: SimTransition, action: UiAction) -> bool:
        guard = transition.guard
        if not isinstance(guard, SequenceOf):
            return self._satisfied(guard, action)
        # Sequenzen sind nachsichtig: unpassende Aktionen setzen den Fortschritt nicht zurück
        step = self.progress.get(transition.index, 0)
        if not self._satisfied(guard.guards[step], action):
            return False
        step += 1
        if step == len(guard.guards):
            self.progress[transition.index] = 0
            return True
        self.progress[transition.index] = step
        return False

    ### Actions ###
    def perform(self, action: UiAction) -> None:
        """Apply one action; state changes are visible in the next capture."""
        self.trace.append(TraceStep(self.current, action.kind, self.now_ms))

        if isinstance(action, Restart):
            self._restart()
            return
        if isinstance(action, Wait):
            return
        if isinstance(action, (TapClickable, TapMatching)):
            raise DeviceError(f"{type(action).__name__} muss vor dem Ausführen aufgelöst werden")
        if isinstance(action, Tap):
            width, height = self.app.screen_size
            if not (0 <= action.x < width and 0 <= action.y < height):
                logger.debug(f"[Sim] Tap außerhalb des Screens ignoriert: {action}")
                return
        if isinstance(action, TypeText):
            node = self.screen.node(action.node_id)
            if node is not None and node.editable:
                self.typed[action.node_id] = action.text
            return
        if isinstance(action, SelectOption):
            node = self.screen.node(action.node_id)
            if node is not None and node.is_spinner and action.index >= 0:
                self.selected[action.node_id] = action.index
            return
        if not isinstance(action, (Tap, Back)):
            raise DeviceError(f"Unbekannte Aktion: {action!r}")

        for transition in self.app.outgoing(self.current):
            if self._fires(transition, action):
                self.covered_transitions.add(transition.transition_id)
                logger.debug(f"[Sim] {transition.transition_id} durch {action}")
                self._enter(transition.target)
                return

    def _restart(self) -> None:
        self._enter(self.app.start)
        logger.debug(f"[Sim] Neustart von '{self.app.name}'")

    def restart(self) -> None:
        self.perform(Restart())
