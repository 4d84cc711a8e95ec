"""
Device actions and adapter contract
"""

from dataclasses import dataclass
from typing import Protocol, Union

from tarpitnav.motifs.taxonomy import MotifLabel, TARPIT_MOTIFS
from tarpitnav.navigation.detector import TraceStep
from tarpitnav.screen.snapshot import UiSnapshot


@dataclass(frozen=True)
class Tap:
    x: int
    y: int
    kind = "tap"


@dataclass(frozen=True)
class TypeText:
    node_id: int
    text: str
    kind = "type"


@dataclass(frozen=True)
class Back:
    kind = "back"


@dataclass(frozen=True)
class Restart:
    kind = "restart"


@dataclass(frozen=True)
class Wait:
    ms: int
    kind = "wait"


@dataclass(frozen=True)
class TapClickable:
    """Tap the first clickable node of the snapshot captured right before; Back when there is none."""

    kind = "tap_clickable"


@dataclass(frozen=True)
class TapMatching:
    """Tap the clickable node best matching `intents` on the screen at execution time; skipped when none matches."""

    intents: tuple[str, ...]
    kind = "tap_matching"


@dataclass(frozen=True)
class SelectOption:
    """Pick option `index` of the spinner `node_id`."""

    node_id: int
    index: int = 0
    kind = "select"


UiAction = Union[Tap, TypeText, Back, Restart, Wait, TapClickable, TapMatching, SelectOption]


@dataclass(frozen=True)
class ActionPlan:
    kind: MotifLabel
    actions: tuple[UiAction, ...]

    def __post_init__(self):
        if self.kind not in TARPIT_MOTIFS:
            raise ValueError(f"{self.kind} ist kein Tarpit-Motiv")
        if not self.actions:
            raise ValueError("ActionPlan braucht mindestens eine Aktion")
        restarts = [i for i, action in enumerate(self.actions) if isinstance(action, Restart)]
        if len(restarts) > 1 or (restarts and restarts[0] != len(self.actions) - 1):
            raise ValueError("Restart ist nur einmal und nur als letzte Aktion erlaubt")


class DeviceAdapter(Protocol):
    """What the control loop needs from a device; time is logical milliseconds."""

    now_ms: int
    trace: list[TraceStep]

    def capture(self) -> UiSnapshot: ...

    def perform(self, action: UiAction) -> None: ...

    def restart(self) -> None: ...

    def advance(self, ms: int) -> None: ...
