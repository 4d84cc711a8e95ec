"""
Random explorer

Monkey-artige Baseline: gleichverteilte Taps, Back und zufällige 6-Zeichen-Tokens in Eingabefelder.
Startet die App nie selbst neu.
"""

import string
from typing import Sequence

import numpy as np

from tarpitnav.config import ACTION_MIX, EXPLORE_ACTION_MS, RANDOM_TOKEN_LENGTH
from tarpitnav.device.actions import Back, DeviceAdapter, Tap, TypeText, UiAction
from tarpitnav.navigation.detector import TraceStep
from tarpitnav.screen.snapshot import UiSnapshot

TOKEN_ALPHABET = np.array(list(string.ascii_lowercase + string.digits))


class RandomExplorer:
    def __init__(self, seed: int, action_mix: Sequence[float] = ACTION_MIX):
        mix = np.asarray(action_mix, dtype=np.float64)
        if mix.shape != (3,) or (mix < 0).any() or mix.sum() <= 0:
            raise ValueError(f"action_mix braucht drei nicht-negative Gewichte (tap, back, type): {action_mix}")
        self.mix = mix / mix.sum()
        self.seed = seed
        self.rng = np.random.default_rng(seed)

    def token(self) -> str:
        return "".join(self.rng.choice(TOKEN_ALPHABET, size=RANDOM_TOKEN_LENGTH))

    def _tap(self, snapshot: UiSnapshot) -> Tap:
        width, height = snapshot.screen_size
        return Tap(int(self.rng.integers(0, width)), int(self.rng.integers(0, height)))

    def next_action(self, snapshot: UiSnapshot) -> UiAction:
        draw = self.rng.random()
        if draw < self.mix[0]:
            return self._tap(snapshot)
        if draw < self.mix[0] + self.mix[1]:
            return Back()
        editable = snapshot.editable_nodes
        if not editable:
            return self._tap(snapshot)
        node = editable[int(self.rng.integers(len(editable)))]
        return TypeText(node.node_id, self.token())


def random_explorer(
    device: DeviceAdapter,
    seed: int,
    budget: int,
    action_mix: Sequence[float] = ACTION_MIX,
    action_ms: int = EXPLORE_ACTION_MS,
) -> list[TraceStep]:
    """Drive the device with `budget` random actions and return the trace steps they produced."""
    if budget < 0:
        raise ValueError(f"budget muss >= 0 sein, erhalten: {budget}")
    explorer = RandomExplorer(seed, action_mix)
    start = len(device.trace)
    for _ in range(budget):
        device.perform(explorer.next_action(device.capture()))
        device.advance(action_ms)
    return device.trace[start:]
