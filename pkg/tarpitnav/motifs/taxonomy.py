"""
UI Design Motifs

Die 21 Motive, die Tarpit-Teilmenge und die gerankte Vorhersage.
"""

from dataclasses import dataclass
from enum import Enum
from typing import Sequence

import numpy as np


class MotifLabel(str, Enum):
    ADVERTISEMENT = "Advertisement"
    CALENDAR_TIME_WEATHER = "CalendarTimeWeather"
    CATALOG = "Catalog"
    FEED = "Feed"
    FORM = "Form"
    HOME_MENU = "HomeMenu"
    LIST = "List"
    LOG_IN = "LogIn"
    MAP = "Map"
    ONBOARDING = "Onboarding"
    PLAYER = "Player"
    POP_UP = "PopUp"
    PRODUCT = "Product"
    SEARCH = "Search"
    SETTINGS = "Settings"
    SPLASH = "Splash"
    TERMS_AND_CONDITIONS = "TermsAndConditions"
    TRAVEL_BOOKING = "TravelBooking"
    TYPE_MESSAGE = "TypeMessage"
    VIEWER = "Viewer"
    WEB_BROWSER = "WebBrowser"

    @property
    def position(self) -> int:
        return MOTIF_ORDER[self]

    @property
    def is_tarpit(self) -> bool:
        return self in TARPIT_MOTIFS

    @classmethod
    def parse(cls, value: str) -> "MotifLabel":
        """Accept the enum value ("LogIn") or member name ("LOG_IN"), case-insensitive."""
        key = str(value).strip().replace("_", "").replace("-", "").replace(" ", "").lower()
        for label in cls:
            if label.value.lower() == key:
                return label
        raise ValueError(f"Unbekanntes Motiv: {value}")


MOTIFS: tuple[MotifLabel, ...] = tuple(MotifLabel)
MOTIF_ORDER = {label: index for index, label in enumerate(MOTIFS)}
TARPIT_MOTIFS = frozenset(
    {
        MotifLabel.LOG_IN,
        MotifLabel.ONBOARDING,
        MotifLabel.PLAYER,
        MotifLabel.ADVERTISEMENT,
        MotifLabel.VIEWER,
        MotifLabel.FORM,
        MotifLabel.WEB_BROWSER,
        MotifLabel.SEARCH,
    }
)


@dataclass(frozen=True)
class MotifPrediction:
    ranked: tuple[tuple[MotifLabel, float], ...]

    def __post_init__(self):
        labels = [label for label, _ in self.ranked]
        if sorted(labels, key=MOTIF_ORDER.get) != list(MOTIFS):
            raise ValueError("Vorhersage muss jedes der 21 Motive genau einmal enthalten")

    @classmethod
    def from_probabilities(cls, probabilities: Sequence[float]) -> "MotifPrediction":
        """Rank a 21-vector given in enumeration order; ties keep enumeration order."""
        values = np.clip(np.asarray(probabilities, dtype=np.float64), 0.0, None)
        if values.shape != (len(MOTIFS),):
            raise ValueError(f"Erwartet {len(MOTIFS)} Wahrscheinlichkeiten, erhalten {values.shape}")
        total = values.sum()
        values = values / total if total > 0 else np.full(len(MOTIFS), 1.0 / len(MOTIFS))
        order = sorted(range(len(MOTIFS)), key=lambda i: (-values[i], i))
        return cls(tuple((MOTIFS[i], float(values[i])) for i in order))

    @classmethod
    def certain(cls, label: MotifLabel) -> "MotifPrediction":
        probabilities = np.zeros(len(MOTIFS))
        probabilities[label.position] = 1.0
        return cls.from_probabilities(probabilities)

    @property
    def top(self) -> MotifLabel:
        return self.ranked[0][0]

    def probability(self, label: MotifLabel) -> float:
        return dict(self.ranked)[label]


def tarpit_candidates(pred: MotifPrediction, n: int) -> list[MotifLabel]:
    """First n tarpit motifs in ranked order."""
    if n < 1:
        raise ValueError(f"n muss >= 1 sein, erhalten: {n}")
    return [label for label, _ in pred.ranked if label in TARPIT_MOTIFS][:n]
