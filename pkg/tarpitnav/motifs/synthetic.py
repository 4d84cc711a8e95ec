"""
Synthetic motif templates

Ein Layout-Template pro Motiv auf einem 1080x1920 Screen. Instanzen werden mit begrenztem Jitter
(Verschiebung der Elemente, Wahl alternativer Labels) erzeugt, sodass die Klassen per Konstruktion
trennbar bleiben.
"""

from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from tarpitnav.config import DEFAULT_SCREEN_SIZE
from tarpitnav.motifs.dataset import LabeledScreen
from tarpitnav.motifs.taxonomy import MOTIFS, MotifLabel
from tarpitnav.screen.snapshot import Bounds, UiNode, UiSnapshot
from tarpitnav.utils import Logger

logger = Logger().setup_logger(__file__)

DEFAULT_JITTER = 16
W = "android.widget."
ROOT_CLASS = W + "FrameLayout"


@dataclass(frozen=True)
class Element:
    class_name: str
    labels: tuple[str, ...]
    box: tuple[int, int, int, int]
    clickable: bool = False
    editable: bool = False
    children: tuple["Element", ...] = field(default=())


def _el(cls: str, labels, box, clickable=False, editable=False, children=()) -> Element:
    labels = (labels,) if isinstance(labels, str) else tuple(labels)
    full = cls if "." in cls else W + cls
    return Element(full, labels, box, clickable, editable or full.endswith("EditText"), tuple(children))


def _rows(cls: str, labels, left: int, top: int, right: int, height: int, gap: int, **kwargs) -> list[Element]:
    return [
        _el(cls, label, (left, top + i * (height + gap), right, top + i * (height + gap) + height), **kwargs)
        for i, label in enumerate(labels)
    ]


TEMPLATES: dict[MotifLabel, list[Element]] = {
    MotifLabel.ADVERTISEMENT: [
        _el("ImageView", "", (0, 120, 1080, 1500)),
        _el("TextView", ("Sponsored", "Ad", "Advertisement"), (40, 1540, 600, 1600)),
        _el("Button", ("Install now", "Learn more", "Download"), (240, 1680, 840, 1820), clickable=True),
        _el("ImageButton", "", (1000, 20, 1060, 80), clickable=True),
    ],
    MotifLabel.CALENDAR_TIME_WEATHER: [
        _el("TextView", ("Today", "Monday 12 June", "Tuesday"), (40, 80, 1040, 200)),
        _el("TextView", ("21 degrees sunny", "18 degrees cloudy", "24 degrees clear"), (40, 240, 1040, 560)),
        *[
            _el("TextView", day, (40 + i * 142, 700, 166 + i * 142, 820))
            for i, day in enumerate(("Mon", "Tue", "Wed", "Thu", "Fri", "Sat", "Sun"))
        ],
        _el("TextView", ("Weekly forecast", "Calendar week"), (40, 900, 1040, 980)),
    ],
    MotifLabel.CATALOG: [
        _el("TextView", ("Shop by category", "Categories", "Browse catalog"), (40, 60, 1040, 160)),
        *[
            _el("ImageView", "", (40 + col * 520, 220 + row * 540, 520 + col * 520, 620 + row * 540), clickable=True)
            for row in range(3)
            for col in range(2)
        ],
        *[
            _el(
                "TextView",
                ("Category", "Collection"),
                (40 + col * 520, 640 + row * 540, 520 + col * 520, 700 + row * 540),
            )
            for row in range(3)
            for col in range(2)
        ],
    ],
    MotifLabel.FEED: [
        element
        for card in range(3)
        for element in (
            _el("ImageView", "", (40, 60 + card * 620, 140, 160 + card * 620)),
            _el("TextView", ("posted an update", "shared a photo"), (160, 60 + card * 620, 1040, 160 + card * 620)),
            _el("ImageView", "", (40, 180 + card * 620, 1040, 560 + card * 620)),
            _el("TextView", ("Like  Comment", "Like  Reply"), (40, 580 + card * 620, 1040, 640 + card * 620)),
        )
    ],
    MotifLabel.FORM: [
        _el("TextView", ("Registration", "Your details", "Personal information"), (40, 60, 1040, 160)),
        _el("TextView", "First name", (40, 220, 1040, 280)),
        _el("EditText", "", (40, 290, 1040, 400)),
        _el("TextView", ("Surname", "Last name"), (40, 460, 1040, 520)),
        _el("EditText", "", (40, 530, 1040, 640)),
        _el("TextView", ("Phone", "Phone number"), (40, 700, 1040, 760)),
        _el("EditText", "", (40, 770, 1040, 880)),
        _el("TextView", ("Address", "Street address"), (40, 940, 1040, 1000)),
        _el("EditText", "", (40, 1010, 1040, 1120)),
        _el("Button", ("Submit", "Save", "Done"), (40, 1700, 1040, 1840), clickable=True),
    ],
    MotifLabel.HOME_MENU: [
        _el("TextView", ("Main menu", "Home", "Dashboard"), (40, 60, 1040, 160)),
        *[
            _el(
                "ImageButton",
                label,
                (60 + (i % 3) * 340, 260 + (i // 3) * 420, 340 + (i % 3) * 340, 560 + (i // 3) * 420),
                clickable=True,
            )
            for i, label in enumerate(
                ("Explore", "Profile", "Inbox", "Rewards", "Wallet", "Offers", "Help", "About", "Favorites")
            )
        ],
    ],
    MotifLabel.LIST: [
        element
        for row in range(8)
        for element in (
            _el("ImageView", "", (40, 60 + row * 220, 160, 180 + row * 220)),
            _el(
                "TextView",
                (f"List entry {row + 1}", f"Contact {row + 1}"),
                (200, 60 + row * 220, 1040, 180 + row * 220),
            ),
        )
    ],
    MotifLabel.LOG_IN: [
        _el("EditText", ("Username", "Email"), (90, 600, 990, 760), editable=True),
        _el("EditText", "Password", (90, 820, 990, 980), editable=True),
        _el("Button", ("Log in", "Sign in"), (90, 1100, 990, 1260), clickable=True),
    ],
    MotifLabel.MAP: [
        _el("View", "", (0, 0, 1080, 1600)),
        _el("ImageButton", "", (940, 1320, 1040, 1420), clickable=True),
        _el("ImageButton", "", (940, 1440, 1040, 1540), clickable=True),
        _el("TextView", ("Directions", "Route overview", "Nearby places"), (40, 1640, 1040, 1760)),
        _el("TextView", ("12 min drive", "3 km away"), (40, 1780, 1040, 1860)),
    ],
    MotifLabel.ONBOARDING: [
        _el("ImageView", "", (140, 300, 940, 1100)),
        _el("TextView", ("Welcome", "Discover new features", "Get started with the app"), (80, 1200, 1000, 1320)),
        *[_el("View", "", (480 + i * 40, 1400, 500 + i * 40, 1420)) for i in range(4)],
        _el("Button", ("Next", "Continue", "Skip"), (740, 1760, 1040, 1860), clickable=True),
    ],
    MotifLabel.PLAYER: [
        _el("VideoView", "", (0, 300, 1080, 908)),
        _el("ImageButton", ("Settings", "Share", "More"), (980, 320, 1040, 380), clickable=True),
        _el("SeekBar", "", (40, 960, 1040, 1000)),
        _el("TextView", ("00:42 / 03:15", "01:10 / 04:05"), (40, 1010, 400, 1060)),
        _el("ImageButton", "", (480, 1100, 600, 1220), clickable=True),
        _el("ImageButton", "", (280, 1110, 380, 1210), clickable=True),
        _el("ImageButton", "", (700, 1110, 800, 1210), clickable=True),
    ],
    MotifLabel.POP_UP: [
        _el("View", "", (0, 0, 1080, 700)),
        _el("TextView", ("Are you sure?", "Allow notifications?", "Rate this app"), (140, 760, 940, 880)),
        _el("TextView", ("This action cannot be undone", "You can change this later"), (140, 900, 940, 1000)),
        _el("Button", ("Cancel", "Not now"), (140, 1060, 520, 1160), clickable=True),
        _el("Button", ("OK", "Allow"), (560, 1060, 940, 1160), clickable=True),
        _el("View", "", (0, 1220, 1080, 1920)),
    ],
    MotifLabel.PRODUCT: [
        _el("ImageView", "", (0, 0, 1080, 900)),
        _el("TextView", ("Wireless headphones", "Running shoes", "Coffee maker"), (40, 940, 1040, 1040)),
        _el("TextView", ("49.99 EUR", "129.00 EUR", "19.95 EUR"), (40, 1060, 500, 1140)),
        _el("TextView", ("Product description and reviews", "Free shipping and returns"), (40, 1180, 1040, 1500)),
        _el("Button", ("Add to cart", "Buy now"), (40, 1700, 1040, 1840), clickable=True),
    ],
    MotifLabel.SEARCH: [
        _el("EditText", ("Search", "Search here", "Find"), (40, 60, 900, 180), editable=True),
        _el("ImageButton", "Search", (920, 60, 1040, 180), clickable=True),
        _el("TextView", ("Recent searches", "Search history"), (40, 240, 1040, 320)),
        *_rows("TextView", ("recent query one", "recent query two", "recent query three"), 40, 360, 1040, 100, 20),
    ],
    MotifLabel.SETTINGS: [
        _el("TextView", ("Settings", "Preferences"), (40, 60, 1040, 160)),
        *_rows("TextView", ("Notifications", "Privacy", "Account", "Language", "Display"), 40, 220, 860, 120, 40),
        *[_el("Switch", "", (900, 240 + i * 160, 1040, 320 + i * 160), clickable=True) for i in range(5)],
    ],
    MotifLabel.SPLASH: [
        _el("ImageView", "", (390, 810, 690, 1110)),
        _el("ProgressBar", "", (490, 1500, 590, 1600)),
    ],
    MotifLabel.TERMS_AND_CONDITIONS: [
        _el("TextView", ("Terms and Conditions", "Terms of Service", "Privacy Policy"), (40, 60, 1040, 160)),
        _el(
            "TextView",
            ("By using this app you agree to the following terms", "Please read these terms carefully"),
            (40, 200, 1040, 1500),
        ),
        _el("CheckBox", ("I agree", "I accept the terms"), (40, 1560, 1040, 1640), clickable=True),
        _el("Button", ("Accept", "Agree"), (40, 1700, 1040, 1840), clickable=True),
    ],
    MotifLabel.TRAVEL_BOOKING: [
        _el("TextView", ("Book a flight", "Find your trip", "Plan your journey"), (40, 60, 1040, 160)),
        _el("TextView", ("From Berlin", "From Munich"), (40, 220, 1040, 340), clickable=True),
        _el("TextView", ("To Lisbon", "To Vienna"), (40, 380, 1040, 500), clickable=True),
        _el("TextView", ("Departure date", "Return date"), (40, 540, 520, 660), clickable=True),
        _el("TextView", ("1 passenger", "2 passengers"), (560, 540, 1040, 660), clickable=True),
        _el("Button", ("Search flights", "Show trips"), (40, 1700, 1040, 1840), clickable=True),
    ],
    MotifLabel.TYPE_MESSAGE: [
        _el("TextView", ("Hi there", "Hello"), (40, 200, 600, 300)),
        _el("TextView", ("How are you?", "What's up?"), (480, 340, 1040, 440)),
        _el("TextView", ("See you soon", "Talk later"), (40, 480, 600, 580)),
        _el("EditText", ("Type a message", "Write a message"), (40, 1780, 900, 1880), editable=True),
        _el("ImageButton", "Send", (920, 1780, 1040, 1880), clickable=True),
    ],
    MotifLabel.VIEWER: [
        _el("ImageView", "", (0, 0, 1080, 1920)),
    ],
    MotifLabel.WEB_BROWSER: [
        _el("ImageButton", "", (20, 40, 100, 160), clickable=True),
        _el("EditText", ("https://example.com", "www.example.org/page"), (120, 40, 900, 160), editable=True),
        _el("ImageButton", "", (920, 40, 1060, 160), clickable=True),
        _el("android.webkit.WebView", "", (0, 200, 1080, 1920)),
    ],
}


def _clip(value: int, upper: int) -> int:
    return min(max(value, 0), upper)


def _build(elements, ancestor: str, counter: list[int], rng: Optional[np.random.Generator], jitter: int, size):
    nodes = []
    for element in elements:
        node_id = counter[0]
        counter[0] += 1
        left, top, right, bottom = element.box
        label = element.labels[0]
        if rng is not None:
            dx, dy = (int(value) for value in rng.integers(-jitter, jitter + 1, size=2))
            left, right = _clip(left + dx, size[0]), _clip(right + dx, size[0])
            top, bottom = _clip(top + dy, size[1]), _clip(bottom + dy, size[1])
            label = element.labels[int(rng.integers(len(element.labels)))]
        children = _build(element.children, element.class_name, counter, rng, jitter, size)
        nodes.append(
            UiNode(
                node_id,
                element.class_name,
                ancestor,
                label,
                Bounds(left, top, right, bottom),
                element.clickable,
                element.editable,
                tuple(children),
            )
        )
    return nodes


def template_snapshot(
    label: MotifLabel,
    rng: Optional[np.random.Generator] = None,
    jitter: int = DEFAULT_JITTER,
    activity: str = "",
) -> UiSnapshot:
    """Instance of the motif template; without `rng` the unjittered base layout with first labels."""
    size = DEFAULT_SCREEN_SIZE
    counter = [1]
    children = _build(TEMPLATES[label], ROOT_CLASS, counter, rng, jitter, size)
    root = UiNode(0, ROOT_CLASS, "", "", Bounds(0, 0, *size), False, False, tuple(children))
    return UiSnapshot(root, (), activity or f"{label.value}Activity", "", 0, size)


def generate_dataset(per_class: int = 40, seed: int = 0, jitter: int = DEFAULT_JITTER) -> list[LabeledScreen]:
    """Jittered instances of every motif template, seeded."""
    if per_class < 1:
        raise ValueError(f"per_class muss >= 1 sein, erhalten: {per_class}")
    rng = np.random.default_rng(seed)
    dataset = [
        LabeledScreen(template_snapshot(label, rng, jitter), label, f"{label.value.lower()}-{i:03d}")
        for label in MOTIFS
        for i in range(per_class)
    ]
    logger.info(f"[Synthetic] {len(dataset)} Screens erzeugt ({per_class} pro Motiv, Seed {seed})")
    return dataset
