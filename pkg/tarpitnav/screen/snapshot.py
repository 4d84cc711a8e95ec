"""
UI Snapshot

Parst uiautomator-artige Hierarchie-Dokumente (xmltodict) und Textregionen in unveränderliche
Snapshots und berechnet eine stabile Screen-Signatur.
"""

import re
from dataclasses import dataclass, field
from enum import Enum
from typing import Iterator, Optional
from xml.parsers.expat import ExpatError

import numpy as np
import xmltodict

from tarpitnav.config import DEFAULT_SCREEN_SIZE, ENCODING, TEXTUAL_COVERAGE
from tarpitnav.errors import EmptyDocument, MalformedBounds, MalformedDocument
from tarpitnav.utils import fnv1a_64

BOUNDS_PATTERN = re.compile(r"^\s*\[(-?\d+),(-?\d+)\]\[(-?\d+),(-?\d+)\]\s*$")
NODE_TAG = "node"
WRAPPER_TAG = "hierarchy"
# Trennzeichen der kanonischen Serialisierung (kommt in Labels praktisch nicht vor)
FIELD_SEP = "\x1f"
RECORD_SEP = "\x1e"


@dataclass(frozen=True)
class Bounds:
    left: int
    top: int
    right: int
    bottom: int

    def __post_init__(self):
        if min(self.left, self.top, self.right, self.bottom) < 0:
            raise MalformedBounds(f"negative Koordinate in {self}")
        if self.left > self.right or self.top > self.bottom:
            raise MalformedBounds(f"left <= right und top <= bottom verletzt: {self}")

    @property
    def width(self) -> int:
        return self.right - self.left

    @property
    def height(self) -> int:
        return self.bottom - self.top

    @property
    def area(self) -> int:
        return self.width * self.height

    @property
    def center(self) -> tuple[int, int]:
        return (self.left + self.right) // 2, (self.top + self.bottom) // 2

    def contains(self, x: int, y: int) -> bool:
        return self.left <= x < self.right and self.top <= y < self.bottom

    def intersection(self, other: "Bounds") -> Optional["Bounds"]:
        left, top = max(self.left, other.left), max(self.top, other.top)
        right, bottom = min(self.right, other.right), min(self.bottom, other.bottom)
        if left >= right or top >= bottom:
            return None
        return Bounds(left, top, right, bottom)

    def to_string(self) -> str:
        return f"[{self.left},{self.top}][{self.right},{self.bottom}]"


def parse_bounds(bounds: str) -> Bounds:
    """Parse the "[l,t][r,b]" bounds grammar (surrounding whitespace allowed)."""
    match = BOUNDS_PATTERN.match(bounds or "")
    if not match:
        raise MalformedBounds(f"Bounds '{bounds}' entsprechen nicht dem Format [l,t][r,b]")
    return Bounds(*(int(value) for value in match.groups()))


class TextSource(Enum):
    HIERARCHY_LABEL = "HierarchyLabel"
    EXTERNAL_RECOGNIZER = "ExternalRecognizer"


class Textuality(Enum):
    TEXTUAL = "Textual"
    NON_TEXTUAL = "NonTextual"


@dataclass(frozen=True)
class TextRegion:
    text: str
    bounds: Bounds
    source: TextSource = TextSource.EXTERNAL_RECOGNIZER

    def __post_init__(self):
        if not self.text.strip():
            raise ValueError("TextRegion braucht nicht-leeren Text")


@dataclass(frozen=True)
class UiNode:
    node_id: int
    class_name: str
    ancestor_class: str
    label: str
    bounds: Bounds
    clickable: bool = False
    editable: bool = False
    children: tuple["UiNode", ...] = ()

    @property
    def is_leaf(self) -> bool:
        return not self.children

    @property
    def short_class(self) -> str:
        return self.class_name.rsplit(".", 1)[-1]

    @property
    def is_spinner(self) -> bool:
        return self.short_class.endswith("Spinner")

    def iter(self) -> Iterator["UiNode"]:
        """Preorder, i.e. document order."""
        yield self
        for child in self.children:
            yield from child.iter()


@dataclass(frozen=True)
class ScreenSignature:
    activity: str
    window: str
    structure_digest: int

    def __str__(self) -> str:
        return f"{self.activity}/{self.window}#{self.structure_digest:016x}"


@dataclass(frozen=True)
class UiSnapshot:
    hierarchy: Optional[UiNode]
    text_regions: tuple[TextRegion, ...] = ()
    activity: str = ""
    window: str = ""
    captured_at: int = 0
    screen_size: tuple[int, int] = DEFAULT_SCREEN_SIZE
    _nodes: tuple[UiNode, ...] = field(default=(), init=False, repr=False, compare=False)

    def __post_init__(self):
        if self.screen_size[0] <= 0 or self.screen_size[1] <= 0:
            raise ValueError(f"screen_size muss positiv sein: {self.screen_size}")
        object.__setattr__(self, "text_regions", tuple(self.text_regions))
        nodes = tuple(self.hierarchy.iter()) if self.hierarchy is not None else ()
        object.__setattr__(self, "_nodes", nodes)

    @property
    def nodes(self) -> tuple[UiNode, ...]:
        return self._nodes

    @property
    def leaves(self) -> list[UiNode]:
        return [node for node in self._nodes if node.is_leaf]

    @property
    def clickable_nodes(self) -> list[UiNode]:
        return [node for node in self._nodes if node.clickable]

    @property
    def editable_nodes(self) -> list[UiNode]:
        return [node for node in self._nodes if node.editable]

    def find_node(self, node_id: int) -> Optional[UiNode]:
        if 0 <= node_id < len(self._nodes) and self._nodes[node_id].node_id == node_id:
            return self._nodes[node_id]
        return next((node for node in self._nodes if node.node_id == node_id), None)

    def label_regions(self) -> list[TextRegion]:
        """HierarchyLabel regions of all labeled nodes, followed by the snapshot's own regions."""
        regions = [
            TextRegion(node.label, node.bounds, TextSource.HIERARCHY_LABEL)
            for node in self._nodes
            if node.label.strip()
        ]
        return regions + list(self.text_regions)


### Parsing ###
def _as_list(value) -> list:
    if value is None:
        return []
    return value if isinstance(value, list) else [value]


def _flag(value: Optional[str]) -> bool:
    return str(value).strip().lower() == "true"


def _build_node(element, ancestor_class: str, counter: list[int], path: str) -> UiNode:
    if element is None:
        element = {}
    if not isinstance(element, dict):
        # Element ohne Attribute, nur mit Text
        raise MalformedBounds(f"{path}: Element ohne bounds")

    for key in element:
        if not key.startswith("@") and key not in (NODE_TAG, "#text"):
            raise MalformedDocument(f"{path}: unerwartetes Element <{key}>, nur <{NODE_TAG}> erlaubt")

    node_id = counter[0]
    counter[0] += 1

    class_name = element.get("@class", "") or ""
    label = element.get("@text") or element.get("@content-desc") or ""
    bounds = parse_bounds(element.get("@bounds"))
    clickable = _flag(element.get("@clickable"))
    if "@editable" in element:
        editable = _flag(element.get("@editable"))
    else:
        editable = class_name.endswith("EditText")

    children = tuple(
        _build_node(child, class_name, counter, f"{path}/{NODE_TAG}[{i}]")
        for i, child in enumerate(_as_list(element.get(NODE_TAG)))
    )
    return UiNode(node_id, class_name, ancestor_class, label, bounds, clickable, editable, children)


def parse_hierarchy(document: str) -> UiNode:
    """Parse a hierarchy document into its root UiNode.

    Args:
        document (str): element-tree text; `node` elements, optionally wrapped in `hierarchy`

    Raises:
        EmptyDocument: no text or no node element
        MalformedDocument: not well-formed, foreign elements or several roots
        MalformedBounds: bounds attribute missing or invalid

    Returns:
        UiNode: root node, node ids in document order starting at 0
    """
    if document is None or not document.strip():
        raise EmptyDocument("Hierarchie-Dokument ist leer")

    try:
        parsed = xmltodict.parse(document, encoding=ENCODING, force_list=(NODE_TAG,))
    except ExpatError as e:
        raise MalformedDocument(f"Hierarchie-Dokument nicht wohlgeformt: {e}") from e

    if WRAPPER_TAG in parsed:
        wrapper = parsed[WRAPPER_TAG] or {}
        if not isinstance(wrapper, dict):
            raise EmptyDocument("Hierarchie enthält keine Knoten")
        for key in wrapper:
            if not key.startswith("@") and key not in (NODE_TAG, "#text"):
                raise MalformedDocument(f"unerwartetes Element <{key}> in <{WRAPPER_TAG}>")
        roots = _as_list(wrapper.get(NODE_TAG))
    elif NODE_TAG in parsed:
        roots = _as_list(parsed[NODE_TAG])
    else:
        raise MalformedDocument(f"Wurzelelement muss <{WRAPPER_TAG}> oder <{NODE_TAG}> sein")

    if not roots:
        raise EmptyDocument("Hierarchie enthält keine Knoten")
    if len(roots) > 1:
        raise MalformedDocument(f"{len(roots)} Wurzelknoten gefunden, erwartet genau einen")

    return _build_node(roots[0], "", [0], f"{NODE_TAG}[0]")


def _node_to_dict(node: UiNode) -> dict:
    element = {
        "@class": node.class_name,
        "@text": node.label,
        "@bounds": node.bounds.to_string(),
        "@clickable": "true" if node.clickable else "false",
        "@editable": "true" if node.editable else "false",
    }
    if node.children:
        element[NODE_TAG] = [_node_to_dict(child) for child in node.children]
    return element


def serialize_hierarchy(root: UiNode) -> str:
    """Inverse of parse_hierarchy."""
    return xmltodict.unparse({WRAPPER_TAG: {NODE_TAG: _node_to_dict(root)}}, encoding=ENCODING, pretty=True)


def parse_regions(text: str, source: TextSource = TextSource.EXTERNAL_RECOGNIZER) -> tuple[TextRegion, ...]:
    """Parse line records `text<TAB>l,t,r,b`; blank lines are skipped."""
    regions = []
    for line_no, line in enumerate((text or "").splitlines(), start=1):
        if not line.strip():
            continue
        if "\t" not in line:
            raise MalformedDocument(f"Zeile {line_no}: Tabulator zwischen Text und Bounds fehlt")
        label, coords = line.rsplit("\t", 1)
        values = coords.split(",")
        if len(values) != 4:
            raise MalformedBounds(f"Zeile {line_no}: '{coords}' ist nicht l,t,r,b")
        try:
            bounds = Bounds(*(int(value.strip()) for value in values))
        except ValueError as e:
            if isinstance(e, MalformedBounds):
                raise
            raise MalformedBounds(f"Zeile {line_no}: '{coords}' enthält keine Ganzzahlen") from e
        if not label.strip():
            raise MalformedDocument(f"Zeile {line_no}: leerer Text")
        regions.append(TextRegion(label.strip(), bounds, source))
    return tuple(regions)


def format_regions(regions) -> str:
    lines = [
        f"{region.text}\t{region.bounds.left},{region.bounds.top},{region.bounds.right},{region.bounds.bottom}"
        for region in regions
    ]
    return "\n".join(lines) + ("\n" if lines else "")


def screen_size_of(root: Optional[UiNode]) -> tuple[int, int]:
    """Screen size implied by the root bounds; default phone size when the root is degenerate."""
    if root is None or root.bounds.right <= 0 or root.bounds.bottom <= 0:
        return DEFAULT_SCREEN_SIZE
    return root.bounds.right, root.bounds.bottom


def load_snapshot(
    hierarchy_path: str, regions_path: Optional[str] = None, activity: str = "", window: str = ""
) -> UiSnapshot:
    with open(hierarchy_path, "r", encoding=ENCODING) as file:
        root = parse_hierarchy(file.read())
    regions: tuple[TextRegion, ...] = ()
    if regions_path:
        with open(regions_path, "r", encoding=ENCODING) as file:
            regions = parse_regions(file.read())
    return UiSnapshot(root, regions, activity, window, 0, screen_size_of(root))


### Signature ###
def canonical_form(snapshot: UiSnapshot) -> str:
    """Canonical serialization hashed into the structure digest.

    Knoten in Dokumentreihenfolge mit Klasse, Bounds und Label; danach nur Regionen aus der
    Hierarchie. Recognizer-Regionen und captured_at fließen nicht ein.
    """
    records = [
        FIELD_SEP.join(("N", node.class_name, node.bounds.to_string(), node.label)) for node in snapshot.nodes
    ]
    records += [
        FIELD_SEP.join(("R", region.text, region.bounds.to_string()))
        for region in snapshot.text_regions
        if region.source is TextSource.HIERARCHY_LABEL
    ]
    return RECORD_SEP.join(records)


def signature(snapshot: UiSnapshot) -> ScreenSignature:
    return ScreenSignature(snapshot.activity, snapshot.window, fnv1a_64(canonical_form(snapshot)))


### Textuality ###
def covered_pixels(bounds: Bounds, regions) -> int:
    """Pixels of `bounds` covered by the union of the regions (integer pixel grid)."""
    if bounds.area == 0:
        return 0
    mask = np.zeros((bounds.height, bounds.width), dtype=bool)
    for region in regions:
        overlap = bounds.intersection(region.bounds)
        if overlap is None:
            continue
        mask[
            overlap.top - bounds.top : overlap.bottom - bounds.top,
            overlap.left - bounds.left : overlap.right - bounds.left,
        ] = True
    return int(mask.sum())


def node_textuality(node: UiNode, regions) -> Textuality:
    if node.label.strip():
        return Textuality.TEXTUAL
    area = node.bounds.area
    if area == 0:
        return Textuality.NON_TEXTUAL
    if covered_pixels(node.bounds, regions) >= TEXTUAL_COVERAGE * area:
        return Textuality.TEXTUAL
    return Textuality.NON_TEXTUAL
