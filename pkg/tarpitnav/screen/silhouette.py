"""
Silhouette Screens

Zeichnet einen Snapshot als stilfreies 3-Farben-Raster: Text blau, Nicht-Text grün, Hintergrund schwarz.
"""

from dataclasses import dataclass
from enum import IntEnum

import numpy as np
from PIL import Image

from tarpitnav.config import DEFAULT_CANVAS, DEFAULT_GRID, ENCODING
from tarpitnav.screen.snapshot import Bounds, TextSource, Textuality, UiSnapshot, node_textuality


class Pixel(IntEnum):
    BACKGROUND = 0
    TEXT = 1
    NON_TEXT = 2


PALETTE = {
    Pixel.BACKGROUND: (0, 0, 0),
    Pixel.TEXT: (0, 0, 255),
    Pixel.NON_TEXT: (0, 255, 0),
}
TEXT_CHARS = {Pixel.BACKGROUND: ".", Pixel.TEXT: "T", Pixel.NON_TEXT: "N"}


@dataclass(frozen=True, eq=False)
class SilhouetteImage:
    width: int
    height: int
    pixels: np.ndarray

    def __post_init__(self):
        pixels = np.ascontiguousarray(self.pixels, dtype=np.uint8)
        if pixels.shape != (self.height, self.width):
            raise ValueError(f"Pixel-Array {pixels.shape} passt nicht zu {self.width}x{self.height}")
        if pixels.size and pixels.max() > max(Pixel):
            raise ValueError("Pixel außerhalb der Palette")
        pixels.setflags(write=False)
        object.__setattr__(self, "pixels", pixels)

    def __eq__(self, other) -> bool:
        if not isinstance(other, SilhouetteImage):
            return NotImplemented
        return self.width == other.width and self.height == other.height and np.array_equal(self.pixels, other.pixels)

    def count(self, value: Pixel) -> int:
        return int(np.count_nonzero(self.pixels == value))

    def to_text(self) -> str:
        """Plain raster: first line `WxH`, then one row per line (`.` background, `T` text, `N` non-text)."""
        lookup = np.array([TEXT_CHARS[value] for value in Pixel])
        rows = ["".join(row) for row in lookup[self.pixels]]
        return "\n".join([f"{self.width}x{self.height}", *rows]) + "\n"

    @classmethod
    def from_text(cls, text: str) -> "SilhouetteImage":
        lines = [line for line in text.splitlines() if line.strip()]
        if not lines:
            raise ValueError("Leeres Raster")
        width, height = (int(value) for value in lines[0].lower().split("x"))
        decode = {char: value for value, char in TEXT_CHARS.items()}
        rows = lines[1:]
        if len(rows) != height or any(len(row) != width for row in rows):
            raise ValueError(f"Raster hat nicht die Größe {width}x{height}")
        pixels = np.array([[decode[char] for char in row] for row in rows], dtype=np.uint8).reshape(height, width)
        return cls(width, height, pixels)


def _scale(value: int, source: int, target: int) -> int:
    # round half up in Ganzzahlarithmetik: floor(value * target / source + 1/2)
    return (2 * value * target + source) // (2 * source)


def scale_bounds(bounds: Bounds, screen_size: tuple[int, int], canvas: tuple[int, int]) -> tuple[int, int, int, int]:
    """Scale to canvas pixels and clip; returns (left, top, right, bottom) with half-open extent."""
    (screen_w, screen_h), (canvas_w, canvas_h) = screen_size, canvas
    left = min(max(_scale(bounds.left, screen_w, canvas_w), 0), canvas_w)
    right = min(max(_scale(bounds.right, screen_w, canvas_w), 0), canvas_w)
    top = min(max(_scale(bounds.top, screen_h, canvas_h), 0), canvas_h)
    bottom = min(max(_scale(bounds.bottom, screen_h, canvas_h), 0), canvas_h)
    return left, top, right, bottom


def render(snapshot: UiSnapshot, canvas: tuple[int, int] = DEFAULT_CANVAS) -> SilhouetteImage:
    """Render the leaf nodes of a snapshot, then recognizer text on top.

    Args:
        snapshot (UiSnapshot): screen to draw
        canvas (tuple[int, int]): (width, height) of the raster

    Returns:
        SilhouetteImage: raster in the Background/Text/NonText palette
    """
    canvas_w, canvas_h = canvas
    if canvas_w <= 0 or canvas_h <= 0:
        raise ValueError(f"Canvas muss positiv sein: {canvas}")

    pixels = np.full((canvas_h, canvas_w), Pixel.BACKGROUND, dtype=np.uint8)

    for node in snapshot.leaves:
        left, top, right, bottom = scale_bounds(node.bounds, snapshot.screen_size, canvas)
        if left >= right or top >= bottom:
            continue
        textual = node_textuality(node, snapshot.text_regions) is Textuality.TEXTUAL
        pixels[top:bottom, left:right] = Pixel.TEXT if textual else Pixel.NON_TEXT

    for region in snapshot.text_regions:
        if region.source is not TextSource.EXTERNAL_RECOGNIZER:
            continue
        left, top, right, bottom = scale_bounds(region.bounds, snapshot.screen_size, canvas)
        if left >= right or top >= bottom:
            continue
        pixels[top:bottom, left:right] = Pixel.TEXT

    return SilhouetteImage(canvas_w, canvas_h, pixels)


def _edges(length: int, grid: int) -> list[int]:
    step = length // grid
    return [i * step for i in range(grid)] + [length]


def channel_fractions(img: SilhouetteImage, grid: int = DEFAULT_GRID) -> np.ndarray:
    """Per-cell (background, text, non-text) fractions, cells row-major; remainder goes to the last row/column.

    Cells without pixels (canvas smaller than the grid) count as pure background.
    """
    if grid < 1:
        raise ValueError(f"Grid muss >= 1 sein, erhalten: {grid}")

    rows, cols = _edges(img.height, grid), _edges(img.width, grid)
    values = np.zeros((grid, grid, len(Pixel)), dtype=np.float64)
    for i in range(grid):
        for j in range(grid):
            cell = img.pixels[rows[i] : rows[i + 1], cols[j] : cols[j + 1]]
            if cell.size == 0:
                values[i, j, Pixel.BACKGROUND] = 1.0
                continue
            values[i, j] = np.bincount(cell.ravel(), minlength=len(Pixel))[: len(Pixel)] / cell.size
    return values.reshape(-1)


def cell_areas(img: SilhouetteImage, grid: int) -> np.ndarray:
    rows, cols = np.diff(_edges(img.height, grid)), np.diff(_edges(img.width, grid))
    return np.outer(rows, cols).reshape(-1)


def save_png(img: SilhouetteImage, path: str) -> None:
    """Write a lossless palette PNG with the fixed colour mapping."""
    image = Image.frombytes("P", (img.width, img.height), img.pixels.tobytes())
    palette = [channel for value in Pixel for channel in PALETTE[value]]
    image.putpalette(palette)
    image.save(path, format="PNG", optimize=False)


def load_png(path: str) -> SilhouetteImage:
    with Image.open(path) as image:
        rgb = np.asarray(image.convert("RGB"))
    pixels = np.full(rgb.shape[:2], Pixel.BACKGROUND, dtype=np.uint8)
    for value, colour in PALETTE.items():
        pixels[np.all(rgb == colour, axis=-1)] = value
    return SilhouetteImage(rgb.shape[1], rgb.shape[0], pixels)


def save_text(img: SilhouetteImage, path: str) -> None:
    with open(path, "w", encoding=ENCODING) as file:
        file.write(img.to_text())
