"""
Feature extraction

Visuelle Features (Grid-Anteile der Silhouette) und textuelle Features (TF-IDF über Satz-Dokumente
pro Screen). Der Embedder-Protocol ist die Stelle, an der ein neuronaler Encoder eingesetzt werden kann.
"""

from dataclasses import dataclass
from typing import Optional, Protocol, Sequence

import numpy as np
from sklearn.feature_extraction.text import CountVectorizer
from sklearn.preprocessing import normalize

from tarpitnav.config import DEFAULT_CANVAS, DEFAULT_GRID, VECTORIZER_VERSION
from tarpitnav.errors import EmbedderUnavailable, EmptyCorpus, ModelFormatError
from tarpitnav.screen.silhouette import channel_fractions, render
from tarpitnav.screen.snapshot import TextRegion, UiNode, UiSnapshot
from tarpitnav.utils import Logger, fnv1a_64, load_yaml, save_yaml, words

logger = Logger().setup_logger(__file__)

VECTORIZER_FORMAT = "tarpitnav-vectorizer"
MIN_TOKEN_COUNT = 2
UNLABELED = "unlabeled"
COLUMN_NAMES = ("left", "center", "right")
ROW_NAMES = ("top", "middle", "bottom")
WIDTH_NAMES = ("narrow", "medium", "wide")
HEIGHT_NAMES = ("short", "medium", "tall")


@dataclass(frozen=True, eq=False)
class VisualFeatures:
    values: np.ndarray
    grid: int


@dataclass(frozen=True, eq=False)
class TextFeatures:
    values: np.ndarray
    vocabulary_id: str


@dataclass(frozen=True)
class ScreenDocument:
    sentences: tuple[str, ...]

    @property
    def text(self) -> str:
        return "\n".join(self.sentences)


### Sentences ###
def _bucket(value: int, extent: int) -> int:
    if extent <= 0:
        return 0
    return min(2, max(0, 3 * value // extent))


def position_name(node: UiNode, screen_size: tuple[int, int]) -> str:
    cx, cy = node.bounds.center
    column, row = _bucket(cx, screen_size[0]), _bucket(cy, screen_size[1])
    if (column, row) == (1, 1):
        return "center"
    return f"{ROW_NAMES[row]}-{COLUMN_NAMES[column]}"


def size_name(node: UiNode, screen_size: tuple[int, int]) -> str:
    width = WIDTH_NAMES[_bucket(node.bounds.width, screen_size[0])]
    height = HEIGHT_NAMES[_bucket(node.bounds.height, screen_size[1])]
    return f"{width} by {height}"


def _short_class(class_name: str) -> str:
    return class_name.rsplit(".", 1)[-1]


def _borrow_region(node: UiNode, regions: Sequence[TextRegion], consumed: set[int]) -> Optional[int]:
    """Index of the unconsumed region overlapping the node the most; first in list order on ties."""
    best, best_area = None, 0
    for index, region in enumerate(regions):
        if index in consumed:
            continue
        overlap = node.bounds.intersection(region.bounds)
        if overlap is not None and overlap.area > best_area:
            best, best_area = index, overlap.area
    return best


def screen_document(snapshot: UiSnapshot) -> ScreenDocument:
    """One sentence per node in document order, then one `text <text>` sentence per unconsumed region.

    Blatt-Knoten ohne Label übernehmen den Text der am stärksten überlappenden Region; diese Region
    gilt danach als verbraucht.
    """
    regions = snapshot.text_regions
    consumed: set[int] = set()
    sentences = []
    for node in snapshot.nodes:
        label = node.label.strip()
        if not label and node.is_leaf:
            borrowed = _borrow_region(node, regions, consumed)
            if borrowed is not None:
                consumed.add(borrowed)
                label = regions[borrowed].text.strip()
        sentences.append(
            f"{_short_class(node.class_name)} inside {_short_class(node.ancestor_class)} "
            f"labeled {label or UNLABELED} at {position_name(node, snapshot.screen_size)} "
            f"size {size_name(node, snapshot.screen_size)}"
        )
    sentences += [f"text {region.text.strip()}" for index, region in enumerate(regions) if index not in consumed]
    return ScreenDocument(tuple(sentences))


def tokenize(text: str) -> list[str]:
    """Lowercase, drop punctuation, split on whitespace."""
    return words(text)


### TF-IDF ###
class TextVectorizer:
    """Smoothed TF-IDF with a min-count-2 vocabulary in lexicographic order."""

    def __init__(self, vocabulary: Sequence[str], idf: Sequence[float], n_documents: int):
        self.vocabulary = tuple(vocabulary)
        self.idf = np.asarray(idf, dtype=np.float64)
        self.n_documents = n_documents
        if len(self.vocabulary) != len(self.idf):
            raise ValueError("Vokabular und idf-Array haben unterschiedliche Länge")
        self.vocabulary_id = f"{fnv1a_64(chr(10).join(self.vocabulary)):016x}"
        self._counter = CountVectorizer(analyzer=tokenize, vocabulary=self.vocabulary) if self.vocabulary else None

    @property
    def dimension(self) -> int:
        return len(self.vocabulary)

    def counts(self, doc: ScreenDocument) -> np.ndarray:
        if self._counter is None:
            return np.zeros(0, dtype=np.float64)
        return self._counter.transform([doc.text]).toarray()[0].astype(np.float64)

    def transform(self, doc: ScreenDocument) -> TextFeatures:
        weighted = self.counts(doc) * self.idf
        if weighted.size and weighted.any():
            weighted = normalize(weighted.reshape(1, -1), norm="l2")[0]
        return TextFeatures(weighted, self.vocabulary_id)

    def to_record(self) -> dict:
        return {
            "format": VECTORIZER_FORMAT,
            "version": VECTORIZER_VERSION,
            "n_documents": self.n_documents,
            "vocabulary": list(self.vocabulary),
            "idf": [float(value) for value in self.idf],
            "vocabulary_id": self.vocabulary_id,
        }

    @classmethod
    def from_record(cls, record: dict) -> "TextVectorizer":
        if not isinstance(record, dict) or record.get("format") != VECTORIZER_FORMAT:
            raise ModelFormatError("Kein Vectorizer-Datensatz")
        if record.get("version") != VECTORIZER_VERSION:
            raise ModelFormatError(f"Vectorizer-Version {record.get('version')} wird nicht unterstützt")
        vectorizer = cls(record["vocabulary"], record["idf"], int(record["n_documents"]))
        if vectorizer.vocabulary_id != record.get("vocabulary_id"):
            raise ModelFormatError("vocabulary_id passt nicht zum Vokabular")
        return vectorizer


def fit_text_vectorizer(corpus: Sequence[ScreenDocument]) -> TextVectorizer:
    if not corpus:
        raise EmptyCorpus("Korpus für den TF-IDF-Vectorizer ist leer")

    counter = CountVectorizer(analyzer=tokenize)
    try:
        matrix = counter.fit_transform([doc.text for doc in corpus])
    except ValueError:
        # Korpus ohne ein einziges Token
        logger.warning(f"[Features] Korpus mit {len(corpus)} Dokumenten enthält keine Tokens")
        return TextVectorizer((), (), len(corpus))

    terms = counter.get_feature_names_out()
    totals = np.asarray(matrix.sum(axis=0)).ravel()
    keep = totals >= MIN_TOKEN_COUNT
    df = np.asarray((matrix[:, keep] > 0).sum(axis=0)).ravel()
    n_documents = len(corpus)
    idf = np.log((1 + n_documents) / (1 + df)) + 1
    # get_feature_names_out ist bereits lexikographisch sortiert
    vocabulary = [str(term) for term in terms[keep]]

    logger.debug(f"[Features] Vectorizer gefittet: {len(vocabulary)} Tokens aus {n_documents} Dokumenten")
    return TextVectorizer(vocabulary, idf, n_documents)


def text_features(doc: ScreenDocument, vectorizer: TextVectorizer) -> TextFeatures:
    return vectorizer.transform(doc)


def save_vectorizer(vectorizer: TextVectorizer, path: str) -> None:
    save_yaml(path, vectorizer.to_record())


def load_vectorizer(path: str) -> TextVectorizer:
    return TextVectorizer.from_record(load_yaml(path))


### Visual ###
def visual_features(
    snapshot: UiSnapshot, canvas: tuple[int, int] = DEFAULT_CANVAS, grid: int = DEFAULT_GRID
) -> VisualFeatures:
    return VisualFeatures(channel_fractions(render(snapshot, canvas), grid), grid)


### Embedder ###
class Embedder(Protocol):
    dimension: int

    def embed(self, snapshot: UiSnapshot) -> np.ndarray: ...


class DefaultEmbedder:
    """Visual grid fractions concatenated with TF-IDF text features."""

    def __init__(
        self,
        vectorizer: Optional[TextVectorizer],
        canvas: tuple[int, int] = DEFAULT_CANVAS,
        grid: int = DEFAULT_GRID,
    ):
        self.vectorizer = vectorizer
        self.canvas = canvas
        self.grid = grid

    @property
    def dimension(self) -> int:
        if self.vectorizer is None:
            raise EmbedderUnavailable("DefaultEmbedder ohne gefitteten Vectorizer")
        return 3 * self.grid * self.grid + self.vectorizer.dimension

    def embed(self, snapshot: UiSnapshot) -> np.ndarray:
        if self.vectorizer is None:
            raise EmbedderUnavailable("DefaultEmbedder ohne gefitteten Vectorizer")
        visual = visual_features(snapshot, self.canvas, self.grid).values
        textual = self.vectorizer.transform(screen_document(snapshot)).values
        return np.concatenate([visual, textual])


class VisualEmbedder:
    """Visual part only; used for motif mining before any vocabulary exists."""

    def __init__(self, canvas: tuple[int, int] = DEFAULT_CANVAS, grid: int = DEFAULT_GRID):
        self.canvas = canvas
        self.grid = grid
        self.dimension = 3 * grid * grid

    def embed(self, snapshot: UiSnapshot) -> np.ndarray:
        return visual_features(snapshot, self.canvas, self.grid).values


class NullEmbedder:
    def __init__(self, dimension: int):
        self.dimension = dimension

    def embed(self, snapshot: UiSnapshot) -> np.ndarray:
        return np.zeros(self.dimension, dtype=np.float64)
