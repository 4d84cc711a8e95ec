"""
Semantic label matching

Token-Set-Jaccard über normalisierte und per Lexikon kanonisierte Labels. Das Lexikon bildet Synonyme
("last name", "family name") auf einen kanonischen Begriff ("surname") ab.
"""

from dataclasses import dataclass
from typing import Optional, Sequence

from tarpitnav.config import DEFAULT_LEXICON, ENCODING, MATCH_THRESHOLD
from tarpitnav.errors import LexiconError
from tarpitnav.utils import Logger, words

logger = Logger().setup_logger(__file__)


def normalize(text: str) -> str:
    """Lowercase, strip punctuation, collapse whitespace."""
    return " ".join(words(text))


def jaccard(a: set[str], b: set[str]) -> float:
    """|A ∩ B| / |A ∪ B|; two empty sets score 0.0."""
    union = a | b
    if not union:
        return 0.0
    return len(a & b) / len(union)


@dataclass(frozen=True)
class MatchResult:
    candidate: str
    score: float


class Lexicon:
    """Canonical term -> synonyms; synonym sets are pairwise disjoint."""

    def __init__(self, entries: dict[str, Sequence[str]]):
        self.entries: dict[str, frozenset[str]] = {}
        owner: dict[str, str] = {}
        for canonical, synonyms in entries.items():
            key = normalize(canonical)
            if not key:
                raise LexiconError("Leerer kanonischer Begriff im Lexikon")
            if key in self.entries:
                raise LexiconError(f"Kanonischer Begriff '{key}' ist doppelt")
            normalized = frozenset(normalize(synonym) for synonym in synonyms) - {""}
            self.entries[key] = normalized
            for synonym in normalized:
                if synonym in owner and owner[synonym] != key:
                    raise LexiconError(f"Synonym '{synonym}' gehört zu '{owner[synonym]}' und '{key}'")
                owner[synonym] = key

        for synonym, canonical in owner.items():
            if synonym in self.entries and synonym != canonical:
                raise LexiconError(f"Synonym '{synonym}' von '{canonical}' ist selbst ein kanonischer Begriff")

        # längste Phrasen zuerst, bei gleicher Länge lexikographisch
        self._phrases = sorted(
            ((tuple(synonym.split()), canonical) for synonym, canonical in owner.items()),
            key=lambda item: (-len(item[0]), item[0]),
        )

    def __len__(self) -> int:
        return len(self.entries)

    def canonical(self, phrase: str) -> str:
        """Replace synonym phrases (on token boundaries, longest first, left to right) by their canonical term."""
        tokens = normalize(phrase).split()
        result: list[str] = []
        i = 0
        while i < len(tokens):
            for synonym, canonical in self._phrases:
                if tuple(tokens[i : i + len(synonym)]) == synonym:
                    result.append(canonical)
                    i += len(synonym)
                    break
            else:
                result.append(tokens[i])
                i += 1
        return " ".join(result)

    def expansions(self, text: str) -> set[str]:
        return {normalize(text), self.canonical(text)}

    @classmethod
    def parse(cls, text: str, source: str = "<lexicon>") -> "Lexicon":
        """Parse `canonical: syn1 | syn2` lines; `#` starts a comment."""
        entries: dict[str, list[str]] = {}
        for line_no, raw in enumerate(text.splitlines(), start=1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            if ":" not in line:
                raise LexiconError(f"{source}:{line_no}: ':' fehlt in '{raw.strip()}'")
            canonical, synonyms = line.split(":", 1)
            if normalize(canonical) in (normalize(key) for key in entries):
                raise LexiconError(f"{source}:{line_no}: '{canonical.strip()}' ist doppelt")
            entries[canonical.strip()] = [synonym for synonym in synonyms.split("|") if synonym.strip()]
        return cls(entries)

    @classmethod
    def load(cls, path: str = DEFAULT_LEXICON) -> "Lexicon":
        with open(path, "r", encoding=ENCODING) as file:
            lexicon = cls.parse(file.read(), str(path))
        logger.debug(f"[Matcher] Lexikon mit {len(lexicon)} Einträgen geladen: {path}")
        return lexicon


def score(a: str, b: str, lexicon: Optional[Lexicon] = None) -> float:
    """Best token-set Jaccard over the lexicon expansions of both sides."""
    left = lexicon.expansions(a) if lexicon else {normalize(a)}
    right = lexicon.expansions(b) if lexicon else {normalize(b)}
    return max(jaccard(set(x.split()), set(y.split())) for x in left for y in right)


def match(
    label: str, candidates: Sequence[str], lexicon: Optional[Lexicon] = None, threshold: float = MATCH_THRESHOLD
) -> Optional[MatchResult]:
    """Best-scoring candidate at or above threshold; earlier candidates win ties."""
    if not 0.0 <= threshold <= 1.0:
        raise ValueError(f"threshold muss in [0, 1] liegen, erhalten: {threshold}")
    best: Optional[MatchResult] = None
    for candidate in candidates:
        value = score(label, candidate, lexicon)
        if best is None or value > best.score:
            best = MatchResult(candidate, value)
    if best is None or best.score < threshold:
        return None
    return best
