"""
Form value store

Vorbelegte Spalten (Kopfzeile = Spaltennamen) mit Werten, die der Form- und LogIn-Heuristik
reihum (round-robin pro Spalte) ausgegeben werden.
"""

import csv
import io
from typing import Optional, Sequence

from tarpitnav.config import DEFAULT_STORE, ENCODING
from tarpitnav.errors import StoreError
from tarpitnav.navigation.matcher import Lexicon, match, normalize
from tarpitnav.utils import Logger

logger = Logger().setup_logger(__file__)


class FormValueStore:
    def __init__(self, columns: dict[str, Sequence[str]]):
        if not columns:
            raise StoreError("Store ohne Spalten")
        self.columns: dict[str, tuple[str, ...]] = {}
        for name, values in columns.items():
            key = normalize(name)
            values = tuple(value for value in values if value is not None and value.strip())
            if not key:
                raise StoreError("Leerer Spaltenname im Store")
            if not values:
                raise StoreError(f"Spalte '{name}' enthält keine Werte")
            self.columns[key] = values
        self.cursors: dict[str, int] = {name: 0 for name in self.columns}

    @property
    def names(self) -> list[str]:
        return list(self.columns)

    def reset(self) -> None:
        self.cursors = {name: 0 for name in self.columns}

    def next_value(self, column: str) -> str:
        """Current value of the column; advances the column's cursor round-robin."""
        key = normalize(column)
        if key not in self.columns:
            raise StoreError(f"Unbekannte Spalte '{column}'")
        values = self.columns[key]
        value = values[self.cursors[key] % len(values)]
        self.cursors[key] = (self.cursors[key] + 1) % len(values)
        return value

    def contains(self, column: str, value: str) -> bool:
        return value in self.columns.get(normalize(column), ())

    def resolve(self, label: str, lexicon: Optional[Lexicon], threshold: float) -> Optional[str]:
        """Column whose name matches the label, or None."""
        result = match(label, self.names, lexicon, threshold)
        return result.candidate if result else None

    @classmethod
    def parse(cls, text: str, source: str = "<store>") -> "FormValueStore":
        rows = list(csv.reader(io.StringIO(text)))
        rows = [row for row in rows if any(cell.strip() for cell in row)]
        if not rows:
            raise StoreError(f"{source}: Store ist leer")
        header = [cell.strip() for cell in rows[0]]
        columns: dict[str, list[str]] = {name: [] for name in header}
        if len(columns) != len(header):
            raise StoreError(f"{source}: doppelte Spaltennamen in der Kopfzeile")
        for row_no, row in enumerate(rows[1:], start=2):
            if len(row) > len(header):
                raise StoreError(f"{source}:{row_no}: mehr Werte als Spalten")
            for name, value in zip(header, row):
                columns[name].append(value.strip())
        try:
            return cls(columns)
        except StoreError as e:
            raise StoreError(f"{source}: {e}") from e

    @classmethod
    def load(cls, path: str = DEFAULT_STORE) -> "FormValueStore":
        with open(path, "r", encoding=ENCODING, newline="") as file:
            store = cls.parse(file.read(), str(path))
        logger.debug(f"[Store] {len(store.columns)} Spalten geladen: {path}")
        return store
