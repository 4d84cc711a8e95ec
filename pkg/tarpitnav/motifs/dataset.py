"""
Labeled screen datasets

Manifest-Format (CSV mit Kopfzeile): source_id,label,hierarchy-path,regions-path. Pfade sind relativ
zum Verzeichnis des Manifests, regions-path darf leer sein.
"""

import csv
import os
from dataclasses import dataclass
from typing import Iterable, Optional

from tarpitnav.config import ENCODING
from tarpitnav.errors import DatasetError, TarpitNavError
from tarpitnav.motifs.taxonomy import MotifLabel
from tarpitnav.screen.snapshot import UiSnapshot, format_regions, load_snapshot, serialize_hierarchy
from tarpitnav.utils import Logger, make_dir

logger = Logger().setup_logger(__file__)

MANIFEST_FIELDS = ("source_id", "label", "hierarchy-path", "regions-path")
MANIFEST_NAME = "manifest.csv"


@dataclass(frozen=True)
class LabeledScreen:
    snapshot: UiSnapshot
    label: MotifLabel
    source_id: str


@dataclass(frozen=True)
class ManifestRecord:
    source_id: str
    label: MotifLabel
    hierarchy_path: str
    regions_path: Optional[str]


def read_manifest(path: str) -> list[ManifestRecord]:
    base = os.path.dirname(os.path.abspath(path))
    records: list[ManifestRecord] = []
    seen: set[str] = set()
    with open(path, "r", encoding=ENCODING, newline="") as file:
        reader = csv.DictReader(file)
        missing = [name for name in MANIFEST_FIELDS[:3] if name not in (reader.fieldnames or [])]
        if missing:
            raise DatasetError(f"{path}: Spalten fehlen im Manifest: {', '.join(missing)}")

        for row_no, row in enumerate(reader, start=2):
            source_id = (row.get("source_id") or "").strip()
            if not source_id:
                raise DatasetError(f"{path}:{row_no}: source_id ist leer")
            if source_id in seen:
                raise DatasetError(f"{path}:{row_no}: source_id '{source_id}' ist doppelt")
            seen.add(source_id)
            try:
                label = MotifLabel.parse(row.get("label", ""))
            except ValueError as e:
                raise DatasetError(f"{path}:{row_no}: {e}") from e
            regions = (row.get("regions-path") or "").strip()
            records.append(
                ManifestRecord(
                    source_id,
                    label,
                    os.path.join(base, row["hierarchy-path"].strip()),
                    os.path.join(base, regions) if regions else None,
                )
            )
    return records


def load_dataset(path: str) -> list[LabeledScreen]:
    """Load every screen listed in a manifest."""
    dataset = []
    for record in read_manifest(path):
        try:
            snapshot = load_snapshot(record.hierarchy_path, record.regions_path)
        except (OSError, TarpitNavError) as e:
            raise DatasetError(f"{record.source_id}: {e}") from e
        dataset.append(LabeledScreen(snapshot, record.label, record.source_id))
    logger.info(f"[Dataset] {len(dataset)} Screens aus {path} geladen")
    return dataset


def write_dataset(dataset: Iterable[LabeledScreen], directory: str) -> str:
    """Write hierarchy/regions files plus manifest into `directory`; returns the manifest path."""
    make_dir(directory)
    rows = []
    for screen in dataset:
        hierarchy_name = f"{screen.source_id}.xml"
        with open(os.path.join(directory, hierarchy_name), "w", encoding=ENCODING) as file:
            file.write(serialize_hierarchy(screen.snapshot.hierarchy))

        regions_name = ""
        if screen.snapshot.text_regions:
            regions_name = f"{screen.source_id}.regions"
            with open(os.path.join(directory, regions_name), "w", encoding=ENCODING) as file:
                file.write(format_regions(screen.snapshot.text_regions))
        rows.append((screen.source_id, screen.label.value, hierarchy_name, regions_name))

    manifest = os.path.join(directory, MANIFEST_NAME)
    with open(manifest, "w", encoding=ENCODING, newline="") as file:
        writer = csv.writer(file)
        writer.writerow(MANIFEST_FIELDS)
        writer.writerows(rows)
    logger.info(f"[Dataset] {len(rows)} Screens nach {directory} geschrieben")
    return manifest
