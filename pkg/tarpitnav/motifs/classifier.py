"""
Fused motif classifier

Zwei Basis-Klassifikatoren (Random Forest auf Silhouette-Features, MLP auf TF-IDF-Features) und ein
Random-Forest-Combiner auf den 42 Klassenwahrscheinlichkeiten beider Basen. Der Combiner lernt auf
Out-of-Fold-Vorhersagen der Basen.
"""

import pickle
import warnings
from dataclasses import dataclass, field
from typing import Any, Hashable, Optional, Protocol, Sequence

import joblib
import numpy as np
from sklearn.base import clone
from sklearn.ensemble import RandomForestClassifier
from sklearn.exceptions import ConvergenceWarning
from sklearn.metrics import accuracy_score, confusion_matrix, precision_recall_fscore_support
from sklearn.model_selection import StratifiedKFold, cross_val_predict
from sklearn.neural_network import MLPClassifier

from tarpitnav.config import (
    DEFAULT_CANVAS,
    DEFAULT_GRID,
    MODEL_FORMAT,
    MODEL_VERSION,
    ClassifierConfig,
    classifier_cfg,
)
from tarpitnav.errors import InsufficientClassSupport, ModelFormatError
from tarpitnav.motifs.dataset import LabeledScreen
from tarpitnav.motifs.taxonomy import MOTIF_ORDER, MOTIFS, MotifLabel, MotifPrediction
from tarpitnav.screen.features import TextVectorizer, fit_text_vectorizer, screen_document, visual_features
from tarpitnav.screen.snapshot import UiSnapshot
from tarpitnav.utils import Logger

logger = Logger().setup_logger(__file__)

N_MOTIFS = len(MOTIFS)


class Predictor(Protocol):
    def predict(self, snapshot: UiSnapshot) -> MotifPrediction: ...


### Evaluation ###
def _label_key(label: Hashable):
    if isinstance(label, MotifLabel):
        return (0, MOTIF_ORDER[label], "")
    return (1, 0, str(label))


def _label_name(label: Hashable) -> str:
    return label.value if isinstance(label, MotifLabel) else str(label)


@dataclass(frozen=True)
class EvalReport:
    accuracy: float
    macro_precision: float
    macro_recall: float
    macro_f1: float
    labels: tuple[str, ...]
    per_class: dict[str, dict[str, float]] = field(hash=False)
    confusion: tuple[tuple[int, ...], ...]

    @classmethod
    def from_labels(cls, y_true: Sequence[Hashable], y_pred: Sequence[Hashable]) -> "EvalReport":
        """Metrics over raw label lists; labels are the union of both sides.

        Precision einer nie vorhergesagten Klasse ist 0 (zero_division=0).
        """
        if len(y_true) == 0:
            raise ValueError("Testmenge ist leer")
        if len(y_true) != len(y_pred):
            raise ValueError("y_true und y_pred haben unterschiedliche Länge")

        labels = sorted(set(y_true) | set(y_pred), key=_label_key)
        names = [_label_name(label) for label in labels]
        true_names = [_label_name(label) for label in y_true]
        pred_names = [_label_name(label) for label in y_pred]

        precision, recall, f1, support = precision_recall_fscore_support(
            true_names, pred_names, labels=names, average=None, zero_division=0
        )
        matrix = confusion_matrix(true_names, pred_names, labels=names)
        per_class = {
            name: {
                "precision": float(precision[i]),
                "recall": float(recall[i]),
                "f1": float(f1[i]),
                "support": int(support[i]),
            }
            for i, name in enumerate(names)
        }
        return cls(
            accuracy=float(accuracy_score(true_names, pred_names)),
            macro_precision=float(np.mean(precision)),
            macro_recall=float(np.mean(recall)),
            macro_f1=float(np.mean(f1)),
            labels=tuple(names),
            per_class=per_class,
            confusion=tuple(tuple(int(value) for value in row) for row in matrix),
        )

    def to_dict(self) -> dict:
        return {
            "accuracy": self.accuracy,
            "macro_precision": self.macro_precision,
            "macro_recall": self.macro_recall,
            "macro_f1": self.macro_f1,
            "labels": list(self.labels),
            "per_class": self.per_class,
            "confusion": [list(row) for row in self.confusion],
        }


### Model ###
def _expand(probabilities: np.ndarray, classes: Sequence[int]) -> np.ndarray:
    """Map estimator probability columns (its own classes_) onto the 21 motif columns."""
    full = np.zeros((probabilities.shape[0], N_MOTIFS), dtype=np.float64)
    full[:, np.asarray(classes, dtype=int)] = probabilities
    return full


@dataclass
class FusedModel:
    visual_base: RandomForestClassifier
    textual_base: MLPClassifier
    combiner: RandomForestClassifier
    vectorizer: TextVectorizer
    training_seed: int
    canvas: tuple[int, int] = DEFAULT_CANVAS
    grid: int = DEFAULT_GRID

    def visual_matrix(self, snapshots: Sequence[UiSnapshot]) -> np.ndarray:
        return np.vstack([visual_features(snapshot, self.canvas, self.grid).values for snapshot in snapshots])

    def text_matrix(self, snapshots: Sequence[UiSnapshot]) -> np.ndarray:
        if self.vectorizer.dimension == 0:
            return np.zeros((len(snapshots), 1))
        return np.vstack([self.vectorizer.transform(screen_document(snapshot)).values for snapshot in snapshots])

    def base_probabilities(self, snapshots: Sequence[UiSnapshot]) -> np.ndarray:
        visual = _expand(self.visual_base.predict_proba(self.visual_matrix(snapshots)), self.visual_base.classes_)
        textual = _expand(self.textual_base.predict_proba(self.text_matrix(snapshots)), self.textual_base.classes_)
        return np.hstack([visual, textual])

    def predict_many(self, snapshots: Sequence[UiSnapshot]) -> list[MotifPrediction]:
        if not snapshots:
            return []
        combined = _expand(self.combiner.predict_proba(self.base_probabilities(snapshots)), self.combiner.classes_)
        return [MotifPrediction.from_probabilities(row) for row in combined]

    def predict(self, snapshot: UiSnapshot) -> MotifPrediction:
        return self.predict_many([snapshot])[0]


def predict(model: Predictor, snapshot: UiSnapshot) -> MotifPrediction:
    return model.predict(snapshot)


### Training ###
def stratified_split(labels: Sequence[MotifLabel], split: float, seed: int) -> tuple[list[int], list[int]]:
    """Seeded per-label shuffle; every label keeps at least one sample on each side."""
    if not 0 < split < 1:
        raise ValueError(f"split muss in (0, 1) liegen, erhalten: {split}")
    rng = np.random.default_rng(seed)
    by_label: dict[MotifLabel, list[int]] = {}
    for index, label in enumerate(labels):
        by_label.setdefault(label, []).append(index)

    train, test = [], []
    for label in sorted(by_label, key=MOTIF_ORDER.get):
        members = [by_label[label][i] for i in rng.permutation(len(by_label[label]))]
        n_train = min(len(members) - 1, max(1, int(split * len(members) + 0.5)))
        train += members[:n_train]
        test += members[n_train:]
    return sorted(train), sorted(test)


def _out_of_fold(estimator, features: np.ndarray, y: np.ndarray, folds: int, seed: int) -> np.ndarray:
    classes, counts = np.unique(y, return_counts=True)
    if counts.max() < 2:
        # keine Klasse lässt sich auf zwei Folds verteilen: In-Sample-Wahrscheinlichkeiten
        fitted = clone(estimator).fit(features, y)
        return _expand(fitted.predict_proba(features), fitted.classes_)
    n_splits = max(2, min(folds, int(counts.min())))
    cv = StratifiedKFold(n_splits=n_splits, shuffle=True, random_state=seed)
    with warnings.catch_warnings():
        # kleine Klassen: sklearn warnt über fehlende Klassen in einzelnen Folds
        warnings.simplefilter("ignore", UserWarning)
        probabilities = cross_val_predict(clone(estimator), features, y, cv=cv, method="predict_proba")
    return _expand(probabilities, classes)


def _bases(config: ClassifierConfig, seed: int) -> tuple[RandomForestClassifier, MLPClassifier]:
    visual = RandomForestClassifier(n_estimators=config.trees, max_depth=config.max_depth, random_state=seed)
    textual = MLPClassifier(hidden_layer_sizes=(config.mlp_hidden,), max_iter=config.mlp_epochs, random_state=seed)
    return visual, textual


def fit_model(
    screens: Sequence[LabeledScreen],
    seed: int,
    canvas: tuple[int, int] = DEFAULT_CANVAS,
    grid: int = DEFAULT_GRID,
    config: ClassifierConfig = classifier_cfg,
) -> FusedModel:
    """Fit vectorizer, both bases and the combiner on `screens`."""
    snapshots = [screen.snapshot for screen in screens]
    y = np.array([screen.label.position for screen in screens], dtype=int)

    vectorizer = fit_text_vectorizer([screen_document(snapshot) for snapshot in snapshots])
    visual_base, textual_base = _bases(config, seed)
    model = FusedModel(visual_base, textual_base, None, vectorizer, seed, canvas, grid)

    visual = model.visual_matrix(snapshots)
    textual = model.text_matrix(snapshots)

    with warnings.catch_warnings():
        warnings.simplefilter("ignore", ConvergenceWarning)
        stacked = np.hstack(
            [
                _out_of_fold(visual_base, visual, y, config.folds, seed),
                _out_of_fold(textual_base, textual, y, config.folds, seed),
            ]
        )
        visual_base.fit(visual, y)
        textual_base.fit(textual, y)

    combiner = RandomForestClassifier(n_estimators=config.trees, max_depth=config.max_depth, random_state=seed)
    combiner.fit(stacked, y)
    model.combiner = combiner
    logger.debug(f"[Classifier] Modell auf {len(screens)} Screens gefittet, Vokabular {vectorizer.dimension}")
    return model


def train(
    dataset: Sequence[LabeledScreen],
    split: float = classifier_cfg.split,
    seed: int = 0,
    canvas: tuple[int, int] = DEFAULT_CANVAS,
    grid: int = DEFAULT_GRID,
    config: ClassifierConfig = classifier_cfg,
) -> tuple[FusedModel, EvalReport]:
    """Stratified split, fit on the train side, evaluate on the held-out side.

    Raises:
        InsufficientClassSupport: a label occurs fewer than two times
    """
    counts: dict[MotifLabel, int] = {}
    for screen in dataset:
        counts[screen.label] = counts.get(screen.label, 0) + 1
    if not counts:
        raise InsufficientClassSupport("Datensatz ist leer")
    thin = sorted((label for label, count in counts.items() if count < 2), key=MOTIF_ORDER.get)
    if thin:
        raise InsufficientClassSupport(f"Weniger als 2 Screens für: {', '.join(label.value for label in thin)}")

    train_idx, test_idx = stratified_split([screen.label for screen in dataset], split, seed)
    model = fit_model([dataset[i] for i in train_idx], seed, canvas, grid, config)
    report = evaluate(model, [dataset[i] for i in test_idx])
    logger.info(
        f"[Classifier] Training: {len(train_idx)} Train / {len(test_idx)} Test, "
        f"Accuracy {report.accuracy:.3f}, Macro-F1 {report.macro_f1:.3f}"
    )
    return model, report


def evaluate(model: Predictor, testset: Sequence[LabeledScreen]) -> EvalReport:
    if not testset:
        raise ValueError("Testmenge ist leer")
    if isinstance(model, FusedModel):
        predictions = model.predict_many([screen.snapshot for screen in testset])
    else:
        predictions = [model.predict(screen.snapshot) for screen in testset]
    return EvalReport.from_labels([screen.label for screen in testset], [pred.top for pred in predictions])


### Archive ###
def save_model(model: FusedModel, path: str) -> None:
    archive = {
        "format": MODEL_FORMAT,
        "version": MODEL_VERSION,
        "visual_base": model.visual_base,
        "textual_base": model.textual_base,
        "combiner": model.combiner,
        "vectorizer": model.vectorizer.to_record(),
        "training_seed": model.training_seed,
        "canvas": list(model.canvas),
        "grid": model.grid,
    }
    joblib.dump(archive, path)
    logger.info(f"[Classifier] Modell gespeichert: {path}")


def load_model(path: str) -> FusedModel:
    try:
        archive: Any = joblib.load(path)
    except (OSError, EOFError, ValueError, pickle.UnpicklingError) as e:
        raise ModelFormatError(f"{path}: Modell nicht lesbar: {e}") from e
    if not isinstance(archive, dict) or archive.get("format") != MODEL_FORMAT:
        raise ModelFormatError(f"{path}: kein tarpitnav-Modell")
    if archive.get("version") != MODEL_VERSION:
        raise ModelFormatError(f"{path}: Modellversion {archive.get('version')} wird nicht unterstützt")
    return FusedModel(
        archive["visual_base"],
        archive["textual_base"],
        archive["combiner"],
        TextVectorizer.from_record(archive["vectorizer"]),
        int(archive["training_seed"]),
        tuple(archive["canvas"]),
        int(archive["grid"]),
    )


class StubPredictor:
    """Fixed prediction for every snapshot; uniform when constructed without probabilities."""

    def __init__(self, probabilities: Optional[Sequence[float]] = None):
        self.prediction = MotifPrediction.from_probabilities(
            probabilities if probabilities is not None else np.ones(N_MOTIFS)
        )

    def predict(self, snapshot: UiSnapshot) -> MotifPrediction:
        return self.prediction
