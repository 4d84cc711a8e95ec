"""
Motif mining

K-Means über Screen-Embeddings, k per Elbow-Methode: maximaler senkrechter Abstand der Inertia-Kurve
zur Geraden zwischen den Endpunkten.
"""

import warnings
from typing import Sequence

import numpy as np
from sklearn.cluster import KMeans
from sklearn.exceptions import ConvergenceWarning

from tarpitnav.errors import DegenerateInput
from tarpitnav.utils import Logger

logger = Logger().setup_logger(__file__)

MAX_ITER = 300
TOLERANCE = 1e-6


def _fit(points: np.ndarray, k: int, seed: int) -> KMeans:
    model = KMeans(n_clusters=k, init="k-means++", n_init=1, max_iter=MAX_ITER, tol=TOLERANCE, random_state=seed)
    with warnings.catch_warnings():
        # mehr Cluster als verschiedene Punkte: sklearn warnt, Inertia ist dann 0
        warnings.simplefilter("ignore", ConvergenceWarning)
        model.fit(points)
    return model


def _as_matrix(embeddings: Sequence[Sequence[float]]) -> np.ndarray:
    if len(embeddings) == 0:
        raise DegenerateInput("Keine Embeddings übergeben")
    dims = {len(vector) for vector in embeddings}
    if len(dims) != 1:
        raise ValueError(f"Embeddings haben unterschiedliche Dimensionen: {sorted(dims)}")
    return np.asarray(embeddings, dtype=np.float64)


def elbow(inertias: dict[int, float]) -> int:
    """k with the largest perpendicular distance to the chord; smallest k on ties, first k if flat."""
    ks = sorted(inertias)
    k_first, k_last = ks[0], ks[-1]
    y_first, y_last = inertias[k_first], inertias[k_last]
    dx, dy = k_last - k_first, y_last - y_first
    norm = float(np.hypot(dx, dy))
    if norm == 0:
        return k_first

    best_k, best_distance = k_first, 0.0
    for k in ks:
        distance = abs(dy * (k - k_first) - dx * (inertias[k] - y_first)) / norm
        if distance > best_distance:
            best_k, best_distance = k, distance
    return best_k


def inertia_curve(embeddings: Sequence[Sequence[float]], k_range: tuple[int, int], seed: int) -> dict[int, float]:
    points = _as_matrix(embeddings)
    kmin, kmax = k_range
    return {k: float(_fit(points, k, seed).inertia_) for k in range(kmin, kmax + 1)}


def cluster_screens(
    embeddings: Sequence[Sequence[float]], k_range: tuple[int, int], seed: int = 0
) -> tuple[list[list[int]], int]:
    """Cluster embeddings for every k in range and keep the elbow.

    Args:
        embeddings: one vector per screen, all of the same dimension
        k_range: inclusive (kmin, kmax)
        seed: seed of the k-means++ initialisation

    Raises:
        DegenerateInput: fewer distinct points than kmin

    Returns:
        tuple: clusters as lists of embedding indices (ordered by first member), chosen k
    """
    points = _as_matrix(embeddings)
    kmin, kmax = k_range
    if kmin < 1 or kmax < kmin:
        raise ValueError(f"Ungültiger k-Bereich: {k_range}")
    if kmax > len(points):
        raise ValueError(f"kmax={kmax} größer als Anzahl Punkte {len(points)}")

    distinct = len(np.unique(points, axis=0))
    if distinct < kmin:
        raise DegenerateInput(f"Nur {distinct} verschiedene Punkte für kmin={kmin}")

    models = {k: _fit(points, k, seed) for k in range(kmin, kmax + 1)}
    inertias = {k: float(model.inertia_) for k, model in models.items()}
    chosen_k = elbow(inertias)

    groups: dict[int, list[int]] = {}
    for index, cluster in enumerate(models[chosen_k].labels_):
        groups.setdefault(int(cluster), []).append(index)
    clusters = sorted(groups.values(), key=lambda members: members[0])

    logger.info(f"[Clustering] {len(points)} Screens, k={chosen_k} gewählt aus {kmin}..{kmax}")
    logger.debug(f"[Clustering] Inertia: {inertias}")
    return clusters, chosen_k
