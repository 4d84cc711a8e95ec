import numpy as np
import pytest

from tarpitnav.errors import DegenerateInput
from tarpitnav.motifs.clustering import cluster_screens, elbow, inertia_curve

OFFSETS = [(0, 0), (0.1, 0), (0, 0.1), (0.1, 0.1), (0.05, 0.05)]


def _blobs(*centers):
    return [[cx + dx, cy + dy] for cx, cy in centers for dx, dy in OFFSETS]


def test_elbow_picks_the_knee():
    assert elbow({1: 100.0, 2: 10.0, 3: 8.0, 4: 7.0}) == 2


def test_elbow_flat_curve_takes_first_k():
    assert elbow({2: 5.0, 3: 5.0, 4: 5.0}) == 2


def test_three_blobs_give_three_clusters():
    clusters, k = cluster_screens(_blobs((0, 0), (10, 0), (0, 10)), (1, 6), seed=0)
    assert k == 3
    assert clusters == [list(range(0, 5)), list(range(5, 10)), list(range(10, 15))]


def test_clustering_is_seeded():
    points = np.random.default_rng(1).random((30, 4)).tolist()
    assert cluster_screens(points, (2, 8), seed=5) == cluster_screens(points, (2, 8), seed=5)


def test_inertia_decreases_with_k():
    curve = inertia_curve(_blobs((0, 0), (10, 0), (0, 10)), (1, 4), seed=0)
    assert list(curve) == [1, 2, 3, 4]
    assert curve[1] > curve[2] > curve[3]


def test_identical_points_are_degenerate():
    with pytest.raises(DegenerateInput):
        cluster_screens([[1.0, 1.0]] * 6, (2, 4))


def test_empty_input_is_degenerate():
    with pytest.raises(DegenerateInput):
        cluster_screens([], (1, 2))


@pytest.mark.parametrize("k_range", [(0, 3), (4, 3), (2, 99)])
def test_invalid_k_range(k_range):
    with pytest.raises(ValueError):
        cluster_screens(_blobs((0, 0), (5, 5)), k_range)


def test_mixed_dimensions():
    with pytest.raises(ValueError):
        cluster_screens([[0.0, 1.0], [1.0]], (1, 1))
