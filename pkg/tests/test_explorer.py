import pytest

from tarpitnav.config import RANDOM_TOKEN_LENGTH
from tarpitnav.device.actions import Back, Tap, TypeText
from tarpitnav.device.explorer import RandomExplorer, random_explorer
from tests.conftest import snapshot_fixture


def test_same_seed_same_trace(device_factory):
    first = random_explorer(device_factory("composite_1"), seed=11, budget=300)
    second = random_explorer(device_factory("composite_1"), seed=11, budget=300)
    assert first == second
    assert len(first) == 300


def test_different_seeds_differ(device_factory):
    first = random_explorer(device_factory("composite_1"), seed=1, budget=100)
    second = random_explorer(device_factory("composite_1"), seed=2, budget=100)
    assert first != second


def test_clock_advances_per_action(device_factory):
    device = device_factory("ad_tarpit")
    trace = random_explorer(device, seed=0, budget=10, action_ms=200)
    assert [step.at for step in trace] == list(range(0, 2000, 200))
    assert device.now_ms == 2000


def test_zero_budget(device_factory):
    assert random_explorer(device_factory("ad_tarpit"), seed=0, budget=0) == []


def test_negative_budget(device_factory):
    with pytest.raises(ValueError):
        random_explorer(device_factory("ad_tarpit"), seed=0, budget=-1)


def test_actions_stay_on_screen(login_snapshot):
    explorer = RandomExplorer(seed=4)
    for _ in range(500):
        action = explorer.next_action(login_snapshot)
        if isinstance(action, Tap):
            assert 0 <= action.x < 1080 and 0 <= action.y < 1920
        elif isinstance(action, TypeText):
            assert action.node_id in (1, 2)
            assert len(action.text) == RANDOM_TOKEN_LENGTH
        else:
            assert isinstance(action, Back)


def test_type_falls_back_to_tap_without_fields():
    explorer = RandomExplorer(seed=0, action_mix=(0, 0, 1))
    action = explorer.next_action(snapshot_fixture("viewer_screen.xml"))
    assert isinstance(action, Tap)


@pytest.mark.parametrize("mix", [(1, 1), (-1, 1, 1), (0, 0, 0)])
def test_bad_action_mix(mix):
    with pytest.raises(ValueError):
        RandomExplorer(seed=0, action_mix=mix)


def test_random_exploration_stays_in_the_ad(device_factory):
    device = device_factory("ad_tarpit")
    random_explorer(device, seed=3, budget=500)
    assert "product" not in device.covered_screens
