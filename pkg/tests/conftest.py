import os

# vor dem ersten Import von tarpitnav: keine Logdateien aus Testläufen
os.environ.setdefault("TARPITNAV_LOG_IN_FILE", "false")
os.environ.setdefault("TARPITNAV_LOGLEVEL_STREAM", "error")

from pathlib import Path

import pytest

from tarpitnav.config import APPS_DIR
from tarpitnav.device.sim import SimDevice, load_app_file
from tarpitnav.motifs.classifier import train
from tarpitnav.motifs.synthetic import generate_dataset
from tarpitnav.navigation.matcher import Lexicon
from tarpitnav.navigation.store import FormValueStore
from tarpitnav.screen.snapshot import load_snapshot

FIXTURES = Path(__file__).parent / "fixtures"

TARPIT_APPS = {
    "Advertisement": "ad_tarpit",
    "LogIn": "login_tarpit",
    "Form": "form_tarpit",
    "Onboarding": "onboarding_tarpit",
    "Player": "player_tarpit",
    "Viewer": "viewer_tarpit",
    "WebBrowser": "webbrowser_tarpit",
    "Search": "search_tarpit",
}


def fixture_path(name: str) -> str:
    return str(FIXTURES / name)


def snapshot_fixture(name: str, regions: bool = False):
    regions_path = fixture_path(name.replace(".xml", ".regions")) if regions else None
    return load_snapshot(fixture_path(name), regions_path)


def load_app(name: str):
    return load_app_file(str(APPS_DIR / f"{name}.yaml"))


@pytest.fixture(scope="session")
def lexicon() -> Lexicon:
    return Lexicon.load()


@pytest.fixture
def store() -> FormValueStore:
    return FormValueStore.load()


@pytest.fixture
def login_snapshot():
    return snapshot_fixture("login_screen.xml")


@pytest.fixture
def device_factory(store, lexicon):
    def make(app_name: str) -> SimDevice:
        return SimDevice(load_app(app_name), store, lexicon)

    return make


@pytest.fixture(scope="session")
def synthetic_dataset():
    return generate_dataset(per_class=40, seed=0)


@pytest.fixture(scope="session")
def synthetic_model(synthetic_dataset):
    model, report = train(synthetic_dataset, split=0.8, seed=0)
    return model, report
