import os
import re
from dataclasses import dataclass
from importlib import metadata
from pathlib import Path

from dotenv import load_dotenv

# init dotenv
load_dotenv(override=True)


def env(env_var: str, default: str = None) -> str:
    """Umgebungsvariable lesen; nur für Logging-Einstellungen genutzt."""
    return os.getenv(env_var, default)


def env_flag(env_var: str, default: bool) -> bool:
    value = env(env_var)
    if value is None:
        return default
    return value.strip().lower() in ("1", "true", "yes", "on")


VERSION_PATTERN = re.compile(r'^version\s*=\s*["\']([^"\']+)["\']', re.MULTILINE)


def get_version() -> str:
    """Version aus der pyproject.toml im Checkout, sonst aus den installierten Paket-Metadaten."""
    pyproject = Path(__file__).resolve().parent.parent / "pyproject.toml"
    if pyproject.is_file():
        found = VERSION_PATTERN.search(pyproject.read_text(encoding="utf-8"))
        if found:
            return found.group(1)
    try:
        return metadata.version("tarpitnav")
    except metadata.PackageNotFoundError:
        return "unknown"


### Generic ###
TARPITNAV_VERSION = get_version()
ENCODING = "utf-8"

### Pathinformation ###
STATIC_DIR = Path(__file__).parent / "static"
DEFAULT_LEXICON = STATIC_DIR / "lexicon.txt"
DEFAULT_STORE = STATIC_DIR / "form_values.csv"
APPS_DIR = STATIC_DIR / "apps"

### Screen ###
DEFAULT_SCREEN_SIZE = (1080, 1920)
DEFAULT_CANVAS = (144, 256)
DEFAULT_GRID = 8
# Anteil der Knotenfläche, ab dem ein Knoten ohne Label als Text gilt (genau 50% zählt)
TEXTUAL_COVERAGE = 0.5

### Detector ###
TRIGGER_MS = 10_000
POLL_INTERVAL_MS = 1_000
TRACE_MIN_ACTIONS = 5
TRACE_MIN_MS = 10_000
TRACE_TOP_K = 200
# Sweep aus der Trigger-Kalibrierung: 10s bis 30s in 5s Schritten
TRIGGER_SWEEP_MS = (10_000, 15_000, 20_000, 25_000, 30_000)

### Navigator ###
TOP_N_HEURISTICS = 3
MATCH_THRESHOLD = 0.5
ONBOARDING_PAGES = 5
WAIT_SHORT_MS = 500
WAIT_LONG_MS = 1_000
AD_CLOSE_BAND = 0.15
LABEL_SEARCH_FACTOR = 1.5

### Session ###
ACTION_BUDGET = 500
EXPLORE_ACTION_MS = 200
HEURISTIC_ACTION_MS = 1_000
# Monkey-artiger Mix: (tap, back, type)
ACTION_MIX = (0.8, 0.1, 0.1)
RANDOM_TOKEN_LENGTH = 6
REPORT_VERSION = 1


### Classifier ###
@dataclass(frozen=True)
class ClassifierConfig:
    trees: int = 100
    max_depth: int = 16
    mlp_hidden: int = 64
    mlp_epochs: int = 300
    folds: int = 5
    split: float = 0.8


classifier_cfg = ClassifierConfig()
MODEL_FORMAT = "tarpitnav-model"
MODEL_VERSION = 1
VECTORIZER_VERSION = 1


### LOGGING ###
@dataclass
class LoggerConfig:
    dir: str = env("TARPITNAV_LOG_DIR", "logs")
    format: str = "%(asctime)s - %(filename)s L%(lineno)d - %(levelname)s - %(message)s"
    datefmt: str = "%d.%m.%y %H:%M:%S"
    log_in_file: bool = env_flag("TARPITNAV_LOG_IN_FILE", True)
    log_in_stream: bool = env_flag("TARPITNAV_LOG_IN_STREAM", True)
    loglevel_file: str = env("TARPITNAV_LOGLEVEL_FILE", "info")
    loglevel_stream: str = env("TARPITNAV_LOGLEVEL_STREAM", "warning")
    filename_datefmt: str = "%Y%m%d"
    filename_prefix: str = "log"


logger_cfg = LoggerConfig()
