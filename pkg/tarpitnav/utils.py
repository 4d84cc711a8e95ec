import logging
import os
import re
from datetime import datetime
from pathlib import Path
from typing import Any, Optional, Sequence, Union

import yaml

from tarpitnav.config import ENCODING, logger_cfg

# FNV-1a, 64 bit: feste Parameter, damit Digests über Läufe und Plattformen stabil bleiben
FNV64_OFFSET = 0xCBF29CE484222325
FNV64_PRIME = 0x100000001B3
FNV64_MASK = 0xFFFFFFFFFFFFFFFF

PACKAGE_ROOT = Path(__file__).resolve().parent
PUNCTUATION = re.compile(r"[^\w\s]")


def nested_get(
    nested_input: Any,
    keys: Union[str, Sequence[Union[str, int]]],
    cast_type: Optional[type] = None,
    default: Any = None,
) -> Any:
    """Read a value from nested YAML data (dicts and lists).

    Args:
        nested_input (Any): parsed YAML/dict data
        keys (str | Sequence): key path, either a list or a dotted string like "screens.0.id"
        cast_type (type): convert the found value
        default (Any): returned when any step of the path is missing or None

    Returns:
        Any: value at the path, cast if requested

    Raises:
        ValueError: value exists but cannot be cast
    """
    if isinstance(keys, str):
        keys = [int(part) if part.isdigit() else part for part in keys.split(".")]

    value = nested_input
    for key in keys:
        if isinstance(value, dict):
            value = value.get(key)
        elif isinstance(value, list) and isinstance(key, int) and -len(value) <= key < len(value):
            value = value[key]
        else:
            return default
        if value is None:
            return default

    if cast_type is None:
        return value
    try:
        return cast_type(value)
    except (TypeError, ValueError) as e:
        raise ValueError(f"{'.'.join(str(k) for k in keys)}: {value!r} ist kein {cast_type.__name__}") from e


def words(text: Optional[str]) -> list[str]:
    """Lowercase tokens with punctuation removed ("E-mail:" -> ["email"])."""
    return PUNCTUATION.sub("", (text or "").lower()).split()


def fnv1a_64(data: Union[str, bytes]) -> int:
    """64-bit FNV-1a hash over the UTF-8 bytes of `data`."""
    if isinstance(data, str):
        data = data.encode(ENCODING)
    value = FNV64_OFFSET
    for byte in data:
        value ^= byte
        value = (value * FNV64_PRIME) & FNV64_MASK
    return value


### YAML ###
def load_yaml(yaml_file: str) -> Any:
    with open(yaml_file, "r", encoding=ENCODING) as stream:
        return yaml.safe_load(stream)


def save_yaml(yaml_file: str, data: Any) -> None:
    """YAML-Datei speichern, Reihenfolge der Keys bleibt erhalten"""
    make_dir(os.path.dirname(yaml_file))
    with open(yaml_file, "w", encoding=ENCODING) as stream:
        stream.write(yaml.safe_dump(data, default_flow_style=False, allow_unicode=True, sort_keys=False))


def dump_yaml(data: Any) -> str:
    """Canonical YAML text: sorted keys, block style. Used wherever output is compared byte-for-byte."""
    return yaml.safe_dump(data, default_flow_style=False, allow_unicode=True, sort_keys=True)


def make_dir(dirname: str) -> None:
    if dirname:
        os.makedirs(dirname, exist_ok=True)


### INIT LOGGER ###
class Logger:
    """Prozessweiter Logger-Setup; jedes Modul holt sich seinen Logger über `setup_logger(__file__)`."""

    _instance = None

    def __new__(cls, *args, **kwargs):
        if cls._instance is None:
            cls._instance = super().__new__(cls)
            cls._instance.formatter = logging.Formatter(logger_cfg.format, datefmt=logger_cfg.datefmt)
            cls._instance.log_path = None
            if logger_cfg.log_in_file:
                make_dir(logger_cfg.dir)
                stamp = datetime.now().strftime(logger_cfg.filename_datefmt)
                cls._instance.log_path = os.path.join(logger_cfg.dir, f"{logger_cfg.filename_prefix}_{stamp}.log")
        return cls._instance

    @staticmethod
    def get_loglevel(level: str) -> int:
        """Loglevel-Name ("info", "WARNING", ...) in `logging`-Level umwandeln."""
        value = logging.getLevelName(str(level).upper())
        if not isinstance(value, int):
            raise ValueError(f"{level} ist kein gültiges Loglevel")
        return value

    @staticmethod
    def logger_name(code_file: str) -> str:
        """Dotted module name for files inside the package, file stem otherwise."""
        path = Path(code_file).resolve()
        try:
            parts = path.relative_to(PACKAGE_ROOT.parent).with_suffix("").parts
        except ValueError:
            return path.stem
        return ".".join(parts)

    def setup_logger(self, code_file: str) -> logging.Logger:
        logger = logging.getLogger(self.logger_name(code_file))
        logger.setLevel(logging.DEBUG)
        logger.propagate = False

        # Handler nur einmal pro Modul
        if logger.handlers:
            return logger

        if self.log_path:
            file_handler = logging.FileHandler(self.log_path, encoding=ENCODING)
            file_handler.setLevel(self.get_loglevel(logger_cfg.loglevel_file))
            file_handler.setFormatter(self.formatter)
            logger.addHandler(file_handler)

        if logger_cfg.log_in_stream:
            stream_handler = logging.StreamHandler()
            stream_handler.setLevel(self.get_loglevel(logger_cfg.loglevel_stream))
            stream_handler.setFormatter(self.formatter)
            logger.addHandler(stream_handler)

        if not logger.handlers:
            logger.addHandler(logging.NullHandler())
        return logger
