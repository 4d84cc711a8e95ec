import logging

import pytest

from tarpitnav.utils import Logger, dump_yaml, fnv1a_64, load_yaml, nested_get, save_yaml

DATA = {"screens": [{"id": "home", "size": "12"}, {"id": "login"}], "app": None}


@pytest.mark.parametrize(
    "keys, expected",
    [
        (["screens", 0, "id"], "home"),
        ("screens.1.id", "login"),
        (["screens", -1, "id"], "login"),
        (["screens", 5, "id"], None),
        (["screens", "x"], None),
        (["app", "name"], None),
        (["missing"], None),
    ],
)
def test_nested_get(keys, expected):
    assert nested_get(DATA, keys) == expected


def test_nested_get_default_and_cast():
    assert nested_get(DATA, "screens.0.size", int) == 12
    assert nested_get(DATA, ["app"], default="fallback") == "fallback"
    with pytest.raises(ValueError):
        nested_get(DATA, "screens.0.id", int)


def test_fnv1a_reference_values():
    assert fnv1a_64("") == 0xCBF29CE484222325
    assert fnv1a_64("a") == 0xAF63DC4C8601EC8C
    assert fnv1a_64("a") == fnv1a_64(b"a")


def test_yaml_round_trip_keeps_key_order(tmp_path):
    path = str(tmp_path / "sub" / "data.yaml")
    save_yaml(path, {"b": 1, "a": [1, 2]})
    assert list(load_yaml(path)) == ["b", "a"]
    assert dump_yaml({"b": 1, "a": 2}) == "a: 2\nb: 1\n"


def test_logger_is_a_singleton_and_names_modules():
    assert Logger() is Logger()
    logger = Logger().setup_logger(__file__)
    assert logger.name.endswith("test_utils")
    assert len(Logger().setup_logger(__file__).handlers) == len(logger.handlers)


@pytest.mark.parametrize("name, level", [("info", logging.INFO), ("WARNING", logging.WARNING)])
def test_loglevel(name, level):
    assert Logger.get_loglevel(name) == level


def test_unknown_loglevel():
    with pytest.raises(ValueError):
        Logger.get_loglevel("loud")
