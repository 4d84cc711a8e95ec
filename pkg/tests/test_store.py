import pytest

from tarpitnav.errors import StoreError
from tarpitnav.navigation.store import FormValueStore


def test_default_store_columns(store):
    assert store.names[:3] == ["first name", "surname", "name"]
    assert "password" in store.names


def test_values_rotate_per_column(store):
    assert [store.next_value("first name") for _ in range(4)] == ["Anna", "Jonas", "Lea", "Anna"]
    assert store.next_value("Surname") == "Schmidt"


def test_reset_rewinds_cursors(store):
    store.next_value("email")
    store.reset()
    assert store.next_value("email") == "anna.schmidt@example.com"


def test_unknown_column(store):
    with pytest.raises(StoreError):
        store.next_value("colour")


def test_resolve_via_lexicon(store, lexicon):
    assert store.resolve("Family name", lexicon, 0.5) == "surname"
    assert store.resolve("Mobile number", lexicon, 0.5) == "phone"
    assert store.resolve("Favourite colour", lexicon, 0.5) is None


def test_contains(store):
    assert store.contains("username", "tester_anna")
    assert not store.contains("username", "Anna")


def test_short_columns_skip_empty_cells():
    store = FormValueStore.parse("a,b\n1,2\n3,\n")
    assert [store.next_value("b") for _ in range(2)] == ["2", "2"]
    assert [store.next_value("a") for _ in range(2)] == ["1", "3"]


@pytest.mark.parametrize("text", ["", "a,a\n1,2\n", "a,b\n1,2,3\n", "a,b\n1,\n"])
def test_parse_rejects(text):
    with pytest.raises(StoreError):
        FormValueStore.parse(text)
