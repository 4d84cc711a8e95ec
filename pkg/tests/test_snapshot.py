import pytest

from tarpitnav.errors import EmptyDocument, MalformedBounds, MalformedDocument
from tarpitnav.screen.snapshot import (
    Bounds,
    TextRegion,
    TextSource,
    Textuality,
    UiSnapshot,
    node_textuality,
    parse_bounds,
    parse_hierarchy,
    parse_regions,
    serialize_hierarchy,
    signature,
)
from tests.conftest import snapshot_fixture

WRAP = '<hierarchy>{}</hierarchy>'


def test_login_fixture_has_four_nodes_in_document_order(login_snapshot):
    nodes = login_snapshot.nodes
    assert [node.node_id for node in nodes] == [0, 1, 2, 3]
    assert [node.short_class for node in nodes] == ["FrameLayout", "EditText", "EditText", "Button"]
    assert nodes[1].ancestor_class == "android.widget.FrameLayout"
    assert nodes[0].ancestor_class == ""
    assert nodes[3].label == "Log in"
    assert nodes[3].bounds == Bounds(90, 1100, 990, 1260)
    assert login_snapshot.screen_size == (1080, 1920)


def test_edit_text_counts_as_editable_without_attribute(login_snapshot):
    assert [node.node_id for node in login_snapshot.editable_nodes] == [1, 2]


def test_editable_attribute_wins_over_class_name():
    root = parse_hierarchy(
        WRAP.format(
            '<node class="android.widget.FrameLayout" bounds="[0,0][10,10]">'
            '<node class="android.widget.EditText" editable="false" bounds="[0,0][5,5]"/>'
            '<node class="android.widget.TextView" editable="true" bounds="[5,5][10,10]"/>'
            "</node>"
        )
    )
    assert [child.editable for child in root.children] == [False, True]


def test_content_desc_is_label_fallback():
    root = parse_hierarchy(
        WRAP.format('<node class="android.widget.ImageButton" text="" content-desc="Close" bounds="[0,0][4,4]"/>')
    )
    assert root.label == "Close"


def test_bare_node_root_without_wrapper():
    root = parse_hierarchy('<node class="android.widget.FrameLayout" bounds="[0,0][100,200]"/>')
    assert root.is_leaf
    assert root.bounds.area == 20_000


@pytest.mark.parametrize(
    "document, error",
    [
        ("", EmptyDocument),
        ("   \n", EmptyDocument),
        ("<hierarchy></hierarchy>", EmptyDocument),
        ("<hierarchy><node bounds='[0,0][1,1]'>", MalformedDocument),
        ("<hierarchy><view bounds='[0,0][1,1]'/></hierarchy>", MalformedDocument),
        ("<hierarchy><node bounds='[0,0][1,1]'/><node bounds='[0,0][1,1]'/></hierarchy>", MalformedDocument),
        ("<hierarchy><node bounds='[0,0][1,1]'><img/></node></hierarchy>", MalformedDocument),
        ("<hierarchy><node bounds='0,0,1,1'/></hierarchy>", MalformedBounds),
        ("<hierarchy><node class='x'/></hierarchy>", MalformedBounds),
    ],
)
def test_parse_hierarchy_rejects_bad_documents(document, error):
    with pytest.raises(error):
        parse_hierarchy(document)


@pytest.mark.parametrize(
    "text, expected",
    [
        ("[0,0][1080,1920]", Bounds(0, 0, 1080, 1920)),
        ("  [1,2][3,4] ", Bounds(1, 2, 3, 4)),
        ("[5,5][5,9]", Bounds(5, 5, 5, 9)),
    ],
)
def test_parse_bounds(text, expected):
    assert parse_bounds(text) == expected


@pytest.mark.parametrize("text", ["[10,0][5,5]", "[0,10][5,5]", "[-1,0][5,5]", "[0,0]", "[a,0][1,1]", None])
def test_parse_bounds_rejects(text):
    with pytest.raises(MalformedBounds):
        parse_bounds(text)


def test_bounds_contains_is_half_open():
    box = Bounds(10, 10, 20, 20)
    assert box.contains(10, 10)
    assert box.contains(19, 19)
    assert not box.contains(20, 15)
    assert not box.contains(15, 20)


def test_serialize_parse_round_trip(login_snapshot):
    root = login_snapshot.hierarchy
    assert parse_hierarchy(serialize_hierarchy(root)) == root


def test_parse_regions():
    regions = parse_regions("Sign in\t10,20,110,60\n\nHello world\t0,0,5,5\n")
    assert [region.text for region in regions] == ["Sign in", "Hello world"]
    assert regions[0].bounds == Bounds(10, 20, 110, 60)
    assert all(region.source is TextSource.EXTERNAL_RECOGNIZER for region in regions)


@pytest.mark.parametrize(
    "text, error",
    [("no tab here", MalformedDocument), ("x\t1,2,3", MalformedBounds), ("\t1,2,3,4", MalformedDocument)],
)
def test_parse_regions_rejects(text, error):
    with pytest.raises(error):
        parse_regions(text)


def test_signature_ignores_capture_time_and_recognizer_text(login_snapshot):
    later = UiSnapshot(
        login_snapshot.hierarchy,
        (TextRegion("noise", Bounds(0, 0, 10, 10)),),
        login_snapshot.activity,
        login_snapshot.window,
        captured_at=99_000,
        screen_size=login_snapshot.screen_size,
    )
    assert signature(later) == signature(login_snapshot)


def test_signature_changes_with_structure_and_window(login_snapshot):
    form = snapshot_fixture("form_screen.xml")
    assert signature(form) != signature(login_snapshot)
    moved = UiSnapshot(login_snapshot.hierarchy, window="other", screen_size=login_snapshot.screen_size)
    assert signature(moved) != signature(login_snapshot)


def test_signature_is_stable_string(login_snapshot):
    text = str(signature(login_snapshot))
    assert text == str(signature(snapshot_fixture("login_screen.xml")))
    assert "#" in text


def test_textuality_half_coverage_counts_as_text():
    node = parse_hierarchy(WRAP.format('<node class="ImageView" bounds="[0,0][100,100]"/>'))
    half = (TextRegion("a", Bounds(0, 0, 100, 50)),)
    less = (TextRegion("a", Bounds(0, 0, 100, 49)),)
    assert node_textuality(node, half) is Textuality.TEXTUAL
    assert node_textuality(node, less) is Textuality.NON_TEXTUAL


def test_textuality_counts_overlapping_regions_once():
    node = parse_hierarchy(WRAP.format('<node class="ImageView" bounds="[0,0][100,100]"/>'))
    overlapping = (TextRegion("a", Bounds(0, 0, 100, 30)), TextRegion("b", Bounds(0, 0, 100, 30)))
    assert node_textuality(node, overlapping) is Textuality.NON_TEXTUAL


def test_labeled_node_is_textual(login_snapshot):
    assert node_textuality(login_snapshot.nodes[3], ()) is Textuality.TEXTUAL


def test_label_regions_lead_with_hierarchy_labels():
    form = snapshot_fixture("form_screen.xml", regions=True)
    regions = form.label_regions()
    assert [region.text for region in regions] == ["Given name", "Last name", "Mobile number", "Save"]
    login = snapshot_fixture("login_screen.xml")
    assert [region.source for region in login.label_regions()] == [TextSource.HIERARCHY_LABEL] * 3
