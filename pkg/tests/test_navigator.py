import numpy as np
import pytest

from tarpitnav.config import ONBOARDING_PAGES
from tarpitnav.device.actions import (
    ActionPlan,
    Back,
    Restart,
    SelectOption,
    Tap,
    TapClickable,
    TapMatching,
    TypeText,
    Wait,
)
from tarpitnav.device.sim import SimDevice, TapNode, load_app
from tarpitnav.errors import NoApplicableTarget
from tarpitnav.motifs.taxonomy import MotifLabel, MotifPrediction
from tarpitnav.navigation.navigator import (
    ONBOARDING_BUTTONS,
    build_plan,
    label_for_field,
    navigate,
    node_text,
    resolve,
)
from tests.conftest import TARPIT_APPS, snapshot_fixture


def ranked(*labels: MotifLabel) -> MotifPrediction:
    """Prediction with `labels` first, in the given order."""
    probabilities = np.zeros(21)
    for rank, label in enumerate(labels):
        probabilities[label.position] = len(labels) - rank
    return MotifPrediction.from_probabilities(probabilities)


def enter_tarpit(device, motif: MotifLabel) -> None:
    """Tap from the start screen into the first screen declared with `motif`."""
    for transition in device.app.outgoing(device.current):
        target = device.app.screens[transition.target]
        if target.motif is motif and isinstance(transition.guard, TapNode):
            node = device.screen.node(transition.guard.node_id)
            device.perform(Tap(*node.bounds.center))
            assert device.current == target.screen_id
            return
    raise AssertionError(f"Kein Tap-Übergang zu {motif.value} von {device.current}")


### Plans ###
def test_advertisement_taps_labeled_close():
    plan = build_plan(MotifLabel.ADVERTISEMENT, snapshot_fixture("ad_screen.xml"))
    assert plan.actions == (Tap(1044, 36),)


def test_advertisement_falls_back_to_smallest_in_top_band():
    plan = build_plan(MotifLabel.ADVERTISEMENT, snapshot_fixture("ad_unlabeled.xml"))
    assert plan.actions == (Tap(40, 50),)


def test_advertisement_without_candidates_goes_back(login_snapshot):
    assert build_plan(MotifLabel.ADVERTISEMENT, login_snapshot).actions == (Back(),)


def test_form_fills_fields_from_recognizer_labels(store, lexicon):
    plan = build_plan(MotifLabel.FORM, snapshot_fixture("form_screen.xml", regions=True), store, lexicon)
    assert plan.actions == (
        TypeText(1, "Anna"),
        TypeText(2, "Schmidt"),
        TypeText(3, "+49 170 1234567"),
        Tap(540, 1680),
    )


def test_form_without_labels_is_not_applicable(store, lexicon):
    with pytest.raises(NoApplicableTarget):
        build_plan(MotifLabel.FORM, snapshot_fixture("form_screen.xml"), store, lexicon)


def test_form_picks_first_spinner_option_before_submit(store, lexicon):
    plan = build_plan(MotifLabel.FORM, snapshot_fixture("form_spinner.xml"), store, lexicon)
    assert plan.actions == (
        TypeText(1, "Anna"),
        Tap(540, 700),
        Wait(500),
        SelectOption(2, 0),
        Tap(540, 1680),
    )


def test_search_field_found_by_label_above(store, lexicon):
    plan = build_plan(MotifLabel.SEARCH, snapshot_fixture("search_screen.xml", regions=True), store, lexicon)
    assert plan.actions == (TypeText(1, "weather berlin"), Tap(930, 360))


def test_search_without_labels_is_not_applicable(store, lexicon):
    with pytest.raises(NoApplicableTarget):
        build_plan(MotifLabel.SEARCH, snapshot_fixture("search_screen.xml"), store, lexicon)


def test_onboarding_plan_binds_button_per_page(device_factory):
    device = device_factory("onboarding_tarpit")
    enter_tarpit(device, MotifLabel.ONBOARDING)
    plan = build_plan(MotifLabel.ONBOARDING, device.capture())
    taps = [action for action in plan.actions if not isinstance(action, Wait)]
    assert taps == [TapMatching(ONBOARDING_BUTTONS)] * ONBOARDING_PAGES
    assert len(plan.actions) == 2 * ONBOARDING_PAGES - 1


def test_log_in_plan(login_snapshot, store, lexicon):
    plan = build_plan(MotifLabel.LOG_IN, login_snapshot, store, lexicon)
    assert plan.actions == (TypeText(1, "tester_anna"), TypeText(2, "Secret!2024"), Tap(540, 1180))


def test_log_in_needs_store(login_snapshot):
    with pytest.raises(ValueError):
        build_plan(MotifLabel.LOG_IN, login_snapshot)


def test_viewer_plan(login_snapshot):
    assert build_plan(MotifLabel.VIEWER, login_snapshot).actions == (Tap(540, 960), Wait(500), TapClickable())


def test_web_browser_plan(login_snapshot):
    assert build_plan(MotifLabel.WEB_BROWSER, login_snapshot).actions == (Back(), Wait(1000))


def test_onboarding_without_button():
    with pytest.raises(NoApplicableTarget):
        build_plan(MotifLabel.ONBOARDING, snapshot_fixture("viewer_screen.xml"))


def test_player_without_clickables():
    with pytest.raises(NoApplicableTarget):
        build_plan(MotifLabel.PLAYER, snapshot_fixture("viewer_screen.xml"))


def test_non_tarpit_motif_has_no_heuristic(login_snapshot):
    with pytest.raises(ValueError):
        build_plan(MotifLabel.LIST, login_snapshot)


def test_plan_restart_only_last():
    with pytest.raises(ValueError):
        ActionPlan(MotifLabel.VIEWER, (Restart(), Back()))
    with pytest.raises(ValueError):
        ActionPlan(MotifLabel.VIEWER, ())


def test_node_text_prefers_label_then_regions():
    form = snapshot_fixture("form_screen.xml", regions=True)
    assert node_text(form.find_node(4), form) == "Save"
    assert node_text(form.find_node(1), form) == ""


def test_label_for_field_picks_nearest_label_above():
    form = snapshot_fixture("form_screen.xml", regions=True)
    assert [label_for_field(node, form) for node in form.editable_nodes] == ["Given name", "Last name", "Mobile number"]


### Execution ###
def test_resolve_tap_clickable_uses_current_screen(device_factory):
    device = device_factory("viewer_tarpit")
    enter_tarpit(device, MotifLabel.VIEWER)
    assert resolve(TapClickable(), device) == Tap(10, 10)


def test_resolve_skips_vanished_field(device_factory):
    device = device_factory("login_tarpit")
    assert resolve(TypeText(2, "tester_anna"), device) is None


def test_resolve_select_option_needs_spinner(device_factory):
    device = device_factory("form_tarpit")
    enter_tarpit(device, MotifLabel.FORM)
    assert resolve(SelectOption(8, 0), device) == SelectOption(8, 0)
    assert resolve(SelectOption(2, 0), device) is None


def test_resolve_tap_matching_on_current_screen(device_factory, lexicon):
    device = device_factory("onboarding_tarpit")
    assert resolve(TapMatching(ONBOARDING_BUTTONS), device, lexicon) is None
    enter_tarpit(device, MotifLabel.ONBOARDING)
    assert resolve(TapMatching(ONBOARDING_BUTTONS), device, lexicon) == Tap(1020, 1860)


def _moving_onboarding() -> dict:
    """Three tour pages, the forward button sits somewhere else on each."""
    buttons = [
        ("Next", [900, 1800, 1060, 1900]),
        ("Continue", [20, 20, 200, 120]),
        ("Get started", [400, 900, 680, 1000]),
    ]
    screens = [
        {
            "id": f"page{i}",
            "motif": "Onboarding",
            "nodes": {
                "class": "FrameLayout",
                "bounds": [0, 0, 1080, 1920],
                "children": [{"class": "Button", "key": "forward", "text": text, "clickable": True, "bounds": bounds}],
            },
        }
        for i, (text, bounds) in enumerate(buttons)
    ]
    screens.append(
        {
            "id": "main",
            "motif": "HomeMenu",
            "nodes": {
                "class": "FrameLayout",
                "bounds": [0, 0, 1080, 1920],
                "children": [
                    {"class": "Button", "key": "home", "text": "Home", "clickable": True, "bounds": [0, 0, 1080, 900]}
                ],
            },
        }
    )
    targets = ["page1", "page2", "main"]
    transitions = [{"from": f"page{i}", "to": target, "guard": {"tap": "forward"}} for i, target in enumerate(targets)]
    return {"app": "moving_tour", "start": "page0", "screens": screens, "transitions": transitions}


def test_onboarding_follows_moving_button(store, lexicon):
    device = SimDevice(load_app(_moving_onboarding()), store, lexicon)

    outcome = navigate(device.capture(), MotifPrediction.certain(MotifLabel.ONBOARDING), device, store, lexicon)

    assert outcome.escaped_with is MotifLabel.ONBOARDING
    assert device.current == "main"
    # drei Taps und vier Wartezeiten, die übrigen Taps finden keinen Button mehr
    assert outcome.attempts[0].actions == 7


@pytest.mark.parametrize("motif, name", sorted(TARPIT_APPS.items()))
def test_each_heuristic_escapes_its_tarpit(motif, name, device_factory, store, lexicon):
    label = MotifLabel.parse(motif)
    device = device_factory(name)
    enter_tarpit(device, label)
    tarpit = device.current

    outcome = navigate(device.capture(), MotifPrediction.certain(label), device, store, lexicon)

    assert outcome.succeeded
    assert outcome.escaped_with is label
    assert not outcome.escalated_restart
    assert len(outcome.attempts) == 1
    assert device.current != tarpit


def test_falls_through_to_second_heuristic(device_factory, store, lexicon):
    device = device_factory("ad_tarpit")
    enter_tarpit(device, MotifLabel.ADVERTISEMENT)
    prediction = ranked(MotifLabel.VIEWER, MotifLabel.ADVERTISEMENT)

    outcome = navigate(device.capture(), prediction, device, store, lexicon)

    assert [attempt.kind for attempt in outcome.attempts] == [MotifLabel.VIEWER, MotifLabel.ADVERTISEMENT]
    assert [attempt.succeeded for attempt in outcome.attempts] == [False, True]
    assert outcome.attempts[0].actions == 3
    assert outcome.predicted is MotifLabel.VIEWER
    assert device.current == "deals"


def test_restart_after_three_failed_heuristics(device_factory, store, lexicon):
    device = device_factory("login_tarpit")
    enter_tarpit(device, MotifLabel.LOG_IN)
    start_ms = device.now_ms
    prediction = ranked(MotifLabel.ADVERTISEMENT, MotifLabel.VIEWER, MotifLabel.PLAYER, MotifLabel.LOG_IN)

    outcome = navigate(device.capture(), prediction, device, store, lexicon)

    assert [attempt.kind for attempt in outcome.attempts] == [
        MotifLabel.ADVERTISEMENT,
        MotifLabel.VIEWER,
        MotifLabel.PLAYER,
    ]
    assert not any(attempt.succeeded for attempt in outcome.attempts)
    assert outcome.escalated_restart
    assert outcome.escaped_with is None
    assert outcome.actions == 1 + 3 + 1 + 1
    assert device.current == "home"
    assert device.now_ms - start_ms == 6 * 1000
    assert device.trace[-1].action == "restart"


def test_inapplicable_heuristic_counts_as_failed_attempt(device_factory, store, lexicon):
    device = device_factory("viewer_tarpit")
    enter_tarpit(device, MotifLabel.VIEWER)
    prediction = ranked(MotifLabel.ONBOARDING, MotifLabel.VIEWER)

    outcome = navigate(device.capture(), prediction, device, store, lexicon)

    assert not outcome.attempts[0].applicable
    assert outcome.attempts[0].actions == 0
    assert outcome.escaped_with is MotifLabel.VIEWER


def test_top_n_one_restarts_after_single_failure(device_factory, store, lexicon):
    device = device_factory("login_tarpit")
    enter_tarpit(device, MotifLabel.LOG_IN)
    outcome = navigate(device.capture(), ranked(MotifLabel.PLAYER), device, store, lexicon, top_n=1)
    assert len(outcome.attempts) == 1
    assert outcome.escalated_restart


def test_search_on_log_in_screen_falls_back_to_log_in(device_factory, store, lexicon):
    device = device_factory("login_tarpit")
    enter_tarpit(device, MotifLabel.LOG_IN)
    prediction = ranked(MotifLabel.SEARCH, MotifLabel.LOG_IN)

    outcome = navigate(device.capture(), prediction, device, store, lexicon)

    assert [attempt.kind for attempt in outcome.attempts] == [MotifLabel.SEARCH, MotifLabel.LOG_IN]
    assert not outcome.attempts[0].applicable
    assert outcome.escaped_with is MotifLabel.LOG_IN
    assert not outcome.escalated_restart
    assert device.current == "profile"
