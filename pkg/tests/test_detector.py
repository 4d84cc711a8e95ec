import numpy as np
import pytest

from tarpitnav.errors import TimeRegression
from tarpitnav.navigation.detector import (
    PollRecord,
    StuckDetector,
    TraceStep,
    dwell_times,
    extract_tarpits,
    observe_stream,
    read_trace,
    same_screen_runs,
    write_trace,
)
from tarpitnav.screen.snapshot import ScreenSignature
from tests.conftest import fixture_path

LOGIN = ScreenSignature("LoginActivity", "login", 1)
HOME = ScreenSignature("MainActivity", "home", 2)


def _stream(signature, start, stop, step=1000):
    return [PollRecord(signature, at) for at in range(start, stop + 1, step)]


def test_fires_once_after_trigger():
    events = observe_stream(_stream(LOGIN, 0, 20_000))
    assert len(events) == 1
    assert events[0].stuck_since == 0
    assert events[0].fired_at == 10_000
    assert events[0].dwell == 10_000


def test_does_not_fire_before_trigger():
    assert observe_stream(_stream(LOGIN, 0, 9_000)) == []


def test_screen_change_restarts_interval():
    records = _stream(LOGIN, 0, 8_000) + _stream(HOME, 9_000, 9_000) + _stream(LOGIN, 10_000, 20_000)
    events = observe_stream(records)
    assert [(event.stuck_since, event.fired_at) for event in events] == [(10_000, 20_000)]


def test_fires_again_for_a_new_interval():
    records = _stream(LOGIN, 0, 10_000) + _stream(HOME, 11_000, 21_000)
    events = observe_stream(records)
    assert [event.signature for event in events] == [LOGIN, HOME]


def test_reset_starts_over_on_same_screen():
    detector = StuckDetector(trigger_ms=2_000)
    events = [detector.observe(record) for record in _stream(LOGIN, 0, 2_000)]
    assert events[-1] is not None
    detector.reset()
    assert detector.observe(PollRecord(LOGIN, 3_000)) is None
    assert detector.observe(PollRecord(LOGIN, 5_000)) is not None


def test_zero_trigger_fires_on_first_poll():
    assert observe_stream([PollRecord(LOGIN, 0)], trigger_ms=0)[0].fired_at == 0


def test_time_regression():
    detector = StuckDetector()
    detector.observe(PollRecord(LOGIN, 5_000))
    with pytest.raises(TimeRegression):
        detector.observe(PollRecord(LOGIN, 4_000))


def test_negative_trigger():
    with pytest.raises(ValueError):
        StuckDetector(trigger_ms=-1)


### Traces ###
@pytest.fixture
def session_trace():
    return read_trace(fixture_path("traces/session.csv"))


def test_read_trace(session_trace):
    assert len(session_trace) == 11
    assert session_trace[3] == TraceStep("login", "type", 4000)


def test_same_screen_runs(session_trace):
    assert same_screen_runs(session_trace) == [
        ("home", 2, 1000),
        ("login", 6, 10_000),
        ("feed", 2, 1000),
        ("settings", 1, 0),
    ]


def test_dwell_times(session_trace):
    assert dwell_times(session_trace) == {"home": 2000, "login": 11_000, "feed": 2000, "settings": 0}


def test_repetitive_run_only(session_trace):
    assert extract_tarpits(session_trace, top_k=0) == {"login"}


def test_top_k_by_dwell_breaks_ties_by_id(session_trace):
    assert extract_tarpits(session_trace, min_actions=99, top_k=2) == {"login", "feed"}
    assert extract_tarpits(session_trace, top_k=2) == {"login", "feed"}


def test_empty_trace():
    assert extract_tarpits([]) == set()


def test_unsorted_trace():
    with pytest.raises(TimeRegression):
        extract_tarpits([TraceStep("a", "tap", 10), TraceStep("b", "tap", 5)])


def test_write_then_read_trace(tmp_path, session_trace):
    path = str(tmp_path / "trace.csv")
    write_trace(session_trace, path)
    assert read_trace(path) == session_trace


def test_trace_without_header_and_bad_time(tmp_path):
    path = tmp_path / "trace.csv"
    path.write_text("home,tap,0\nhome,tap,soon\n", encoding="utf-8")
    with pytest.raises(ValueError):
        read_trace(str(path))


### Randomised oracles ###
def _oracle_tarpits(trace, min_actions, min_ms, top_k):
    """Brute force: every maximal run by scanning start positions, dwell by summing step gaps."""
    found = set()
    i = 0
    while i < len(trace):
        j = i
        while j + 1 < len(trace) and trace[j + 1].screen_id == trace[i].screen_id:
            j += 1
        if j - i + 1 >= min_actions and trace[j].at - trace[i].at >= min_ms:
            found.add(trace[i].screen_id)
        i = j + 1
    dwell = {}
    for k, step in enumerate(trace):
        dwell.setdefault(step.screen_id, 0)
        if k + 1 < len(trace):
            dwell[step.screen_id] += trace[k + 1].at - step.at
    by_time = sorted(dwell, key=lambda screen: (-dwell[screen], screen))[:top_k]
    return found | set(by_time)


def _random_trace(rng):
    screens = [f"s{i}" for i in range(int(rng.integers(1, 51)))]
    at, trace = 0, []
    for _ in range(int(rng.integers(0, 501))):
        if not trace or rng.random() < 0.4:
            screen = screens[int(rng.integers(len(screens)))]
        else:
            screen = trace[-1].screen_id
        trace.append(TraceStep(screen, "tap", at))
        at += int(rng.integers(0, 4000))
    return trace


@pytest.mark.parametrize("min_actions, min_ms, top_k", [(5, 10_000, 200), (5, 10_000, 3), (2, 0, 0), (1, 50_000, 1)])
def test_extraction_agrees_with_brute_force(min_actions, min_ms, top_k):
    rng = np.random.default_rng(min_actions * 1000 + top_k)
    for _ in range(200):
        trace = _random_trace(rng)
        assert extract_tarpits(trace, min_actions, min_ms, top_k) == _oracle_tarpits(trace, min_actions, min_ms, top_k)


def test_detector_fires_once_per_long_interval():
    rng = np.random.default_rng(42)
    signatures = [ScreenSignature("A", str(i), i) for i in range(3)]
    for _ in range(1000):
        at, records = 0, []
        for _ in range(int(rng.integers(1, 60))):
            if not records or rng.random() < 0.2:
                signature = signatures[int(rng.integers(3))]
            else:
                signature = records[-1].signature
            records.append(PollRecord(signature, at))
            at += 1000
        expected = []
        start = 0
        for i in range(1, len(records) + 1):
            if i == len(records) or records[i].signature != records[start].signature:
                fire = next((r.at for r in records[start:i] if r.at - records[start].at >= 10_000), None)
                if fire is not None:
                    expected.append((records[start].at, fire))
                start = i
        assert [(event.stuck_since, event.fired_at) for event in observe_stream(records)] == expected
