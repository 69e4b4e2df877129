import json

from qtemporal.runlog.schemas import RunEvent
from qtemporal.runlog.sink import RunEventSink, run_sink
from qtemporal.runlog.tracker import track_event, track_solve


def _read_events(path):
    if not path.exists():
        return []
    return [json.loads(line) for line in path.read_text(encoding="utf-8").splitlines() if line.strip()]


def test_event_record_uses_utc_timestamps() -> None:
    record = RunEvent(action="span_built", span_id="abc", seed=3).to_record()
    assert record["timestamp"].endswith("Z")
    assert record["action"] == "span_built"
    assert record["payload"] == {}
    assert record["seed"] == 3


def test_track_solve_writes_jsonl(run_log_file) -> None:
    track_solve(application="chsh", status="optimal", value=4.0, gap=1e-9, iterations=12)
    track_solve(application="tsr", status="optimal", value=0.1, gap=1e-9, iterations=20, parameter=2.5, span_id="s1")

    events = _read_events(run_log_file)
    assert len(events) == 2
    assert events[0]["action"] == "solve_finished"
    assert "parameter" not in events[0]["payload"]
    assert events[1]["payload"]["parameter"] == 2.5
    assert events[1]["span_id"] == "s1"


def test_disabled_sink_writes_nothing(run_log_file) -> None:
    run_sink.set_enabled(False)
    try:
        track_event(action="run_finished", application="chsh")
    finally:
        run_sink.set_enabled(True)
    assert not run_log_file.exists()


def test_sink_creates_parent_directories(tmp_path) -> None:
    target = tmp_path / "nested" / "events.jsonl"
    sink = RunEventSink(target)
    sink.write({"action": "run_finished"})
    sink.write({"action": "run_finished"})
    assert sink.get_log_file() == target
    assert len(_read_events(target)) == 2
