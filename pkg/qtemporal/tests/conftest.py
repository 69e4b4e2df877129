import pytest

from qtemporal.realizations.store import span_store
from qtemporal.runlog.sink import run_sink


@pytest.fixture(autouse=True, scope="session")
def isolated_artifacts(tmp_path_factory):
    """Keep spans and run events out of the project tree; spans are shared by the session."""
    original_root = span_store.get_root()
    original_log = run_sink.get_log_file()
    span_store.set_root(tmp_path_factory.mktemp("spans"))
    run_sink.set_log_file(tmp_path_factory.mktemp("logs") / "session_events.jsonl")
    yield
    span_store.set_root(original_root)
    run_sink.set_log_file(original_log)


@pytest.fixture
def run_log_file(tmp_path):
    original = run_sink.get_log_file()
    test_file = tmp_path / "run_events.jsonl"
    run_sink.set_log_file(test_file)
    yield test_file
    run_sink.set_log_file(original)



def pytest_configure(config):
    config.addinivalue_line("markers", "slow: long-running curve sweeps; deselect with -m 'not slow'")
