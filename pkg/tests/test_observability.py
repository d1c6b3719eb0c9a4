import pytest

from comb_cluster import observability
from comb_cluster.observability import (
    PipelineTracker,
    StageTimer,
    add_run_id,
    configure_structured_logging,
    get_metrics,
    record_verdict,
    run_id_var,
    set_run_id,
)


@pytest.fixture(autouse=True)
def _reset_run_id():
    token = run_id_var.set(None)
    yield
    run_id_var.reset(token)
    configure_structured_logging(level="ERROR")


def test_stage_timer_records_elapsed_time():
    timings = {}
    with StageTimer("hgraph", timings):
        pass
    assert timings["hgraph"] >= 0.0


def test_stage_timer_records_failed_stages():
    timings = {}
    with pytest.raises(RuntimeError):
        with StageTimer("entangle", timings):
            raise RuntimeError("boom")
    assert "entangle" in timings


def test_tracker_binds_one_run_id():
    tracker = PipelineTracker(dimension=2, num_modes=36)
    with tracker as run_id:
        assert run_id == tracker.run_id
        assert observability.get_run_id() == run_id
    assert len(run_id) == 8
    assert run_id_var.get() is None


def test_each_tracker_gets_its_own_run_id():
    set_run_id("outer000")
    ids = []
    for _ in range(3):
        with PipelineTracker(dimension=1) as run_id:
            ids.append(run_id)
    assert len(set(ids)) == 3
    assert "outer000" not in ids
    assert run_id_var.get() == "outer000"


def test_add_run_id():
    assert add_run_id(None, "info", {"event": "x"}) == {"event": "x"}
    set_run_id("abc12345")
    assert add_run_id(None, "info", {"event": "x"})["run_id"] == "abc12345"


def test_json_logging_goes_to_stderr(capsys):
    configure_structured_logging(json_logs=True, level="INFO")
    observability.get_logger("test").info("hello", stage="hgraph")
    captured = capsys.readouterr()
    assert captured.out == ""
    assert '"event": "hello"' in captured.err


def test_unknown_level_falls_back_to_info(capsys):
    configure_structured_logging(level="chatty")
    observability.get_logger("test").debug("quiet")
    assert "quiet" not in capsys.readouterr().err


def test_verdicts_show_up_in_metrics():
    pytest.importorskip("prometheus_client")
    record_verdict("lattice", True)
    text, content_type = get_metrics()
    assert 'comb_cluster_verdicts_total{check="lattice",verdict="pass"}' in text
    assert content_type.startswith("text/plain")
