"""Observability infrastructure for structured logging and metrics.

Provides structlog configuration, a per-run correlation id, Prometheus counters for
pipeline runs and verdicts, and timers for individual pipeline stages.
"""
from __future__ import annotations

import logging
import sys
import time
import uuid
from contextvars import ContextVar, Token
from typing import Any, Dict, Optional

try:
    import structlog
except ImportError:
    structlog = None

try:
    from prometheus_client import CONTENT_TYPE_LATEST, Counter, Histogram, generate_latest
except ImportError:
    Counter = None
    Histogram = None
    generate_latest = None
    CONTENT_TYPE_LATEST = None

logger = logging.getLogger(__name__)

# Context variable for the pipeline run id
run_id_var: ContextVar[Optional[str]] = ContextVar("run_id", default=None)


def configure_structured_logging(*, json_logs: bool = False, level: str = "INFO") -> None:
    """Configure structured logging for the application."""
    numeric_level = logging.getLevelName(level.upper())
    if not isinstance(numeric_level, int):
        numeric_level = logging.INFO

    if not structlog:
        logging.basicConfig(
            level=numeric_level,
            format="%(asctime)s - %(name)s - %(levelname)s - %(message)s",
            stream=sys.stderr,
        )
        return

    processors = [
        structlog.contextvars.merge_contextvars,
        structlog.processors.add_log_level,
        structlog.processors.TimeStamper(fmt="ISO"),
        add_run_id,
    ]

    if json_logs:
        processors.append(structlog.processors.JSONRenderer(sort_keys=True))
    else:
        processors.append(structlog.dev.ConsoleRenderer(colors=False))

    structlog.configure(
        processors=processors,
        wrapper_class=structlog.make_filtering_bound_logger(numeric_level),
        logger_factory=structlog.PrintLoggerFactory(file=sys.stderr),
        cache_logger_on_first_use=True,
    )


def add_run_id(logger: Any, name: str, event_dict: Dict[str, Any]) -> Dict[str, Any]:
    """Add the pipeline run id to log events."""
    run_id = run_id_var.get()
    if run_id:
        event_dict["run_id"] = run_id
    return event_dict


def get_run_id() -> str:
    """Get or create a run id for the current context."""
    run_id = run_id_var.get()
    if not run_id:
        run_id = uuid.uuid4().hex[:8]
        run_id_var.set(run_id)
    return run_id


def set_run_id(run_id: str) -> None:
    run_id_var.set(run_id)


def get_logger(name: str) -> Any:
    """Get a structured logger instance."""
    if structlog:
        return structlog.get_logger(name)
    return logging.getLogger(name)


if Counter is not None and Histogram is not None and generate_latest is not None:
    pipeline_runs = Counter(
        "comb_cluster_pipeline_runs_total",
        "Total number of pipeline runs",
        ["status"],
    )

    stage_duration = Histogram(
        "comb_cluster_stage_duration_seconds",
        "Time spent in each pipeline stage",
        ["stage"],
    )

    verdicts = Counter(
        "comb_cluster_verdicts_total",
        "Verification verdicts by check",
        ["check", "verdict"],
    )

    def record_pipeline_run(status: str) -> None:
        pipeline_runs.labels(status=status).inc()

    def record_stage_duration(stage: str, seconds: float) -> None:
        stage_duration.labels(stage=stage).observe(seconds)

    def record_verdict(check: str, passed: bool) -> None:
        verdicts.labels(check=check, verdict="pass" if passed else "fail").inc()

    def get_metrics() -> tuple[str, str]:
        """Get current metrics in Prometheus format."""
        metrics_data = generate_latest()
        if isinstance(metrics_data, bytes):
            metrics_data = metrics_data.decode("utf-8")
        content_type = CONTENT_TYPE_LATEST or "text/plain; version=0.0.4; charset=utf-8"
        return metrics_data, content_type

else:

    def record_pipeline_run(status: str) -> None:
        """Record a pipeline run (stub when Prometheus unavailable)."""

    def record_stage_duration(stage: str, seconds: float) -> None:
        """Record a stage duration (stub when Prometheus unavailable)."""

    def record_verdict(check: str, passed: bool) -> None:
        """Record a verdict (stub when Prometheus unavailable)."""

    def get_metrics() -> tuple[str, str]:
        return "# Prometheus metrics not available\n", "text/plain"


class PipelineTracker:
    """Context manager that binds a fresh run id and logs the start and end of a run."""

    def __init__(self, *, dimension: int, num_modes: int | None = None) -> None:
        self.dimension = dimension
        self.num_modes = num_modes
        self.start_time: Optional[float] = None
        self.run_id = uuid.uuid4().hex[:8]
        self._token: Optional[Token[Optional[str]]] = None

    def __enter__(self) -> str:
        self.start_time = time.perf_counter()
        self._token = run_id_var.set(self.run_id)
        get_logger(__name__).info(
            "Pipeline started", dimension=self.dimension, run_id=self.run_id
        )
        return self.run_id

    def __exit__(self, exc_type: Any, exc_val: Any, exc_tb: Any) -> None:
        duration = time.perf_counter() - self.start_time if self.start_time else None
        status = "error" if exc_type else "success"
        get_logger(__name__).info(
            "Pipeline completed",
            dimension=self.dimension,
            status=status,
            duration_seconds=duration,
            run_id=self.run_id,
            error_type=exc_type.__name__ if exc_type else None,
        )
        record_pipeline_run(status)
        if self._token is not None:
            run_id_var.reset(self._token)
            self._token = None


class StageTimer:
    """Time one pipeline stage, log it, and store the elapsed seconds in ``timings``."""

    def __init__(self, stage: str, timings: Dict[str, float]) -> None:
        self.stage = stage
        self.timings = timings
        self._start = 0.0

    def __enter__(self) -> "StageTimer":
        self._start = time.perf_counter()
        return self

    def __exit__(self, exc_type: Any, exc_val: Any, exc_tb: Any) -> None:
        elapsed = time.perf_counter() - self._start
        self.timings[self.stage] = elapsed
        record_stage_duration(self.stage, elapsed)
        if exc_type is None:
            get_logger(__name__).debug(
                "stage finished", stage=self.stage, seconds=round(elapsed, 6)
            )
        else:
            get_logger(__name__).warning(
                "stage failed", stage=self.stage, error_type=exc_type.__name__
            )
