"""Run configuration documents (JSON or TOML) and user splitter matrices.

``parse_config`` turns a document into a validated :class:`PipelineConfig`. Syntax errors
become :class:`ParseError` with line/column; schema and invariant failures become
:class:`ValidationError` listing the offending field paths.
"""
from __future__ import annotations

import json
import math
import re
import tomllib
from enum import Enum
from pathlib import Path
from typing import Any, Dict, List, Optional, Tuple

import numpy as np
import pydantic
import scipy.io
from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator

from comb_cluster.domain import (
    CombClusterError,
    CombWindow,
    ConfigError,
    OpoSpec,
    ParseError,
    UnsupportedOrder,
    ValidationError,
)
from comb_cluster.observability import get_logger
from comb_cluster.services.comb_index import is_power_of_two, pump_indices

logger = get_logger(__name__)

SYLVESTER = "sylvester"

DEFAULT_THETAS: Tuple[float, ...] = (0.0, math.pi / 4, math.pi / 2)


class ExportSelector(str, Enum):
    """Artifact families written by the exporter."""

    HGRAPH = "hgraph"
    MATRICES = "matrices"
    DOT = "dot"
    REPORT = "report"


class OpoConfig(BaseModel):
    model_config = ConfigDict(extra="forbid", frozen=True)

    delta_m: int = Field(ge=1)
    copies: int = Field(default=1, ge=1)

    @model_validator(mode="after")
    def _odd_pumps(self) -> "OpoConfig":
        # EvenPumpIndex carries the full explanation
        try:
            pump_indices(OpoSpec(self.delta_m, self.copies))
        except CombClusterError as exc:
            raise ValueError(str(exc)) from exc
        return self

    def to_spec(self) -> OpoSpec:
        return OpoSpec(delta_m=self.delta_m, copies=self.copies)


class PipelineConfig(BaseModel):
    """One pipeline run: comb window, OPO pumps, squeezing, checks and exports."""

    model_config = ConfigDict(extra="forbid", frozen=True)

    window: Tuple[int, int]
    opos: List[OpoConfig] = Field(min_length=1)
    alpha: float = Field(default=0.5, ge=0.0)
    thetas: List[float] = Field(default_factory=lambda: list(DEFAULT_THETAS))
    seed: int = Field(default=0, ge=0)
    samples: int = Field(default=0, ge=0)
    exports: List[ExportSelector] = Field(default_factory=list)
    splitter: str = SYLVESTER
    omega0: float = 0.0
    delta_omega: float = Field(default=1.0, gt=0.0)

    @field_validator("window")
    @classmethod
    def _nonempty_window(cls, value: Tuple[int, int]) -> Tuple[int, int]:
        if value[0] > value[1]:
            raise ValueError(f"empty comb window: n_min={value[0]} > n_max={value[1]}")
        return value

    @field_validator("thetas")
    @classmethod
    def _finite_thetas(cls, value: List[float]) -> List[float]:
        if not value:
            raise ValueError("at least one theta is required")
        if not all(math.isfinite(theta) for theta in value):
            raise ValueError("thetas must be finite")
        return value

    @model_validator(mode="after")
    def _consistent(self) -> "PipelineConfig":
        copies = {opo.copies for opo in self.opos}
        if len(copies) > 1:
            raise ValueError(f"all OPOs must share one copy count, got {sorted(copies)}")
        order = 2 * len(self.opos)
        if self.splitter == SYLVESTER and not is_power_of_two(order):
            raise ValueError(str(UnsupportedOrder(order)))
        return self

    @property
    def dimension(self) -> int:
        return len(self.opos)

    @property
    def copies(self) -> int:
        return self.opos[0].copies

    @property
    def comb_window(self) -> CombWindow:
        return CombWindow(*self.window)

    def specs(self) -> List[OpoSpec]:
        return [opo.to_spec() for opo in self.opos]

    def echo(self) -> Dict[str, Any]:
        """JSON-ready config sufficient to reproduce the run."""
        return self.model_dump(mode="json")


_TOML_POSITION = re.compile(r"line (\d+), column (\d+)")
_TOML_POSITION_SUFFIX = re.compile(r"\s*\(at line \d+, column \d+\)")


def _load_document(text: str, fmt: str) -> Dict[str, Any]:
    if fmt == "json":
        try:
            document = json.loads(text)
        except json.JSONDecodeError as exc:
            raise ParseError(exc.msg, line=exc.lineno, column=exc.colno) from exc
    elif fmt == "toml":
        try:
            document = tomllib.loads(text)
        except tomllib.TOMLDecodeError as exc:
            match = _TOML_POSITION.search(str(exc))
            line, column = (int(match.group(1)), int(match.group(2))) if match else (None, None)
            message = _TOML_POSITION_SUFFIX.sub("", str(exc))
            raise ParseError(message, line=line, column=column) from exc
    else:
        raise ConfigError(f"unsupported configuration format {fmt!r}; use json or toml")
    if not isinstance(document, dict):
        raise ParseError("configuration root must be a mapping", line=1, column=1)
    return document


def _field_path(loc: Tuple[Any, ...]) -> str:
    return ".".join(str(part) for part in loc) or "<root>"


def parse_config(text: str, fmt: str = "json", base_dir: Optional[Path] = None) -> PipelineConfig:
    """Parse and validate a configuration document.

    When ``base_dir`` is given a splitter file path is resolved against it and must exist.
    """
    document = _load_document(text, fmt)
    try:
        config = PipelineConfig.model_validate(document)
    except pydantic.ValidationError as exc:
        errors = exc.errors()
        fields = [_field_path(tuple(error["loc"])) for error in errors]
        details = "; ".join(
            f"{_field_path(tuple(error['loc']))}: {error['msg'].removeprefix('Value error, ')}"
            for error in errors
        )
        raise ValidationError(details, fields=fields) from exc

    if config.splitter != SYLVESTER and base_dir is not None:
        path = resolve_splitter_path(config, base_dir)
        if not path.is_file():
            raise ValidationError(f"splitter: file {path} does not exist", fields=["splitter"])
    logger.debug("config parsed", dimension=config.dimension, window=list(config.window))
    return config


def load_config(path: Path | str) -> PipelineConfig:
    """Read and parse a configuration file; the format follows the suffix."""
    config_path = Path(path)
    suffix = config_path.suffix.lower().lstrip(".")
    if suffix not in ("json", "toml"):
        raise ConfigError(f"configuration file must end in .json or .toml, got {config_path.name}")
    try:
        text = config_path.read_text(encoding="utf-8")
    except OSError as exc:
        raise ConfigError(f"cannot read configuration {config_path}: {exc}") from exc
    return parse_config(text, fmt=suffix, base_dir=config_path.parent)


def resolve_splitter_path(config: PipelineConfig, base_dir: Path) -> Path:
    path = Path(config.splitter)
    return path if path.is_absolute() else base_dir / path


def load_splitter_matrix(config: PipelineConfig, base_dir: Path) -> Optional[np.ndarray]:
    """Matrix for a user splitter (.mtx, .npy or whitespace text); None for Sylvester."""
    if config.splitter == SYLVESTER:
        return None
    path = resolve_splitter_path(config, base_dir)
    try:
        if path.suffix == ".mtx":
            loaded = scipy.io.mmread(path)
            matrix = loaded.toarray() if hasattr(loaded, "toarray") else np.asarray(loaded)
        elif path.suffix == ".npy":
            matrix = np.load(path, allow_pickle=False)
        else:
            matrix = np.loadtxt(path, ndmin=2)
    except (OSError, ValueError) as exc:
        raise ConfigError(f"cannot load splitter matrix {path}: {exc}") from exc
    return np.asarray(matrix, dtype=np.float64)
