"""Adapters layer – configuration files in, artifact files out."""

from .config_loader import ExportSelector, PipelineConfig, load_config, parse_config
from .exporters import (
    ArtifactExporter,
    FileArtifactExporter,
    export_artifacts,
    get_artifact_exporter,
)

__all__ = [
    "ArtifactExporter",
    "ExportSelector",
    "FileArtifactExporter",
    "PipelineConfig",
    "export_artifacts",
    "get_artifact_exporter",
    "load_config",
    "parse_config",
]
