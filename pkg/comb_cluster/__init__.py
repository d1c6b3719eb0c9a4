"""Comb cluster – frequency-comb hypercubic cluster-state simulator.

Layers follow the usual split: ``domain`` (value objects and errors), ``services``
(index arithmetic, H-graph, interferometer, Gaussian engine, lattice checks and the
pipeline), ``adapters`` (configuration files and artifact exports) and ``cli``.
External callers should import :func:`get_settings` from here rather than
instantiating :class:`Settings` directly.
"""
from .settings import Settings, get_settings

__version__ = "1.0.0"

SettingsType = Settings

__all__ = [
    "__version__",
    "get_settings",
    "SettingsType",
]
