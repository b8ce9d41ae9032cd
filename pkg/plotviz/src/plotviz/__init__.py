"""Offline figure rendering for qnckit CSV dumps."""

from .render import PlotJob, RenderReport, SchemaError, render

__version__ = "0.1.0"

__all__ = ["PlotJob", "RenderReport", "SchemaError", "render"]
