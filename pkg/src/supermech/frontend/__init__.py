"""Model-definition language, pipeline driver, reports and the CLI."""

from .parser import ModelDocument, parse_model, to_source
from .elaborator import ElaboratedModel, elaborate
from .pipeline import PipelineResult, run_pipeline
from .report import render_structured, render_text

__all__ = [
    "ElaboratedModel",
    "ModelDocument",
    "PipelineResult",
    "elaborate",
    "parse_model",
    "render_structured",
    "render_text",
    "run_pipeline",
    "to_source",
]
