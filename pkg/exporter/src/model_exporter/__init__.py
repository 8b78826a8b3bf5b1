"""Produce engine-format embedding and label-distribution files from models.

Fine-tunes a small classifier on the pool corpus (80/20 train/validation
split), predicts label distributions for every pool and test example,
embeds all texts, and writes the four JSON-lines files the selection
engine's file providers consume. Can also serve the ``/classify`` and
``/embed`` wire protocol live.
"""

from .backends import (
    BackendUnavailableError,
    ENCODER_BACKENDS,
    SLM_BACKENDS,
    make_encoder,
    make_slm,
)
from .export import ExportJob, ExporterError, export
from .server import serve

__version__ = "0.1.0"

__all__ = [
    "BackendUnavailableError",
    "ENCODER_BACKENDS",
    "ExportJob",
    "ExporterError",
    "SLM_BACKENDS",
    "export",
    "make_encoder",
    "make_slm",
    "serve",
]
