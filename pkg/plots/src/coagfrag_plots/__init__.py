"""Figure rendering for coagfrag simulation run directories."""

from .data import RunData, RunDataError, load_run
from .render import FORMATS, PANELS, FigureRequest, build_panel, render

__version__ = "0.1.0"

__all__ = [
    "FORMATS",
    "PANELS",
    "FigureRequest",
    "RunData",
    "RunDataError",
    "build_panel",
    "load_run",
    "render",
]
