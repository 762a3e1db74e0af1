"""Qcircuit diagram compiler."""

from .layout import Scene, bounding_box, grid_geometry, layout, measure_element, plan_scene
from .model import CircuitAst, Diagnostic, QcircuitError, normalize_label, validate
from .parser import format, parse, parse_dimension, parse_element, tokenize
from .render import RenderConfig, render_ascii, render_scene_text, render_svg
from .style import StyleConfig, load_style

__all__ = [
    "CircuitAst", "Diagnostic", "QcircuitError", "RenderConfig", "Scene", "StyleConfig",
    "bounding_box", "format", "grid_geometry", "layout", "load_style", "measure_element",
    "normalize_label", "parse", "parse_dimension", "parse_element", "plan_scene",
    "render_ascii", "render_scene_text", "render_svg", "tokenize", "validate",
]
