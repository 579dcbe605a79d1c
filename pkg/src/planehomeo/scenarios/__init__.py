"""Scenario files, the example gallery and the command-line pipeline."""

from .render import Layer, render_svg, svg_string
from .run import RunResult, run
from .scenario import SCHEMA_VERSION, Scenario, gallery_names, gallery_path, load_scenario, parse_scenario

__all__ = ["Layer", "render_svg", "svg_string", "RunResult", "run", "SCHEMA_VERSION", "Scenario",
           "gallery_names", "gallery_path", "load_scenario", "parse_scenario"]
