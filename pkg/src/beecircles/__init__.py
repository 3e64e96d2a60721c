"""Multi-circle detection on edge maps using an artificial bee colony.

Typical use::

    from beecircles import load_edge_map, detect_circles

    report = detect_circles(load_edge_map("scene.pgm"))
    for found in report.circles:
        print(found.circle, found.j)
"""

from .abc_engine import AbcConfig, ExhaustedMemory, run_abc, run_detection
from .edge_pipeline import EdgeMap, GrayImage, ImageError, canny_edges, load_edge_map, load_image, save_edge_map
from .geometry import Circle, circumcircle, is_feasible
from .multi_detector import DetectionReport, DiscriminationConfig, detect_circles, extract_circles
from .objective import CircleObjective, ScoredCircle, fitness, match_error
from .raster_mca import PerimeterSet, rasterize_circle

__version__ = "0.1.0"

__all__ = [
    "AbcConfig",
    "Circle",
    "CircleObjective",
    "DetectionReport",
    "DiscriminationConfig",
    "EdgeMap",
    "ExhaustedMemory",
    "GrayImage",
    "ImageError",
    "PerimeterSet",
    "ScoredCircle",
    "canny_edges",
    "circumcircle",
    "detect_circles",
    "extract_circles",
    "fitness",
    "is_feasible",
    "load_edge_map",
    "load_image",
    "match_error",
    "rasterize_circle",
    "run_abc",
    "run_detection",
    "save_edge_map",
]
