"""Turn one ABC run into a set of distinct circles.

The best source and everything in the exhausted-source memory are ranked
by matching error; walking that list, a circle is kept only if it is far
enough (in center/radius space) from every circle kept so far.
"""

from __future__ import annotations

import math
import time
from dataclasses import asdict, dataclass, field
from typing import Iterable, Optional

from .abc_engine import AbcConfig, run_detection
from .edge_pipeline import EdgeMap
from .geometry import Circle
from .objective import ScoredCircle

__all__ = [
    "DiscriminationConfig",
    "DetectionReport",
    "distinctiveness",
    "threshold",
    "extract_circles",
    "default_rmax",
    "detect_circles",
]


def default_rmax(cols: int, rows: int) -> float:
    """Half the image diagonal, measured between pixel centers."""
    return math.hypot(cols - 1, rows - 1) / 2.0


@dataclass(frozen=True)
class DiscriminationConfig:
    alpha: float = 0.05
    rmin: float = 5.0
    rmax: Optional[float] = None  # None: half the image diagonal
    quality_max_j: float = 0.25

    def __post_init__(self):
        if not self.alpha >= 0:
            raise ValueError("alpha must be non-negative")
        if self.rmax is not None and self.rmin > self.rmax:
            raise ValueError(f"rmin ({self.rmin}) exceeds rmax ({self.rmax})")
        if not 0 < self.quality_max_j < 1:
            raise ValueError("quality_max_j must lie in (0, 1)")

    def resolved_rmax(self, cols: int, rows: int) -> float:
        rmax = default_rmax(cols, rows) if self.rmax is None else self.rmax
        if self.rmin > rmax:
            raise ValueError(f"rmin ({self.rmin}) exceeds rmax ({rmax}) for a {cols}x{rows} image")
        return rmax


@dataclass
class DetectionReport:
    circles: list[ScoredCircle]
    candidates_examined: int
    threshold: float
    elapsed: float = 0.0
    config: dict = field(default_factory=dict)


def distinctiveness(a: Circle, b: Circle) -> float:
    """Euclidean distance between two circles in (x, y, r) space."""
    return math.sqrt((a.x0 - b.x0) ** 2 + (a.y0 - b.y0) ** 2 + (a.r - b.r) ** 2)


def threshold(cols: int, rows: int, cfg: DiscriminationConfig) -> float:
    """Distance above which two circles count as different shapes.

    Scales with the extent of the (x, y, r) search space, so the same
    ``alpha`` behaves alike across image sizes.
    """
    if cols < 2 or rows < 2:
        raise ValueError(f"image must be at least 2x2, got {cols}x{rows}")
    rmax = cfg.resolved_rmax(cols, rows)
    return cfg.alpha * math.sqrt((cols - 1) ** 2 + (rows - 1) ** 2 + (rmax - cfg.rmin) ** 2)


def extract_circles(
    best: Optional[ScoredCircle],
    memory: Iterable[ScoredCircle],
    dims: tuple[int, int],
    cfg: DiscriminationConfig,
) -> DetectionReport:
    """Rank ``best`` and the memory by J, then keep mutually distinct circles.

    The ranked list starts with ``best``; equal J values keep insertion
    order.  A circle is accepted when its J is within the quality ceiling
    and it lies farther than the threshold from every circle accepted so
    far, so the first acceptable element is always the lowest-J one.
    """
    cols, rows = dims
    es_th = threshold(cols, rows, cfg)
    ranked = ([best] if best is not None else []) + list(memory)
    ranked.sort(key=lambda s: s.j)  # stable

    accepted: list[ScoredCircle] = []
    for cand in ranked:
        if cand.j > cfg.quality_max_j:
            continue
        if all(distinctiveness(cand.circle, a.circle) > es_th for a in accepted):
            accepted.append(cand)
    return DetectionReport(circles=accepted, candidates_examined=len(ranked), threshold=es_th)


def detect_circles(
    edges: EdgeMap,
    abc: AbcConfig = AbcConfig(),
    disc: DiscriminationConfig = DiscriminationConfig(),
) -> DetectionReport:
    """One ABC run over ``edges`` followed by memory analysis."""
    t0 = time.perf_counter()
    rmax = disc.resolved_rmax(edges.width, edges.height)
    best, memory = run_detection(abc, edges, disc.rmin, rmax)
    report = extract_circles(best, memory, edges.dims, disc)
    report.elapsed = time.perf_counter() - t0
    report.config = {"abc": asdict(abc), "discrimination": {**asdict(disc), "rmax": rmax}}
    return report
