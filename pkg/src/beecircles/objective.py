"""Candidate decoding and the edge-matching objective."""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache
from typing import Optional, Sequence

import numpy as np

from .edge_pipeline import EdgeMap
from .geometry import Circle, circumcircle, is_feasible
from .raster_mca import perimeter_offsets, raster_params, round_half_away

__all__ = [
    "Candidate",
    "ScoredCircle",
    "CircleObjective",
    "decode",
    "decode_indices",
    "match_error",
    "fitness",
    "WORST_J",
]

WORST_J = 1.0
N_PARAMS = 3


@dataclass(frozen=True)
class ScoredCircle:
    circle: Circle
    j: float


@dataclass
class Candidate:
    """One food source: three real-valued positions into the edge-point vector."""

    pos: np.ndarray
    circle: Optional[Circle]
    j_value: float
    trials: int = 0
    fit: float = field(init=False)

    def __post_init__(self):
        self.fit = fitness(self.j_value)


def decode_indices(pos: Sequence[float], n_points: int) -> tuple[int, int, int]:
    """Round each position (halves away from zero) and clamp to ``[0, n_points - 1]``."""
    hi = n_points - 1
    return tuple(min(max(round_half_away(float(p)), 0), hi) for p in pos)


def decode(pos: Sequence[float], edges: EdgeMap, rmin: float = 1.0, rmax: float = float("inf")) -> Optional[Circle]:
    """Circle encoded by three edge-point indices, or ``None`` if invalid.

    Invalid covers repeated indices, collinear points and circles failing
    the feasibility bounds (``rmin <= r <= rmax``, center inside the image).
    """
    if edges.n_points < N_PARAMS:
        raise ValueError(f"need at least 3 edge points, got {edges.n_points}")
    i1, i2, i3 = decode_indices(pos, edges.n_points)
    if i1 == i2 or i1 == i3 or i2 == i3:
        return None
    P = edges.points
    c = circumcircle(P[i1], P[i2], P[i3])
    # the rasterizer needs r >= 1 whatever rmin says
    if c is None or c.r < 1 or not is_feasible(c, edges.width, edges.height, rmin, rmax):
        return None
    return c


def match_error(c: Circle, edges: EdgeMap) -> float:
    """Fraction of the circle's MCA perimeter with no edge pixel underneath.

    Perimeter pixels falling outside the image count as misses, so the
    denominator is always the full perimeter size.
    """
    cx, cy, r = raster_params(c)
    w, h = edges.width, edges.height
    if r <= cx < w - r and r <= cy < h - r:
        flat = _flat_offsets(r, w)
        hits = int(np.count_nonzero(edges.mask.ravel()[flat + (cy * w + cx)]))
        return 1.0 - hits / len(flat)
    off = perimeter_offsets(r)
    xs = off[:, 0] + cx
    ys = off[:, 1] + cy
    inside = (xs >= 0) & (xs < edges.width) & (ys >= 0) & (ys < edges.height)
    hits = int(np.count_nonzero(edges.mask[ys[inside], xs[inside]]))
    return 1.0 - hits / len(off)


@lru_cache(maxsize=4096)
def _flat_offsets(r: int, width: int) -> np.ndarray:
    off = perimeter_offsets(r)
    return off[:, 1] * width + off[:, 0]


def fitness(j: float) -> float:
    """Nectar amount of a source with objective ``j`` (larger is better)."""
    if j >= 0:
        return 1.0 / (1.0 + j)
    return 1.0 + abs(j)


class CircleObjective:
    """Scores position vectors against a fixed edge map.

    Calling the instance returns ``(circle, J)``; invalid candidates get
    ``(None, 1.0)``.
    """

    def __init__(self, edges: EdgeMap, rmin: float = 1.0, rmax: float = float("inf")):
        if edges.n_points < N_PARAMS:
            raise ValueError(f"need at least 3 edge points, got {edges.n_points}")
        self.edges = edges
        self.rmin = rmin
        self.rmax = rmax
        self.evaluations = 0

    @property
    def bounds(self) -> list[tuple[float, float]]:
        return [(0.0, float(self.edges.n_points - 1))] * N_PARAMS

    def __call__(self, pos) -> tuple[Optional[Circle], float]:
        self.evaluations += 1
        c = decode(pos, self.edges, self.rmin, self.rmax)
        if c is None:
            return None, WORST_J
        return c, match_error(c, self.edges)
