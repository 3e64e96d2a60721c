"""Circle primitives."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

__all__ = ["Circle", "circumcircle", "is_feasible", "DEGENERATE_EPS"]

# Twice-signed-area cutoff below which a point triple counts as collinear.
DEGENERATE_EPS = 1e-12


@dataclass(frozen=True)
class Circle:
    x0: float
    y0: float
    r: float

    def __post_init__(self):
        if not (math.isfinite(self.x0) and math.isfinite(self.y0) and math.isfinite(self.r)):
            raise ValueError(f"circle parameters must be finite: {self}")
        if not self.r > 0:
            raise ValueError(f"radius must be positive, got {self.r}")

    def as_tuple(self) -> tuple[float, float, float]:
        return (self.x0, self.y0, self.r)


def circumcircle(p1, p2, p3) -> Optional[Circle]:
    """Circle through three points, or ``None`` when they are collinear.

    The points are sorted before solving, so the result is bit-identical
    for every ordering of the arguments.  Coordinates are taken relative to
    the first sorted point, which keeps the determinant well conditioned for
    pixel-scale inputs far from the origin.
    """
    (ax, ay), (bx, by), (cx, cy) = sorted(
        ((float(p[0]), float(p[1])) for p in (p1, p2, p3))
    )
    ux, uy = bx - ax, by - ay
    vx, vy = cx - ax, cy - ay
    # twice the signed triangle area, evaluated in translated coordinates
    area2 = ux * vy - uy * vx
    if abs(area2) < DEGENERATE_EPS:
        return None

    d = 2.0 * area2
    u2 = ux * ux + uy * uy
    v2 = vx * vx + vy * vy
    ox = (vy * u2 - uy * v2) / d
    oy = (ux * v2 - vx * u2) / d
    r = math.hypot(ox, oy)
    if not (math.isfinite(ox) and math.isfinite(oy) and r > 0):
        return None
    return Circle(ax + ox, ay + oy, r)


def is_feasible(c: Optional[Circle], cols: int, rows: int, rmin: float, rmax: float) -> bool:
    """True iff ``rmin <= r <= rmax`` and the center lies inside the image."""
    if rmin > rmax:
        raise ValueError(f"rmin ({rmin}) must not exceed rmax ({rmax})")
    if c is None:
        return False
    return rmin <= c.r <= rmax and 0 <= c.x0 < cols and 0 <= c.y0 < rows
