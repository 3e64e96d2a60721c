"""Digital circumference of a candidate circle via the midpoint circle algorithm.

Only the first octant (from the top of the circle, ``0 <= x <= y``) is
traced; the other seven are reflections.  Each step moves one column right
and keeps whichever of the candidate rows minimizes the midpoint error
``e = x**2 + y**2 - r**2``.  For integer radii the ``|e|`` comparison never
ties, so the traced set is unique.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .geometry import Circle

__all__ = ["PerimeterSet", "rasterize_circle", "round_half_away", "perimeter_offsets", "first_octant"]


@dataclass(frozen=True)
class PerimeterSet:
    pixels: frozenset  # in-image (x, y) integer pixels
    total: int  # Ns, perimeter pixels before clipping
    in_bounds: int


def round_half_away(v: float) -> int:
    """Round to nearest integer, halves away from zero (2.5 -> 3, -2.5 -> -3)."""
    return int(math.copysign(math.floor(abs(v) + 0.5), v))


def first_octant(r: int) -> list[tuple[int, int]]:
    """Pixels ``(x, y)`` of the octant ``0 <= x <= y`` for integer radius ``r``."""
    if r < 1:
        raise ValueError(f"radius must be >= 1, got {r}")
    r2 = r * r
    x, y = 0, r
    out = []
    while x <= y:
        out.append((x, y))
        x += 1
        e = x * x + y * y - r2
        # step down while the next row has a smaller |e|
        while y > 0:
            e_down = e - 2 * y + 1
            if abs(e_down) < abs(e):
                y -= 1
                e = e_down
            else:
                break
    return out


@lru_cache(maxsize=4096)
def _offsets(r: int) -> np.ndarray:
    pts = set()
    for a, b in first_octant(r):
        pts.update(
            ((a, b), (-a, b), (a, -b), (-a, -b), (b, a), (-b, a), (b, -a), (-b, -a))
        )
    arr = np.array(sorted(pts), dtype=np.int64)
    arr.setflags(write=False)
    return arr


def perimeter_offsets(r: int) -> np.ndarray:
    """Deduplicated ``(dx, dy)`` offsets of the full digital circle of radius ``r``.

    Cached per radius; the returned array is read-only.
    """
    if r < 1:
        raise ValueError(f"radius must be >= 1, got {r}")
    return _offsets(int(r))


def raster_params(c: Circle) -> tuple[int, int, int]:
    """Integer center and radius used to rasterize ``c``."""
    return round_half_away(c.x0), round_half_away(c.y0), round_half_away(c.r)


def rasterize_circle(c: Circle, cols: int, rows: int) -> PerimeterSet:
    """MCA perimeter of ``c`` clipped to a ``cols`` x ``rows`` image.

    Center and radius are rounded to the nearest integer first.  Pixels off
    the image are dropped from ``pixels`` but still counted in ``total``.
    """
    if c.r < 1:
        raise ValueError(f"radius must be >= 1, got {c.r}")
    cx, cy, r = raster_params(c)
    off = perimeter_offsets(r)
    xs = off[:, 0] + cx
    ys = off[:, 1] + cy
    inside = (xs >= 0) & (xs < cols) & (ys >= 0) & (ys < rows)
    pixels = frozenset(zip(xs[inside].tolist(), ys[inside].tolist()))
    return PerimeterSet(pixels=pixels, total=len(off), in_bounds=len(pixels))
