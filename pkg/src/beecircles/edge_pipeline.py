"""Image loading, Canny edge extraction and edge-map IO.

The detector never looks at intensities directly: it consumes an
:class:`EdgeMap`, i.e. a binary raster together with the row-major list of
its edge pixels.
"""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path

import numpy as np
from PIL import Image, UnidentifiedImageError
from scipy import ndimage

__all__ = [
    "GrayImage",
    "EdgeMap",
    "ImageError",
    "load_image",
    "canny_edges",
    "load_edge_map",
    "save_edge_map",
]

MIN_SIDE = 3
SUPPORTED_FORMATS = {"PPM", "PNG"}  # Pillow reports PGM files as "PPM"


class ImageError(ValueError):
    """Raised when an image cannot be read or does not meet size limits."""


@dataclass(frozen=True)
class GrayImage:
    width: int
    height: int
    data: np.ndarray  # (height, width) float64, values in [0, 255]

    def __post_init__(self):
        if self.data.shape != (self.height, self.width):
            raise ValueError(
                f"data shape {self.data.shape} does not match {self.height}x{self.width}"
            )
        if self.width < MIN_SIDE or self.height < MIN_SIDE:
            raise ImageError(f"image too small: {self.width}x{self.height}")

    @classmethod
    def from_array(cls, data) -> GrayImage:
        arr = np.asarray(data, dtype=np.float64)
        if arr.ndim != 2:
            raise ValueError("expected a 2-D intensity array")
        return cls(width=arr.shape[1], height=arr.shape[0], data=arr)


@dataclass(frozen=True, eq=False)
class EdgeMap:
    """Binary edge raster plus the ordered edge-point vector.

    ``points`` holds ``(x, y)`` integer coordinates of every true pixel of
    ``mask``, sorted row-major (by ``y``, then ``x``).  Build instances with
    :meth:`from_mask` so both views stay consistent.
    """

    width: int
    height: int
    mask: np.ndarray  # (height, width) bool
    points: np.ndarray  # (Ep, 2) int64, columns x, y

    @classmethod
    def from_mask(cls, mask) -> EdgeMap:
        mask = np.ascontiguousarray(mask, dtype=bool)
        if mask.ndim != 2:
            raise ValueError("edge mask must be 2-D")
        mask.setflags(write=False)
        ys, xs = np.nonzero(mask)
        points = np.column_stack((xs, ys)).astype(np.int64)
        points.setflags(write=False)
        return cls(width=mask.shape[1], height=mask.shape[0], mask=mask, points=points)

    @classmethod
    def empty(cls, width: int, height: int) -> EdgeMap:
        return cls.from_mask(np.zeros((height, width), dtype=bool))

    @property
    def n_points(self) -> int:
        return len(self.points)

    @property
    def dims(self) -> tuple[int, int]:
        """``(cols, rows)`` of the raster."""
        return self.width, self.height

    def __eq__(self, other):
        if not isinstance(other, EdgeMap):
            return NotImplemented
        return self.dims == other.dims and np.array_equal(self.mask, other.mask)

    __hash__ = None


def _open(path) -> Image.Image:
    path = Path(path)
    if not path.is_file():
        raise ImageError(f"no such file: {path}")
    try:
        im = Image.open(path)
        im.load()
    except (UnidentifiedImageError, OSError) as exc:
        raise ImageError(f"cannot decode {path}: {exc}") from exc
    if im.format not in SUPPORTED_FORMATS:
        raise ImageError(f"unsupported format {im.format!r} for {path}; use PGM or PNG")
    return im


def _to_gray_array(im: Image.Image) -> np.ndarray:
    if im.mode in ("I", "I;16", "I;16B", "F"):
        arr = np.asarray(im, dtype=np.float64)
        peak = arr.max(initial=0.0)
        if peak > 255:
            arr = arr * (255.0 / peak)
        return arr
    if im.mode != "L":
        # ITU-R 601-2 luma, alpha and palettes resolved by Pillow
        im = im.convert("L")
    return np.asarray(im, dtype=np.float64)


def load_image(path) -> GrayImage:
    """Read a PGM or PNG file as a grayscale image.

    Color inputs are reduced to luminance.  Raises :class:`ImageError` for
    missing, undecodable or unsupported files and for images smaller than
    3x3.
    """
    return GrayImage.from_array(_to_gray_array(_open(path)))


def canny_edges(img: GrayImage, sigma: float = 1.0, low: float = 0.1, high: float = 0.3) -> EdgeMap:
    """Single-pixel-wide Canny edges.

    Parameters
    ----------
    img : GrayImage
        Input intensities.
    sigma : float
        Standard deviation of the Gaussian pre-smoothing, in pixels.
    low, high : float
        Hysteresis thresholds as fractions of the maximum gradient
        magnitude, ``0 < low < high <= 1``.

    Returns
    -------
    EdgeMap
        Pixels surviving non-maximum suppression whose 8-connected weak
        component contains at least one strong pixel.
    """
    if not sigma > 0:
        raise ValueError(f"sigma must be positive, got {sigma}")
    if not 0 < low < high <= 1:
        raise ValueError(f"thresholds must satisfy 0 < low < high <= 1, got low={low}, high={high}")

    smooth = ndimage.gaussian_filter(img.data, sigma, mode="nearest")
    gx = ndimage.sobel(smooth, axis=1, mode="nearest")
    gy = ndimage.sobel(smooth, axis=0, mode="nearest")
    mag = np.hypot(gx, gy)
    peak = mag.max()
    # float noise from the filters on flat images sits many orders below
    # any real edge response
    if peak <= 1e-9:
        return EdgeMap.empty(img.width, img.height)

    thin = _non_max_suppression(mag, gx, gy)
    weak = thin & (mag >= low * peak)
    strong = thin & (mag >= high * peak)
    labels, _ = ndimage.label(weak, structure=np.ones((3, 3), dtype=bool))
    keep = np.unique(labels[strong])
    keep = keep[keep > 0]
    return EdgeMap.from_mask(np.isin(labels, keep))


def _non_max_suppression(mag: np.ndarray, gx: np.ndarray, gy: np.ndarray) -> np.ndarray:
    # Direction bins: 0 horizontal gradient, 1 diagonal (+x,+y), 2 vertical,
    # 3 anti-diagonal.  Ties are broken asymmetrically (strict against the
    # "behind" neighbor, non-strict against the "ahead" one) so plateaus of
    # equal magnitude, such as an ideal step, thin to one pixel.
    angle = np.rad2deg(np.arctan2(gy, gx)) % 180.0
    bins = np.floor((angle + 22.5) / 45.0).astype(int) % 4
    offsets = [(0, 1), (1, 1), (1, 0), (1, -1)]  # (dy, dx) of the "ahead" neighbor

    padded = np.pad(mag, 1, mode="constant")
    h, w = mag.shape
    out = np.zeros_like(mag, dtype=bool)
    for b, (dy, dx) in enumerate(offsets):
        ahead = padded[1 + dy : 1 + dy + h, 1 + dx : 1 + dx + w]
        behind = padded[1 - dy : 1 - dy + h, 1 - dx : 1 - dx + w]
        sel = bins == b
        out |= sel & (mag > behind) & (mag >= ahead)
    return out & (mag > 0)


def load_edge_map(path) -> EdgeMap:
    """Read a binary edge image; any nonzero pixel is an edge."""
    im = _open(path)
    if im.mode == "P":
        im = im.convert("RGB")
    arr = np.asarray(im)
    if arr.ndim == 3:
        # ignore alpha; a pixel is an edge if any color channel is set
        channels = 1 if im.mode == "LA" else min(arr.shape[2], 3)
        return EdgeMap.from_mask(arr[..., :channels].any(axis=2))
    return EdgeMap.from_mask(arr != 0)


def save_edge_map(edges: EdgeMap, path) -> None:
    """Write an edge map as a binary PGM with values 0 and 255."""
    raster = np.where(edges.mask, 255, 0).astype(np.uint8)
    Image.fromarray(raster).save(path, format="PPM")
