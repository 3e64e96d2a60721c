"""Synthetic scenes, noise, and accuracy metrics for benchmarking detectors.

Accuracy follows the usual circle-detection scoring: a weighted error
score per circle (center shift plus radius mismatch), averaged over the
circles of an image into a multiple error (ME).  A run succeeds when
ME < 1; the success rate is the fraction of successful runs.
"""

from __future__ import annotations

import math
import time
from dataclasses import dataclass, field, replace
from itertools import combinations
from pathlib import Path
from typing import Iterable, Optional, Sequence

import numpy as np
from scipy.stats import norm, rankdata

from .abc_engine import AbcConfig
from .edge_pipeline import EdgeMap
from .geometry import Circle
from .multi_detector import DiscriminationConfig, detect_circles, distinctiveness
from .raster_mca import rasterize_circle

__all__ = [
    "GroundTruth",
    "MetricWeights",
    "MISS_PENALTY",
    "EXACT_MAX_N",
    "synth_scene",
    "random_scene",
    "salt_pepper",
    "error_score",
    "multiple_error",
    "success_rate",
    "wilcoxon_ranksum",
    "save_truth",
    "load_truth",
    "Scene",
    "SceneResult",
    "run_scene",
]

MISS_PENALTY = 2.0
EXACT_MAX_N = 12


@dataclass(frozen=True)
class GroundTruth:
    circles: tuple[Circle, ...] = ()

    def __len__(self):
        return len(self.circles)

    def __iter__(self):
        return iter(self.circles)


@dataclass(frozen=True)
class MetricWeights:
    eta: float = 0.05  # center weight
    mu: float = 0.1  # radius weight

    def __post_init__(self):
        if self.eta < 0 or self.mu < 0:
            raise ValueError("metric weights must be non-negative")


def _check_feasible(c: Circle, cols: int, rows: int) -> None:
    if not (0 <= c.x0 < cols and 0 <= c.y0 < rows and c.r >= 1):
        raise ValueError(f"circle {c.as_tuple()} is not feasible in a {cols}x{rows} image")


def synth_scene(dims: tuple[int, int], circles: Iterable[Circle]) -> EdgeMap:
    """Edge map holding the union of the MCA perimeters of ``circles``."""
    cols, rows = dims
    mask = np.zeros((rows, cols), dtype=bool)
    for c in circles:
        _check_feasible(c, cols, rows)
        px = rasterize_circle(c, cols, rows).pixels
        if px:
            xs, ys = zip(*px)
            mask[list(ys), list(xs)] = True
    return EdgeMap.from_mask(mask)


def random_scene(
    dims: tuple[int, int],
    n_circles: int,
    rng: np.random.Generator,
    rmin: int = 20,
    rmax: int = 60,
    gap: float = 4.0,
    max_tries: int = 10_000,
) -> GroundTruth:
    """Integer circles fully inside the frame, pairwise separated by ``gap`` pixels."""
    cols, rows = dims
    out: list[Circle] = []
    for _ in range(max_tries):
        if len(out) == n_circles:
            break
        r = int(rng.integers(rmin, rmax + 1))
        if 2 * r + 2 > min(cols, rows):
            continue
        x = int(rng.integers(r + 1, cols - r - 1))
        y = int(rng.integers(r + 1, rows - r - 1))
        if all(math.hypot(x - c.x0, y - c.y0) > r + c.r + gap for c in out):
            out.append(Circle(x, y, r))
    if len(out) < n_circles:
        raise RuntimeError(f"could not place {n_circles} disjoint circles in {cols}x{rows}")
    return GroundTruth(tuple(out))


def salt_pepper(edges: EdgeMap, density: float, seed: int) -> EdgeMap:
    """Flip every pixel independently with probability ``density``."""
    if not 0 <= density <= 1:
        raise ValueError(f"density must lie in [0, 1], got {density}")
    rng = np.random.Generator(np.random.PCG64(seed))
    flip = rng.random(edges.mask.shape) < density
    return EdgeMap.from_mask(edges.mask ^ flip)


def error_score(truth: Circle, detected: Circle, w: MetricWeights = MetricWeights()) -> float:
    return w.eta * (abs(truth.x0 - detected.x0) + abs(truth.y0 - detected.y0)) + w.mu * abs(truth.r - detected.r)


def multiple_error(
    truths: Sequence[Circle],
    detections: Sequence[Circle],
    w: MetricWeights = MetricWeights(),
    miss_penalty: float = MISS_PENALTY,
) -> float:
    """Mean error score over the true circles of one image.

    Truths and detections are paired greedily, closest pair first (distance
    in (x, y, r) space), each used at most once.  A truth left without a
    detection scores ``miss_penalty``.  Surplus detections are ignored.
    """
    truths = list(truths)
    if not truths:
        raise ValueError("ground truth must contain at least one circle")
    # ties broken on detection parameters, not list position, so the result
    # does not depend on detection order
    pairs = sorted(
        (distinctiveness(t, d), ti, d.as_tuple(), di)
        for ti, t in enumerate(truths)
        for di, d in enumerate(detections)
    )
    matched_t: dict[int, Circle] = {}
    used_d: set[int] = set()
    for _, ti, _, di in pairs:
        if ti in matched_t or di in used_d:
            continue
        matched_t[ti] = detections[di]
        used_d.add(di)
    total = 0.0
    for ti, t in enumerate(truths):
        total += error_score(t, matched_t[ti], w) if ti in matched_t else miss_penalty
    return total / len(truths)


def success_rate(me_values: Sequence[float]) -> float:
    """Fraction of runs with ME < 1."""
    if len(me_values) == 0:
        raise ValueError("no ME values")
    return sum(1 for m in me_values if m < 1) / len(me_values)


def wilcoxon_ranksum(a: Sequence[float], b: Sequence[float], method: str = "auto") -> float:
    """Two-sided p-value of the Wilcoxon rank-sum test for independent samples.

    Ties get midranks.  ``method="exact"`` enumerates every split of the
    pooled ranks into groups of the observed sizes; ``"normal"`` uses the
    tie-corrected normal approximation with a 0.5 continuity correction.
    ``"auto"`` picks exact when ``len(a) + len(b) <= 12``.
    """
    a = np.asarray(a, dtype=np.float64)
    b = np.asarray(b, dtype=np.float64)
    na, nb = len(a), len(b)
    if na == 0 or nb == 0:
        raise ValueError("both samples must be non-empty")
    n = na + nb
    if method == "auto":
        method = "exact" if n <= EXACT_MAX_N else "normal"

    ranks = rankdata(np.concatenate((a, b)))
    w = ranks[:na].sum()
    mean = na * (n + 1) / 2.0
    dev = abs(w - mean)

    if method == "exact":
        # midranks are multiples of 0.5; compare on a slightly widened
        # deviation so equal sums are not lost to float rounding
        tol = 1e-9 * n
        hits = 0
        total = 0
        for idx in combinations(range(n), na):
            total += 1
            if abs(ranks[list(idx)].sum() - mean) >= dev - tol:
                hits += 1
        return hits / total
    if method == "normal":
        _, counts = np.unique(ranks, return_counts=True)
        tie_term = float(np.sum(counts**3 - counts)) / (n * (n - 1)) if n > 1 else 0.0
        var = na * nb / 12.0 * ((n + 1) - tie_term)
        if var <= 0:
            return 1.0
        z = max(dev - 0.5, 0.0) / math.sqrt(var)
        return min(1.0, 2.0 * norm.sf(z))
    raise ValueError(f"unknown method {method!r}")


def save_truth(truth: Iterable[Circle], path) -> None:
    lines = [f"{c.x0:g} {c.y0:g} {c.r:g}\n" for c in truth]
    Path(path).write_text("".join(lines))


def load_truth(path) -> GroundTruth:
    """Read a sidecar with one ``x y r`` triple per line.

    Blank lines and ``#`` comments are skipped.
    """
    circles = []
    for lineno, line in enumerate(Path(path).read_text().splitlines(), 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        parts = line.split()
        if len(parts) != 3:
            raise ValueError(f"{path}:{lineno}: expected 'x y r', got {line!r}")
        circles.append(Circle(*map(float, parts)))
    return GroundTruth(tuple(circles))


@dataclass
class Scene:
    name: str
    edges: EdgeMap
    truth: GroundTruth


@dataclass
class SceneResult:
    name: str
    seeds: list[int]
    me_values: list[float] = field(default_factory=list)
    elapsed: list[float] = field(default_factory=list)
    n_detected: list[int] = field(default_factory=list)

    @property
    def mean_me(self) -> float:
        return float(np.mean(self.me_values))

    @property
    def std_me(self) -> float:
        return float(np.std(self.me_values))

    @property
    def success_rate(self) -> float:
        return success_rate(self.me_values)

    @property
    def mean_elapsed(self) -> float:
        return float(np.mean(self.elapsed))

    def summary(self) -> dict:
        return {
            "name": self.name,
            "runs": len(self.me_values),
            "mean_me": self.mean_me,
            "std_me": self.std_me,
            "success_rate": self.success_rate,
            "mean_elapsed_seconds": self.mean_elapsed,
            "me_values": list(self.me_values),
            "seeds": list(self.seeds),
        }


def run_scene(
    scene: Scene,
    seeds: Sequence[int],
    abc: AbcConfig = AbcConfig(),
    disc: DiscriminationConfig = DiscriminationConfig(),
    weights: MetricWeights = MetricWeights(),
    progress: Optional[callable] = None,
) -> SceneResult:
    """Detect circles in ``scene`` once per seed and score every run."""
    res = SceneResult(name=scene.name, seeds=list(seeds))
    for seed in seeds:
        t0 = time.perf_counter()
        report = detect_circles(scene.edges, replace(abc, seed=seed), disc)
        res.elapsed.append(time.perf_counter() - t0)
        found = [s.circle for s in report.circles]
        res.me_values.append(multiple_error(scene.truth.circles, found, weights))
        res.n_detected.append(len(found))
        if progress:
            progress(scene, seed, res)
    return res
