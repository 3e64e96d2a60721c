"""Command line entry points: ``detect``, ``synth`` and ``bench``.

Examples::

    beecircles synth --dims 320x240 --circle 160,120,50 --noise 0.02 --out scene.pgm
    beecircles detect --input scene.pgm --edges --seed 7 --out-report report.json
    beecircles bench --suite suite.json --out-report bench.json
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
from dataclasses import asdict
from pathlib import Path

import numpy as np
from PIL import Image

from .abc_engine import AbcConfig
from .bench_harness import (
    GroundTruth,
    Scene,
    load_truth,
    random_scene,
    run_scene,
    salt_pepper,
    save_truth,
    synth_scene,
    wilcoxon_ranksum,
)
from .edge_pipeline import EdgeMap, ImageError, canny_edges, load_edge_map, load_image, save_edge_map
from .geometry import Circle
from .multi_detector import DetectionReport, DiscriminationConfig, detect_circles
from .raster_mca import rasterize_circle

log = logging.getLogger("beecircles")

SCHEMA = 1
EXIT_OK = 0
EXIT_ERROR = 1
EXIT_USAGE = 2
EXIT_NO_EDGES = 3


class CliError(Exception):
    def __init__(self, message: str, code: int = EXIT_ERROR):
        super().__init__(message)
        self.code = code


# -- shared option groups ---------------------------------------------------

def _add_detector_args(p: argparse.ArgumentParser) -> None:
    g = p.add_argument_group("optimizer")
    g.add_argument("--colony", type=int, default=20, help="number of food sources (default: 20)")
    g.add_argument("--cycles", type=int, default=300, help="optimization cycles (default: 300)")
    g.add_argument("--limit", type=int, default=30, help="trials before a source is abandoned (default: 30)")
    g.add_argument("--memory-cap", type=int, default=100, help="exhausted-source memory size (default: 100)")
    g.add_argument("--seed", type=int, default=0, help="PRNG seed (default: 0)")
    g = p.add_argument_group("discrimination")
    g.add_argument("--alpha", type=float, default=0.05, help="sensitivity factor (default: 0.05)")
    g.add_argument("--rmin", type=float, default=5.0, help="smallest radius in pixels (default: 5)")
    g.add_argument("--rmax", type=float, default=None, help="largest radius in pixels (default: half the diagonal)")
    g.add_argument("--max-j", type=float, default=0.25, help="matching-error ceiling for reported circles (default: 0.25)")
    g = p.add_argument_group("canny")
    g.add_argument("--sigma", type=float, default=1.0, help="Gaussian sigma (default: 1.0)")
    g.add_argument("--canny-low", type=float, default=0.1, help="low threshold, fraction of max gradient (default: 0.1)")
    g.add_argument("--canny-high", type=float, default=0.3, help="high threshold, fraction of max gradient (default: 0.3)")


def _configs(args, overrides: dict | None = None) -> tuple[AbcConfig, DiscriminationConfig]:
    o = dict(overrides or {})
    def pick(key, attr):
        return o.pop(key, getattr(args, attr))
    try:
        abc = AbcConfig(
            colony_size=pick("colony", "colony"),
            cycles=pick("cycles", "cycles"),
            limit=pick("limit", "limit"),
            memory_cap=pick("memory_cap", "memory_cap"),
            seed=pick("seed", "seed"),
        )
        disc = DiscriminationConfig(
            alpha=pick("alpha", "alpha"),
            rmin=pick("rmin", "rmin"),
            rmax=pick("rmax", "rmax"),
            quality_max_j=pick("max_j", "max_j"),
        )
    except ValueError as exc:
        raise CliError(f"invalid configuration: {exc}", EXIT_USAGE) from exc
    if o:
        raise CliError(f"unknown configuration keys: {sorted(o)}", EXIT_USAGE)
    return abc, disc


def _load_edges(path, binary: bool, args) -> tuple[EdgeMap, np.ndarray | None]:
    """Edge map plus the background raster used for overlays."""
    try:
        if binary:
            edges = load_edge_map(path)
            return edges, np.where(edges.mask, 255, 0).astype(np.uint8)
        img = load_image(path)
        edges = canny_edges(img, args.sigma, args.canny_low, args.canny_high)
    except ImageError as exc:
        raise CliError(str(exc)) from exc
    except ValueError as exc:
        raise CliError(f"invalid configuration: {exc}", EXIT_USAGE) from exc
    return edges, np.clip(img.data, 0, 255).astype(np.uint8)


# -- detect ------------------------------------------------------------------

def report_to_dict(report: DetectionReport, edges: EdgeMap, input_path: str, mode: str, canny: dict | None) -> dict:
    config = dict(report.config)
    if canny is not None:
        config["canny"] = canny
    return {
        "schema": SCHEMA,
        "input": input_path,
        "mode": mode,
        "image": {"width": edges.width, "height": edges.height},
        "edge_points": edges.n_points,
        "seed": config["abc"]["seed"],
        "config": config,
        "threshold": report.threshold,
        "candidates_examined": report.candidates_examined,
        "circles": [
            {"x": s.circle.x0, "y": s.circle.y0, "r": s.circle.r, "j": s.j} for s in report.circles
        ],
        "elapsed_seconds": report.elapsed,
    }


def draw_overlay(background: np.ndarray, circles, path, color=(255, 0, 0)) -> None:
    rgb = np.repeat(background[:, :, None], 3, axis=2)
    rows, cols = background.shape
    for c in circles:
        px = rasterize_circle(c, cols, rows).pixels
        if px:
            xs, ys = zip(*px)
            rgb[list(ys), list(xs)] = color
    Image.fromarray(rgb).save(path, format="PNG")


def cmd_detect(args) -> int:
    abc, disc = _configs(args)
    edges, background = _load_edges(args.input, args.edges, args)
    if edges.n_points < 3:
        raise CliError(f"no edges: {edges.n_points} edge points in {args.input}, need at least 3", EXIT_NO_EDGES)
    try:
        report = detect_circles(edges, abc, disc)
    except ValueError as exc:
        raise CliError(f"invalid configuration: {exc}", EXIT_USAGE) from exc
    canny = None if args.edges else {"sigma": args.sigma, "low": args.canny_low, "high": args.canny_high}
    doc = report_to_dict(report, edges, str(args.input), "edges" if args.edges else "image", canny)
    text = json.dumps(doc, indent=2, sort_keys=True) + "\n"
    if args.out_report:
        Path(args.out_report).write_text(text)
    else:
        sys.stdout.write(text)
    if args.out_overlay:
        draw_overlay(background, [s.circle for s in report.circles], args.out_overlay)
    log.info("%d circle(s) in %.2fs", len(report.circles), report.elapsed)
    return EXIT_OK


# -- synth -------------------------------------------------------------------

def _parse_dims(text: str) -> tuple[int, int]:
    try:
        w, h = text.lower().split("x")
        dims = int(w), int(h)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected WIDTHxHEIGHT, got {text!r}")
    if min(dims) < 3:
        raise argparse.ArgumentTypeError(f"image too small: {text}")
    return dims


def _parse_circle(text: str) -> Circle:
    try:
        x, y, r = (float(v) for v in text.replace(" ", "").split(","))
        return Circle(x, y, r)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected X,Y,R with R > 0, got {text!r}")


def cmd_synth(args) -> int:
    if args.random:
        truth = random_scene(args.dims, args.random, np.random.default_rng(args.seed))
        truth = GroundTruth(truth.circles + tuple(args.circle))
    else:
        truth = GroundTruth(tuple(args.circle))
    try:
        edges = synth_scene(args.dims, truth)
        if args.noise:
            edges = salt_pepper(edges, args.noise, args.seed)
    except ValueError as exc:
        raise CliError(str(exc), EXIT_USAGE) from exc
    out = Path(args.out)
    truth_path = Path(args.truth) if args.truth else out.with_suffix(".txt")
    save_edge_map(edges, out)
    save_truth(truth, truth_path)
    log.info("wrote %s (%d edge points) and %s", out, edges.n_points, truth_path)
    return EXIT_OK


# -- bench -------------------------------------------------------------------

def _load_suite(path: Path, args) -> tuple[list[Scene], list[int], dict, dict, list]:
    try:
        suite = json.loads(path.read_text())
    except (OSError, json.JSONDecodeError) as exc:
        raise CliError(f"cannot read suite {path}: {exc}") from exc
    if not isinstance(suite, dict) or not suite.get("scenes"):
        raise CliError(f"invalid suite {path}: no scenes", EXIT_USAGE)

    if "seeds" in suite:
        seeds = [int(s) for s in suite["seeds"]]
    else:
        seeds = list(range(int(suite.get("runs", 35))))
    if not seeds:
        raise CliError(f"invalid suite {path}: no seeds", EXIT_USAGE)

    base = path.parent
    scenes = []
    for i, entry in enumerate(suite["scenes"]):
        name = entry.get("name", f"scene{i}")
        try:
            if "circles" in entry:
                dims = tuple(entry.get("dims", (320, 240)))
                truth = GroundTruth(tuple(Circle(*c) for c in entry["circles"]))
                edges = synth_scene(dims, truth)
            elif "edges" in entry or "image" in entry:
                binary = "edges" in entry
                edges, _ = _load_edges(base / entry["edges" if binary else "image"], binary, args)
                truth = load_truth(base / entry["truth"])
            else:
                raise CliError(f"scene {name!r} needs 'circles', 'edges' or 'image'", EXIT_USAGE)
            if entry.get("noise"):
                edges = salt_pepper(edges, float(entry["noise"]), int(entry.get("noise_seed", 0)))
        except (KeyError, TypeError, ValueError, OSError) as exc:
            raise CliError(f"invalid scene {name!r}: {exc}", EXIT_USAGE) from exc
        if len(truth) == 0:
            raise CliError(f"scene {name!r} has no ground-truth circles", EXIT_USAGE)
        scenes.append(Scene(name, edges, truth))

    variants = suite.get("variants") or {"abc": {}}
    external = suite.get("external") or {}
    compare = suite.get("compare") or []
    if compare and isinstance(compare[0], str):
        compare = [compare]
    return scenes, seeds, variants, external, compare


def cmd_bench(args) -> int:
    suite_path = Path(args.suite)
    scenes, seeds, variants, external, compare = _load_suite(suite_path, args)

    results: dict[str, dict[str, list[float]]] = {}
    doc = {"schema": SCHEMA, "suite": str(suite_path), "seeds": seeds, "variants": {}, "comparisons": []}
    for vname, overrides in variants.items():
        abc, disc = _configs(args, overrides)
        entry = {"config": {"abc": asdict(abc), "discrimination": asdict(disc)}, "scenes": []}
        results[vname] = {}
        for scene in scenes:
            if scene.edges.n_points < 3:
                raise CliError(f"no edges in scene {scene.name!r}", EXIT_NO_EDGES)
            res = run_scene(scene, seeds, abc, disc)
            log.info("%s/%s: SR=%.2f ME=%.3f", vname, scene.name, res.success_rate, res.mean_me)
            entry["scenes"].append(res.summary())
            results[vname][scene.name] = res.me_values
        doc["variants"][vname] = entry
    for name, per_scene in external.items():
        results[name] = {k: [float(v) for v in vals] for k, vals in per_scene.items()}

    for pair in compare:
        if len(pair) != 2 or any(p not in results for p in pair):
            raise CliError(f"cannot compare {pair}: known result sets are {sorted(results)}", EXIT_USAGE)
        a, b = pair
        for scene in scenes:
            if scene.name in results[a] and scene.name in results[b]:
                p = wilcoxon_ranksum(results[a][scene.name], results[b][scene.name])
                doc["comparisons"].append({"a": a, "b": b, "scene": scene.name, "p_value": p})

    text = json.dumps(doc, indent=2, sort_keys=True) + "\n"
    if args.out_report:
        Path(args.out_report).write_text(text)
    else:
        sys.stdout.write(text)
    return EXIT_OK


# -- entry point -------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="beecircles", description="Multi-circle detection with an artificial bee colony.")
    parser.add_argument("-v", "--verbose", action="store_true", help="log progress to stderr")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("detect", help="detect circles in an image or edge map")
    p.add_argument("--input", required=True, help="PGM or PNG file")
    p.add_argument("--edges", action="store_true", help="input is already a binary edge map (skip Canny)")
    p.add_argument("--out-report", help="JSON report path (default: stdout)")
    p.add_argument("--out-overlay", help="PNG with detected circles drawn over the input")
    _add_detector_args(p)
    p.set_defaults(func=cmd_detect)

    p = sub.add_parser("synth", help="render a synthetic edge map and its ground truth")
    p.add_argument("--dims", type=_parse_dims, default=(320, 240), help="WIDTHxHEIGHT (default: 320x240)")
    p.add_argument("--circle", type=_parse_circle, action="append", default=[], help="X,Y,R; repeatable")
    p.add_argument("--random", type=int, default=0, metavar="N", help="add N random disjoint circles")
    p.add_argument("--noise", type=float, default=0.0, help="salt & pepper density (default: 0)")
    p.add_argument("--seed", type=int, default=0, help="seed for noise and random circles")
    p.add_argument("--out", required=True, help="output edge map (PGM)")
    p.add_argument("--truth", help="ground-truth sidecar (default: OUT with .txt suffix)")
    p.set_defaults(func=cmd_synth)

    p = sub.add_parser("bench", help="run a benchmark suite and report ME / SR statistics")
    p.add_argument("--suite", required=True, help="suite description (JSON)")
    p.add_argument("--out-report", help="JSON metrics path (default: stdout)")
    _add_detector_args(p)
    p.set_defaults(func=cmd_bench)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(message)s")
    try:
        return args.func(args)
    except CliError as exc:
        print(f"beecircles: error: {exc}", file=sys.stderr)
        return exc.code
    except OSError as exc:
        print(f"beecircles: error: {exc}", file=sys.stderr)
        return EXIT_ERROR


if __name__ == "__main__":
    sys.exit(main())
