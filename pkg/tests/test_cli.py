import json

import numpy as np
import pytest
from PIL import Image

from beecircles.bench_harness import load_truth
from beecircles.cli import EXIT_NO_EDGES, EXIT_OK, main
from beecircles.edge_pipeline import load_edge_map
from beecircles.geometry import Circle
from beecircles.raster_mca import rasterize_circle

THREE = ["--circle", "70,70,40", "--circle", "220,80,50", "--circle", "150,185,35"]


@pytest.fixture(scope="module")
def scene(tmp_path_factory):
    d = tmp_path_factory.mktemp("scene")
    out = d / "three.pgm"
    assert main(["synth", "--dims", "320x240", *THREE, "--out", str(out)]) == EXIT_OK
    return out


def test_synth_exact_pixels(tmp_path):
    out = tmp_path / "two.pgm"
    assert main(["synth", "--dims", "200x150", "--circle", "50,50,20", "--circle", "140,90,30", "--out", str(out)]) == 0
    e = load_edge_map(out)
    want = rasterize_circle(Circle(50, 50, 20), 200, 150).pixels | rasterize_circle(Circle(140, 90, 30), 200, 150).pixels
    assert set(map(tuple, e.points.tolist())) == want
    assert load_truth(tmp_path / "two.txt").circles == (Circle(50, 50, 20), Circle(140, 90, 30))


def test_synth_noise_keeps_truth(tmp_path):
    clean, noisy = tmp_path / "c.pgm", tmp_path / "n.pgm"
    args = ["synth", "--circle", "100,100,30"]
    main([*args, "--out", str(clean)])
    main([*args, "--noise", "0.02", "--seed", "3", "--out", str(noisy)])
    assert (tmp_path / "c.txt").read_text() == (tmp_path / "n.txt").read_text()
    assert load_edge_map(noisy).n_points > load_edge_map(clean).n_points
    again = tmp_path / "again.pgm"
    main([*args, "--noise", "0.02", "--seed", "3", "--out", str(again)])
    assert again.read_bytes() == noisy.read_bytes()


def test_synth_infeasible(tmp_path):
    assert main(["synth", "--circle", "500,10,5", "--out", str(tmp_path / "x.pgm")]) != 0
    assert not (tmp_path / "x.pgm").exists()


def test_synth_random_circles(tmp_path):
    out = tmp_path / "r.pgm"
    assert main(["synth", "--random", "3", "--seed", "5", "--out", str(out), "--truth", str(tmp_path / "t.txt")]) == 0
    assert len(load_truth(tmp_path / "t.txt")) == 3


def test_detect_three_circles(scene, tmp_path):
    report = tmp_path / "r.json"
    overlay = tmp_path / "o.png"
    rc = main(["detect", "--input", str(scene), "--edges", "--seed", "1",
               "--out-report", str(report), "--out-overlay", str(overlay)])
    assert rc == EXIT_OK
    doc = json.loads(report.read_text())
    assert doc["schema"] == 1 and doc["seed"] == 1 and doc["mode"] == "edges"
    assert doc["image"] == {"width": 320, "height": 240}
    assert len(doc["circles"]) == 3
    found = sorted((round(c["x"]), round(c["y"]), round(c["r"])) for c in doc["circles"])
    assert found == sorted([(70, 70, 40), (220, 80, 50), (150, 185, 35)])
    cfg = doc["config"]
    assert cfg["abc"]["colony_size"] == 20 and cfg["abc"]["cycles"] == 300 and cfg["abc"]["limit"] == 30
    assert cfg["discrimination"]["alpha"] == 0.05
    img = Image.open(overlay)
    assert img.mode == "RGB" and img.size == (320, 240)
    assert (np.asarray(img) == (255, 0, 0)).all(axis=2).any()


def test_detect_seed_determinism(scene, tmp_path):
    docs = []
    for i in range(2):
        p = tmp_path / f"r{i}.json"
        assert main(["detect", "--input", str(scene), "--edges", "--seed", "7", "--cycles", "80", "--out-report", str(p)]) == 0
        doc = json.loads(p.read_text())
        doc.pop("elapsed_seconds")
        docs.append(json.dumps(doc, sort_keys=True))
    assert docs[0] == docs[1]


def test_detect_missing_file(tmp_path):
    report = tmp_path / "r.json"
    assert main(["detect", "--input", str(tmp_path / "nope.pgm"), "--edges", "--out-report", str(report)]) != 0
    assert not report.exists()


def test_detect_no_edges(tmp_path):
    p = tmp_path / "sparse.pgm"
    raster = np.zeros((20, 20), np.uint8)
    raster[3, 4] = raster[10, 10] = 255
    Image.fromarray(raster).save(p, format="PPM")
    report = tmp_path / "r.json"
    assert main(["detect", "--input", str(p), "--edges", "--out-report", str(report)]) == EXIT_NO_EDGES
    assert not report.exists()


def test_detect_bad_config(scene):
    assert main(["detect", "--input", str(scene), "--edges", "--colony", "1"]) == 2


def test_detect_image_mode(tmp_path, capsys):
    yy, xx = np.mgrid[0:120, 0:160]
    img = np.where((xx - 80) ** 2 + (yy - 60) ** 2 <= 30 ** 2, 200, 30).astype(np.uint8)
    p = tmp_path / "disk.png"
    Image.fromarray(img).save(p)
    assert main(["detect", "--input", str(p), "--seed", "2", "--cycles", "150"]) == 0
    doc = json.loads(capsys.readouterr().out)
    assert doc["mode"] == "image" and doc["config"]["canny"]["sigma"] == 1.0
    assert doc["circles"]
    best = doc["circles"][0]
    assert abs(best["x"] - 80) <= 2 and abs(best["y"] - 60) <= 2 and abs(best["r"] - 30) <= 2


def write_suite(tmp_path, doc):
    p = tmp_path / "suite.json"
    p.write_text(json.dumps(doc))
    return p


def test_bench_counts_and_compare(tmp_path, scene):
    (tmp_path / "three.pgm").write_bytes(scene.read_bytes())
    (tmp_path / "three.txt").write_bytes(scene.with_suffix(".txt").read_bytes())
    suite = write_suite(tmp_path, {
        "seeds": [0, 1, 2, 3],
        "scenes": [
            {"name": "synth", "circles": [[100, 100, 40]], "dims": [320, 240]},
            {"name": "file", "edges": "three.pgm", "truth": "three.txt", "noise": 0.01},
        ],
        "variants": {"full": {"cycles": 60}, "short": {"cycles": 10}},
        "compare": ["full", "short"],
    })
    out = tmp_path / "bench.json"
    assert main(["bench", "--suite", str(suite), "--out-report", str(out)]) == 0
    doc = json.loads(out.read_text())
    assert set(doc["variants"]) == {"full", "short"}
    for entry in doc["variants"].values():
        assert [s["name"] for s in entry["scenes"]] == ["synth", "file"]
        for s in entry["scenes"]:
            assert s["runs"] == 4 and len(s["me_values"]) == 4
            assert 0 <= s["success_rate"] <= 1
    assert [c["scene"] for c in doc["comparisons"]] == ["synth", "file"]
    assert all(0 < c["p_value"] <= 1 for c in doc["comparisons"])


def test_bench_external_results(tmp_path):
    suite = write_suite(tmp_path, {
        "runs": 3,
        "scenes": [{"name": "s", "circles": [[100, 100, 40]]}],
        "variants": {"abc": {"cycles": 30}},
        "external": {"other": {"s": [1.5, 1.7, 2.0]}},
        "compare": [["abc", "other"]],
    })
    out = tmp_path / "b.json"
    assert main(["bench", "--suite", str(suite), "--out-report", str(out)]) == 0
    doc = json.loads(out.read_text())
    assert len(doc["comparisons"]) == 1
    assert doc["variants"]["abc"]["scenes"][0]["runs"] == 3


@pytest.mark.parametrize("doc", [{}, {"scenes": []}, {"scenes": [{"name": "x"}]}, {"seeds": [], "scenes": [{"circles": [[9, 9, 5]]}]}])
def test_bench_invalid_suite(tmp_path, doc):
    assert main(["bench", "--suite", str(write_suite(tmp_path, doc))]) != 0


def test_bench_unreadable_suite(tmp_path):
    p = tmp_path / "bad.json"
    p.write_text("{not json")
    assert main(["bench", "--suite", str(p)]) != 0
    assert main(["bench", "--suite", str(tmp_path / "missing.json")]) != 0
