import math

import pytest
from hypothesis import given, strategies as st

from beecircles.geometry import Circle
from beecircles.raster_mca import (
    first_octant,
    perimeter_offsets,
    rasterize_circle,
    round_half_away,
)
from oracles import mca_oracle, mca_oracle_at

# counts from the brute-force oracle in tests/oracles.py
ORACLE_COUNTS = {1: 4, 2: 12, 3: 16, 5: 28, 10: 56, 20: 112}


@pytest.mark.parametrize("r, n", sorted(ORACLE_COUNTS.items()))
def test_oracle_counts_frozen(r, n):
    assert len(mca_oracle(r)) == n


def test_radius_three_matches_oracle():
    ps = rasterize_circle(Circle(10, 10, 3), 100, 100)
    assert ps.pixels == mca_oracle_at(10, 10, 3)
    assert ps.total == ps.in_bounds == ORACLE_COUNTS[3]
    for x, y in ps.pixels:
        assert abs(math.hypot(x - 10, y - 10) - 3) < 1


def test_radius_ten_has_56_pixels():
    assert rasterize_circle(Circle(50, 50, 10), 100, 100).total == 56


def test_clipping_keeps_total():
    ps = rasterize_circle(Circle(1, 1, 5), 100, 100)
    assert ps.in_bounds < ps.total == ORACLE_COUNTS[5]
    assert all(0 <= x < 100 and 0 <= y < 100 for x, y in ps.pixels)
    assert ps.pixels == {p for p in mca_oracle_at(1, 1, 5) if p[0] >= 0 and p[1] >= 0}


def test_fully_off_image_circle():
    ps = rasterize_circle(Circle(-50, -50, 5), 20, 20)
    assert ps.in_bounds == 0 and ps.total == ORACLE_COUNTS[5]


def test_rejects_small_radius():
    with pytest.raises(ValueError):
        rasterize_circle(Circle(5, 5, 0.9), 10, 10)
    with pytest.raises(ValueError):
        first_octant(0)


@pytest.mark.parametrize("r", range(1, 61))
def test_oracle_equivalence(r):
    assert set(map(tuple, perimeter_offsets(r).tolist())) == mca_oracle(r)


def test_total_strictly_increasing():
    totals = [len(perimeter_offsets(r)) for r in range(2, 200)]
    assert all(a < b for a, b in zip(totals, totals[1:]))


@given(st.integers(1, 150))
def test_dihedral_symmetry(r):
    pts = set(map(tuple, perimeter_offsets(r).tolist()))
    for fx, fy, swap in [(1, 1, True), (-1, 1, False), (1, -1, False), (-1, -1, True)]:
        image = {((fx * y, fy * x) if swap else (fx * x, fy * y)) for x, y in pts}
        assert image == pts


@given(st.integers(1, 150))
def test_subpixel_deviation(r):
    for dx, dy in perimeter_offsets(r).tolist():
        assert abs(math.hypot(dx, dy) - r) < 1


def test_no_duplicates_at_seams():
    off = perimeter_offsets(7)
    assert len(off) == len(set(map(tuple, off.tolist())))


def test_center_and_radius_are_rounded():
    a = rasterize_circle(Circle(10.4, 9.6, 3.5), 40, 40)
    assert a.pixels == mca_oracle_at(10, 10, 4)


@pytest.mark.parametrize(
    "v, expected", [(2.5, 3), (-2.5, -3), (1.49, 1), (-0.5, -1), (0.0, 0), (7.0, 7), (3.5000001, 4)]
)
def test_round_half_away(v, expected):
    assert round_half_away(v) == expected


def test_offsets_read_only():
    off = perimeter_offsets(4)
    with pytest.raises(ValueError):
        off[0, 0] = 99
