from __future__ import annotations

import re

import pytest
from shapely.geometry import Polygon

from torusgaps.sites import VectorSpec, generate_sites
from torusgaps.statistics import gap_report
from torusgaps.svg import partition_svg, render_svg, wrapped_pieces
from torusgaps.voronoi import build_partition

V23 = VectorSpec.parse("sqrt(2),sqrt(3)")


def _pieces(p):
    return [piece for c in p.cells for piece in wrapped_pieces(c.polygon.as_float())]


def test_n20_figure(tmp_path):
    p = build_partition(generate_sites(V23, 20))
    svg = partition_svg(p, gap_report(p))
    assert svg.count("<circle") == 20
    assert sum(Polygon(q).area for q in _pieces(p)) == pytest.approx(1.0, abs=1e-9)
    fills = set(re.findall(r'<polygon[^>]*fill="(#[0-9a-f]{6})"', svg))
    assert len(fills) == 6  # one colour per area class
    path = render_svg(p, tmp_path / "f.svg")
    assert path.read_text().startswith("<svg")


def test_single_site_covers_square():
    p = build_partition(generate_sites(V23, 1))
    assert sum(Polygon(q).area for q in _pieces(p)) == pytest.approx(1.0, abs=1e-12)


def test_two_sites_equal_pieces():
    p = build_partition(generate_sites(V23, 2))
    per_cell = [sum(Polygon(q).area for q in wrapped_pieces(c.polygon.as_float())) for c in p.cells]
    assert per_cell == pytest.approx([0.5, 0.5], abs=1e-12)


def test_unwritable_path(tmp_path):
    p = build_partition(generate_sites(V23, 2))
    with pytest.raises(OSError):
        render_svg(p, tmp_path / "missing" / "f.svg")
