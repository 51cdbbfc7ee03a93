"""SVG figures of torus partitions (display only; coordinates at 12 digits)."""

from __future__ import annotations

import colorsys
from pathlib import Path
from xml.sax.saxutils import escape

from shapely.geometry import Polygon as ShapelyPolygon
from shapely.geometry import box

from .statistics import GapReport
from .voronoi import Partition

_UNIT = box(0.0, 0.0, 1.0, 1.0)
_SHIFTS = [(ox, oy) for ox in (-1, 0, 1) for oy in (-1, 0, 1)]


def _palette(k: int) -> list[str]:
    out = []
    for idx in range(max(k, 1)):
        r, g, b = colorsys.hls_to_rgb(idx / max(k, 1), 0.72, 0.55)
        out.append(f"#{int(r * 255):02x}{int(g * 255):02x}{int(b * 255):02x}")
    return out


def wrapped_pieces(points: list[tuple[float, float]]) -> list[list[tuple[float, float]]]:
    """The parts of a cover-space polygon that land in [0,1]^2 after reduction mod 1."""
    pieces = []
    for ox, oy in _SHIFTS:
        poly = ShapelyPolygon([(x + ox, y + oy) for x, y in points])
        clipped = poly.intersection(_UNIT)
        if clipped.is_empty or clipped.area <= 0:
            continue
        geoms = getattr(clipped, "geoms", [clipped])
        for g in geoms:
            if g.geom_type == "Polygon" and g.area > 0:
                pieces.append(list(g.exterior.coords)[:-1])
    return pieces


def partition_svg(p: Partition, report: GapReport | None = None, size: int = 600) -> str:
    class_of = {}
    colors = _palette(len(report.classes) if report else 1)
    if report:
        for idx, cls in enumerate(report.classes):
            for site in cls.member_sites:
                class_of[site] = idx

    def fmt(v: float) -> str:
        return f"{v:.12f}"

    lines = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{size}" height="{size}" viewBox="0 0 1 1">',
        f"<title>{escape(f'Voronoi partition of the torus, v={p.v.label}, n={p.n}')}</title>",
        # y grows upward in the torus, downward in SVG
        '<g transform="matrix(1 0 0 -1 0 1)">',
        '<rect x="0" y="0" width="1" height="1" fill="white"/>',
    ]
    for cell in p.cells:
        color = colors[class_of.get(cell.site_index, 0)]
        for piece in wrapped_pieces(cell.polygon.as_float()):
            pts = " ".join(f"{fmt(x)},{fmt(y)}" for x, y in piece)
            lines.append(
                f'<polygon points="{pts}" fill="{color}" stroke="black" '
                f'stroke-width="0.002" data-site="{cell.site_index}" data-sides="{cell.sides}"/>'
            )
    r = min(0.012, 0.25 / max(p.n, 1) ** 0.5)
    for cell in p.cells:
        x, y = cell.site.as_float()
        lines.append(f'<circle cx="{fmt(x)}" cy="{fmt(y)}" r="{r:.6f}" fill="black" data-site="{cell.site_index}"/>')
    lines.append("</g>")
    lines.append("</svg>")
    return "\n".join(lines) + "\n"


def render_svg(p: Partition, path: str | Path, report: GapReport | None = None) -> Path:
    path = Path(path)
    try:
        path.write_text(partition_svg(p, report), encoding="utf-8")
    except OSError as exc:
        raise OSError(f"cannot write SVG to {path}: {exc}") from exc
    return path
