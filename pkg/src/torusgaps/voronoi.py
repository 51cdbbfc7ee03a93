"""Voronoi partition of the flat unit torus by per-cell half-plane clipping.

Each cell is built in the chart of the universal cover centred on its own site.
It starts as the unit square (the cell of the site against its own lattice
translates) and is clipped by perpendicular bisectors of the other sites'
translates, taken in order of increasing distance. Clipping stops once the
next candidate lies farther than twice the cell's current circumradius, since
such a site cannot cut the cell.

Every vertex is computed directly as the intersection of two bisector lines,
never by interpolating along an already-rounded edge, so rounding errors do
not accumulate across clips.
"""

from __future__ import annotations

import logging
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from typing import Iterable, Sequence

import gmpy2
import numpy as np
from gmpy2 import mpfr

from .errors import DegeneracyError, PartitionInconsistency
from .numerics import PrecisionConfig, Real, precision
from .sites import SiteSet, TorusPoint, VectorSpec

log = logging.getLogger(__name__)

_OFFSETS = [(ox, oy) for ox in (-1, 0, 1) for oy in (-1, 0, 1)]


@dataclass(frozen=True)
class CoverPoint:
    x: Real
    y: Real


@dataclass(frozen=True)
class Polygon:
    vertices: tuple[CoverPoint, ...]

    def __post_init__(self) -> None:
        if len(self.vertices) < 3:
            raise ValueError(f"polygon needs >= 3 vertices, got {len(self.vertices)}")

    def __len__(self) -> int:
        return len(self.vertices)

    def as_float(self) -> list[tuple[float, float]]:
        return [(float(v.x), float(v.y)) for v in self.vertices]


@dataclass(frozen=True)
class Neighbor:
    """The site ``site`` translated by the integer vector ``shift``.

    Its displacement from the owning cell's site is ``p[site] - p[owner] + shift``.
    """

    site: int
    shift: tuple[int, int]

    def reciprocal(self, owner: int) -> Neighbor:
        return Neighbor(owner, (-self.shift[0], -self.shift[1]))


@dataclass(frozen=True, eq=False)
class VoronoiCell:
    site_index: int
    site: TorusPoint
    polygon: Polygon
    area: Real
    neighbors: tuple[Neighbor, ...]
    """``neighbors[k]`` generates the edge from vertex k to vertex k+1."""

    @property
    def sides(self) -> int:
        return len(self.polygon)

    @property
    def neighbor_sites(self) -> frozenset[Neighbor]:
        return frozenset(self.neighbors)

    def relative_vertices(self) -> list[tuple[Real, Real]]:
        """Vertices as displacements from the site."""
        return [(v.x - self.site.x, v.y - self.site.y) for v in self.polygon.vertices]


@dataclass(frozen=True, eq=False)
class Partition:
    cells: tuple[VoronoiCell, ...]
    n: int
    v: VectorSpec
    cfg: PrecisionConfig
    vertex_count: int
    edge_count: int

    def cell(self, i: int) -> VoronoiCell:
        return self.cells[i - 1]

    @property
    def areas(self) -> list[Real]:
        return [c.area for c in self.cells]

    def area_sum(self) -> Real:
        total = self.cells[0].area
        for c in self.cells[1:]:
            total = total + c.area
        return total

    def to_json(self) -> dict:
        places = self.cfg.target_digits
        return {
            "n": self.n,
            "vector": str(self.v),
            "precision": {
                "target_digits": self.cfg.target_digits,
                "guard_digits": self.cfg.guard_digits,
                "working_digits": self.cfg.working_digits,
            },
            "vertex_count": self.vertex_count,
            "edge_count": self.edge_count,
            "cells": {
                str(c.site_index): {
                    "site": [c.site.x.to_decimal(places), c.site.y.to_decimal(places)],
                    "sides": c.sides,
                    "area": c.area.to_decimal(places),
                    "vertices": [[p.x.to_decimal(places), p.y.to_decimal(places)] for p in c.polygon.vertices],
                    "neighbors": [[nb.site, list(nb.shift)] for nb in c.neighbors],
                }
                for c in self.cells
            },
        }


def torus_delta(a: TorusPoint, b: TorusPoint) -> tuple[Real, Real]:
    """Displacement from ``a`` to the nearest representative of ``b``.

    Components lie in [-1/2, 1/2]; an exact antipodal tie resolves to +1/2.
    """
    out = []
    for ca, cb in ((a.x, b.x), (a.y, b.y)):
        d = cb - ca
        with precision(d.digits):
            k = gmpy2.floor(d.value + mpfr("0.5"))
            r = d.value - k
            if r == mpfr("-0.5"):
                r = -r
        out.append(Real(r, d.digits))
    return out[0], out[1]


# --- low-level geometry on raw mpfr values (caller holds the precision context) ---


def _intersect(l1, l2):
    a1, b1, c1 = l1[0], l1[1], l1[2]
    a2, b2, c2 = l2[0], l2[1], l2[2]
    det = a1 * b2 - a2 * b1
    return ((c1 * b2 - c2 * b1) / det, (a1 * c2 - a2 * c1) / det)


def _shoelace(verts) -> object:
    s = mpfr(0)
    m = len(verts)
    for k in range(m):
        x0, y0 = verts[k]
        x1, y1 = verts[(k + 1) % m]
        s += x0 * y1 - x1 * y0
    return abs(s) / 2


class _Tolerances:
    def __init__(self, cfg: PrecisionConfig):
        with precision(cfg.working_digits):
            # below zero_tol a quantity is rounding noise; above nonzero_tol it is real
            self.zero = mpfr(10) ** (-(cfg.working_digits - 10))
            self.nonzero = mpfr(10) ** (-cfg.target_digits)


def _turn_signs(verts, tol: _Tolerances, sites=()) -> list[bool]:
    """For each vertex, True if the turn there is certified zero (collinear)."""
    m = len(verts)
    flags = []
    for k in range(m):
        (x0, y0), (x1, y1), (x2, y2) = verts[k - 1], verts[k], verts[(k + 1) % m]
        cross = (x1 - x0) * (y2 - y1) - (y1 - y0) * (x2 - x1)
        mag = abs(cross)
        if mag <= tol.zero:
            flags.append(True)
        elif mag < tol.nonzero:
            raise DegeneracyError(f"turn at vertex {k} cannot be certified ({float(mag):.3e})", sites)
        elif cross < 0:
            raise ValueError("polygon is not convex counterclockwise")
        else:
            flags.append(False)
    return flags


def merge_collinear(points: Sequence[tuple], cfg: PrecisionConfig | None = None) -> Polygon:
    """Drop vertices whose adjacent edges are collinear; returns a strictly convex Polygon.

    ``points`` is a counterclockwise sequence of ``(x, y)`` pairs given as Reals,
    ints, or decimal strings.
    """
    cfg = cfg or PrecisionConfig()
    digits = cfg.working_digits
    tol = _Tolerances(cfg)
    with precision(digits):
        verts = [(_raw(x), _raw(y)) for x, y in points]
        if len(verts) < 3:
            raise ValueError("need at least 3 vertices")
        while True:
            flags = _turn_signs(verts, tol)
            if not any(flags):
                break
            drop = flags.index(True)
            del verts[drop]
            if len(verts) < 3:
                raise DegeneracyError("polygon collapsed while merging collinear edges")
        return Polygon(tuple(CoverPoint(Real(x, digits), Real(y, digits)) for x, y in verts))


def _raw(x):
    if isinstance(x, Real):
        return mpfr(x.value)
    if isinstance(x, float):
        return mpfr(repr(x))
    return mpfr(x)


def polygon_area(p: Polygon) -> Real:
    digits = min(min(v.x.digits, v.y.digits) for v in p.vertices)
    with precision(digits):
        return Real(_shoelace([(v.x.value, v.y.value) for v in p.vertices]), digits)


# --- cell construction ---------------------------------------------------------


class _CellBuilder:
    """Shared per-SiteSet state for building cells: float shadows and exact coordinates."""

    def __init__(self, s: SiteSet):
        self.s = s
        self.cfg = s.cfg
        self.digits = s.cfg.working_digits
        self.tol = _Tolerances(s.cfg)
        self.raw = s.raw
        self.xf = np.array([float(x) for x, _ in self.raw])
        self.yf = np.array([float(y) for _, y in self.raw])
        with precision(self.digits):
            self.eps_clip = mpfr(10) ** (-(self.cfg.target_digits + self.cfg.guard_digits // 2))

    def candidates(self, i0: int):
        """Other sites' translates near site ``i0`` (0-based), nearest first.

        Returns arrays (site index 0-based, shift x, shift y, float squared distance).
        """
        n = self.s.n
        others = np.arange(n) != i0
        idx = np.nonzero(others)[0]
        dx = self.xf[idx] - self.xf[i0]
        dy = self.yf[idx] - self.yf[i0]
        bx = -np.rint(dx)
        by = -np.rint(dy)
        js, sxs, sys_, d2s = [], [], [], []
        for ox, oy in _OFFSETS:
            sx = bx + ox
            sy = by + oy
            d2 = (dx + sx) ** 2 + (dy + sy) ** 2
            # a cell inside the unit square has circumradius <= sqrt(2)/2
            keep = d2 < 2.0 + 1e-9
            js.append(idx[keep])
            sxs.append(sx[keep])
            sys_.append(sy[keep])
            d2s.append(d2[keep])
        j = np.concatenate(js)
        sx = np.concatenate(sxs).astype(np.int64)
        sy = np.concatenate(sys_).astype(np.int64)
        d2 = np.concatenate(d2s)
        order = np.lexsort((sy, sx, j, d2))
        return j[order], sx[order], sy[order], d2[order]

    def build(self, i: int) -> VoronoiCell:
        i0 = i - 1
        digits = self.digits
        tol = self.tol
        with precision(digits):
            half = mpfr("0.5")
            # lines a*x + b*y = c in the chart centred on the site, with their generator
            lines = [
                (mpfr(1), mpfr(0), half, Neighbor(i, (1, 0))),
                (mpfr(0), mpfr(1), half, Neighbor(i, (0, 1))),
                (mpfr(-1), mpfr(0), half, Neighbor(i, (-1, 0))),
                (mpfr(0), mpfr(-1), half, Neighbor(i, (0, -1))),
            ]
            # vertex k joins edge k-1 and edge k
            verts = [(half, -half), (half, half), (-half, half), (-half, -half)]
            r2 = 0.5
            px, py = self.raw[i0]
            js, sxs, sys_, d2s = self.candidates(i0)
            for j0, sx, sy, d2f in zip(js.tolist(), sxs.tolist(), sys_.tolist(), d2s.tolist()):
                if d2f > 4.0 * r2 * (1 + 1e-9) + 1e-12:
                    break
                qx, qy = self.raw[j0]
                ddx = qx - px + sx
                ddy = qy - py + sy
                c = (ddx * ddx + ddy * ddy) / 2
                f = [ddx * x + ddy * y - c for x, y in verts]
                fmax = max(f)
                if fmax < -self.eps_clip:
                    continue
                if any(abs(fk) <= self.eps_clip for fk in f):
                    raise DegeneracyError(
                        "bisector passes through a Voronoi vertex (cocircular sites)", (i, j0 + 1)
                    )
                new_line = (ddx, ddy, c, Neighbor(j0 + 1, (sx, sy)))
                verts, lines = _clip(verts, lines, f, new_line)
                r2 = max(float(x * x + y * y) for x, y in verts)

            _check_separation(verts, tol, i)
            flags = _turn_signs(verts, tol, (i,))
            if any(flags):
                # distinct bisectors can never be collinear
                raise DegeneracyError("collinear consecutive edges in a Voronoi cell", (i,))
            area = _shoelace(verts)
            vertices = tuple(
                CoverPoint(Real(px + x, digits), Real(py + y, digits)) for x, y in verts
            )
            neighbors = tuple(line[3] for line in lines)
        return VoronoiCell(
            site_index=i,
            site=self.s.point(i),
            polygon=Polygon(vertices),
            area=Real(area, digits),
            neighbors=neighbors,
        )


def _clip(verts, lines, f, new_line):
    """Intersect the convex polygon with ``{f <= 0}`` where f is affine, given at the vertices.

    ``lines[k]`` carries the edge from ``verts[k]`` to ``verts[k+1]``.
    """
    m = len(verts)
    out_v, out_l = [], []
    for k in range(m):
        k1 = (k + 1) % m
        inside, inside_next = f[k] < 0, f[k1] < 0
        if inside:
            out_v.append(verts[k])
            out_l.append(lines[k])
            if not inside_next:
                out_v.append(_intersect(lines[k], new_line))
                out_l.append(new_line)
        elif inside_next:
            out_v.append(_intersect(new_line, lines[k]))
            out_l.append(lines[k])
    return out_v, out_l


def _check_separation(verts, tol: _Tolerances, i: int) -> None:
    m = len(verts)
    for k in range(m):
        x0, y0 = verts[k]
        x1, y1 = verts[(k + 1) % m]
        if abs(x1 - x0) + abs(y1 - y0) < tol.nonzero:
            raise DegeneracyError("two cell vertices are not certifiably distinct", (i,))


def build_cell(s: SiteSet, i: int) -> VoronoiCell:
    """Voronoi cell of site ``i`` (1-based)."""
    if not 1 <= i <= s.n:
        raise ValueError(f"site index {i} outside 1..{s.n}")
    return _CellBuilder(s).build(i)


def _build_range(s: SiteSet, indices: list[int]) -> list[VoronoiCell]:
    builder = _CellBuilder(s)
    return [builder.build(i) for i in indices]


def _build_cells(s: SiteSet, workers: int) -> list[VoronoiCell]:
    indices = list(range(1, s.n + 1))
    if workers <= 1 or s.n < 64:
        return _build_range(s, indices)
    chunks = [indices[k::workers] for k in range(workers)]
    with ProcessPoolExecutor(max_workers=workers) as pool:
        parts = list(pool.map(_build_range, [s] * workers, chunks))
    cells: list[VoronoiCell | None] = [None] * s.n
    for chunk, built in zip(chunks, parts):
        for i, cell in zip(chunk, built):
            cells[i - 1] = cell
    return cells  # type: ignore[return-value]


def _vertex_key(v: CoverPoint, places: int) -> tuple[int, int]:
    scale = 10**places
    mod = scale
    with precision(v.x.digits):
        kx = int(gmpy2.rint(v.x.value * scale)) % mod
        ky = int(gmpy2.rint(v.y.value * scale)) % mod
    return kx, ky


def count_torus_vertices(cells: Iterable[VoronoiCell], places: int = 30) -> int:
    keys = set()
    for c in cells:
        for v in c.polygon.vertices:
            keys.add(_vertex_key(v, places))
    return len(keys)


def build_partition(s: SiteSet, workers: int = 1) -> Partition:
    """All n cells, validated for area conservation, reciprocity and Euler counts."""
    workers = max(1, workers)
    cells = _build_cells(s, workers)
    n = s.n
    total_sides = sum(c.sides for c in cells)
    if total_sides % 2:
        raise PartitionInconsistency(f"odd total side count {total_sides}")
    edge_count = total_sides // 2
    vertex_count = count_torus_vertices(cells)
    p = Partition(tuple(cells), n, s.v, s.cfg, vertex_count, edge_count)
    validate_partition(p)
    return p


def validate_partition(p: Partition) -> None:
    cfg = p.cfg
    err = abs(p.area_sum() - 1)
    with precision(err.digits):
        if err.value >= mpfr(10) ** (-cfg.target_digits):
            raise PartitionInconsistency(f"cell areas sum to 1 + {float(err):.3e}")
    for c in p.cells:
        for nb in c.neighbors:
            other = p.cell(nb.site)
            if nb.reciprocal(c.site_index) not in other.neighbor_sites:
                raise PartitionInconsistency(
                    f"site {c.site_index} lists {nb} but site {nb.site} does not list it back"
                )
    # V - E + F = 0 on the torus
    if p.vertex_count - p.edge_count + p.n != 0:
        raise PartitionInconsistency(
            f"Euler characteristic {p.vertex_count - p.edge_count + p.n} != 0"
        )
    if p.n >= 2:
        total_sides = 2 * p.edge_count
        if total_sides != 6 * p.n:
            raise PartitionInconsistency(f"sum of sides {total_sides} != 6n = {6 * p.n}")
