"""Independent oracles for the exact pipeline.

* the one-dimensional three-gap theorem on the circle, and
* a hardware-float rasterisation of nearest-site membership on the torus.
"""

from __future__ import annotations

import bisect
import math
from dataclasses import dataclass
from typing import Iterator

import gmpy2
import numpy as np
from gmpy2 import mpfr
from scipy.spatial import cKDTree

from .errors import OracleMismatch, ThreeGapViolation
from .numerics import ConstantSpec, PrecisionConfig, Real, make_constant, precision
from .sites import SiteSet
from .voronoi import Partition


@dataclass(frozen=True)
class GapLengths1D:
    n: int
    alpha: ConstantSpec
    lengths: tuple[Real, ...]
    counts: tuple[int, ...]

    def to_json(self, places: int = 30) -> dict:
        return {
            "n": self.n,
            "alpha": str(self.alpha),
            "lengths": [x.to_decimal(places) for x in self.lengths],
            "counts": list(self.counts),
        }


def _check_three_gap(lengths, tol, alpha, n) -> None:
    if len(lengths) > 3:
        raise ThreeGapViolation(f"{alpha}, n={n}: {len(lengths)} distinct gap lengths")
    if len(lengths) == 3:
        small, mid, large = lengths
        if abs(large - small - mid) >= tol:
            raise ThreeGapViolation(f"{alpha}, n={n}: largest gap is not the sum of the other two")


def one_dim_gaps(alpha: ConstantSpec, n: int, cfg: PrecisionConfig | None = None) -> GapLengths1D:
    """Circular gap lengths of ``{frac(i*alpha) : i = 1..n}``, merged at ``10**-target``."""
    cfg = cfg or PrecisionConfig()
    if n < 1:
        raise ValueError(f"n must be >= 1, got {n}")
    digits = cfg.working_digits
    a = make_constant(alpha, cfg).value
    with precision(digits):
        tol = mpfr(10) ** (-cfg.target_digits)
        pts = sorted(i * a - gmpy2.floor(i * a) for i in range(1, n + 1))
        gaps = [pts[k + 1] - pts[k] for k in range(n - 1)]
        gaps.append(1 + pts[0] - pts[-1])
        gaps.sort()
        lengths, counts = [gaps[0]], [1]
        for g in gaps[1:]:
            if g - lengths[-1] <= tol:
                counts[-1] += 1
            else:
                lengths.append(g)
                counts.append(1)
        _check_three_gap(lengths, tol, alpha, n)
        total = sum(x * c for x, c in zip(lengths, counts))
        if abs(total - 1) >= tol:
            raise ThreeGapViolation(f"{alpha}, n={n}: gap lengths sum to {total}")
    return GapLengths1D(n, alpha, tuple(Real(x, digits) for x in lengths), tuple(counts))


def three_gap_sweep(alpha: ConstantSpec, n_max: int, cfg: PrecisionConfig | None = None) -> Iterator[int]:
    """Check the three-gap property for every n in 1..n_max, inserting one point at a time.

    A gap between the points for multiples i < j (in circle order) has length
    ``(j - i)*alpha - (floor(j*alpha) - floor(i*alpha))``, so each length is
    keyed exactly by an integer pair; numeric lengths are still compared at
    ``10**-target`` to confirm that distinct keys are distinct lengths.
    Yields the number of distinct lengths for each n.
    """
    cfg = cfg or PrecisionConfig()
    digits = cfg.working_digits
    a = make_constant(alpha, cfg).value
    with precision(digits):
        tol = mpfr(10) ** (-cfg.target_digits)
        positions: list = []
        multiples: list[int] = []
        floors: dict[int, int] = {}
        counts: dict[tuple[int, int], int] = {}

        def key(i: int, j: int, wrap: bool) -> tuple[int, int]:
            # length of the arc from point i forward to point j
            return (j - i, floors[j] - floors[i] - (1 if wrap else 0))

        def add(k, d=1):
            counts[k] = counts.get(k, 0) + d
            if not counts[k]:
                del counts[k]

        for m in range(1, n_max + 1):
            x = m * a
            fl = int(gmpy2.floor(x))
            floors[m] = fl
            pos = x - fl
            idx = bisect.bisect(positions, pos)
            positions.insert(idx, pos)
            multiples.insert(idx, m)
            size = len(positions)
            if size == 1:
                add((0, -1))  # the whole circle: 0*alpha + 1
            else:
                prev_i = multiples[idx - 1]
                next_i = multiples[(idx + 1) % size]
                wrap_prev = idx == 0
                wrap_next = idx == size - 1
                old_wrap = wrap_prev or wrap_next
                add(key(prev_i, next_i, old_wrap) if size > 2 else (0, -1), -1)
                add(key(prev_i, m, wrap_prev))
                add(key(m, next_i, wrap_next))
            keys = sorted(counts, key=lambda k: k[0] * a - k[1])
            lengths = [k[0] * a - k[1] for k in keys]
            for lo, hi in zip(lengths, lengths[1:]):
                if hi - lo <= tol:
                    raise ThreeGapViolation(f"{alpha}, n={m}: distinct gap keys with equal lengths")
            _check_three_gap(lengths, tol, alpha, m)
            if len(lengths) == 3 and keys[2] != (keys[0][0] + keys[1][0], keys[0][1] + keys[1][1]):
                raise ThreeGapViolation(f"{alpha}, n={m}: largest gap key is not the sum of the others")
            if sum(counts.values()) != m:
                raise AssertionError("gap bookkeeping lost a gap")
            yield len(lengths)


# --- raster oracle --------------------------------------------------------------


@dataclass(frozen=True)
class RasterEstimate:
    grid_m: int
    areas: np.ndarray
    bounds: np.ndarray
    adjacency: frozenset[tuple[int, int]]
    """Unordered site pairs (1-based, i < j) owning 4-adjacent pixels."""

    @property
    def bound(self) -> float:
        return float(self.bounds.max())


def _perimeter(points: list[tuple[float, float]]) -> float:
    return sum(math.dist(points[k - 1], points[k]) for k in range(len(points)))


def raster_labels(s: SiteSet, grid_m: int, block_rows: int = 256, k: int = 1):
    """Nearest-site labels (0-based) of the ``grid_m x grid_m`` pixel centres.

    With ``k > 1`` returns ``(distances, labels)`` of the k nearest sites,
    each of shape ``(grid_m, grid_m, k)``.
    """
    pts = np.array([p.as_float() for p in s.points])
    tree = cKDTree(pts, boxsize=1.0)
    centers = (np.arange(grid_m) + 0.5) / grid_m
    k = min(k, s.n)
    labels = np.empty((grid_m, grid_m, k), dtype=np.int32)
    dists = np.empty((grid_m, grid_m, k))
    for r0 in range(0, grid_m, block_rows):
        rows = centers[r0 : r0 + block_rows]
        yy, xx = np.meshgrid(rows, centers, indexing="ij")
        q = np.column_stack([xx.ravel(), yy.ravel()])
        d, idx = tree.query(q, k=k)
        labels[r0 : r0 + len(rows)] = idx.reshape(len(rows), grid_m, k)
        dists[r0 : r0 + len(rows)] = d.reshape(len(rows), grid_m, k)
    if k == 1:
        return labels[..., 0]
    return dists, labels


def _clean_adjacency(dists, labels, h: float) -> set[tuple[int, int]]:
    """Site pairs owning 4-adjacent pixels whose joining segment provably meets no third cell.

    At pixel centre p labelled a, next to a pixel labelled b, the segment of
    length h from p stays in cells a and b when b is p's second-nearest site
    and every other site is more than 2h farther than b.
    """
    nearest = labels[..., 0]
    second = labels[..., 1] if labels.shape[-1] > 1 else nearest
    margin = dists[..., 2] - dists[..., 1] if labels.shape[-1] > 2 else np.full(nearest.shape, np.inf)
    pairs = set()
    for axis in (0, 1):
        for step in (-1, 1):
            other = np.roll(nearest, step, axis=axis)
            ok = (nearest != other) & (second == other) & (margin > 2 * h)
            a, b = nearest[ok], other[ok]
            lo, hi = np.minimum(a, b), np.maximum(a, b)
            for x, y in np.unique(np.stack([lo, hi], axis=1), axis=0).tolist():
                pairs.add((x + 1, y + 1))
    return pairs


def raster_areas(s: SiteSet, grid_m: int = 2000, perimeters: list[float] | None = None) -> RasterEstimate:
    """Pixel-count area estimates with an a-priori error bound per cell.

    A pixel is misassigned only if its centre lies within half a pixel
    diagonal of the cell boundary, so the error is at most the area of that
    band: ``perimeter * sqrt(2) * h + 2 * h**2`` for pixel size ``h``.
    Without ``perimeters`` the bound uses the worst case for a cell inside the
    unit square, perimeter 4.
    """
    if grid_m < 10 * math.ceil(math.sqrt(s.n)):
        raise ValueError(f"grid_m={grid_m} too coarse for n={s.n}")
    dists, labels = raster_labels(s, grid_m, k=3) if s.n > 1 else (None, None)
    if labels is None:
        nearest = raster_labels(s, grid_m)
    else:
        nearest = labels[..., 0]
    counts = np.bincount(nearest.ravel(), minlength=s.n)
    h = 1.0 / grid_m
    areas = counts / grid_m**2
    per = np.array(perimeters if perimeters is not None else [4.0] * s.n)
    bounds = per * math.sqrt(2) * h + 2 * h * h
    pairs = _clean_adjacency(dists, labels, h) if labels is not None else set()
    return RasterEstimate(grid_m, areas, bounds, frozenset(pairs))


def raster_for_partition(p: Partition, s: SiteSet, grid_m: int = 2000) -> RasterEstimate:
    """Raster estimate whose bounds use the exact cells' perimeters."""
    perimeters = [_perimeter(c.polygon.as_float()) for c in p.cells]
    return raster_areas(s, grid_m, perimeters)


@dataclass(frozen=True)
class ValidationReport:
    n: int
    grid_m: int
    max_error: float
    max_bound: float
    worst_ratio: float
    adjacency_pairs: int

    def to_json(self) -> dict:
        return {
            "n": self.n,
            "grid_m": self.grid_m,
            "max_error": self.max_error,
            "max_bound": self.max_bound,
            "worst_error_to_bound": self.worst_ratio,
            "raster_adjacent_pairs": self.adjacency_pairs,
            "ok": True,
        }


def cross_validate(p: Partition, r: RasterEstimate) -> ValidationReport:
    exact = np.array([float(c.area) for c in p.cells])
    if len(exact) != len(r.areas):
        raise OracleMismatch(f"partition has {len(exact)} cells, raster has {len(r.areas)}")
    err = np.abs(exact - r.areas)
    bad = np.nonzero(err > r.bounds)[0]
    if len(bad):
        diags = [
            {"site": int(k) + 1, "exact": exact[k], "raster": float(r.areas[k]), "bound": float(r.bounds[k])}
            for k in bad
        ]
        raise OracleMismatch(f"{len(bad)} cells disagree with the raster beyond its bound", diags)
    exact_adj = {
        (min(c.site_index, nb.site), max(c.site_index, nb.site))
        for c in p.cells
        for nb in c.neighbors
        if nb.site != c.site_index
    }
    extra = sorted(r.adjacency - exact_adj)
    if extra:
        raise OracleMismatch(
            f"raster adjacency not present in the exact partition: {extra[:10]}",
            [{"pair": list(pr)} for pr in extra],
        )
    ratio = float((err / r.bounds).max())
    return ValidationReport(p.n, r.grid_m, float(err.max()), float(r.bounds.max()), ratio, len(r.adjacency))
