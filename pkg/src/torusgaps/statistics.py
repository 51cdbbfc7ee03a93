"""Distinct-area counting S(n) and the k-gon census M_k(n) for a partition."""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass, field
from typing import Sequence

from gmpy2 import mpfr

from .errors import AmbiguousClustering, CertificationFailure, PairingViolation
from .numerics import PrecisionConfig, Real, agreeing_digits, precision
from .sites import SiteSet, VectorSpec, central_pairing, generate_sites
from .voronoi import Partition, build_partition

# adjacent gaps within this many orders of magnitude of the tolerance are ambiguous
AMBIGUITY_ORDERS = 20


def tolerance(exponent: int, digits: int) -> Real:
    """The absolute area tolerance ``10**-exponent`` as a Real."""
    with precision(digits):
        return Real(mpfr(10) ** (-exponent), digits)


@dataclass(frozen=True)
class AreaClass:
    representative_area: Real
    member_sites: tuple[int, ...]
    spread: Real

    def to_json(self, places: int) -> dict:
        return {
            "area": self.representative_area.to_decimal(places),
            "count": len(self.member_sites),
            "sites": list(self.member_sites),
            "spread": format(float(self.spread), ".3e"),
        }


@dataclass(frozen=True)
class Clustering:
    count: int
    classes: tuple[AreaClass, ...]
    tolerance: Real
    ambiguous_gaps: tuple[Real, ...] = ()
    """Adjacent sorted-area gaps that fall inside the ambiguity band."""

    @property
    def certified(self) -> bool:
        return not self.ambiguous_gaps

    def diagnostic(self) -> str:
        if self.certified:
            return f"S={self.count}: no adjacent gap within 1e±{AMBIGUITY_ORDERS} of the tolerance"
        gaps = ", ".join(f"{float(g):.3e}" for g in self.ambiguous_gaps)
        return f"S={self.count}: ambiguous gaps near tolerance {float(self.tolerance):.1e}: {gaps}"


def count_distinct_areas(areas: Sequence[Real], tol: Real) -> Clustering:
    """Group areas by splitting the sorted sequence at every gap larger than ``tol``.

    Members are reported as 1-based positions in ``areas``.
    """
    if not areas:
        raise ValueError("no areas to cluster")
    order = sorted(range(len(areas)), key=lambda k: areas[k].value)
    digits = min(min(a.digits for a in areas), tol.digits)
    with precision(digits):
        t = tol.value
        low, high = t * mpfr(10) ** (-AMBIGUITY_ORDERS), t * mpfr(10) ** AMBIGUITY_ORDERS
        groups: list[list[int]] = [[order[0]]]
        ambiguous = []
        for prev, cur in zip(order, order[1:]):
            gap = areas[cur].value - areas[prev].value
            if low <= gap <= high:
                ambiguous.append(Real(gap, digits))
            if gap > t:
                groups.append([cur])
            else:
                groups[-1].append(cur)
        classes = []
        for g in groups:
            spread = areas[g[-1]].value - areas[g[0]].value
            if spread > t / 10:
                raise AmbiguousClustering(
                    f"class spread {float(spread):.3e} exceeds tolerance/10 = {float(t / 10):.3e}"
                )
            classes.append(
                AreaClass(
                    representative_area=Real(areas[g[0]].value, digits),
                    member_sites=tuple(sorted(k + 1 for k in g)),
                    spread=Real(spread, digits),
                )
            )
    return Clustering(len(classes), tuple(classes), tol, tuple(ambiguous))


def side_histogram(p: Partition) -> dict[int, int]:
    return dict(sorted(Counter(c.sides for c in p.cells).items()))


@dataclass(frozen=True)
class GapReport:
    n: int
    v: VectorSpec
    S: int
    M: dict[int, int]
    classes: tuple[AreaClass, ...]
    tolerance_used: Real
    tolerance_exponent: int
    certified: bool
    certified_digits: int | None = None
    working_digits: int | None = None
    diagnostics: list[str] = field(default_factory=list)

    def to_json(self) -> dict:
        places = max(self.tolerance_exponent, 1)
        return {
            "n": self.n,
            "vector": str(self.v),
            "S": self.S,
            "M": {str(k): m for k, m in self.M.items()},
            "tolerance_exponent": self.tolerance_exponent,
            "certified": self.certified,
            "certified_digits": self.certified_digits,
            "working_digits": self.working_digits,
            "classes": [c.to_json(places) for c in self.classes],
            "diagnostics": list(self.diagnostics),
        }


def gap_report(
    p: Partition,
    cfg: PrecisionConfig | None = None,
    tolerance_exponent: int | None = None,
    check: Partition | None = None,
) -> GapReport:
    """S(n), M_k(n) and the area classes of ``p``.

    ``check`` is an optional rebuild of the same sites at a higher precision;
    when given, the report is certified only if every area agrees with it to
    ``target_digits`` and S and M are unchanged.
    """
    cfg = cfg or p.cfg
    exponent = cfg.target_digits if tolerance_exponent is None else tolerance_exponent
    tol = tolerance(exponent, cfg.working_digits)
    clustering = count_distinct_areas(p.areas, tol)
    hist = side_histogram(p)
    if sum(hist.values()) != p.n:
        raise AssertionError("histogram mass differs from n")

    member_class = {}
    for idx, cls in enumerate(clustering.classes):
        for site in cls.member_sites:
            member_class[site] = idx
    for i, j in _pairs(p):
        if member_class[i] != member_class[j]:
            raise PairingViolation(f"centrally paired cells {i} and {j} fall in different area classes")

    diagnostics = [clustering.diagnostic()]
    certified = clustering.certified
    certified_digits = None
    if check is not None:
        certified_digits = min(agreeing_digits(a, b) for a, b in zip(p.areas, check.areas))
        check_clustering = count_distinct_areas(check.areas, tolerance(exponent, check.cfg.working_digits))
        same = check_clustering.count == clustering.count and side_histogram(check) == hist
        if certified_digits < cfg.target_digits:
            diagnostics.append(f"only {certified_digits} area digits stable under escalation")
        if not same:
            diagnostics.append("S or M changed under precision escalation")
        certified = certified and same and certified_digits >= cfg.target_digits
    return GapReport(
        n=p.n,
        v=p.v,
        S=clustering.count,
        M=hist,
        classes=clustering.classes,
        tolerance_used=tol,
        tolerance_exponent=exponent,
        certified=certified,
        certified_digits=certified_digits,
        working_digits=p.cfg.working_digits,
        diagnostics=diagnostics,
    )


def _pairs(p: Partition) -> list[tuple[int, int]]:
    n = p.n
    return [(i, n + 1 - i) for i in range(1, n // 2 + 1)]


def certified_partitions(s: SiteSet, workers: int = 1) -> tuple[Partition, Partition]:
    """Build ``s`` at its working precision and at escalated precision(s).

    Escalates a second time if the first rerun does not reproduce
    ``target_digits`` of every area; returns the (base, check) pair whose
    agreement is reported by :func:`gap_report`.
    """
    central_pairing(s)
    cfg = s.cfg
    base = build_partition(s, workers)
    for times in (1, 2):
        check = build_partition(_at(s, cfg.escalated(times)), workers)
        agree = min(agreeing_digits(a, b) for a, b in zip(base.areas, check.areas))
        if agree >= cfg.target_digits:
            return base, check
        base = check
    raise CertificationFailure(f"areas agree to only {agree} digits after two escalations")


def _at(s: SiteSet, cfg: PrecisionConfig) -> SiteSet:
    return generate_sites(s.v, s.n, cfg)
